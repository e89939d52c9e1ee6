#include "rrlab/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "rrlab/hash.hpp"
#include "rrlab/png_io.hpp"
#include "rrlab/rng.hpp"

namespace rrlab::scenegen {

using nlohmann::json;

namespace {

constexpr std::array<Shape, 6> kShapes = {Shape::Circle, Shape::Square, Shape::Triangle,
                                          Shape::Star,   Shape::Ring,   Shape::Bar};

struct PaletteEntry {
    const char* name;
    std::array<int, 3> rgb;
};

constexpr std::array<PaletteEntry, 10> kPalette = {{
    {"red", {230, 40, 40}},
    {"blue", {50, 90, 230}},
    {"green", {60, 200, 70}},
    {"yellow", {235, 220, 50}},
    {"magenta", {225, 60, 225}},
    {"cyan", {60, 220, 220}},
    {"orange", {240, 150, 40}},
    {"white", {240, 240, 240}},
    {"purple", {140, 60, 220}},
    {"olive", {150, 160, 60}},
}};

// Sizes cycle through a fixed spread so every vocabulary contains both small
// and large objects (containment needs a size gap).
constexpr std::array<int, 8> kSizeCycle = {4, 8, 5, 7, 6, 8, 4, 7};

struct RelationCatalogEntry {
    const char* name;
    RelationKind kind;
    int dx, dy;
    bool subject_inside;
};

constexpr std::array<RelationCatalogEntry, 8> kRelationCatalog = {{
    {"above", RelationKind::Positional, 0, 1, true},
    {"below", RelationKind::Positional, 0, -1, true},
    {"left_of", RelationKind::Positional, 1, 0, true},
    {"right_of", RelationKind::Positional, -1, 0, true},
    {"inside", RelationKind::Containment, 0, 0, true},
    {"contains", RelationKind::Containment, 0, 0, false},
    {"upper_left_of", RelationKind::Positional, 1, 1, true},
    {"lower_right_of", RelationKind::Positional, -1, -1, true},
}};

bool bbox_disjoint(const Placement& a, const Placement& b) {
    int gap = 1;
    return std::abs(a.cx - b.cx) > a.size + b.size + gap ||
           std::abs(a.cy - b.cy) > a.size + b.size + gap;
}

}  // namespace

const char* shape_name(Shape s) {
    switch (s) {
        case Shape::Circle: return "circle";
        case Shape::Square: return "square";
        case Shape::Triangle: return "triangle";
        case Shape::Star: return "star";
        case Shape::Ring: return "ring";
        case Shape::Bar: return "bar";
    }
    return "circle";
}

Shape shape_from_name(const std::string& name) {
    for (Shape s : kShapes)
        if (name == shape_name(s)) return s;
    throw std::invalid_argument("unknown shape: " + name);
}

const ObjectSpec& Vocab::object(const std::string& name) const {
    for (const auto& o : objects)
        if (o.name == name) return o;
    throw std::invalid_argument("unknown object: " + name);
}

const RelationSpec& Vocab::relation(const std::string& name) const {
    for (const auto& r : relations)
        if (r.name == name) return r;
    throw std::invalid_argument("unknown relation: " + name);
}

bool Vocab::has_object(const std::string& name) const {
    return std::any_of(objects.begin(), objects.end(),
                       [&](const ObjectSpec& o) { return o.name == name; });
}

std::string relational_prompt(const Triplet& t) {
    return "a " + t.subject + " " + t.relation + " a " + t.object;
}

std::string template_prompt(const std::string& object_name) {
    return "This is a photo of a " + object_name;
}

std::string prompt_slug(const std::string& prompt) {
    std::string s;
    s.reserve(prompt.size());
    for (char c : prompt) s.push_back(c == ' ' ? '-' : static_cast<char>(std::tolower(c)));
    return s;
}

OspPair make_pair(const Triplet& forward) {
    if (forward.subject == forward.object)
        throw std::invalid_argument("triplet subject equals object: " + forward.subject);
    OspPair p;
    p.forward = forward;
    p.backward = Triplet{forward.object, forward.relation, forward.subject};
    p.template_a = forward.subject;
    p.template_b = forward.object;
    return p;
}

bool predicate_holds(const RelationSpec& rel, const Placement& a, const Placement& b) {
    if (rel.kind == RelationKind::Containment) {
        const Placement& inner = rel.subject_inside ? a : b;
        const Placement& outer = rel.subject_inside ? b : a;
        double m = rel.margin;
        return inner.cx - inner.size >= outer.cx - outer.size + m &&
               inner.cx + inner.size <= outer.cx + outer.size - m &&
               inner.cy - inner.size >= outer.cy - outer.size + m &&
               inner.cy + inner.size <= outer.cy + outer.size - m;
    }
    bool ok = true;
    if (rel.dx != 0) ok = ok && (b.cx - a.cx) * rel.dx >= rel.margin;
    if (rel.dy != 0) ok = ok && (b.cy - a.cy) * rel.dy >= rel.margin;
    return ok;
}

Vocab build_vocab(uint64_t seed, int n_objects, int n_relations) {
    if (n_objects < 2) throw std::invalid_argument("n_objects must be >= 2");
    if (n_relations < 1) throw std::invalid_argument("n_relations must be >= 1");
    const int max_objects = static_cast<int>(kShapes.size() * kPalette.size());
    if (n_objects > max_objects)
        throw std::invalid_argument("n_objects exceeds distinct (shape,color) combinations");
    if (n_relations > static_cast<int>(kRelationCatalog.size()))
        throw std::invalid_argument("n_relations exceeds relation catalog size");

    RngStream rng(seed, "vocab");
    std::vector<int> color_perm(kPalette.size());
    for (size_t i = 0; i < color_perm.size(); ++i) color_perm[i] = static_cast<int>(i);
    rng.shuffle(color_perm);

    Vocab v;
    for (int i = 0; i < n_objects; ++i) {
        Shape shape = kShapes[i % kShapes.size()];
        // Ensure (shape,color) uniqueness: walk the permuted palette until free.
        int pick = -1;
        for (size_t step = 0; step < kPalette.size(); ++step) {
            int ci = color_perm[(i + step) % kPalette.size()];
            bool taken = std::any_of(v.objects.begin(), v.objects.end(), [&](const ObjectSpec& o) {
                return o.shape == shape && o.color == kPalette[ci].rgb;
            });
            if (!taken) {
                pick = ci;
                break;
            }
        }
        if (pick < 0) throw std::logic_error("color assignment exhausted");
        ObjectSpec obj;
        obj.shape = shape;
        obj.color = kPalette[pick].rgb;
        obj.name = std::string(kPalette[pick].name) + "_" + shape_name(shape);
        obj.size = kSizeCycle[i % kSizeCycle.size()];
        v.objects.push_back(obj);
    }

    for (int i = 0; i < n_relations; ++i) {
        const auto& e = kRelationCatalog[i];
        v.relations.push_back(RelationSpec{e.name, e.kind, e.dx, e.dy, e.subject_inside, 2.0});
    }
    return v;
}

Scene sample_scene(const Triplet& triplet, const Vocab& vocab, uint64_t seed, int canvas) {
    const ObjectSpec& a = vocab.object(triplet.subject);
    const ObjectSpec& b = vocab.object(triplet.object);
    const RelationSpec& rel = vocab.relation(triplet.relation);
    if (triplet.subject == triplet.object)
        throw std::invalid_argument("triplet subject equals object");

    RngStream rng(seed, "scene");
    auto place = [&](const ObjectSpec& o) {
        Placement p;
        p.object = o;
        p.size = o.size;
        p.cx = static_cast<int>(rng.uniform_int(o.size, canvas - o.size));
        p.cy = static_cast<int>(rng.uniform_int(o.size, canvas - o.size));
        return p;
    };

    Scene scene;
    scene.canvas_h = scene.canvas_w = canvas;
    scene.relation_label = triplet;

    if (rel.kind == RelationKind::Containment) {
        const ObjectSpec& inner = rel.subject_inside ? a : b;
        const ObjectSpec& outer = rel.subject_inside ? b : a;
        int slack = outer.size - inner.size - static_cast<int>(rel.margin);
        if (slack < 0)
            throw std::runtime_error("containment infeasible for sizes of " + inner.name +
                                     " in " + outer.name);
        Placement po = place(outer);
        Placement pi;
        pi.object = inner;
        pi.size = inner.size;
        pi.cx = po.cx + static_cast<int>(rng.uniform_int(-slack, slack + 1));
        pi.cy = po.cy + static_cast<int>(rng.uniform_int(-slack, slack + 1));
        // Painter order: container first so the contained object stays visible.
        scene.placements = rel.subject_inside ? std::vector<Placement>{po, pi}
                                              : std::vector<Placement>{pi, po};
        return scene;
    }

    for (int attempt = 0; attempt < 2000; ++attempt) {
        Placement pa = place(a);
        Placement pb = place(b);
        if (predicate_holds(rel, pa, pb) && bbox_disjoint(pa, pb)) {
            scene.placements = {pa, pb};
            return scene;
        }
    }
    throw std::runtime_error("feasible region empty for relation " + rel.name + " with objects " +
                             a.name + ", " + b.name);
}

Scene sample_single_scene(const std::string& object_name, const Vocab& vocab, uint64_t seed,
                          int canvas) {
    const ObjectSpec& o = vocab.object(object_name);
    RngStream rng(seed, "scene1");
    Scene scene;
    scene.canvas_h = scene.canvas_w = canvas;
    Placement p;
    p.object = o;
    p.size = o.size;
    p.cx = static_cast<int>(rng.uniform_int(o.size, canvas - o.size));
    p.cy = static_cast<int>(rng.uniform_int(o.size, canvas - o.size));
    scene.placements.push_back(p);
    return scene;
}

bool shape_covers(Shape shape, double dx, double dy, double s) {
    switch (shape) {
        case Shape::Circle:
            return dx * dx + dy * dy <= s * s;
        case Shape::Square:
            return std::abs(dx) <= s && std::abs(dy) <= s;
        case Shape::Triangle:
            return dy >= -s && dy <= s && std::abs(dx) <= (dy + s) * 0.5;
        case Shape::Star: {
            double r = std::sqrt(dx * dx + dy * dy);
            if (r <= 0.3 * s) return true;
            double theta = std::atan2(-dy, dx);  // image y grows downward
            double spike = std::numbers::pi / 2.0;
            double step = 2.0 * std::numbers::pi / 5.0;
            double d = std::fmod(std::abs(theta - spike), step);
            d = std::min(d, step - d);
            double f = 0.4 + 0.6 * (1.0 - d / (step * 0.5));
            return r <= s * f;
        }
        case Shape::Ring: {
            double r2 = dx * dx + dy * dy;
            return r2 <= s * s && r2 >= (0.55 * s) * (0.55 * s);
        }
        case Shape::Bar:
            return std::abs(dx) <= s && std::abs(dy) <= std::max(1.0, 0.3 * s);
    }
    return false;
}

Image render(const Scene& scene) {
    Image img(scene.canvas_h, scene.canvas_w);
    for (const auto& p : scene.placements) {
        for (int y = std::max(0, p.cy - p.size); y <= std::min(scene.canvas_h - 1, p.cy + p.size); ++y)
            for (int x = std::max(0, p.cx - p.size); x <= std::min(scene.canvas_w - 1, p.cx + p.size); ++x)
                if (shape_covers(p.object.shape, x - p.cx, y - p.cy, p.size))
                    for (int c = 0; c < 3; ++c)
                        img.at(c, x, y) = static_cast<Real>(p.object.color[c]) / Real(255);
    }
    return img;
}

namespace {

json triplet_to_json(const Triplet& t) {
    return json{{"subject", t.subject}, {"relation", t.relation}, {"object", t.object}};
}

Triplet triplet_from_json(const json& j) {
    return Triplet{j.at("subject"), j.at("relation"), j.at("object")};
}

json scene_to_json(const Scene& s) {
    json placements = json::array();
    for (const auto& p : s.placements)
        placements.push_back(json{{"name", p.object.name},
                                  {"shape", shape_name(p.object.shape)},
                                  {"color", p.object.color},
                                  {"x", p.cx},
                                  {"y", p.cy},
                                  {"size", p.size}});
    json j{{"canvas", {s.canvas_h, s.canvas_w}}, {"placements", placements}};
    j["relation"] = s.relation_label ? triplet_to_json(*s.relation_label) : json(nullptr);
    return j;
}

Scene scene_from_json(const json& j) {
    Scene s;
    s.canvas_h = j.at("canvas")[0];
    s.canvas_w = j.at("canvas")[1];
    for (const auto& pj : j.at("placements")) {
        Placement p;
        p.object.name = pj.at("name");
        p.object.shape = shape_from_name(pj.at("shape"));
        p.object.color = pj.at("color");
        p.cx = pj.at("x");
        p.cy = pj.at("y");
        p.size = pj.at("size");
        p.object.size = p.size;
        s.placements.push_back(p);
    }
    if (!j.at("relation").is_null()) s.relation_label = triplet_from_json(j.at("relation"));
    return s;
}

}  // namespace

Manifest write_dataset(const std::vector<OspPair>& pairs, int images_per_prompt,
                       const std::filesystem::path& out_dir, const Vocab& vocab, uint64_t seed,
                       int canvas, bool force) {
    if (images_per_prompt < 1) throw std::invalid_argument("images_per_prompt must be >= 1");
    namespace fs = std::filesystem;
    fs::path manifest_path = out_dir / "manifest.json";
    if (fs::exists(manifest_path) && !force)
        throw std::runtime_error("manifest exists (use force): " + manifest_path.string());
    fs::create_directories(out_dir / "images");

    struct PromptEntry {
        std::string prompt;
        std::optional<Triplet> triplet;
        std::optional<std::string> single_object;
    };
    std::vector<PromptEntry> prompts;
    auto add_prompt = [&](PromptEntry e) {
        for (const auto& p : prompts)
            if (p.prompt == e.prompt) return;
        prompts.push_back(std::move(e));
    };
    for (const auto& pair : pairs) {
        add_prompt({relational_prompt(pair.forward), pair.forward, std::nullopt});
        add_prompt({relational_prompt(pair.backward), pair.backward, std::nullopt});
        add_prompt({template_prompt(pair.template_a), std::nullopt, pair.template_a});
        add_prompt({template_prompt(pair.template_b), std::nullopt, pair.template_b});
    }

    Manifest manifest;
    manifest.root = out_dir;
    json records = json::array();
    for (const auto& pe : prompts) {
        std::string slug = prompt_slug(pe.prompt);
        fs::create_directories(out_dir / "images" / slug);
        for (int i = 0; i < images_per_prompt; ++i) {
            uint64_t scene_seed = fnv1a64(pe.prompt, seed) + static_cast<uint64_t>(i);
            Scene scene = pe.triplet ? sample_scene(*pe.triplet, vocab, scene_seed, canvas)
                                     : sample_single_scene(*pe.single_object, vocab, scene_seed, canvas);
            std::string rel_path = "images/" + slug + "/" + std::to_string(i) + ".png";
            write_png(out_dir / rel_path, render(scene));

            ManifestRecord rec{pe.prompt, pe.triplet, rel_path, scene};
            manifest.records.push_back(rec);
            json rj{{"prompt", pe.prompt}, {"image", rel_path}, {"scene", scene_to_json(scene)}};
            rj["triplet"] = pe.triplet ? triplet_to_json(*pe.triplet) : json(nullptr);
            records.push_back(rj);
        }
    }

    std::ofstream out(manifest_path);
    out << records.dump(2) << "\n";
    save_vocab(vocab, out_dir / "vocab.json");
    return manifest;
}

Manifest load_manifest(const std::filesystem::path& dataset_dir) {
    std::ifstream in(dataset_dir / "manifest.json");
    if (!in) throw std::runtime_error("no manifest at " + dataset_dir.string());
    json records = json::parse(in);
    Manifest m;
    m.root = dataset_dir;
    for (const auto& rj : records) {
        ManifestRecord rec;
        rec.prompt = rj.at("prompt");
        rec.image_path = rj.at("image");
        if (!rj.at("triplet").is_null()) rec.triplet = triplet_from_json(rj.at("triplet"));
        rec.scene = scene_from_json(rj.at("scene"));
        m.records.push_back(std::move(rec));
    }
    return m;
}

void save_vocab(const Vocab& vocab, const std::filesystem::path& path) {
    json objects = json::array();
    for (const auto& o : vocab.objects)
        objects.push_back(json{{"name", o.name},
                               {"shape", shape_name(o.shape)},
                               {"color", o.color},
                               {"size", o.size}});
    json relations = json::array();
    for (const auto& r : vocab.relations)
        relations.push_back(json{{"name", r.name},
                                 {"kind", r.kind == RelationKind::Positional ? "positional" : "containment"},
                                 {"dx", r.dx},
                                 {"dy", r.dy},
                                 {"subject_inside", r.subject_inside},
                                 {"margin", r.margin}});
    std::ofstream out(path);
    out << json{{"objects", objects}, {"relations", relations}}.dump(2) << "\n";
}

Vocab load_vocab(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("no vocab at " + path.string());
    json j = json::parse(in);
    Vocab v;
    for (const auto& oj : j.at("objects")) {
        ObjectSpec o;
        o.name = oj.at("name");
        o.shape = shape_from_name(oj.at("shape"));
        o.color = oj.at("color");
        o.size = oj.at("size");
        v.objects.push_back(o);
    }
    for (const auto& rj : j.at("relations")) {
        RelationSpec r;
        r.name = rj.at("name");
        r.kind = rj.at("kind") == "positional" ? RelationKind::Positional : RelationKind::Containment;
        r.dx = rj.at("dx");
        r.dy = rj.at("dy");
        r.subject_inside = rj.at("subject_inside");
        r.margin = rj.at("margin");
        v.relations.push_back(r);
    }
    return v;
}

std::vector<OspPair> default_pairs(const Vocab& vocab, int pairs_per_relation, uint64_t seed) {
    RngStream rng(seed, "pairs");
    std::vector<OspPair> out;
    for (const auto& rel : vocab.relations) {
        std::vector<int> order(vocab.objects.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        rng.shuffle(order);

        std::vector<bool> used(vocab.objects.size(), false);
        int made = 0;
        for (int i = 0; i < static_cast<int>(order.size()) && made < pairs_per_relation; ++i) {
            if (used[order[i]]) continue;
            for (int j = i + 1; j < static_cast<int>(order.size()); ++j) {
                if (used[order[j]]) continue;
                const ObjectSpec& a = vocab.objects[order[i]];
                const ObjectSpec& b = vocab.objects[order[j]];
                std::string subj = a.name, obj = b.name;
                if (rel.kind == RelationKind::Containment) {
                    const ObjectSpec& small = a.size <= b.size ? a : b;
                    const ObjectSpec& big = a.size <= b.size ? b : a;
                    if (big.size - small.size < static_cast<int>(rel.margin) + 1) continue;
                    subj = rel.subject_inside ? small.name : big.name;
                    obj = rel.subject_inside ? big.name : small.name;
                }
                out.push_back(make_pair(Triplet{subj, rel.name, obj}));
                used[order[i]] = used[order[j]] = true;
                ++made;
                break;
            }
        }
        if (made < pairs_per_relation)
            throw std::runtime_error("could not build " + std::to_string(pairs_per_relation) +
                                     " pairs for relation " + rel.name);
    }
    return out;
}

}  // namespace rrlab::scenegen
