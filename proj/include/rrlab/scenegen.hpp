#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rrlab/image.hpp"
#include "rrlab/types.hpp"

namespace rrlab::scenegen {

enum class Shape { Circle, Square, Triangle, Star, Ring, Bar };

const char* shape_name(Shape s);
Shape shape_from_name(const std::string& name);

struct ObjectSpec {
    std::string name;
    Shape shape = Shape::Circle;
    std::array<int, 3> color = {0, 0, 0};  // RGB in [0,255]
    int size = 4;                          // radius in pixels
};

enum class RelationKind { Positional, Containment };

// Directional geometric predicate over two placements. For positional
// relations the rule is sign-of-center-offset per axis with a margin
// (dx=+1 means object B sits at least `margin` px to the right of A).
// Containment compares per-axis extents; `subject_inside` selects which
// side must be the contained one.
struct RelationSpec {
    std::string name;
    RelationKind kind = RelationKind::Positional;
    int dx = 0;
    int dy = 0;
    bool subject_inside = true;
    double margin = 2.0;
};

struct Triplet {
    std::string subject;
    std::string relation;
    std::string object;

    bool operator==(const Triplet&) const = default;
};

// An object-swapped prompt pair plus the two single-object template prompts.
struct OspPair {
    Triplet forward;
    Triplet backward;
    std::string template_a;  // object name of the forward subject
    std::string template_b;  // object name of the forward object
};

struct Placement {
    ObjectSpec object;
    int cx = 0;
    int cy = 0;
    int size = 0;
};

struct Scene {
    std::vector<Placement> placements;
    int canvas_h = 32;
    int canvas_w = 32;
    std::optional<Triplet> relation_label;
};

struct Vocab {
    std::vector<ObjectSpec> objects;
    std::vector<RelationSpec> relations;

    const ObjectSpec& object(const std::string& name) const;
    const RelationSpec& relation(const std::string& name) const;
    bool has_object(const std::string& name) const;
};

// Prompt grammar (tokenization is whitespace + lowercasing downstream).
std::string relational_prompt(const Triplet& t);
std::string template_prompt(const std::string& object_name);
std::string prompt_slug(const std::string& prompt);

OspPair make_pair(const Triplet& forward);

bool predicate_holds(const RelationSpec& rel, const Placement& a, const Placement& b);

Vocab build_vocab(uint64_t seed, int n_objects, int n_relations);

Scene sample_scene(const Triplet& triplet, const Vocab& vocab, uint64_t seed, int canvas = 32);
Scene sample_single_scene(const std::string& object_name, const Vocab& vocab, uint64_t seed,
                          int canvas = 32);

Image render(const Scene& scene);

// Shared rasterization rule; the detector reuses it for shape templates.
bool shape_covers(Shape shape, double dx, double dy, double size);

struct ManifestRecord {
    std::string prompt;
    std::optional<Triplet> triplet;
    std::string image_path;  // relative to the dataset root
    Scene scene;
};

struct Manifest {
    std::vector<ManifestRecord> records;
    std::filesystem::path root;
};

Manifest write_dataset(const std::vector<OspPair>& pairs, int images_per_prompt,
                       const std::filesystem::path& out_dir, const Vocab& vocab, uint64_t seed,
                       int canvas = 32, bool force = false);

Manifest load_manifest(const std::filesystem::path& dataset_dir);

void save_vocab(const Vocab& vocab, const std::filesystem::path& path);
Vocab load_vocab(const std::filesystem::path& path);

// Deterministic pair selection: per relation, `pairs_per_relation` disjoint
// object pairs that are geometrically feasible for that relation.
std::vector<OspPair> default_pairs(const Vocab& vocab, int pairs_per_relation, uint64_t seed);

}  // namespace rrlab::scenegen
