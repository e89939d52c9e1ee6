#include "rrlab/textenc.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rrlab/hash.hpp"
#include "rrlab/rng.hpp"

namespace rrlab::textenc {

int Vocabulary::id(const std::string& token) const {
    auto it = token_to_id.find(token);
    if (it == token_to_id.end()) throw std::invalid_argument("unknown token: " + token);
    return it->second;
}

bool Vocabulary::has(const std::string& token) const { return token_to_id.count(token) > 0; }

uint64_t EncoderParams::checksum() const {
    uint64_t h = hash_matrix(word_embedding);
    h = hash_matrix(eot_mixer, h);
    if (positional) h = hash_matrix(pos_table, h);
    return h;
}

std::vector<std::string> tokenize(const std::string& prompt) {
    std::vector<std::string> out;
    std::istringstream in(prompt);
    std::string w;
    while (in >> w) {
        for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.push_back(w);
    }
    return out;
}

EncoderParams build_encoder(const scenegen::Vocab& world, uint64_t seed, int seq_len, int dim,
                            bool positional) {
    EncoderParams p;
    p.seq_len = seq_len;
    p.dim = dim;
    p.positional = positional;

    std::vector<std::string> words = {"a", "this", "is", "photo", "of"};
    for (const auto& r : world.relations) words.push_back(r.name);
    for (const auto& o : world.objects) words.push_back(o.name);

    p.vocab.token_to_id["<pad>"] = p.vocab.pad_id;
    p.vocab.token_to_id["<eot>"] = p.vocab.eot_id;
    int next = 2;
    for (const auto& w : words)
        if (!p.vocab.token_to_id.count(w)) p.vocab.token_to_id[w] = next++;

    RngStream rng(seed, "encoder");
    auto unit = [&](double scale) {
        Vec v(dim);
        rng.fill_normal(v);
        v.normalize();
        return Vec(v * static_cast<Real>(scale));
    };

    // Shared feature directions: one per shape and one per color channel mix.
    std::map<std::string, Vec> shape_dir;
    std::map<std::string, Vec> color_dir;
    for (const auto& o : world.objects) {
        std::string sh = scenegen::shape_name(o.shape);
        if (!shape_dir.count(sh)) shape_dir[sh] = unit(1.0);
        std::string col = o.name.substr(0, o.name.find('_'));
        if (!color_dir.count(col)) color_dir[col] = unit(1.0);
    }

    p.word_embedding = Mat::Zero(next, dim);
    for (const auto& [word, id] : p.vocab.token_to_id) {
        if (id == p.vocab.pad_id || id == p.vocab.eot_id) continue;
        bool is_object = world.has_object(word);
        if (is_object) {
            const auto& obj = world.object(word);
            std::string sh = scenegen::shape_name(obj.shape);
            std::string col = word.substr(0, word.find('_'));
            Vec v = Real(0.6) * shape_dir[sh] + Real(0.6) * color_dir[col] + unit(0.25);
            v.normalize();
            p.word_embedding.row(id) = v.transpose();
        } else {
            bool filler = (word == "a" || word == "this" || word == "is" || word == "photo" ||
                           word == "of");
            p.word_embedding.row(id) = unit(filler ? 0.4 : 1.0).transpose();
        }
    }

    p.eot_mixer = Mat::Identity(dim, dim);
    Mat noise(dim, dim);
    rng.fill_normal(noise, 0.02);
    p.eot_mixer += noise;

    p.pos_table = Mat::Zero(seq_len, dim);
    if (positional) {
        for (int i = 0; i < seq_len; ++i)
            for (int j = 0; j < dim; ++j) {
                double rate = std::pow(10000.0, -2.0 * (j / 2) / double(dim));
                p.pos_table(i, j) = static_cast<Real>(
                    (j % 2 == 0) ? std::sin(i * rate) : std::cos(i * rate)) * Real(0.3);
            }
    }
    return p;
}

template <typename S>
TextEmbeddingT<S> encode_t(const std::string& prompt, const EncoderParams& params) {
    auto toks = tokenize(prompt);
    if (static_cast<int>(toks.size()) >= params.seq_len)
        throw std::invalid_argument("prompt too long: " + prompt);

    TextEmbeddingT<S> emb;
    emb.tokens = MatX<S>::Zero(params.seq_len, params.dim);
    emb.eot_index = static_cast<int>(toks.size());
    std::vector<int> ids(toks.size());
    for (size_t i = 0; i < toks.size(); ++i) {
        ids[i] = params.vocab.id(toks[i]);
        emb.tokens.row(static_cast<Eigen::Index>(i)) =
            params.word_embedding.row(ids[i]).template cast<S>();
        if (params.positional)
            emb.tokens.row(static_cast<Eigen::Index>(i)) +=
                params.pos_table.row(static_cast<Eigen::Index>(i)).template cast<S>();
    }
    // Pool in sorted-id order so word permutations give a bit-identical sum.
    std::sort(ids.begin(), ids.end());
    VecX<S> pooled = VecX<S>::Zero(params.dim);
    for (int id : ids) pooled += params.word_embedding.row(id).template cast<S>().transpose();
    if (params.positional)
        for (int i = 0; i < emb.eot_index; ++i)
            pooled += params.pos_table.row(i).template cast<S>().transpose();
    emb.tokens.row(emb.eot_index) = (params.eot_mixer.cast<S>() * pooled).transpose();
    return emb;
}

template TextEmbeddingT<float> encode_t<float>(const std::string&, const EncoderParams&);
template TextEmbeddingT<double> encode_t<double>(const std::string&, const EncoderParams&);

TextEmbedding encode(const std::string& prompt, const EncoderParams& params) {
    return encode_t<Real>(prompt, params);
}

double cosine(const Vec& a, const Vec& b) {
    double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return a.dot(b) / (na * nb);
}

std::vector<double> cosine_audit(const std::vector<scenegen::OspPair>& pairs,
                                 const EncoderParams& params) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& pair : pairs) {
        auto f = encode(scenegen::relational_prompt(pair.forward), params);
        auto b = encode(scenegen::relational_prompt(pair.backward), params);
        out.push_back(cosine(f.v_eot(), b.v_eot()));
    }
    return out;
}

}  // namespace rrlab::textenc
