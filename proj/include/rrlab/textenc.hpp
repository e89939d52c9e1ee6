#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rrlab/scenegen.hpp"
#include "rrlab/types.hpp"

namespace rrlab::textenc {

struct Vocabulary {
    std::map<std::string, int> token_to_id;
    int pad_id = 0;
    int eot_id = 1;

    int id(const std::string& token) const;
    bool has(const std::string& token) const;
};

// K token slots of width d. Rows [0, eot_index) hold word embeddings, row
// eot_index holds V_eot, rows after it are PAD (zero).
template <typename S>
struct TextEmbeddingT {
    MatX<S> tokens;  // K x d
    int eot_index = 0;

    VecX<S> v_eot() const { return tokens.row(eot_index).transpose(); }
};
using TextEmbedding = TextEmbeddingT<Real>;

// Frozen after construction. V_eot = eot_mixer * sum(word rows): summation
// pooling with no positional signal, so word-permuted prompts encode to
// identical V_eot by construction. The optional positional table perturbs
// the word rows only (used to weaken the idealization in baselines).
struct EncoderParams {
    Vocabulary vocab;
    Mat word_embedding;  // |vocab| x d
    Mat eot_mixer;       // d x d
    int seq_len = 16;    // K
    int dim = 64;        // d
    bool positional = false;
    Mat pos_table;  // K x d, used only when positional

    uint64_t checksum() const;
};

std::vector<std::string> tokenize(const std::string& prompt);

// Object rows are built from shared shape/color feature directions plus a
// small identity component, so semantically related objects stay correlated.
EncoderParams build_encoder(const scenegen::Vocab& world, uint64_t seed, int seq_len = 16,
                            int dim = 64, bool positional = false);

template <typename S>
TextEmbeddingT<S> encode_t(const std::string& prompt, const EncoderParams& params);

TextEmbedding encode(const std::string& prompt, const EncoderParams& params);

template <typename S>
TextEmbeddingT<S> mask_slot(const TextEmbeddingT<S>& emb, int index) {
    if (index < 0 || index >= emb.tokens.rows()) throw std::out_of_range("mask_slot index");
    TextEmbeddingT<S> out = emb;
    out.tokens.row(index).setZero();
    return out;
}

template <typename S>
TextEmbeddingT<S> replace_eot(const TextEmbeddingT<S>& dst, const TextEmbeddingT<S>& src) {
    if (dst.tokens.rows() != src.tokens.rows() || dst.tokens.cols() != src.tokens.cols())
        throw std::invalid_argument("replace_eot shape mismatch");
    TextEmbeddingT<S> out = dst;
    out.tokens.row(out.eot_index) = src.tokens.row(src.eot_index);
    return out;
}

// cosine(V_eot(forward), V_eot(backward)) per pair; NaN when a norm is zero.
std::vector<double> cosine_audit(const std::vector<scenegen::OspPair>& pairs,
                                 const EncoderParams& params);

double cosine(const Vec& a, const Vec& b);

}  // namespace rrlab::textenc
