#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrlab/hash.hpp"
#include "rrlab/rng.hpp"
#include "rrlab/scenegen.hpp"
#include "rrlab/textenc.hpp"
#include "rrlab/types.hpp"

namespace rrlab::relgraph {

enum class NodeType { Object, Relation, DeltaEot };
enum class EdgeType { ObjToRel, RelToObj, ObjToDelta, RelToDelta, ObjToDeltaObj };
constexpr int kNumEdgeTypes = 5;

const char* node_type_name(NodeType t);
const char* edge_type_name(EdgeType t);
NodeType node_type_from_name(const std::string& s);
EdgeType edge_type_from_name(const std::string& s);

// Directed heterogeneous graph. Object/relation nodes take their initial
// feature from a vocabulary word; delta nodes reference a learnable vector
// in HgcnParams by key.
struct HetGraph {
    struct Node {
        std::string id;
        NodeType type = NodeType::Object;
        std::string word;           // set for object/relation nodes
        std::string learnable_key;  // set for delta nodes
    };
    struct Edge {
        int src = 0;
        int dst = 0;
        EdgeType type = EdgeType::ObjToRel;
    };

    std::vector<Node> nodes;
    std::vector<Edge> edges;
    int output_node = 0;  // the delta node whose final feature is the adjustment

    int in_degree(int node) const;
    void validate() const;
};

struct GraphSet {
    HetGraph forward;
    HetGraph backward;
    HetGraph template_a;
    HetGraph template_b;
};

enum class PromptKind { Forward, Backward, TemplateA, TemplateB };

GraphSet build_graphs(const scenegen::OspPair& pair);
const HetGraph& select_graph(const GraphSet& g, PromptKind kind);
std::string prompt_for(const scenegen::OspPair& pair, PromptKind kind);

std::string graph_to_json(const HetGraph& g);
HetGraph graph_from_json(const std::string& text);

// Per-layer, per-edge-type weights plus bilinear attention scores and the
// learnable delta-node initial features. Layer widths run
// in_dim -> hidden -> ... -> out_dim.
template <typename S>
struct HgcnParamsT {
    int layers = 2;
    int in_dim = 64;
    int hidden = 128;
    int out_dim = 64;
    double leaky_slope = 0.2;

    std::vector<std::array<MatX<S>, kNumEdgeTypes>> W;  // [layer][type]: d_l x d_{l+1}
    std::vector<std::array<MatX<S>, kNumEdgeTypes>> A;  // [layer][type]: d_{l+1} x d_{l+1}
    std::vector<MatX<S>> b;                             // [layer]: d_{l+1} x 1
    std::map<std::string, MatX<S>> delta_init;          // key -> in_dim x 1

    int layer_in(int l) const { return l == 0 ? in_dim : hidden; }
    int layer_out(int l) const { return l == layers - 1 ? out_dim : hidden; }

    void for_each_tensor(const std::function<void(const std::string&, MatX<S>&)>& fn);
    void for_each_tensor(const std::function<void(const std::string&, const MatX<S>&)>& fn) const;
    HgcnParamsT<S> zeros_like() const;
    uint64_t checksum() const;

    template <typename T>
    HgcnParamsT<T> cast() const;
};
using HgcnParams = HgcnParamsT<Real>;

template <typename S>
HgcnParamsT<S> init_hgcn_params(int layers, int in_dim, int hidden, int out_dim,
                                const std::vector<std::string>& delta_keys, RngStream& rng,
                                double delta_sigma = 0.02, double leaky_slope = 0.2);

// Forward caches for backprop through the message passing.
template <typename S>
struct HgcnTrace {
    struct Group {
        int dst = 0;
        EdgeType type = EdgeType::ObjToRel;
        std::vector<int> srcs;
        MatX<S> u;        // n_src x d_out, transformed source features
        RowX<S> u_dst;    // transformed destination feature
        VecX<S> q;        // raw bilinear scores
        VecX<S> alpha;    // softmax over q
        RowX<S> z;        // pre-activation
    };
    std::vector<std::vector<RowX<S>>> h;         // [layer 0..L][node]
    std::vector<std::vector<Group>> groups;      // [layer]
    std::vector<std::vector<bool>> updated;      // [layer][node] false => carried forward
};

// One message-passing evaluation. init maps node index -> initial feature
// (width in_dim). Destination update per layer: per edge type, attention-
// weighted sum of W-transformed in-neighbors, bias, leaky ReLU, then sum over
// edge types. Nodes with no incoming edges carry their feature forward
// unchanged (consumers treat narrower carried features as zero-padded).
template <typename S>
HgcnTrace<S> hgcn_forward(const HetGraph& g, const std::vector<VecX<S>>& init,
                          const HgcnParamsT<S>& params);

template <typename S>
VecX<S> hgcn_output(const HetGraph& g, const HgcnTrace<S>& trace) {
    return trace.h.back()[g.output_node].transpose();
}

// Backprop of d(loss)/d(output-node final feature); returns parameter grads,
// optionally also accumulating grads w.r.t. all initial features.
template <typename S>
void hgcn_backward(const HetGraph& g, const HgcnTrace<S>& trace, const HgcnParamsT<S>& params,
                   const VecX<S>& d_output, HgcnParamsT<S>& grads,
                   std::vector<VecX<S>>* d_init = nullptr);

template <typename S>
std::vector<VecX<S>> initial_features(const HetGraph& g, const textenc::EncoderParams& enc,
                                      const HgcnParamsT<S>& params);

// V*_eot = V_eot + lambda * h; only the EOT row changes.
template <typename S>
textenc::TextEmbeddingT<S> adjust_eot(const textenc::TextEmbeddingT<S>& emb, const VecX<S>& h,
                                      double lambda) {
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda must be in [0,1]");
    if (h.size() != emb.tokens.cols()) throw std::invalid_argument("adjustment width mismatch");
    textenc::TextEmbeddingT<S> out = emb;
    out.tokens.row(out.eot_index) += static_cast<S>(lambda) * h.transpose();
    return out;
}

template <typename S>
struct RrnetApplyResult {
    textenc::TextEmbeddingT<S> embedding;  // adjusted
    textenc::TextEmbeddingT<S> raw;        // pre-adjustment encoding
    VecX<S> adjustment;                    // h of the routed delta node
    HgcnTrace<S> trace;                    // kept for backprop
};

template <typename S>
RrnetApplyResult<S> rrnet_apply(PromptKind kind, const scenegen::OspPair& pair,
                                const textenc::EncoderParams& enc, const HgcnParamsT<S>& params,
                                double lambda);

// ---------------------------------------------------------------------------
// template implementations
// ---------------------------------------------------------------------------

template <typename S>
void HgcnParamsT<S>::for_each_tensor(const std::function<void(const std::string&, MatX<S>&)>& fn) {
    for (int l = 0; l < layers; ++l) {
        for (int t = 0; t < kNumEdgeTypes; ++t) {
            std::string et = edge_type_name(static_cast<EdgeType>(t));
            fn("l" + std::to_string(l) + ".W." + et, W[l][t]);
            fn("l" + std::to_string(l) + ".A." + et, A[l][t]);
        }
        fn("l" + std::to_string(l) + ".b", b[l]);
    }
    for (auto& [key, v] : delta_init) fn("delta." + key, v);
}

template <typename S>
void HgcnParamsT<S>::for_each_tensor(
    const std::function<void(const std::string&, const MatX<S>&)>& fn) const {
    const_cast<HgcnParamsT<S>*>(this)->for_each_tensor(
        [&](const std::string& name, MatX<S>& m) { fn(name, m); });
}

template <typename S>
HgcnParamsT<S> HgcnParamsT<S>::zeros_like() const {
    HgcnParamsT<S> z = *this;
    z.for_each_tensor([](const std::string&, MatX<S>& m) { m.setZero(); });
    return z;
}

template <typename S>
uint64_t HgcnParamsT<S>::checksum() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for_each_tensor([&](const std::string& name, const MatX<S>& m) {
        h = fnv1a64(name, h);
        h = hash_matrix(m, h);
    });
    return h;
}

template <typename S>
template <typename T>
HgcnParamsT<T> HgcnParamsT<S>::cast() const {
    HgcnParamsT<T> out;
    out.layers = layers;
    out.in_dim = in_dim;
    out.hidden = hidden;
    out.out_dim = out_dim;
    out.leaky_slope = leaky_slope;
    out.W.resize(layers);
    out.A.resize(layers);
    out.b.resize(layers);
    for (int l = 0; l < layers; ++l) {
        for (int t = 0; t < kNumEdgeTypes; ++t) {
            out.W[l][t] = W[l][t].template cast<T>();
            out.A[l][t] = A[l][t].template cast<T>();
        }
        out.b[l] = b[l].template cast<T>();
    }
    for (const auto& [k, v] : delta_init) out.delta_init[k] = v.template cast<T>();
    return out;
}

template <typename S>
HgcnParamsT<S> init_hgcn_params(int layers, int in_dim, int hidden, int out_dim,
                                const std::vector<std::string>& delta_keys, RngStream& rng,
                                double delta_sigma, double leaky_slope) {
    HgcnParamsT<S> p;
    p.layers = layers;
    p.in_dim = in_dim;
    p.hidden = hidden;
    p.out_dim = out_dim;
    p.leaky_slope = leaky_slope;
    p.W.resize(layers);
    p.A.resize(layers);
    p.b.resize(layers);
    for (int l = 0; l < layers; ++l) {
        int din = p.layer_in(l), dout = p.layer_out(l);
        for (int t = 0; t < kNumEdgeTypes; ++t) {
            p.W[l][t].resize(din, dout);
            rng.fill_normal(p.W[l][t], std::sqrt(2.0 / (din + dout)));
            p.A[l][t].resize(dout, dout);
            rng.fill_normal(p.A[l][t], 0.1 / std::sqrt(static_cast<double>(dout)));
        }
        p.b[l] = MatX<S>::Zero(dout, 1);
    }
    for (const auto& key : delta_keys) {
        p.delta_init[key].resize(in_dim, 1);
        rng.fill_normal(p.delta_init[key], delta_sigma);
    }
    return p;
}

namespace detail {

template <typename S>
S leaky(S x, double slope) {
    return x > S(0) ? x : static_cast<S>(slope) * x;
}

template <typename S>
S leaky_grad(S x, double slope) {
    return x > S(0) ? S(1) : static_cast<S>(slope);
}

struct GroupProto {
    int dst;
    EdgeType type;
    std::vector<int> srcs;
};

std::vector<GroupProto> build_groups(const HetGraph& g);

}  // namespace detail

template <typename S>
HgcnTrace<S> hgcn_forward(const HetGraph& g, const std::vector<VecX<S>>& init,
                          const HgcnParamsT<S>& params) {
    g.validate();
    const int n = static_cast<int>(g.nodes.size());
    if (static_cast<int>(init.size()) != n) throw std::invalid_argument("init feature count mismatch");
    for (const auto& v : init)
        if (v.size() != params.in_dim) throw std::invalid_argument("init feature width mismatch");

    auto protos = detail::build_groups(g);

    HgcnTrace<S> trace;
    trace.h.resize(params.layers + 1);
    trace.groups.resize(params.layers);
    trace.updated.assign(params.layers, std::vector<bool>(n, false));
    trace.h[0].resize(n);
    for (int i = 0; i < n; ++i) trace.h[0][i] = init[i].transpose();

    for (int l = 0; l < params.layers; ++l) {
        const int dout = params.layer_out(l);
        trace.h[l + 1].assign(n, RowX<S>());
        std::vector<RowX<S>> acc(n);
        for (const auto& proto : protos) {
            const MatX<S>& W = params.W[l][static_cast<int>(proto.type)];
            const MatX<S>& A = params.A[l][static_cast<int>(proto.type)];
            typename HgcnTrace<S>::Group grp;
            grp.dst = proto.dst;
            grp.type = proto.type;
            grp.srcs = proto.srcs;
            const int k = static_cast<int>(proto.srcs.size());
            grp.u.resize(k, dout);
            for (int s = 0; s < k; ++s) {
                const RowX<S>& hj = trace.h[l][proto.srcs[s]];
                grp.u.row(s) = hj * W.topRows(hj.size());
            }
            const RowX<S>& hd = trace.h[l][proto.dst];
            grp.u_dst = hd * W.topRows(hd.size());

            grp.q.resize(k);
            for (int s = 0; s < k; ++s) grp.q(s) = grp.u.row(s).dot(grp.u_dst * A.transpose());
            VecX<S> scores(k);
            for (int s = 0; s < k; ++s) scores(s) = detail::leaky(grp.q(s), params.leaky_slope);
            S mx = scores.maxCoeff();
            VecX<S> ex = (scores.array() - mx).exp();
            grp.alpha = ex / ex.sum();

            grp.z = params.b[l].transpose();
            for (int s = 0; s < k; ++s) grp.z += grp.alpha(s) * grp.u.row(s);

            RowX<S> y(dout);
            for (int c = 0; c < dout; ++c) y(c) = detail::leaky(grp.z(c), params.leaky_slope);
            if (acc[proto.dst].size() == 0) acc[proto.dst] = RowX<S>::Zero(dout);
            acc[proto.dst] += y;
            trace.updated[l][proto.dst] = true;
            trace.groups[l].push_back(std::move(grp));
        }
        for (int i = 0; i < n; ++i)
            trace.h[l + 1][i] = trace.updated[l][i] ? acc[i] : trace.h[l][i];
    }
    return trace;
}

template <typename S>
void hgcn_backward(const HetGraph& g, const HgcnTrace<S>& trace, const HgcnParamsT<S>& params,
                   const VecX<S>& d_output, HgcnParamsT<S>& grads,
                   std::vector<VecX<S>>* d_init) {
    const int n = static_cast<int>(g.nodes.size());
    std::vector<RowX<S>> dh(n);
    for (int i = 0; i < n; ++i) dh[i] = RowX<S>::Zero(trace.h[params.layers][i].size());
    dh[g.output_node] = d_output.transpose();

    for (int l = params.layers - 1; l >= 0; --l) {
        std::vector<RowX<S>> dh_prev(n);
        for (int i = 0; i < n; ++i) dh_prev[i] = RowX<S>::Zero(trace.h[l][i].size());
        for (int i = 0; i < n; ++i)
            if (!trace.updated[l][i]) dh_prev[i] += dh[i];

        for (const auto& grp : trace.groups[l]) {
            const int t = static_cast<int>(grp.type);
            const MatX<S>& W = params.W[l][t];
            const MatX<S>& A = params.A[l][t];
            MatX<S>& dW = grads.W[l][t];
            MatX<S>& dA = grads.A[l][t];
            const int k = static_cast<int>(grp.srcs.size());

            const RowX<S>& dy = dh[grp.dst];
            RowX<S> dz(grp.z.size());
            for (int c = 0; c < grp.z.size(); ++c)
                dz(c) = dy(c) * detail::leaky_grad(grp.z(c), params.leaky_slope);
            grads.b[l] += dz.transpose();

            VecX<S> dalpha(k);
            MatX<S> du = MatX<S>::Zero(k, grp.u.cols());
            for (int s = 0; s < k; ++s) {
                dalpha(s) = grp.u.row(s).dot(dz);
                du.row(s) = grp.alpha(s) * dz;
            }
            // softmax over leaky(q)
            S inner = grp.alpha.dot(dalpha);
            VecX<S> ds = (grp.alpha.array() * (dalpha.array() - inner)).matrix();
            RowX<S> du_dst = RowX<S>::Zero(grp.u_dst.size());
            for (int s = 0; s < k; ++s) {
                S dq = ds(s) * detail::leaky_grad(grp.q(s), params.leaky_slope);
                dA += dq * grp.u.row(s).transpose() * grp.u_dst;
                du.row(s) += dq * grp.u_dst * A.transpose();
                du_dst += dq * grp.u.row(s) * A;
            }
            for (int s = 0; s < k; ++s) {
                const RowX<S>& hj = trace.h[l][grp.srcs[s]];
                dW.topRows(hj.size()) += hj.transpose() * du.row(s);
                dh_prev[grp.srcs[s]] += du.row(s) * W.topRows(hj.size()).transpose();
            }
            const RowX<S>& hd = trace.h[l][grp.dst];
            dW.topRows(hd.size()) += hd.transpose() * du_dst;
            dh_prev[grp.dst] += du_dst * W.topRows(hd.size()).transpose();
        }
        dh = std::move(dh_prev);
    }

    for (int i = 0; i < n; ++i) {
        const auto& node = g.nodes[i];
        if (node.type == NodeType::DeltaEot && !node.learnable_key.empty())
            grads.delta_init[node.learnable_key] += dh[i].transpose();
    }
    if (d_init) {
        d_init->resize(n);
        for (int i = 0; i < n; ++i) (*d_init)[i] = dh[i].transpose();
    }
}

template <typename S>
std::vector<VecX<S>> initial_features(const HetGraph& g, const textenc::EncoderParams& enc,
                                      const HgcnParamsT<S>& params) {
    std::vector<VecX<S>> init;
    init.reserve(g.nodes.size());
    for (const auto& node : g.nodes) {
        if (node.learnable_key.empty()) {
            int id = enc.vocab.id(node.word);
            init.push_back(enc.word_embedding.row(id).transpose().template cast<S>());
        } else {
            init.push_back(params.delta_init.at(node.learnable_key).col(0));
        }
    }
    return init;
}

template <typename S>
RrnetApplyResult<S> rrnet_apply(PromptKind kind, const scenegen::OspPair& pair,
                                const textenc::EncoderParams& enc, const HgcnParamsT<S>& params,
                                double lambda) {
    GraphSet graphs = build_graphs(pair);
    const HetGraph& g = select_graph(graphs, kind);
    RrnetApplyResult<S> res;
    res.raw = textenc::encode_t<S>(prompt_for(pair, kind), enc);
    res.trace = hgcn_forward(g, initial_features(g, enc, params), params);
    res.adjustment = hgcn_output(g, res.trace);
    res.embedding = adjust_eot(res.raw, res.adjustment, lambda);
    return res;
}

}  // namespace rrlab::relgraph
