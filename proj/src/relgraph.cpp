#include "rrlab/relgraph.hpp"

#include <json.hpp>

namespace rrlab::relgraph {

using nlohmann::json;

const char* node_type_name(NodeType t) {
    switch (t) {
        case NodeType::Object: return "object";
        case NodeType::Relation: return "relation";
        case NodeType::DeltaEot: return "delta_eot";
    }
    return "object";
}

const char* edge_type_name(EdgeType t) {
    switch (t) {
        case EdgeType::ObjToRel: return "obj_to_rel";
        case EdgeType::RelToObj: return "rel_to_obj";
        case EdgeType::ObjToDelta: return "obj_to_delta";
        case EdgeType::RelToDelta: return "rel_to_delta";
        case EdgeType::ObjToDeltaObj: return "obj_to_delta_obj";
    }
    return "obj_to_rel";
}

NodeType node_type_from_name(const std::string& s) {
    for (int i = 0; i < 3; ++i)
        if (s == node_type_name(static_cast<NodeType>(i))) return static_cast<NodeType>(i);
    throw std::invalid_argument("unknown node type: " + s);
}

EdgeType edge_type_from_name(const std::string& s) {
    for (int i = 0; i < kNumEdgeTypes; ++i)
        if (s == edge_type_name(static_cast<EdgeType>(i))) return static_cast<EdgeType>(i);
    throw std::invalid_argument("unknown edge type: " + s);
}

int HetGraph::in_degree(int node) const {
    int d = 0;
    for (const auto& e : edges)
        if (e.dst == node) ++d;
    return d;
}

void HetGraph::validate() const {
    if (nodes.empty()) throw std::invalid_argument("empty graph");
    for (const auto& e : edges)
        if (e.src < 0 || e.dst < 0 || e.src >= static_cast<int>(nodes.size()) ||
            e.dst >= static_cast<int>(nodes.size()))
            throw std::invalid_argument("edge endpoint out of range");
    if (output_node < 0 || output_node >= static_cast<int>(nodes.size()))
        throw std::invalid_argument("output node out of range");
    for (size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].type == NodeType::DeltaEot && in_degree(static_cast<int>(i)) < 1)
            throw std::invalid_argument("delta node must have in-degree >= 1");
}

namespace detail {

std::vector<GroupProto> build_groups(const HetGraph& g) {
    std::vector<GroupProto> protos;
    const int n = static_cast<int>(g.nodes.size());
    for (int dst = 0; dst < n; ++dst) {
        for (int t = 0; t < kNumEdgeTypes; ++t) {
            GroupProto p;
            p.dst = dst;
            p.type = static_cast<EdgeType>(t);
            for (const auto& e : g.edges)
                if (e.dst == dst && e.type == p.type) p.srcs.push_back(e.src);
            if (!p.srcs.empty()) protos.push_back(std::move(p));
        }
    }
    return protos;
}

}  // namespace detail

GraphSet build_graphs(const scenegen::OspPair& pair) {
    GraphSet gs;

    auto relational = [&](const scenegen::Triplet& t) {
        HetGraph g;
        g.nodes = {
            {"subject", NodeType::Object, t.subject, ""},
            {"relation", NodeType::Relation, t.relation, ""},
            {"object", NodeType::Object, t.object, ""},
            {"delta", NodeType::DeltaEot, "", "delta_eot"},
        };
        g.edges = {
            {0, 1, EdgeType::ObjToRel},   // subject -> relation
            {1, 2, EdgeType::RelToObj},   // relation -> object
            {0, 3, EdgeType::ObjToDelta},
            {1, 3, EdgeType::RelToDelta},
            {2, 3, EdgeType::ObjToDelta},
        };
        g.output_node = 3;
        return g;
    };

    auto single = [&](const std::string& object, const std::string& key) {
        HetGraph g;
        g.nodes = {
            {"object", NodeType::Object, object, ""},
            {"delta", NodeType::DeltaEot, "", key},
        };
        g.edges = {{0, 1, EdgeType::ObjToDeltaObj}};
        g.output_node = 1;
        return g;
    };

    gs.forward = relational(pair.forward);
    gs.backward = relational(pair.backward);
    gs.template_a = single(pair.template_a, "delta_obj_a");
    gs.template_b = single(pair.template_b, "delta_obj_b");
    return gs;
}

const HetGraph& select_graph(const GraphSet& g, PromptKind kind) {
    switch (kind) {
        case PromptKind::Forward: return g.forward;
        case PromptKind::Backward: return g.backward;
        case PromptKind::TemplateA: return g.template_a;
        case PromptKind::TemplateB: return g.template_b;
    }
    return g.forward;
}

std::string prompt_for(const scenegen::OspPair& pair, PromptKind kind) {
    switch (kind) {
        case PromptKind::Forward: return scenegen::relational_prompt(pair.forward);
        case PromptKind::Backward: return scenegen::relational_prompt(pair.backward);
        case PromptKind::TemplateA: return scenegen::template_prompt(pair.template_a);
        case PromptKind::TemplateB: return scenegen::template_prompt(pair.template_b);
    }
    return scenegen::relational_prompt(pair.forward);
}

std::string graph_to_json(const HetGraph& g) {
    json nodes = json::array();
    for (const auto& n : g.nodes) {
        json nj{{"id", n.id}, {"type", node_type_name(n.type)}};
        if (!n.word.empty()) nj["word"] = n.word;
        if (!n.learnable_key.empty()) nj["learnable"] = n.learnable_key;
        nodes.push_back(nj);
    }
    json edges = json::array();
    for (const auto& e : g.edges)
        edges.push_back(json{{"src", e.src}, {"dst", e.dst}, {"type", edge_type_name(e.type)}});
    return json{{"nodes", nodes}, {"edges", edges}, {"output", g.output_node}}.dump();
}

HetGraph graph_from_json(const std::string& text) {
    json j = json::parse(text);
    HetGraph g;
    for (const auto& nj : j.at("nodes")) {
        HetGraph::Node n;
        n.id = nj.at("id");
        n.type = node_type_from_name(nj.at("type"));
        if (nj.contains("word")) n.word = nj.at("word");
        if (nj.contains("learnable")) n.learnable_key = nj.at("learnable");
        g.nodes.push_back(n);
    }
    for (const auto& ej : j.at("edges"))
        g.edges.push_back({ej.at("src"), ej.at("dst"), edge_type_from_name(ej.at("type"))});
    g.output_node = j.at("output");
    g.validate();
    return g;
}

}  // namespace rrlab::relgraph
