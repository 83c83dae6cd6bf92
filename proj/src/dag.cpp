#include "futsim/dag.hpp"

#include <algorithm>
#include <queue>

namespace futsim {

const char* edge_kind_name(edge_kind k) {
    switch (k) {
    case edge_kind::continuation: return "continuation";
    case edge_kind::future: return "future";
    case edge_kind::touch: return "touch";
    }
    return "?";
}

edge_kind edge_kind_from_name(const std::string& name) {
    if (name == "continuation") return edge_kind::continuation;
    if (name == "future") return edge_kind::future;
    if (name == "touch") return edge_kind::touch;
    throw invalid_dag_error("unknown edge kind: " + name);
}

dag_index::dag_index(const dag& d) : d_(&d) {
    pos_.reserve(d.nodes.size());
    for (size_t i = 0; i < d.nodes.size(); ++i) {
        auto [it, fresh] = pos_.emplace(d.nodes[i].id, i);
        if (!fresh) throw invalid_dag_error("duplicate node id " + std::to_string(d.nodes[i].id));
    }
    out_.resize(d.nodes.size());
    in_.resize(d.nodes.size());
    for (const edge& e : d.edges) {
        auto f = pos_.find(e.from);
        auto t = pos_.find(e.to);
        if (f == pos_.end() || t == pos_.end())
            throw invalid_dag_error("edge references missing node");
        out_[f->second].push_back(e);
        in_[t->second].push_back(e);
    }

    // Kahn's algorithm with a min-heap so the order is deterministic.
    std::vector<size_t> indeg(d.nodes.size());
    for (size_t i = 0; i < d.nodes.size(); ++i) indeg[i] = in_[i].size();
    std::priority_queue<node_id, std::vector<node_id>, std::greater<>> ready;
    for (size_t i = 0; i < d.nodes.size(); ++i)
        if (indeg[i] == 0) ready.push(d.nodes[i].id);
    topo_.reserve(d.nodes.size());
    while (!ready.empty()) {
        node_id v = ready.top();
        ready.pop();
        topo_.push_back(v);
        for (const edge& e : out_[pos_.at(v)]) {
            size_t t = pos_.at(e.to);
            if (--indeg[t] == 0) ready.push(e.to);
        }
    }
    if (topo_.size() != d.nodes.size())
        throw invalid_dag_error("graph contains a cycle");
}

size_t dag_index::pos(node_id v) const {
    auto it = pos_.find(v);
    if (it == pos_.end()) throw invalid_dag_error("unknown node id " + std::to_string(v));
    return it->second;
}

const edge* dag_index::out_edge_of_kind(node_id v, edge_kind k) const {
    for (const edge& e : out_edges(v))
        if (e.kind == k) return &e;
    return nullptr;
}

const edge* dag_index::in_edge_of_kind(node_id v, edge_kind k) const {
    for (const edge& e : in_edges(v))
        if (e.kind == k) return &e;
    return nullptr;
}

bool dag_index::is_fork(node_id v) const {
    const auto& out = out_edges(v);
    if (out.size() != 2) return false;
    bool cont = false, fut = false;
    for (const edge& e : out) {
        if (e.kind == edge_kind::continuation) cont = true;
        if (e.kind == edge_kind::future) fut = true;
    }
    return cont && fut;
}

bool dag_index::is_touch_target(node_id v) const {
    return in_edge_of_kind(v, edge_kind::touch) != nullptr;
}

node_id dag_index::future_parent(node_id v) const {
    const edge* e = in_edge_of_kind(v, edge_kind::touch);
    return e ? e->from : -1;
}

node_id dag_index::local_parent(node_id v) const {
    const edge* e = in_edge_of_kind(v, edge_kind::continuation);
    return e ? e->from : -1;
}

} // namespace futsim
