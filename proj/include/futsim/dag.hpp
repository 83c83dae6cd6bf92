#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace futsim {

using node_id = int64_t;

enum class edge_kind { continuation, future, touch };

const char* edge_kind_name(edge_kind k);
edge_kind edge_kind_from_name(const std::string& name);

struct edge {
    node_id from = -1;
    node_id to = -1;
    edge_kind kind = edge_kind::continuation;
};

struct node {
    node_id id = -1;
    // Memory block the node accesses, or 0 for nodes that touch no memory.
    int64_t block = 0;
    // Marks touches that the analysis counts as genuine synchronization
    // points, as opposed to bookkeeping joins inserted by a generator.
    bool is_real_touch = false;
};

struct dag {
    std::vector<node> nodes;
    std::vector<edge> edges;
    node_id root = -1;
    node_id final = -1;
    // When set, the final node is allowed to collect one touch edge from the
    // last node of every other thread (a terminal barrier).
    bool super_final_mode = false;
    // Named nodes of interest (generator landmarks), e.g. "s_1" or "g".
    std::unordered_map<std::string, node_id> landmarks;
};

class invalid_dag_error : public std::runtime_error {
public:
    explicit invalid_dag_error(const std::string& what) : std::runtime_error(what) {}
};

// Adjacency view over a dag. Build once, query often.
class dag_index {
public:
    explicit dag_index(const dag& d);

    const dag& graph() const { return *d_; }
    size_t node_count() const { return d_->nodes.size(); }

    bool has_node(node_id v) const { return pos_.count(v) != 0; }
    const node& node_at(node_id v) const { return d_->nodes[pos(v)]; }
    size_t pos(node_id v) const;

    const std::vector<edge>& out_edges(node_id v) const { return out_[pos(v)]; }
    const std::vector<edge>& in_edges(node_id v) const { return in_[pos(v)]; }

    // Typed lookups; return nullptr when the node has no such edge.
    const edge* out_edge_of_kind(node_id v, edge_kind k) const;
    const edge* in_edge_of_kind(node_id v, edge_kind k) const;

    bool is_fork(node_id v) const;
    bool is_touch_target(node_id v) const;

    // Touch in-edge source of a touch node (its future parent).
    node_id future_parent(node_id v) const;
    // Continuation in-edge source of a touch node (its local parent).
    node_id local_parent(node_id v) const;

    // Node ids in one deterministic topological order (throws on cycles).
    const std::vector<node_id>& topo_order() const { return topo_; }

private:
    const dag* d_;
    std::unordered_map<node_id, size_t> pos_;
    std::vector<std::vector<edge>> out_;
    std::vector<std::vector<edge>> in_;
    std::vector<node_id> topo_;
};

} // namespace futsim
