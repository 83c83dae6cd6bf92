#pragma once

#include "futsim/dag.hpp"

#include <vector>

namespace futsim {

// A thread is a maximal chain of continuation edges. Thread 0 is the main
// thread (root to final); every other thread starts at the future child of
// some fork and ends at a node whose out-edges are all touch edges.
struct thread_info {
    int id = -1;
    std::vector<node_id> nodes;     // in execution order
    node_id spawned_at = -1;        // fork node, or -1 for the main thread
    bool is_main = false;
    node_id first() const { return nodes.front(); }
    node_id last() const { return nodes.back(); }
};

struct thread_decomposition {
    std::vector<thread_info> threads;
    // node id -> thread id
    std::unordered_map<node_id, int> owner;
    // node id -> position within its thread
    std::unordered_map<node_id, size_t> slot;

    const thread_info& main() const { return threads.front(); }
    const thread_info& of(node_id v) const { return threads[owner.at(v)]; }
};

// Requires a structurally valid dag (throws invalid_dag_error otherwise).
thread_decomposition decompose_threads(const dag_index& idx);

} // namespace futsim
