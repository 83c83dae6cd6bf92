#include "futsim/threads.hpp"

#include <algorithm>

namespace futsim {

thread_decomposition decompose_threads(const dag_index& idx) {
    const dag& d = idx.graph();
    thread_decomposition out;

    // Gather thread starts: root first, then future targets in a stable
    // order (by spawning fork's topological position, tie-broken by id).
    struct start {
        node_id first;
        node_id fork;
    };
    std::vector<start> starts;
    for (node_id v : idx.topo_order()) {
        const edge* fut = idx.out_edge_of_kind(v, edge_kind::future);
        if (fut) starts.push_back({fut->to, v});
    }

    auto walk = [&](node_id first, node_id fork, bool is_main) {
        thread_info t;
        t.id = static_cast<int>(out.threads.size());
        t.spawned_at = fork;
        t.is_main = is_main;
        node_id v = first;
        while (true) {
            t.nodes.push_back(v);
            out.owner[v] = t.id;
            out.slot[v] = t.nodes.size() - 1;
            const edge* c = idx.out_edge_of_kind(v, edge_kind::continuation);
            if (!c) break;
            v = c->to;
        }
        out.threads.push_back(std::move(t));
    };

    walk(d.root, -1, true);
    for (const start& s : starts) walk(s.first, s.fork, false);

    if (out.owner.size() != d.nodes.size())
        throw invalid_dag_error("thread decomposition did not cover every node");
    return out;
}

} // namespace futsim
