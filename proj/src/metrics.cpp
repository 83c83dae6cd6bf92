#include "futsim/metrics.hpp"

#include <algorithm>
#include <unordered_map>

namespace futsim {

int64_t compute_span(const dag_index& idx) {
    const dag& d = idx.graph();
    std::unordered_map<node_id, int64_t> len;
    len.reserve(d.nodes.size());
    for (node_id v : idx.topo_order()) {
        int64_t best = 0;
        bool rooted = (v == d.root);
        for (const edge& e : idx.in_edges(v)) {
            auto it = len.find(e.from);
            if (it == len.end()) continue;
            rooted = true;
            best = std::max(best, it->second);
        }
        if (rooted) len[v] = best + 1;
    }
    auto it = len.find(d.final);
    if (it == len.end())
        throw invalid_dag_error("final node is not reachable from root");
    return it->second;
}

int64_t count_touches(const dag& d) {
    int64_t n = 0;
    for (const node& v : d.nodes)
        if (v.is_real_touch) ++n;
    return n;
}

} // namespace futsim
