#include "futsim/deviations.hpp"

#include <unordered_map>

namespace futsim {

const char* deviation_kind_name(deviation_kind k) {
    switch (k) {
    case deviation_kind::real_touch: return "real_touch";
    case deviation_kind::join: return "join";
    case deviation_kind::fork_child: return "fork_child";
    }
    return "?";
}

deviation_report find_deviations(const dag_index& idx,
                                 const std::vector<node_id>& sequential_order,
                                 const std::vector<std::vector<node_id>>& per_proc_order) {
    if (sequential_order.size() != idx.node_count())
        throw std::runtime_error("sequential order does not cover the graph");

    std::unordered_map<node_id, node_id> seq_pred;
    seq_pred.reserve(sequential_order.size());
    for (size_t i = 1; i < sequential_order.size(); ++i)
        seq_pred[sequential_order[i]] = sequential_order[i - 1];

    deviation_report rep;
    for (size_t p = 0; p < per_proc_order.size(); ++p) {
        const auto& ord = per_proc_order[p];
        for (size_t i = 0; i < ord.size(); ++i) {
            node_id v = ord[i];
            auto it = seq_pred.find(v);
            if (it == seq_pred.end()) continue; // the very first sequential node
            if (i > 0 && ord[i - 1] == it->second) continue;

            deviation_kind kind;
            if (idx.is_touch_target(v)) {
                kind = idx.node_at(v).is_real_touch ? deviation_kind::real_touch
                                                    : deviation_kind::join;
            } else {
                // Every other out-of-order node must be a shelved fork child;
                // anything else would mean the scheduler invented work.
                const edge& in = idx.in_edges(v).front();
                if (!idx.is_fork(in.from))
                    throw std::runtime_error("deviation at node " + std::to_string(v) +
                                             " which is neither a touch nor a fork child");
                kind = deviation_kind::fork_child;
            }
            rep.deviations.push_back({v, static_cast<int>(p), kind});
            switch (kind) {
            case deviation_kind::real_touch: rep.real_touch++; break;
            case deviation_kind::join: rep.join++; break;
            case deviation_kind::fork_child: rep.fork_child++; break;
            }
        }
    }
    rep.total = static_cast<int64_t>(rep.deviations.size());
    return rep;
}

deviation_report find_deviations(const dag_index& idx, const run_result& sequential,
                                 const run_result& parallel) {
    return find_deviations(idx, sequential.order, parallel.per_proc_order);
}

} // namespace futsim
