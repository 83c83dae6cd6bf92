#include "futsim/cache.hpp"

namespace futsim {

bool lru_cache::access(int64_t block) {
    auto it = where_.find(block);
    if (it != where_.end()) {
        order_.splice(order_.begin(), order_, it->second);
        return false;
    }
    if (static_cast<int64_t>(order_.size()) == capacity_) {
        where_.erase(order_.back());
        order_.pop_back();
    }
    order_.push_front(block);
    where_[block] = order_.begin();
    return true;
}

int64_t additional_misses(const miss_report& seq, const miss_report& par) {
    return par.total - seq.total;
}

miss_report replay_misses(const dag_index& idx,
                          const std::vector<std::vector<node_id>>& per_proc_order,
                          int64_t capacity) {
    miss_report rep;
    rep.per_proc.resize(per_proc_order.size(), 0);
    for (size_t p = 0; p < per_proc_order.size(); ++p) {
        lru_cache cache(capacity);
        for (node_id v : per_proc_order[p]) {
            int64_t b = idx.node_at(v).block;
            if (b > 0 && cache.access(b)) rep.per_proc[p]++;
        }
        rep.total += rep.per_proc[p];
    }
    return rep;
}

} // namespace futsim
