#pragma once

#include "futsim/dag.hpp"

#include <cstdint>
#include <list>
#include <unordered_map>
#include <vector>

namespace futsim {

// Fully associative cache with least-recently-used replacement. Starts cold.
class lru_cache {
public:
    explicit lru_cache(int64_t capacity) : capacity_(capacity) {}

    // Returns true on a miss.
    bool access(int64_t block);

    int64_t capacity() const { return capacity_; }
    size_t size() const { return where_.size(); }
    bool contains(int64_t block) const { return where_.count(block) != 0; }

private:
    int64_t capacity_;
    std::list<int64_t> order_; // front = most recent
    std::unordered_map<int64_t, std::list<int64_t>::iterator> where_;
};

struct miss_report {
    int64_t total = 0;
    std::vector<int64_t> per_proc;
};

// Cold-start replay of per-processor execution orders. Caches are private
// to a processor and nothing moves on a steal, so each processor's misses
// depend only on its own sequence of block accesses.
miss_report replay_misses(const dag_index& idx,
                          const std::vector<std::vector<node_id>>& per_proc_order,
                          int64_t capacity);

// Extra misses the parallel run paid over the baseline. Negative values are
// possible: several private caches hold more in total than one. Both reports
// must come from the same dag and capacity; that is the caller's to keep,
// the reports themselves carry no config to cross-check.
int64_t additional_misses(const miss_report& seq, const miss_report& par);

} // namespace futsim
