#pragma once

#include "futsim/cache.hpp"
#include "futsim/dag.hpp"
#include "futsim/script.hpp"
#include "futsim/trace.hpp"

#include <optional>
#include <vector>

namespace futsim {

enum class sched_policy { future_first, parent_first };

const char* sched_policy_name(sched_policy p);
sched_policy sched_policy_from_name(const std::string& s);

class simulation_error : public std::runtime_error {
public:
    simulation_error(const std::string& what, std::vector<node_id> frontier)
        : std::runtime_error(what), ready_frontier(std::move(frontier)) {}
    // Unexecuted nodes whose parents had all executed when the run stalled.
    std::vector<node_id> ready_frontier;
};

struct run_config {
    sched_policy policy = sched_policy::future_first;
    int procs = 1;
    std::optional<script> scr;
    // Used for default-mode victim selection when no script supplies a seed.
    uint64_t victim_seed = 0;
    // When set, replay per-processor caches of this capacity afterwards.
    std::optional<int64_t> cache_capacity;
    int64_t max_steps = 10'000'000;
};

struct run_result {
    trace tr;
    // Execution order per processor (what each cache replay consumes).
    std::vector<std::vector<node_id>> per_proc_order;
    // Global order by (step, proc).
    std::vector<node_id> order;
    std::unordered_map<node_id, int> executed_by;
    int64_t total_steps = 0;
    int64_t steal_count = 0;
    std::optional<miss_report> misses;
};

// Lockstep deque scheduler. Within a step processors act in ascending id;
// each takes at most one action (run a node, pop then run, or one steal
// attempt). A processor never steals while it holds work, and only touches
// its own deque when it has nothing to run: work stays put until someone
// actually needs it.
run_result run_simulation(const dag& d, const run_config& cfg);

// One processor, no script: the canonical sequential execution.
run_result run_sequential(const dag& d, sched_policy policy);

} // namespace futsim
