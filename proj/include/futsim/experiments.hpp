#pragma once

#include "futsim/engine.hpp"
#include "futsim/generators.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace futsim {

// Outcome of one experiment run. `measured` always carries the same seven
// keys (deviations, steals, span, touches, seq_misses, par_misses,
// additional_misses); entries that a given experiment does not exercise
// stay 0. A result is either evaluated (pass reflects the acceptance
// predicate) or skipped (precondition unmet; pass is false and notes say
// why).
struct experiment_result {
    std::string name;
    std::string params;
    std::map<std::string, int64_t> measured;
    int64_t touch_deviations = 0;
    bool pass = false;
    bool skipped = false;
    std::string notes;
};

// Audits the undisturbed future-first order of a single-touch dag: every
// consumer sees its producer side finish before its own local parent runs,
// and each fork's continuation child runs right after the spawned thread
// ends. Skipped when the dag is not single-touch.
experiment_result check_ff_sequential_order(const dag& d);

// Blames every deviation in a future-first parallel run on scheduler
// activity: whenever a fork's continuation child or its consumer deviates,
// either that child was stolen or a consumer inside the spawned thread
// deviated first. Runs the supplied script when present, seeded-random
// stealing otherwise. Skipped when the dag is not single-touch.
experiment_result check_deviation_blame(const dag& d, int procs,
                                        const std::optional<script>& scr, uint64_t steal_seed);

// Random sweep: `runs` dags of the given discipline, each executed
// future-first under every processor count in procs_set with seeded-random
// stealing. Passes when every run keeps deviations within
// 2 * steals * span (span squared for the local-touch discipline) and
// additional misses within C * deviations for every cache size checked.
experiment_result check_bound_suite(discipline family, int runs, const std::vector<int>& procs_set,
                                    uint64_t seed,
                                    const std::vector<int64_t>& cache_sizes = {2, 8});

// Replays the leaf-tree construction and checks the quadratic deviation
// floor (n * k * k), the steals-times-span ceiling, and in cache mode the
// per-leaf miss amplification together with a frozen sequential-miss
// golden for the canonical parameter points.
experiment_result run_amplification_experiment(int n, int k, int C, bool cache);

// Replays the branch-tree construction under parent-first: sequential
// misses stay flat (C + 2t plus a small constant) while the scripted
// one-steal run must exceed the C*t*n/4 miss floor and the t*n/4
// deviation floor.
experiment_result run_branch_thrash_experiment(int t_branches, int n, int C);

nlohmann::json experiment_to_json(const experiment_result& r);
// Fixed header plus one data row.
std::string experiment_to_csv(const experiment_result& r);
// Atomic file writers for both formats.
void write_experiment_json(const experiment_result& r, const std::string& path);
void write_experiment_csv(const experiment_result& r, const std::string& path);

} // namespace futsim
