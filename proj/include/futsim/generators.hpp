#pragma once

#include "futsim/dag.hpp"
#include "futsim/script.hpp"

#include <optional>
#include <string>

namespace futsim {

// A generated dag together with the scripted schedule that drives it into
// its worst-case behavior (when the family has one) and the parameters it
// was built from. Landmark names live in d.landmarks.
struct generated_case {
    dag d;
    std::optional<script> script_hint;
    std::string params;
};

enum class discipline { single_touch, local_touch, single_touch_super_final };

const char* discipline_name(discipline k);
discipline discipline_from_name(const std::string& s);

struct random_dag_config {
    uint64_t seed = 0;
    int max_depth = 4;
    double fork_probability = 0.4;
    discipline kind = discipline::single_touch;
    // Blocks are drawn uniformly from 1..block_universe with the given
    // probability per node; 0 probability leaves every node blockless.
    int block_universe = 8;
    double block_probability = 0.0;
};

// Balanced binary spawn/sync dag; classifies single-touch and local-touch.
generated_case gen_fork_join(int depth);

// Seeded random dag in the requested structured family.
generated_case gen_random_structured(const random_dag_config& cfg);

// One future-first worst-case block: a scripted two-processor run deviates
// at exactly the k genuine touches s_1..s_k. With cache=true the chains are
// C long and carry the block assignment that makes the thief thrash.
generated_case gen_ff_block(int k, bool cache, int C);

// k blocks on a spine; the scripted three-processor run deviates at all
// k*k touches.
generated_case gen_ff_amplified(int k);

// Binary fork tree over n amplified leaves; 3n processors, n*k*k touch
// deviations under the hinted schedule.
generated_case gen_ff_full(int n, int k, bool cache, int C);

// Parent-first cache cascade: one early steal degrades a Theta(C) miss
// sequential pattern into Theta(Cn).
generated_case gen_pf_cascade_block(int n, int C);

// Alternating fork/touch chain exhibiting the execution-order parity law,
// terminated by a cascade block; k must be even.
generated_case gen_pf_parity_chain(int k, int n, int C);

// Branch-doubling generalization: t_branches leaves (power of two), each a
// cascade ending; a single root steal flips the parity of every branch.
generated_case gen_pf_full(int t_branches, int n, int C);

} // namespace futsim
