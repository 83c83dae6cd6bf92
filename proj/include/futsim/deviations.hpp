#pragma once

#include "futsim/dag.hpp"
#include "futsim/engine.hpp"

#include <vector>

namespace futsim {

// Why a node ran out of sequential order: a genuine touch had to wait, a
// bookkeeping join had to wait, or a shelved fork child was picked up by a
// pop or a steal.
enum class deviation_kind { real_touch, join, fork_child };

const char* deviation_kind_name(deviation_kind k);

struct deviation {
    node_id node = -1;
    int proc = 0;
    deviation_kind kind = deviation_kind::fork_child;
};

struct deviation_report {
    std::vector<deviation> deviations;
    int64_t total = 0;
    int64_t real_touch = 0;
    int64_t join = 0;
    int64_t fork_child = 0;
    // real_touch alone; the headline number callers usually want.
    int64_t touch_deviations() const { return real_touch; }
};

// A node deviates when the processor that ran it did not run the node's
// sequential predecessor immediately before it (in that processor's own
// order). The first node of the sequential order has no predecessor and
// never deviates.
deviation_report find_deviations(const dag_index& idx,
                                 const std::vector<node_id>& sequential_order,
                                 const std::vector<std::vector<node_id>>& per_proc_order);

deviation_report find_deviations(const dag_index& idx, const run_result& sequential,
                                 const run_result& parallel);

} // namespace futsim
