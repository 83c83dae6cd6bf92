#pragma once

#include "futsim/dag.hpp"

#include <string>
#include <vector>

namespace futsim {

struct validation_issue {
    // Stable machine-readable rule name, e.g. "fork-child-is-touch".
    std::string rule;
    std::string message;
    node_id where = -1;
};

struct validation_report {
    std::vector<validation_issue> issues;
    bool ok() const { return issues.empty(); }
    std::string to_string() const;
};

// Checks every structural rule and reports all violations instead of
// stopping at the first. Never throws on bad structure; only throws
// invalid_dag_error for graphs too broken to index (duplicate ids,
// dangling edge endpoints).
validation_report validate(const dag& d);

// Convenience: validate and throw invalid_dag_error when not ok.
void require_valid(const dag& d);

} // namespace futsim
