#pragma once

#include "futsim/dag.hpp"

#include <cstdint>

namespace futsim {

// Length in nodes of the longest root-to-final path.
int64_t compute_span(const dag_index& idx);

// Number of genuine synchronization touches (see node::is_real_touch).
int64_t count_touches(const dag& d);

} // namespace futsim
