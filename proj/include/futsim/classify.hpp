#pragma once

#include "futsim/dag.hpp"
#include "futsim/threads.hpp"

namespace futsim {

// Structural disciplines a future-parallel dag can satisfy. All of them are
// statements about where each spawned thread's results get touched.
struct classification {
    // Every touch of a thread spawned at fork v has its local parent among
    // v's descendants, and at least one touch lies under v's continuation
    // child. This keeps synchronization "downstream" of the spawn.
    bool structured = false;
    // Structured, and every spawned thread is touched exactly once.
    bool single_touch = false;
    // Structured, and every spawned thread is touched only from the thread
    // that spawned it.
    bool local_touch = false;
    // Terminal-barrier variant: each spawned thread is touched by the final
    // node, or by one well-placed consumer, or both.
    bool single_touch_super_final = false;
};

classification classify(const dag_index& idx, const thread_decomposition& threads);
classification classify(const dag& d);

} // namespace futsim
