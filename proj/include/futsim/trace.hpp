#pragma once

#include "futsim/dag.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace futsim {

enum class trace_ev { executed, popped, stole, failed_steal, idle };

const char* trace_ev_name(trace_ev e);

struct trace_event {
    int64_t step = 0;
    int proc = 0;
    trace_ev ev = trace_ev::executed;
    node_id node = -1; // node involved, if any
    int victim = -1;   // steal attempts only
};

struct trace {
    // header
    uint64_t dag_hash = 0;
    std::string policy;
    int procs = 1;
    uint64_t script_hash = 0;
    uint64_t victim_seed = 0;
    std::string victim_rng = "splitmix64";
    // body
    std::vector<trace_event> events;
    // summary
    int64_t total_steps = 0;
    int64_t steal_count = 0;
    std::optional<int64_t> misses;
};

// One json object per line: header, then events, then a summary line.
void save_trace(const trace& t, const std::string& path);
trace load_trace(const std::string& path);

// Hash of the canonical line form; replaying a run must reproduce it.
uint64_t trace_hash(const trace& t);

} // namespace futsim
