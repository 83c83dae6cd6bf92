#pragma once

#include "futsim/dag.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace futsim {

// Per-processor stage directions for reproducing a specific interleaving.
// A processor past the end of its directive list falls back to the default
// scheduler behavior (work if possible, otherwise steal from a random victim).
enum class op {
    execute,       // do one work step: run current node, else pop own deque
    sleep,         // stay idle for a fixed number of steps
    sleep_until,   // stay idle until a given node has been executed by anyone
    sleep_forever, // never act again
    steal_from,    // one steal attempt aimed at a specific victim
    pop_own,       // pop the bottom of the own deque and run it (must hold no node)
    wake           // annotation only, consumes nothing
};

struct directive {
    op o = op::execute;
    int64_t times = 1;   // op::execute: number of work steps
    int64_t steps = 0;   // op::sleep: number of idle steps
    node_id node = -1;   // op::sleep_until: node to wait for
    int victim = -1;     // op::steal_from: processor to rob
};

struct proc_script {
    int id = 0;
    std::vector<directive> directives;
};

struct script {
    std::vector<proc_script> processors;
    uint64_t random_victim_seed = 0;
};

class script_error : public std::runtime_error {
public:
    explicit script_error(const std::string& what) : std::runtime_error(what) {}
};

nlohmann::json script_to_json(const script& s);
script script_from_json(const nlohmann::json& j);
void save_script(const script& s, const std::string& path);
script load_script(const std::string& path);

// Stable content hash; scriptless runs hash a fixed sentinel.
uint64_t script_hash(const script& s);
uint64_t script_hash_none();

// Directive shorthand helpers used by generators and tests.
directive d_execute(int64_t times = 1);
directive d_sleep(int64_t steps);
directive d_sleep_until(node_id n);
directive d_sleep_forever();
directive d_steal_from(int victim);
directive d_pop_own();

} // namespace futsim
