#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "futsim/deviations.hpp"
#include "futsim/engine.hpp"
#include "futsim/json_io.hpp"
#include "futsim/trace.hpp"

#include <cstdio>

using namespace futsim;

namespace {

// Root forks one helper whose value feeds the last node.
dag diamond() {
    dag d;
    for (node_id i : {1, 2, 3, 4}) d.nodes.push_back({i, 0, i == 4});
    d.edges = {{1, 2, edge_kind::continuation},
               {1, 3, edge_kind::future},
               {2, 4, edge_kind::continuation},
               {3, 4, edge_kind::touch}};
    d.root = 1;
    d.final = 4;
    return d;
}

// Fork chain of two helpers with separate consumers, enough structure for
// steal scripts to have something to grab.
dag two_helpers() {
    dag d;
    for (node_id i : {1, 2, 3, 4, 5}) d.nodes.push_back({i, 0, i == 4 || i == 5});
    d.nodes.push_back({10, 0, false});
    d.nodes.push_back({20, 0, false});
    d.edges = {{1, 2, edge_kind::continuation}, {1, 10, edge_kind::future},
               {2, 3, edge_kind::continuation}, {2, 20, edge_kind::future},
               {3, 4, edge_kind::continuation}, {10, 4, edge_kind::touch},
               {4, 5, edge_kind::continuation}, {20, 5, edge_kind::touch}};
    d.root = 1;
    d.final = 5;
    return d;
}

} // namespace

TEST_CASE("one processor runs the graph in policy order") {
    dag d = diamond();
    auto ff = run_sequential(d, sched_policy::future_first);
    CHECK(ff.order == std::vector<node_id>{1, 3, 2, 4});
    auto pf = run_sequential(d, sched_policy::parent_first);
    CHECK(pf.order == std::vector<node_id>{1, 2, 3, 4});
    CHECK(ff.steal_count == 0);
    CHECK(ff.total_steps == 4);
}

TEST_CASE("a single scripted processor matches the unscripted run") {
    dag d = two_helpers();
    run_config cfg;
    cfg.policy = sched_policy::future_first;
    cfg.procs = 1;
    cfg.scr = script{};
    auto scripted = run_simulation(d, cfg);
    auto plain = run_sequential(d, sched_policy::future_first);
    CHECK(scripted.order == plain.order);
}

TEST_CASE("sequential run never deviates from itself") {
    dag d = two_helpers();
    auto seq = run_sequential(d, sched_policy::future_first);
    dag_index idx(d);
    auto rep = find_deviations(idx, seq, seq);
    CHECK(rep.total == 0);
}

TEST_CASE("a scripted steal moves work and a stolen node deviates") {
    dag d = diamond();
    script s;
    s.processors = {
        {0, {d_execute(1), d_sleep(3), d_execute(10)}},
        {1, {d_sleep(1), d_steal_from(0), d_execute(1), d_sleep_forever()}},
    };
    run_config cfg;
    cfg.policy = sched_policy::future_first;
    cfg.procs = 2;
    cfg.scr = s;
    auto par = run_simulation(d, cfg);
    CHECK(par.steal_count == 1);
    // Thief got the shelved continuation child.
    CHECK(par.executed_by.at(2) == 1);

    auto seq = run_sequential(d, sched_policy::future_first);
    dag_index idx(d);
    auto rep = find_deviations(idx, seq, par);
    // Node 2 was stolen (fork child out of order); node 4 ran after 2's
    // completion on a different processor than its sequential predecessor.
    CHECK(rep.total == 2);
    CHECK(rep.fork_child == 1);
    CHECK(rep.real_touch == 1);
}

TEST_CASE("steal claims the node one step before it runs") {
    dag d = diamond();
    script s;
    s.processors = {
        {0, {d_execute(1), d_sleep(5), d_execute(10)}},
        {1, {d_sleep(1), d_steal_from(0), d_execute(1), d_sleep_forever()}},
    };
    run_config cfg;
    cfg.policy = sched_policy::future_first;
    cfg.procs = 2;
    cfg.scr = s;
    auto par = run_simulation(d, cfg);
    int64_t stole_step = -1, exec_step = -1;
    for (const trace_event& e : par.tr.events) {
        if (e.ev == trace_ev::stole && e.node == 2) stole_step = e.step;
        if (e.ev == trace_ev::executed && e.node == 2) exec_step = e.step;
    }
    CHECK(stole_step == 2);
    CHECK(exec_step == 3);
}

TEST_CASE("stealing from an empty deque is a failed attempt, not an error") {
    dag d = diamond();
    script s;
    // Owner is still asleep, so its deque has nothing when the thief tries.
    s.processors = {
        {0, {d_sleep(1)}},
        {1, {d_steal_from(0), d_sleep_forever()}},
    };
    run_config cfg;
    cfg.procs = 2;
    cfg.scr = s;
    auto par = run_simulation(d, cfg);
    bool failed = false;
    for (const trace_event& e : par.tr.events)
        if (e.ev == trace_ev::failed_steal && e.proc == 1 && e.victim == 0) failed = true;
    CHECK(failed);
}

TEST_CASE("scripts that misuse the deque are rejected") {
    dag d = diamond();
    run_config cfg;
    cfg.procs = 2;

    script steal_while_busy;
    steal_while_busy.processors = {{0, {d_steal_from(1)}}};
    cfg.scr = steal_while_busy;
    CHECK_THROWS_AS(run_simulation(d, cfg), script_error);

    script pop_empty;
    pop_empty.processors = {{1, {d_pop_own(), d_sleep_forever()}}};
    cfg.scr = pop_empty;
    CHECK_THROWS_AS(run_simulation(d, cfg), script_error);
}

TEST_CASE("a stalled run reports the ready frontier") {
    dag d = diamond();
    script s;
    // Owner runs the future branch then abandons the shelved child forever.
    s.processors = {
        {0, {d_execute(2), d_sleep_forever()}},
        {1, {d_sleep_forever()}},
    };
    run_config cfg;
    cfg.policy = sched_policy::future_first;
    cfg.procs = 2;
    cfg.scr = s;
    try {
        run_simulation(d, cfg);
        FAIL("expected a stall");
    } catch (const simulation_error& e) {
        CHECK(e.ready_frontier == std::vector<node_id>{2});
    }
}

TEST_CASE("sleep_until wakes once the awaited node has run") {
    dag d = two_helpers();
    script s;
    s.processors = {
        {0, {d_execute(1), d_sleep_until(20), d_execute(1)}},
        {1, {d_sleep(1), d_steal_from(0), d_execute(2), d_sleep_forever()}},
    };
    // Thief takes node 2 (the shelved continuation) and runs its future
    // branch 20, leaving 3 shelved. The owner wakes on 20, finishes its own
    // branch, then falls back to default mode and steals 3 back.
    run_config cfg;
    cfg.policy = sched_policy::future_first;
    cfg.procs = 2;
    cfg.scr = s;
    auto par = run_simulation(d, cfg);
    CHECK(par.executed_by.at(2) == 1);
    CHECK(par.executed_by.at(20) == 1);
    CHECK(par.executed_by.at(3) == 0);
    CHECK(par.executed_by.at(4) == 0);
    CHECK(par.executed_by.at(5) == 0);
    CHECK(par.steal_count == 2);
}

TEST_CASE("default mode steals with the seeded generator and is reproducible") {
    dag d = two_helpers();
    run_config cfg;
    cfg.policy = sched_policy::future_first;
    cfg.procs = 4;
    cfg.victim_seed = 7;
    auto a = run_simulation(d, cfg);
    auto b = run_simulation(d, cfg);
    CHECK(trace_hash(a.tr) == trace_hash(b.tr));
    CHECK(a.order == b.order);
}

TEST_CASE("traces round trip through their file form") {
    dag d = diamond();
    run_config cfg;
    cfg.procs = 2;
    cfg.victim_seed = 3;
    cfg.cache_capacity = 2;
    auto r = run_simulation(d, cfg);
    std::string path = "engine_trace_roundtrip.jsonl";
    save_trace(r.tr, path);
    trace loaded = load_trace(path);
    CHECK(trace_hash(loaded) == trace_hash(r.tr));
    CHECK(loaded.victim_rng == "splitmix64");
    CHECK(loaded.procs == 2);
    std::remove(path.c_str());
}

TEST_CASE("cache replay counts cold and capacity misses per processor") {
    dag d;
    // Chain over blocks 1,2,3,1,2,3 with capacity 2: everything misses.
    for (node_id i = 1; i <= 6; ++i) d.nodes.push_back({i, (i - 1) % 3 + 1, false});
    for (node_id i = 1; i < 6; ++i) d.edges.push_back({i, i + 1, edge_kind::continuation});
    d.root = 1;
    d.final = 6;
    dag_index idx(d);
    auto rep = replay_misses(idx, {{1, 2, 3, 4, 5, 6}}, 2);
    CHECK(rep.total == 6);
    // Capacity 3 keeps the working set resident.
    rep = replay_misses(idx, {{1, 2, 3, 4, 5, 6}}, 3);
    CHECK(rep.total == 3);
}

TEST_CASE("misses land in the trace summary when caches are on") {
    dag d = diamond();
    for (node& n : d.nodes) n.block = 1;
    run_config cfg;
    cfg.procs = 1;
    cfg.cache_capacity = 4;
    auto r = run_simulation(d, cfg);
    REQUIRE(r.tr.misses.has_value());
    CHECK(*r.tr.misses == 1);
    REQUIRE(r.misses.has_value());
    CHECK(r.misses->per_proc[0] == 1);
}
