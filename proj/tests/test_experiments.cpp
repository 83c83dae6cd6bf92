#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "futsim/experiments.hpp"
#include "futsim/generators.hpp"
#include "futsim/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

using namespace futsim;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// an unstructured shape: the spawned thread is consumed upstream of its fork
dag non_single_touch_dag() {
    dag d;
    for (node_id i = 0; i < 7; i++) d.nodes.push_back({i, 0, false});
    d.root = 0;
    d.final = 6;
    d.nodes[4].is_real_touch = true;
    d.edges = {
        {0, 1, edge_kind::continuation}, {1, 2, edge_kind::future},
        {1, 3, edge_kind::continuation}, {3, 4, edge_kind::continuation},
        {2, 4, edge_kind::touch},        {4, 5, edge_kind::continuation},
        {2, 5, edge_kind::touch},        {5, 6, edge_kind::continuation},
    };
    return d;
}

} // namespace

TEST_CASE("sequential order audit passes the structured families") {
    CHECK(check_ff_sequential_order(gen_fork_join(3).d).pass);
    CHECK(check_ff_sequential_order(gen_ff_block(6, false, 0).d).pass);
    CHECK(check_ff_sequential_order(gen_ff_amplified(3).d).pass);
    CHECK(check_ff_sequential_order(gen_ff_full(4, 2, false, 0).d).pass);
    for (uint64_t s = 0; s < 50; s++) {
        random_dag_config cfg;
        cfg.seed = s;
        cfg.kind = discipline::single_touch;
        cfg.fork_probability = 0.5;
        auto r = check_ff_sequential_order(gen_random_structured(cfg).d);
        CHECK(r.pass);
        CHECK_FALSE(r.skipped);
    }
}

TEST_CASE("sequential order audit skips dags outside its precondition") {
    auto r = check_ff_sequential_order(non_single_touch_dag());
    CHECK(r.skipped);
    CHECK_FALSE(r.pass);
    CHECK(r.notes.find("single-touch") != std::string::npos);
}

TEST_CASE("deviation blame holds on scripted and random runs") {
    auto gc = gen_ff_block(6, false, 0);
    auto r = check_deviation_blame(gc.d, 2, gc.script_hint, 0);
    CHECK(r.pass);
    CHECK(r.measured.at("deviations") > 0);

    auto amp = gen_ff_amplified(3);
    CHECK(check_deviation_blame(amp.d, 3, amp.script_hint, 0).pass);

    for (uint64_t s = 0; s < 40; s++) {
        random_dag_config cfg;
        cfg.seed = s;
        cfg.kind = discipline::single_touch;
        cfg.fork_probability = 0.5;
        auto d = gen_random_structured(cfg).d;
        CHECK(check_deviation_blame(d, 4, std::nullopt, s * 31 + 7).pass);
    }
}

TEST_CASE("deviation blame is vacuous on one processor") {
    auto gc = gen_ff_full(2, 2, false, 0);
    auto r = check_deviation_blame(gc.d, 1, std::nullopt, 0);
    CHECK(r.pass);
    CHECK(r.measured.at("deviations") == 0);
    CHECK(r.measured.at("steals") == 0);
}

TEST_CASE("bound suite stays clean across disciplines") {
    for (auto fam : {discipline::single_touch, discipline::local_touch,
                     discipline::single_touch_super_final}) {
        auto r = check_bound_suite(fam, 25, {2, 4}, 1000);
        CAPTURE(discipline_name(fam));
        CHECK(r.pass);
        CHECK(r.measured.at("deviations") > 0);
        CHECK(r.measured.at("steals") > 0);
    }
    CHECK_THROWS_AS(check_bound_suite(discipline::single_touch, 0, {2}, 0),
                    std::invalid_argument);
}

TEST_CASE("bound suite is trivial on one processor") {
    auto r = check_bound_suite(discipline::single_touch, 3, {1}, 5);
    CHECK(r.pass);
    CHECK(r.measured.at("deviations") == 0);
}

TEST_CASE("amplification experiment meets its floors") {
    auto r = run_amplification_experiment(4, 4, 0, false);
    CHECK(r.pass);
    CHECK(r.measured.at("deviations") >= 64);
    CHECK(r.touch_deviations == 64);

    auto small = run_amplification_experiment(1, 1, 0, false);
    CHECK(small.pass);
    CHECK(small.measured.at("deviations") >= 1);

    double ratio = double(run_amplification_experiment(4, 4, 0, false).measured.at("deviations")) /
                   double(run_amplification_experiment(2, 4, 0, false).measured.at("deviations"));
    CHECK(ratio >= 1.8);
    CHECK(ratio <= 2.2);
}

TEST_CASE("amplification experiment cache mode checks the frozen misses") {
    auto r = run_amplification_experiment(2, 4, 4, true);
    CHECK(r.pass);
    CHECK(r.measured.at("seq_misses") == 67);
    CHECK(r.measured.at("additional_misses") == 109);
    // uncatalogued parameter points skip the frozen clause but still run
    auto odd = run_amplification_experiment(2, 2, 6, true);
    CHECK(odd.notes.find("clause skipped") != std::string::npos);
    CHECK(odd.pass);
}

TEST_CASE("branch thrash experiment meets all three predicates") {
    auto r = run_branch_thrash_experiment(8, 8, 4);
    CHECK(r.pass);
    CHECK(r.measured.at("deviations") >= 16);
    CHECK(r.measured.at("par_misses") >= 64);
    CHECK(r.measured.at("seq_misses") <= 4 + 16 + 4);

    auto tiny = run_branch_thrash_experiment(1, 2, 2);
    CHECK(tiny.pass);
    CHECK(tiny.measured.at("deviations") >= 1);

    double cr = double(run_branch_thrash_experiment(8, 8, 4).measured.at("par_misses")) /
                double(run_branch_thrash_experiment(8, 8, 2).measured.at("par_misses"));
    CHECK(cr >= 1.6);
    CHECK(cr <= 2.4);
}

TEST_CASE("result serialization round trips and formats agree") {
    auto r = run_branch_thrash_experiment(4, 4, 4);
    auto j = experiment_to_json(r);
    CHECK(j["name"] == "branch-thrash");
    CHECK(j["pass"] == r.pass);
    CHECK(j["measured"]["deviations"] == r.measured.at("deviations"));
    CHECK(j["touch_deviations"] == r.touch_deviations);

    std::string csv = experiment_to_csv(r);
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "experiment,params,deviations,steals,span,touches,seq_misses,par_misses,"
                    "additional_misses,pass");
    // csv row repeats exactly the measured values in header order
    std::ostringstream want;
    want << r.name << "," << r.params << "," << r.measured.at("deviations") << ","
         << r.measured.at("steals") << "," << r.measured.at("span") << ","
         << r.measured.at("touches") << "," << r.measured.at("seq_misses") << ","
         << r.measured.at("par_misses") << "," << r.measured.at("additional_misses") << ","
         << (r.pass ? "true" : "false");
    CHECK(row == want.str());
}

TEST_CASE("experiment files are written atomically and reproducibly") {
    auto r = run_amplification_experiment(2, 2, 4, true);
    std::string jpath = "exp_out_test.json";
    std::string cpath = "exp_out_test.csv";
    write_experiment_json(r, jpath);
    write_experiment_csv(r, cpath);
    std::string j1 = slurp(jpath);
    std::string c1 = slurp(cpath);
    auto again = run_amplification_experiment(2, 2, 4, true);
    write_experiment_json(again, jpath);
    write_experiment_csv(again, cpath);
    CHECK(slurp(jpath) == j1);
    CHECK(slurp(cpath) == c1);
    CHECK(nlohmann::json::parse(j1)["measured"]["seq_misses"] == 19);
    std::remove(jpath.c_str());
    std::remove(cpath.c_str());
}

TEST_CASE("additional misses is the plain difference of totals") {
    miss_report a{7, {7}};
    CHECK(additional_misses(a, a) == 0);
    miss_report b{5, {2, 3}};
    CHECK(additional_misses(a, b) == -2);

    // the cascade pays at least C*(n-1) minus the tiny undisturbed cost
    auto gc = gen_pf_cascade_block(16, 4);
    dag_index idx(gc.d);
    auto seq = run_sequential(gc.d, sched_policy::parent_first);
    run_config rc;
    rc.policy = sched_policy::parent_first;
    rc.procs = 2;
    rc.scr = gc.script_hint;
    auto par = run_simulation(gc.d, rc);
    auto seqm = replay_misses(idx, seq.per_proc_order, 4);
    auto parm = replay_misses(idx, par.per_proc_order, 4);
    CHECK(additional_misses(seqm, parm) >= 4 * (16 - 1) - (4 + 2));

    // and the branch tree pays at least C*t*n/4 minus its flat baseline
    auto bt = gen_pf_full(8, 8, 4);
    dag_index bidx(bt.d);
    auto bseq = run_sequential(bt.d, sched_policy::parent_first);
    run_config brc;
    brc.policy = sched_policy::parent_first;
    brc.procs = 2;
    brc.scr = bt.script_hint;
    auto bpar = run_simulation(bt.d, brc);
    auto bs = replay_misses(bidx, bseq.per_proc_order, 4);
    auto bp = replay_misses(bidx, bpar.per_proc_order, 4);
    CHECK(additional_misses(bs, bp) >= 4 * 8 * 8 / 4 - (4 + 16 + 4));
}

TEST_CASE("skipped results surface in both formats") {
    auto r = check_ff_sequential_order(non_single_touch_dag());
    auto j = experiment_to_json(r);
    CHECK(j["skipped"] == true);
    std::string csv = experiment_to_csv(r);
    CHECK(csv.find(",skipped\n") != std::string::npos);
}
