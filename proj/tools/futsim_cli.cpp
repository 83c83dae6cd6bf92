#include "futsim/classify.hpp"
#include "futsim/deviations.hpp"
#include "futsim/engine.hpp"
#include "futsim/experiments.hpp"
#include "futsim/generators.hpp"
#include "futsim/json_io.hpp"
#include "futsim/metrics.hpp"
#include "futsim/validate.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace futsim;

namespace {

// Command-line front end. Every path writes files atomically and never
// seeds from the clock: runs that can steal at random refuse to start
// without an explicit seed.

struct gen_options {
    std::string family;
    std::string out;
    std::string script_out;
    int depth = 3;
    int k = 2;
    int n = 2;
    int t = 2;
    int64_t cache_size = 4;
    bool cache = false;
    std::optional<uint64_t> seed;
    std::string disc = "single-touch";
    int max_depth = 4;
    double fork_prob = 0.4;
    int block_universe = 8;
    double block_prob = 0.0;
};

generated_case generate(const gen_options& o) {
    if (o.family == "fork-join") return gen_fork_join(o.depth);
    if (o.family == "ff-block") return gen_ff_block(o.k, o.cache, o.cache ? o.cache_size : 0);
    if (o.family == "ff-amplified") return gen_ff_amplified(o.k);
    if (o.family == "ff-full") return gen_ff_full(o.n, o.k, o.cache, o.cache ? o.cache_size : 0);
    if (o.family == "pf-cascade") return gen_pf_cascade_block(o.n, o.cache_size);
    if (o.family == "pf-parity") return gen_pf_parity_chain(o.k, o.n, o.cache_size);
    if (o.family == "pf-full") return gen_pf_full(o.t, o.n, o.cache_size);
    if (o.family == "random") {
        if (!o.seed) throw std::invalid_argument("random family needs --seed");
        random_dag_config cfg;
        cfg.seed = *o.seed;
        cfg.max_depth = o.max_depth;
        cfg.fork_probability = o.fork_prob;
        cfg.kind = discipline_from_name(o.disc);
        cfg.block_universe = o.block_universe;
        cfg.block_probability = o.block_prob;
        return gen_random_structured(cfg);
    }
    throw std::invalid_argument("unknown family: " + o.family);
}

// Execution orders as recorded in a trace file.
struct trace_orders {
    std::vector<node_id> global;
    std::vector<std::vector<node_id>> per_proc;
};

trace_orders orders_from_trace(const trace& t) {
    trace_orders o;
    o.per_proc.resize(size_t(t.procs));
    for (const trace_event& e : t.events) {
        if (e.ev != trace_ev::executed) continue;
        o.global.push_back(e.node);
        o.per_proc[size_t(e.proc)].push_back(e.node);
    }
    return o;
}

int cmd_validate(const std::string& path) {
    dag d = load_dag(path);
    auto report = validate(d);
    if (report.ok()) {
        std::cout << "valid\n";
        return 0;
    }
    std::cout << report.to_string();
    return 2;
}

int cmd_classify(const std::string& path) {
    dag d = load_dag(path);
    require_valid(d);
    auto cl = classify(d);
    nlohmann::json j{{"structured", cl.structured},
                     {"single_touch", cl.single_touch},
                     {"local_touch", cl.local_touch},
                     {"single_touch_super_final", cl.single_touch_super_final}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_gen(const gen_options& o) {
    auto gc = generate(o);
    save_dag(gc.d, o.out);
    std::cout << "wrote " << o.out << " (" << gc.d.nodes.size() << " nodes, params " << gc.params
              << ")\n";
    if (!o.script_out.empty()) {
        if (!gc.script_hint) throw std::invalid_argument(o.family + " emits no script");
        save_script(*gc.script_hint, o.script_out);
        std::cout << "wrote " << o.script_out << "\n";
    }
    return 0;
}

struct run_options {
    std::string dag_path;
    std::string policy = "future-first";
    int procs = 1;
    std::string script_path;
    std::optional<uint64_t> seed;
    std::optional<int64_t> cache_size;
    std::string out;
};

int cmd_run(const run_options& o) {
    dag d = load_dag(o.dag_path);
    require_valid(d);
    run_config rc;
    rc.policy = sched_policy_from_name(o.policy);
    rc.procs = o.procs;
    if (!o.script_path.empty()) {
        rc.scr = load_script(o.script_path);
    } else if (o.seed) {
        rc.victim_seed = *o.seed;
    } else if (o.procs > 1) {
        throw std::invalid_argument("unscripted multi-processor runs need --seed");
    }
    rc.cache_capacity = o.cache_size;
    auto res = run_simulation(d, rc);
    save_trace(res.tr, o.out);
    std::cout << "steps=" << res.total_steps << " steals=" << res.steal_count;
    if (res.misses) std::cout << " misses=" << res.misses->total;
    std::cout << " trace=" << o.out << "\n";
    return 0;
}

int cmd_deviations(const std::string& dag_path, const std::string& seq_path,
                   const std::string& par_path, const std::string& out) {
    dag d = load_dag(dag_path);
    require_valid(d);
    dag_index idx(d);
    auto seq = orders_from_trace(load_trace(seq_path));
    auto par = orders_from_trace(load_trace(par_path));
    auto rep = find_deviations(idx, seq.global, par.per_proc);
    nlohmann::json j{{"deviations", rep.total},
                     {"real_touch", rep.real_touch},
                     {"join", rep.join},
                     {"fork_child", rep.fork_child}};
    std::cout << j.dump(2) << "\n";
    if (!out.empty()) write_json_atomic(j, out);
    return 0;
}

struct experiment_options {
    std::string name;
    std::string format = "json";
    std::string out;
    std::string dag_path;
    std::string script_path;
    int n = 2;
    int k = 2;
    int t = 2;
    int64_t cache_size = 4;
    bool cache = false;
    int procs = 2;
    std::vector<int> procs_set;
    int runs = 10;
    std::string family = "single-touch";
    std::optional<uint64_t> seed;
};

experiment_result dispatch_experiment(const experiment_options& o) {
    if (o.name == "amplification")
        return run_amplification_experiment(o.n, o.k, int(o.cache_size), o.cache);
    if (o.name == "branch-thrash")
        return run_branch_thrash_experiment(o.t, o.n, int(o.cache_size));
    if (o.name == "bound-suite") {
        if (!o.seed) throw std::invalid_argument("bound-suite needs --seed");
        auto procs = o.procs_set.empty() ? std::vector<int>{2, 4} : o.procs_set;
        return check_bound_suite(discipline_from_name(o.family), o.runs, procs, *o.seed);
    }
    if (o.name == "ff-seq-order") {
        if (o.dag_path.empty()) throw std::invalid_argument("ff-seq-order needs --dag");
        return check_ff_sequential_order(load_dag(o.dag_path));
    }
    if (o.name == "deviation-blame") {
        if (o.dag_path.empty()) throw std::invalid_argument("deviation-blame needs --dag");
        std::optional<script> scr;
        if (!o.script_path.empty())
            scr = load_script(o.script_path);
        else if (!o.seed)
            throw std::invalid_argument("deviation-blame needs --script or --seed");
        return check_deviation_blame(load_dag(o.dag_path), o.procs, scr, o.seed.value_or(0));
    }
    throw std::invalid_argument("unknown experiment: " + o.name);
}

int cmd_experiment(const experiment_options& o) {
    auto r = dispatch_experiment(o);
    if (!o.out.empty()) {
        if (o.format == "csv")
            write_experiment_csv(r, o.out);
        else
            write_experiment_json(r, o.out);
    }
    std::cout << r.name << " [" << r.params << "] "
              << (r.skipped ? "skipped" : r.pass ? "pass" : "fail");
    if (!r.notes.empty()) std::cout << " (" << r.notes << ")";
    std::cout << "\n";
    if (r.skipped) return 0;
    return r.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic simulator for future-parallel dags under work stealing"};
    app.require_subcommand(1);

    gen_options g;
    auto* gen = app.add_subcommand("gen", "generate a dag family instance");
    gen->add_option("family", g.family,
                    "fork-join | random | ff-block | ff-amplified | ff-full | pf-cascade | "
                    "pf-parity | pf-full")
        ->required();
    gen->add_option("-o,--out", g.out, "dag json output path")->required();
    gen->add_option("--script", g.script_out, "also write the family's schedule script");
    gen->add_option("--depth", g.depth, "fork-join recursion depth");
    gen->add_option("--k", g.k, "producer count / chain length");
    gen->add_option("--n", g.n, "leaf or block count");
    gen->add_option("--t", g.t, "branch count");
    gen->add_option("--C", g.cache_size, "cache capacity the instance targets");
    gen->add_flag("--cache", g.cache, "emit distinct memory blocks sized to --C");
    gen->add_option("--seed", g.seed, "random family seed");
    gen->add_option("--discipline", g.disc,
                    "single-touch | local-touch | single-touch-super-final");
    gen->add_option("--max-depth", g.max_depth, "random family nesting depth");
    gen->add_option("--fork-prob", g.fork_prob, "random family fork probability");
    gen->add_option("--block-universe", g.block_universe, "random family block id range");
    gen->add_option("--block-prob", g.block_prob, "random family block assignment probability");

    std::string val_path;
    auto* val = app.add_subcommand("validate", "check structural rules of a dag file");
    val->add_option("dag", val_path, "dag json path")->required();

    std::string cls_path;
    auto* cls = app.add_subcommand("classify", "report the synchronization discipline flags");
    cls->add_option("dag", cls_path, "dag json path")->required();

    run_options r;
    auto* run = app.add_subcommand("run", "simulate a dag and write the trace");
    run->add_option("--dag", r.dag_path, "dag json path")->required();
    run->add_option("--policy", r.policy, "future-first | parent-first");
    run->add_option("--procs", r.procs, "processor count")->required();
    run->add_option("--script", r.script_path, "schedule script json path");
    run->add_option("--seed", r.seed, "victim selection seed for unscripted stealing");
    run->add_option("--cache", r.cache_size, "per-processor cache capacity to replay");
    run->add_option("-o,--out", r.out, "trace jsonl output path")->required();

    std::string dv_dag, dv_seq, dv_par, dv_out;
    auto* dv = app.add_subcommand("deviations", "compare two traces of the same dag");
    dv->add_option("--dag", dv_dag, "dag json path")->required();
    dv->add_option("--seq", dv_seq, "baseline trace jsonl")->required();
    dv->add_option("--par", dv_par, "parallel trace jsonl")->required();
    dv->add_option("-o,--out", dv_out, "optional json report path");

    experiment_options e;
    auto* exp = app.add_subcommand("experiment", "run a named property or bound experiment");
    exp->add_option("name", e.name,
                    "amplification | branch-thrash | bound-suite | ff-seq-order | "
                    "deviation-blame")
        ->required();
    exp->add_option("--format", e.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    exp->add_option("-o,--out", e.out, "result file path");
    exp->add_option("--dag", e.dag_path, "dag json path (dag-based experiments)");
    exp->add_option("--script", e.script_path, "schedule script json path");
    exp->add_option("--n", e.n, "leaf or block count");
    exp->add_option("--k", e.k, "producer count");
    exp->add_option("--t", e.t, "branch count");
    exp->add_option("--C", e.cache_size, "cache capacity");
    exp->add_flag("--cache", e.cache, "amplification: enable the cache clauses");
    exp->add_option("--procs", e.procs, "processor count (deviation-blame)");
    exp->add_option("--procs-set", e.procs_set, "processor counts (bound-suite)")
        ->delimiter(',');
    exp->add_option("--runs", e.runs, "random dags per sweep (bound-suite)");
    exp->add_option("--family", e.family, "discipline under test (bound-suite)");
    exp->add_option("--seed", e.seed, "seed for any random generation or stealing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& pe) {
        app.exit(pe);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen(g);
        if (val->parsed()) return cmd_validate(val_path);
        if (cls->parsed()) return cmd_classify(cls_path);
        if (run->parsed()) return cmd_run(r);
        if (dv->parsed()) return cmd_deviations(dv_dag, dv_seq, dv_par, dv_out);
        if (exp->parsed()) return cmd_experiment(e);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 2;
}
