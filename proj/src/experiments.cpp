#include "futsim/experiments.hpp"

#include "futsim/cache.hpp"
#include "futsim/classify.hpp"
#include "futsim/deviations.hpp"
#include "futsim/json_io.hpp"
#include "futsim/metrics.hpp"
#include "futsim/rng.hpp"
#include "futsim/threads.hpp"
#include "futsim/validate.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace futsim {

namespace {

std::map<std::string, int64_t> make_measured(int64_t deviations, int64_t steals, int64_t span,
                                             int64_t touches, int64_t seq_misses,
                                             int64_t par_misses) {
    return {
        {"deviations", deviations},   {"steals", steals},
        {"span", span},               {"touches", touches},
        {"seq_misses", seq_misses},   {"par_misses", par_misses},
        {"additional_misses", par_misses - seq_misses},
    };
}

experiment_result skipped_result(std::string name, std::string params, std::string why) {
    experiment_result r;
    r.name = std::move(name);
    r.params = std::move(params);
    r.measured = make_measured(0, 0, 0, 0, 0, 0);
    r.skipped = true;
    r.notes = "skipped: " + std::move(why);
    return r;
}

std::set<node_id> deviating_nodes(const deviation_report& rep) {
    std::set<node_id> out;
    for (const auto& dv : rep.deviations) out.insert(dv.node);
    return out;
}

std::set<node_id> stolen_nodes(const run_result& r) {
    std::set<node_id> out;
    for (const trace_event& e : r.tr.events)
        if (e.ev == trace_ev::stole) out.insert(e.node);
    return out;
}

std::string bool_name(bool b) { return b ? "true" : "false"; }

} // namespace

experiment_result check_ff_sequential_order(const dag& d) {
    const std::string name = "ff-seq-order";
    const std::string params = "nodes=" + std::to_string(d.nodes.size());
    auto cl = classify(d);
    if (!cl.single_touch) return skipped_result(name, params, "not single-touch");

    dag_index idx(d);
    auto seq = run_sequential(d, sched_policy::future_first);
    std::unordered_map<node_id, size_t> pos;
    for (size_t i = 0; i < seq.order.size(); i++) pos[seq.order[i]] = i;

    int64_t violations = 0;
    // every producer finishes before the consumer's local parent runs
    for (const edge& e : d.edges) {
        if (e.kind != edge_kind::touch) continue;
        if (pos.at(e.from) >= pos.at(idx.local_parent(e.to))) violations++;
    }
    // each continuation child runs right after its sibling thread ends
    auto td = decompose_threads(idx);
    for (const node& nd : d.nodes) {
        if (!idx.is_fork(nd.id)) continue;
        node_id u = idx.out_edge_of_kind(nd.id, edge_kind::continuation)->to;
        node_id fc = idx.out_edge_of_kind(nd.id, edge_kind::future)->to;
        if (pos.at(u) != pos.at(td.of(fc).last()) + 1) violations++;
    }

    experiment_result r;
    r.name = name;
    r.params = params;
    r.measured = make_measured(0, 0, compute_span(idx), count_touches(d), 0, 0);
    r.pass = violations == 0;
    if (!r.pass) r.notes = "order violations=" + std::to_string(violations);
    return r;
}

experiment_result check_deviation_blame(const dag& d, int procs,
                                        const std::optional<script>& scr, uint64_t steal_seed) {
    const std::string name = "deviation-blame";
    std::string params = "procs=" + std::to_string(procs) +
                         (scr ? " script=yes" : " seed=" + std::to_string(steal_seed));
    auto cl = classify(d);
    if (!cl.single_touch) return skipped_result(name, params, "not single-touch");

    dag_index idx(d);
    auto seq = run_sequential(d, sched_policy::future_first);
    run_config rc;
    rc.policy = sched_policy::future_first;
    rc.procs = procs;
    rc.scr = scr;
    rc.victim_seed = steal_seed;
    auto par = run_simulation(d, rc);

    auto rep = find_deviations(idx, seq, par);
    auto devs = deviating_nodes(rep);
    auto stolen = stolen_nodes(par);
    auto td = decompose_threads(idx);

    int64_t violations = 0;
    for (const node& nd : d.nodes) {
        if (!idx.is_fork(nd.id)) continue;
        node_id u = idx.out_edge_of_kind(nd.id, edge_kind::continuation)->to;
        node_id fc = idx.out_edge_of_kind(nd.id, edge_kind::future)->to;
        const thread_info& t = td.of(fc);
        bool consumer_deviated = false;
        for (const edge& e : idx.out_edges(t.last()))
            if (e.kind == edge_kind::touch && devs.count(e.to)) consumer_deviated = true;
        if (!devs.count(u) && !consumer_deviated) continue;
        // blame: the child moved, or a consumer inside the spawned thread
        // had already slipped
        bool inner_slipped = false;
        for (node_id v : t.nodes)
            if (idx.is_touch_target(v) && devs.count(v)) inner_slipped = true;
        if (!stolen.count(u) && !inner_slipped) violations++;
    }

    experiment_result r;
    r.name = name;
    r.params = params;
    r.measured = make_measured(rep.total, par.steal_count, compute_span(idx), count_touches(d),
                               0, 0);
    r.touch_deviations = rep.touch_deviations();
    r.pass = violations == 0;
    if (!r.pass) r.notes = "unblamed deviations=" + std::to_string(violations);
    return r;
}

experiment_result check_bound_suite(discipline family, int runs, const std::vector<int>& procs_set,
                                    uint64_t seed, const std::vector<int64_t>& cache_sizes) {
    if (runs < 1) throw std::invalid_argument("bound suite needs runs >= 1");
    if (procs_set.empty()) throw std::invalid_argument("bound suite needs processor counts");

    std::string params = "family=" + std::string(discipline_name(family)) +
                         " runs=" + std::to_string(runs) + " seed=" + std::to_string(seed);

    bool local = family == discipline::local_touch;
    int64_t violations = 0;
    int64_t sum_devs = 0, sum_steals = 0, sum_touch_devs = 0, max_span = 0, sum_touches = 0;
    int64_t sum_seq = 0, sum_par = 0;
    int64_t biggest_c = *std::max_element(cache_sizes.begin(), cache_sizes.end());

    for (int i = 0; i < runs; i++) {
        random_dag_config cfg;
        cfg.seed = seed + uint64_t(i);
        cfg.max_depth = 4;
        cfg.fork_probability = 0.45;
        cfg.kind = family;
        cfg.block_universe = 8;
        cfg.block_probability = 0.35;
        auto gc = gen_random_structured(cfg);
        dag_index idx(gc.d);
        int64_t span = compute_span(idx);
        max_span = std::max(max_span, span);
        sum_touches += count_touches(gc.d);
        auto seq = run_sequential(gc.d, sched_policy::future_first);

        for (int procs : procs_set) {
            run_config rc;
            rc.policy = sched_policy::future_first;
            rc.procs = procs;
            rc.victim_seed = splitmix64(cfg.seed * 2654435761u + uint64_t(procs)).next();
            auto par = run_simulation(gc.d, rc);
            auto rep = find_deviations(idx, seq, par);
            sum_devs += rep.total;
            sum_touch_devs += rep.touch_deviations();
            sum_steals += par.steal_count;

            int64_t ceiling = local ? 2 * par.steal_count * span * span
                                    : 2 * par.steal_count * span;
            if (rep.total > ceiling) violations++;

            for (int64_t c : cache_sizes) {
                auto seqm = replay_misses(idx, seq.per_proc_order, c);
                auto parm = replay_misses(idx, par.per_proc_order, c);
                if (additional_misses(seqm, parm) > c * rep.total) violations++;
                if (c == biggest_c) {
                    sum_seq += seqm.total;
                    sum_par += parm.total;
                }
            }
        }
    }

    experiment_result r;
    r.name = "bound-suite";
    r.params = params;
    r.measured = make_measured(sum_devs, sum_steals, max_span, sum_touches, sum_seq, sum_par);
    r.touch_deviations = sum_touch_devs;
    r.pass = violations == 0;
    r.notes = r.pass ? "miss columns use the largest cache size checked"
                     : "bound violations=" + std::to_string(violations);
    return r;
}

experiment_result run_amplification_experiment(int n, int k, int C, bool cache) {
    auto gc = gen_ff_full(n, k, cache, C);
    std::string params = "n=" + std::to_string(n) + " k=" + std::to_string(k) +
                         " C=" + std::to_string(C) + " cache=" + bool_name(cache);

    dag_index idx(gc.d);
    auto seq = run_sequential(gc.d, sched_policy::future_first);
    run_config rc;
    rc.policy = sched_policy::future_first;
    rc.procs = int(gc.script_hint->processors.size());
    rc.scr = gc.script_hint;
    if (cache) rc.cache_capacity = C;
    auto par = run_simulation(gc.d, rc);
    auto rep = find_deviations(idx, seq, par);
    int64_t span = compute_span(idx);

    int64_t seqm = 0, parm = 0;
    if (cache) {
        seqm = replay_misses(idx, seq.per_proc_order, C).total;
        parm = par.misses->total;
    }

    bool pass = rep.total >= int64_t(n) * k * k;
    if (rep.total > 2 * par.steal_count * span) pass = false;

    std::string notes;
    if (cache) {
        if (2 * (parm - seqm) < int64_t(C) * (k - 1) * n) pass = false;
        // sequential misses frozen once for the canonical points
        static const std::map<std::tuple<int, int, int>, int64_t> frozen = {
            {{2, 2, 4}, 19},
            {{2, 4, 4}, 67},
            {{4, 4, 4}, 131},
        };
        auto it = frozen.find({n, k, C});
        if (it == frozen.end()) {
            notes = "no frozen sequential-miss value for these parameters; clause skipped";
        } else if (seqm > it->second) {
            pass = false;
            notes = "sequential misses exceed the frozen value " + std::to_string(it->second);
        }
    }

    experiment_result r;
    r.name = "amplification";
    r.params = params;
    r.measured = make_measured(rep.total, par.steal_count, span, count_touches(gc.d), seqm, parm);
    r.touch_deviations = rep.touch_deviations();
    r.pass = pass;
    r.notes = notes;
    return r;
}

experiment_result run_branch_thrash_experiment(int t_branches, int n, int C) {
    auto gc = gen_pf_full(t_branches, n, C);
    std::string params = "t=" + std::to_string(t_branches) + " n=" + std::to_string(n) +
                         " C=" + std::to_string(C);

    dag_index idx(gc.d);
    auto seq = run_sequential(gc.d, sched_policy::parent_first);
    run_config rc;
    rc.policy = sched_policy::parent_first;
    rc.procs = int(gc.script_hint->processors.size());
    rc.scr = gc.script_hint;
    rc.cache_capacity = C;
    auto par = run_simulation(gc.d, rc);
    auto rep = find_deviations(idx, seq, par);

    int64_t seqm = replay_misses(idx, seq.per_proc_order, C).total;
    int64_t parm = par.misses->total;

    bool pass = 4 * rep.total >= int64_t(t_branches) * n;
    if (4 * parm < int64_t(C) * t_branches * n) pass = false;
    if (seqm > int64_t(C) + 2 * t_branches + 4) pass = false;

    experiment_result r;
    r.name = "branch-thrash";
    r.params = params;
    r.measured = make_measured(rep.total, par.steal_count, compute_span(idx),
                               count_touches(gc.d), seqm, parm);
    r.touch_deviations = rep.touch_deviations();
    r.pass = pass;
    return r;
}

nlohmann::json experiment_to_json(const experiment_result& r) {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [key, value] : r.measured) m[key] = value;
    return nlohmann::json{
        {"name", r.name},           {"params", r.params},
        {"measured", m},            {"touch_deviations", r.touch_deviations},
        {"pass", r.pass},           {"skipped", r.skipped},
        {"notes", r.notes},
    };
}

std::string experiment_to_csv(const experiment_result& r) {
    static const char* columns[] = {"deviations", "steals",     "span",
                                    "touches",    "seq_misses", "par_misses",
                                    "additional_misses"};
    std::ostringstream out;
    out << "experiment,params,deviations,steals,span,touches,seq_misses,par_misses,"
           "additional_misses,pass\n";
    out << r.name << "," << r.params;
    for (const char* c : columns) out << "," << r.measured.at(c);
    out << "," << (r.skipped ? "skipped" : bool_name(r.pass)) << "\n";
    return out.str();
}

void write_experiment_json(const experiment_result& r, const std::string& path) {
    write_json_atomic(experiment_to_json(r), path);
}

void write_experiment_csv(const experiment_result& r, const std::string& path) {
    write_text_atomic(experiment_to_csv(r), path);
}

} // namespace futsim
