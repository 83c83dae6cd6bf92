#include "futsim/engine.hpp"

#include "futsim/json_io.hpp"
#include "futsim/rng.hpp"
#include "futsim/validate.hpp"

#include <algorithm>
#include <deque>

namespace futsim {

const char* sched_policy_name(sched_policy p) {
    return p == sched_policy::future_first ? "future-first" : "parent-first";
}

sched_policy sched_policy_from_name(const std::string& s) {
    if (s == "future-first") return sched_policy::future_first;
    if (s == "parent-first") return sched_policy::parent_first;
    throw std::runtime_error("unknown policy: " + s);
}

namespace {

struct proc_state {
    std::deque<node_id> dq;               // bottom = back, top = front
    std::optional<node_id> current;
    const std::vector<directive>* dirs = nullptr;
    size_t dir_idx = 0;
    int64_t consumed = 0;                 // progress inside the current directive
    bool asleep_forever = false;
    std::vector<node_id> exec_order;
};

class sim {
public:
    sim(const dag& d, const run_config& cfg) : d_(d), idx_(d), cfg_(cfg) {
        if (cfg.procs < 1) throw std::runtime_error("need at least one processor");
        uint64_t seed = cfg.scr ? cfg.scr->random_victim_seed : cfg.victim_seed;
        rng_.emplace(seed);
        procs_.resize(cfg.procs);
        if (cfg.scr)
            for (const proc_script& ps : cfg.scr->processors) {
                if (ps.id < 0 || ps.id >= cfg.procs)
                    throw script_error("script addresses processor " + std::to_string(ps.id) +
                                       " but the run has " + std::to_string(cfg.procs));
                procs_[ps.id].dirs = &ps.directives;
            }
        remaining_in.reserve(d.nodes.size());
        for (const node& n : d.nodes)
            remaining_in[n.id] = static_cast<int>(idx_.in_edges(n.id).size());
        procs_[0].current = d.root;

        res_.tr.dag_hash = dag_hash(d);
        res_.tr.policy = sched_policy_name(cfg.policy);
        res_.tr.procs = cfg.procs;
        res_.tr.script_hash = cfg.scr ? script_hash(*cfg.scr) : script_hash_none();
        res_.tr.victim_seed = seed;
    }

    run_result run() {
        int64_t step = 0;
        while (executed_.size() < d_.nodes.size()) {
            ++step;
            if (step > cfg_.max_steps)
                throw simulation_error("no finish after " + std::to_string(cfg_.max_steps) +
                                           " steps",
                                       ready_frontier());
            step_progress_ = false;
            finite_sleep_pending_ = false;
            for (int p = 0; p < cfg_.procs; ++p) take_turn(step, p);
            if (!step_progress_ && !finite_sleep_pending_ && nobody_holds_work() &&
                !default_thief_can_reach_work())
                throw simulation_error("stalled at step " + std::to_string(step), ready_frontier());
        }
        res_.total_steps = step;
        res_.tr.total_steps = step;
        res_.tr.steal_count = res_.steal_count;
        res_.per_proc_order.resize(cfg_.procs);
        for (int p = 0; p < cfg_.procs; ++p) res_.per_proc_order[p] = procs_[p].exec_order;
        if (cfg_.cache_capacity) {
            res_.misses = replay_misses(idx_, res_.per_proc_order, *cfg_.cache_capacity);
            res_.tr.misses = res_.misses->total;
        }
        return std::move(res_);
    }

private:
    const dag& d_;
    dag_index idx_;
    run_config cfg_;
    std::optional<splitmix64> rng_;
    std::vector<proc_state> procs_;
    std::unordered_map<node_id, int> remaining_in;
    std::unordered_map<node_id, bool> executed_;
    run_result res_;
    bool step_progress_ = false;
    bool finite_sleep_pending_ = false;

    bool is_executed(node_id v) const {
        auto it = executed_.find(v);
        return it != executed_.end() && it->second;
    }

    void event(int64_t step, int p, trace_ev ev, node_id n = -1, int victim = -1) {
        res_.tr.events.push_back({step, p, ev, n, victim});
    }

    // One action for processor p at the given step. Directives of zero
    // length are skipped on the spot, so a step never gets eaten by
    // bookkeeping entries like wake or execute{0}.
    void take_turn(int64_t step, int p) {
        proc_state& ps = procs_[p];
        if (ps.asleep_forever) return;
        while (ps.dirs && ps.dir_idx < ps.dirs->size()) {
            const directive& d = (*ps.dirs)[ps.dir_idx];
            switch (d.o) {
            case op::wake:
                ps.dir_idx++;
                ps.consumed = 0;
                continue;
            case op::execute:
                if (ps.consumed >= d.times) {
                    ps.dir_idx++;
                    ps.consumed = 0;
                    continue;
                }
                ps.consumed++;
                work_action(step, p);
                return;
            case op::sleep:
                if (ps.consumed >= d.steps) {
                    ps.dir_idx++;
                    ps.consumed = 0;
                    continue;
                }
                ps.consumed++;
                finite_sleep_pending_ = true;
                return;
            case op::sleep_until:
                if (is_executed(d.node)) {
                    ps.dir_idx++;
                    ps.consumed = 0;
                    continue;
                }
                return;
            case op::sleep_forever:
                ps.asleep_forever = true;
                return;
            case op::steal_from:
                ps.dir_idx++;
                ps.consumed = 0;
                if (ps.current)
                    throw script_error("processor " + std::to_string(p) +
                                       " told to steal while holding a node");
                if (d.victim < 0 || d.victim >= cfg_.procs || d.victim == p)
                    throw script_error("bad steal victim " + std::to_string(d.victim));
                steal_attempt(step, p, d.victim);
                return;
            case op::pop_own:
                ps.dir_idx++;
                ps.consumed = 0;
                if (ps.current)
                    throw script_error("processor " + std::to_string(p) +
                                       " told to pop while holding a node");
                if (ps.dq.empty())
                    throw script_error("processor " + std::to_string(p) +
                                       " told to pop an empty deque");
                pop_and_execute(step, p);
                return;
            }
        }
        default_action(step, p);
    }

    // Work step: run the node in hand, else pull from the own deque bottom.
    void work_action(int64_t step, int p) {
        proc_state& ps = procs_[p];
        if (ps.current) {
            execute(step, p, *ps.current);
        } else if (!ps.dq.empty()) {
            pop_and_execute(step, p);
        } else {
            event(step, p, trace_ev::idle);
        }
    }

    void default_action(int64_t step, int p) {
        proc_state& ps = procs_[p];
        if (ps.current) {
            execute(step, p, *ps.current);
        } else if (!ps.dq.empty()) {
            pop_and_execute(step, p);
        } else if (cfg_.procs > 1) {
            uint64_t pick = rng_->next_below(static_cast<uint64_t>(cfg_.procs - 1));
            int victim = static_cast<int>(pick);
            if (victim >= p) victim++;
            steal_attempt(step, p, victim);
        }
        // A lone processor with nothing to do just waits.
    }

    void pop_and_execute(int64_t step, int p) {
        proc_state& ps = procs_[p];
        node_id v = ps.dq.back();
        ps.dq.pop_back();
        event(step, p, trace_ev::popped, v);
        execute(step, p, v);
    }

    void steal_attempt(int64_t step, int p, int victim) {
        proc_state& vs = procs_[victim];
        if (vs.dq.empty()) {
            event(step, p, trace_ev::failed_steal, -1, victim);
            return;
        }
        node_id v = vs.dq.front();
        vs.dq.pop_front();
        procs_[p].current = v;
        res_.steal_count++;
        step_progress_ = true;
        event(step, p, trace_ev::stole, v, victim);
    }

    void execute(int64_t step, int p, node_id v) {
        proc_state& ps = procs_[p];
        ps.current.reset();
        executed_[v] = true;
        ps.exec_order.push_back(v);
        res_.order.push_back(v);
        res_.executed_by[v] = p;
        step_progress_ = true;
        event(step, p, trace_ev::executed, v);

        if (idx_.is_fork(v)) {
            const edge* cont = idx_.out_edge_of_kind(v, edge_kind::continuation);
            const edge* fut = idx_.out_edge_of_kind(v, edge_kind::future);
            remaining_in[cont->to]--;
            remaining_in[fut->to]--;
            if (cfg_.policy == sched_policy::future_first) {
                ps.dq.push_back(cont->to);
                ps.current = fut->to;
            } else {
                ps.dq.push_back(fut->to);
                ps.current = cont->to;
            }
            return;
        }

        // Collect children this execution just made ready, then keep the
        // best one in hand and shelve the rest so they stay claimable.
        // Continuing into the own-thread successor mirrors what a sequential
        // run would do; waking touches come after that, the finale last.
        std::vector<std::pair<int, node_id>> ready;
        for (const edge& e : idx_.out_edges(v))
            if (--remaining_in[e.to] == 0) {
                int rank = e.kind == edge_kind::continuation ? 0 : (e.to == d_.final ? 2 : 1);
                ready.push_back({rank, e.to});
            }
        if (ready.empty()) return;
        std::sort(ready.begin(), ready.end());
        ps.current = ready.front().second;
        for (size_t i = 1; i < ready.size(); ++i) ps.dq.push_back(ready[i].second);
    }

    bool nobody_holds_work() const {
        for (const proc_state& ps : procs_)
            if (ps.current) return false;
        return true;
    }

    // True when some processor that is still willing to steal (scripted
    // steal or default mode) could eventually reach a non-empty deque.
    bool default_thief_can_reach_work() const {
        bool any_work = false;
        for (const proc_state& ps : procs_)
            if (!ps.dq.empty()) any_work = true;
        if (!any_work) return false;
        for (int p = 0; p < cfg_.procs; ++p) {
            const proc_state& ps = procs_[p];
            if (ps.asleep_forever) continue;
            if (!ps.dirs || ps.dir_idx >= ps.dirs->size()) return true; // default mode
            if ((*ps.dirs)[ps.dir_idx].o == op::steal_from) return true;
        }
        return false;
    }

    std::vector<node_id> ready_frontier() const {
        std::vector<node_id> out;
        for (const node& n : d_.nodes)
            if (!is_executed(n.id) && remaining_in.at(n.id) == 0) out.push_back(n.id);
        std::sort(out.begin(), out.end());
        return out;
    }
};

} // namespace

run_result run_simulation(const dag& d, const run_config& cfg) {
    require_valid(d);
    return sim(d, cfg).run();
}

run_result run_sequential(const dag& d, sched_policy policy) {
    run_config cfg;
    cfg.policy = policy;
    cfg.procs = 1;
    return run_simulation(d, cfg);
}

} // namespace futsim
