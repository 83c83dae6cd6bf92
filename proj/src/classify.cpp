#include "futsim/classify.hpp"

#include <queue>
#include <unordered_set>

namespace futsim {

namespace {

// Descendants of v over every edge kind, including v itself.
std::unordered_set<node_id> descendants(const dag_index& idx, node_id v) {
    std::unordered_set<node_id> seen{v};
    std::queue<node_id> q;
    q.push(v);
    while (!q.empty()) {
        node_id u = q.front();
        q.pop();
        for (const edge& e : idx.out_edges(u))
            if (seen.insert(e.to).second) q.push(e.to);
    }
    return seen;
}

} // namespace

classification classify(const dag_index& idx, const thread_decomposition& threads) {
    const dag& d = idx.graph();
    classification out;
    out.structured = true;
    out.single_touch = true;
    out.local_touch = true;
    out.single_touch_super_final = d.super_final_mode;

    for (const thread_info& t : threads.threads) {
        if (t.is_main) continue;

        node_id fork = t.spawned_at;
        const edge* cont = idx.out_edge_of_kind(fork, edge_kind::continuation);
        node_id right_child = cont ? cont->to : -1;

        // Touch nodes consuming this thread's results.
        std::vector<node_id> touches;
        for (node_id w : t.nodes)
            for (const edge& e : idx.out_edges(w))
                if (e.kind == edge_kind::touch) touches.push_back(e.to);

        if (touches.empty()) {
            // Cannot happen on a valid dag, but classify defensively.
            out.structured = out.single_touch = out.local_touch = false;
            out.single_touch_super_final = false;
            continue;
        }

        auto under_fork = descendants(idx, fork);
        auto under_right = right_child >= 0 ? descendants(idx, right_child)
                                            : std::unordered_set<node_id>{};

        bool all_parents_under_fork = true;
        bool any_under_right = false;
        for (node_id x : touches) {
            node_id lp = idx.local_parent(x);
            if (lp < 0 || !under_fork.count(lp)) all_parents_under_fork = false;
            if (under_right.count(x)) any_under_right = true;
        }
        bool thread_structured = all_parents_under_fork && any_under_right;
        if (!thread_structured) out.structured = false;

        if (!(thread_structured && touches.size() == 1 && under_right.count(touches[0])))
            out.single_touch = false;

        if (thread_structured) {
            int parent_thread = threads.owner.at(fork);
            for (node_id x : touches)
                if (threads.owner.at(x) != parent_thread) {
                    out.local_touch = false;
                    break;
                }
        } else {
            out.local_touch = false;
        }

        if (out.single_touch_super_final) {
            // Allowed consumer sets: {final}, {x}, {x, final} with x a
            // well-placed single consumer.
            std::vector<node_id> other;
            for (node_id x : touches)
                if (x != d.final) other.push_back(x);
            bool ok;
            if (other.empty()) {
                ok = touches.size() <= 2; // only final (possibly via both slots)
            } else if (other.size() == 1) {
                node_id x = other[0];
                node_id lp = idx.local_parent(x);
                ok = under_right.count(x) && lp >= 0 && under_fork.count(lp);
            } else {
                ok = false;
            }
            if (!ok) out.single_touch_super_final = false;
        }
    }

    if (!out.structured) {
        out.single_touch = false;
        out.local_touch = false;
    }
    return out;
}

classification classify(const dag& d) {
    dag_index idx(d);
    return classify(idx, decompose_threads(idx));
}

} // namespace futsim
