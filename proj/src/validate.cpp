#include "futsim/validate.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace futsim {

namespace {

struct checker {
    const dag& d;
    validation_report rep;

    void add(const std::string& rule, node_id where, const std::string& msg) {
        rep.issues.push_back({rule, msg, where});
    }

    // Counts in/out edges per kind without needing a full index.
    struct degree {
        int in_cont = 0, in_fut = 0, in_touch = 0;
        int out_cont = 0, out_fut = 0, out_touch = 0;
        int in() const { return in_cont + in_fut + in_touch; }
        int out() const { return out_cont + out_fut + out_touch; }
    };

    void run() {
        std::set<node_id> ids;
        bool ids_ok = true;
        for (const node& n : d.nodes) {
            if (!ids.insert(n.id).second) {
                add("node-degree", n.id, "duplicate node id");
                ids_ok = false;
            }
        }
        if (!ids.count(d.root)) {
            add("root-in-degree", d.root, "root id does not name a node");
            ids_ok = false;
        }
        if (!ids.count(d.final)) {
            add("final-out-degree", d.final, "final id does not name a node");
            ids_ok = false;
        }
        for (const edge& e : d.edges) {
            if (!ids.count(e.from) || !ids.count(e.to)) {
                add("node-degree", e.from, "edge endpoint does not name a node");
                ids_ok = false;
            }
        }
        if (!ids_ok) return; // degree/reachability math would be garbage

        std::unordered_map<node_id, degree> deg;
        for (const node& n : d.nodes) deg[n.id];
        for (const edge& e : d.edges) {
            switch (e.kind) {
            case edge_kind::continuation:
                deg[e.from].out_cont++;
                deg[e.to].in_cont++;
                break;
            case edge_kind::future:
                deg[e.from].out_fut++;
                deg[e.to].in_fut++;
                break;
            case edge_kind::touch:
                deg[e.from].out_touch++;
                deg[e.to].in_touch++;
                break;
            }
        }

        check_acyclic();
        check_reachable();

        for (const node& n : d.nodes) {
            const degree& g = deg.at(n.id);
            check_degrees(n.id, g);
            check_out_kinds(n.id, g);
            check_in_kinds(n.id, g);
        }

        check_forks(deg);
        check_threads(deg);
    }

    void check_acyclic() {
        std::unordered_map<node_id, int> indeg;
        std::unordered_map<node_id, std::vector<node_id>> adj;
        for (const node& n : d.nodes) indeg[n.id];
        for (const edge& e : d.edges) {
            adj[e.from].push_back(e.to);
            indeg[e.to]++;
        }
        std::queue<node_id> q;
        for (auto& [v, k] : indeg)
            if (k == 0) q.push(v);
        size_t seen = 0;
        while (!q.empty()) {
            node_id v = q.front();
            q.pop();
            seen++;
            for (node_id w : adj[v])
                if (--indeg[w] == 0) q.push(w);
        }
        if (seen != d.nodes.size())
            add("acyclic", -1, "graph contains a cycle");
    }

    void check_reachable() {
        std::unordered_map<node_id, std::vector<node_id>> adj;
        for (const edge& e : d.edges) adj[e.from].push_back(e.to);
        std::set<node_id> seen;
        std::queue<node_id> q;
        q.push(d.root);
        seen.insert(d.root);
        while (!q.empty()) {
            node_id v = q.front();
            q.pop();
            for (node_id w : adj[v])
                if (seen.insert(w).second) q.push(w);
        }
        for (const node& n : d.nodes)
            if (!seen.count(n.id))
                add("unreachable", n.id, "node not reachable from root");
    }

    void check_degrees(node_id v, const degree& g) {
        if (v == d.root) {
            if (g.in() != 0)
                add("root-in-degree", v, "root must have in-degree 0");
        } else if (g.in() < 1 || g.in() > 2) {
            if (!(v == d.final && d.super_final_mode))
                add("node-degree", v,
                    "in-degree must be 1 or 2, got " + std::to_string(g.in()));
        }
        if (v == d.final) {
            if (g.out() != 0)
                add("final-out-degree", v, "final must have out-degree 0");
        } else if (g.out() < 1 || g.out() > 2) {
            add("node-degree", v,
                "out-degree must be 1 or 2, got " + std::to_string(g.out()));
        }
        if (v != d.root && g.in() == 0)
            add("root-in-degree", v, "only the root may have in-degree 0");
        if (v != d.final && g.out() == 0)
            add("final-out-degree", v, "only the final node may have out-degree 0");
    }

    void check_out_kinds(node_id v, const degree& g) {
        if (v == d.final) return;
        bool ok = false;
        if (g.out() == 1)
            ok = g.out_cont == 1 || g.out_touch == 1;
        else if (g.out() == 2) {
            ok = (g.out_cont == 1 && g.out_fut == 1)     // fork
                 || (g.out_cont == 1 && g.out_touch == 1) // touched mid-thread value
                 || (g.out_touch == 2 && d.super_final_mode);
        }
        if (!ok)
            add("edge-kinds", v, "invalid out-edge kind combination");
    }

    void check_in_kinds(node_id v, const degree& g) {
        if (v == d.root) return;
        if (v == d.final && d.super_final_mode) {
            if (g.in_cont != 1 || g.in_fut != 0)
                add("super-final-in-degree", v,
                    "terminal barrier needs exactly one continuation in-edge and only touch edges besides it");
            return;
        }
        bool ok = false;
        if (g.in() == 1)
            ok = g.in_cont == 1 || g.in_fut == 1;
        else if (g.in() == 2)
            ok = g.in_cont == 1 && g.in_touch == 1;
        if (!ok)
            add("edge-kinds", v, "invalid in-edge kind combination");
        if (g.in_touch >= 1 && g.in_cont != 1 && !(v == d.final && d.super_final_mode))
            add("touch-target", v, "touch target needs a local (continuation) parent");
    }

    void check_forks(const std::unordered_map<node_id, degree>& deg) {
        for (const edge& e : d.edges) {
            if (e.kind != edge_kind::future && e.kind != edge_kind::continuation) continue;
            const degree& g = deg.at(e.from);
            bool is_fork = g.out_cont == 1 && g.out_fut == 1;
            if (!is_fork) continue;
            const degree& child = deg.at(e.to);
            if (child.in() != 1)
                add("fork-child-is-touch", e.to,
                    "fork child must have in-degree 1 (it cannot be a touch)");
        }
    }

    void check_threads(const std::unordered_map<node_id, degree>& deg) {
        // Thread starts: root plus every future-edge target. Walk each chain
        // of continuation edges; the last node of a spawned thread must hand
        // its value over a touch edge.
        std::unordered_map<node_id, node_id> cont_next;
        for (const edge& e : d.edges)
            if (e.kind == edge_kind::continuation) {
                if (cont_next.count(e.from)) return; // degree checks already flagged
                cont_next[e.from] = e.to;
            }
        std::vector<std::pair<node_id, bool>> starts; // (first node, is_main)
        starts.push_back({d.root, true});
        for (const edge& e : d.edges)
            if (e.kind == edge_kind::future) {
                starts.push_back({e.to, false});
                const degree& g = deg.at(e.to);
                if (g.in() != 1 || g.in_fut != 1)
                    add("thread-first-future", e.to,
                        "spawned thread must begin at a node whose only in-edge is the future edge");
            }
        std::set<node_id> visited;
        for (auto [start, is_main] : starts) {
            node_id v = start;
            while (true) {
                if (!visited.insert(v).second) break; // shared chain: cycle or bad structure, flagged elsewhere
                auto it = cont_next.find(v);
                if (it == cont_next.end()) break;
                v = it->second;
            }
            const degree& g = deg.at(v);
            if (is_main) {
                if (v != d.final)
                    add("thread-last-edge", v,
                        "main thread must end at the final node");
            } else {
                bool ok = g.out() >= 1 && g.out_cont == 0 && g.out_fut == 0 &&
                          (g.out_touch == 1 || (g.out_touch == 2 && d.super_final_mode));
                if (!ok)
                    add("thread-last-edge", v,
                        "spawned thread must end by touching exactly one consumer");
            }
        }
    }
};

} // namespace

std::string validation_report::to_string() const {
    std::ostringstream os;
    for (const auto& i : issues) {
        os << i.rule;
        if (i.where >= 0) os << " (node " << i.where << ")";
        os << ": " << i.message << "\n";
    }
    return os.str();
}

validation_report validate(const dag& d) {
    checker c{d, {}};
    c.run();
    return c.rep;
}

void require_valid(const dag& d) {
    validation_report r = validate(d);
    if (!r.ok()) throw invalid_dag_error("invalid dag:\n" + r.to_string());
}

} // namespace futsim
