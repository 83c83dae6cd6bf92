#include "futsim/generators.hpp"

#include "futsim/engine.hpp"
#include "futsim/rng.hpp"
#include "futsim/validate.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace futsim {

namespace {

// Small append-only dag assembler. Node ids equal vector positions.
struct builder {
    dag d;

    node_id add(int64_t block = 0, bool real = false) {
        node_id id = static_cast<node_id>(d.nodes.size());
        d.nodes.push_back({id, block, real});
        return id;
    }
    void cont(node_id a, node_id b) { d.edges.push_back({a, b, edge_kind::continuation}); }
    void fut(node_id a, node_id b) { d.edges.push_back({a, b, edge_kind::future}); }
    void touch(node_id a, node_id b) { d.edges.push_back({a, b, edge_kind::touch}); }
    void mark(const std::string& name, node_id v) { d.landmarks[name] = v; }
};

std::string num(int64_t v) { return std::to_string(v); }

bool chance(splitmix64& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return static_cast<double>(rng.next() >> 11) * 0x1.0p-53 < p;
}

} // namespace

const char* discipline_name(discipline k) {
    switch (k) {
    case discipline::single_touch: return "single-touch";
    case discipline::local_touch: return "local-touch";
    case discipline::single_touch_super_final: return "single-touch-super-final";
    }
    return "?";
}

discipline discipline_from_name(const std::string& s) {
    if (s == "single-touch") return discipline::single_touch;
    if (s == "local-touch") return discipline::local_touch;
    if (s == "single-touch-super-final") return discipline::single_touch_super_final;
    throw std::invalid_argument("unknown discipline: " + s);
}

generated_case gen_fork_join(int depth) {
    if (depth < 0) throw std::invalid_argument("gen_fork_join: depth must be >= 0");
    builder b;
    if (depth == 0) {
        node_id r = b.add();
        node_id f = b.add();
        b.cont(r, f);
        b.d.root = r;
        b.d.final = f;
    } else {
        // Returns (entry, exit) of a balanced spawn/sync subtree.
        std::function<std::pair<node_id, node_id>(int)> build =
            [&](int d) -> std::pair<node_id, node_id> {
            if (d == 0) {
                node_id v = b.add();
                return {v, v};
            }
            node_id fork = b.add();
            auto left = build(d - 1);
            auto right = build(d - 1);
            node_id join = b.add(0, true);
            b.fut(fork, left.first);
            b.cont(fork, right.first);
            b.cont(right.second, join);
            b.touch(left.second, join);
            return {fork, join};
        };
        auto [r, f] = build(depth);
        b.d.root = r;
        b.d.final = f;
    }
    require_valid(b.d);
    generated_case gc;
    gc.d = std::move(b.d);
    gc.params = "depth=" + num(depth);
    return gc;
}

generated_case gen_ff_block(int k, bool cache, int C) {
    if (k < 1) throw std::invalid_argument("gen_ff_block: k must be >= 1");
    if (cache && C < 2) throw std::invalid_argument("gen_ff_block: C must be >= 2 when cache is on");
    int L = cache ? C : 1;
    builder b;

    node_id v = b.add();
    node_id w = b.add();
    std::vector<node_id> u(k), x(k), s(k);
    std::vector<std::vector<node_id>> Y(k), Z(k);
    for (int i = 0; i < k; i++) {
        u[i] = b.add(cache ? C + 1 : 0);
        x[i] = b.add(cache ? C + 1 : 0);
        Y[i].resize(L);
        for (int q = 0; q < L; q++) Y[i][q] = b.add(cache ? q + 1 : 0);
        s[i] = b.add(cache ? C : 0, true);
        Z[i].resize(L);
        for (int q = 0; q < L; q++) Z[i][q] = b.add(cache ? C - q : 0);
    }
    node_id bb = b.add();
    node_id g = b.add();
    node_id f = b.add();

    b.fut(v, w);
    b.cont(v, u[0]);
    for (int i = 0; i < k; i++) {
        b.fut(u[i], x[i]);
        b.cont(u[i], i + 1 < k ? u[i + 1] : bb);
        b.cont(x[i], Y[i][0]);
        for (int q = 0; q + 1 < L; q++) b.cont(Y[i][q], Y[i][q + 1]);
        b.cont(Y[i][L - 1], s[i]);
        b.cont(s[i], Z[i][0]);
        for (int q = 0; q + 1 < L; q++) b.cont(Z[i][q], Z[i][q + 1]);
        if (i + 1 < k) b.touch(Z[i][L - 1], s[i + 1]);
    }
    b.touch(w, s[0]);
    b.touch(Z[k - 1][L - 1], g);
    b.cont(bb, g);
    b.cont(g, f);
    b.d.root = v;
    b.d.final = f;

    b.mark("v", v);
    b.mark("w", w);
    b.mark("b", bb);
    b.mark("g", g);
    b.mark("f", f);
    for (int i = 0; i < k; i++) {
        std::string si = num(i + 1);
        b.mark("u_" + si, u[i]);
        b.mark("x_" + si, x[i]);
        b.mark("s_" + si, s[i]);
        b.mark("Y_" + si + "_first", Y[i][0]);
        b.mark("Y_" + si + "_last", Y[i][L - 1]);
        b.mark("Z_" + si + "_first", Z[i][0]);
        b.mark("Z_" + si + "_last", Z[i][L - 1]);
        if (L == 1) {
            b.mark("y_" + si, Y[i][0]);
            b.mark("z_" + si, Z[i][0]);
        } else {
            for (int q = 0; q < L; q++) {
                b.mark("y_" + si + "_" + num(q + 1), Y[i][q]);
                b.mark("z_" + si + "_" + num(q + 1), Z[i][q]);
            }
        }
    }

    require_valid(b.d);

    // Two processors: the thief takes the top chain at step 2 and burns through
    // every producer body, leaving the owner to hit all k touches cold.
    script sc;
    sc.random_victim_seed = 0;
    sc.processors.push_back({0, {d_execute(1), d_sleep_until(bb)}});
    sc.processors.push_back(
        {1, {d_sleep(1), d_steal_from(0), d_execute(static_cast<int64_t>(k) * (2 + L) + 1),
             d_sleep_forever()}});

    generated_case gc;
    gc.d = std::move(b.d);
    gc.script_hint = std::move(sc);
    std::ostringstream ps;
    ps << "k=" << k << " cache=" << (cache ? "true" : "false");
    if (cache) ps << " C=" << C;
    gc.params = ps.str();
    return gc;
}

namespace {

// One spine of k producer/consumer blocks plus the join chain that drains
// them. Shared by the amplified chain and by each leaf of the full tree.
struct amp_refs {
    node_id entry = -1; // r_1
    node_id exit = -1;  // j_k
    node_id t0 = -1;
    std::vector<node_id> r, v, w, bb, g, j;
};

amp_refs build_amp_chain(builder& b, int k, bool cache, int C, const std::string& pre) {
    int L = cache ? C : 1;
    amp_refs a;
    a.r.resize(k);
    a.v.resize(k);
    a.w.resize(k);
    a.bb.resize(k);
    a.g.resize(k);
    a.j.resize(k);

    for (int i = 0; i < k; i++) a.r[i] = b.add();
    a.t0 = b.add();
    for (int i = 0; i < k; i++) a.j[i] = b.add();

    for (int i = 0; i < k; i++) {
        std::string bi = num(i + 1);
        a.v[i] = b.add();
        a.w[i] = b.add();
        std::vector<node_id> u(k), x(k), s(k);
        std::vector<std::vector<node_id>> Y(k), Z(k);
        for (int q = 0; q < k; q++) {
            u[q] = b.add(cache ? C + 1 : 0);
            x[q] = b.add(cache ? C + 1 : 0);
            Y[q].resize(L);
            for (int p = 0; p < L; p++) Y[q][p] = b.add(cache ? p + 1 : 0);
            s[q] = b.add(cache ? C : 0, true);
            Z[q].resize(L);
            for (int p = 0; p < L; p++) Z[q][p] = b.add(cache ? C - p : 0);
        }
        a.bb[i] = b.add();
        a.g[i] = b.add();

        b.fut(a.v[i], a.w[i]);
        b.cont(a.v[i], u[0]);
        for (int q = 0; q < k; q++) {
            b.fut(u[q], x[q]);
            b.cont(u[q], q + 1 < k ? u[q + 1] : a.bb[i]);
            b.cont(x[q], Y[q][0]);
            for (int p = 0; p + 1 < L; p++) b.cont(Y[q][p], Y[q][p + 1]);
            b.cont(Y[q][L - 1], s[q]);
            b.cont(s[q], Z[q][0]);
            for (int p = 0; p + 1 < L; p++) b.cont(Z[q][p], Z[q][p + 1]);
            if (q + 1 < k) b.touch(Z[q][L - 1], s[q + 1]);
        }
        b.touch(a.w[i], s[0]);
        b.touch(Z[k - 1][L - 1], a.g[i]);
        b.cont(a.bb[i], a.g[i]);
        b.touch(a.g[i], a.j[i]);

        b.mark(pre + "v_" + bi, a.v[i]);
        b.mark(pre + "w_" + bi, a.w[i]);
        b.mark(pre + "b_" + bi, a.bb[i]);
        b.mark(pre + "g_" + bi, a.g[i]);
        for (int q = 0; q < k; q++) {
            std::string sq = bi + "_" + num(q + 1);
            b.mark(pre + "u_" + sq, u[q]);
            b.mark(pre + "x_" + sq, x[q]);
            b.mark(pre + "s_" + sq, s[q]);
        }
    }
    for (int i = 0; i < k; i++) {
        b.fut(a.r[i], a.v[i]);
        b.cont(a.r[i], i + 1 < k ? a.r[i + 1] : a.t0);
        b.mark(pre + "r_" + num(i + 1), a.r[i]);
        b.mark(pre + "j_" + num(i + 1), a.j[i]);
    }
    b.cont(a.t0, a.j[0]);
    for (int i = 0; i + 1 < k; i++) b.cont(a.j[i], a.j[i + 1]);
    b.mark(pre + "t0", a.t0);

    a.entry = a.r[0];
    a.exit = a.j[k - 1];
    return a;
}

// Three-processor choreography over one amplified chain. The two owners
// alternate block forks between themselves, the solo processor strips every
// producer body ahead of the touches, and whichever owner does not own the
// last block grabs t0 early so the join chain cannot be dived into.
void append_amp_directives(const amp_refs& a, int k, int L, int idA, int idB,
                           int64_t owner_k_tail, std::vector<directive>& dA,
                           std::vector<directive>& dB, std::vector<directive>& dS) {
    int64_t solo_len = static_cast<int64_t>(k) * (2 + L) + 1;
    int64_t owner_len = static_cast<int64_t>(k) * (1 + L) + 2;

    for (int jb = 1; jb <= k; jb++) {
        bool is_a = (jb % 2) == 1;
        std::vector<directive>& D = is_a ? dA : dB;
        int other = is_a ? idB : idA;
        if (jb == 1) {
            D.push_back(d_execute(2)); // r_1 then its block fork
        } else {
            D.push_back(d_sleep_until(a.v[jb - 2]));
            D.push_back(d_steal_from(other));
            D.push_back(d_execute(2)); // r_jb then its block fork
        }
        D.push_back(d_sleep_until(a.bb[jb - 1]));
        D.push_back(d_execute(owner_len)); // w, then every touch and value chain, then g
    }

    bool last_is_a = (k % 2) == 1;
    std::vector<directive>& dK = last_is_a ? dA : dB;
    std::vector<directive>& dP = last_is_a ? dB : dA;
    int idK = last_is_a ? idA : idB;
    dP.push_back(d_sleep_until(a.v[k - 1]));
    dP.push_back(d_steal_from(idK)); // take t0 before the owner digs down to it
    dP.push_back(d_execute(k));      // t0 and the first k-1 joins
    dP.push_back(d_sleep_forever());
    dK.push_back(d_execute(owner_k_tail)); // last join and whatever follows it
    dK.push_back(d_sleep_forever());

    for (int jb = 1; jb <= k; jb++) {
        node_id gate = (jb < k) ? a.r[jb] : a.t0;
        int victim = ((jb % 2) == 1) ? idA : idB;
        dS.push_back(d_sleep_until(gate));
        dS.push_back(d_steal_from(victim));
        dS.push_back(d_execute(solo_len)); // producer bodies of one block, then its b
    }
    dS.push_back(d_sleep_forever());
}

} // namespace

generated_case gen_ff_amplified(int k) {
    if (k < 1) throw std::invalid_argument("gen_ff_amplified: k must be >= 1");
    builder b;
    amp_refs a = build_amp_chain(b, k, false, 0, "");
    node_id f = b.add();
    b.cont(a.exit, f);
    b.mark("f", f);
    b.d.root = a.entry;
    b.d.final = f;
    require_valid(b.d);

    script sc;
    sc.random_victim_seed = 0;
    std::vector<directive> dA, dB, dS;
    append_amp_directives(a, k, 1, 0, 1, 2, dA, dB, dS);
    sc.processors.push_back({0, std::move(dA)});
    sc.processors.push_back({1, std::move(dB)});
    sc.processors.push_back({2, std::move(dS)});

    generated_case gc;
    gc.d = std::move(b.d);
    gc.script_hint = std::move(sc);
    gc.params = "k=" + num(k);
    return gc;
}

generated_case gen_ff_full(int n, int k, bool cache, int C) {
    if (n < 1 || (n & (n - 1)) != 0)
        throw std::invalid_argument("gen_ff_full: n must be a power of two");
    if (k < 1) throw std::invalid_argument("gen_ff_full: k must be >= 1");
    if (cache && C < 2) throw std::invalid_argument("gen_ff_full: C must be >= 2 when cache is on");

    builder b;
    struct tnode {
        node_id entry = -1, exit = -1;
        int leaf = -1, leftmost = -1;
        tnode *l = nullptr, *r = nullptr;
    };
    std::deque<tnode> pool;
    std::vector<amp_refs> leaves;
    int tree_forks = 0;

    std::function<tnode*(int)> build = [&](int depth) -> tnode* {
        pool.push_back({});
        tnode* t = &pool.back();
        if (depth == 0) {
            int i = static_cast<int>(leaves.size());
            amp_refs a = build_amp_chain(b, k, cache, C, "S" + num(i + 1) + "_");
            b.mark("S_" + num(i + 1), a.entry);
            t->entry = a.entry;
            t->exit = a.exit;
            t->leaf = i;
            t->leftmost = i;
            leaves.push_back(a);
            return t;
        }
        int fi = ++tree_forks;
        node_id tau = b.add();
        t->l = build(depth - 1);
        t->r = build(depth - 1);
        node_id J = b.add();
        b.fut(tau, t->l->entry);
        b.cont(tau, t->r->entry);
        b.cont(t->r->exit, J);
        b.touch(t->l->exit, J);
        b.mark("T_" + num(fi), tau);
        b.mark("J_" + num(fi), J);
        t->entry = tau;
        t->exit = J;
        t->leftmost = t->l->leftmost;
        return t;
    };

    int D = 0;
    while ((1 << D) < n) D++;
    tnode* root = build(D);
    node_id f = b.add();
    b.cont(root->exit, f);
    b.mark("f", f);
    b.d.root = root->entry;
    b.d.final = f;
    require_valid(b.d);

    // Each non-first chain owner steals its subtree head off the spine above
    // it; thieves of one spine are gated on each other so the pushes and the
    // steals pair up in order.
    struct nav_info {
        node_id gate = -1;
        int victim = -1;
        int dive = 0;
        node_id clear = -1;
    };
    std::vector<nav_info> nav(n);
    std::function<void(tnode*, int)> plan = [&](tnode* sub, int a) {
        tnode* cur = sub;
        node_id prev = sub->entry;
        int dive = 0;
        while (cur->leaf < 0) {
            int mid = cur->r->leftmost;
            nav[mid].gate = prev;
            nav[mid].victim = 3 * a;
            prev = cur->r->entry;
            plan(cur->r, mid);
            dive++;
            cur = cur->l;
        }
        nav[a].dive = dive;
        nav[a].clear = dive > 0 ? prev : -1;
    };
    plan(root, 0);

    int64_t big = static_cast<int64_t>(b.d.nodes.size()) + 64;
    int L = cache ? C : 1;
    script sc;
    sc.random_victim_seed = 0;
    sc.processors.resize(3 * n);
    for (int a = 0; a < n; a++) {
        std::vector<directive> dA, dB, dS;
        if (a > 0) {
            dA.push_back(d_sleep_until(nav[a].gate));
            dA.push_back(d_steal_from(nav[a].victim));
        }
        if (nav[a].dive > 0) dA.push_back(d_execute(nav[a].dive));
        if (nav[a].clear >= 0) dB.push_back(d_sleep_until(nav[a].clear));
        append_amp_directives(leaves[a], k, L, 3 * a, 3 * a + 1, big, dA, dB, dS);
        sc.processors[3 * a] = {3 * a, std::move(dA)};
        sc.processors[3 * a + 1] = {3 * a + 1, std::move(dB)};
        sc.processors[3 * a + 2] = {3 * a + 2, std::move(dS)};
    }

    generated_case gc;
    gc.d = std::move(b.d);
    gc.script_hint = std::move(sc);
    std::ostringstream ps;
    ps << "n=" << n << " k=" << k << " cache=" << (cache ? "true" : "false");
    if (cache) ps << " C=" << C;
    gc.params = ps.str();
    return gc;
}

namespace {

// Alternating fork/touch prologue of even length k, then a chain of n value
// producers whose consumers sit past a touch that the prologue parity
// controls. The pass-through node before that touch keeps the last producer
// fork from feeding it directly.
generated_case build_parity_family(int k, int n, int C, bool cascade_names) {
    builder b;
    node_id r = b.add();
    std::vector<node_id> s(k + 1), u(k), w(k), v(k);
    for (int i = 0; i <= k; i++) s[i] = b.add();
    for (int i = 0; i < k; i++) {
        u[i] = b.add();
        w[i] = b.add();
        v[i] = b.add(0, true);
    }
    node_id u4 = b.add();
    std::vector<node_id> x(n), y(n);
    std::vector<std::vector<node_id>> z(n);
    for (int i = 0; i < n; i++) {
        x[i] = b.add(1);
        z[i].resize(C);
        for (int q = 0; q < C; q++) z[i][q] = b.add(q + 1);
        y[i] = b.add(C + 1);
    }
    node_id buf = b.add();
    node_id vt = b.add(0, true);
    node_id f = b.add();

    b.fut(r, s[0]);
    b.cont(r, u[0]);
    for (int i = 0; i < k; i++) {
        b.fut(u[i], s[i + 1]);
        b.cont(u[i], w[i]);
        b.cont(w[i], v[i]);
        b.touch(s[i], v[i]);
        b.cont(v[i], i + 1 < k ? u[i + 1] : u4);
    }
    b.cont(u4, x[0]);
    for (int i = 0; i < n; i++) {
        b.fut(x[i], z[i][0]);
        for (int q = 0; q + 1 < C; q++) b.cont(z[i][q], z[i][q + 1]);
        b.touch(z[i][C - 1], y[i]);
        if (i + 1 < n) b.cont(x[i], x[i + 1]);
    }
    b.cont(x[n - 1], buf);
    b.cont(buf, vt);
    b.touch(s[k], vt);
    b.cont(vt, y[n - 1]);
    for (int i = n - 1; i > 0; i--) b.cont(y[i], y[i - 1]);
    b.cont(y[0], f);
    b.d.root = r;
    b.d.final = f;

    if (cascade_names) {
        b.mark("pro_r", r);
        b.mark("pro_u1", u[0]);
        b.mark("pro_w1", w[0]);
        b.mark("pro_v1", v[0]);
        b.mark("pro_s1", s[0]);
        b.mark("pro_s2", s[1]);
        b.mark("u_1", u[1]);
        b.mark("u_2", w[1]);
        b.mark("u_3", v[1]);
        b.mark("u_4", u4);
        b.mark("s", s[2]);
    } else {
        b.mark("r", r);
        for (int i = 0; i <= k; i++) b.mark("s_" + num(i + 1), s[i]);
        for (int i = 0; i < k; i++) {
            b.mark("u_" + num(i + 1), u[i]);
            b.mark("w_" + num(i + 1), w[i]);
            b.mark("v_" + num(i + 1), v[i]);
        }
        b.mark("u4", u4);
    }
    for (int i = 0; i < n; i++) {
        b.mark("x_" + num(i + 1), x[i]);
        b.mark("y_" + num(i + 1), y[i]);
        b.mark("Z_" + num(i + 1) + "_first", z[i][0]);
        b.mark("Z_" + num(i + 1) + "_last", z[i][C - 1]);
        for (int q = 0; q < C; q++) b.mark("z_" + num(i + 1) + "_" + num(q + 1), z[i][q]);
    }
    b.mark("v_pre", buf);
    b.mark("v", vt);
    b.mark("f", f);

    require_valid(b.d);

    // One early steal of the root future flips the prologue parity and with
    // it the whole pop pattern downstream.
    script sc;
    sc.random_victim_seed = 0;
    sc.processors.push_back({0, {d_execute(1), d_sleep(2)}});
    sc.processors.push_back({1, {d_sleep(1), d_steal_from(0), d_execute(1), d_sleep_forever()}});

    generated_case gc;
    gc.d = std::move(b.d);
    gc.script_hint = std::move(sc);
    return gc;
}

} // namespace

generated_case gen_pf_cascade_block(int n, int C) {
    if (n < 1) throw std::invalid_argument("gen_pf_cascade_block: n must be >= 1");
    if (C < 2) throw std::invalid_argument("gen_pf_cascade_block: C must be >= 2");
    generated_case gc = build_parity_family(2, n, C, true);
    gc.params = "n=" + num(n) + " C=" + num(C);
    return gc;
}

generated_case gen_pf_parity_chain(int k, int n, int C) {
    if (k < 2 || k % 2 != 0)
        throw std::invalid_argument("gen_pf_parity_chain: k must be even and >= 2");
    if (n < 1) throw std::invalid_argument("gen_pf_parity_chain: n must be >= 1");
    if (C < 2) throw std::invalid_argument("gen_pf_parity_chain: C must be >= 2");
    generated_case gc = build_parity_family(k, n, C, false);
    gc.params = "k=" + num(k) + " n=" + num(n) + " C=" + num(C);
    return gc;
}

generated_case gen_pf_full(int t_branches, int n, int C) {
    if (t_branches < 1 || (t_branches & (t_branches - 1)) != 0)
        throw std::invalid_argument("gen_pf_full: t must be a power of two");
    if (n < 1) throw std::invalid_argument("gen_pf_full: n must be >= 1");
    if (C < 2) throw std::invalid_argument("gen_pf_full: C must be >= 2");

    builder b;
    int D = 0;
    while ((1 << D) < t_branches) D++;

    struct leaf_refs {
        node_id u4 = -1;
        std::vector<node_id> x, y;
        std::vector<std::vector<node_id>> z;
    };
    std::vector<leaf_refs> leaves;
    int interiors = 0;

    // Returns (entry, exit). fin is the single-node future whose value the
    // gadget at this level consumes.
    std::function<std::pair<node_id, node_id>(node_id, int)> build =
        [&](node_id fin, int d) -> std::pair<node_id, node_id> {
        if (d == 0) {
            int li = static_cast<int>(leaves.size());
            std::string pre = "L" + num(li + 1) + "_";
            leaf_refs lr;
            node_id ut = b.add();
            node_id st = b.add();
            node_id wt = b.add();
            node_id vt = b.add(0, true);
            node_id u4 = b.add();
            b.fut(ut, st);
            b.cont(ut, wt);
            b.cont(wt, vt);
            b.touch(fin, vt);
            b.cont(vt, u4);
            lr.u4 = u4;
            lr.x.resize(n);
            lr.y.resize(n);
            lr.z.assign(n, {});
            for (int i = 0; i < n; i++) {
                lr.x[i] = b.add();
                lr.z[i].resize(C);
                for (int q = 0; q < C; q++) lr.z[i][q] = b.add();
                lr.y[i] = b.add();
            }
            node_id buf = b.add();
            node_id vv = b.add(0, true);
            b.cont(u4, lr.x[0]);
            for (int i = 0; i < n; i++) {
                b.fut(lr.x[i], lr.z[i][0]);
                for (int q = 0; q + 1 < C; q++) b.cont(lr.z[i][q], lr.z[i][q + 1]);
                b.touch(lr.z[i][C - 1], lr.y[i]);
                if (i + 1 < n) b.cont(lr.x[i], lr.x[i + 1]);
            }
            b.cont(lr.x[n - 1], buf);
            b.cont(buf, vv);
            b.touch(st, vv);
            b.cont(vv, lr.y[n - 1]);
            for (int i = n - 1; i > 0; i--) b.cont(lr.y[i], lr.y[i - 1]);

            b.mark(pre + "u_t", ut);
            b.mark(pre + "s_t", st);
            b.mark(pre + "w_t", wt);
            b.mark(pre + "v_t", vt);
            b.mark(pre + "u4", u4);
            for (int i = 0; i < n; i++) {
                b.mark(pre + "x_" + num(i + 1), lr.x[i]);
                b.mark(pre + "y_" + num(i + 1), lr.y[i]);
                for (int q = 0; q < C; q++)
                    b.mark(pre + "z_" + num(i + 1) + "_" + num(q + 1), lr.z[i][q]);
            }
            b.mark(pre + "v_pre", buf);
            b.mark(pre + "v", vv);
            node_id y0 = lr.y[0];
            leaves.push_back(std::move(lr));
            return {ut, y0};
        }
        int ii = ++interiors;
        std::string pre = "I" + num(ii) + "_";
        node_id uu = b.add();
        node_id af = b.add();
        node_id xx = b.add();
        node_id bf = b.add();
        node_id ww = b.add();
        node_id vv = b.add(0, true);
        node_id yy = b.add();
        b.fut(uu, af);
        b.cont(uu, xx);
        b.fut(xx, bf);
        b.cont(xx, ww);
        b.cont(ww, vv);
        b.touch(fin, vv);
        b.cont(vv, yy);
        auto left = build(af, d - 1);
        auto right = build(bf, d - 1);
        node_id jj = b.add();
        b.fut(yy, left.first);
        b.cont(yy, right.first);
        b.cont(right.second, jj);
        b.touch(left.second, jj);
        b.mark(pre + "u", uu);
        b.mark(pre + "a", af);
        b.mark(pre + "x", xx);
        b.mark(pre + "b", bf);
        b.mark(pre + "w", ww);
        b.mark(pre + "v", vv);
        b.mark(pre + "y", yy);
        b.mark(pre + "j", jj);
        return {uu, jj};
    };

    node_id r = b.add();
    node_id s0 = b.add();
    b.fut(r, s0);
    b.mark("r", r);
    b.mark("s_0", s0);
    std::pair<node_id, node_id> top;
    if (D % 2 == 0) {
        // An extra gadget keeps the depth of nested futures odd, which is
        // what makes every leaf land in its cheap execution mode.
        node_id u0 = b.add();
        node_id s1 = b.add();
        node_id w0 = b.add();
        node_id v0 = b.add(0, true);
        b.cont(r, u0);
        b.fut(u0, s1);
        b.cont(u0, w0);
        b.cont(w0, v0);
        b.touch(s0, v0);
        b.mark("u_0", u0);
        b.mark("s_1", s1);
        b.mark("w_0", w0);
        b.mark("v_0", v0);
        top = build(s1, D);
        b.cont(v0, top.first);
    } else {
        top = build(s0, D);
        b.cont(r, top.first);
    }
    node_id f = b.add();
    b.cont(top.second, f);
    b.mark("f", f);
    b.d.root = r;
    b.d.final = f;
    require_valid(b.d);

    // Rotate block numbers by each leaf's position in the no-steal order so
    // consecutive leaves mostly reuse each other's working set.
    run_result probe = run_sequential(b.d, sched_policy::parent_first);
    std::unordered_map<node_id, size_t> pos;
    for (size_t i = 0; i < probe.order.size(); i++) pos[probe.order[i]] = i;
    std::vector<int> by_visit(leaves.size());
    std::iota(by_visit.begin(), by_visit.end(), 0);
    std::sort(by_visit.begin(), by_visit.end(),
              [&](int a2, int b2) { return pos.at(leaves[a2].u4) < pos.at(leaves[b2].u4); });
    for (size_t rank = 0; rank < by_visit.size(); rank++) {
        const leaf_refs& lr = leaves[by_visit[rank]];
        int rot = static_cast<int>(rank % C);
        for (int i = 0; i < n; i++) {
            b.d.nodes[lr.x[i]].block = 1 + rot;
            for (int q = 0; q < C; q++) b.d.nodes[lr.z[i][q]].block = 1 + (rot + q) % C;
            b.d.nodes[lr.y[i]].block = C + 1;
        }
    }

    script sc;
    sc.random_victim_seed = 0;
    sc.processors.push_back({0, {d_execute(1), d_sleep(2)}});
    sc.processors.push_back({1, {d_sleep(1), d_steal_from(0), d_execute(1), d_sleep_forever()}});

    generated_case gc;
    gc.d = std::move(b.d);
    gc.script_hint = std::move(sc);
    gc.params = "t=" + num(t_branches) + " n=" + num(n) + " C=" + num(C);
    return gc;
}

namespace {

struct rnd_slot {
    int tag = -1;
    bool fork = false;
    int child = -1;     // thread spawned here
    bool target = false; // spliced touch consumer
};

struct rnd_thread {
    int parent = -1;
    int fork_tag = -1; // tag of the parent slot that spawned this thread
    int depth = 0;
    uint64_t sub_seed = 0;
    std::vector<rnd_slot> slots;
};

} // namespace

generated_case gen_random_structured(const random_dag_config& cfg) {
    if (cfg.max_depth < 0) throw std::invalid_argument("gen_random_structured: max_depth must be >= 0");
    if (cfg.fork_probability < 0.0 || cfg.fork_probability > 1.0)
        throw std::invalid_argument("gen_random_structured: fork_probability must be in [0,1]");
    if (cfg.block_probability < 0.0 || cfg.block_probability > 1.0)
        throw std::invalid_argument("gen_random_structured: block_probability must be in [0,1]");
    if (cfg.block_probability > 0.0 && cfg.block_universe < 1)
        throw std::invalid_argument("gen_random_structured: block_universe must be >= 1");

    const size_t thread_cap = 512;
    std::vector<rnd_thread> threads;
    int next_tag = 0;

    // Skeletons first: continuation chains with fork slots. Every thread
    // keeps two plain slots at its tail so touch consumers always have room.
    std::function<void(int, int, int, uint64_t)> plan = [&](int parent, int fork_tag, int depth,
                                                            uint64_t seed) {
        int idx = static_cast<int>(threads.size());
        threads.push_back({parent, fork_tag, depth, seed, {}});
        splitmix64 rng(seed);
        int len = 3 + static_cast<int>(rng.next_below(6));
        for (int i = 0; i < len; i++) threads[idx].slots.push_back({next_tag++});
        for (int i = 0; i + 2 < len; i++) {
            if (depth >= cfg.max_depth) break;
            if (threads.size() >= thread_cap) break;
            if (!chance(rng, cfg.fork_probability)) continue;
            uint64_t child_seed = rng.fork_seed();
            threads[idx].slots[i].fork = true;
            threads[idx].slots[i].child = static_cast<int>(threads.size());
            plan(idx, threads[idx].slots[i].tag, depth + 1, child_seed);
        }
    };
    plan(-1, -1, 0, cfg.seed);

    auto slot_index = [&](int th, int tag) {
        const auto& ss = threads[th].slots;
        for (size_t i = 0; i < ss.size(); i++)
            if (ss[i].tag == tag) return static_cast<int>(i);
        return -1;
    };
    // Insert a consumer slot at a random legal position: after lo, before the
    // thread's last slot, never right behind a fork.
    auto splice_target = [&](splitmix64& rng, int host, int lo) {
        auto& hs = threads[host].slots;
        std::vector<int> okpos;
        for (int p = lo; p <= static_cast<int>(hs.size()) - 1; p++)
            if (!hs[p - 1].fork) okpos.push_back(p);
        int at = okpos[rng.next_below(okpos.size())];
        rnd_slot sl;
        sl.tag = next_tag++;
        sl.target = true;
        hs.insert(hs.begin() + at, sl);
        return sl.tag;
    };

    std::vector<std::pair<int, int>> links;      // (source tag, consumer tag)
    std::vector<int> final_links;                // source tags touching the final node
    for (size_t c = 1; c < threads.size(); c++) {
        splitmix64 rng(threads[c].sub_seed ^ 0xa5a5a5a5a5a5a5a5ull);
        int p = threads[c].parent;
        int fs = slot_index(p, threads[c].fork_tag);
        int last_tag = threads[c].slots.back().tag;
        if (cfg.kind == discipline::single_touch_super_final) {
            final_links.push_back(last_tag);
            if (!chance(rng, 0.3))
                links.push_back({last_tag, splice_target(rng, p, fs + 2)});
        } else if (cfg.kind == discipline::single_touch) {
            std::vector<int> sibs;
            for (size_t c2 = 1; c2 < threads.size(); c2++)
                if (threads[c2].parent == p && slot_index(p, threads[c2].fork_tag) > fs)
                    sibs.push_back(static_cast<int>(c2));
            if (!sibs.empty() && chance(rng, 0.3)) {
                int host = sibs[rng.next_below(sibs.size())];
                links.push_back({last_tag, splice_target(rng, host, 1)});
            } else {
                links.push_back({last_tag, splice_target(rng, p, fs + 2)});
            }
        } else { // local_touch
            auto& cs = threads[c].slots;
            std::vector<int> mids;
            for (size_t i = 0; i + 1 < cs.size(); i++)
                if (!cs[i].fork && !cs[i].target) mids.push_back(static_cast<int>(i));
            int cnt = 1 + static_cast<int>(rng.next_below(3));
            cnt = std::min<int>(cnt, 1 + static_cast<int>(mids.size()));
            std::vector<int> src_tags;
            for (int pick = 0; pick + 1 < cnt; pick++) {
                size_t at = rng.next_below(mids.size());
                src_tags.push_back(cs[mids[at]].tag);
                mids.erase(mids.begin() + at);
            }
            src_tags.push_back(last_tag);
            for (int tag : src_tags) links.push_back({tag, splice_target(rng, p, fs + 2)});
        }
    }

    builder bld;
    bld.d.super_final_mode = cfg.kind == discipline::single_touch_super_final;
    std::unordered_map<int, node_id> by_tag;
    splitmix64 brng(cfg.seed ^ 0xc3c300ff00ffc3c3ull);
    for (auto& th : threads)
        for (auto& sl : th.slots) {
            int64_t block = 0;
            if (chance(brng, cfg.block_probability))
                block = 1 + static_cast<int64_t>(brng.next_below(cfg.block_universe));
            by_tag[sl.tag] = bld.add(block, sl.target);
        }
    for (auto& th : threads) {
        for (size_t i = 0; i + 1 < th.slots.size(); i++)
            bld.cont(by_tag.at(th.slots[i].tag), by_tag.at(th.slots[i + 1].tag));
        for (auto& sl : th.slots)
            if (sl.fork) bld.fut(by_tag.at(sl.tag), by_tag.at(threads[sl.child].slots[0].tag));
    }
    for (auto& [src, dst] : links) bld.touch(by_tag.at(src), by_tag.at(dst));
    node_id fin = by_tag.at(threads[0].slots.back().tag);
    for (int src : final_links) bld.touch(by_tag.at(src), fin);
    bld.d.root = by_tag.at(threads[0].slots[0].tag);
    bld.d.final = fin;
    require_valid(bld.d);

    generated_case gc;
    gc.d = std::move(bld.d);
    std::ostringstream ps;
    ps << "seed=" << cfg.seed << " max_depth=" << cfg.max_depth
       << " fork_probability=" << cfg.fork_probability << " discipline="
       << discipline_name(cfg.kind) << " block_universe=" << cfg.block_universe
       << " block_probability=" << cfg.block_probability;
    gc.params = ps.str();
    return gc;
}

} // namespace futsim
