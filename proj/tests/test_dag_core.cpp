#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "futsim/classify.hpp"
#include "futsim/dag.hpp"
#include "futsim/json_io.hpp"
#include "futsim/metrics.hpp"
#include "futsim/threads.hpp"
#include "futsim/validate.hpp"

#include <algorithm>

using namespace futsim;

namespace {

// Small builder so tests read as graph literals.
struct builder {
    dag d;
    builder& n(node_id id, int64_t block = 0, bool real_touch = false) {
        d.nodes.push_back({id, block, real_touch});
        return *this;
    }
    builder& cont(node_id a, node_id b) {
        d.edges.push_back({a, b, edge_kind::continuation});
        return *this;
    }
    builder& fut(node_id a, node_id b) {
        d.edges.push_back({a, b, edge_kind::future});
        return *this;
    }
    builder& touch(node_id a, node_id b) {
        d.edges.push_back({a, b, edge_kind::touch});
        return *this;
    }
    dag done(node_id root, node_id final) {
        d.root = root;
        d.final = final;
        return d;
    }
};

dag chain5() {
    builder b;
    for (node_id i = 1; i <= 5; ++i) b.n(i);
    for (node_id i = 1; i < 5; ++i) b.cont(i, i + 1);
    return b.done(1, 5);
}

// Root forks one helper that hands its value to the last node.
dag diamond() {
    builder b;
    b.n(1).n(2).n(3).n(4, 0, true);
    b.cont(1, 2).fut(1, 3).cont(2, 4).touch(3, 4);
    return b.done(1, 4);
}

bool has_rule(const validation_report& r, const std::string& rule) {
    return std::any_of(r.issues.begin(), r.issues.end(),
                       [&](const validation_issue& i) { return i.rule == rule; });
}

} // namespace

TEST_CASE("span of a plain chain counts its nodes") {
    dag d = chain5();
    CHECK(validate(d).ok());
    dag_index idx(d);
    CHECK(compute_span(idx) == 5);
}

TEST_CASE("span of a two-branch join takes the longer side") {
    dag d = diamond();
    CHECK(validate(d).ok());
    dag_index idx(d);
    CHECK(compute_span(idx) == 3);

    // Lengthen the helper branch so it dominates.
    builder b;
    b.n(1).n(2).n(3).n(5).n(6).n(4, 0, true);
    b.cont(1, 2).fut(1, 3).cont(3, 5).cont(5, 6).cont(2, 4).touch(6, 4);
    dag d2 = b.done(1, 4);
    CHECK(validate(d2).ok());
    dag_index idx2(d2);
    CHECK(compute_span(idx2) == 5);
}

TEST_CASE("thread decomposition follows continuation chains") {
    dag d = diamond();
    dag_index idx(d);
    auto t = decompose_threads(idx);
    REQUIRE(t.threads.size() == 2);
    CHECK(t.threads[0].is_main);
    CHECK(t.threads[0].nodes == std::vector<node_id>{1, 2, 4});
    CHECK(t.threads[1].nodes == std::vector<node_id>{3});
    CHECK(t.threads[1].spawned_at == 1);
    CHECK(t.owner.at(4) == 0);
    CHECK(t.slot.at(4) == 2);
}

TEST_CASE("validator accepts the basic shapes") {
    CHECK(validate(chain5()).ok());
    CHECK(validate(diamond()).ok());
}

TEST_CASE("validator flags a touched fork child") {
    builder b;
    b.n(1).n(2).n(3).n(4);
    // 2 is both fork child and touch target: illegal.
    b.cont(1, 2).fut(1, 3).touch(3, 2).cont(2, 4);
    dag d = b.done(1, 4);
    auto r = validate(d);
    CHECK(!r.ok());
    CHECK(has_rule(r, "fork-child-is-touch"));
}

TEST_CASE("validator flags unreachable nodes") {
    dag d = chain5();
    d.nodes.push_back({99, 0, false});
    d.edges.push_back({99, 5, edge_kind::continuation});
    auto r = validate(d);
    CHECK(has_rule(r, "unreachable"));
}

TEST_CASE("validator flags cycles") {
    dag d = chain5();
    d.edges.push_back({5, 1, edge_kind::continuation});
    auto r = validate(d);
    CHECK(has_rule(r, "acyclic"));
}

TEST_CASE("validator flags degree violations") {
    builder b;
    b.n(1).n(2).n(3).n(4).n(5);
    b.cont(1, 2).cont(1, 3).cont(1, 4); // out-degree 3
    b.cont(2, 5).cont(3, 5).cont(4, 5); // in-degree 3, two continuation in-edges
    dag d = b.done(1, 5);
    auto r = validate(d);
    CHECK(has_rule(r, "node-degree"));
}

TEST_CASE("validator flags a spawned thread that never hands off its value") {
    builder b;
    b.n(1).n(2).n(3).n(4);
    b.cont(1, 2).fut(1, 3).cont(3, 4).cont(2, 4);
    // node 4 now has two continuation in-edges and thread {3} ends in a
    // continuation edge rather than a touch.
    dag d = b.done(1, 4);
    auto r = validate(d);
    CHECK(!r.ok());
    CHECK((has_rule(r, "thread-last-edge") || has_rule(r, "edge-kinds")));
}

TEST_CASE("classification of the single helper join") {
    dag d = diamond();
    auto c = classify(d);
    CHECK(c.structured);
    CHECK(c.single_touch);
    CHECK(c.local_touch);
    CHECK(!c.single_touch_super_final);
}

TEST_CASE("a touch hosted in an earlier sibling thread is unstructured") {
    // v1 forks A; later v2 forks B; B's value is consumed inside A.
    // A's consumer slot is not downstream of v2, so the discipline breaks.
    builder b;
    b.n(1);           // v1
    b.n(2);           // v2 (main, after v1)
    b.n(3);           // main tail
    b.n(4);           // final
    b.n(10).n(11, 0, true); // thread A: head, consumer of B
    b.n(20);          // thread B
    b.cont(1, 2).fut(1, 10);
    b.cont(2, 3).fut(2, 20);
    b.cont(3, 4);
    b.cont(10, 11).touch(20, 11);
    b.touch(11, 4); // A hands its value to final
    dag d = b.done(1, 4);
    REQUIRE(validate(d).ok());
    auto c = classify(d);
    CHECK(!c.structured);
    CHECK(!c.single_touch);
    CHECK(!c.local_touch);
}

TEST_CASE("a touch hosted in a later sibling thread stays structured") {
    // v1 forks A, then v2 forks B; A's value is consumed inside B. B hangs
    // below v1's continuation child, so the placement is fine for A.
    builder b;
    b.n(1).n(2).n(3).n(4);
    b.n(10);                 // thread A
    b.n(20).n(21, 0, true);  // thread B: head, consumer of A
    b.cont(1, 2).fut(1, 10);
    b.cont(2, 3).fut(2, 20);
    b.cont(3, 4);
    b.cont(20, 21).touch(10, 21);
    b.touch(21, 4);
    dag d = b.done(1, 4);
    REQUIRE(validate(d).ok());
    auto c = classify(d);
    CHECK(c.structured);
    CHECK(!c.local_touch); // A's consumer lives in B, not in the main thread
}

TEST_CASE("terminal barrier classification") {
    // Two helpers, each touched once mid-stream, and everything re-joined at
    // a final barrier node.
    builder b;
    b.n(1).n(2).n(6).n(3, 0, true).n(4, 0, true).n(5);
    b.n(10).n(20);
    b.cont(1, 2).fut(1, 10);
    b.cont(2, 6).fut(2, 20);
    b.cont(6, 3).touch(10, 3);
    b.cont(3, 4).touch(20, 4);
    b.cont(4, 5);
    b.touch(10, 5).touch(20, 5);
    dag d = b.done(1, 5);
    d.super_final_mode = true;
    REQUIRE(validate(d).to_string() == "");
    auto c = classify(d);
    CHECK(c.single_touch_super_final);
}

TEST_CASE("json round trip preserves the graph and its hash") {
    dag d = diamond();
    d.landmarks["join"] = 4;
    auto j = dag_to_json(d);
    dag d2 = dag_from_json(j);
    CHECK(dag_hash(d) == dag_hash(d2));
    CHECK(d2.landmarks.at("join") == 4);
    CHECK(d2.super_final_mode == false);
    CHECK(d2.nodes.size() == d.nodes.size());
    CHECK(d2.edges.size() == d.edges.size());
}

TEST_CASE("loader derives touch annotations when absent") {
    dag d = diamond();
    auto j = dag_to_json(d);
    for (auto& nj : j["nodes"]) nj.erase("is_real_touch");
    dag d2 = dag_from_json(j);
    const node* four = nullptr;
    for (const node& n : d2.nodes)
        if (n.id == 4) four = &n;
    REQUIRE(four != nullptr);
    CHECK(four->is_real_touch); // touch target, and not a terminal barrier
}

TEST_CASE("touch counting only sees annotated nodes") {
    dag d = diamond();
    CHECK(count_touches(d) == 1);
    for (node& n : d.nodes) n.is_real_touch = false;
    CHECK(count_touches(d) == 0);
}
