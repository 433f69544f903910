#include <algorithm>
#include <random>

#include "doctest.h"
#include "recon/reconciler.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/random_instance.hpp"

using namespace recon;
using fixture::n;
using fixture::sigma;
using fixture::tau;

namespace {

std::vector<Command> cmds(std::initializer_list<Command> l) { return sorted_commands(l); }

std::size_t degree(const ConflictGraph& g, const Command& c) {
  return static_cast<std::size_t>(std::count_if(g.edges.begin(), g.edges.end(),
                                                [&](const Conflict& e) { return e.left == c || e.right == c; }));
}

// Replays the fixed decisions (σ2,τ7)→τ7, (σ4,τ5)→σ4, (σ3,τ8)→τ8.
Interactive scripted() {
  return Interactive{[](const std::vector<Conflict>& live) -> std::optional<Decision> {
    const std::vector<std::tuple<Command, Command, Side>> script{
        {sigma(2), tau(7), Side::second}, {sigma(4), tau(5), Side::first}, {sigma(3), tau(8), Side::second}};
    for (const auto& [l, r, side] : script)
      for (std::size_t i = 0; i < live.size(); ++i)
        if (live[i].left == l && live[i].right == r) return Decision{i, side};
    return std::nullopt;
  }};
}

}  // namespace

TEST_SUITE("reconciler") {

TEST_CASE("conflict graph of the worked example") {
  fixture::Example ex;
  auto g = build_conflict_graph(ex.a, ex.b);
  CHECK(g.edges.size() == 15);
  CHECK(degree(g, sigma(1)) == 5);
  CHECK(degree(g, sigma(2)) == 4);
  CHECK(degree(g, sigma(3)) == 3);
  CHECK(degree(g, sigma(4)) == 2);
  CHECK(degree(g, sigma(5)) == 1);
  CHECK(degree(g, tau(5)) == 5);
  CHECK(degree(g, tau(6)) == 1);
  for (const auto& e : g.edges) CHECK(e.kind == ConflictKind::structural);
  CHECK(std::is_sorted(g.edges.begin(), g.edges.end(), [](const Conflict& x, const Conflict& y) {
    return std::tie(x.left.node, x.right.node) < std::tie(y.left.node, y.right.node);
  }));
  CHECK(g.edges.front().left == sigma(1));
  CHECK(g.edges.front().right == tau(5));
}

TEST_CASE("content conflict and trivial graphs") {
  auto ns = make_namespace({NodeId::parse("/n"), NodeId::parse("/m")});
  const NodeId x = NodeId::parse("/n");
  CanonicalSet a(ns, {{x, Content::dir(), Content::file("f")}});
  CanonicalSet b(ns, {{x, Content::dir(), Content::file("g")}});
  auto g = build_conflict_graph(a, b);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].kind == ConflictKind::content);

  // a file replacing a directory against a file created inside it
  auto tree = make_namespace({NodeId::parse("/p/c"), NodeId::parse("/p/e")});
  CanonicalSet p(tree, {{NodeId::parse("/p"), Content::dir(), Content::file("f")}});
  CanonicalSet q(tree, {{NodeId::parse("/p/c"), Content::empty(), Content::file("f")},
                        {NodeId::parse("/p/e"), Content::empty(), Content::file("g")}});
  auto nested = build_conflict_graph(p, q);
  REQUIRE(nested.edges.size() == 2);
  CHECK(nested.edges[0].kind == ConflictKind::structural);
  CHECK(nested.edges[1].kind == ConflictKind::structural);

  CanonicalSet c(ns, {{NodeId::parse("/m"), Content::empty(), Content::dir()}});
  CHECK(build_conflict_graph(a, c).edges.empty());
  CHECK_THROWS_AS(build_conflict_graph(a, a), UsageError);
}

TEST_CASE("is_merger") {
  fixture::Example ex;
  CHECK(is_merger(ex.a, ex.b, ex.m1().commands()));
  CHECK_FALSE(is_merger(ex.a, ex.b, command_union(ex.a.commands(), ex.b.commands())));
  CHECK_FALSE(is_merger(ex.a, ex.b, std::vector<Command>{}));
  CHECK_FALSE(is_merger(ex.a, ex.b, cmds({sigma(5), tau(6)})));
}

TEST_CASE("merger census") {
  fixture::Example ex;
  auto all = enumerate_mergers(ex.a, ex.b);
  REQUIRE(all.size() == 6);
  for (const auto& m : ex.all_mergers()) CHECK(std::find(all.begin(), all.end(), m) != all.end());
  CHECK_THROWS_AS(enumerate_mergers(ex.a, ex.b, 5), BoundExceeded);

  auto ns = fixture::ns();
  CanonicalSet x(ns, {tau(6)}), y(ns, {tau(7)});
  auto single = enumerate_mergers(x, y);
  REQUIRE(single.size() == 1);
  CHECK(single[0] == CanonicalSet(ns, {tau(6), tau(7)}));
  CHECK(enumerate_mergers(ex.a, ex.a) == std::vector<CanonicalSet>{ex.a});
}

TEST_CASE("fixed decision trace") {
  fixture::Example ex;
  auto res = reconcile_disjoint(ex.a, ex.b, scripted());
  REQUIRE(res.steps.size() == 3);
  CHECK(res.initial_conflicts == 15);
  CHECK(res.steps[0].removed == cmds({sigma(1), sigma(2)}));
  CHECK(res.steps[0].edges_before == 15);
  CHECK(res.steps[0].edges_after == 6);
  CHECK(res.steps[0].removed_edges.size() == 9);
  CHECK(res.steps[1].removed == cmds({tau(9), tau(5)}));
  CHECK(res.steps[1].edges_after == 1);
  CHECK(res.steps[2].removed == cmds({sigma(3)}));
  CHECK(res.steps[2].edges_after == 0);
  CHECK(res.merger == ex.m2());
}

TEST_CASE("resolver rejects stale conflicts") {
  fixture::Example ex;
  Resolver r(ex.a, ex.b);
  auto first = r.initial_graph().edges.front();
  r.resolve(Conflict{sigma(2), tau(7), ConflictKind::structural}, Side::second);
  CHECK_FALSE(r.live_index(first).has_value());
  CHECK_THROWS_AS(r.resolve(first, Side::first), UsageError);
  CHECK(r.live_count() == 6);
  CHECK(r.residue_first() == CanonicalSet(ex.ns, {sigma(3), sigma(4), sigma(5)}));
}

TEST_CASE("policies on the worked example") {
  fixture::Example ex;
  CHECK(reconcile(ex.a, ex.b, FirstWins{}).merger == ex.a);
  CHECK(reconcile(ex.a, ex.b, SecondWins{}).merger == ex.b);
  CHECK(reconcile(ex.a, ex.b, ConstructorWins{}).merger == ex.b);
  CHECK(reconcile(ex.a, ex.b, Guided{ex.m2().commands()}).merger == ex.m2());
  for (const auto& m : ex.all_mergers()) CHECK(reconcile(ex.a, ex.b, Guided{m.commands()}).merger == m);
  CHECK(reconcile(ex.a, ex.a, FirstWins{}).merger == ex.a);
  CHECK_THROWS_AS(reconcile(ex.a, ex.b, Guided{cmds({sigma(5)})}), ValidationError);
}

TEST_CASE("interactive protocol") {
  fixture::Example ex;
  CHECK_THROWS_AS(reconcile(ex.a, ex.b, Interactive{[](const std::vector<Conflict>&) {
                              return std::optional<Decision>{};
                            }}),
                  ResolutionAborted);
  CHECK_THROWS_AS(reconcile(ex.a, ex.b, Interactive{[](const std::vector<Conflict>&) {
                              return std::optional<Decision>{Decision{0, static_cast<Side>(7)}};
                            }}),
                  ProtocolError);
  CHECK_THROWS_AS(reconcile(ex.a, ex.b, Interactive{[](const std::vector<Conflict>& live) {
                              return std::optional<Decision>{Decision{live.size(), Side::first}};
                            }}),
                  ProtocolError);

  // content conflicts come first
  auto ns = make_namespace({NodeId::parse("/a/b"), NodeId::parse("/c")});
  CanonicalSet a(ns, {{NodeId::parse("/a/b"), Content::empty(), Content::dir()},
                      {NodeId::parse("/c"), Content::empty(), Content::file("x")}});
  CanonicalSet b(ns, {{NodeId::parse("/a"), Content::dir(), Content::empty()},
                      {NodeId::parse("/c"), Content::empty(), Content::file("y")}});
  std::vector<ConflictKind> seen;
  reconcile(a, b, Interactive{[&](const std::vector<Conflict>& live) -> std::optional<Decision> {
              seen.push_back(live.front().kind);
              return Decision{0, Side::first};
            }});
  REQUIRE(seen.size() == 2);
  CHECK(seen[0] == ConflictKind::content);
}

TEST_CASE("constructor-wins content handling") {
  auto ns = make_namespace({NodeId::parse("/c")});
  const NodeId c = NodeId::parse("/c");
  CanonicalSet a(ns, {{c, Content::empty(), Content::file("x")}});
  CanonicalSet b(ns, {{c, Content::empty(), Content::file("y")}});
  CHECK_THROWS_AS(reconcile(a, b, ConstructorWins{}), ResolutionAborted);
  CHECK(reconcile(a, b, ConstructorWins{ContentPolicy::first}).merger == a);
  CHECK(reconcile(a, b, ConstructorWins{ContentPolicy::second}).merger == b);
  CanonicalSet d(ns, {{c, Content::empty(), Content::dir()}});
  CHECK(reconcile(a, d, ConstructorWins{}).merger == d);
}

TEST_CASE("conflict-free sets merge to their union") {
  fixture::Example ex;
  CanonicalSet x(ex.ns, {sigma(5)}), y(ex.ns, {tau(6), tau(7)});
  auto res = reconcile_disjoint(x, y, FirstWins{});
  CHECK(res.steps.empty());
  CHECK(res.merger == CanonicalSet(ex.ns, {sigma(5), tau(6), tau(7)}));
  auto plan = merge_plan(x, y, res.merger);
  CHECK(plan.first.rollback.empty());
  CHECK(plan.second.rollback.empty());
  CHECK(plan.first.apply == order(y));
  CHECK(plan.second.apply == order(x));
}

TEST_CASE("merge plans of the worked example") {
  fixture::Example ex;
  auto p1 = merge_plan(ex.a, ex.b, ex.m1());
  CHECK(p1.first.rollback ==
        std::vector<Command>{invert(sigma(1)), invert(sigma(2)), invert(sigma(3)), invert(sigma(4))});
  CHECK(p1.first.apply == std::vector<Command>{tau(9), tau(8), tau(7), tau(6)});
  CHECK(p1.second.rollback == std::vector<Command>{invert(tau(5))});
  CHECK(p1.second.apply == std::vector<Command>{sigma(5)});

  auto pa = merge_plan(ex.a, ex.b, ex.a);
  CHECK(pa.first == ReplicaPlan{});
  CHECK(pa.second.rollback == invert_sequence(order(ex.b)));
  CHECK(pa.second.apply == order(ex.a));

  CHECK_THROWS_AS(merge_plan(ex.a, ex.b, CanonicalSet(ex.ns, {sigma(5)})), ValidationError);

  for (const auto& m : ex.all_mergers()) {
    auto plan = merge_plan(ex.a, ex.b, m);
    auto one = apply_sequence(ex.replica1, plan.first.rollback);
    one = apply_sequence(one.fs(), plan.first.apply);
    auto two = apply_sequence(ex.replica2, plan.second.rollback);
    two = apply_sequence(two.fs(), plan.second.apply);
    auto direct = apply_sequence(ex.original, order(m));
    REQUIRE(one.ok());
    REQUIRE(two.ok());
    REQUIRE(direct.ok());
    CHECK(one.fs() == direct.fs());
    CHECK(two.fs() == direct.fs());
  }
}

TEST_CASE("refluence witness") {
  fixture::Example ex;
  auto w = refluence_witness(ex.a, ex.b);
  REQUIRE(w);
  CHECK(*w == ex.original);
  auto ns = make_namespace({NodeId::parse("/c")});
  const NodeId c = NodeId::parse("/c");
  CanonicalSet x(ns, {{c, Content::empty(), Content::dir()}});
  CanonicalSet y(ns, {{c, Content::file("q"), Content::dir()}});
  CHECK_FALSE(refluence_witness(x, y).has_value());
}

TEST_CASE("constructor cluster collapse") {
  fixture::Example ex;
  auto col = collapse_constructor_clusters(build_conflict_graph(ex.a, ex.b));
  CHECK(col.vertices.size() == 5 + 5);  // destructor chain stays expanded
  CHECK(col.edges.size() == 15);

  auto ns = make_namespace({NodeId::parse("/x/y/z")});
  CanonicalSet chain(ns, {{NodeId::parse("/x"), Content::empty(), Content::dir()},
                          {NodeId::parse("/x/y"), Content::empty(), Content::dir()},
                          {NodeId::parse("/x/y/z"), Content::empty(), Content::file("f")}});
  CanonicalSet other(ns, {{NodeId::parse("/x"), Content::empty(), Content::file("g")}});
  auto small = collapse_constructor_clusters(build_conflict_graph(chain, other));
  REQUIRE(small.vertices.size() == 2);
  CHECK(small.vertices[0].members.size() == 3);
  CHECK(small.edges.size() == 1);

  auto empty = collapse_constructor_clusters(build_conflict_graph(CanonicalSet(ns), CanonicalSet(ns)));
  CHECK(empty.vertices.empty());
  CHECK(empty.edges.empty());
}

TEST_CASE("randomized properties") {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 400; ++round) {
    auto inst = gen::random_instance(rng);
    const auto all = command_union(inst.a.commands(), inst.b.commands());
    if (all.size() > 16) continue;
    auto mergers = enumerate_mergers(inst.a, inst.b);
    REQUIRE_FALSE(mergers.empty());
    if (all.size() <= 10) {
      std::vector<std::vector<Command>> mine;
      for (const auto& m : mergers) mine.push_back(m.commands());
      std::sort(mine.begin(), mine.end());
      CHECK(mine == oracle::mergers(all));
    }
    auto witness = refluence_witness(inst.a, inst.b);
    REQUIRE(witness);
    for (const auto& m : mergers) {
      CHECK(is_merger(inst.a, inst.b, m.commands()));
      // no merger holds both sides of a conflict
      for (const auto& x : m)
        for (const auto& y : m)
          if (x != y && inst.a.contains(x) && inst.b.contains(y) && !inst.a.contains(y) && !inst.b.contains(x))
            CHECK_FALSE(kernels::comparable(x.node, y.node));
      auto plan = merge_plan(inst.a, inst.b, m);
      auto direct = apply_sequence(inst.original, order(m));
      REQUIRE(direct.ok());
      auto one = apply_sequence(inst.replica1, plan.first.rollback);
      REQUIRE(one.ok());
      one = apply_sequence(one.fs(), plan.first.apply);
      REQUIRE(one.ok());
      CHECK(one.fs() == direct.fs());
    }
    // residues stay prefix sets; winners end up conflict-free
    const auto common = command_intersection(inst.a.commands(), inst.b.commands());
    CanonicalSet ra(inst.ns, command_difference(inst.a.commands(), common));
    CanonicalSet rb(inst.ns, command_difference(inst.b.commands(), common));
    Resolver r(ra, rb);
    std::bernoulli_distribution coin(0.5);
    while (!r.finished()) {
      auto live = r.live_conflicts();
      std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
      const auto c = live[pick(rng)];
      const Side s = coin(rng) ? Side::first : Side::second;
      r.resolve(c, s);
      CHECK(is_prefix_set(r.residue_first().commands(), ra));
      CHECK(is_prefix_set(r.residue_second().commands(), rb));
      const Command& winner = s == Side::first ? c.left : c.right;
      for (const auto& e : r.live_conflicts()) CHECK((e.left != winner && e.right != winner));
    }
  }
}

}
