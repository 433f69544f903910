#include <random>

#include "doctest.h"
#include "recon/algebra.hpp"
#include "recon/fstree.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using namespace recon;
using fixture::n;
using fixture::sigma;
using fixture::tau;

namespace {

std::vector<Content> values() { return {Content::empty(), Content::dir(), Content::file("f"), Content::file("g")}; }

std::vector<Command> all_commands(const Namespace& ns) {
  std::vector<Command> out;
  for (const auto& node : ns.nodes())
    for (const auto& x : values())
      for (const auto& y : values()) out.push_back({node, x, y});
  return out;
}

}  // namespace

TEST_SUITE("algebra") {

TEST_CASE("classify") {
  const NodeId x = NodeId::parse("/x");
  CHECK(classify(sigma(5)) == CommandClass::destructor);
  CHECK(classify(tau(5)) == CommandClass::destructor);
  CHECK(classify(tau(6)) == CommandClass::constructor);
  CHECK(classify({x, Content::file("f"), Content::file("f")}) == CommandClass::null);
  CHECK(classify({x, Content::dir(), Content::dir()}) == CommandClass::null);
  CHECK(classify({x, Content::empty(), Content::empty()}) == CommandClass::null);
  CHECK(classify({x, Content::file("f"), Content::file("g")}) == CommandClass::edit_file);
  CHECK(classify({x, Content::file("f"), Content::dir()}) == CommandClass::constructor);
  CHECK(classify({x, Content::file("f"), Content::empty()}) == CommandClass::destructor);
}

TEST_CASE("invert") {
  CHECK(invert(sigma(5)) == Command{n(5), Content::empty(), Content::dir()});
  std::vector<Command> seq{sigma(5), sigma(4)};
  CHECK(invert_sequence(seq) == std::vector<Command>{invert(sigma(4)), invert(sigma(5))});
  for (const auto& c : all_commands(*fixture::ns())) CHECK(invert(invert(c)) == c);
}

TEST_CASE("compose_same_node") {
  const NodeId x = NodeId::parse("/x");
  auto f = Content::file("f"), g = Content::file("g");
  CHECK(std::get<Command>(compose_same_node({x, Content::empty(), Content::dir()}, {x, Content::dir(), f})) ==
        Command{x, Content::empty(), f});
  CHECK(std::holds_alternative<BreaksEverything>(
      compose_same_node({x, Content::empty(), Content::dir()}, {x, f, Content::empty()})));
  auto round = std::get<Command>(compose_same_node({x, f, g}, {x, g, f}));
  CHECK(round == Command{x, f, f});
  CHECK(is_null(round));
  CHECK_THROWS_AS(compose_same_node(sigma(1), sigma(2)), UsageError);
}

TEST_CASE("exec_order examples") {
  auto ns = fixture::ns();
  CHECK(exec_order(sigma(5), sigma(4), *ns));
  CHECK_FALSE(exec_order(sigma(4), sigma(5), *ns));
  CHECK_FALSE(exec_order(tau(6), tau(7), *ns));
  CHECK_FALSE(exec_order(tau(7), tau(6), *ns));
  CHECK(exec_order({n(4), Content::empty(), Content::dir()}, {n(5), Content::empty(), Content::file("f5")}, *ns));
  CHECK_FALSE(exec_order(sigma(5), sigma(3), *ns));
}

TEST_CASE("exec_order matches the pattern definition and is asymmetric") {
  auto ns = fixture::ns();
  auto cmds = all_commands(*ns);
  for (const auto& s : cmds) {
    CHECK_FALSE(exec_order(s, s, *ns));
    for (const auto& t : cmds) {
      const bool ord = exec_order(s, t, *ns);
      CHECK(ord == oracle::precedes(s, t));
      if (ord) {
        CHECK_FALSE(exec_order(t, s, *ns));
        CHECK(((is_constructor(s) && is_constructor(t)) || (is_destructor(s) && is_destructor(t))));
      }
    }
  }
}

TEST_CASE("independent") {
  auto ns = fixture::ns();
  CHECK(independent(sigma(5), tau(6), *ns));
  CHECK_FALSE(independent(sigma(2), tau(7), *ns));
  CHECK_FALSE(independent(sigma(3), sigma(3), *ns));
}

TEST_CASE("composition agrees with sequential application") {
  auto ns = make_namespace({NodeId::parse("/a/b"), NodeId::parse("/c")});
  auto all = enumerate_filesystems(ns, {"f", "g"});
  for (const auto& node : ns->nodes()) {
    for (const auto& x1 : values())
      for (const auto& y1 : values())
        for (const auto& x2 : values())
          for (const auto& y2 : values()) {
            Command s{node, x1, y1}, t{node, x2, y2};
            auto comp = compose_same_node(s, t);
            for (const auto& fs : all) {
              std::vector<Command> pair{s, t};
              auto seq = apply_sequence(fs, pair);
              if (std::holds_alternative<BreaksEverything>(comp)) {
                CHECK_FALSE(seq.ok());
                continue;
              }
              if (!seq.ok()) continue;
              auto one = apply_command(fs, std::get<Command>(comp));
              REQUIRE(one.ok());
              CHECK(one.fs() == seq.fs());
            }
          }
  }
}

}
