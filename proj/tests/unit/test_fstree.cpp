#include <set>

#include "doctest.h"
#include "recon/fstree.hpp"
#include "support/fixtures.hpp"

using namespace recon;
using fixture::n;
using fixture::sigma;

namespace {

std::size_t count(const NamespacePtr& ns, std::vector<std::string> alphabet) {
  return enumerate_filesystems(ns, alphabet).size();
}

}  // namespace

TEST_SUITE("fstree") {

TEST_CASE("tree property") {
  fixture::Example ex;
  CHECK(check_tree_property(ex.original).ok);
  CHECK(check_tree_property(ex.replica1).ok);
  CHECK(check_tree_property(ex.replica2).ok);

  auto ns = make_namespace({NodeId::parse("/a/b")});
  FileSystem bad(ns);
  bad.set(NodeId::parse("/a/b"), Content::file("x"));
  auto r = check_tree_property(bad);
  CHECK_FALSE(r.ok);
  CHECK(r.violator == NodeId::parse("/a/b"));
  CHECK(check_tree_property(FileSystem(ns)).ok);
}

TEST_CASE("apply_command") {
  fixture::Example ex;
  auto ok = apply_command(ex.original, sigma(5));
  REQUIRE(ok.ok());
  CHECK(ok.fs().at(n(5)).is_empty());
  CHECK(ok.fs().at(n(4)).is_dir());

  auto tree = apply_command(ex.original, sigma(1));
  REQUIRE_FALSE(tree.ok());
  CHECK(tree.broken().reason == BreakReason::tree_violation);

  auto mismatch = apply_command(ex.original, Command{n(6), Content::dir(), Content::empty()});
  REQUIRE_FALSE(mismatch.ok());
  CHECK(mismatch.broken().reason == BreakReason::precondition_mismatch);
  CHECK(mismatch.broken().violator == n(6));
}

TEST_CASE("apply_sequence") {
  fixture::Example ex;
  std::vector<Command> down{sigma(5), sigma(4), sigma(3), sigma(2), sigma(1)};
  auto out = apply_sequence(ex.original, down);
  REQUIRE(out.ok());
  CHECK(out.fs() == ex.replica1);
  CHECK(out.fs().visible().empty());

  std::vector<Command> bad{sigma(1), sigma(5)};
  auto broken = apply_sequence(ex.original, bad);
  REQUIRE_FALSE(broken.ok());
  CHECK(broken.broken().index == 0);

  auto same = apply_sequence(ex.original, std::vector<Command>{});
  REQUIRE(same.ok());
  CHECK(same.fs() == ex.original);

  auto back = apply_sequence(out.fs(), invert_sequence(down));
  REQUIRE(back.ok());
  CHECK(back.fs() == ex.original);
}

TEST_CASE("enumeration counts") {
  CHECK(count(make_namespace({NodeId::parse("/a")}), {"f"}) == 3);
  CHECK(count(make_namespace({NodeId::parse("/a/b")}), {}) == 3);
  // downward-closed directory sets of the nine-node tree
  CHECK(count(fixture::ns(), {}) == 47);
  CHECK(count(make_namespace({NodeId::parse("/a/b/c"), NodeId::parse("/a/d")}), {"f"}) == 17);
  CHECK(enumerate_filesystems(fixture::ns(), {"x", "y", "z"}, 1e7).size() == 3749);
}

TEST_CASE("enumeration yields distinct valid filesystems") {
  auto ns = make_namespace({NodeId::parse("/a/b/c"), NodeId::parse("/a/d"), NodeId::parse("/e")});
  auto all = enumerate_filesystems(ns, {"f", "g"});
  std::set<std::map<NodeId, Content>> seen;
  for (const auto& fs : all) {
    CHECK(check_tree_property(fs).ok);
    seen.insert(fs.visible());
  }
  CHECK(seen.size() == all.size());
}

TEST_CASE("enumeration refuses oversized spaces") {
  CHECK_THROWS_AS(enumerate_filesystems(fixture::ns(), {"a", "b", "c", "d", "e"}, 1e4), BoundExceeded);
}

TEST_CASE("a successful command touches one node and keeps the tree property") {
  auto ns = make_namespace({NodeId::parse("/a/b"), NodeId::parse("/c")});
  auto all = enumerate_filesystems(ns, {"f"});
  std::vector<Content> values{Content::empty(), Content::dir(), Content::file("f")};
  for (const auto& fs : all) {
    for (const auto& node : ns->nodes()) {
      for (const auto& after : values) {
        auto out = apply_command(fs, Command{node, fs.at(node), after});
        if (!out.ok()) continue;
        CHECK(check_tree_property(out.fs()).ok);
        for (const auto& other : ns->nodes())
          if (other != node) CHECK(out.fs().at(other) == fs.at(other));
      }
    }
  }
}

}
