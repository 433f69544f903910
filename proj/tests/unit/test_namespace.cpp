#include "doctest.h"
#include "recon/namespace.hpp"
#include "support/fixtures.hpp"

using namespace recon;
using fixture::n;

TEST_SUITE("namespace") {

TEST_CASE("path parsing") {
  CHECK(NodeId::parse("/a/b").segments() == std::vector<std::string>{"a", "b"});
  CHECK(NodeId::parse("/a/b/").str() == "/a/b");
  CHECK_THROWS_AS(NodeId::parse("/a//b"), ParseError);
  CHECK_THROWS_AS(NodeId::parse(""), ParseError);
  CHECK_THROWS_AS(NodeId::parse("/"), ParseError);
  CHECK_THROWS_AS(NodeId::parse("a/b"), ParseError);
}

TEST_CASE("parent") {
  auto ns = make_namespace({NodeId::parse("/a/b")});
  CHECK(ns->parent(NodeId::parse("/a/b")) == NodeId::parse("/a"));
  CHECK_FALSE(ns->parent(NodeId::parse("/a")).has_value());
  CHECK_THROWS_AS(ns->parent(NodeId::parse("/zz")), UnknownNode);

  auto f = fixture::ns();
  CHECK(f->parent(n(5)) == n(4));
  CHECK(f->parent(n(7)) == n(2));
}

TEST_CASE("compare") {
  auto f = fixture::ns();
  CHECK(f->compare(n(1), n(9)) == Relation::above);
  CHECK(f->compare(n(9), n(1)) == Relation::below);
  CHECK(f->compare(n(5), n(6)) == Relation::independent);
  CHECK(f->compare(n(3), n(3)) == Relation::equal);
  CHECK_THROWS_AS(f->compare(n(3), NodeId::parse("/x")), UnknownNode);
}

TEST_CASE("build is an ancestor closure") {
  auto ns = Namespace::build({NodeId::parse("/a/b/c")});
  CHECK(ns.nodes() ==
        std::vector<NodeId>{NodeId::parse("/a"), NodeId::parse("/a/b"), NodeId::parse("/a/b/c")});
  CHECK(Namespace::build({}).empty());
  CHECK(Namespace::build({NodeId::parse("/x"), NodeId::parse("/x")}).size() == 1);
  CHECK(fixture::ns()->size() == 9);
}

TEST_CASE("order keeps subtrees contiguous") {
  auto f = fixture::ns();
  const auto& nodes = f->nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::size_t j = i + 1;
    while (j < nodes.size() && nodes[i].is_ancestor_of(nodes[j])) ++j;
    for (std::size_t k = j; k < nodes.size(); ++k) CHECK_FALSE(nodes[i].is_ancestor_of(nodes[k]));
  }
  CHECK(f->roots() == std::vector<NodeId>{n(1)});
  CHECK(f->children(n(2)) == std::vector<NodeId>{n(3), n(7)});
}

}
