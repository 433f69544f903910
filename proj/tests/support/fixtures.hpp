#pragma once

// The nine-node worked example: replica 1 deletes the /n1 chain, replica 2
// turns n5 into a file and creates files under it.

#include <string>
#include <vector>

#include "recon/canonical.hpp"
#include "recon/detector.hpp"

namespace fixture {

using recon::Command;
using recon::Content;
using recon::NodeId;

inline NodeId n(int i) {
  static const char* paths[] = {"",
                                "/n1",
                                "/n1/n2",
                                "/n1/n2/n3",
                                "/n1/n2/n3/n4",
                                "/n1/n2/n3/n4/n5",
                                "/n1/n6",
                                "/n1/n2/n7",
                                "/n1/n2/n3/n8",
                                "/n1/n2/n3/n4/n9"};
  return NodeId::parse(paths[i]);
}

inline std::string f(int i) { return "f" + std::to_string(i); }

inline recon::NamespacePtr ns() {
  std::vector<NodeId> all;
  for (int i = 1; i <= 9; ++i) all.push_back(n(i));
  return recon::make_namespace(all);
}

// σ1..σ5
inline Command sigma(int i) { return {n(i), Content::dir(), Content::empty()}; }

// τ5..τ9
inline Command tau(int i) {
  return {n(i), i == 5 ? Content::dir() : Content::empty(), Content::file(f(i))};
}

struct Example {
  recon::NamespacePtr ns = fixture::ns();
  recon::FileSystem original{ns}, replica1{ns}, replica2{ns};
  recon::CanonicalSet a{ns}, b{ns};

  Example() {
    for (int i = 1; i <= 5; ++i) original.set(n(i), Content::dir());
    replica2 = original;
    replica2.set(n(5), Content::file(f(5)));
    for (int i = 6; i <= 9; ++i) replica2.set(n(i), Content::file(f(i)));
    std::vector<Command> as, bs;
    for (int i = 1; i <= 5; ++i) as.push_back(sigma(i));
    for (int i = 5; i <= 9; ++i) bs.push_back(tau(i));
    a = recon::CanonicalSet(ns, as);
    b = recon::CanonicalSet(ns, bs);
  }

  recon::CanonicalSet set(std::vector<Command> cmds) const { return recon::CanonicalSet(ns, std::move(cmds)); }

  recon::CanonicalSet m1() const { return set({sigma(5), tau(6), tau(7), tau(8), tau(9)}); }
  recon::CanonicalSet m2() const { return set({sigma(4), sigma(5), tau(6), tau(7), tau(8)}); }
  recon::CanonicalSet m3() const { return set({sigma(2), sigma(3), sigma(4), sigma(5), tau(6)}); }

  std::vector<recon::CanonicalSet> all_mergers() const {
    return {b, m1(), m2(), m3(), set({sigma(3), sigma(4), sigma(5), tau(6), tau(7)}), a};
  }
};

}  // namespace fixture
