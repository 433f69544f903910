#pragma once

// Data-parallel inner loops of the reconciler. Each kernel exists twice: a
// plain serial reference under `serial::` and an OpenMP version under
// `omp::`. The library calls the OpenMP versions; tests hold them to the
// serial results and bench/ compares their speed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "recon/namespace.hpp"

namespace recon::kernels {

using Mask = std::uint64_t;
using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

/// Bit-level description of the candidate commands for merger enumeration.
/// Bit j of `clash[i]` is set when command j sits on the same node as i;
/// of `ancestors[i]` when j sits on a strict ancestor of i's node; of
/// `linked_parent[i]` when j sits on i's parent and is ⊏-related to i.
struct SubsetModel {
  std::size_t size = 0;
  std::vector<Mask> clash;
  std::vector<Mask> ancestors;
  std::vector<Mask> linked_parent;
};

/// Hard ceiling on SubsetModel::size regardless of caller bounds (2^28 bytes
/// of tables).
inline constexpr std::size_t max_subset_bits = 28;

namespace serial {

/// All (i, j) with a[i] and b[j] on comparable nodes, in row-major order.
std::vector<IndexPair> conflict_pairs(std::span<const NodeId> a, std::span<const NodeId> b);

/// table[S] = 1 iff subset S is a canonical set.
std::vector<std::uint8_t> canonical_table(const SubsetModel& m);

/// In place: f[S] becomes the OR of f[T] over all supersets T of S.
void superset_closure(std::vector<std::uint8_t>& f, std::size_t bits);

/// Canonical subsets with no canonical proper superset, ascending.
std::vector<Mask> maximal_subsets(const SubsetModel& m);

}  // namespace serial

namespace omp {

std::vector<IndexPair> conflict_pairs(std::span<const NodeId> a, std::span<const NodeId> b);
std::vector<std::uint8_t> canonical_table(const SubsetModel& m);
void superset_closure(std::vector<std::uint8_t>& f, std::size_t bits);
std::vector<Mask> maximal_subsets(const SubsetModel& m);

}  // namespace omp

inline bool comparable(const NodeId& x, const NodeId& y) noexcept {
  return x == y || x.is_ancestor_of(y) || y.is_ancestor_of(x);
}

inline bool subset_is_canonical(const SubsetModel& m, Mask s) noexcept {
  for (Mask rest = s; rest; rest &= rest - 1) {
    const auto i = static_cast<std::size_t>(__builtin_ctzll(rest));
    if (s & m.clash[i]) return false;
    if ((s & m.ancestors[i]) && !(s & m.linked_parent[i])) return false;
  }
  return true;
}

}  // namespace recon::kernels
