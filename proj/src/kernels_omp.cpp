#include <cstdint>

#include "recon/kernels.hpp"

namespace recon::kernels::omp {

std::vector<IndexPair> conflict_pairs(std::span<const NodeId> a, std::span<const NodeId> b) {
  const auto rows = static_cast<std::int64_t>(a.size());
  std::vector<std::vector<IndexPair>> per_row(a.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < rows; ++i) {
    auto& row = per_row[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < b.size(); ++j)
      if (comparable(a[static_cast<std::size_t>(i)], b[j]))
        row.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  }
  std::vector<IndexPair> out;
  for (auto& row : per_row) out.insert(out.end(), row.begin(), row.end());
  return out;
}

std::vector<std::uint8_t> canonical_table(const SubsetModel& m) {
  const auto total = static_cast<std::int64_t>(Mask{1} << m.size);
  std::vector<std::uint8_t> table(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < total; ++s)
    table[static_cast<std::size_t>(s)] = subset_is_canonical(m, static_cast<Mask>(s)) ? 1 : 0;
  return table;
}

void superset_closure(std::vector<std::uint8_t>& f, std::size_t bits) {
  const auto total = static_cast<std::int64_t>(Mask{1} << bits);
  for (std::size_t i = 0; i < bits; ++i) {
    const Mask bit = Mask{1} << i;
    // Within one pass only sets lacking `bit` are written, and they read
    // sets that have it, so iterations are independent.
#pragma omp parallel for schedule(static)
    for (std::int64_t s = 0; s < total; ++s) {
      const auto u = static_cast<Mask>(s);
      if (!(u & bit)) f[u] |= f[u | bit];
    }
  }
}

std::vector<Mask> maximal_subsets(const SubsetModel& m) {
  auto canonical = canonical_table(m);
  auto closure = canonical;
  superset_closure(closure, m.size);
  const auto total = static_cast<std::int64_t>(Mask{1} << m.size);
  std::vector<std::uint8_t> keep(static_cast<std::size_t>(total), 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t s = 0; s < total; ++s) {
    const auto u = static_cast<Mask>(s);
    if (!canonical[u]) continue;
    bool maximal = true;
    for (std::size_t i = 0; i < m.size && maximal; ++i) {
      const Mask bit = Mask{1} << i;
      if (!(u & bit) && closure[u | bit]) maximal = false;
    }
    keep[u] = maximal ? 1 : 0;
  }
  std::vector<Mask> out;
  for (Mask s = 0; s < static_cast<Mask>(total); ++s)
    if (keep[s]) out.push_back(s);
  return out;
}

}  // namespace recon::kernels::omp
