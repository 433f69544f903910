#include "recon/kernels.hpp"

namespace recon::kernels::serial {

std::vector<IndexPair> conflict_pairs(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<IndexPair> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (comparable(a[i], b[j]))
        out.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
  return out;
}

std::vector<std::uint8_t> canonical_table(const SubsetModel& m) {
  const Mask total = Mask{1} << m.size;
  std::vector<std::uint8_t> table(total);
  for (Mask s = 0; s < total; ++s) table[s] = subset_is_canonical(m, s) ? 1 : 0;
  return table;
}

void superset_closure(std::vector<std::uint8_t>& f, std::size_t bits) {
  const Mask total = Mask{1} << bits;
  for (std::size_t i = 0; i < bits; ++i) {
    const Mask bit = Mask{1} << i;
    for (Mask s = 0; s < total; ++s)
      if (!(s & bit)) f[s] |= f[s | bit];
  }
}

std::vector<Mask> maximal_subsets(const SubsetModel& m) {
  auto canonical = canonical_table(m);
  auto closure = canonical;
  superset_closure(closure, m.size);
  const Mask total = Mask{1} << m.size;
  std::vector<Mask> out;
  for (Mask s = 0; s < total; ++s) {
    if (!canonical[s]) continue;
    bool maximal = true;
    for (std::size_t i = 0; i < m.size && maximal; ++i) {
      const Mask bit = Mask{1} << i;
      if (!(s & bit) && closure[s | bit]) maximal = false;
    }
    if (maximal) out.push_back(s);
  }
  return out;
}

}  // namespace recon::kernels::serial
