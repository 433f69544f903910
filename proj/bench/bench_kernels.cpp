// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>

#include "recon/algebra.hpp"
#include "recon/kernels.hpp"

using namespace recon;
using namespace recon::kernels;

namespace {

// Random forest of `n` nodes, named so that subtrees stay shallow-ish.
std::vector<NodeId> forest(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<NodeId> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size());
    const std::size_t p = pick(rng);
    std::vector<std::string> segs;
    if (p < nodes.size()) segs = nodes[p].segments();
    segs.push_back("d" + std::to_string(i));
    nodes.emplace_back(std::move(segs));
  }
  return nodes;
}

// Two commands per node of a chain: a destructor and a constructor,
// so every prefix is ⊏-connected in both directions.
SubsetModel chain_model(std::size_t bits) {
  std::vector<std::string> segs;
  std::vector<Command> cmds;
  for (std::size_t i = 0; cmds.size() < bits; ++i) {
    segs.push_back("n" + std::to_string(i));
    NodeId node(segs);
    cmds.push_back({node, Content::dir(), Content::empty()});
    if (cmds.size() < bits) cmds.push_back({node, Content::empty(), Content::dir()});
  }
  auto ns = make_namespace([&] {
    std::vector<NodeId> all;
    for (const auto& c : cmds) all.push_back(c.node);
    return all;
  }());
  SubsetModel m;
  m.size = cmds.size();
  m.clash.assign(m.size, 0);
  m.ancestors.assign(m.size, 0);
  m.linked_parent.assign(m.size, 0);
  for (std::size_t i = 0; i < m.size; ++i)
    for (std::size_t j = 0; j < m.size; ++j) {
      if (i == j) continue;
      const auto& x = cmds[i].node;
      const auto& y = cmds[j].node;
      if (x == y) m.clash[i] |= Mask{1} << j;
      if (y.is_ancestor_of(x)) m.ancestors[i] |= Mask{1} << j;
      if (x.parent() && *x.parent() == y &&
          (exec_order(cmds[i], cmds[j], *ns) || exec_order(cmds[j], cmds[i], *ns)))
        m.linked_parent[i] |= Mask{1} << j;
    }
  return m;
}

template <auto Kernel>
void conflict_pairs_bench(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = forest(n, 1), b = forest(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n));
}

template <auto Kernel>
void subset_bench(benchmark::State& state) {
  const auto m = chain_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(m));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) << m.size);
}

}  // namespace

BENCHMARK(conflict_pairs_bench<serial::conflict_pairs>)->Name("conflict_pairs/serial")->Arg(256)->Arg(2048);
BENCHMARK(conflict_pairs_bench<omp::conflict_pairs>)->Name("conflict_pairs/omp")->Arg(256)->Arg(2048);
BENCHMARK(subset_bench<serial::canonical_table>)->Name("canonical_table/serial")->Arg(16)->Arg(20);
BENCHMARK(subset_bench<omp::canonical_table>)->Name("canonical_table/omp")->Arg(16)->Arg(20);
BENCHMARK(subset_bench<serial::maximal_subsets>)->Name("maximal_subsets/serial")->Arg(16)->Arg(20);
BENCHMARK(subset_bench<omp::maximal_subsets>)->Name("maximal_subsets/omp")->Arg(16)->Arg(20);

BENCHMARK_MAIN();
