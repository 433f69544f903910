#include "recon/canonical.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>

namespace recon {

const char* to_string(Clause c) noexcept {
  switch (c) {
    case Clause::null_command: return "null command";
    case Clause::duplicate_node: return "two commands on one node";
    case Clause::order: return "execution order not honored";
    case Clause::connectivity: return "comparable commands not chain-connected";
  }
  return "?";
}

std::string Violation::describe() const {
  std::string out = std::string(to_string(clause)) + ": " + render(first);
  if (second) out += " / " + render(*second);
  return out;
}

namespace {

using NodeIndex = std::unordered_map<NodeId, std::size_t, NodeIdHash>;

/// Nearest strict ancestor of `n` that carries a command, if any.
std::optional<std::size_t> nearest_commanded_ancestor(const NodeIndex& index, const NodeId& n) {
  auto cur = n.parent();
  while (cur) {
    if (auto it = index.find(*cur); it != index.end()) return it->second;
    cur = cur->parent();
  }
  return std::nullopt;
}

bool chained(const Command& a, const Command& b, const Namespace& ns) {
  return exec_order(a, b, ns) || exec_order(b, a, ns);
}

}  // namespace

// A ⊏-chain between comparable nodes is monotone along the branch, so the set
// is connected iff every command with a commanded ancestor is ⊏-related to
// the command on its parent.
std::optional<Violation> check_canonical_set(const Namespace& ns, std::span<const Command> cmds) {
  NodeIndex index;
  index.reserve(cmds.size());
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    const Command& c = cmds[i];
    ns.require(c.node);
    if (is_null(c)) return Violation{Clause::null_command, c, std::nullopt};
    auto [it, inserted] = index.emplace(c.node, i);
    if (!inserted) return Violation{Clause::duplicate_node, cmds[it->second], c};
  }
  for (const Command& c : cmds) {
    auto anc = nearest_commanded_ancestor(index, c.node);
    if (!anc) continue;
    auto parent = index.find(*c.node.parent());
    if (parent == index.end()) return Violation{Clause::connectivity, cmds[*anc], c};
    if (!chained(cmds[parent->second], c, ns))
      return Violation{Clause::connectivity, cmds[parent->second], c};
  }
  return std::nullopt;
}

CanonicalSet::CanonicalSet(NamespacePtr ns, std::vector<Command> cmds)
    : ns_(std::move(ns)), cmds_(sorted_commands(std::move(cmds))) {
  if (auto v = check_canonical_set(*ns_, cmds_)) throw NotCanonical(*v);
}

bool CanonicalSet::contains(const Command& c) const {
  return std::binary_search(cmds_.begin(), cmds_.end(), c);
}

const Command* CanonicalSet::find(const NodeId& n) const {
  auto it = std::lower_bound(cmds_.begin(), cmds_.end(), n,
                             [](const Command& c, const NodeId& key) { return c.node < key; });
  return (it != cmds_.end() && it->node == n) ? &*it : nullptr;
}

std::vector<Command> sorted_commands(std::vector<Command> cmds) {
  std::sort(cmds.begin(), cmds.end());
  cmds.erase(std::unique(cmds.begin(), cmds.end()), cmds.end());
  return cmds;
}

std::vector<Command> command_union(std::span<const Command> a, std::span<const Command> b) {
  std::vector<Command> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Command> command_intersection(std::span<const Command> a, std::span<const Command> b) {
  std::vector<Command> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<Command> command_difference(std::span<const Command> a, std::span<const Command> b) {
  std::vector<Command> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool command_subset(std::span<const Command> sub, std::span<const Command> super) {
  return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

SequenceCheck is_canonical_sequence(std::span<const Command> seq, const Namespace& ns) {
  if (auto v = check_canonical_set(ns, seq)) return {false, v};
  // (c1): only parent/child pairs can be ⊏-related.
  NodeIndex position;
  for (std::size_t i = 0; i < seq.size(); ++i) position.emplace(seq[i].node, i);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto parent = seq[i].node.parent();
    if (!parent) continue;
    auto it = position.find(*parent);
    if (it == position.end()) continue;
    const std::size_t j = it->second;
    const auto [early, late] = std::minmax(i, j);
    if (exec_order(seq[late], seq[early], ns))
      return {false, Violation{Clause::order, seq[late], seq[early]}};
  }
  return {};
}

Normalized normalize(std::span<const Command> seq, const Namespace& ns) {
  for (const auto& c : seq) ns.require(c.node);
  std::vector<Command> work(seq.begin(), seq.end());

  for (;;) {
    std::erase_if(work, [](const Command& c) { return is_null(c); });

    // Closest same-node pair; nothing between them touches that node.
    std::unordered_map<NodeId, std::size_t, NodeIdHash> last;
    std::size_t best_i = 0, best_j = 0;
    bool found = false;
    for (std::size_t j = 0; j < work.size(); ++j) {
      auto [it, inserted] = last.try_emplace(work[j].node, j);
      if (!inserted) {
        if (!found || j - it->second < best_j - best_i) {
          best_i = it->second;
          best_j = j;
          found = true;
        }
        it->second = j;
      }
    }
    if (!found) break;

    std::size_t i = best_i, j = best_j;
    while (j - i > 1) {
      if (independent(work[i], work[i + 1], ns)) {
        std::swap(work[i], work[i + 1]);
        ++i;
      } else if (independent(work[j - 1], work[j], ns)) {
        std::swap(work[j - 1], work[j]);
        --j;
      } else {
        return NotNormalizable{"cannot bring " + render(work[i]) + " and " + render(work[j]) +
                               " together: blocked by " + render(work[i + 1]) + " and " +
                               render(work[j - 1])};
      }
    }
    auto fused = compose_same_node(work[i], work[j]);
    if (std::holds_alternative<BreaksEverything>(fused)) {
      return NotNormalizable{"adjacent commands " + render(work[i]) + " and " + render(work[j]) +
                             " do not line up"};
    }
    work[i] = std::get<Command>(fused);
    work.erase(work.begin() + static_cast<std::ptrdiff_t>(j));
  }

  auto check = is_canonical_sequence(work, ns);
  if (!check.ok) return NotNormalizable{check.violation->describe()};
  return work;
}

CanonicalSet set_of(std::span<const Command> seq, const NamespacePtr& ns) {
  return CanonicalSet(ns, std::vector<Command>(seq.begin(), seq.end()));
}

namespace {

std::vector<Command> topological_order(const Namespace& ns, const std::vector<Command>& cmds) {
  const std::size_t n = cmds.size();
  NodeIndex index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(cmds[i].node, i);

  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto parent = cmds[i].node.parent();
    if (!parent) continue;
    auto it = index.find(*parent);
    if (it == index.end()) continue;
    const std::size_t p = it->second;
    if (exec_order(cmds[i], cmds[p], ns)) {
      succ[i].push_back(p);
      ++indegree[p];
    } else if (exec_order(cmds[p], cmds[i], ns)) {
      succ[p].push_back(i);
      ++indegree[i];
    }
  }
  // cmds is sorted by node, so the smallest index is the smallest node.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<Command> out;
  out.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    out.push_back(cmds[i]);
    for (std::size_t s : succ[i])
      if (--indegree[s] == 0) ready.push(s);
  }
  if (out.size() != n) throw InternalError("execution order has a cycle");
  return out;
}

}  // namespace

std::vector<Command> order(const CanonicalSet& a) { return topological_order(a.ns(), a.commands()); }

std::vector<Command> order(const NamespacePtr& ns, std::span<const Command> cmds) {
  return order(CanonicalSet(ns, std::vector<Command>(cmds.begin(), cmds.end())));
}

bool is_prefix_set(std::span<const Command> b, const CanonicalSet& a) {
  std::vector<Command> sub = sorted_commands(std::vector<Command>(b.begin(), b.end()));
  if (!command_subset(sub, a.commands()))
    throw UsageError("is_prefix_set: candidate prefix is not a subset of the set");
  const Namespace& ns = a.ns();
  for (const Command& tau : sub) {
    // Only commands on the parent or on children can precede tau under ⊏.
    if (auto parent = tau.node.parent()) {
      if (const Command* sigma = a.find(*parent);
          sigma && exec_order(*sigma, tau, ns) && !std::binary_search(sub.begin(), sub.end(), *sigma))
        return false;
    }
    for (const Command& sigma : a) {
      if (sigma.node.depth() == tau.node.depth() + 1 && tau.node.is_ancestor_of(sigma.node) &&
          exec_order(sigma, tau, ns) && !std::binary_search(sub.begin(), sub.end(), sigma))
        return false;
    }
  }
  if (check_canonical_set(ns, sub) ||
      check_canonical_set(ns, command_difference(a.commands(), sub))) {
    throw InternalError("prefix split produced a non-canonical part");
  }
  return true;
}

const char* to_string(ClusterKind k) noexcept {
  switch (k) {
    case ClusterKind::constructor: return "constructor";
    case ClusterKind::destructor: return "destructor";
    case ClusterKind::editor: return "editor";
  }
  return "?";
}

std::vector<Cluster> clusters(const CanonicalSet& a) {
  const auto& cmds = a.commands();
  const std::size_t n = cmds.size();
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  NodeIndex index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(cmds[i].node, i);
  for (std::size_t i = 0; i < n; ++i) {
    auto parent = cmds[i].node.parent();
    if (!parent) continue;
    auto it = index.find(*parent);
    if (it != index.end() && chained(cmds[i], cmds[it->second], a.ns())) {
      const std::size_t x = find(i), y = find(it->second);
      root[std::max(x, y)] = std::min(x, y);
    }
  }
  std::map<std::size_t, Cluster> by_root;
  for (std::size_t i = 0; i < n; ++i) {
    auto& cl = by_root[find(i)];
    cl.commands.push_back(cmds[i]);
  }
  std::vector<Cluster> out;
  for (auto& [r, cl] : by_root) {
    switch (classify(cl.commands.front())) {
      case CommandClass::constructor: cl.kind = ClusterKind::constructor; break;
      case CommandClass::destructor: cl.kind = ClusterKind::destructor; break;
      default: cl.kind = ClusterKind::editor; break;
    }
    out.push_back(std::move(cl));
  }
  return out;
}

FileSystem witness_filesystem(const CanonicalSet& a) {
  FileSystem fs(a.ns_ptr());
  for (const Command& c : a) {
    auto cur = c.node.parent();
    while (cur && !a.find(*cur)) {
      fs.set(*cur, Content::dir());
      cur = cur->parent();
    }
  }
  for (const Command& c : a) fs.set(c.node, c.before);
  auto outcome = apply_sequence(fs, order(a));
  if (!outcome.ok()) throw InternalError("witness filesystem broken: " + outcome.broken().describe());
  return fs;
}

}  // namespace recon
