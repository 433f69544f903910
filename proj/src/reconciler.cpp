#include "recon/reconciler.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace recon {

const char* to_string(Side s) noexcept { return s == Side::first ? "a" : "b"; }

const char* to_string(ConflictKind k) noexcept {
  return k == ConflictKind::content ? "content" : "structural";
}

ConflictKind conflict_kind(const Command& left, const Command& right) noexcept {
  return left.node == right.node && left.after.kind() == right.after.kind() ? ConflictKind::content
                                                                             : ConflictKind::structural;
}

namespace {

std::vector<NodeId> nodes_of(const CanonicalSet& s) {
  std::vector<NodeId> out;
  out.reserve(s.size());
  for (const auto& c : s) out.push_back(c.node);
  return out;
}

std::vector<kernels::IndexPair> conflict_pairs_of(const CanonicalSet& a, const CanonicalSet& b) {
  if (!command_intersection(a.commands(), b.commands()).empty())
    throw UsageError("conflict graph needs disjoint command sets; use reconcile for the general case");
  const auto na = nodes_of(a);
  const auto nb = nodes_of(b);
  return kernels::omp::conflict_pairs(na, nb);
}

ConflictGraph graph_from_pairs(const CanonicalSet& a, const CanonicalSet& b,
                               const std::vector<kernels::IndexPair>& pairs) {
  ConflictGraph g{a, b, {}};
  g.edges.reserve(pairs.size());
  for (auto [i, j] : pairs) {
    const Command& l = a.commands()[i];
    const Command& r = b.commands()[j];
    g.edges.push_back(Conflict{l, r, conflict_kind(l, r)});
  }
  return g;
}

bool chained(const Command& x, const Command& y, const Namespace& ns) {
  return exec_order(x, y, ns) || exec_order(y, x, ns);
}

void require_same_namespace(const CanonicalSet& a, const CanonicalSet& b) {
  if (a.ns_ptr() != b.ns_ptr() && a.ns() != b.ns())
    throw UsageError("command sets are over different namespaces");
}

}  // namespace

ConflictGraph build_conflict_graph(const CanonicalSet& a, const CanonicalSet& b) {
  require_same_namespace(a, b);
  return graph_from_pairs(a, b, conflict_pairs_of(a, b));
}

std::optional<FileSystem> refluence_witness(const CanonicalSet& a, const CanonicalSet& b) {
  require_same_namespace(a, b);
  std::map<NodeId, Content> inputs;
  for (const auto* set : {&a, &b}) {
    for (const auto& c : *set) {
      auto [it, inserted] = inputs.emplace(c.node, c.before);
      if (!inserted && it->second != c.before) return std::nullopt;
    }
  }
  FileSystem fs(a.ns_ptr());
  for (const auto& [node, before] : inputs) {
    auto cur = node.parent();
    while (cur && !inputs.contains(*cur)) {
      fs.set(*cur, Content::dir());
      cur = cur->parent();
    }
  }
  for (const auto& [node, before] : inputs) fs.set(node, before);
  if (!check_tree_property(fs).ok) return std::nullopt;
  if (!apply_sequence(fs, order(a)).ok() || !apply_sequence(fs, order(b)).ok()) return std::nullopt;
  return fs;
}

bool is_merger(const CanonicalSet& a, const CanonicalSet& b, std::span<const Command> m) {
  require_same_namespace(a, b);
  const auto all = command_union(a.commands(), b.commands());
  auto sorted = sorted_commands(std::vector<Command>(m.begin(), m.end()));
  if (!command_subset(sorted, all)) return false;
  if (check_canonical_set(a.ns(), sorted)) return false;
  for (const Command& extra : command_difference(all, sorted)) {
    auto grown = sorted;
    grown.insert(std::upper_bound(grown.begin(), grown.end(), extra), extra);
    if (!check_canonical_set(a.ns(), grown)) return false;
  }
  return true;
}

std::vector<CanonicalSet> enumerate_mergers(const CanonicalSet& a, const CanonicalSet& b,
                                            std::size_t bound) {
  require_same_namespace(a, b);
  const auto all = command_union(a.commands(), b.commands());
  const std::size_t n = all.size();
  if (n > bound || n > kernels::max_subset_bits) {
    throw BoundExceeded("merger enumeration over " + std::to_string(n) +
                            " commands exceeds the bound of " +
                            std::to_string(std::min(bound, kernels::max_subset_bits)),
                        static_cast<double>(n));
  }
  kernels::SubsetModel model;
  model.size = n;
  model.clash.assign(n, 0);
  model.ancestors.assign(n, 0);
  model.linked_parent.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const kernels::Mask bit = kernels::Mask{1} << j;
      const NodeId& ni = all[i].node;
      const NodeId& nj = all[j].node;
      if (ni == nj) model.clash[i] |= bit;
      if (nj.is_ancestor_of(ni)) {
        model.ancestors[i] |= bit;
        if (nj.depth() + 1 == ni.depth() && chained(all[i], all[j], a.ns()))
          model.linked_parent[i] |= bit;
      }
    }
  }
  std::vector<CanonicalSet> out;
  for (kernels::Mask s : kernels::omp::maximal_subsets(model)) {
    std::vector<Command> cmds;
    for (std::size_t i = 0; i < n; ++i)
      if (s & (kernels::Mask{1} << i)) cmds.push_back(all[i]);
    out.emplace_back(a.ns_ptr(), std::move(cmds));
  }
  return out;
}

Resolver::Resolver(const CanonicalSet& a, const CanonicalSet& b)
    : graph_{a, b, {}},
      adj_first_(a.size()),
      adj_second_(b.size()),
      alive_first_(a.size(), true),
      alive_second_(b.size(), true) {
  require_same_namespace(a, b);
  pairs_ = conflict_pairs_of(a, b);
  graph_ = graph_from_pairs(a, b, pairs_);
  for (std::size_t e = 0; e < pairs_.size(); ++e) {
    adj_first_[pairs_[e].first].push_back(e);
    adj_second_[pairs_[e].second].push_back(e);
  }
  live_edges_ = pairs_.size();
}

bool Resolver::edge_live(std::size_t edge) const {
  return edge < pairs_.size() && alive_first_[pairs_[edge].first] &&
         alive_second_[pairs_[edge].second];
}

std::vector<Conflict> Resolver::live_conflicts() const {
  std::vector<Conflict> out;
  out.reserve(live_edges_);
  for (std::size_t e = 0; e < pairs_.size(); ++e)
    if (edge_live(e)) out.push_back(graph_.edges[e]);
  return out;
}

std::optional<std::size_t> Resolver::index_of(const Conflict& c) const {
  auto it = std::lower_bound(graph_.edges.begin(), graph_.edges.end(), c,
                             [](const Conflict& x, const Conflict& y) {
                               return std::tie(x.left.node, x.right.node) <
                                      std::tie(y.left.node, y.right.node);
                             });
  if (it == graph_.edges.end() || it->left != c.left || it->right != c.right) return std::nullopt;
  return static_cast<std::size_t>(it - graph_.edges.begin());
}

std::optional<std::size_t> Resolver::live_index(const Conflict& c) const {
  auto e = index_of(c);
  if (e && edge_live(*e)) return e;
  return std::nullopt;
}

ResolutionStep Resolver::resolve(const Conflict& c, Side winner) {
  auto e = live_index(c);
  if (!e) throw UsageError("conflict is not live: " + render(c.left) + " vs " + render(c.right));
  if (winner != Side::first && winner != Side::second)
    throw ProtocolError("winner is neither side of the conflict");

  ResolutionStep step;
  step.conflict = graph_.edges[*e];
  step.winner = winner;
  step.edges_before = live_edges_;

  const auto [wi, wj] = pairs_[*e];
  const auto& winner_adj = winner == Side::first ? adj_first_[wi] : adj_second_[wj];
  std::vector<std::size_t> losers;
  for (std::size_t edge : winner_adj) {
    if (!edge_live(edge)) continue;
    losers.push_back(winner == Side::first ? pairs_[edge].second : pairs_[edge].first);
  }
  auto& loser_alive = winner == Side::first ? alive_second_ : alive_first_;
  const auto& loser_adj = winner == Side::first ? adj_second_ : adj_first_;
  const auto& loser_cmds =
      winner == Side::first ? graph_.b_side.commands() : graph_.a_side.commands();
  std::set<std::size_t> gone_edges;
  for (std::size_t v : losers) {
    for (std::size_t edge : loser_adj[v])
      if (edge_live(edge)) gone_edges.insert(edge);
  }
  for (std::size_t v : losers) {
    loser_alive[v] = false;
    step.removed.push_back(loser_cmds[v]);
  }
  std::sort(step.removed.begin(), step.removed.end());
  for (std::size_t edge : gone_edges) step.removed_edges.push_back(graph_.edges[edge]);
  live_edges_ -= gone_edges.size();
  step.edges_after = live_edges_;
  return step;
}

CanonicalSet Resolver::residue_first() const {
  std::vector<Command> out;
  for (std::size_t i = 0; i < alive_first_.size(); ++i)
    if (alive_first_[i]) out.push_back(graph_.a_side.commands()[i]);
  return CanonicalSet(graph_.a_side.ns_ptr(), std::move(out));
}

CanonicalSet Resolver::residue_second() const {
  std::vector<Command> out;
  for (std::size_t j = 0; j < alive_second_.size(); ++j)
    if (alive_second_[j]) out.push_back(graph_.b_side.commands()[j]);
  return CanonicalSet(graph_.b_side.ns_ptr(), std::move(out));
}

std::vector<Command> Resolver::current_union() const {
  return command_union(residue_first().commands(), residue_second().commands());
}

namespace {

Side constructor_wins(const Conflict& c, ContentPolicy content) {
  if (c.kind == ConflictKind::content) {
    switch (content) {
      case ContentPolicy::first: return Side::first;
      case ContentPolicy::second: return Side::second;
      case ContentPolicy::fail:
        throw ResolutionAborted("content conflict needs an explicit decision: " + render(c.left) +
                                " vs " + render(c.right));
    }
  }
  const bool lc = is_constructor(c.left), rc = is_constructor(c.right);
  if (lc != rc) return lc ? Side::first : Side::second;
  return c.left.after.kind() > c.right.after.kind() ? Side::first : Side::second;
}

}  // namespace

std::vector<Conflict> presented_conflicts(const Resolver& r) {
  auto live = r.live_conflicts();
  std::stable_partition(live.begin(), live.end(),
                        [](const Conflict& c) { return c.kind == ConflictKind::content; });
  return live;
}

std::optional<std::pair<Conflict, Side>> next_decision(const Resolver& r, const Policy& policy) {
  if (r.finished()) return std::nullopt;
  const auto live = r.live_conflicts();
  return std::visit(
      [&](const auto& p) -> std::optional<std::pair<Conflict, Side>> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, FirstWins>) {
          return std::pair{live.front(), Side::first};
        } else if constexpr (std::is_same_v<P, SecondWins>) {
          return std::pair{live.front(), Side::second};
        } else if constexpr (std::is_same_v<P, ConstructorWins>) {
          return std::pair{live.front(), constructor_wins(live.front(), p.content)};
        } else if constexpr (std::is_same_v<P, Guided>) {
          for (const auto& c : live) {
            if (std::binary_search(p.target.begin(), p.target.end(), c.left))
              return std::pair{c, Side::first};
            if (std::binary_search(p.target.begin(), p.target.end(), c.right))
              return std::pair{c, Side::second};
          }
          throw InternalError("guided resolution: no live conflict touches the target merger");
        } else {
          if (!p.decide) throw UsageError("interactive policy without a decision callback");
          const auto shown = presented_conflicts(r);
          auto d = p.decide(shown);
          if (!d) throw ResolutionAborted("conflict resolution aborted");
          if (d->conflict >= shown.size())
            throw ProtocolError("decision names conflict " + std::to_string(d->conflict) + " of " +
                                std::to_string(shown.size()));
          if (d->winner != Side::first && d->winner != Side::second)
            throw ProtocolError("decision names a side outside the presented conflict");
          return std::pair{shown[d->conflict], d->winner};
        }
      },
      policy);
}

namespace {

Policy normalized_policy(const Policy& policy) {
  if (const auto* g = std::get_if<Guided>(&policy))
    return Guided{sorted_commands(g->target)};
  return policy;
}

}  // namespace

Resolution reconcile_disjoint(const CanonicalSet& a, const CanonicalSet& b, const Policy& policy) {
  const Policy p = normalized_policy(policy);
  if (const auto* g = std::get_if<Guided>(&p)) {
    if (!is_merger(a, b, g->target)) throw ValidationError("guided target is not a merger of the inputs");
  }
  Resolver r(a, b);
  Resolution out{CanonicalSet(a.ns_ptr()), {}, {}, r.live_count()};
  while (auto d = next_decision(r, p)) out.steps.push_back(r.resolve(d->first, d->second));
  out.merger = CanonicalSet(a.ns_ptr(), r.current_union());
  return out;
}

Resolution reconcile(const CanonicalSet& a, const CanonicalSet& b, const Policy& policy) {
  require_same_namespace(a, b);
  const auto common = command_intersection(a.commands(), b.commands());
  Policy p = normalized_policy(policy);
  if (auto* g = std::get_if<Guided>(&p)) {
    if (!is_merger(a, b, g->target)) throw ValidationError("guided target is not a merger of the inputs");
    if (!command_subset(common, g->target))
      throw ValidationError("guided target does not contain the commands both replicas share");
    g->target = command_difference(g->target, common);
  }
  CanonicalSet ra(a.ns_ptr(), command_difference(a.commands(), common));
  CanonicalSet rb(b.ns_ptr(), command_difference(b.commands(), common));
  Resolution out = reconcile_disjoint(ra, rb, p);
  out.merger = CanonicalSet(a.ns_ptr(), command_union(out.merger.commands(), common));
  out.common = common;
  return out;
}

MergePlan merge_plan(const CanonicalSet& a, const CanonicalSet& b, const CanonicalSet& m) {
  if (!is_merger(a, b, m.commands())) throw ValidationError("not a merger of the two update sets");
  auto ordered = [&](std::vector<Command> cmds) {
    auto v = check_canonical_set(a.ns(), cmds);
    if (v) throw InternalError("plan part is not canonical: " + v->describe());
    return order(CanonicalSet(a.ns_ptr(), std::move(cmds)));
  };
  MergePlan plan{m, {}, {}};
  const auto a_rollback = ordered(command_difference(a.commands(), m.commands()));
  const auto b_rollback = ordered(command_difference(b.commands(), m.commands()));
  plan.first.rollback = invert_sequence(a_rollback);
  plan.first.apply = ordered(command_difference(m.commands(), a.commands()));
  plan.second.rollback = invert_sequence(b_rollback);
  plan.second.apply = ordered(command_difference(m.commands(), b.commands()));

  auto witness = refluence_witness(a, b);
  if (!witness) throw ValidationError("update sets are not refluent");
  auto merged = apply_sequence(*witness, order(m));
  if (!merged.ok()) throw InternalError("merger breaks the common filesystem: " + merged.broken().describe());
  for (const auto& [set, rp] : {std::pair{&a, &plan.first}, std::pair{&b, &plan.second}}) {
    auto replica = apply_sequence(*witness, order(*set));
    if (!replica.ok()) throw InternalError("update set breaks its own witness");
    auto rolled = apply_sequence(replica.fs(), rp->rollback);
    if (!rolled.ok()) throw InternalError("rollback breaks: " + rolled.broken().describe());
    auto done = apply_sequence(rolled.fs(), rp->apply);
    if (!done.ok() || done.fs() != merged.fs())
      throw InternalError("replica plan does not reach the merged state");
  }
  return plan;
}

CollapsedGraph collapse_constructor_clusters(const ConflictGraph& g) {
  CollapsedGraph out;
  std::map<std::pair<Side, Command>, std::size_t> vertex_of;
  std::map<std::pair<Side, Command>, std::set<Command>> neighbours;
  for (const auto& e : g.edges) {
    neighbours[{Side::first, e.left}].insert(e.right);
    neighbours[{Side::second, e.right}].insert(e.left);
  }
  for (Side side : {Side::first, Side::second}) {
    const CanonicalSet& set = side == Side::first ? g.a_side : g.b_side;
    for (const auto& cl : clusters(set)) {
      const bool fold = cl.kind == ClusterKind::constructor;
      if (fold) {
        const auto& ref = neighbours[{side, cl.commands.front()}];
        for (const auto& c : cl.commands) {
          if (neighbours[{side, c}] != ref)
            throw InternalError("constructor cluster members disagree on conflicts: " + render(c));
        }
        out.vertices.push_back({side, cl.commands});
        for (const auto& c : cl.commands) vertex_of[{side, c}] = out.vertices.size() - 1;
      } else {
        for (const auto& c : cl.commands) {
          out.vertices.push_back({side, {c}});
          vertex_of[{side, c}] = out.vertices.size() - 1;
        }
      }
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& e : g.edges)
    edges.emplace(vertex_of.at({Side::first, e.left}), vertex_of.at({Side::second, e.right}));
  out.edges.assign(edges.begin(), edges.end());
  return out;
}

}  // namespace recon
