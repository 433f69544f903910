#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recon/canonical.hpp"
#include "recon/kernels.hpp"

namespace recon {

/// Which replica a command (or a winner) comes from.
enum class Side { first, second };

const char* to_string(Side s) noexcept;

/// Content when both commands leave the same content type on the same node
/// (two different file payloads), structural otherwise.
enum class ConflictKind { structural, content };

const char* to_string(ConflictKind k) noexcept;

struct Conflict {
  Command left;   // from the first replica's set
  Command right;  // from the second replica's set
  ConflictKind kind = ConflictKind::structural;

  friend bool operator==(const Conflict&, const Conflict&) = default;
};

ConflictKind conflict_kind(const Command& left, const Command& right) noexcept;

/// Bipartite graph over two disjoint canonical sets; an edge joins every
/// cross pair on comparable nodes. Edges are sorted by (left node, right node).
struct ConflictGraph {
  CanonicalSet a_side;
  CanonicalSet b_side;
  std::vector<Conflict> edges;
};

/// Throws UsageError when the sets share a command.
ConflictGraph build_conflict_graph(const CanonicalSet& a, const CanonicalSet& b);

/// A filesystem both sets apply to, if there is one.
std::optional<FileSystem> refluence_witness(const CanonicalSet& a, const CanonicalSet& b);

bool is_merger(const CanonicalSet& a, const CanonicalSet& b, std::span<const Command> m);

inline constexpr std::size_t default_merger_bound = 20;

/// Every maximal canonical subset of a ∪ b, by exhaustive subset scan.
/// Throws BoundExceeded when |a ∪ b| > bound.
std::vector<CanonicalSet> enumerate_mergers(const CanonicalSet& a, const CanonicalSet& b,
                                            std::size_t bound = default_merger_bound);

enum class ContentPolicy { first, second, fail };

struct FirstWins {};
struct SecondWins {};
/// Constructors beat non-constructors. Other structural conflicts go to the
/// command leaving the higher content type (dir > file > empty). Content
/// conflicts follow `content`; `fail` aborts the run.
struct ConstructorWins {
  ContentPolicy content = ContentPolicy::fail;
};
/// Steer every choice toward `target`, which must be a merger of the inputs.
struct Guided {
  std::vector<Command> target;
};
/// A choice made by an interactive decider: which of the presented
/// conflicts to resolve and which side wins it.
struct Decision {
  std::size_t conflict = 0;  // index into the presented list
  Side winner = Side::first;
};

/// Ask a callback for every step. It sees the live conflicts with content
/// conflicts first, and may pick any of them. Returning nullopt aborts the
/// run (ResolutionAborted); an out-of-range choice is a ProtocolError.
struct Interactive {
  std::function<std::optional<Decision>(const std::vector<Conflict>&)> decide;
};

using Policy = std::variant<FirstWins, SecondWins, ConstructorWins, Guided, Interactive>;

/// One winner/loser step.
struct ResolutionStep {
  Conflict conflict;
  Side winner = Side::first;
  std::vector<Command> removed;         // loser-side commands dropped
  std::vector<Conflict> removed_edges;  // every edge that disappeared
  std::size_t edges_before = 0;
  std::size_t edges_after = 0;
};

/// Stepwise conflict resolution over two disjoint canonical sets.
///
/// The engine only ever deletes commands: a winner's conflicting commands on
/// the other side are dropped, which can only remove edges. The residues stay
/// ⊑c-prefixes of the inputs throughout.
class Resolver {
 public:
  Resolver(const CanonicalSet& a, const CanonicalSet& b);

  const ConflictGraph& initial_graph() const noexcept { return graph_; }

  std::vector<Conflict> live_conflicts() const;
  std::size_t live_count() const noexcept { return live_edges_; }
  bool finished() const noexcept { return live_edges_ == 0; }

  /// Index of `c` in the initial edge list.
  std::optional<std::size_t> index_of(const Conflict& c) const;
  /// Same, but only if the edge is still live.
  std::optional<std::size_t> live_index(const Conflict& c) const;
  bool edge_live(std::size_t edge) const;

  /// Throws UsageError if `c` is not a live conflict.
  ResolutionStep resolve(const Conflict& c, Side winner);

  CanonicalSet residue_first() const;
  CanonicalSet residue_second() const;

  /// a ∪ b of the current residues.
  std::vector<Command> current_union() const;

 private:
  ConflictGraph graph_;
  std::vector<kernels::IndexPair> pairs_;
  std::vector<std::vector<std::size_t>> adj_first_, adj_second_;
  std::vector<bool> alive_first_, alive_second_;
  std::size_t live_edges_ = 0;
};

struct Resolution {
  CanonicalSet merger;
  std::vector<Command> common;  // a ∩ b, always kept
  std::vector<ResolutionStep> steps;
  std::size_t initial_conflicts = 0;
};

/// Live conflicts in the order an interactive decider sees them: content
/// conflicts first, each group in edge order.
std::vector<Conflict> presented_conflicts(const Resolver& r);

/// Chooses the next conflict and its winner for `policy`, or nullopt when
/// finished. Shared by the batch driver and by interactive sessions.
std::optional<std::pair<Conflict, Side>> next_decision(const Resolver& r, const Policy& policy);

/// Conflict resolution on disjoint sets. Guided targets are validated first.
Resolution reconcile_disjoint(const CanonicalSet& a, const CanonicalSet& b, const Policy& policy);

/// General case: sets aside a ∩ b, resolves the rest, adds it back.
Resolution reconcile(const CanonicalSet& a, const CanonicalSet& b, const Policy& policy);

struct ReplicaPlan {
  std::vector<Command> rollback;  // already inverted, in execution order
  std::vector<Command> apply;

  friend bool operator==(const ReplicaPlan&, const ReplicaPlan&) = default;
};

/// Per-replica rollback/apply lists that take each replica to merger·FS.
struct MergePlan {
  CanonicalSet merger;
  ReplicaPlan first;
  ReplicaPlan second;
};

/// Throws ValidationError if `m` is not a merger of a and b. Verifies both
/// plans on a common witness filesystem before returning.
MergePlan merge_plan(const CanonicalSet& a, const CanonicalSet& b, const CanonicalSet& m);

/// Conflict graph with each constructor cluster folded into one vertex.
struct CollapsedGraph {
  struct Vertex {
    Side side;
    std::vector<Command> members;  // more than one only for folded clusters
  };
  std::vector<Vertex> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (first-side vertex, second-side vertex)
};

/// Throws InternalError if two members of a constructor cluster have
/// different conflict neighbourhoods.
CollapsedGraph collapse_constructor_clusters(const ConflictGraph& g);

}  // namespace recon
