#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "recon/algebra.hpp"
#include "recon/fstree.hpp"

namespace recon {

/// Which canonicity clause a command set or sequence violates.
enum class Clause {
  null_command,    // (a)
  duplicate_node,  // (b)
  order,           // (c1) a ⊏-related pair appears out of order
  connectivity,    // (c2) comparable commands without a ⊏-chain between them
};

const char* to_string(Clause c) noexcept;

struct Violation {
  Clause clause;
  Command first;
  std::optional<Command> second;

  std::string describe() const;
};

class NotCanonical : public ValidationError {
 public:
  explicit NotCanonical(Violation v) : ValidationError(v.describe()), violation_(std::move(v)) {}
  const Violation& violation() const noexcept { return violation_; }

 private:
  Violation violation_;
};

/// Checks clauses (a), (b) and (c2) for an unordered command collection.
std::optional<Violation> check_canonical_set(const Namespace& ns, std::span<const Command> cmds);

/// A canonical command set: no null commands, at most one command per node,
/// and ⊏-connected. Validated on construction, so every value is canonical.
/// Commands are kept sorted, which for one-command-per-node means by node.
class CanonicalSet {
 public:
  explicit CanonicalSet(NamespacePtr ns) : ns_(std::move(ns)) {}
  CanonicalSet(NamespacePtr ns, std::vector<Command> cmds);

  const Namespace& ns() const noexcept { return *ns_; }
  const NamespacePtr& ns_ptr() const noexcept { return ns_; }

  const std::vector<Command>& commands() const noexcept { return cmds_; }
  std::size_t size() const noexcept { return cmds_.size(); }
  bool empty() const noexcept { return cmds_.empty(); }
  auto begin() const noexcept { return cmds_.begin(); }
  auto end() const noexcept { return cmds_.end(); }

  bool contains(const Command& c) const;
  const Command* find(const NodeId& n) const;

  friend bool operator==(const CanonicalSet& a, const CanonicalSet& b) {
    return a.cmds_ == b.cmds_;
  }

 private:
  NamespacePtr ns_;
  std::vector<Command> cmds_;
};

// Sorted-range helpers over command collections.
std::vector<Command> sorted_commands(std::vector<Command> cmds);
std::vector<Command> command_union(std::span<const Command> a, std::span<const Command> b);
std::vector<Command> command_intersection(std::span<const Command> a, std::span<const Command> b);
std::vector<Command> command_difference(std::span<const Command> a, std::span<const Command> b);
bool command_subset(std::span<const Command> sub, std::span<const Command> super);

struct SequenceCheck {
  bool ok = true;
  std::optional<Violation> violation;
};

/// Purely syntactic test: (a) no nulls, (b) distinct nodes, (c1) honors ⊏,
/// (c2) ⊏-connected.
SequenceCheck is_canonical_sequence(std::span<const Command> seq, const Namespace& ns);

/// The sequence breaks every filesystem; carries the pair that proves it.
struct NotNormalizable {
  std::string reason;
};

using Normalized = std::variant<std::vector<Command>, NotNormalizable>;

/// Rewrites an arbitrary sequence into a canonical one that has the same
/// effect wherever the input does not break. Drops nulls, brings same-node
/// pairs together by commuting independent neighbours, and fuses them.
Normalized normalize(std::span<const Command> seq, const Namespace& ns);

CanonicalSet set_of(std::span<const Command> seq, const NamespacePtr& ns);

/// A ⊏-honoring order of `a`: topological sort, ties broken by node order.
std::vector<Command> order(const CanonicalSet& a);

/// Same, for a raw collection; throws NotCanonical if it is not canonical.
std::vector<Command> order(const NamespacePtr& ns, std::span<const Command> cmds);

/// B ⊑c A: `b` can be executed first. Requires b ⊆ a (UsageError otherwise).
bool is_prefix_set(std::span<const Command> b, const CanonicalSet& a);

enum class ClusterKind { constructor, destructor, editor };

const char* to_string(ClusterKind k) noexcept;

struct Cluster {
  ClusterKind kind;
  std::vector<Command> commands;  // sorted
};

/// Connected components of the ⊏ relation inside `a`, ordered by their
/// smallest node.
std::vector<Cluster> clusters(const CanonicalSet& a);

/// A filesystem `a` does not break: mentioned nodes hold the commands' inputs,
/// their other ancestors are directories, everything else is empty.
FileSystem witness_filesystem(const CanonicalSet& a);

}  // namespace recon
