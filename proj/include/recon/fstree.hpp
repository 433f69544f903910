#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "recon/command.hpp"
#include "recon/namespace.hpp"

namespace recon {

/// Filesystem state over a namespace. Empty nodes are stored implicitly.
///
/// `set` exists for construction; all algebra operations return new values.
/// Validity (the tree property) is not enforced by `set`; callers that
/// ingest external data run `check_tree_property`.
class FileSystem {
 public:
  FileSystem() : ns_(std::make_shared<const Namespace>()) {}
  explicit FileSystem(NamespacePtr ns) : ns_(std::move(ns)) {}

  const Namespace& ns() const noexcept { return *ns_; }
  const NamespacePtr& ns_ptr() const noexcept { return ns_; }

  const Content& at(const NodeId& n) const;
  void set(const NodeId& n, Content c);

  /// Non-empty nodes in namespace order.
  const std::map<NodeId, Content>& visible() const noexcept { return values_; }

  /// Same namespace contents and same values.
  friend bool operator==(const FileSystem& a, const FileSystem& b);

 private:
  NamespacePtr ns_;
  std::map<NodeId, Content> values_;
};

struct TreeCheck {
  bool ok = true;
  std::optional<NodeId> violator;
};

/// True iff every non-empty, non-root node has a directory parent.
TreeCheck check_tree_property(const FileSystem& fs);

enum class BreakReason { precondition_mismatch, tree_violation };

const char* to_string(BreakReason r) noexcept;

/// The failure outcome of applying a command or a sequence.
struct Broken {
  std::size_t index = 0;  // position of the failing command in the sequence
  Command command;
  BreakReason reason = BreakReason::precondition_mismatch;
  NodeId violator;        // node whose tree-property check failed, or the command node

  std::string describe() const;
};

class ApplyOutcome {
 public:
  ApplyOutcome(FileSystem fs) : value_(std::move(fs)) {}  // NOLINT: implicit by design of the fold
  ApplyOutcome(Broken b) : value_(std::move(b)) {}        // NOLINT

  bool ok() const noexcept { return std::holds_alternative<FileSystem>(value_); }
  explicit operator bool() const noexcept { return ok(); }

  const FileSystem& fs() const { return std::get<FileSystem>(value_); }
  FileSystem& fs() { return std::get<FileSystem>(value_); }
  const Broken& broken() const { return std::get<Broken>(value_); }

  /// Outcomes match if both broke, or both succeeded with equal filesystems.
  bool same_effect(const ApplyOutcome& other) const;

 private:
  std::variant<FileSystem, Broken> value_;
};

ApplyOutcome apply_command(const FileSystem& fs, const Command& c);
ApplyOutcome apply_sequence(const FileSystem& fs, std::span<const Command> seq);

/// In-place variant used on hot paths; leaves `fs` unspecified when broken.
std::optional<Broken> apply_in_place(FileSystem& fs, const Command& c, std::size_t index = 0);

inline constexpr double default_enumeration_bound = 1e6;

/// Visits every valid filesystem over `ns` whose files carry payloads from
/// `alphabet`, each exactly once, in a fixed order. Refuses with
/// BoundExceeded when (2 + |alphabet|)^|ns| exceeds `bound`.
void for_each_filesystem(const NamespacePtr& ns, const std::vector<std::string>& alphabet,
                         const std::function<void(const FileSystem&)>& visit,
                         double bound = default_enumeration_bound);

std::vector<FileSystem> enumerate_filesystems(const NamespacePtr& ns,
                                              const std::vector<std::string>& alphabet,
                                              double bound = default_enumeration_bound);

}  // namespace recon
