#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recon/error.hpp"

namespace recon {

/// A node of the namespace, identified by its full path.
///
/// Segments are non-empty and never contain '/'. Ordering is lexicographic on
/// the segment list, which places every node before its descendants and keeps
/// each subtree contiguous; several algorithms rely on that.
class NodeId {
 public:
  NodeId() = default;
  explicit NodeId(std::vector<std::string> segments);

  /// Parses "/a/b/c". A single trailing slash is tolerated; anything that
  /// yields an empty segment is a ParseError.
  static NodeId parse(std::string_view path);

  const std::vector<std::string>& segments() const noexcept { return segments_; }
  std::size_t depth() const noexcept { return segments_.size(); }
  bool is_root() const noexcept { return segments_.size() == 1; }

  /// The one-segment-shorter prefix; absent for roots.
  std::optional<NodeId> parent() const;

  /// True iff this is a strict ancestor of `other`.
  bool is_ancestor_of(const NodeId& other) const noexcept;

  std::string str() const;

  friend bool operator==(const NodeId&, const NodeId&) = default;
  friend std::strong_ordering operator<=>(const NodeId& a, const NodeId& b) {
    return a.segments_ <=> b.segments_;
  }

 private:
  std::vector<std::string> segments_;
};

struct NodeIdHash {
  std::size_t operator()(const NodeId& n) const noexcept;
};

class ParseError : public ValidationError {
 public:
  explicit ParseError(const std::string& what) : ValidationError(what) {}
};

class UnknownNode : public UsageError {
 public:
  explicit UnknownNode(const NodeId& n)
      : UsageError("unknown node " + n.str()), node_(n) {}
  const NodeId& node() const noexcept { return node_; }

 private:
  NodeId node_;
};

enum class Relation { equal, above, below, independent };

const char* to_string(Relation r) noexcept;

/// The fixed forest of paths a synchronization run works over.
/// Immutable once built; always ancestor-closed.
class Namespace {
 public:
  Namespace() = default;

  /// Ancestor closure of `paths`. Result does not depend on input order.
  static Namespace build(const std::vector<NodeId>& paths);

  bool contains(const NodeId& n) const noexcept;
  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  /// Sorted; parents precede children.
  const std::vector<NodeId>& nodes() const noexcept { return nodes_; }

  std::optional<NodeId> parent(const NodeId& n) const;
  std::vector<NodeId> children(const NodeId& n) const;
  std::vector<NodeId> roots() const;

  /// How `n` relates to `m`: Above means n is a strict ancestor of m.
  Relation compare(const NodeId& n, const NodeId& m) const;

  void require(const NodeId& n) const;

  friend bool operator==(const Namespace&, const Namespace&) = default;

 private:
  explicit Namespace(std::vector<NodeId> sorted) : nodes_(std::move(sorted)) {}

  std::vector<NodeId> nodes_;
};

using NamespacePtr = std::shared_ptr<const Namespace>;

inline NamespacePtr make_namespace(const std::vector<NodeId>& paths) {
  return std::make_shared<const Namespace>(Namespace::build(paths));
}

}  // namespace recon
