#include "recon/namespace.hpp"

#include <algorithm>
#include <functional>

namespace recon {

NodeId::NodeId(std::vector<std::string> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw ParseError("node path has no segments");
  for (const auto& s : segments_) {
    if (s.empty()) throw ParseError("empty path segment");
    if (s.find('/') != std::string::npos)
      throw ParseError("path segment contains a separator: " + s);
  }
}

NodeId NodeId::parse(std::string_view path) {
  if (path.empty() || path.front() != '/')
    throw ParseError("path must be absolute: '" + std::string(path) + "'");
  if (path.size() > 1 && path.back() == '/') path.remove_suffix(1);
  std::vector<std::string> segs;
  std::size_t pos = 1;
  while (pos <= path.size()) {
    auto next = path.find('/', pos);
    if (next == std::string_view::npos) next = path.size();
    if (next == pos) throw ParseError("empty segment in path '" + std::string(path) + "'");
    segs.emplace_back(path.substr(pos, next - pos));
    pos = next + 1;
  }
  return NodeId(std::move(segs));
}

std::optional<NodeId> NodeId::parent() const {
  if (segments_.size() <= 1) return std::nullopt;
  NodeId p;
  p.segments_.assign(segments_.begin(), segments_.end() - 1);
  return p;
}

bool NodeId::is_ancestor_of(const NodeId& other) const noexcept {
  if (segments_.size() >= other.segments_.size()) return false;
  return std::equal(segments_.begin(), segments_.end(), other.segments_.begin());
}

std::string NodeId::str() const {
  std::string out;
  for (const auto& s : segments_) {
    out += '/';
    out += s;
  }
  return out.empty() ? "/" : out;
}

std::size_t NodeIdHash::operator()(const NodeId& n) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (const auto& s : n.segments()) {
    h ^= std::hash<std::string>{}(s) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

const char* to_string(Relation r) noexcept {
  switch (r) {
    case Relation::equal: return "equal";
    case Relation::above: return "above";
    case Relation::below: return "below";
    case Relation::independent: return "independent";
  }
  return "?";
}

Namespace Namespace::build(const std::vector<NodeId>& paths) {
  std::vector<NodeId> all;
  for (const auto& p : paths) {
    std::optional<NodeId> cur = p;
    while (cur) {
      all.push_back(*cur);
      cur = cur->parent();
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return Namespace(std::move(all));
}

bool Namespace::contains(const NodeId& n) const noexcept {
  return std::binary_search(nodes_.begin(), nodes_.end(), n);
}

void Namespace::require(const NodeId& n) const {
  if (!contains(n)) throw UnknownNode(n);
}

std::optional<NodeId> Namespace::parent(const NodeId& n) const {
  require(n);
  return n.parent();
}

std::vector<NodeId> Namespace::children(const NodeId& n) const {
  require(n);
  std::vector<NodeId> out;
  // Descendants of n form the contiguous run right after n.
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), n);
  for (; it != nodes_.end() && n.is_ancestor_of(*it); ++it) {
    if (it->depth() == n.depth() + 1) out.push_back(*it);
  }
  return out;
}

std::vector<NodeId> Namespace::roots() const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.is_root()) out.push_back(n);
  return out;
}

Relation Namespace::compare(const NodeId& n, const NodeId& m) const {
  require(n);
  require(m);
  if (n == m) return Relation::equal;
  if (n.is_ancestor_of(m)) return Relation::above;
  if (m.is_ancestor_of(n)) return Relation::below;
  return Relation::independent;
}

}  // namespace recon
