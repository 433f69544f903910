#include "recon/fstree.hpp"

#include <cmath>

namespace recon {

namespace {

const Content kEmpty{};

bool has_visible_descendant(const std::map<NodeId, Content>& values, const NodeId& n) {
  auto it = values.upper_bound(n);
  return it != values.end() && n.is_ancestor_of(it->first);
}

}  // namespace

const Content& FileSystem::at(const NodeId& n) const {
  ns_->require(n);
  auto it = values_.find(n);
  return it == values_.end() ? kEmpty : it->second;
}

void FileSystem::set(const NodeId& n, Content c) {
  ns_->require(n);
  if (c.is_empty()) {
    values_.erase(n);
  } else {
    values_.insert_or_assign(n, std::move(c));
  }
}

bool operator==(const FileSystem& a, const FileSystem& b) {
  if (a.ns_ != b.ns_ && *a.ns_ != *b.ns_) return false;
  return a.values_ == b.values_;
}

TreeCheck check_tree_property(const FileSystem& fs) {
  const auto& values = fs.visible();
  for (const auto& [node, content] : values) {
    auto parent = node.parent();
    if (!parent) continue;
    auto it = values.find(*parent);
    if (it == values.end() || !it->second.is_dir()) return {false, node};
  }
  return {};
}

const char* to_string(BreakReason r) noexcept {
  switch (r) {
    case BreakReason::precondition_mismatch: return "precondition mismatch";
    case BreakReason::tree_violation: return "tree property violation";
  }
  return "?";
}

std::string Broken::describe() const {
  std::string out = "command #" + std::to_string(index) + " (" + render(command) + ") breaks: " +
                    to_string(reason);
  if (reason == BreakReason::tree_violation) out += " at " + violator.str();
  return out;
}

bool ApplyOutcome::same_effect(const ApplyOutcome& other) const {
  if (ok() != other.ok()) return false;
  return !ok() || fs() == other.fs();
}

std::optional<Broken> apply_in_place(FileSystem& fs, const Command& c, std::size_t index) {
  const NodeId& n = c.node;
  if (fs.at(n) != c.before) {
    return Broken{index, c, BreakReason::precondition_mismatch, n};
  }
  const auto& values = fs.visible();
  if (!c.after.is_empty()) {
    if (auto parent = n.parent()) {
      auto it = values.find(*parent);
      if (it == values.end() || !it->second.is_dir())
        return Broken{index, c, BreakReason::tree_violation, n};
    }
  }
  if (!c.after.is_dir() && has_visible_descendant(values, n)) {
    auto child = values.upper_bound(n);
    return Broken{index, c, BreakReason::tree_violation, child->first};
  }
  fs.set(n, c.after);
  return std::nullopt;
}

ApplyOutcome apply_command(const FileSystem& fs, const Command& c) {
  FileSystem next = fs;
  if (auto b = apply_in_place(next, c)) return *b;
  return next;
}

ApplyOutcome apply_sequence(const FileSystem& fs, std::span<const Command> seq) {
  FileSystem next = fs;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (auto b = apply_in_place(next, seq[i], i)) return *b;
  }
  return next;
}

void for_each_filesystem(const NamespacePtr& ns, const std::vector<std::string>& alphabet,
                         const std::function<void(const FileSystem&)>& visit, double bound) {
  const double estimate =
      std::pow(2.0 + static_cast<double>(alphabet.size()), static_cast<double>(ns->size()));
  if (estimate > bound) {
    throw BoundExceeded("filesystem enumeration would visit up to " + std::to_string(estimate) +
                            " states (bound " + std::to_string(bound) + ")",
                        estimate);
  }
  const auto& nodes = ns->nodes();
  FileSystem fs(ns);
  // Nodes are sorted so a parent is always decided before its children.
  std::function<void(std::size_t)> step = [&](std::size_t i) {
    if (i == nodes.size()) {
      visit(fs);
      return;
    }
    const NodeId& n = nodes[i];
    step(i + 1);
    auto parent = n.parent();
    if (parent && !fs.at(*parent).is_dir()) return;
    fs.set(n, Content::dir());
    step(i + 1);
    for (const auto& payload : alphabet) {
      fs.set(n, Content::file(payload));
      step(i + 1);
    }
    fs.set(n, Content::empty());
  };
  step(0);
}

std::vector<FileSystem> enumerate_filesystems(const NamespacePtr& ns,
                                              const std::vector<std::string>& alphabet,
                                              double bound) {
  std::vector<FileSystem> out;
  for_each_filesystem(ns, alphabet, [&](const FileSystem& fs) { out.push_back(fs); }, bound);
  return out;
}

}  // namespace recon
