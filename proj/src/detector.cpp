#include "recon/detector.hpp"

#include <unordered_map>

namespace recon {

UpdateLog::UpdateLog(FileSystem original, std::vector<Command> entries)
    : original_(std::move(original)), entries_(std::move(entries)) {
  if (auto tc = check_tree_property(original_); !tc.ok)
    throw ValidationError("log origin violates the tree property at " + tc.violator->str());
  for (const auto& c : entries_) {
    if (!original_.ns().contains(c.node))
      throw ValidationError("log entry on node outside the namespace: " + c.node.str());
  }
  auto outcome = apply_sequence(original_, entries_);
  if (!outcome.ok()) throw ValidationError("log does not apply: " + outcome.broken().describe());
  final_ = std::move(outcome.fs());
}

CanonicalSet diff_states(const FileSystem& original, const FileSystem& replica) {
  if (original.ns() != replica.ns())
    throw UsageError("diff_states: filesystems are over different namespaces");
  if (auto tc = check_tree_property(original); !tc.ok)
    throw ValidationError("original violates the tree property at " + tc.violator->str());
  if (auto tc = check_tree_property(replica); !tc.ok)
    throw ValidationError("replica violates the tree property at " + tc.violator->str());

  // Both maps iterate in preorder, so a merge walk is a simultaneous DFS over
  // the union of the visible parts.
  std::vector<Command> out;
  const auto& a = original.visible();
  const auto& b = replica.visible();
  auto ia = a.begin(), ib = b.begin();
  const Content empty;
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      out.push_back(Command{ia->first, ia->second, empty});
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      out.push_back(Command{ib->first, empty, ib->second});
      ++ib;
    } else {
      if (ia->second != ib->second) out.push_back(Command{ia->first, ia->second, ib->second});
      ++ia;
      ++ib;
    }
  }
  return CanonicalSet(original.ns_ptr(), std::move(out));
}

CanonicalSet replay_log(const UpdateLog& log) {
  std::unordered_map<NodeId, Command, NodeIdHash> acc;
  for (const Command& c : log.entries()) {
    auto [it, inserted] = acc.try_emplace(c.node, c);
    if (inserted) continue;
    auto fused = compose_same_node(it->second, c);
    if (std::holds_alternative<BreaksEverything>(fused))
      throw InternalError("validated log fused to a breaking pair at " + c.node.str());
    it->second = std::get<Command>(fused);
  }
  std::vector<Command> cmds;
  cmds.reserve(acc.size());
  for (auto& [node, c] : acc)
    if (!is_null(c)) cmds.push_back(std::move(c));
  return CanonicalSet(log.original().ns_ptr(), std::move(cmds));
}

}  // namespace recon
