#pragma once

#include <span>
#include <variant>
#include <vector>

#include "recon/command.hpp"
#include "recon/namespace.hpp"

namespace recon {

enum class CommandClass { constructor, destructor, edit_file, null };

const char* to_string(CommandClass c) noexcept;

CommandClass classify(const Command& c) noexcept;

inline bool is_null(const Command& c) noexcept { return c.before == c.after; }
inline bool is_structural(const Command& c) noexcept {
  return c.before.kind() != c.after.kind();
}
inline bool is_constructor(const Command& c) noexcept {
  return c.after.kind() > c.before.kind();
}
inline bool is_destructor(const Command& c) noexcept {
  return c.after.kind() < c.before.kind();
}

Command invert(const Command& c);
std::vector<Command> invert_sequence(std::span<const Command> seq);

/// The outcome of composing two same-node commands whose values do not line
/// up: the pair breaks every filesystem. Never a command in a sequence.
struct BreaksEverything {
  friend bool operator==(BreaksEverything, BreaksEverything) { return true; }
};

using Composition = std::variant<Command, BreaksEverything>;

/// `s` followed by `t`, both on the same node. Throws UsageError otherwise.
Composition compose_same_node(const Command& s, const Command& t);

/// s ⊏ t: `s` must run before `t`. Holds only for structural commands on
/// parent/child nodes, either both destructors (child first) or both
/// constructors (parent first).
bool exec_order(const Command& s, const Command& t, const Namespace& ns);

/// Nodes are incomparable (distinct, neither above the other).
bool independent(const Command& s, const Command& t, const Namespace& ns);

}  // namespace recon
