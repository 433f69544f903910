#include "recon/algebra.hpp"

#include <algorithm>

namespace recon {

const char* to_string(CommandClass c) noexcept {
  switch (c) {
    case CommandClass::constructor: return "constructor";
    case CommandClass::destructor: return "destructor";
    case CommandClass::edit_file: return "edit";
    case CommandClass::null: return "null";
  }
  return "?";
}

CommandClass classify(const Command& c) noexcept {
  if (is_null(c)) return CommandClass::null;
  if (is_constructor(c)) return CommandClass::constructor;
  if (is_destructor(c)) return CommandClass::destructor;
  return CommandClass::edit_file;
}

Command invert(const Command& c) { return Command{c.node, c.after, c.before}; }

std::vector<Command> invert_sequence(std::span<const Command> seq) {
  std::vector<Command> out;
  out.reserve(seq.size());
  std::transform(seq.rbegin(), seq.rend(), std::back_inserter(out), invert);
  return out;
}

Composition compose_same_node(const Command& s, const Command& t) {
  if (s.node != t.node) {
    throw UsageError("compose_same_node on different nodes: " + s.node.str() + " and " +
                     t.node.str());
  }
  if (s.after != t.before) return BreaksEverything{};
  return Command{s.node, s.before, t.after};
}

bool exec_order(const Command& s, const Command& t, const Namespace& ns) {
  ns.require(s.node);
  ns.require(t.node);
  const Kind sx = s.before.kind(), sy = s.after.kind();
  const Kind tx = t.before.kind(), ty = t.after.kind();

  // <n, DF, E> ⊏ <parent n, D, FE>: clear the child before the directory goes.
  if (t.node.is_ancestor_of(s.node) && s.node.depth() == t.node.depth() + 1) {
    return sx != Kind::empty && sy == Kind::empty && tx == Kind::directory &&
           ty != Kind::directory;
  }
  // <parent n, EF, D> ⊏ <n, E, FD>: the directory must exist first.
  if (s.node.is_ancestor_of(t.node) && t.node.depth() == s.node.depth() + 1) {
    return sx != Kind::directory && sy == Kind::directory && tx == Kind::empty &&
           ty != Kind::empty;
  }
  return false;
}

bool independent(const Command& s, const Command& t, const Namespace& ns) {
  return ns.compare(s.node, t.node) == Relation::independent;
}

}  // namespace recon
