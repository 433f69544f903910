#include "recon/session.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "recon/detector.hpp"

namespace recon::service {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* to_string(Phase p) noexcept { return p == Phase::finished ? "finished" : "resolving"; }

Side parse_side(const std::string& s) {
  if (s == "a") return Side::first;
  if (s == "b") return Side::second;
  throw ValidationError("winner must be \"a\" or \"b\", got \"" + s + "\"");
}

namespace {

std::size_t position(const CanonicalSet& set, const Command& c) {
  auto it = std::lower_bound(set.begin(), set.end(), c);
  return static_cast<std::size_t>(it - set.begin());
}

json rendered(std::span<const Command> cmds) {
  json out = json::array();
  for (const auto& c : cmds) out.push_back(render(c));
  return out;
}

json side_json(const CanonicalSet& all, const CanonicalSet& alive) {
  json out = json::array();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& c = all.commands()[i];
    out.push_back({{"index", i}, {"path", c.node.str()}, {"command", render(c)}, {"live", alive.contains(c)}});
  }
  return out;
}

// First bytes of a payload, non-printable bytes shown as '.'.
std::string preview(const Content& c) {
  constexpr std::size_t limit = 256;
  std::string out;
  for (std::size_t i = 0; i < c.payload().size() && i < limit; ++i) {
    const auto ch = static_cast<unsigned char>(c.payload()[i]);
    out.push_back(ch == '\n' || (ch >= 0x20 && ch < 0x7f) ? static_cast<char>(ch) : '.');
  }
  return out;
}

}  // namespace

Session::Session(std::string id, Inputs inputs)
    : id_(std::move(id)),
      inputs_(std::move(inputs)),
      ns_(io::namespace_for({&inputs_.original, &inputs_.replica1, &inputs_.replica2})),
      original_(io::to_filesystem(inputs_.original, ns_)),
      a_(diff_states(original_, io::to_filesystem(inputs_.replica1, ns_))),
      b_(diff_states(original_, io::to_filesystem(inputs_.replica2, ns_))),
      common_(command_intersection(a_.commands(), b_.commands())),
      a_rest_(ns_, command_difference(a_.commands(), common_)),
      b_rest_(ns_, command_difference(b_.commands(), common_)) {
  rebuild();
}

void Session::rebuild() {
  resolver_ = std::make_unique<Resolver>(a_rest_, b_rest_);
  auto steps = std::move(history_);
  history_.clear();
  deltas_.clear();
  for (const auto& e : steps) resolve(e.conflict_id, e.winner);
}

json Session::live_conflicts_json() const {
  json out = json::array();
  const auto& edges = resolver_->initial_graph().edges;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!resolver_->edge_live(i)) continue;
    out.push_back({{"id", i},
                   {"left", render(edges[i].left)},
                   {"right", render(edges[i].right)},
                   {"kind", to_string(edges[i].kind)}});
  }
  return out;
}

json Session::summary() const {
  const auto& g = resolver_->initial_graph();
  json conflicts = json::array();
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    json entry{{"id", i},
               {"a", position(a_rest_, e.left)},
               {"b", position(b_rest_, e.right)},
               {"left", render(e.left)},
               {"right", render(e.right)},
               {"kind", to_string(e.kind)},
               {"live", resolver_->edge_live(i)}};
    if (e.kind == ConflictKind::content)
      entry["preview"] = {{"a", preview(e.left.after)}, {"b", preview(e.right.after)}};
    conflicts.push_back(std::move(entry));
  }
  json out;
  out["id"] = id_;
  out["phase"] = to_string(phase());
  out["counts"] = {{"a", a_rest_.size()},
                   {"b", b_rest_.size()},
                   {"common", common_.size()},
                   {"conflicts", g.edges.size()},
                   {"live", resolver_->live_count()}};
  out["a"] = side_json(a_rest_, resolver_->residue_first());
  out["b"] = side_json(b_rest_, resolver_->residue_second());
  out["common"] = rendered(common_);
  out["conflicts"] = conflicts;
  out["history"] = deltas_;
  return out;
}

json Session::resolve(std::size_t conflict_id, Side winner) {
  const auto& edges = resolver_->initial_graph().edges;
  if (conflict_id >= edges.size()) throw UsageError("unknown conflict id " + std::to_string(conflict_id));
  if (!resolver_->edge_live(conflict_id)) throw StaleConflict(conflict_id, live_conflicts_json());
  auto step = resolver_->resolve(edges[conflict_id], winner);

  json removed = json::array();
  const CanonicalSet& loser_side = winner == Side::first ? b_rest_ : a_rest_;
  const char* loser = winner == Side::first ? "b" : "a";
  for (const auto& c : step.removed)
    removed.push_back({{"side", loser}, {"index", position(loser_side, c)}, {"command", render(c)}});
  json removed_edges = json::array();
  for (const auto& e : step.removed_edges) removed_edges.push_back(*resolver_->index_of(e));

  json delta;
  delta["conflict_id"] = conflict_id;
  delta["winner"] = to_string(winner);
  delta["removed"] = removed;
  delta["removed_edges"] = removed_edges;
  delta["remaining"] = step.edges_after;
  delta["phase"] = to_string(phase());
  history_.push_back({conflict_id, winner});
  deltas_.push_back(delta);
  return delta;
}

bool Session::undo() {
  if (history_.empty()) return false;
  history_.pop_back();
  rebuild();
  return true;
}

CanonicalSet Session::merger() const {
  if (phase() != Phase::finished) throw NotFinished(live_conflicts_json());
  return CanonicalSet(ns_, command_union(common_, resolver_->current_union()));
}

io::PlanFile Session::plan() const { return io::plan_file_of(merge_plan(a_, b_, merger())); }

FileSystem Session::merged_state() const {
  auto out = apply_sequence(original_, order(merger()));
  if (!out.ok()) throw InternalError("merger breaks the original state: " + out.broken().describe());
  return out.fs();
}

json Session::plan_json() const {
  const auto p = plan();
  json out;
  out["merger"] = rendered(p.merger);
  out["replica1"] = {{"rollback", rendered(p.first.rollback)}, {"apply", rendered(p.first.apply)}};
  out["replica2"] = {{"rollback", rendered(p.second.rollback)}, {"apply", rendered(p.second.apply)}};
  out["plan_file"] = io::format_plan(p, nullptr);
  out["original_tree"] = io::render_tree(original_);
  out["replica1_tree"] = io::render_tree(io::to_filesystem(inputs_.replica1, ns_));
  out["replica2_tree"] = io::render_tree(io::to_filesystem(inputs_.replica2, ns_));
  out["merged_tree"] = io::render_tree(merged_state());
  return out;
}

SessionStore::SessionStore(std::optional<fs::path> state_dir) : dir_(std::move(state_dir)) {
  if (dir_) {
    fs::create_directories(*dir_);
    load_all();
  }
}

std::shared_ptr<Session> SessionStore::create(Inputs inputs) {
  std::random_device rd;
  std::mt19937_64 rng((std::uint64_t{rd()} << 32) | rd());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  const std::string token = buf;

  auto session = std::make_shared<Session>(token, std::move(inputs));
  if (dir_) {
    const auto sdir = *dir_ / token;
    fs::create_directories(sdir);
    io::save_snapshot(sdir / "original.jsonl", session->inputs().original);
    io::save_snapshot(sdir / "replica1.jsonl", session->inputs().replica1);
    io::save_snapshot(sdir / "replica2.jsonl", session->inputs().replica2);
    io::write_file_atomic(sdir / "history.jsonl", "");
  }
  std::lock_guard lock(mutex_);
  sessions_[token] = session;
  return session;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::vector<std::string> SessionStore::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

void SessionStore::append(const std::string& id, const json& record) {
  if (!dir_) return;
  std::ofstream out(*dir_ / id / "history.jsonl", std::ios::app | std::ios::binary);
  out << record.dump() << "\n";
  out.flush();
  if (!out) throw InternalError("cannot append to the history of session " + id);
}

void SessionStore::record_resolve(const Session& s, const HistoryEntry& e) {
  append(s.id(), {{"op", "resolve"}, {"conflict_id", e.conflict_id}, {"winner", to_string(e.winner)}});
}

void SessionStore::record_undo(const Session& s) { append(s.id(), {{"op", "undo"}}); }

void SessionStore::load_all() {
  for (const auto& entry : fs::directory_iterator(*dir_)) {
    if (!entry.is_directory()) continue;
    const auto sdir = entry.path();
    const auto id = sdir.filename().string();
    try {
      Inputs in{io::load_snapshot(sdir / "original.jsonl"), io::load_snapshot(sdir / "replica1.jsonl"),
                io::load_snapshot(sdir / "replica2.jsonl")};
      auto session = std::make_shared<Session>(id, std::move(in));
      std::istringstream history(io::read_file(sdir / "history.jsonl"));
      std::string line;
      while (std::getline(history, line)) {
        if (line.empty()) continue;
        const auto rec = json::parse(line);
        if (rec.at("op") == "undo") {
          session->undo();
        } else {
          session->resolve(rec.at("conflict_id").get<std::size_t>(), parse_side(rec.at("winner").get<std::string>()));
        }
      }
      sessions_[id] = session;
    } catch (const std::exception& e) {
      std::cerr << "skipping session " << id << ": " << e.what() << "\n";
    }
  }
}

}  // namespace recon::service
