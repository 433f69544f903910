#pragma once

// Interactive reconciliation sessions: one conflict graph, winners submitted
// one at a time, undo by replaying the shortened history from the inputs.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "recon/io.hpp"

namespace recon::service {

enum class Phase { resolving, finished };

const char* to_string(Phase p) noexcept;

struct Inputs {
  io::Snapshot original;
  io::Snapshot replica1;
  io::Snapshot replica2;
};

struct HistoryEntry {
  std::size_t conflict_id = 0;
  Side winner = Side::first;
};

/// The conflict was live once but an earlier step already removed it.
class StaleConflict : public UsageError {
 public:
  StaleConflict(std::size_t id, nlohmann::json live)
      : UsageError("conflict " + std::to_string(id) + " is no longer live"), live_(std::move(live)) {}
  const nlohmann::json& live() const noexcept { return live_; }

 private:
  nlohmann::json live_;
};

/// A plan was requested while conflicts remain.
class NotFinished : public UsageError {
 public:
  explicit NotFinished(nlohmann::json live)
      : UsageError("conflicts remain; resolve them before requesting a plan"), live_(std::move(live)) {}
  const nlohmann::json& live() const noexcept { return live_; }

 private:
  nlohmann::json live_;
};

Side parse_side(const std::string& s);

/// Not thread-safe by itself; callers hold `mutex()` around every call.
class Session {
 public:
  /// Runs both detectors and sets aside the commands the replicas share.
  Session(std::string id, Inputs inputs);

  const std::string& id() const noexcept { return id_; }
  const Inputs& inputs() const noexcept { return inputs_; }
  Phase phase() const noexcept { return resolver_->finished() ? Phase::finished : Phase::resolving; }
  const std::vector<HistoryEntry>& history() const noexcept { return history_; }
  std::mutex& mutex() noexcept { return mutex_; }

  const CanonicalSet& a() const noexcept { return a_; }
  const CanonicalSet& b() const noexcept { return b_; }
  const std::vector<Command>& common() const noexcept { return common_; }
  const Resolver& resolver() const noexcept { return *resolver_; }

  /// Graph, live flags, counts and history. Content conflicts carry a
  /// preview of both payloads.
  nlohmann::json summary() const;

  /// One resolution step. Returns what disappeared. Throws UsageError for an
  /// unknown id and StaleConflict for an edge that is no longer live.
  nlohmann::json resolve(std::size_t conflict_id, Side winner);

  /// Drops the last step. Returns false when there is nothing to undo.
  bool undo();

  /// Merger of the finished session. Throws NotFinished while resolving.
  CanonicalSet merger() const;
  io::PlanFile plan() const;
  FileSystem merged_state() const;

  /// Plan listing, plan file text, and the original, replica and merged
  /// trees.
  nlohmann::json plan_json() const;

  nlohmann::json live_conflicts_json() const;

 private:
  void rebuild();

  std::string id_;
  Inputs inputs_;
  NamespacePtr ns_;
  FileSystem original_;
  CanonicalSet a_, b_;
  std::vector<Command> common_;
  CanonicalSet a_rest_, b_rest_;
  std::unique_ptr<Resolver> resolver_;
  std::vector<HistoryEntry> history_;
  std::vector<nlohmann::json> deltas_;
  std::mutex mutex_;
};

/// All sessions of one server. With a state directory every session is kept
/// as `<dir>/<id>/` holding the three input snapshots and an append-only
/// history.jsonl, and reloaded on construction.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> state_dir = std::nullopt);

  std::shared_ptr<Session> create(Inputs inputs);
  std::shared_ptr<Session> find(const std::string& id) const;
  std::vector<std::string> ids() const;

  /// Call with the session's lock held, after the session accepted the step.
  void record_resolve(const Session& s, const HistoryEntry& e);
  void record_undo(const Session& s);

 private:
  void append(const std::string& id, const nlohmann::json& record);
  void load_all();

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace recon::service
