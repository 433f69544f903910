#pragma once

#include <vector>

#include "recon/canonical.hpp"
#include "recon/fstree.hpp"

namespace recon {

/// A replica's operation log together with the state it started from.
/// Construction replays the entries and rejects a log that breaks.
class UpdateLog {
 public:
  UpdateLog(FileSystem original, std::vector<Command> entries);

  const FileSystem& original() const noexcept { return original_; }
  const std::vector<Command>& entries() const noexcept { return entries_; }
  const FileSystem& final_state() const noexcept { return final_; }

 private:
  FileSystem original_;
  std::vector<Command> entries_;
  FileSystem final_;
};

/// State-based detector: one command per differing node, before = original,
/// after = replica. Walks both visible trees together.
CanonicalSet diff_states(const FileSystem& original, const FileSystem& replica);

/// Operation-based detector: fuses the log per node and drops nulls.
CanonicalSet replay_log(const UpdateLog& log);

}  // namespace recon
