#pragma once

// Line-oriented JSON file formats and directory ingestion.
//
// Every file starts with a header line {"format": ..., "version": 1} and has
// one record per line. File payloads up to `inline_limit` bytes of valid
// UTF-8 are stored inline as "data"; anything else is stored as a
// "sha256:<hex>" digest with the bytes in a sidecar directory `<file>.blobs/`.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "recon/reconciler.hpp"

namespace recon::io {

inline constexpr std::size_t inline_limit = 4096;

/// Visible part of a filesystem as read from disk, before a namespace is
/// chosen. Paths are unique; the tree property is checked on load.
struct Snapshot {
  std::map<NodeId, Content> entries;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

Snapshot snapshot_of(const FileSystem& fs);

/// Ancestor closure of every path mentioned by the snapshots and commands.
NamespacePtr namespace_for(const std::vector<const Snapshot*>& snapshots,
                           const std::vector<Command>& commands = {});

/// Throws UnknownNode if the snapshot mentions a node outside `ns`.
FileSystem to_filesystem(const Snapshot& s, const NamespacePtr& ns);

/// Where digest records are resolved. Empty means "no blobs available":
/// any digest record is then a validation error.
struct BlobStore {
  std::filesystem::path dir;

  static BlobStore beside(const std::filesystem::path& file);
  std::string read(const std::string& digest) const;
  /// Content-addressed; writing an existing blob is a no-op.
  void write(const std::string& digest, const std::string& bytes) const;
};

// Snapshot files ---------------------------------------------------------

Snapshot parse_snapshot(const std::string& text, const BlobStore& blobs);
std::string format_snapshot(const Snapshot& s, const BlobStore* blobs);

Snapshot load_snapshot(const std::filesystem::path& file);
void save_snapshot(const std::filesystem::path& file, const Snapshot& s);

/// Walks a real directory tree. Symbolic links and special files are
/// rejected; the root itself is not part of the snapshot.
Snapshot scan_directory(const std::filesystem::path& root);

/// A snapshot file, or a directory to scan.
Snapshot load_input(const std::filesystem::path& path);

// Command lists: logs and command-set files ------------------------------

std::vector<Command> parse_commands(const std::string& text, const std::string& format,
                                    const BlobStore& blobs);
std::string format_commands(std::span<const Command> cmds, const std::string& format,
                            const BlobStore* blobs);

/// Update log: commands in the order they were performed.
std::vector<Command> load_log(const std::filesystem::path& file);
void save_log(const std::filesystem::path& file, std::span<const Command> cmds);

/// Unordered command set, e.g. a merger used as a guided target.
std::vector<Command> load_command_set(const std::filesystem::path& file);
void save_command_set(const std::filesystem::path& file, std::span<const Command> cmds);

// Plan files --------------------------------------------------------------

struct PlanFile {
  std::vector<Command> merger;  // sorted
  ReplicaPlan first;
  ReplicaPlan second;

  friend bool operator==(const PlanFile&, const PlanFile&) = default;
};

PlanFile plan_file_of(const MergePlan& p);
PlanFile parse_plan(const std::string& text, const BlobStore& blobs);
std::string format_plan(const PlanFile& p, const BlobStore* blobs);
PlanFile load_plan(const std::filesystem::path& file);
void save_plan(const std::filesystem::path& file, const PlanFile& p);

// Helpers -----------------------------------------------------------------

std::string read_file(const std::filesystem::path& file);

/// Writes via a temporary file in the same directory and a rename, so readers
/// see either the old file or the complete new one.
void write_file_atomic(const std::filesystem::path& file, const std::string& bytes);

/// Rendered as an indented tree, one node per line.
std::string render_tree(const FileSystem& fs);

}  // namespace recon::io
