#include "recon/io.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "recon/digest.hpp"

namespace recon::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int format_version = 1;
constexpr const char* digest_prefix = "sha256:";

bool valid_utf8(const std::string& s) {
  try {
    (void)json(s).dump();
    return true;
  } catch (const json::type_error&) {
    return false;
  }
}

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw ValidationError("line " + std::to_string(line) + ": " + what);
}

std::string digest_of(const std::string& bytes) { return digest_prefix + sha256_hex(bytes); }

// Adds "data" or "digest" for a file payload.
void put_payload(json& j, const std::string& payload, const BlobStore* blobs) {
  if (payload.size() <= inline_limit && valid_utf8(payload)) {
    j["data"] = payload;
    return;
  }
  const auto d = digest_of(payload);
  j["digest"] = d;
  if (blobs) blobs->write(d, payload);
}

std::string get_payload(const json& j, const BlobStore& blobs, std::size_t line) {
  if (j.contains("data")) {
    if (!j["data"].is_string()) fail_at(line, "\"data\" must be a string");
    return j["data"].get<std::string>();
  }
  if (j.contains("digest")) {
    if (!j["digest"].is_string()) fail_at(line, "\"digest\" must be a string");
    try {
      return blobs.read(j["digest"].get<std::string>());
    } catch (const ValidationError& e) {
      fail_at(line, e.what());
    }
  }
  fail_at(line, "file record needs \"data\" or \"digest\"");
}

json content_json(const Content& c, const BlobStore* blobs) {
  json j;
  j["kind"] = to_string(c.kind());
  if (c.is_file()) put_payload(j, c.payload(), blobs);
  return j;
}

Content content_from(const json& j, const BlobStore& blobs, std::size_t line) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) fail_at(line, "content needs a \"kind\"");
  const auto kind = j["kind"].get<std::string>();
  if (kind == "empty") return Content::empty();
  if (kind == "dir") return Content::dir();
  if (kind == "file") return Content::file(get_payload(j, blobs, line));
  fail_at(line, "unknown content kind \"" + kind + "\"");
}

NodeId path_from(const json& j, std::size_t line) {
  if (!j.contains("path") || !j["path"].is_string()) fail_at(line, "record needs a \"path\" string");
  try {
    return NodeId::parse(j["path"].get<std::string>());
  } catch (const ParseError& e) {
    fail_at(line, e.what());
  }
}

json command_json(const Command& c, const BlobStore* blobs) {
  json j;
  j["path"] = c.node.str();
  j["before"] = content_json(c.before, blobs);
  j["after"] = content_json(c.after, blobs);
  return j;
}

Command command_from(const json& j, const BlobStore& blobs, std::size_t line) {
  if (!j.contains("before") || !j.contains("after")) fail_at(line, "command needs \"before\" and \"after\"");
  return Command{path_from(j, line), content_from(j["before"], blobs, line), content_from(j["after"], blobs, line)};
}

std::string header(const std::string& format) {
  json h;
  h["format"] = format;
  h["version"] = format_version;
  return h.dump() + "\n";
}

// Parses every non-blank line; checks the header and hands records on.
template <typename F>
void each_record(const std::string& text, const std::string& format, F&& on_record) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  bool seen_header = false;
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(raw);
    } catch (const json::parse_error& e) {
      fail_at(line, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail_at(line, "record must be a JSON object");
    if (!seen_header) {
      if (j.value("format", std::string{}) != format)
        fail_at(line, "expected a \"" + format + "\" header");
      if (!j.contains("version") || j["version"] != format_version)
        fail_at(line, "unsupported " + format + " version");
      seen_header = true;
      continue;
    }
    on_record(j, line);
  }
  if (!seen_header) throw ValidationError("empty file: expected a \"" + format + "\" header");
}

void check_snapshot_tree(const Snapshot& s) {
  for (const auto& [node, value] : s.entries) {
    auto parent = node.parent();
    if (!parent) continue;
    auto it = s.entries.find(*parent);
    if (it == s.entries.end() || !it->second.is_dir())
      throw ValidationError("tree property violated at " + node.str() + ": parent " + parent->str() +
                            " is not a directory");
  }
}

}  // namespace

Snapshot snapshot_of(const FileSystem& fs) { return Snapshot{fs.visible()}; }

NamespacePtr namespace_for(const std::vector<const Snapshot*>& snapshots, const std::vector<Command>& commands) {
  std::vector<NodeId> paths;
  for (const auto* s : snapshots)
    for (const auto& [node, value] : s->entries) paths.push_back(node);
  for (const auto& c : commands) paths.push_back(c.node);
  return make_namespace(paths);
}

FileSystem to_filesystem(const Snapshot& s, const NamespacePtr& ns) {
  FileSystem out(ns);
  for (const auto& [node, value] : s.entries) {
    ns->require(node);
    out.set(node, value);
  }
  auto check = check_tree_property(out);
  if (!check.ok) throw ValidationError("tree property violated at " + check.violator->str());
  return out;
}

BlobStore BlobStore::beside(const fs::path& file) {
  return BlobStore{fs::path(file.string() + ".blobs")};
}

std::string BlobStore::read(const std::string& digest) const {
  if (digest.rfind(digest_prefix, 0) != 0) throw ValidationError("unsupported digest " + digest);
  const auto hex = digest.substr(std::string(digest_prefix).size());
  if (hex.size() != 64 || hex.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw ValidationError("malformed digest " + digest);
  if (dir.empty()) throw ValidationError("digest " + digest + " has no blob store to read from");
  const auto file = dir / hex;
  if (!fs::exists(file)) throw ValidationError("missing blob " + file.string());
  auto bytes = read_file(file);
  if (sha256_hex(bytes) != hex) throw ValidationError("blob " + file.string() + " does not match its digest");
  return bytes;
}

void BlobStore::write(const std::string& digest, const std::string& bytes) const {
  if (dir.empty()) return;
  const auto file = dir / digest.substr(std::string(digest_prefix).size());
  if (fs::exists(file)) return;
  fs::create_directories(dir);
  write_file_atomic(file, bytes);
}

Snapshot parse_snapshot(const std::string& text, const BlobStore& blobs) {
  Snapshot s;
  each_record(text, "recon-snapshot", [&](const json& j, std::size_t line) {
    const NodeId node = path_from(j, line);
    const auto kind = j.value("kind", std::string{});
    Content value;
    if (kind == "dir") {
      value = Content::dir();
    } else if (kind == "file") {
      value = Content::file(get_payload(j, blobs, line));
    } else {
      fail_at(line, "snapshot records are \"dir\" or \"file\"");
    }
    if (!s.entries.emplace(node, std::move(value)).second) fail_at(line, "duplicate path " + node.str());
  });
  check_snapshot_tree(s);
  return s;
}

std::string format_snapshot(const Snapshot& s, const BlobStore* blobs) {
  std::string out = header("recon-snapshot");
  for (const auto& [node, value] : s.entries) {
    json j;
    j["path"] = node.str();
    j["kind"] = to_string(value.kind());
    if (value.is_file()) put_payload(j, value.payload(), blobs);
    out += j.dump() + "\n";
  }
  return out;
}

Snapshot load_snapshot(const fs::path& file) {
  try {
    return parse_snapshot(read_file(file), BlobStore::beside(file));
  } catch (const ValidationError& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

void save_snapshot(const fs::path& file, const Snapshot& s) {
  const auto blobs = BlobStore::beside(file);
  write_file_atomic(file, format_snapshot(s, &blobs));
}

Snapshot scan_directory(const fs::path& root) {
  if (!fs::is_directory(root)) throw ValidationError(root.string() + " is not a directory");
  Snapshot s;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    const auto& entry = *it;
    const auto rel = fs::relative(entry.path(), root);
    std::vector<std::string> segs;
    for (const auto& part : rel) segs.push_back(part.string());
    const NodeId node(segs);
    const auto status = entry.symlink_status();
    if (fs::is_symlink(status)) throw ValidationError("symbolic link not supported: " + entry.path().string());
    if (fs::is_directory(status)) {
      s.entries.emplace(node, Content::dir());
    } else if (fs::is_regular_file(status)) {
      s.entries.emplace(node, Content::file(read_file(entry.path())));
    } else {
      throw ValidationError("unsupported file type: " + entry.path().string());
    }
  }
  return s;
}

Snapshot load_input(const fs::path& path) {
  if (fs::is_directory(path)) return scan_directory(path);
  return load_snapshot(path);
}

std::vector<Command> parse_commands(const std::string& text, const std::string& format, const BlobStore& blobs) {
  std::vector<Command> out;
  each_record(text, format, [&](const json& j, std::size_t line) { out.push_back(command_from(j, blobs, line)); });
  return out;
}

std::string format_commands(std::span<const Command> cmds, const std::string& format, const BlobStore* blobs) {
  std::string out = header(format);
  for (const auto& c : cmds) out += command_json(c, blobs).dump() + "\n";
  return out;
}

std::vector<Command> load_log(const fs::path& file) {
  try {
    return parse_commands(read_file(file), "recon-log", BlobStore::beside(file));
  } catch (const ValidationError& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

void save_log(const fs::path& file, std::span<const Command> cmds) {
  const auto blobs = BlobStore::beside(file);
  write_file_atomic(file, format_commands(cmds, "recon-log", &blobs));
}

std::vector<Command> load_command_set(const fs::path& file) {
  std::vector<Command> out;
  try {
    out = parse_commands(read_file(file), "recon-commands", BlobStore::beside(file));
  } catch (const ValidationError& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
  return sorted_commands(std::move(out));
}

void save_command_set(const fs::path& file, std::span<const Command> cmds) {
  const auto blobs = BlobStore::beside(file);
  const auto sorted = sorted_commands(std::vector<Command>(cmds.begin(), cmds.end()));
  write_file_atomic(file, format_commands(sorted, "recon-commands", &blobs));
}

PlanFile plan_file_of(const MergePlan& p) { return PlanFile{p.merger.commands(), p.first, p.second}; }

PlanFile parse_plan(const std::string& text, const BlobStore& blobs) {
  PlanFile p;
  // sections must appear in file order: merger, then replica 1, then 2
  int last_rank = 0;
  each_record(text, "recon-plan", [&](const json& j, std::size_t line) {
    const auto section = j.value("section", std::string{});
    int rank = 0;
    std::vector<Command>* target = nullptr;
    if (section == "merger") {
      rank = 1;
      target = &p.merger;
    } else if (section == "rollback" || section == "apply") {
      if (!j.contains("replica") || !j["replica"].is_number_integer()) fail_at(line, "missing \"replica\"");
      const int replica = j["replica"].get<int>();
      if (replica != 1 && replica != 2) fail_at(line, "\"replica\" must be 1 or 2");
      ReplicaPlan& rp = replica == 1 ? p.first : p.second;
      const bool rollback = section == "rollback";
      rank = 2 * replica + (rollback ? 0 : 1);
      target = rollback ? &rp.rollback : &rp.apply;
    } else {
      fail_at(line, "unknown plan section \"" + section + "\"");
    }
    if (rank < last_rank) fail_at(line, "plan sections out of order");
    last_rank = rank;
    target->push_back(command_from(j, blobs, line));
  });
  if (!std::is_sorted(p.merger.begin(), p.merger.end())) throw ValidationError("plan merger listing is not sorted");
  return p;
}

std::string format_plan(const PlanFile& p, const BlobStore* blobs) {
  std::string out = header("recon-plan");
  auto emit = [&](const std::vector<Command>& cmds, const char* section, int replica) {
    for (const auto& c : cmds) {
      json j = command_json(c, blobs);
      j["section"] = section;
      if (replica) j["replica"] = replica;
      out += j.dump() + "\n";
    }
  };
  emit(p.merger, "merger", 0);
  emit(p.first.rollback, "rollback", 1);
  emit(p.first.apply, "apply", 1);
  emit(p.second.rollback, "rollback", 2);
  emit(p.second.apply, "apply", 2);
  return out;
}

PlanFile load_plan(const fs::path& file) {
  try {
    return parse_plan(read_file(file), BlobStore::beside(file));
  } catch (const ValidationError& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

void save_plan(const fs::path& file, const PlanFile& p) {
  const auto blobs = BlobStore::beside(file);
  write_file_atomic(file, format_plan(p, &blobs));
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& file, const std::string& bytes) {
  const auto dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  std::random_device rd;
  const auto tmp = dir / ("." + file.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ValidationError("write failed for " + file.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, file, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ValidationError("cannot replace " + file.string());
  }
}

std::string render_tree(const FileSystem& fs) {
  std::string out;
  for (const auto& [node, value] : fs.visible()) {
    out.append(2 * (node.depth() - 1), ' ');
    out += node.segments().back();
    if (value.is_dir()) {
      out += "/";
    } else {
      out += " = " + render(value);
    }
    out += "\n";
  }
  return out;
}

}  // namespace recon::io
