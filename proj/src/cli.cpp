#include "recon/cli.hpp"

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "recon/detector.hpp"
#include "recon/io.hpp"
#include "recon/server.hpp"

namespace recon::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct BrokenRun : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

enum class Format { text, json };

json rendered(std::span<const Command> cmds) {
  json out = json::array();
  for (const auto& c : cmds) out.push_back(render(c));
  return out;
}

void print_listing(std::ostream& out, Format f, std::span<const Command> cmds) {
  if (f == Format::json) {
    out << json{{"commands", rendered(cmds)}}.dump() << "\n";
    return;
  }
  for (const auto& c : cmds) out << render(c) << "\n";
}

struct Replicas {
  NamespacePtr ns;
  FileSystem original, replica1, replica2;
  CanonicalSet a, b;
};

Replicas load_replicas(const std::string& original, const std::string& r1, const std::string& r2,
                       const std::vector<Command>& extra = {}) {
  const auto so = io::load_input(original);
  const auto s1 = io::load_input(r1);
  const auto s2 = io::load_input(r2);
  auto ns = io::namespace_for({&so, &s1, &s2}, extra);
  Replicas r{ns, io::to_filesystem(so, ns), io::to_filesystem(s1, ns), io::to_filesystem(s2, ns),
             CanonicalSet(ns), CanonicalSet(ns)};
  r.a = diff_states(r.original, r.replica1);
  r.b = diff_states(r.original, r.replica2);
  return r;
}

// Target merger files may only mention nodes the inputs know about.
std::vector<Command> load_target(const std::string& file, const Replicas& r) {
  auto cmds = io::load_command_set(file);
  for (const auto& c : cmds)
    if (!r.ns->contains(c.node)) throw ValidationError(file + ": " + c.node.str() + " is not a node of the inputs");
  return cmds;
}

Policy terminal_policy(Streams io) {
  return Interactive{[io](const std::vector<Conflict>& live) -> std::optional<Decision> {
    io.err << live.size() << (live.size() == 1 ? " conflict" : " conflicts") << " left\n";
    for (std::size_t i = 0; i < live.size(); ++i) {
      io.err << "  [" << i << "] " << to_string(live[i].kind) << "\n"
             << "      a: " << render(live[i].left) << "\n"
             << "      b: " << render(live[i].right) << "\n";
    }
    for (;;) {
      io.err << "winner? '<index> a|b', 'a'/'b' for [0], 'q' to abort: " << std::flush;
      std::string line;
      if (!std::getline(io.in, line)) return std::nullopt;
      std::istringstream words(line);
      std::vector<std::string> w;
      for (std::string x; words >> x;) w.push_back(x);
      if (w.size() == 1 && w[0] == "q") return std::nullopt;
      std::size_t index = 0;
      std::string side;
      if (w.size() == 1) {
        side = w[0];
      } else if (w.size() == 2) {
        try {
          index = std::stoul(w[0]);
        } catch (const std::exception&) {
          index = live.size();
        }
        side = w[1];
      }
      if (index < live.size() && (side == "a" || side == "b"))
        return Decision{index, side == "a" ? Side::first : Side::second};
      io.err << "not understood\n";
    }
  }};
}

ContentPolicy content_policy_of(const std::string& s) {
  if (s == "first") return ContentPolicy::first;
  if (s == "second") return ContentPolicy::second;
  return ContentPolicy::fail;
}

void print_steps(std::ostream& out, const Resolution& res) {
  for (const auto& s : res.steps) {
    out << "resolved " << render(s.conflict.left) << " vs " << render(s.conflict.right) << ": "
        << to_string(s.winner) << " wins";
    for (const auto& c : s.removed) out << "\n  dropped " << render(c);
    out << "\n";
  }
}

json plan_json(const io::PlanFile& p) {
  return {{"merger", rendered(p.merger)},
          {"replica1", {{"rollback", rendered(p.first.rollback)}, {"apply", rendered(p.first.apply)}}},
          {"replica2", {{"rollback", rendered(p.second.rollback)}, {"apply", rendered(p.second.apply)}}}};
}

void emit_plan(Streams io, Format f, const io::PlanFile& plan, const std::string& output) {
  if (output.empty()) {
    io.out << io::format_plan(plan, nullptr);
    return;
  }
  io::save_plan(output, plan);
  if (f == Format::json) {
    auto j = plan_json(plan);
    j["plan_file"] = output;
    io.out << j.dump() << "\n";
    return;
  }
  io.out << "merger:\n";
  for (const auto& c : plan.merger) io.out << "  " << render(c) << "\n";
  io.out << "plan written to " << output << "\n";
}

int dispatch(int argc, const char* const* argv, Streams io) {
  CLI::App app{"Reconcile two replicas of a directory tree that diverged from a common original."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "recon 1.0");

  std::string format_name = "text";
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format_name, "Output format")->check(CLI::IsMember({"text", "json"}));
  };

  std::string original, replica1, replica2, log_file, target, merger_file, output, plan_file, snapshot;
  std::string policy_name = "first-wins", content_name = "fail";
  bool interactive = false;
  std::size_t max_enum = default_merger_bound;
  int side = 1;

  auto* diff = app.add_subcommand("diff", "Commands that turn the original into the replica");
  diff->add_option("original", original, "Original snapshot or directory")->required();
  diff->add_option("replica", replica1, "Replica snapshot or directory")->required();
  add_format(diff);

  auto* replay = app.add_subcommand("replay", "Commands equivalent to an update log");
  replay->add_option("original", original, "Original snapshot or directory")->required();
  replay->add_option("log", log_file, "Update log")->required();
  add_format(replay);

  auto* mergers = app.add_subcommand("mergers", "List every merger of the two replicas' updates");
  mergers->add_option("original", original)->required();
  mergers->add_option("replica1", replica1)->required();
  mergers->add_option("replica2", replica2)->required();
  mergers->add_option("--max-enum", max_enum, "Refuse above this many candidate commands");
  add_format(mergers);

  auto* reconcile_cmd = app.add_subcommand("reconcile", "Resolve conflicts and write a merge plan");
  reconcile_cmd->add_option("original", original)->required();
  reconcile_cmd->add_option("replica1", replica1)->required();
  reconcile_cmd->add_option("replica2", replica2)->required();
  reconcile_cmd->add_option("--policy", policy_name, "Conflict resolution policy")
      ->check(CLI::IsMember({"first-wins", "second-wins", "constructor-wins", "guided", "interactive"}));
  reconcile_cmd->add_option("--target", target, "Merger to reproduce (guided policy)");
  reconcile_cmd->add_option("--content-policy", content_name, "Content conflicts under constructor-wins")
      ->check(CLI::IsMember({"first", "second", "fail"}));
  reconcile_cmd->add_flag("--interactive", interactive, "Ask on the terminal for every conflict");
  reconcile_cmd->add_option("-o,--output", output, "Plan file to write (stdout if omitted)");
  add_format(reconcile_cmd);

  auto* plan_cmd = app.add_subcommand("plan", "Write the merge plan for a given merger");
  plan_cmd->add_option("original", original)->required();
  plan_cmd->add_option("replica1", replica1)->required();
  plan_cmd->add_option("replica2", replica2)->required();
  plan_cmd->add_option("--merger", merger_file, "Merger command-set file")->required();
  plan_cmd->add_option("-o,--output", output, "Plan file to write (stdout if omitted)");
  add_format(plan_cmd);

  auto* apply_cmd = app.add_subcommand("apply", "Execute one replica's part of a plan on its snapshot");
  apply_cmd->add_option("snapshot", snapshot, "Replica snapshot or directory")->required();
  apply_cmd->add_option("plan", plan_file, "Plan file")->required();
  apply_cmd->add_option("--side", side, "Which replica the snapshot is")->check(CLI::IsMember({1, 2}));
  apply_cmd->add_option("-o,--output", output, "Resulting snapshot file")->required();
  add_format(apply_cmd);

  service::ServerOptions server;
  std::string state_dir, ui_dir;
  auto* serve = app.add_subcommand("serve", "Run the local session server");
  serve->add_option("--host", server.host, "Bind address");
  serve->add_option("--port", server.port, "Port (0 picks one)");
  serve->add_option("--cors-origin", server.cors_origin, "Origin allowed to call the API");
  serve->add_option("--state-dir", state_dir, "Keep sessions here across restarts");
  serve->add_option("--ui-dir", ui_dir, "Static files served at /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, io.out, io.err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, io.out, io.err);
    return exit_validation;
  }
  const Format format = format_name == "json" ? Format::json : Format::text;

  if (*diff) {
    const auto so = io::load_input(original);
    const auto sr = io::load_input(replica1);
    auto ns = io::namespace_for({&so, &sr});
    auto set = diff_states(io::to_filesystem(so, ns), io::to_filesystem(sr, ns));
    print_listing(io.out, format, order(set));
    return exit_ok;
  }

  if (*replay) {
    const auto so = io::load_input(original);
    const auto entries = io::load_log(log_file);
    auto ns = io::namespace_for({&so}, entries);
    auto set = replay_log(UpdateLog(io::to_filesystem(so, ns), entries));
    print_listing(io.out, format, order(set));
    return exit_ok;
  }

  if (*mergers) {
    auto r = load_replicas(original, replica1, replica2);
    auto all = enumerate_mergers(r.a, r.b, max_enum);
    if (format == Format::json) {
      json list = json::array();
      for (const auto& m : all) list.push_back(rendered(m.commands()));
      io.out << json{{"count", all.size()}, {"mergers", list}}.dump() << "\n";
      return exit_ok;
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
      io.out << "merger " << i + 1 << ":\n";
      for (const auto& c : all[i]) io.out << "  " << render(c) << "\n";
    }
    io.out << all.size() << (all.size() == 1 ? " merger" : " mergers") << "\n";
    return exit_ok;
  }

  if (*reconcile_cmd) {
    if (interactive) policy_name = "interactive";
    std::vector<Command> target_cmds;
    if (policy_name == "guided") {
      if (target.empty()) throw ValidationError("--policy guided needs --target");
    } else if (!target.empty()) {
      throw ValidationError("--target only applies to --policy guided");
    }
    auto r = load_replicas(original, replica1, replica2);
    Policy policy = FirstWins{};
    if (policy_name == "second-wins") policy = SecondWins{};
    if (policy_name == "constructor-wins") policy = ConstructorWins{content_policy_of(content_name)};
    if (policy_name == "guided") policy = Guided{load_target(target, r)};
    if (policy_name == "interactive") policy = terminal_policy(io);
    auto res = reconcile(r.a, r.b, policy);
    auto plan = io::plan_file_of(merge_plan(r.a, r.b, res.merger));
    if (format == Format::text && !output.empty()) print_steps(io.out, res);
    emit_plan(io, format, plan, output);
    return exit_ok;
  }

  if (*plan_cmd) {
    auto r = load_replicas(original, replica1, replica2);
    auto m = load_target(merger_file, r);
    auto plan = io::plan_file_of(merge_plan(r.a, r.b, CanonicalSet(r.ns, m)));
    emit_plan(io, format, plan, output);
    return exit_ok;
  }

  if (*apply_cmd) {
    const auto s = io::load_input(snapshot);
    const auto plan = io::load_plan(plan_file);
    const auto& part = side == 1 ? plan.first : plan.second;
    std::vector<Command> mentioned = plan.merger;
    mentioned.insert(mentioned.end(), part.rollback.begin(), part.rollback.end());
    mentioned.insert(mentioned.end(), part.apply.begin(), part.apply.end());
    auto ns = io::namespace_for({&s}, mentioned);
    auto state = io::to_filesystem(s, ns);
    auto rolled = apply_sequence(state, part.rollback);
    if (!rolled.ok()) throw BrokenRun("rollback " + rolled.broken().describe());
    auto done = apply_sequence(rolled.fs(), part.apply);
    if (!done.ok()) throw BrokenRun("apply " + done.broken().describe());
    io::save_snapshot(output, io::snapshot_of(done.fs()));
    if (format == Format::json) {
      io.out << json{{"rolled_back", part.rollback.size()}, {"applied", part.apply.size()}, {"output", output}}.dump()
             << "\n";
    } else {
      io.out << "rolled back " << part.rollback.size() << ", applied " << part.apply.size() << "; wrote " << output
             << "\n";
    }
    return exit_ok;
  }

  if (*serve) {
    if (!state_dir.empty()) server.state_dir = state_dir;
    if (!ui_dir.empty()) server.ui_dir = ui_dir;
    service::Server srv(server);
    const int port = srv.bind();
    io.err << "listening on http://" << server.host << ":" << port << "\n";
    srv.run();
    return exit_ok;
  }
  return exit_validation;
}

}  // namespace

int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(argc, argv, Streams{in, out, err});
  } catch (const BrokenRun& e) {
    err << "broken: " << e.what() << "\n";
    return exit_broken;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::validation:
      case ErrorKind::usage:
        err << "error: " << e.what() << "\n";
        return exit_validation;
      case ErrorKind::bound:
        err << "refused: " << e.what() << "\n";
        return exit_validation;
      case ErrorKind::aborted:
        err << "aborted: " << e.what() << "\n";
        return exit_aborted;
      case ErrorKind::protocol:
      case ErrorKind::internal:
        break;
    }
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_internal;
  }
}

}  // namespace recon::cli
