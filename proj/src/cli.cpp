#include "mpst/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "mpst/explorer.hpp"
#include "mpst/json_io.hpp"
#include "mpst/kernel.hpp"
#include "mpst/parser.hpp"
#include "mpst/printer.hpp"

namespace mpst {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MpstError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MpstError("cannot write " + path);
  out << content;
}

std::set<std::string> spec_reserved(const ProtocolSpec& spec) {
  std::set<std::string> out;
  for (const auto& d : spec.public_decls) out.insert(d.channel.name);
  for (const auto& d : spec.private_decls) out.insert(d.channel.name);
  collect_names(spec.body, out);
  return out;
}

Identity parse_identity(const std::string& text) {
  auto dot = text.find('.');
  if (dot == std::string::npos) return Identity{text, "0"};
  return Identity{text.substr(0, dot), text.substr(dot + 1)};
}

// Successor spec: same header plus synthesized private declarations for
// channels the transition opened, so the output re-parses and re-checks.
ProtocolSpec successor_spec(const ProtocolSpec& spec, const TermPtr& succ) {
  ProtocolSpec out = spec;
  out.body = succ;
  std::set<std::string> declared;
  for (const auto& d : spec.public_decls) declared.insert(d.channel.name);
  for (const auto& d : spec.private_decls) declared.insert(d.channel.name);
  Gamma gamma = runtime_gamma(succ, spec.public_decls, spec.private_decls);
  for (const auto& [chan, binding] : gamma) {
    if (declared.count(chan)) continue;
    if (binding.kind != ChannelBinding::Kind::Session) continue;
    out.private_decls.push_back(
        {ChannelName{chan}, binding.a, binding.b});
  }
  return out;
}

int cmd_check(const std::string& file, bool strict,
              const std::string& json_path, std::ostream& out) {
  ProtocolSpec spec = parse_protocol(read_file(file));
  Gamma gamma = gamma_from_decls(spec.public_decls, spec.private_decls);
  CoherenceMode mode =
      strict ? CoherenceMode::Strict : CoherenceMode::RelaxedEnd;
  CoherenceReport report = check_coherence(spec.body, {}, gamma, mode);
  out << (report.coherent ? "Coherent" : "Incoherent") << " ("
      << mode_name(mode) << ")\n";
  for (const auto& f : report.failures)
    out << "  [" << f.rule << "] at " << f.path << ": " << f.message
        << " (line " << f.span.line << ", col " << f.span.column << ")\n";
  if (!json_path.empty())
    write_file(json_path, coherence_report_json(spec.name, report));
  return report.coherent ? 0 : 1;
}

int cmd_steps(const std::string& file, int max_unfold, std::ostream& out) {
  ProtocolSpec spec = parse_protocol(read_file(file));
  auto trans = enabled_transitions(spec.body, EnumLimits{max_unfold},
                                   spec_reserved(spec));
  for (size_t i = 0; i < trans.size(); ++i)
    out << "[" << i << "] " << trans[i].rule << ": " << trans[i].label.str()
        << "\n";
  if (trans.empty()) out << "stuck: no enabled transitions\n";
  return 0;
}

int cmd_apply(const std::string& file, int step, int max_unfold, bool gc,
              std::ostream& out, std::ostream& err) {
  ProtocolSpec spec = parse_protocol(read_file(file));
  auto trans = enabled_transitions(spec.body, EnumLimits{max_unfold},
                                   spec_reserved(spec));
  if (step < 0 || step >= (int)trans.size()) {
    err << "step " << step << " out of range (0.." << trans.size() - 1
        << ")\n";
    return 2;
  }
  out << pretty_print(successor_spec(spec, trans[step].successor), gc);
  return 0;
}

int cmd_crash(const std::string& file, const std::string& who, bool gc,
              std::ostream& out) {
  ProtocolSpec spec = parse_protocol(read_file(file));
  TermPtr crashed = crash(spec.body, parse_identity(who));
  ProtocolSpec result = spec;
  result.body = crashed;
  out << pretty_print(result, gc);
  return 0;
}

std::vector<PropertyKind> parse_props(const std::string& props,
                                      std::ostream& err, bool& ok) {
  ok = true;
  if (props == "none") return {};
  if (props == "all" || props.empty())
    return {PropertyKind::NoOrphans, PropertyKind::PreservationOfCoherence,
            PropertyKind::CrashPreservation, PropertyKind::Weakening};
  std::vector<PropertyKind> out;
  std::stringstream ss(props);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "no-orphans" || item == "orphans")
      out.push_back(PropertyKind::NoOrphans);
    else if (item == "preservation-of-coherence" || item == "preservation")
      out.push_back(PropertyKind::PreservationOfCoherence);
    else if (item == "crash-preservation" || item == "crash")
      out.push_back(PropertyKind::CrashPreservation);
    else if (item == "weakening")
      out.push_back(PropertyKind::Weakening);
    else {
      err << "unknown property: " << item << "\n";
      ok = false;
    }
  }
  return out;
}

int cmd_explore(const std::string& file, const Budgets& budgets,
                const std::string& json_path, const std::string& dot_path,
                const std::string& props, std::ostream& out,
                std::ostream& err) {
  ProtocolSpec spec = parse_protocol(read_file(file));
  bool props_ok = true;
  std::vector<PropertyKind> kinds = parse_props(props, err, props_ok);
  if (!props_ok) return 2;

  StateGraph graph = explore(spec, budgets);
  out << "protocol " << spec.name << ": " << graph.states.size()
      << " states, " << graph.edges.size() << " edges, truncated="
      << (graph.truncated ? "true" : "false") << "\n";
  out << "budgets: maxStates=" << budgets.max_states
      << " maxDepth=" << budgets.max_depth
      << " maxUnfoldPerBinder=" << budgets.max_unfold_per_binder << "\n";

  int exit_code = 0;
  std::vector<PropertyVerdict> verdicts;
  for (PropertyKind kind : kinds) {
    PropertyVerdict v = check_property(graph, kind);
    verdicts.push_back(v);
    if (!v.applicable) {
      out << "[not-applicable] " << property_name(kind)
          << ": initial state incoherent\n";
      exit_code = 1;
      continue;
    }
    out << "[" << (v.violations.empty() ? "ok" : "violated") << "] "
        << property_name(kind) << ": checked " << v.checked_states
        << " states, " << v.violations.size() << " violations\n";
    for (const auto& viol : v.violations)
      out << "    state " << viol.state << " via " << viol.witness << ": "
          << viol.diagnosis << "\n";
    if (!v.violations.empty()) exit_code = 1;
  }
  if (!json_path.empty())
    write_file(json_path, state_graph_json(graph, verdicts));
  if (!dot_path.empty()) write_file(dot_path, state_graph_dot(graph));
  return exit_code;
}

int cmd_trace(const std::string& file, std::uint64_t seed, int steps,
              const std::string& json_path, std::ostream& out) {
  ProtocolSpec spec = parse_protocol(read_file(file));
  std::vector<Transition> trace = sample_trace(spec, seed, steps);
  for (size_t i = 0; i < trace.size(); ++i)
    out << "[" << i << "] " << trace[i].rule << ": " << trace[i].label.str()
        << "\n";
  out << "final: "
      << term_to_string(trace.empty() ? normalize(spec.body)
                                      : trace.back().successor)
      << "\n";
  if (!json_path.empty())
    write_file(json_path,
               trace_json(spec.name, seed, normalize(spec.body), trace));
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"fault-tolerant multiparty session type toolkit"};
  app.require_subcommand(1);

  std::string file, json_path, dot_path, who, props = "none";
  std::string crash_only;
  bool strict = false, gc = false;
  int step = 0, trace_steps = 10;
  std::uint64_t seed = 0;
  Budgets budgets;

  auto* check = app.add_subcommand("check", "coherence-check a protocol");
  check->add_option("file", file)->required();
  check->add_flag("--strict-end", strict, "require empty env at end");
  check->add_option("--json", json_path, "write the JSON report");

  auto* steps_cmd = app.add_subcommand("steps", "list enabled transitions");
  steps_cmd->add_option("file", file)->required();
  steps_cmd->add_option("--max-unfold", budgets.max_unfold_per_binder);

  auto* apply = app.add_subcommand("apply", "apply one transition");
  apply->add_option("file", file)->required();
  apply->add_option("--step", step, "index from 'steps'")->required();
  apply->add_option("--max-unfold", budgets.max_unfold_per_binder);
  apply->add_flag("--gc", gc, "garbage-collect dead prefixes in output");

  auto* crash_cmd = app.add_subcommand("crash", "crash a participant");
  crash_cmd->add_option("file", file)->required();
  crash_cmd->add_option("--who", who, "participant, e.g. server or api.0")
      ->required();
  crash_cmd->add_flag("--gc", gc, "garbage-collect dead prefixes in output");

  auto* explore_cmd =
      app.add_subcommand("explore", "bounded state-space exploration");
  explore_cmd->add_option("file", file)->required();
  explore_cmd->add_option("--max-states", budgets.max_states);
  explore_cmd->add_option("--max-depth", budgets.max_depth);
  explore_cmd->add_option("--max-unfold", budgets.max_unfold_per_binder);
  explore_cmd->add_option("--json", json_path, "write the state graph JSON");
  explore_cmd->add_option("--dot", dot_path, "write the DOT graph");
  explore_cmd->add_option("--props", props,
                          "all|none|comma list of property names");
  explore_cmd->add_option("--crash-only", crash_only,
                          "restrict crash injection to these participants "
                          "(comma list)");

  auto* trace_cmd = app.add_subcommand("trace", "seeded random walk");
  trace_cmd->add_option("file", file)->required();
  trace_cmd->add_option("--seed", seed)->required();
  trace_cmd->add_option("--steps", trace_steps);
  trace_cmd->add_option("--json", json_path, "write the trace JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (check->parsed()) return cmd_check(file, strict, json_path, out);
    if (steps_cmd->parsed())
      return cmd_steps(file, budgets.max_unfold_per_binder, out);
    if (apply->parsed())
      return cmd_apply(file, step, budgets.max_unfold_per_binder, gc, out,
                       err);
    if (crash_cmd->parsed()) return cmd_crash(file, who, gc, out);
    if (explore_cmd->parsed()) {
      std::stringstream ss(crash_only);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) budgets.crash_only.insert(item);
      return cmd_explore(file, budgets, json_path, dot_path, props, out, err);
    }
    if (trace_cmd->parsed())
      return cmd_trace(file, seed, trace_steps, json_path, out);
  } catch (const ParseError& e) {
    err << file << ": parse error at line " << e.span.line << ", col "
        << e.span.column << ": " << e.what() << "\n";
    return 2;
  } catch (const WellFormednessError& e) {
    err << file << ": ill-formed at line " << e.span.line << ", col "
        << e.span.column << ": " << e.what() << "\n";
    return 2;
  } catch (const MissingErrBranchError& e) {
    err << file << ": " << e.what() << "\n";
    return 1;
  } catch (const MpstError& e) {
    err << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace mpst
