#include "mpst/json_io.hpp"

#include <sstream>

#include "json.hpp"

namespace mpst {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json span_json(const SourceSpan& s) {
  return ordered_json{{"line", s.line}, {"column", s.column},
                      {"length", s.length}};
}

ordered_json label_json(const TransitionLabel& l) {
  ordered_json j;
  switch (l.kind) {
    case TransitionLabel::Kind::Comm:
      j["kind"] = "comm";
      j["sender"] = l.sender.str();
      j["receiver"] = l.receiver.str();
      j["channel"] = l.channel.name;
      j["message"] = l.message.str();
      break;
    case TransitionLabel::Kind::Fail:
      j["kind"] = "fail";
      j["subject"] = l.subject.str();
      j["channel"] = l.channel.name;
      break;
    case TransitionLabel::Kind::Crash:
      j["kind"] = "crash";
      j["subject"] = l.subject.str();
      break;
  }
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string coherence_report_json(const std::string& protocol,
                                  const CoherenceReport& report) {
  ordered_json j;
  j["protocol"] = protocol;
  j["mode"] = mode_name(report.mode);
  j["verdict"] = report.coherent ? "coherent" : "incoherent";
  j["failures"] = ordered_json::array();
  for (const auto& f : report.failures) {
    j["failures"].push_back(ordered_json{{"rule", f.rule},
                                         {"path", f.path},
                                         {"message", f.message},
                                         {"span", span_json(f.span)}});
  }
  return dump(j);
}

std::string state_graph_json(const StateGraph& graph,
                             const std::vector<PropertyVerdict>& verdicts) {
  ordered_json j;
  j["protocol"] = graph.spec.name;
  j["budgets"] = ordered_json{
      {"maxStates", graph.budgets.max_states},
      {"maxDepth", graph.budgets.max_depth},
      {"maxUnfoldPerBinder", graph.budgets.max_unfold_per_binder}};
  if (!graph.budgets.crash_only.empty())
    j["budgets"]["crashOnly"] = graph.budgets.crash_only;
  j["truncated"] = graph.truncated;
  j["states"] = ordered_json::array();
  for (size_t i = 0; i < graph.states.size(); ++i)
    j["states"].push_back(
        ordered_json{{"id", i}, {"term", graph.state_keys[i]}});
  j["edges"] = ordered_json::array();
  for (const auto& e : graph.edges)
    j["edges"].push_back(ordered_json{{"src", e.src},
                                      {"label", label_json(e.label)},
                                      {"rule", e.rule},
                                      {"dst", e.dst}});
  j["properties"] = ordered_json::array();
  for (const auto& v : verdicts) {
    ordered_json p;
    p["name"] = property_name(v.property);
    p["status"] = v.applicable ? "ok" : "not-applicable";
    p["checked"] = v.checked_states;
    p["violations"] = ordered_json::array();
    for (const auto& viol : v.violations)
      p["violations"].push_back(ordered_json{{"state", viol.state},
                                             {"witness", viol.witness},
                                             {"diagnosis", viol.diagnosis}});
    j["properties"].push_back(p);
  }
  return dump(j);
}

std::string trace_json(const std::string& protocol, std::uint64_t seed,
                       const TermPtr& initial,
                       const std::vector<Transition>& steps) {
  ordered_json j;
  j["protocol"] = protocol;
  j["seed"] = seed;
  j["initial"] = term_to_string(initial);
  j["steps"] = ordered_json::array();
  std::string src = term_to_string(initial);
  for (const auto& t : steps) {
    std::string dst = term_to_string(t.successor);
    j["steps"].push_back(ordered_json{{"src", src},
                                      {"label", label_json(t.label)},
                                      {"rule", t.rule},
                                      {"dst", dst}});
    src = dst;
  }
  return dump(j);
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string state_graph_dot(const StateGraph& graph) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(graph.spec.name) << "\" {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=circle, fontsize=10];\n";
  for (size_t i = 0; i < graph.states.size(); ++i) {
    os << "  " << i << " [label=\"" << i << "\", tooltip=\""
       << dot_escape(graph.state_keys[i]) << "\"];\n";
  }
  for (const auto& e : graph.edges) {
    os << "  " << e.src << " -> " << e.dst << " [label=\""
       << dot_escape(e.rule + ": " + e.label.str()) << "\"";
    if (e.label.kind == TransitionLabel::Kind::Crash) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace mpst
