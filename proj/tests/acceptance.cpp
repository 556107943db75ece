// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "mpst/cli.hpp"
#include "mpst/explorer.hpp"
#include "mpst/json_io.hpp"
#include "mpst/kernel.hpp"
#include "mpst/parser.hpp"
#include "mpst/printer.hpp"

using namespace mpst;

namespace {

int failures = 0;

std::string corpus(const std::string& name) {
  return std::string(MPST_CORPUS_DIR) + "/" + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MpstError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ProtocolSpec load(const std::string& name) {
  return parse_protocol(read_file(corpus(name)));
}

void criterion(int n, const std::string& what, double limit_seconds,
               const std::function<bool(std::string&)>& run) {
  std::string detail;
  bool ok = false;
  auto t0 = std::chrono::steady_clock::now();
  try {
    ok = run(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (secs > limit_seconds) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + std::string("over time limit");
  }
  if (!ok) ++failures;
  std::printf("[%s] criterion %d: %s (%.2fs, limit %.0fs)%s%s\n",
              ok ? "PASS" : "FAIL", n, what.c_str(), secs, limit_seconds,
              detail.empty() ? "" : " -- ", detail.c_str());
}

bool check_corpus_coherent(const std::string& name, std::string& detail) {
  ProtocolSpec spec = load(name);
  Gamma gamma = gamma_from_decls(spec.public_decls, spec.private_decls);
  CoherenceReport r = check_coherence(spec.body, {}, gamma);
  if (!r.coherent) {
    detail += name + " incoherent: " + r.failures[0].rule + "; ";
    return false;
  }
  return true;
}

bool expect_incoherent(const TermPtr& g, const Gamma& gamma,
                       const std::string& rule, const std::string& what,
                       std::string& detail) {
  CoherenceReport r = check_coherence(g, {}, gamma);
  if (r.coherent) {
    detail += what + " unexpectedly coherent; ";
    return false;
  }
  if (r.failures[0].rule != rule) {
    detail += what + " failed rule " + r.failures[0].rule + ", expected " +
              rule + "; ";
    return false;
  }
  return true;
}

bool graph_clean(const StateGraph& graph, const std::string& what,
                 std::string& detail) {
  for (PropertyKind kind :
       {PropertyKind::NoOrphans, PropertyKind::PreservationOfCoherence,
        PropertyKind::CrashPreservation, PropertyKind::Weakening}) {
    PropertyVerdict v = check_property(graph, kind);
    if (!v.applicable) {
      detail += what + ": " + property_name(kind) + " not applicable; ";
      return false;
    }
    if (!v.violations.empty()) {
      detail += what + ": " + property_name(kind) + " violated at state " +
                std::to_string(v.violations[0].state) + " via " +
                v.violations[0].witness + "; ";
      return false;
    }
  }
  return true;
}

}  // namespace

int main() {
  criterion(1, "golden crash reproduction (api crash of purchase_response)",
            1.0, [](std::string& detail) {
    ProtocolSpec response = load("purchase_response.mpst");
    ProtocolSpec expected = load("purchase_response_api_crashed.mpst");
    TermPtr crashed = crash(response.body, Identity{"api", "0"});
    if (!structurally_equal(crashed, expected.body)) {
      detail = "crash result differs from the golden file";
      return false;
    }
    ProtocolSpec printed = response;
    printed.name = expected.name;
    printed.body = crashed;
    if (pretty_print(printed) != pretty_print(expected)) {
      detail = "pretty-printed crash result is not bit-exact";
      return false;
    }
    return true;
  });

  criterion(2, "golden timeout reproduction (server fails on s)", 1.0,
            [](std::string& detail) {
    ProtocolSpec response = load("purchase_response.mpst");
    ProtocolSpec expected = load("purchase_response_server_timeout.mpst");
    TransitionLabel fail_label =
        TransitionLabel::fail(Identity{"server", "0"}, ChannelName{"s"});
    bool enabled = false;
    for (const auto& t : enabled_transitions(response.body))
      if (t.label == fail_label) enabled = true;
    if (!enabled) {
      detail = "Fail(server.0, s) is not enabled";
      return false;
    }
    TermPtr succ = apply_transition(response.body, fail_label);
    if (!structurally_equal(succ, expected.body)) {
      detail = "timeout successor differs from the golden file";
      return false;
    }
    ProtocolSpec printed = response;
    printed.name = expected.name;
    printed.body = succ;
    if (pretty_print(printed) != pretty_print(expected)) {
      detail = "pretty-printed successor is not bit-exact";
      return false;
    }
    return true;
  });

  criterion(3, "golden happy path (purchase send reaches purchase_response)",
            1.0, [](std::string& detail) {
    ProtocolSpec purchase = load("purchase.mpst");
    ProtocolSpec response = load("purchase_response.mpst");
    TermPtr succ = apply_transition(
        purchase.body,
        TransitionLabel::comm(Identity{"server", "0"}, Identity{"api", "0"},
                              ChannelName{"s"},
                              Message::make_label("Purchase", "Order")));
    if (!structurally_equal(succ, response.body)) {
      detail = "successor differs from purchase_response";
      return false;
    }
    return true;
  });

  criterion(4, "coherence corpus and five incoherent mutants", 1.0,
            [](std::string& detail) {
    bool ok = check_corpus_coherent("purchase.mpst", detail) &&
              check_corpus_coherent("restart.mpst", detail);

    auto ep0 = [](const char* role) { return Endpoint{{role, "0"}, false}; };
    Gamma session{{"s", ChannelBinding::session(ep0("p"), ep0("q"))}};

    // duplicate labels
    ok &= expect_incoherent(
        make_action(ep0("p"), ep0("q"), ChannelName{"s"},
                    {{Message::make_label("Go", "Id"), make_end()},
                     {Message::make_label("Go", "Num"), make_end()},
                     {Message::make_err(), make_end()}}),
        session, "send", "duplicate-labels", detail);
    // undeclared channel
    ok &= expect_incoherent(
        make_action(ep0("p"), ep0("q"), ChannelName{"u"},
                    {{Message::make_label("Go", "Id"), make_end()},
                     {Message::make_err(), make_end()}}),
        session, "send", "undeclared-channel", detail);
    // stale channel reuse in a request
    Gamma pub{{"k", ChannelBinding::public_server(Identity{"srv", "0"})}};
    TermPtr inner = make_action(ep0("p"), ep0("srv"), ChannelName{"k"},
                                {{Message::make_new("t"), make_end()},
                                 {Message::make_err(), make_end()}});
    ok &= expect_incoherent(
        make_action(ep0("p"), ep0("srv"), ChannelName{"k"},
                    {{Message::make_new("t"), inner},
                     {Message::make_err(), make_end()}}),
        pub, "req", "stale-channel-reuse", detail);
    // labelled action without an ERR branch
    ok &= expect_incoherent(
        make_action(ep0("p"), ep0("q"), ChannelName{"s"},
                    {{Message::make_label("Go", "Id"), make_end()}}),
        session, "malformed", "missing-err-branch", detail);
    // mixed-initiator choice
    ok &= expect_incoherent(
        make_choice(
            {make_action(ep0("p"), ep0("q"), ChannelName{"s"},
                         {{Message::make_label("A", "U"), make_end()},
                          {Message::make_err(), make_end()}}),
             make_action(ep0("q"), ep0("p"), ChannelName{"s"},
                         {{Message::make_label("B", "U"), make_end()},
                          {Message::make_err(), make_end()}})}),
        session, "sum", "mixed-initiator-choice", detail);
    return ok;
  });

  criterion(5,
            "theorem suites: purchase, restart, 1000 generated protocols "
            "under default budgets",
            60.0, [](std::string& detail) {
    bool ok = graph_clean(explore(load("purchase.mpst")), "purchase", detail);
    ok &= graph_clean(explore(load("restart.mpst")), "restart", detail);
    for (uint64_t seed = 1; seed <= 1000; ++seed) {
      ProtocolSpec spec;
      try {
        spec = generate_coherent(seed, 1 + (int)(seed % 6));
      } catch (const GenerationExhaustedError& e) {
        detail = std::string("generation exhausted: ") + e.what();
        return false;
      }
      if (!graph_clean(explore(spec), "seed " + std::to_string(seed),
                       detail))
        return false;
    }
    return ok;
  });

  criterion(6, "two-step timeout witness on purchase_response", 1.0,
            [](std::string& detail) {
    ProtocolSpec response = load("purchase_response.mpst");
    auto w = two_step_timeout_witness(response.body);
    if (!w) {
      detail = "no witness found";
      return false;
    }
    if (w->first_fail.label.kind != TransitionLabel::Kind::Fail ||
        w->second_fail.label.kind != TransitionLabel::Kind::Fail ||
        w->first_fail.label.channel != w->second_fail.label.channel ||
        w->first_fail.label.subject == w->second_fail.label.subject) {
      detail = "witness fails are not two endpoints of one channel";
      return false;
    }
    // The unblocked step must be disabled in the intermediate state.
    TermPtr mid = w->first_fail.successor;
    for (const auto& t : enabled_transitions(mid))
      if (t.label == w->unblocked.label) {
        detail = "continuation step was not blocked between the fails";
        return false;
      }
    TermPtr after = w->second_fail.successor;
    bool enabled_after = false;
    for (const auto& t : enabled_transitions(after))
      if (t.label == w->unblocked.label) enabled_after = true;
    if (!enabled_after) {
      detail = "continuation step not enabled after the second fail";
      return false;
    }
    return true;
  });

  criterion(7, "byte-identical exploration and trace replay", 10.0,
            [](std::string& detail) {
    std::ostringstream sink;
    std::string j1 = "/tmp/mpst_acc_graph1.json";
    std::string j2 = "/tmp/mpst_acc_graph2.json";
    if (run_cli({"explore", corpus("purchase.mpst"), "--props", "all",
                 "--json", j1},
                sink, sink) != 0 ||
        run_cli({"explore", corpus("purchase.mpst"), "--props", "all",
                 "--json", j2},
                sink, sink) != 0) {
      detail = "explore exited nonzero";
      return false;
    }
    if (read_file(j1) != read_file(j2)) {
      detail = "explore --json is not byte-identical across runs";
      return false;
    }
    std::string t1 = "/tmp/mpst_acc_trace1.json";
    std::string t2 = "/tmp/mpst_acc_trace2.json";
    if (run_cli({"trace", corpus("purchase.mpst"), "--seed", "42", "--steps",
                 "16", "--json", t1},
                sink, sink) != 0 ||
        run_cli({"trace", corpus("purchase.mpst"), "--seed", "42", "--steps",
                 "16", "--json", t2},
                sink, sink) != 0) {
      detail = "trace exited nonzero";
      return false;
    }
    if (read_file(t1) != read_file(t2)) {
      detail = "trace --seed 42 did not replay identically";
      return false;
    }
    std::remove(j1.c_str());
    std::remove(j2.c_str());
    std::remove(t1.c_str());
    std::remove(t2.c_str());
    return true;
  });

  criterion(8, "parse/pretty-print round-trip on corpus and 1000 generated",
            30.0, [](std::string& detail) {
    for (const char* name :
         {"purchase.mpst", "purchase_response.mpst",
          "purchase_response_api_crashed.mpst",
          "purchase_response_server_timeout.mpst", "restart.mpst",
          "dispatch.mpst", "offload.mpst", "trivial.mpst"}) {
      ProtocolSpec spec = load(name);
      ProtocolSpec again = parse_protocol(pretty_print(spec));
      if (!structurally_equal(again.body, spec.body)) {
        detail = std::string(name) + " does not round-trip";
        return false;
      }
    }
    for (uint64_t seed = 1; seed <= 1000; ++seed) {
      ProtocolSpec spec = generate_coherent(seed, 1 + (int)(seed % 6));
      ProtocolSpec again = parse_protocol(pretty_print(spec));
      if (!structurally_equal(again.body, spec.body)) {
        detail = "seed " + std::to_string(seed) + " does not round-trip";
        return false;
      }
    }
    return true;
  });

  if (failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", failures);
  return 1;
}
