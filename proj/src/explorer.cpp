#include "mpst/explorer.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>

#include "mpst/kernel.hpp"

namespace mpst {

namespace {

std::set<std::string> reserved_names(const ProtocolSpec& spec) {
  std::set<std::string> out;
  for (const auto& d : spec.public_decls) out.insert(d.channel.name);
  for (const auto& d : spec.private_decls) out.insert(d.channel.name);
  collect_names(spec.body, out);
  return out;
}

}  // namespace

StateGraph explore(const ProtocolSpec& spec, const Budgets& budgets) {
  StateGraph graph;
  graph.spec = spec;
  graph.budgets = budgets;
  EnumLimits limits{budgets.max_unfold_per_binder};
  std::set<std::string> reserved = reserved_names(spec);

  TermPtr init = normalize(spec.body);
  graph.states.push_back(init);
  graph.state_keys.push_back(term_to_string(init));
  graph.depth.push_back(0);
  std::map<std::string, int> ids{{graph.state_keys[0], 0}};

  std::deque<int> frontier{0};
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop_front();
    if (graph.depth[u] >= budgets.max_depth) {
      if (!enabled_transitions(graph.states[u], limits, reserved).empty())
        graph.truncated = true;
      continue;
    }
    for (const auto& t :
         enabled_transitions(graph.states[u], limits, reserved)) {
      if (!budgets.crash_only.empty() &&
          t.label.kind == TransitionLabel::Kind::Crash &&
          !budgets.crash_only.count(t.label.subject.str()))
        continue;
      std::string key = term_to_string(t.successor);
      auto it = ids.find(key);
      int v;
      if (it != ids.end()) {
        v = it->second;
      } else if ((int)graph.states.size() < budgets.max_states) {
        v = (int)graph.states.size();
        ids.emplace(key, v);
        graph.states.push_back(t.successor);
        graph.state_keys.push_back(key);
        graph.depth.push_back(graph.depth[u] + 1);
        frontier.push_back(v);
      } else {
        graph.truncated = true;
        continue;  // target beyond the state budget; edge dropped
      }
      graph.edges.push_back({u, v, t.label, t.rule});
    }
  }
  return graph;
}

std::string property_name(PropertyKind p) {
  switch (p) {
    case PropertyKind::NoOrphans:
      return "no-orphans";
    case PropertyKind::PreservationOfCoherence:
      return "preservation-of-coherence";
    case PropertyKind::CrashPreservation:
      return "crash-preservation";
    case PropertyKind::Weakening:
      return "weakening";
  }
  return "?";
}

namespace {

struct CoherenceMemo {
  const StateGraph& graph;
  CoherenceMode mode;
  std::vector<int> cache;  // -1 unknown, 0 incoherent, 1 coherent
  std::vector<std::string> diags;

  CoherenceMemo(const StateGraph& g, CoherenceMode m)
      : graph(g), mode(m), cache(g.states.size(), -1),
        diags(g.states.size()) {}

  bool coherent(int state) {
    if (cache[state] < 0) {
      Gamma gamma = runtime_gamma(graph.states[state],
                                  graph.spec.public_decls,
                                  graph.spec.private_decls);
      CoherenceReport r =
          check_coherence(graph.states[state], {}, gamma, mode);
      cache[state] = r.coherent ? 1 : 0;
      if (!r.coherent)
        diags[state] = r.failures[0].rule + " at " + r.failures[0].path +
                       ": " + r.failures[0].message;
    }
    return cache[state] == 1;
  }
};

std::string weakening_var(const TermPtr& g) {
  std::set<std::string> names;
  struct {
    void operator()(const TermPtr& t, std::set<std::string>& out) {
      if (t->kind == Term::Kind::Rec || t->kind == Term::Kind::Var)
        out.insert(t->var);
      if (t->body) (*this)(t->body, out);
      if (t->left) (*this)(t->left, out);
      if (t->right) (*this)(t->right, out);
      for (const auto& a : t->alts) (*this)(a, out);
      for (const auto& b : t->branches) (*this)(b.cont, out);
    }
  } collect;
  collect(g, names);
  for (int k = 1;; ++k) {
    std::string candidate = "Zw" + std::to_string(k);
    if (!names.count(candidate)) return candidate;
  }
}

}  // namespace

PropertyVerdict check_property(const StateGraph& graph, PropertyKind property,
                               CoherenceMode mode) {
  PropertyVerdict verdict;
  verdict.property = property;
  if (graph.states.empty()) return verdict;

  CoherenceMemo memo(graph, mode);

  switch (property) {
    case PropertyKind::NoOrphans: {
      std::vector<ParticipantSet> pts;
      pts.reserve(graph.states.size());
      for (const auto& s : graph.states) pts.push_back(participants(s));
      for (const auto& e : graph.edges) {
        for (const auto& subj : subjects(e.label)) {
          if (!pts[e.src].count(subj)) {
            verdict.violations.push_back(
                {e.src, e.label.str(),
                 "subject " + subj.str() + " is not a participant"});
          }
        }
      }
      verdict.checked_states = (int)graph.states.size();
      return verdict;
    }
    case PropertyKind::PreservationOfCoherence: {
      if (!memo.coherent(graph.initial)) {
        verdict.applicable = false;
        return verdict;
      }
      for (const auto& e : graph.edges) {
        if (memo.coherent(e.src) && !memo.coherent(e.dst)) {
          verdict.violations.push_back(
              {e.dst, e.label.str(), memo.diags[e.dst]});
        }
      }
      verdict.checked_states = (int)graph.states.size();
      return verdict;
    }
    case PropertyKind::CrashPreservation: {
      if (!memo.coherent(graph.initial)) {
        verdict.applicable = false;
        return verdict;
      }
      int checked = 0;
      for (size_t u = 0; u < graph.states.size(); ++u) {
        if (!memo.coherent((int)u)) continue;
        ++checked;
        for (const auto& p : participants(graph.states[u])) {
          TermPtr crashed;
          try {
            crashed = normalize(crash(graph.states[u], p));
          } catch (const MissingErrBranchError& e) {
            verdict.violations.push_back(
                {(int)u, TransitionLabel::crash_of(p).str(), e.what()});
            continue;
          }
          Gamma gamma = runtime_gamma(crashed, graph.spec.public_decls,
                                      graph.spec.private_decls);
          CoherenceReport r = check_coherence(crashed, {}, gamma, mode);
          if (!r.coherent) {
            verdict.violations.push_back(
                {(int)u, TransitionLabel::crash_of(p).str(),
                 "crashed type incoherent: " + r.failures[0].rule + " at " +
                     r.failures[0].path});
          }
        }
      }
      verdict.checked_states = checked;
      return verdict;
    }
    case PropertyKind::Weakening: {
      if (!memo.coherent(graph.initial)) {
        verdict.applicable = false;
        return verdict;
      }
      int sample = std::min<int>((int)graph.states.size(), 32);
      int checked = 0;
      for (int u = 0; u < sample; ++u) {
        if (!memo.coherent(u)) continue;
        ++checked;
        Gamma gamma = runtime_gamma(graph.states[u], graph.spec.public_decls,
                                    graph.spec.private_decls);
        Delta weakened =
            weaken_delta({}, weakening_var(graph.states[u]), gamma);
        CoherenceReport r =
            check_coherence(graph.states[u], weakened, gamma, mode);
        if (!r.coherent) {
          verdict.violations.push_back(
              {u, "weaken " + weakened.begin()->first,
               "coherence lost under weakening: " + r.failures[0].rule});
        }
      }
      verdict.checked_states = checked;
      return verdict;
    }
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// Random coherent protocol generation
// ---------------------------------------------------------------------------

namespace {

const char* kLabelPool[] = {"Go", "Stop", "Ping", "Pong", "Data", "Sync"};
const char* kPayloadPool[] = {"Unit", "Num", "Str"};

struct Generator {
  std::mt19937_64 rng;
  int actions_left;
  int next_fresh = 0;
  int next_var = 0;
  ProtocolSpec spec;

  size_t pick(size_t n) { return n == 0 ? 0 : rng() % n; }
  bool chance(int percent) { return (int)(rng() % 100) < percent; }

  std::string fresh_channel() { return "f" + std::to_string(++next_fresh); }
  std::string fresh_var() { return "X" + std::to_string(++next_var); }

  Message random_label_msg(std::set<std::string>& used) {
    for (;;) {
      std::string l = kLabelPool[pick(std::size(kLabelPool))];
      if (used.insert(l).second)
        return Message::make_label(l, kPayloadPool[pick(std::size(kPayloadPool))]);
    }
  }

  std::vector<std::string> session_channels(const Gamma& gamma) {
    std::vector<std::string> out;
    for (const auto& [chan, binding] : gamma)
      if (binding.kind == ChannelBinding::Kind::Session) out.push_back(chan);
    return out;
  }

  TermPtr leaf(const Gamma& gamma, const std::map<std::string, Gamma>& delta,
               const std::set<std::string>& emittable) {
    std::vector<std::string> vars;
    for (const auto& [var, snapshot] : delta)
      if (emittable.count(var) && snapshot == gamma) vars.push_back(var);
    if (!vars.empty() && chance(50)) return make_var(vars[pick(vars.size())]);
    return make_end();
  }

  TermPtr gen(const Gamma& gamma, const std::map<std::string, Gamma>& delta,
              const std::set<std::string>& emittable, int rec_depth,
              bool in_rec) {
    if (actions_left <= 0) return leaf(gamma, delta, emittable);

    std::vector<std::string> sessions = session_channels(gamma);
    std::vector<int> shapes;  // 0 send, 1 req, 2 spawn, 3 choice, 4 par, 5 rec
    auto add = [&](int shape, int weight) {
      for (int i = 0; i < weight; ++i) shapes.push_back(shape);
    };
    if (!sessions.empty()) add(0, 50);
    if (!spec.public_decls.empty() && !in_rec && actions_left >= 2) add(1, 14);
    if (!in_rec && actions_left >= 2) add(2, 8);
    if (!sessions.empty() && actions_left >= 3) add(3, 10);
    if (sessions.size() >= 2 && actions_left >= 2) add(4, 8);
    if (rec_depth < 2 && !sessions.empty() && actions_left >= 2) add(5, 8);
    if (shapes.empty()) return leaf(gamma, delta, emittable);

    switch (shapes[pick(shapes.size())]) {
      case 0:
        return gen_send(gamma, delta, rec_depth, in_rec);
      case 1:
        return gen_request(gamma, delta, rec_depth);
      case 2:
        return gen_spawn(gamma, delta, rec_depth);
      case 3:
        return gen_choice(gamma, delta, rec_depth, in_rec);
      case 4:
        return gen_par(gamma, rec_depth);
      case 5:
        return gen_rec(gamma, delta, rec_depth);
    }
    return leaf(gamma, delta, emittable);
  }

  // All recursion variables become emittable once an action guards them.
  static std::set<std::string> all_vars(
      const std::map<std::string, Gamma>& delta) {
    std::set<std::string> out;
    for (const auto& [var, _] : delta) out.insert(var);
    return out;
  }

  TermPtr gen_send(const Gamma& gamma,
                   const std::map<std::string, Gamma>& delta, int rec_depth,
                   bool in_rec) {
    std::vector<std::string> sessions = session_channels(gamma);
    const std::string chan = sessions[pick(sessions.size())];
    const ChannelBinding& binding = gamma.at(chan);
    Endpoint p = binding.a, q = binding.b;
    if (chance(50)) std::swap(p, q);
    --actions_left;

    int nlabels = actions_left > 0 && chance(30) ? 2 : 1;
    std::set<std::string> used;
    std::vector<Branch> branches;
    for (int i = 0; i < nlabels; ++i) {
      Message msg = random_label_msg(used);
      branches.push_back(
          {msg, gen(gamma, delta, all_vars(delta), rec_depth, in_rec)});
    }
    Gamma closed = gamma;
    closed.erase(chan);
    branches.push_back({Message::make_err(),
                        gen(closed, delta, all_vars(delta), rec_depth,
                            in_rec)});
    return make_action(p, q, ChannelName{chan}, std::move(branches));
  }

  TermPtr gen_request(const Gamma& gamma,
                      const std::map<std::string, Gamma>& delta,
                      int rec_depth) {
    const PublicDecl& pub =
        spec.public_decls[pick(spec.public_decls.size())];
    // Any session endpoint may issue the request; fall back to a base role.
    std::vector<Endpoint> candidates;
    for (const auto& [chan, binding] : gamma)
      if (binding.kind == ChannelBinding::Kind::Session) {
        candidates.push_back(binding.a);
        candidates.push_back(binding.b);
      }
    if (candidates.empty()) candidates.push_back(Endpoint{{"alice", "0"}});
    Endpoint p = candidates[pick(candidates.size())];
    if (p.id == pub.server.id) p = Endpoint{{"alice", "0"}};
    std::string t = fresh_channel();
    --actions_left;

    Gamma inner = gamma;
    inner.emplace(t, ChannelBinding::session(
                         Endpoint{p.id, false},
                         Endpoint{Identity{pub.server.id.role, t}, false}));
    std::vector<Branch> branches;
    branches.push_back({Message::make_new(t),
                        gen(inner, delta, all_vars(delta), rec_depth, false)});
    branches.push_back({Message::make_err(),
                        gen(gamma, delta, all_vars(delta), rec_depth, false)});
    return make_action(p, pub.server, ChannelName{pub.channel.name},
                       std::move(branches));
  }

  TermPtr gen_spawn(const Gamma& gamma,
                    const std::map<std::string, Gamma>& delta,
                    int rec_depth) {
    std::vector<Endpoint> candidates;
    for (const auto& [chan, binding] : gamma)
      if (binding.kind == ChannelBinding::Kind::Session) {
        candidates.push_back(binding.a);
        candidates.push_back(binding.b);
      }
    if (candidates.empty()) candidates.push_back(Endpoint{{"alice", "0"}});
    Endpoint p = candidates[pick(candidates.size())];
    std::string w = fresh_channel();
    --actions_left;

    Gamma inner = gamma;
    inner.emplace(w, ChannelBinding::session(
                         Endpoint{p.id, false},
                         Endpoint{Identity{p.id.role, w}, false}));
    std::vector<Branch> branches;
    branches.push_back({Message::make_new(w),
                        gen(inner, delta, all_vars(delta), rec_depth, false)});
    branches.push_back({Message::make_err(),
                        gen(gamma, delta, all_vars(delta), rec_depth, false)});
    return make_action(p, p, ChannelName{kTauName}, std::move(branches));
  }

  TermPtr gen_choice(const Gamma& gamma,
                     const std::map<std::string, Gamma>& delta,
                     int rec_depth, bool in_rec) {
    std::vector<std::string> sessions = session_channels(gamma);
    const std::string chan = sessions[pick(sessions.size())];
    const ChannelBinding& binding = gamma.at(chan);
    Endpoint p = binding.a, q = binding.b;
    if (chance(50)) std::swap(p, q);

    actions_left -= 2;  // both heads up front, so the bound holds
    std::set<std::string> used;  // distinct head labels across branches
    std::vector<TermPtr> alts;
    for (int i = 0; i < 2; ++i) {
      Message head = random_label_msg(used);
      std::vector<Branch> branches;
      branches.push_back(
          {head, gen(gamma, delta, all_vars(delta), rec_depth, in_rec)});
      Gamma closed = gamma;
      closed.erase(chan);
      branches.push_back({Message::make_err(),
                          gen(closed, delta, all_vars(delta), rec_depth,
                              in_rec)});
      alts.push_back(
          make_action(p, q, ChannelName{chan}, std::move(branches)));
    }
    return make_choice(std::move(alts));
  }

  TermPtr gen_par(const Gamma& gamma, int rec_depth) {
    std::vector<std::string> sessions = session_channels(gamma);
    size_t cut = 1 + pick(sessions.size() - 1);
    Gamma left, right;
    for (const auto& [chan, binding] : gamma) {
      if (binding.kind == ChannelBinding::Kind::PublicServer) {
        left.emplace(chan, binding);
        right.emplace(chan, binding);
        continue;
      }
      size_t at = std::find(sessions.begin(), sessions.end(), chan) -
                  sessions.begin();
      (at < cut ? left : right).emplace(chan, binding);
    }
    // Outer recursion variables are unusable inside par sides (their
    // snapshots mention the whole environment).
    TermPtr l = gen(left, {}, {}, rec_depth, true);
    TermPtr r = gen(right, {}, {}, rec_depth, true);
    return make_par(l, r);
  }

  TermPtr gen_rec(const Gamma& gamma,
                  const std::map<std::string, Gamma>& delta, int rec_depth) {
    std::string var = fresh_var();
    std::map<std::string, Gamma> inner = delta;
    inner.emplace(var, gamma);
    // The body must start with an action to keep the variable guarded.
    TermPtr body = gen_send(gamma, inner, rec_depth + 1, true);
    return make_rec(var, body);
  }

  ProtocolSpec build(int size) {
    spec = ProtocolSpec{};
    spec.name = "generated";
    std::vector<std::string> roles = {"alice", "bob", "carol"};
    int nroles = 2 + (int)pick(2);

    int nsessions = 1 + (int)pick(2);
    for (int i = 0; i < nsessions; ++i) {
      size_t a = pick(nroles);
      size_t b = (a + 1 + pick(nroles - 1)) % nroles;
      spec.private_decls.push_back(
          {ChannelName{"c" + std::to_string(i + 1)},
           Endpoint{{roles[a], "0"}}, Endpoint{{roles[b], "0"}}});
    }
    if (chance(40))
      spec.public_decls.push_back(
          {ChannelName{"k_srv"}, Endpoint{{"srv", "0"}}});

    actions_left = size;
    Gamma gamma = gamma_from_decls(spec.public_decls, spec.private_decls);
    spec.body = gen(gamma, {}, {}, 0, false);
    return spec;
  }
};

}  // namespace

ProtocolSpec generate_coherent(std::uint64_t seed, int size) {
  for (int attempt = 0; attempt < 25; ++attempt) {
    Generator g;
    g.rng.seed(seed ^ (0x9E3779B97F4A7C15ULL * (attempt + 1)));
    ProtocolSpec spec = g.build(size);
    Gamma gamma = gamma_from_decls(spec.public_decls, spec.private_decls);
    if (check_coherence(spec.body, {}, gamma, CoherenceMode::RelaxedEnd)
            .coherent)
      return spec;
  }
  throw GenerationExhaustedError("no coherent protocol for seed " +
                                 std::to_string(seed));
}

std::vector<Transition> sample_trace(const ProtocolSpec& spec,
                                     std::uint64_t seed, int max_steps,
                                     const EnumLimits& limits) {
  std::mt19937_64 rng(seed);
  std::set<std::string> reserved = reserved_names(spec);
  std::vector<Transition> out;
  TermPtr state = normalize(spec.body);
  for (int i = 0; i < max_steps; ++i) {
    std::vector<Transition> trans =
        enabled_transitions(state, limits, reserved);
    if (trans.empty()) break;
    const Transition& t = trans[rng() % trans.size()];
    out.push_back(t);
    state = t.successor;
  }
  return out;
}

}  // namespace mpst
