#include "mpst/semantics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "mpst/kernel.hpp"

namespace mpst {

namespace {

struct EnumCtx {
  int max_unfold = 2;
  std::map<std::string, int> unfold_left;  // per rec binder name
  std::set<std::string> avoid;             // names fresh channels must miss
};

std::string child(const std::string& path, const std::string& seg) {
  return path.empty() ? seg : path + "/" + seg;
}

std::vector<Transition> enum_term(const TermPtr& g, EnumCtx ctx,
                                  const std::string& path);

// All index combinations over per-branch alternatives, lexicographic.
void for_each_combo(const std::vector<size_t>& sizes,
                    const std::function<void(const std::vector<size_t>&)>& f) {
  std::vector<size_t> idx(sizes.size(), 0);
  while (true) {
    f(idx);
    size_t k = sizes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < sizes[k]) break;
      idx[k] = 0;
      if (k == 0) return;
    }
  }
}

std::vector<Transition> enum_action(const TermPtr& g, const EnumCtx& ctx,
                                    const std::string& path) {
  std::vector<Transition> out;
  const Branch* err = find_err_branch(g);
  bool sender_live = !g->sender.crashed;
  bool receiver_live = !g->receiver.crashed;

  // [com]
  if (sender_live && receiver_live) {
    for (const auto& b : g->branches) {
      if (b.msg.is_err()) continue;
      out.push_back({TransitionLabel::comm(g->sender.id, g->receiver.id,
                                           g->channel, b.msg),
                     b.cont, "com", path});
    }
  }

  // [com!]: the sender times out or hits a connection error.
  if (err && sender_live && g->sender.id != g->receiver.id) {
    Endpoint s = g->sender;
    s.crashed = true;
    TermPtr succ = make_action(s, g->receiver, g->channel,
                               {{Message::make_err(), err->cont}}, g->span);
    out.push_back({TransitionLabel::fail(g->sender.id, g->channel), succ,
                   "com-snd-fail", path});
  }

  // [com?]: the receiver stops waiting; only for plain messages (a server
  // cannot time out an incoming request).
  bool all_labels = true;
  for (const auto& b : g->branches)
    if (b.msg.kind == Message::Kind::New) all_labels = false;
  if (err && receiver_live && all_labels) {
    Endpoint r = g->receiver;
    r.crashed = true;
    TermPtr succ = make_action(g->sender, r, g->channel,
                               {{Message::make_err(), err->cont}}, g->span);
    out.push_back({TransitionLabel::fail(g->receiver.id, g->channel), succ,
                   "com-rcv-fail", path});
  }

  // [concur]: an unrelated action may run ahead of the prefix if it is
  // enabled in every branch and avoids the prefix's live endpoints and each
  // branch's spawn-pending participant.
  std::vector<std::vector<Transition>> sub;
  sub.reserve(g->branches.size());
  for (size_t i = 0; i < g->branches.size(); ++i)
    sub.push_back(enum_term(g->branches[i].cont, ctx,
                            child(path, "b" + std::to_string(i))));
  std::map<std::string, std::vector<std::vector<const Transition*>>> by_label;
  // by_label: label key -> per-branch matching transitions (index by branch)
  std::map<std::string, TransitionLabel> labels;
  for (size_t i = 0; i < sub.size(); ++i) {
    for (const auto& t : sub[i]) {
      std::string key = t.label.sort_key();
      auto& rows = by_label[key];
      rows.resize(g->branches.size());
      rows[i].push_back(&t);
      labels.emplace(key, t.label);
    }
  }
  ParticipantSet prefix_live = live_set({g->sender, g->receiver});
  for (const auto& [key, rows] : by_label) {
    bool in_all = true;
    for (const auto& row : rows)
      if (row.empty()) in_all = false;
    if (rows.size() != g->branches.size() || !in_all) continue;
    const TransitionLabel& label = labels.at(key);
    ParticipantSet subj = subjects(label);
    bool blocked = false;
    for (size_t i = 0; i < g->branches.size() && !blocked; ++i) {
      ParticipantSet forbidden = prefix_live;
      ParticipantSet spawned =
          spawn_set(g->receiver, g->branches[i].msg);
      forbidden.insert(spawned.begin(), spawned.end());
      for (const auto& id : subj)
        if (forbidden.count(id)) blocked = true;
    }
    if (blocked) continue;
    std::vector<size_t> sizes;
    for (const auto& row : rows) sizes.push_back(row.size());
    for_each_combo(sizes, [&](const std::vector<size_t>& idx) {
      std::vector<Branch> branches;
      branches.reserve(g->branches.size());
      for (size_t i = 0; i < g->branches.size(); ++i)
        branches.push_back({g->branches[i].msg, rows[i][idx[i]]->successor});
      TermPtr succ = make_action(g->sender, g->receiver, g->channel,
                                 std::move(branches), g->span);
      out.push_back({label, succ, "concur", rows[0][idx[0]]->path});
    });
  }
  return out;
}

std::vector<Transition> enum_choice(const TermPtr& g, const EnumCtx& ctx,
                                    const std::string& path) {
  std::vector<Transition> out;
  std::vector<std::vector<Transition>> sub;
  sub.reserve(g->alts.size());
  for (size_t i = 0; i < g->alts.size(); ++i)
    sub.push_back(
        enum_term(g->alts[i], ctx, child(path, "alt" + std::to_string(i))));

  // [choice]: the initiator resolves the choice, committing to one branch.
  std::optional<Identity> init = initiator(g);
  if (init) {
    for (const auto& branch : sub)
      for (const auto& t : branch)
        if (subjects(t.label).count(*init))
          out.push_back({t.label, t.successor, "choice", t.path});
  }

  // [choice-br]: an action available in every branch runs without
  // resolving the choice.
  std::map<std::string, std::vector<std::vector<const Transition*>>> by_label;
  std::map<std::string, TransitionLabel> labels;
  for (size_t i = 0; i < sub.size(); ++i) {
    for (const auto& t : sub[i]) {
      std::string key = t.label.sort_key();
      auto& rows = by_label[key];
      rows.resize(g->alts.size());
      rows[i].push_back(&t);
      labels.emplace(key, t.label);
    }
  }
  for (const auto& [key, rows] : by_label) {
    bool in_all = rows.size() == g->alts.size();
    for (const auto& row : rows)
      if (row.empty()) in_all = false;
    if (!in_all) continue;
    std::vector<size_t> sizes;
    for (const auto& row : rows) sizes.push_back(row.size());
    for_each_combo(sizes, [&](const std::vector<size_t>& idx) {
      std::vector<TermPtr> alts;
      alts.reserve(g->alts.size());
      for (size_t i = 0; i < g->alts.size(); ++i)
        alts.push_back(rows[i][idx[i]]->successor);
      out.push_back({labels.at(key), make_choice(std::move(alts), g->span),
                     "choice-br", rows[0][idx[0]]->path});
    });
  }
  return out;
}

std::vector<Transition> enum_term(const TermPtr& g, EnumCtx ctx,
                                  const std::string& path) {
  switch (g->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return {};
    case Term::Kind::Action:
      return enum_action(g, ctx, path);
    case Term::Kind::Choice:
      return enum_choice(g, ctx, path);
    case Term::Kind::Par: {
      std::vector<Transition> out;
      for (const auto& t : enum_term(g->left, ctx, child(path, "L")))
        out.push_back(
            {t.label, make_par(t.successor, g->right, g->span), "par", t.path});
      for (const auto& t : enum_term(g->right, ctx, child(path, "R")))
        out.push_back(
            {t.label, make_par(g->left, t.successor, g->span), "par", t.path});
      return out;
    }
    case Term::Kind::Rec: {
      auto it = ctx.unfold_left.find(g->var);
      int left = it == ctx.unfold_left.end() ? ctx.max_unfold : it->second;
      if (left <= 0) return {};
      FreshNames names(ctx.avoid);
      TermPtr renamed = alpha_rename_bound_channels(g->body, names);
      TermPtr unfolding = substitute(renamed, g->var, g);
      ctx.avoid = names.reserved();
      ctx.unfold_left[g->var] = left - 1;
      std::vector<Transition> out;
      for (const auto& t : enum_term(unfolding, ctx, child(path, "unfold")))
        out.push_back({t.label, t.successor, "rec", t.path});
      return out;
    }
  }
  return {};
}

}  // namespace

std::vector<Transition> enabled_transitions(
    const TermPtr& g, const EnumLimits& limits,
    const std::set<std::string>& reserved) {
  EnumCtx ctx;
  ctx.max_unfold = limits.max_unfold_per_binder;
  ctx.avoid = reserved;
  collect_names(g, ctx.avoid);

  std::vector<Transition> out = enum_term(g, ctx, "");
  // [crash]: one edge per live participant, over the whole type.
  for (const auto& p : participants(g))
    out.push_back({TransitionLabel::crash_of(p), crash(g, p), "crash", ""});

  for (auto& t : out) t.successor = normalize(t.successor);
  std::stable_sort(out.begin(), out.end(),
                   [](const Transition& a, const Transition& b) {
                     auto ka = std::tuple(a.label.sort_key(),
                                          term_to_string(a.successor), a.rule,
                                          a.path);
                     auto kb = std::tuple(b.label.sort_key(),
                                          term_to_string(b.successor), b.rule,
                                          b.path);
                     return ka < kb;
                   });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Transition& a, const Transition& b) {
                          return a.label == b.label &&
                                 term_to_string(a.successor) ==
                                     term_to_string(b.successor);
                        }),
            out.end());
  // Successors that differ only in recursion-binder names still collapse.
  std::vector<Transition> deduped;
  for (auto& t : out) {
    bool dup = false;
    for (auto it = deduped.rbegin(); it != deduped.rend(); ++it) {
      if (it->label != t.label) break;  // sorted by label first
      if (structurally_equal(it->successor, t.successor)) {
        dup = true;
        break;
      }
    }
    if (!dup) deduped.push_back(std::move(t));
  }
  return deduped;
}

TermPtr apply_transition(const TermPtr& g, const TransitionLabel& label,
                         const EnumLimits& limits,
                         const std::set<std::string>& reserved) {
  std::vector<Transition> matching;
  for (const auto& t : enabled_transitions(g, limits, reserved))
    if (t.label == label) matching.push_back(t);
  if (matching.empty())
    throw NotEnabledError("label not enabled: " + label.str());
  for (size_t i = 1; i < matching.size(); ++i)
    if (!structurally_equal(matching[0].successor, matching[i].successor)) {
      std::string paths;
      for (const auto& t : matching) paths += " [" + t.path + "]";
      throw AmbiguousTransitionError("label " + label.str() +
                                     " has distinct successors at" + paths);
    }
  return matching[0].successor;
}

std::optional<TimeoutWitness> two_step_timeout_witness(
    const TermPtr& g, const EnumLimits& limits,
    const std::set<std::string>& reserved, int max_states) {
  std::vector<TermPtr> states{normalize(g)};
  std::map<std::string, size_t> seen{{term_to_string(states[0]), 0}};
  // Sized up front: expand() hands out references into trans while nested
  // expansions append to it.
  std::vector<std::vector<Transition>> trans(max_states);
  std::vector<bool> computed(max_states, false);
  states.reserve(max_states);

  auto expand = [&](size_t u) -> const std::vector<Transition>& {
    if (!computed[u]) {
      trans[u] = enabled_transitions(states[u], limits, reserved);
      computed[u] = true;
    }
    return trans[u];
  };

  auto state_id = [&](const TermPtr& t) -> std::optional<size_t> {
    std::string key = term_to_string(t);
    auto it = seen.find(key);
    if (it != seen.end()) return it->second;
    if (states.size() >= static_cast<size_t>(max_states)) return std::nullopt;
    states.push_back(t);
    seen.emplace(key, states.size() - 1);
    return states.size() - 1;
  };

  for (size_t u = 0; u < states.size(); ++u) {
    for (const auto& t : expand(u)) state_id(t.successor);
    for (const auto& f1 : expand(u)) {
      if (f1.label.kind != TransitionLabel::Kind::Fail) continue;
      auto v = state_id(f1.successor);
      if (!v) continue;
      for (const auto& f2 : expand(*v)) {
        if (f2.label.kind != TransitionLabel::Kind::Fail) continue;
        if (f2.label.channel != f1.label.channel) continue;
        if (f2.label.subject == f1.label.subject) continue;
        auto w = state_id(f2.successor);
        if (!w) continue;
        for (const auto& b : expand(*w)) {
          if (b.label.kind != TransitionLabel::Kind::Comm) continue;
          bool enabled_between = false;
          for (const auto& t : expand(*v))
            if (t.label == b.label) enabled_between = true;
          if (!enabled_between) return TimeoutWitness{f1, f2, b};
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace mpst
