#include "mpst/coherence.hpp"

#include <algorithm>
#include <sstream>

#include "mpst/analysis.hpp"

namespace mpst {

ChannelBinding ChannelBinding::public_server(Identity server) {
  ChannelBinding b;
  b.kind = Kind::PublicServer;
  b.a = Endpoint{std::move(server), false};
  return b;
}

ChannelBinding ChannelBinding::session(Endpoint x, Endpoint y) {
  ChannelBinding b;
  b.kind = Kind::Session;
  if (y < x) std::swap(x, y);
  b.a = std::move(x);
  b.b = std::move(y);
  return b;
}

std::set<Identity> ChannelBinding::identities() const {
  if (kind == Kind::PublicServer) return {a.id};
  return {a.id, b.id};
}

std::string ChannelBinding::str() const {
  if (kind == Kind::PublicServer) return "pub " + a.str();
  return "{" + a.str() + ", " + b.str() + "}";
}

std::string mode_name(CoherenceMode mode) {
  return mode == CoherenceMode::Strict ? "strict-end" : "relaxed-end";
}

Delta weaken_delta(const Delta& delta, const std::string& var,
                   const Gamma& snapshot) {
  if (delta.count(var))
    throw DuplicateVariableError("recursion variable " + var +
                                 " already bound in delta");
  Delta out = delta;
  out.emplace(var, snapshot);
  return out;
}

Gamma gamma_from_decls(const std::vector<PublicDecl>& publics,
                       const std::vector<PrivateDecl>& privates) {
  Gamma g;
  for (const auto& d : publics)
    g.emplace(d.channel.name, ChannelBinding::public_server(d.server.id));
  for (const auto& d : privates)
    g.emplace(d.channel.name, ChannelBinding::session(d.a, d.b));
  return g;
}

namespace {

// First action on a free occurrence of `chan`, preorder.
bool first_action_on(const TermPtr& g, const std::string& chan,
                     std::set<std::string>& bound, const Term** out) {
  switch (g->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return false;
    case Term::Kind::Rec:
      return first_action_on(g->body, chan, bound, out);
    case Term::Kind::Par:
      return first_action_on(g->left, chan, bound, out) ||
             first_action_on(g->right, chan, bound, out);
    case Term::Kind::Choice:
      for (const auto& a : g->alts)
        if (first_action_on(a, chan, bound, out)) return true;
      return false;
    case Term::Kind::Action: {
      if (g->channel.name == chan && !bound.count(chan)) {
        *out = g.get();
        return true;
      }
      for (const auto& b : g->branches) {
        if (b.msg.kind == Message::Kind::New && b.msg.channel == chan) {
          bound.insert(chan);
          bool found = first_action_on(b.cont, chan, bound, out);
          bound.erase(chan);
          if (found) return true;
        } else if (first_action_on(b.cont, chan, bound, out)) {
          return true;
        }
      }
      return false;
    }
  }
  return false;
}

}  // namespace

Gamma runtime_gamma(const TermPtr& g, const std::vector<PublicDecl>& publics,
                    const std::vector<PrivateDecl>& privates) {
  Gamma declared = gamma_from_decls(publics, privates);
  Gamma out;
  for (const auto& d : publics)
    out.emplace(d.channel.name, ChannelBinding::public_server(d.server.id));
  for (const auto& chan : free_channels(g)) {
    auto it = declared.find(chan);
    if (it != declared.end()) {
      out.insert(*it);
      continue;
    }
    const Term* action = nullptr;
    std::set<std::string> bound;
    if (first_action_on(g, chan, bound, &action)) {
      Endpoint x{action->sender.id, false};
      Endpoint y{action->receiver.id, false};
      out.emplace(chan, ChannelBinding::session(x, y));
    }
  }
  return out;
}

namespace {

struct Checker {
  CoherenceMode mode;
  std::vector<CoherenceFailure> failures;

  void fail(const std::string& rule, const std::string& path,
            const std::string& message, SourceSpan span) {
    failures.push_back({rule, path, message, span});
  }

  static std::string child(const std::string& path, const std::string& seg) {
    return path.empty() ? seg : path + "/" + seg;
  }

  // Splits gamma for [par]: publics go to both sides, each session binding
  // to the side where its channel occurs free. A private channel free on
  // both sides makes the split impossible.
  bool split_par(const Gamma& gamma, const TermPtr& g,
                 const std::string& path, Gamma& g1, Gamma& g2) {
    std::set<std::string> fl = free_channels(g->left);
    std::set<std::string> fr = free_channels(g->right);
    for (const auto& [chan, binding] : gamma) {
      if (binding.kind == ChannelBinding::Kind::PublicServer) {
        g1.emplace(chan, binding);
        g2.emplace(chan, binding);
        continue;
      }
      bool in_left = fl.count(chan) > 0;
      bool in_right = fr.count(chan) > 0;
      if (in_left && in_right) {
        fail("par", path,
             "private channel " + chan + " occurs free on both sides",
             g->span);
        return false;
      }
      if (in_right)
        g2.emplace(chan, binding);
      else
        g1.emplace(chan, binding);  // left side also keeps unused leftovers
    }
    return true;
  }

  bool split_delta(const Delta& delta, const TermPtr& g,
                   const std::string& path, Delta& d1, Delta& d2) {
    std::set<std::string> vl = free_rec_vars(g->left);
    std::set<std::string> vr = free_rec_vars(g->right);
    for (const auto& [var, snapshot] : delta) {
      bool in_left = vl.count(var) > 0;
      bool in_right = vr.count(var) > 0;
      if (in_left && in_right) {
        fail("par", path,
             "recursion variable " + var + " occurs free on both sides",
             g->span);
        return false;
      }
      if (in_right)
        d2.emplace(var, snapshot);
      else
        d1.emplace(var, snapshot);
    }
    return true;
  }

  void check(const TermPtr& g, const Delta& delta, const Gamma& gamma,
             const std::string& path) {
    switch (g->kind) {
      case Term::Kind::End:
        if (mode == CoherenceMode::Strict && !gamma.empty()) {
          std::string open;
          for (const auto& [chan, _] : gamma)
            open += (open.empty() ? "" : ", ") + chan;
          fail("end", path, "end with open channels: " + open, g->span);
        }
        return;
      case Term::Kind::Var: {
        auto it = delta.find(g->var);
        if (it == delta.end()) {
          fail("var-rec", path, "unbound recursion variable " + g->var,
               g->span);
          return;
        }
        if (it->second != gamma) {
          fail("var-rec", path,
               "channel environment at " + g->var +
                   " differs from its rec snapshot",
               g->span);
        }
        return;
      }
      case Term::Kind::Rec: {
        // Rebinding shadows: unfoldings copy a rec term inside its own
        // binder's scope, so the inner snapshot must win.
        Delta inner = delta;
        inner[g->var] = gamma;
        check(g->body, inner, gamma, child(path, "rec " + g->var));
        return;
      }
      case Term::Kind::Par: {
        Gamma g1, g2;
        Delta d1, d2;
        if (!split_par(gamma, g, path, g1, g2)) return;
        if (!split_delta(delta, g, path, d1, d2)) return;
        check(g->left, d1, g1, child(path, "par-left"));
        check(g->right, d2, g2, child(path, "par-right"));
        return;
      }
      case Term::Kind::Choice: {
        if (!initiator(g))
          fail("sum", path, "choice has no common initiator", g->span);
        for (size_t i = 0; i < g->alts.size(); ++i)
          check(g->alts[i], delta, gamma,
                child(path, "alt" + std::to_string(i)));
        return;
      }
      case Term::Kind::Action:
        check_action(g, delta, gamma, path);
        return;
    }
  }

  void check_action(const TermPtr& g, const Delta& delta, const Gamma& gamma,
                    const std::string& path0) {
    std::string path = child(path0, g->sender.id.str() + "->" +
                                        g->receiver.id.str() + ":" +
                                        g->channel.name);
    size_t labels = 0, news = 0, errs = 0;
    const Branch* new_branch = nullptr;
    const Branch* err_branch = nullptr;
    for (const auto& b : g->branches) {
      switch (b.msg.kind) {
        case Message::Kind::Label:
          ++labels;
          break;
        case Message::Kind::New:
          ++news;
          new_branch = &b;
          break;
        case Message::Kind::Err:
          ++errs;
          err_branch = &b;
          break;
      }
    }
    if (g->branches.empty()) {
      fail("malformed", path, "action with no branches", g->span);
      return;
    }
    if (errs > 1) {
      fail("malformed", path, "action with more than one ERR branch",
           g->span);
      return;
    }
    if (news > 0 && labels > 0) {
      fail("malformed", path, "action mixes labelled and new branches",
           g->span);
      return;
    }
    if (news > 1) {
      fail("malformed", path, "action with more than one new branch",
           g->span);
      return;
    }

    if (labels > 0) {
      // [send]
      if (!err_branch) {
        fail("malformed", path, "labelled action without an ERR branch",
             g->span);
        return;
      }
      if (g->sender.crashed || g->receiver.crashed) {
        fail("malformed", path,
             "crashed endpoint on an action with labelled branches", g->span);
        return;
      }
      if (g->channel.is_tau()) {
        fail("malformed", path, "labelled communication on tau", g->span);
        return;
      }
      std::set<std::string> seen;
      for (const auto& b : g->branches)
        if (b.msg.kind == Message::Kind::Label && !seen.insert(b.msg.label).second)
          fail("send", path, "duplicate label " + b.msg.label, g->span);
      auto it = gamma.find(g->channel.name);
      if (it == gamma.end()) {
        fail("send", path,
             "channel " + g->channel.name + " is not open here", g->span);
        return;
      }
      if (it->second.kind != ChannelBinding::Kind::Session ||
          it->second.identities() !=
              std::set<Identity>{g->sender.id, g->receiver.id}) {
        fail("send", path,
             "channel " + g->channel.name + " is bound to " +
                 it->second.str() + ", not to these endpoints",
             g->span);
        return;
      }
      for (const auto& b : g->branches) {
        if (b.msg.is_err()) continue;
        check(b.cont, delta, gamma, child(path, "branch " + b.msg.label));
      }
      Gamma closed = gamma;
      closed.erase(g->channel.name);
      check(err_branch->cont, delta, closed, child(path, "branch ERR"));
      return;
    }

    if (news == 1) {
      // [req] or [spawn]
      if (!err_branch) {
        fail("malformed", path, "request/spawn without an ERR branch",
             g->span);
        return;
      }
      if (g->sender.crashed || g->receiver.crashed) {
        fail("malformed", path,
             "crashed endpoint on a request/spawn action", g->span);
        return;
      }
      const std::string& bound = new_branch->msg.channel;
      if (g->channel.is_tau()) {
        // [spawn]
        if (g->sender.id != g->receiver.id) {
          fail("malformed", path, "tau action with distinct endpoints",
               g->span);
          return;
        }
        if (gamma.count(bound)) {
          fail("spawn", path,
               "spawned channel " + bound + " is already in the environment",
               g->span);
          return;
        }
        Gamma inner = gamma;
        inner.emplace(bound, ChannelBinding::session(
                                 Endpoint{g->sender.id, false},
                                 Endpoint{Identity{g->sender.id.role, bound},
                                          false}));
        check(new_branch->cont, delta, inner, child(path, "branch new"));
        check(err_branch->cont, delta, gamma, child(path, "branch ERR"));
        return;
      }
      // [req]
      if (g->sender.id == g->receiver.id) {
        fail("req", path, "request with sender equal to receiver", g->span);
        return;
      }
      auto it = gamma.find(g->channel.name);
      if (it == gamma.end() ||
          it->second.kind != ChannelBinding::Kind::PublicServer ||
          it->second.a.id != g->receiver.id) {
        fail("req", path,
             "channel " + g->channel.name +
                 " is not a public channel of " + g->receiver.id.str(),
             g->span);
        return;
      }
      if (gamma.count(bound)) {
        fail("req", path,
             "requested channel " + bound + " is already in the environment",
             g->span);
        return;
      }
      Gamma inner = gamma;
      inner.emplace(bound, ChannelBinding::session(
                               Endpoint{g->sender.id, false},
                               Endpoint{Identity{g->receiver.id.role, bound},
                                        false}));
      check(new_branch->cont, delta, inner, child(path, "branch new"));
      check(err_branch->cont, delta, gamma, child(path, "branch ERR"));
      return;
    }

    // Sole ERR branch: [fail]
    auto it = gamma.find(g->channel.name);
    bool first_case =
        g->sender.id == g->receiver.id ||
        (it != gamma.end() && it->second.identities().count(g->receiver.id));
    if (first_case) {
      check(err_branch->cont, delta, gamma, child(path, "branch ERR"));
      return;
    }
    ChannelBinding expected = ChannelBinding::session(g->sender, g->receiver);
    if (it == gamma.end() || it->second != expected) {
      fail("fail", path,
           "channel " + g->channel.name + " is " +
               (it == gamma.end() ? std::string("absent")
                                  : "bound to " + it->second.str()) +
               "; expected " + expected.str(),
           g->span);
      return;
    }
    Gamma closed = gamma;
    closed.erase(g->channel.name);
    check(err_branch->cont, delta, closed, child(path, "branch ERR"));
  }
};

}  // namespace

CoherenceReport check_coherence(const TermPtr& g, const Delta& delta,
                                const Gamma& gamma, CoherenceMode mode) {
  Checker checker{mode, {}};
  checker.check(g, delta, gamma, "");
  CoherenceReport report;
  report.mode = mode;
  report.failures = std::move(checker.failures);
  report.coherent = report.failures.empty();
  return report;
}

}  // namespace mpst
