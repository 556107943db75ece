#include "mpst/kernel.hpp"

#include <map>

namespace mpst {

TermPtr normalize(const TermPtr& g) {
  switch (g->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return g;
    case Term::Kind::Rec: {
      TermPtr body = normalize(g->body);
      if (body == g->body) return g;
      return make_rec(g->var, body, g->span);
    }
    case Term::Kind::Choice: {
      std::vector<TermPtr> alts;
      alts.reserve(g->alts.size());
      for (const auto& a : g->alts) alts.push_back(normalize(a));
      return make_choice(std::move(alts), g->span);
    }
    case Term::Kind::Action: {
      std::vector<Branch> branches;
      branches.reserve(g->branches.size());
      for (const auto& b : g->branches)
        branches.push_back({b.msg, normalize(b.cont)});
      return make_action(g->sender, g->receiver, g->channel,
                         std::move(branches), g->span);
    }
    case Term::Kind::Par: {
      TermPtr left = normalize(g->left);
      TermPtr right = normalize(g->right);
      if (left->kind == Term::Kind::End) return right;
      if (right->kind == Term::Kind::End) return left;
      if (term_to_string(right) < term_to_string(left)) std::swap(left, right);
      return make_par(left, right, g->span);
    }
  }
  return g;
}

namespace {

// Structural comparison modulo rec-binder names: binders are paired up and
// bound variables compared through the pairing.
bool eq_mod_rec(const TermPtr& a, const TermPtr& b,
                std::map<std::string, std::string>& a2b,
                std::map<std::string, std::string>& b2a) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::End:
      return true;
    case Term::Kind::Var: {
      auto it = a2b.find(a->var);
      if (it != a2b.end()) return it->second == b->var;
      // Free variables must match literally, and b's name must be free too.
      return !b2a.count(b->var) && a->var == b->var;
    }
    case Term::Kind::Rec: {
      auto olda = a2b.find(a->var) == a2b.end()
                      ? std::pair<bool, std::string>{false, ""}
                      : std::pair<bool, std::string>{true, a2b[a->var]};
      auto oldb = b2a.find(b->var) == b2a.end()
                      ? std::pair<bool, std::string>{false, ""}
                      : std::pair<bool, std::string>{true, b2a[b->var]};
      a2b[a->var] = b->var;
      b2a[b->var] = a->var;
      bool ok = eq_mod_rec(a->body, b->body, a2b, b2a);
      if (olda.first) a2b[a->var] = olda.second; else a2b.erase(a->var);
      if (oldb.first) b2a[b->var] = oldb.second; else b2a.erase(b->var);
      return ok;
    }
    case Term::Kind::Par:
      return eq_mod_rec(a->left, b->left, a2b, b2a) &&
             eq_mod_rec(a->right, b->right, a2b, b2a);
    case Term::Kind::Choice: {
      if (a->alts.size() != b->alts.size()) return false;
      for (size_t i = 0; i < a->alts.size(); ++i)
        if (!eq_mod_rec(a->alts[i], b->alts[i], a2b, b2a)) return false;
      return true;
    }
    case Term::Kind::Action: {
      if (a->sender != b->sender || a->receiver != b->receiver ||
          a->channel != b->channel || a->branches.size() != b->branches.size())
        return false;
      for (size_t i = 0; i < a->branches.size(); ++i) {
        if (a->branches[i].msg != b->branches[i].msg) return false;
        if (!eq_mod_rec(a->branches[i].cont, b->branches[i].cont, a2b, b2a))
          return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

bool structurally_equal(const TermPtr& g1, const TermPtr& g2) {
  std::map<std::string, std::string> a2b, b2a;
  return eq_mod_rec(normalize(g1), normalize(g2), a2b, b2a);
}

TermPtr substitute(const TermPtr& g, const std::string& var,
                   const TermPtr& replacement) {
  switch (g->kind) {
    case Term::Kind::End:
      return g;
    case Term::Kind::Var:
      return g->var == var ? replacement : g;
    case Term::Kind::Rec:
      if (g->var == var) return g;  // shadowed
      return make_rec(g->var, substitute(g->body, var, replacement), g->span);
    case Term::Kind::Par:
      return make_par(substitute(g->left, var, replacement),
                      substitute(g->right, var, replacement), g->span);
    case Term::Kind::Choice: {
      std::vector<TermPtr> alts;
      alts.reserve(g->alts.size());
      for (const auto& a : g->alts)
        alts.push_back(substitute(a, var, replacement));
      return make_choice(std::move(alts), g->span);
    }
    case Term::Kind::Action: {
      std::vector<Branch> branches;
      branches.reserve(g->branches.size());
      for (const auto& b : g->branches)
        branches.push_back({b.msg, substitute(b.cont, var, replacement)});
      return make_action(g->sender, g->receiver, g->channel,
                         std::move(branches), g->span);
    }
  }
  return g;
}

std::string FreshNames::fresh(const std::string& base) {
  for (int k = 1;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (avoid_.insert(candidate).second) return candidate;
  }
}

namespace {

using Renaming = std::map<std::string, std::string>;

Endpoint rename_endpoint(const Endpoint& e, const Renaming& sub) {
  auto it = sub.find(e.id.index);
  if (it == sub.end()) return e;
  Endpoint r = e;
  r.id.index = it->second;
  return r;
}

TermPtr rename(const TermPtr& g, Renaming sub, FreshNames& names) {
  switch (g->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return g;
    case Term::Kind::Rec:
      return make_rec(g->var, rename(g->body, sub, names), g->span);
    case Term::Kind::Par:
      return make_par(rename(g->left, sub, names),
                      rename(g->right, sub, names), g->span);
    case Term::Kind::Choice: {
      std::vector<TermPtr> alts;
      for (const auto& a : g->alts) alts.push_back(rename(a, sub, names));
      return make_choice(std::move(alts), g->span);
    }
    case Term::Kind::Action: {
      ChannelName chan = g->channel;
      if (auto it = sub.find(chan.name); it != sub.end() && !chan.is_tau())
        chan.name = it->second;
      std::vector<Branch> branches;
      for (const auto& b : g->branches) {
        if (b.msg.kind == Message::Kind::New) {
          Renaming inner = sub;
          inner[b.msg.channel] = names.fresh(b.msg.channel);
          Message msg = Message::make_new(inner[b.msg.channel]);
          branches.push_back({msg, rename(b.cont, inner, names)});
        } else {
          branches.push_back({b.msg, rename(b.cont, sub, names)});
        }
      }
      return make_action(rename_endpoint(g->sender, sub),
                         rename_endpoint(g->receiver, sub), chan,
                         std::move(branches), g->span);
    }
  }
  return g;
}

}  // namespace

TermPtr alpha_rename_bound_channels(const TermPtr& g, FreshNames& names) {
  return rename(g, {}, names);
}

}  // namespace mpst
