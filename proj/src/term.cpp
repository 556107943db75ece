#include "mpst/term.hpp"

#include <algorithm>
#include <sstream>

namespace mpst {

std::string Identity::str() const {
  if (index == "0") return role;
  return role + "." + index;
}

std::string Endpoint::str() const {
  std::string s = id.str();
  if (crashed) s += "~";
  return s;
}

Message Message::make_label(std::string l, std::string payload) {
  Message m;
  m.kind = Kind::Label;
  m.label = std::move(l);
  m.payload = std::move(payload);
  return m;
}

Message Message::make_new(std::string channel) {
  Message m;
  m.kind = Kind::New;
  m.channel = std::move(channel);
  return m;
}

Message Message::make_err() { return Message{}; }

std::string Message::str() const {
  switch (kind) {
    case Kind::Label:
      return label + "(" + payload + ")";
    case Kind::New:
      return "new " + channel;
    case Kind::Err:
      return "ERR";
  }
  return "?";
}

TermPtr make_end(SourceSpan span) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::End;
  t->span = span;
  return t;
}

TermPtr make_var(std::string var, SourceSpan span) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->var = std::move(var);
  t->span = span;
  return t;
}

TermPtr make_rec(std::string var, TermPtr body, SourceSpan span) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Rec;
  t->var = std::move(var);
  t->body = std::move(body);
  t->span = span;
  return t;
}

TermPtr make_par(TermPtr left, TermPtr right, SourceSpan span) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Par;
  t->left = std::move(left);
  t->right = std::move(right);
  t->span = span;
  return t;
}

TermPtr make_choice(std::vector<TermPtr> alts, SourceSpan span) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Choice;
  t->alts = std::move(alts);
  t->span = span;
  return t;
}

TermPtr make_action(Endpoint sender, Endpoint receiver, ChannelName channel,
                    std::vector<Branch> branches, SourceSpan span) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Action;
  t->sender = std::move(sender);
  t->receiver = std::move(receiver);
  t->channel = std::move(channel);
  // Keep written order among non-ERR branches, ERR last.
  std::stable_partition(branches.begin(), branches.end(),
                        [](const Branch& b) { return !b.msg.is_err(); });
  t->branches = std::move(branches);
  t->span = span;
  return t;
}

namespace {

// Parenthesize the left operand of "||" when it would swallow the operator
// ("rec X . A || B" reparses as rec over the whole par).
bool needs_parens_as_par_left(const TermPtr& t) {
  return t->kind == Term::Kind::Par || t->kind == Term::Kind::Rec;
}

void print_term(const TermPtr& t, std::ostringstream& os) {
  switch (t->kind) {
    case Term::Kind::End:
      os << "end";
      return;
    case Term::Kind::Var:
      os << t->var;
      return;
    case Term::Kind::Rec:
      os << "rec " << t->var << " . ";
      print_term(t->body, os);
      return;
    case Term::Kind::Par:
      if (needs_parens_as_par_left(t->left)) {
        os << "(";
        print_term(t->left, os);
        os << ")";
      } else {
        print_term(t->left, os);
      }
      os << " || ";
      print_term(t->right, os);
      return;
    case Term::Kind::Choice: {
      os << "choice { ";
      bool first = true;
      for (const auto& a : t->alts) {
        if (!first) os << " | ";
        first = false;
        print_term(a, os);
      }
      os << " }";
      return;
    }
    case Term::Kind::Action: {
      os << t->sender.str() << " -> " << t->receiver.str() << " : "
         << t->channel.name << " { ";
      bool first = true;
      for (const auto& b : t->branches) {
        if (!first) os << ", ";
        first = false;
        os << b.msg.str() << " . ";
        print_term(b.cont, os);
      }
      os << " }";
      return;
    }
  }
}

}  // namespace

std::string term_to_string(const TermPtr& t) {
  std::ostringstream os;
  print_term(t, os);
  return os.str();
}

void collect_names(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return;
    case Term::Kind::Rec:
      collect_names(t->body, out);
      return;
    case Term::Kind::Par:
      collect_names(t->left, out);
      collect_names(t->right, out);
      return;
    case Term::Kind::Choice:
      for (const auto& a : t->alts) collect_names(a, out);
      return;
    case Term::Kind::Action:
      out.insert(t->channel.name);
      out.insert(t->sender.id.index);
      out.insert(t->receiver.id.index);
      for (const auto& b : t->branches) {
        if (b.msg.kind == Message::Kind::New) out.insert(b.msg.channel);
        collect_names(b.cont, out);
      }
      return;
  }
}

namespace {

void free_channels_rec(const TermPtr& t, std::set<std::string>& bound,
                       std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return;
    case Term::Kind::Rec:
      free_channels_rec(t->body, bound, out);
      return;
    case Term::Kind::Par:
      free_channels_rec(t->left, bound, out);
      free_channels_rec(t->right, bound, out);
      return;
    case Term::Kind::Choice:
      for (const auto& a : t->alts) free_channels_rec(a, bound, out);
      return;
    case Term::Kind::Action:
      if (!t->channel.is_tau() && !bound.count(t->channel.name))
        out.insert(t->channel.name);
      for (const auto& b : t->branches) {
        if (b.msg.kind == Message::Kind::New && !bound.count(b.msg.channel)) {
          bound.insert(b.msg.channel);
          free_channels_rec(b.cont, bound, out);
          bound.erase(b.msg.channel);
        } else {
          free_channels_rec(b.cont, bound, out);
        }
      }
      return;
  }
}

void free_rec_vars_rec(const TermPtr& t, std::set<std::string>& bound,
                       std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::End:
      return;
    case Term::Kind::Var:
      if (!bound.count(t->var)) out.insert(t->var);
      return;
    case Term::Kind::Rec: {
      bool fresh = bound.insert(t->var).second;
      free_rec_vars_rec(t->body, bound, out);
      if (fresh) bound.erase(t->var);
      return;
    }
    case Term::Kind::Par:
      free_rec_vars_rec(t->left, bound, out);
      free_rec_vars_rec(t->right, bound, out);
      return;
    case Term::Kind::Choice:
      for (const auto& a : t->alts) free_rec_vars_rec(a, bound, out);
      return;
    case Term::Kind::Action:
      for (const auto& b : t->branches) free_rec_vars_rec(b.cont, bound, out);
      return;
  }
}

}  // namespace

std::set<std::string> free_channels(const TermPtr& t) {
  std::set<std::string> bound, out;
  free_channels_rec(t, bound, out);
  return out;
}

std::set<std::string> free_rec_vars(const TermPtr& t) {
  std::set<std::string> bound, out;
  free_rec_vars_rec(t, bound, out);
  return out;
}

const Branch* find_err_branch(const TermPtr& action) {
  for (const auto& b : action->branches)
    if (b.msg.is_err()) return &b;
  return nullptr;
}

}  // namespace mpst
