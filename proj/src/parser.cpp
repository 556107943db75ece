#include "mpst/parser.hpp"

#include <cctype>
#include <map>
#include <set>

namespace mpst {

namespace {

enum class Tok {
  Ident,
  KwProtocol,
  KwPublic,
  KwPrivate,
  KwEnd,
  KwRec,
  KwChoice,
  KwNew,
  KwErr,
  KwTau,
  Arrow,   // ->
  Colon,
  LBrace,
  RBrace,
  LParen,
  RParen,
  Dot,
  Comma,
  Pipe,    // |
  ParPar,  // ||
  Tilde,
  Eof,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

const std::map<std::string, Tok> kKeywords = {
    {"protocol", Tok::KwProtocol}, {"public", Tok::KwPublic},
    {"private", Tok::KwPrivate},   {"end", Tok::KwEnd},
    {"rec", Tok::KwRec},           {"choice", Tok::KwChoice},
    {"new", Tok::KwNew},           {"ERR", Tok::KwErr},
    {"tau", Tok::KwTau},
};

std::string tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::KwProtocol: return "'protocol'";
    case Tok::KwPublic: return "'public'";
    case Tok::KwPrivate: return "'private'";
    case Tok::KwEnd: return "'end'";
    case Tok::KwRec: return "'rec'";
    case Tok::KwChoice: return "'choice'";
    case Tok::KwNew: return "'new'";
    case Tok::KwErr: return "'ERR'";
    case Tok::KwTau: return "'tau'";
    case Tok::Arrow: return "'->'";
    case Tok::Colon: return "':'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Dot: return "'.'";
    case Tok::Comma: return "','";
    case Tok::Pipe: return "'|'";
    case Tok::ParPar: return "'||'";
    case Tok::Tilde: return "'~'";
    case Tok::Eof: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    int l = line, cstart = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[j])) ||
              text[j] == '_'))
        ++j;
      std::string word = text.substr(i, j - i);
      auto kw = kKeywords.find(word);
      Tok kind = kw == kKeywords.end() ? Tok::Ident : kw->second;
      out.push_back({kind, word, {l, cstart, (int)word.size()}});
      col += (int)(j - i);
      i = j;
      continue;
    }
    auto two = i + 1 < text.size() ? text.substr(i, 2) : std::string();
    if (two == "->") {
      out.push_back({Tok::Arrow, "->", {l, cstart, 2}});
      i += 2;
      col += 2;
      continue;
    }
    if (two == "||") {
      out.push_back({Tok::ParPar, "||", {l, cstart, 2}});
      i += 2;
      col += 2;
      continue;
    }
    Tok kind;
    switch (c) {
      case ':': kind = Tok::Colon; break;
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '.': kind = Tok::Dot; break;
      case ',': kind = Tok::Comma; break;
      case '|': kind = Tok::Pipe; break;
      case '~': kind = Tok::Tilde; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         {l, cstart, 1});
    }
    out.push_back({kind, std::string(1, c), {l, cstart, 1}});
    ++i;
    ++col;
  }
  out.push_back({Tok::Eof, "", {line, col, 1}});
  return out;
}

struct Parser {
  std::vector<Token> toks;
  size_t pos = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t k = pos + ahead;
    return k < toks.size() ? toks[k] : toks.back();
  }

  const Token& advance() { return toks[pos < toks.size() - 1 ? pos++ : pos]; }

  bool match(Tok kind) {
    if (peek().kind != kind) return false;
    advance();
    return true;
  }

  Token expect(Tok kind) {
    if (peek().kind != kind)
      throw ParseError("expected " + tok_name(kind) + ", found " +
                           tok_name(peek().kind) +
                           (peek().text.empty() ? "" : " '" + peek().text + "'"),
                       peek().span);
    return toks[pos++];
  }

  static bool is_upident(const std::string& s) {
    return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
  }

  Endpoint parse_endpoint() {
    Token role = expect(Tok::Ident);
    Endpoint e;
    e.id.role = role.text;
    if (peek().kind == Tok::Dot && peek(1).kind == Tok::Ident) {
      advance();
      e.id.index = expect(Tok::Ident).text;
    }
    if (match(Tok::Tilde)) e.crashed = true;
    return e;
  }

  ChannelName parse_channel() {
    if (match(Tok::KwTau)) return ChannelName{kTauName};
    Token t = expect(Tok::Ident);
    return ChannelName{t.text};
  }

  // gtype := seq of '||'-separated prefix terms, right-associative.
  TermPtr parse_gtype() {
    TermPtr left = parse_prefix();
    if (match(Tok::ParPar)) {
      TermPtr right = parse_gtype();
      return make_par(left, right, left->span);
    }
    return left;
  }

  TermPtr parse_prefix() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::KwEnd:
        advance();
        return make_end(t.span);
      case Tok::LParen: {
        advance();
        TermPtr inner = parse_gtype();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::KwRec: {
        advance();
        Token var = expect(Tok::Ident);
        expect(Tok::Dot);
        TermPtr body = parse_gtype();
        return make_rec(var.text, body, t.span);
      }
      case Tok::KwChoice: {
        advance();
        expect(Tok::LBrace);
        std::vector<TermPtr> parsed;
        parsed.push_back(parse_gtype());
        expect(Tok::Pipe);
        parsed.push_back(parse_gtype());
        while (match(Tok::Pipe)) parsed.push_back(parse_gtype());
        expect(Tok::RBrace);
        // Nested sums flatten: inner parses are already flat, so splicing
        // direct children is enough.
        std::vector<TermPtr> alts;
        for (auto& a : parsed) {
          if (a->kind == Term::Kind::Choice)
            alts.insert(alts.end(), a->alts.begin(), a->alts.end());
          else
            alts.push_back(std::move(a));
        }
        return make_choice(std::move(alts), t.span);
      }
      case Tok::Ident: {
        // Either a recursion variable or the sender of an action.
        bool looks_like_endpoint = peek(1).kind == Tok::Arrow ||
                                   peek(1).kind == Tok::Tilde ||
                                   (peek(1).kind == Tok::Dot &&
                                    peek(2).kind == Tok::Ident);
        if (!looks_like_endpoint) {
          if (is_upident(t.text)) {
            advance();
            return make_var(t.text, t.span);
          }
          throw ParseError(
              "expected a global type; a recursion variable must start "
              "with an uppercase letter",
              t.span);
        }
        return parse_action();
      }
      default:
        throw ParseError("expected a global type, found " +
                             tok_name(t.kind),
                         t.span);
    }
  }

  TermPtr parse_action() {
    Token start = peek();
    Endpoint sender = parse_endpoint();
    expect(Tok::Arrow);
    Endpoint receiver = parse_endpoint();
    expect(Tok::Colon);
    ChannelName channel = parse_channel();
    expect(Tok::LBrace);
    std::vector<Branch> branches;
    branches.push_back(parse_branch());
    while (match(Tok::Comma)) branches.push_back(parse_branch());
    expect(Tok::RBrace);
    return make_action(sender, receiver, channel, std::move(branches),
                       start.span);
  }

  Branch parse_branch() {
    const Token& t = peek();
    if (match(Tok::KwErr)) {
      expect(Tok::Dot);
      return {Message::make_err(), parse_gtype()};
    }
    if (match(Tok::KwNew)) {
      Token chan = expect(Tok::Ident);
      expect(Tok::Dot);
      return {Message::make_new(chan.text), parse_gtype()};
    }
    if (t.kind == Tok::Ident) {
      Token label = expect(Tok::Ident);
      expect(Tok::LParen);
      Token payload = expect(Tok::Ident);
      expect(Tok::RParen);
      expect(Tok::Dot);
      return {Message::make_label(label.text, payload.text), parse_gtype()};
    }
    throw ParseError("expected a branch (label, 'new', or 'ERR'), found " +
                         tok_name(t.kind),
                     t.span);
  }

  ProtocolSpec parse_spec() {
    ProtocolSpec spec;
    expect(Tok::KwProtocol);
    spec.name = expect(Tok::Ident).text;
    while (true) {
      if (match(Tok::KwPublic)) {
        PublicDecl d;
        d.channel = ChannelName{expect(Tok::Ident).text};
        expect(Tok::Colon);
        d.server = parse_endpoint();
        spec.public_decls.push_back(d);
      } else if (match(Tok::KwPrivate)) {
        PrivateDecl d;
        d.channel = ChannelName{expect(Tok::Ident).text};
        expect(Tok::Colon);
        d.a = parse_endpoint();
        expect(Tok::Comma);
        d.b = parse_endpoint();
        spec.private_decls.push_back(d);
      } else {
        break;
      }
    }
    spec.body = parse_gtype();
    expect(Tok::Eof);
    return spec;
  }
};

// ---- well-formedness ----

struct WfChecker {
  const ProtocolSpec& spec;
  std::set<std::string> declared;
  std::map<std::string, Identity> public_servers;  // channel -> server

  explicit WfChecker(const ProtocolSpec& s) : spec(s) {}

  [[noreturn]] static void fail(const std::string& msg, SourceSpan span) {
    throw WellFormednessError(msg, span);
  }

  void run() {
    for (const auto& d : spec.public_decls) {
      if (d.channel.is_tau()) fail("channel 'tau' cannot be declared", {});
      if (!declared.insert(d.channel.name).second)
        fail("duplicate channel declaration " + d.channel.name, {});
      public_servers.emplace(d.channel.name, d.server.id);
    }
    for (const auto& d : spec.private_decls) {
      if (d.channel.is_tau()) fail("channel 'tau' cannot be declared", {});
      if (!declared.insert(d.channel.name).second)
        fail("duplicate channel declaration " + d.channel.name, {});
      if (d.a.id == d.b.id)
        fail("private channel " + d.channel.name +
                 " must connect two distinct participants",
             {});
    }
    std::set<std::string> bound_chans, rec_vars, unguarded;
    walk(spec.body, bound_chans, rec_vars, unguarded);
  }

  void check_endpoint_position(const TermPtr& action, const Endpoint& e,
                               bool is_receiver) {
    for (const auto& [chan, server] : public_servers) {
      if (e.id != server) continue;
      if (is_receiver && action->channel.name == chan) continue;
      fail("public server " + server.str() +
               " may only appear as the receiver of an action on its "
               "public channel " +
               chan,
           action->span);
    }
  }

  void walk(const TermPtr& g, std::set<std::string>& bound_chans,
            std::set<std::string>& rec_vars, std::set<std::string>& unguarded) {
    switch (g->kind) {
      case Term::Kind::End:
        return;
      case Term::Kind::Var:
        if (!rec_vars.count(g->var))
          fail("unbound recursion variable " + g->var, g->span);
        if (unguarded.count(g->var))
          fail("unguarded recursion variable " + g->var, g->span);
        return;
      case Term::Kind::Rec: {
        if (rec_vars.count(g->var))
          fail("recursion variable " + g->var + " shadows an outer binder",
               g->span);
        rec_vars.insert(g->var);
        unguarded.insert(g->var);
        walk(g->body, bound_chans, rec_vars, unguarded);
        rec_vars.erase(g->var);
        unguarded.erase(g->var);
        return;
      }
      case Term::Kind::Par:
        walk(g->left, bound_chans, rec_vars, unguarded);
        walk(g->right, bound_chans, rec_vars, unguarded);
        return;
      case Term::Kind::Choice: {
        if (g->alts.size() < 2)
          fail("choice needs at least two branches", g->span);
        for (const auto& a : g->alts)
          walk(a, bound_chans, rec_vars, unguarded);
        return;
      }
      case Term::Kind::Action: {
        check_endpoint_position(g, g->sender, false);
        check_endpoint_position(g, g->receiver, true);
        if (!g->channel.is_tau() && !bound_chans.count(g->channel.name) &&
            !declared.count(g->channel.name))
          fail("undeclared channel " + g->channel.name, g->span);

        size_t errs = 0, news = 0, labels = 0;
        std::set<std::string> seen_labels;
        for (const auto& b : g->branches) {
          switch (b.msg.kind) {
            case Message::Kind::Err:
              ++errs;
              break;
            case Message::Kind::New:
              ++news;
              if (b.msg.channel == kTauName)
                fail("'new tau' is forbidden", g->span);
              if (declared.count(b.msg.channel))
                fail("bound channel " + b.msg.channel +
                         " is already declared in the header",
                     g->span);
              break;
            case Message::Kind::Label:
              ++labels;
              if (!seen_labels.insert(b.msg.label).second)
                fail("duplicate label " + b.msg.label, g->span);
              break;
          }
        }
        if (errs > 1) fail("more than one ERR branch", g->span);
        if (news > 1) fail("more than one 'new' branch", g->span);
        if (news == 1 && labels > 0)
          fail("a request/spawn action admits no labelled branches",
               g->span);
        if (g->channel.is_tau()) {
          if (g->sender.id != g->receiver.id)
            fail("a tau action must have sender equal to receiver", g->span);
          if (labels > 0)
            fail("a tau action carries 'new' or ERR branches only", g->span);
        }
        // The prefix guards every recursion variable below it.
        std::set<std::string> none;
        std::swap(none, unguarded);
        for (const auto& b : g->branches) {
          if (b.msg.kind == Message::Kind::New) {
            bool fresh = bound_chans.insert(b.msg.channel).second;
            walk(b.cont, bound_chans, rec_vars, unguarded);
            if (fresh) bound_chans.erase(b.msg.channel);
          } else {
            walk(b.cont, bound_chans, rec_vars, unguarded);
          }
        }
        std::swap(none, unguarded);
        return;
      }
    }
  }
};

}  // namespace

ProtocolSpec parse_protocol(const std::string& text) {
  Parser p{lex(text)};
  ProtocolSpec spec = p.parse_spec();
  check_well_formed(spec);
  return spec;
}

TermPtr parse_term(const std::string& text) {
  Parser p{lex(text)};
  TermPtr t = p.parse_gtype();
  p.expect(Tok::Eof);
  return t;
}

void check_well_formed(const ProtocolSpec& spec) { WfChecker(spec).run(); }

}  // namespace mpst
