#include "mpst/printer.hpp"

#include <sstream>

namespace mpst {

TermPtr gc_display(const TermPtr& g) {
  switch (g->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return g;
    case Term::Kind::Rec:
      return make_rec(g->var, gc_display(g->body), g->span);
    case Term::Kind::Par:
      return make_par(gc_display(g->left), gc_display(g->right), g->span);
    case Term::Kind::Choice: {
      std::vector<TermPtr> alts;
      for (const auto& a : g->alts) alts.push_back(gc_display(a));
      return make_choice(std::move(alts), g->span);
    }
    case Term::Kind::Action: {
      std::vector<Branch> branches;
      for (const auto& b : g->branches)
        branches.push_back({b.msg, gc_display(b.cont)});
      if (branches.size() == 1 && branches[0].msg.is_err() &&
          g->sender.crashed && g->receiver.crashed &&
          branches[0].cont->kind == Term::Kind::End)
        return branches[0].cont;
      return make_action(g->sender, g->receiver, g->channel,
                         std::move(branches), g->span);
    }
  }
  return g;
}

namespace {

std::string pad(int n) { return std::string(n, ' '); }

bool inline_form(const TermPtr& g) {
  return g->kind == Term::Kind::End || g->kind == Term::Kind::Var;
}

void print(const TermPtr& g, int indent, std::ostringstream& os) {
  switch (g->kind) {
    case Term::Kind::End:
      os << "end";
      return;
    case Term::Kind::Var:
      os << g->var;
      return;
    case Term::Kind::Rec:
      os << "rec " << g->var << " .\n" << pad(indent + 2);
      print(g->body, indent + 2, os);
      return;
    case Term::Kind::Par: {
      bool parens = g->left->kind == Term::Kind::Par ||
                    g->left->kind == Term::Kind::Rec;
      if (parens) os << "(";
      print(g->left, indent + (parens ? 1 : 0), os);
      if (parens) os << ")";
      os << "\n" << pad(indent) << "|| ";
      print(g->right, indent + 3, os);
      return;
    }
    case Term::Kind::Choice: {
      os << "choice {\n";
      for (size_t i = 0; i < g->alts.size(); ++i) {
        if (i > 0) os << "\n" << pad(indent) << "|\n";
        os << pad(indent + 2);
        print(g->alts[i], indent + 2, os);
      }
      os << "\n" << pad(indent) << "}";
      return;
    }
    case Term::Kind::Action: {
      os << g->sender.str() << " -> " << g->receiver.str() << " : "
         << g->channel.name << " {\n";
      for (size_t i = 0; i < g->branches.size(); ++i) {
        const Branch& b = g->branches[i];
        os << pad(indent + 2) << b.msg.str() << " .";
        if (inline_form(b.cont)) {
          os << " ";
          print(b.cont, indent + 2, os);
        } else {
          os << "\n" << pad(indent + 4);
          print(b.cont, indent + 4, os);
        }
        if (i + 1 < g->branches.size()) os << ",";
        os << "\n";
      }
      os << pad(indent) << "}";
      return;
    }
  }
}

}  // namespace

std::string pretty_print_term(const TermPtr& g, int indent) {
  std::ostringstream os;
  print(g, indent, os);
  return os.str();
}

std::string pretty_print(const ProtocolSpec& spec, bool gc) {
  std::ostringstream os;
  os << "protocol " << spec.name << "\n";
  for (const auto& d : spec.public_decls)
    os << "public " << d.channel.name << " : " << d.server.str() << "\n";
  for (const auto& d : spec.private_decls)
    os << "private " << d.channel.name << " : " << d.a.str() << ", "
       << d.b.str() << "\n";
  os << "\n";
  os << pretty_print_term(gc ? gc_display(spec.body) : spec.body, 0);
  os << "\n";
  return os.str();
}

}  // namespace mpst
