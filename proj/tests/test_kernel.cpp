#include "doctest.h"

#include <functional>

#include "helpers.hpp"
#include "mpst/explorer.hpp"
#include "mpst/kernel.hpp"
#include "mpst/printer.hpp"

using namespace mpst;
using namespace mpst::testing;

namespace {

TermPtr leaf_action(const std::string& from, const std::string& to,
                    const std::string& chan, const std::string& label) {
  return make_action(ep(from), ep(to), ChannelName{chan},
                     {{Message::make_label(label, "Unit"), make_end()},
                      {Message::make_err(), make_end()}});
}

}  // namespace

TEST_CASE("normalize drops par units") {
  TermPtr g1 = leaf_action("a", "b", "c", "Go");
  CHECK(term_to_string(normalize(make_par(g1, make_end()))) ==
        term_to_string(normalize(g1)));
  CHECK(term_to_string(normalize(make_par(make_end(), g1))) ==
        term_to_string(normalize(g1)));
  CHECK(normalize(make_end())->kind == Term::Kind::End);
  CHECK(normalize(make_par(make_end(), make_end()))->kind == Term::Kind::End);
}

TEST_CASE("normalize orders par operands") {
  TermPtr a = leaf_action("a", "b", "c", "Go");
  TermPtr b = leaf_action("x", "y", "d", "Stop");
  CHECK(term_to_string(normalize(make_par(a, b))) ==
        term_to_string(normalize(make_par(b, a))));
}

TEST_CASE("normalize is idempotent") {
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    TermPtr g = generate_coherent(seed, 5).body;
    TermPtr n = normalize(g);
    CHECK(term_to_string(normalize(n)) == term_to_string(n));
    CHECK(structurally_equal(g, n));
  }
}

TEST_CASE("structural equality modulo par congruence") {
  TermPtr a = leaf_action("a", "b", "c", "Go");
  TermPtr b = leaf_action("x", "y", "d", "Stop");
  CHECK(structurally_equal(make_par(a, b), make_par(b, a)));
  CHECK(structurally_equal(make_end(), make_par(make_end(), make_end())));
  CHECK_FALSE(structurally_equal(a, b));
}

TEST_CASE("structural equality renames bound recursion variables") {
  TermPtr bodyx = make_action(ep("a"), ep("b"), ChannelName{"c"},
                              {{Message::make_label("Go", "Unit"),
                                make_var("X")},
                               {Message::make_err(), make_end()}});
  TermPtr bodyy = substitute(bodyx, "X", make_var("Y"));
  CHECK(structurally_equal(make_rec("X", bodyx), make_rec("Y", bodyy)));
  CHECK_FALSE(structurally_equal(make_rec("X", bodyx),
                                 make_rec("Y", bodyx)));  // free X vs bound
}

TEST_CASE("substitute replaces free occurrences only") {
  CHECK(substitute(make_var("X"), "X", make_end())->kind == Term::Kind::End);
  TermPtr shadowed = make_rec("X", make_var("X"));
  CHECK(term_to_string(substitute(shadowed, "X", make_end())) ==
        term_to_string(shadowed));
}

TEST_CASE("substituting end for the loop variable yields the one-shot body") {
  ProtocolSpec restart = load_corpus("restart.mpst");
  REQUIRE(restart.body->kind == Term::Kind::Rec);
  TermPtr once = substitute(restart.body->body, "X", make_end());
  CHECK(free_rec_vars(once).empty());
  std::string s = term_to_string(once);
  CHECK(s.find("X") == std::string::npos);
  CHECK(s.find("Purchase(Order)") != std::string::npos);
}

TEST_CASE("substitutions of disjoint variables commute") {
  TermPtr body = make_action(
      ep("a"), ep("b"), ChannelName{"c"},
      {{Message::make_label("Go", "Unit"), make_var("X")},
       {Message::make_label("Stop", "Unit"), make_var("Y")},
       {Message::make_err(), make_end()}});
  TermPtr r1 = substitute(substitute(body, "X", make_end()), "Y",
                          leaf_action("a", "b", "c", "Ping"));
  TermPtr r2 = substitute(substitute(body, "Y",
                                     leaf_action("a", "b", "c", "Ping")),
                          "X", make_end());
  CHECK(term_to_string(r1) == term_to_string(r2));
}

TEST_CASE("alpha renaming refreshes bound channels and spawn indices") {
  ProtocolSpec restart = load_corpus("restart.mpst");
  FreshNames names({"t", "s", "k_server", "k_api"});
  TermPtr renamed = alpha_rename_bound_channels(restart.body, names);
  std::string s = term_to_string(renamed);
  CHECK(s.find("new t_1") != std::string::npos);
  CHECK(s.find("new s_1") != std::string::npos);
  CHECK(s.find("server.t_1") != std::string::npos);
  CHECK(s.find("api.s_1") != std::string::npos);
  CHECK(s.find("new t ") == std::string::npos);
  // Free channels stay put.
  CHECK(s.find("k_server") != std::string::npos);
  CHECK(s.find("k_api") != std::string::npos);
}

TEST_CASE("alpha renaming leaves new-free terms unchanged") {
  ProtocolSpec purchase = load_corpus("purchase.mpst");
  FreshNames names({});
  CHECK(term_to_string(alpha_rename_bound_channels(purchase.body, names)) ==
        term_to_string(purchase.body));
}

TEST_CASE("alpha renaming preserves term shape") {
  std::function<void(const TermPtr&, const TermPtr&)> same_shape =
      [&](const TermPtr& a, const TermPtr& b) {
        REQUIRE(a->kind == b->kind);
        REQUIRE(a->branches.size() == b->branches.size());
        REQUIRE(a->alts.size() == b->alts.size());
        for (size_t i = 0; i < a->branches.size(); ++i) {
          CHECK(a->branches[i].msg.kind == b->branches[i].msg.kind);
          CHECK(a->branches[i].msg.label == b->branches[i].msg.label);
          CHECK(a->branches[i].msg.payload == b->branches[i].msg.payload);
          same_shape(a->branches[i].cont, b->branches[i].cont);
        }
        for (size_t i = 0; i < a->alts.size(); ++i)
          same_shape(a->alts[i], b->alts[i]);
        if (a->body) same_shape(a->body, b->body);
        if (a->left) same_shape(a->left, b->left);
        if (a->right) same_shape(a->right, b->right);
      };
  for (uint64_t seed = 1; seed <= 40; ++seed) {
    TermPtr g = generate_coherent(seed, 5).body;
    std::set<std::string> avoid;
    collect_names(g, avoid);
    FreshNames names(avoid);
    same_shape(g, alpha_rename_bound_channels(g, names));
  }
}

TEST_CASE("double unfolding of restart yields two fresh generations") {
  ProtocolSpec restart = load_corpus("restart.mpst");
  TermPtr rec = restart.body;
  std::set<std::string> avoid{"k_server", "k_api"};
  collect_names(rec, avoid);

  FreshNames n1(avoid);
  TermPtr u1 = substitute(alpha_rename_bound_channels(rec->body, n1),
                          rec->var, rec);
  std::string s1 = term_to_string(u1);
  CHECK(s1.find("server.t_1") != std::string::npos);

  // The inner copy still binds t; unfolding against the grown name set must
  // pick t_2.
  FreshNames n2(n1.reserved());
  TermPtr u2 = substitute(alpha_rename_bound_channels(rec->body, n2),
                          rec->var, rec);
  std::string s2 = term_to_string(u2);
  CHECK(s2.find("server.t_2") != std::string::npos);
  CHECK(s2.find("server.t_1") == std::string::npos);
}

TEST_CASE("round trip through the canonical single-line form") {
  for (uint64_t seed = 1; seed <= 60; ++seed) {
    TermPtr g = generate_coherent(seed, 6).body;
    CHECK(structurally_equal(parse_term(term_to_string(g)), g));
  }
}
