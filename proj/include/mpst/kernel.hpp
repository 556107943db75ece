#pragma once

#include <set>
#include <string>

#include "mpst/term.hpp"

namespace mpst {

// Canonical representative of the congruence class generated by
// G1 || G2 == G2 || G1 and G || end == G. Par stays binary; operands are
// ordered by their serialized form. Idempotent.
TermPtr normalize(const TermPtr& g);

// true iff normalize(g1) and normalize(g2) are identical up to consistent
// renaming of bound recursion variables.
bool structurally_equal(const TermPtr& g1, const TermPtr& g2);

// Capture-avoiding substitution of Var(var) by replacement; stops at a
// rec binder of the same name.
TermPtr substitute(const TermPtr& g, const std::string& var,
                   const TermPtr& replacement);

// Deterministic fresh-name source: fresh("t") yields the first of
// t_1, t_2, ... not in the avoid set, and reserves it.
class FreshNames {
 public:
  explicit FreshNames(std::set<std::string> avoid) : avoid_(std::move(avoid)) {}

  std::string fresh(const std::string& base);
  const std::set<std::string>& reserved() const { return avoid_; }

 private:
  std::set<std::string> avoid_;
};

// Renames every `new`-bound channel in g to a fresh name, renaming channel
// uses and matching endpoint indices in lockstep within the binder's scope.
TermPtr alpha_rename_bound_channels(const TermPtr& g, FreshNames& names);

}  // namespace mpst
