#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpst/analysis.hpp"
#include "mpst/term.hpp"

namespace mpst {

struct Transition {
  TransitionLabel label;
  TermPtr successor;  // normalized
  std::string rule;   // com, com-snd-fail, com-rcv-fail, concur, crash, par,
                      // rec, choice, choice-br
  std::string path;   // term path of the fired redex
};

struct EnumLimits {
  int max_unfold_per_binder = 2;
};

// Every transition derivable from g, deduplicated by (label, successor) and
// returned in a canonical order. `reserved` holds names that fresh bound
// channels must avoid (declared channels, names of the initial type).
std::vector<Transition> enabled_transitions(
    const TermPtr& g, const EnumLimits& limits = {},
    const std::set<std::string>& reserved = {});

// The unique successor of g under label. Throws NotEnabledError when the
// label is not enabled, AmbiguousTransitionError when distinct successors
// share the label (disambiguate by provenance via enabled_transitions).
TermPtr apply_transition(const TermPtr& g, const TransitionLabel& label,
                         const EnumLimits& limits = {},
                         const std::set<std::string>& reserved = {});

struct TimeoutWitness {
  Transition first_fail;
  Transition second_fail;
  Transition unblocked;  // a communication blocked between the two fails
};

// Searches for a two-step timeout: an endpoint fails on a channel, the ERR
// continuation's communication stays blocked until the other endpoint fails
// on the same channel, then flows.
std::optional<TimeoutWitness> two_step_timeout_witness(
    const TermPtr& g, const EnumLimits& limits = {},
    const std::set<std::string>& reserved = {}, int max_states = 512);

}  // namespace mpst
