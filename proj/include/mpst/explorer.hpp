#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mpst/coherence.hpp"
#include "mpst/semantics.hpp"
#include "mpst/term.hpp"

namespace mpst {

struct Budgets {
  int max_states = 10000;
  int max_depth = 64;
  int max_unfold_per_binder = 2;
  // When non-empty, crash edges are injected only for these participants
  // (identity strings such as "api" or "server.t_1").
  std::set<std::string> crash_only;
};

struct Edge {
  int src = 0;
  int dst = 0;
  TransitionLabel label;
  std::string rule;
};

struct StateGraph {
  ProtocolSpec spec;
  Budgets budgets;
  bool truncated = false;
  int initial = 0;
  std::vector<TermPtr> states;          // normalized, by discovery order
  std::vector<std::string> state_keys;  // canonical serializations
  std::vector<int> depth;
  std::vector<Edge> edges;
};

// Breadth-first closure of the LTS from normalize(spec.body), states
// numbered by discovery order. truncated is set when a budget was hit.
StateGraph explore(const ProtocolSpec& spec, const Budgets& budgets = {});

enum class PropertyKind {
  NoOrphans,
  PreservationOfCoherence,
  CrashPreservation,
  Weakening,
};

std::string property_name(PropertyKind p);

struct PropertyViolation {
  int state = 0;
  std::string witness;
  std::string diagnosis;
};

struct PropertyVerdict {
  PropertyKind property = PropertyKind::NoOrphans;
  bool applicable = true;  // false when the initial state is incoherent
  int checked_states = 0;
  std::vector<PropertyViolation> violations;
};

PropertyVerdict check_property(const StateGraph& graph, PropertyKind property,
                               CoherenceMode mode = CoherenceMode::RelaxedEnd);

// Deterministic pseudo-random coherent protocol; size bounds the action
// count. Throws GenerationExhaustedError if no attempt passes the
// post-generation coherence check.
ProtocolSpec generate_coherent(std::uint64_t seed, int size);

// Seeded uniform random walk; stops at max_steps or a stuck state.
std::vector<Transition> sample_trace(const ProtocolSpec& spec,
                                     std::uint64_t seed, int max_steps,
                                     const EnumLimits& limits = {});

}  // namespace mpst
