#pragma once

#include <string>
#include <vector>

#include "mpst/coherence.hpp"
#include "mpst/explorer.hpp"

namespace mpst {

// Stable-field-order JSON renderings; byte-identical across runs for fixed
// inputs.
std::string coherence_report_json(const std::string& protocol,
                                  const CoherenceReport& report);

std::string state_graph_json(const StateGraph& graph,
                             const std::vector<PropertyVerdict>& verdicts);

std::string trace_json(const std::string& protocol, std::uint64_t seed,
                       const TermPtr& initial,
                       const std::vector<Transition>& steps);

std::string state_graph_dot(const StateGraph& graph);

}  // namespace mpst
