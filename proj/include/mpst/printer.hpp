#pragma once

#include <string>

#include "mpst/term.hpp"

namespace mpst {

// Display-only cleanup: drops sole-ERR prefixes whose endpoints are both
// crashed and whose continuation reduces to end. Never used in semantics.
TermPtr gc_display(const TermPtr& g);

// Canonical multi-line form of a term. parse_term(pretty) is structurally
// equal to the input.
std::string pretty_print_term(const TermPtr& g, int indent = 0);

// Full protocol file: header declarations plus body. With gc set, the body
// is passed through gc_display first.
std::string pretty_print(const ProtocolSpec& spec, bool gc = false);

}  // namespace mpst
