#pragma once

#include <string>

#include "mpst/term.hpp"

namespace mpst {

struct ParseError : MpstError {
  ParseError(const std::string& msg, SourceSpan span)
      : MpstError(msg), span(span) {}
  SourceSpan span;
};

struct WellFormednessError : MpstError {
  WellFormednessError(const std::string& msg, SourceSpan span)
      : MpstError(msg), span(span) {}
  SourceSpan span;
};

// Parses a protocol file (header declarations + body) and enforces the
// syntactic invariants: at most one ERR branch, distinct labels, guarded
// recursion, request/spawn branch shape, declared free channels, and the
// public-server position rule.
ProtocolSpec parse_protocol(const std::string& text);

// Parses a bare global type; syntax only, no well-formedness pass.
TermPtr parse_term(const std::string& text);

// Runs the well-formedness pass on an already-built spec (used for
// hand-constructed terms in tests).
void check_well_formed(const ProtocolSpec& spec);

}  // namespace mpst
