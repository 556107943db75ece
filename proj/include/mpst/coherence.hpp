#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mpst/term.hpp"

namespace mpst {

// Channel environment entry: either a public channel with its fixed server,
// or a session channel connecting two endpoints (flags kept for runtime
// types).
struct ChannelBinding {
  enum class Kind { PublicServer, Session };

  Kind kind = Kind::Session;
  Endpoint a;  // PublicServer: the server; Session: smaller endpoint
  Endpoint b;  // Session: larger endpoint

  static ChannelBinding public_server(Identity server);
  static ChannelBinding session(Endpoint x, Endpoint y);

  std::set<Identity> identities() const;
  bool operator==(const ChannelBinding&) const = default;
  std::string str() const;
};

using Gamma = std::map<std::string, ChannelBinding>;
using Delta = std::map<std::string, Gamma>;

enum class CoherenceMode { Strict, RelaxedEnd };

std::string mode_name(CoherenceMode mode);  // "strict-end" | "relaxed-end"

struct CoherenceFailure {
  std::string rule;  // send, req, spawn, fail, par, sum, rec, var-rec, end,
                     // malformed
  std::string path;  // term path of the failing node
  std::string message;
  SourceSpan span;
};

struct CoherenceReport {
  bool coherent = false;
  CoherenceMode mode = CoherenceMode::RelaxedEnd;
  std::vector<CoherenceFailure> failures;
};

CoherenceReport check_coherence(const TermPtr& g, const Delta& delta,
                                const Gamma& gamma,
                                CoherenceMode mode = CoherenceMode::RelaxedEnd);

// Weakening support: extends delta with var -> snapshot.
// Throws DuplicateVariableError if var is already bound.
Delta weaken_delta(const Delta& delta, const std::string& var,
                   const Gamma& snapshot);

// The initial environment declared by a protocol header.
Gamma gamma_from_decls(const std::vector<PublicDecl>& publics,
                       const std::vector<PrivateDecl>& privates);

// Environment for an evolved (runtime) type: header publics plus one
// session binding per free session channel. Header-declared channels keep
// their declared pair; channels opened at runtime get the endpoint pair of
// their first action in the term.
Gamma runtime_gamma(const TermPtr& g, const std::vector<PublicDecl>& publics,
                    const std::vector<PrivateDecl>& privates);

}  // namespace mpst
