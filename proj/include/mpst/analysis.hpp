#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mpst/term.hpp"

namespace mpst {

using ParticipantSet = std::set<Identity>;

// One LTS action: a communication, a per-channel failure (timeout or
// connection error), or a participant crash.
struct TransitionLabel {
  enum class Kind { Comm, Fail, Crash };

  Kind kind = Kind::Comm;
  Identity sender;    // Comm
  Identity receiver;  // Comm
  Identity subject;   // Fail, Crash
  ChannelName channel;  // Comm, Fail
  Message message;    // Comm, never Err

  static TransitionLabel comm(Identity sender, Identity receiver,
                              ChannelName channel, Message message);
  static TransitionLabel fail(Identity subject, ChannelName channel);
  static TransitionLabel crash_of(Identity subject);

  auto operator<=>(const TransitionLabel&) const = default;
  std::string str() const;       // "server -> api : s { Purchase(Order) }",
                                 // "server !fail s", "api !crash"
  std::string sort_key() const;  // deterministic ordering key
};

// L(S): the identities of the endpoints still marked alive.
ParticipantSet live_set(const std::vector<Endpoint>& endpoints);

// nu_p(q, m): the participant a `new t` branch would spawn at receiver q.
ParticipantSet spawn_set(const Endpoint& receiver, const Message& m);

// pt(G): indexed roles appearing as live endpoints, with spawn-pending
// threads removed branch-wise.
ParticipantSet participants(const TermPtr& g);

// init(G): sender of an action; common initiator of a choice; else absent.
std::optional<Identity> initiator(const TermPtr& g);

ParticipantSet public_participants(const std::vector<PublicDecl>& decls);

// G crash r: prunes every action r takes part in down to its ERR branch and
// marks r's endpoints. Throws MissingErrBranchError if r is an endpoint of
// an action without one (cannot happen on coherent types).
TermPtr crash(const TermPtr& g, const Identity& victim);

ParticipantSet subjects(const TransitionLabel& label);

}  // namespace mpst
