#pragma once

#include <compare>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpst {

struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 1;
};

// A participant identity: role name plus thread index. Surface roles get
// index "0"; a spawned thread's index is the channel name that created it.
struct Identity {
  std::string role;
  std::string index = "0";

  auto operator<=>(const Identity&) const = default;
  std::string str() const;  // "server", "server.t"
};

// An identity together with its runtime aliveness mark.
struct Endpoint {
  Identity id;
  bool crashed = false;

  auto operator<=>(const Endpoint&) const = default;
  std::string str() const;  // "server", "server~", "server.t~"
};

inline const std::string kTauName = "tau";

struct ChannelName {
  std::string name;

  bool is_tau() const { return name == kTauName; }
  auto operator<=>(const ChannelName&) const = default;
};

// One action payload: a labelled message, a channel creation, or the
// error-handling branch marker.
struct Message {
  enum class Kind { Label, New, Err };

  Kind kind = Kind::Err;
  std::string label;    // Label
  std::string payload;  // Label
  std::string channel;  // New: the bound channel name

  static Message make_label(std::string l, std::string payload);
  static Message make_new(std::string channel);
  static Message make_err();

  bool is_err() const { return kind == Kind::Err; }
  auto operator<=>(const Message&) const = default;
  std::string str() const;  // "Purchase(Order)", "new t", "ERR"
};

class Term;
using TermPtr = std::shared_ptr<const Term>;

struct Branch {
  Message msg;
  TermPtr cont;
};

// Immutable global-type term. One node kind per alternative of the grammar;
// unused fields stay empty for the other kinds.
class Term {
 public:
  enum class Kind { Action, Choice, Par, Rec, Var, End };

  Kind kind = Kind::End;
  SourceSpan span;

  // Action
  Endpoint sender;
  Endpoint receiver;
  ChannelName channel;
  std::vector<Branch> branches;

  // Choice
  std::vector<TermPtr> alts;

  // Par
  TermPtr left;
  TermPtr right;

  // Rec / Var
  std::string var;
  TermPtr body;
};

TermPtr make_end(SourceSpan span = {});
TermPtr make_var(std::string var, SourceSpan span = {});
TermPtr make_rec(std::string var, TermPtr body, SourceSpan span = {});
TermPtr make_par(TermPtr left, TermPtr right, SourceSpan span = {});
TermPtr make_choice(std::vector<TermPtr> alts, SourceSpan span = {});
// Stores the ERR branch last; otherwise branch order is preserved as given.
TermPtr make_action(Endpoint sender, Endpoint receiver, ChannelName channel,
                    std::vector<Branch> branches, SourceSpan span = {});

// Single-line concrete syntax; also the canonical serialization used for
// Par ordering and state identity.
std::string term_to_string(const TermPtr& t);

// Every name occurring in the term that matters for freshness: channel
// names (free and bound) and endpoint thread indices.
void collect_names(const TermPtr& t, std::set<std::string>& out);

// Channels used by actions and not bound by an enclosing `new` branch.
std::set<std::string> free_channels(const TermPtr& t);

// Recursion variables not bound by an enclosing rec.
std::set<std::string> free_rec_vars(const TermPtr& t);

const Branch* find_err_branch(const TermPtr& action);

// Header declarations of a protocol file.
struct PublicDecl {
  ChannelName channel;
  Endpoint server;
};

struct PrivateDecl {
  ChannelName channel;
  Endpoint a;
  Endpoint b;
};

struct ProtocolSpec {
  std::string name;
  std::vector<PublicDecl> public_decls;
  std::vector<PrivateDecl> private_decls;
  TermPtr body;
};

struct MpstError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingErrBranchError : MpstError {
  using MpstError::MpstError;
};

struct NotEnabledError : MpstError {
  using MpstError::MpstError;
};

struct AmbiguousTransitionError : MpstError {
  using MpstError::MpstError;
};

struct DuplicateVariableError : MpstError {
  using MpstError::MpstError;
};

struct GenerationExhaustedError : MpstError {
  using MpstError::MpstError;
};

}  // namespace mpst
