#include "mpst/analysis.hpp"

#include <sstream>

namespace mpst {

TransitionLabel TransitionLabel::comm(Identity sender, Identity receiver,
                                      ChannelName channel, Message message) {
  TransitionLabel l;
  l.kind = Kind::Comm;
  l.sender = std::move(sender);
  l.receiver = std::move(receiver);
  l.channel = std::move(channel);
  l.message = std::move(message);
  return l;
}

TransitionLabel TransitionLabel::fail(Identity subject, ChannelName channel) {
  TransitionLabel l;
  l.kind = Kind::Fail;
  l.subject = std::move(subject);
  l.channel = std::move(channel);
  return l;
}

TransitionLabel TransitionLabel::crash_of(Identity subject) {
  TransitionLabel l;
  l.kind = Kind::Crash;
  l.subject = std::move(subject);
  return l;
}

std::string TransitionLabel::str() const {
  switch (kind) {
    case Kind::Comm:
      return sender.str() + " -> " + receiver.str() + " : " + channel.name +
             " { " + message.str() + " }";
    case Kind::Fail:
      return subject.str() + " !fail " + channel.name;
    case Kind::Crash:
      return subject.str() + " !crash";
  }
  return "?";
}

std::string TransitionLabel::sort_key() const {
  switch (kind) {
    case Kind::Comm:
      return "0|" + sender.str() + "|" + receiver.str() + "|" + channel.name +
             "|" + message.str();
    case Kind::Fail:
      return "1|" + subject.str() + "|" + channel.name;
    case Kind::Crash:
      return "2|" + subject.str();
  }
  return "?";
}

ParticipantSet live_set(const std::vector<Endpoint>& endpoints) {
  ParticipantSet out;
  for (const auto& e : endpoints)
    if (!e.crashed) out.insert(e.id);
  return out;
}

ParticipantSet spawn_set(const Endpoint& receiver, const Message& m) {
  if (m.kind != Message::Kind::New) return {};
  return {Identity{receiver.id.role, m.channel}};
}

ParticipantSet participants(const TermPtr& g) {
  switch (g->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return {};
    case Term::Kind::Rec:
      return participants(g->body);
    case Term::Kind::Par: {
      ParticipantSet out = participants(g->left);
      ParticipantSet r = participants(g->right);
      out.insert(r.begin(), r.end());
      return out;
    }
    case Term::Kind::Choice: {
      ParticipantSet out;
      for (const auto& a : g->alts) {
        ParticipantSet p = participants(a);
        out.insert(p.begin(), p.end());
      }
      return out;
    }
    case Term::Kind::Action: {
      ParticipantSet out;
      ParticipantSet prefix = live_set({g->sender, g->receiver});
      for (const auto& b : g->branches) {
        out.insert(prefix.begin(), prefix.end());
        ParticipantSet cont = participants(b.cont);
        for (const auto& spawned : spawn_set(g->receiver, b.msg))
          cont.erase(spawned);
        out.insert(cont.begin(), cont.end());
      }
      return out;
    }
  }
  return {};
}

std::optional<Identity> initiator(const TermPtr& g) {
  switch (g->kind) {
    case Term::Kind::Action:
      return g->sender.id;
    case Term::Kind::Choice: {
      std::optional<Identity> common;
      for (const auto& a : g->alts) {
        auto i = initiator(a);
        if (!i) return std::nullopt;
        if (!common) {
          common = i;
        } else if (*common != *i) {
          return std::nullopt;
        }
      }
      return common;
    }
    default:
      return std::nullopt;
  }
}

ParticipantSet public_participants(const std::vector<PublicDecl>& decls) {
  ParticipantSet out;
  for (const auto& d : decls) out.insert(d.server.id);
  return out;
}

TermPtr crash(const TermPtr& g, const Identity& victim) {
  switch (g->kind) {
    case Term::Kind::End:
    case Term::Kind::Var:
      return g;
    case Term::Kind::Rec:
      return make_rec(g->var, crash(g->body, victim), g->span);
    case Term::Kind::Par:
      return make_par(crash(g->left, victim), crash(g->right, victim),
                      g->span);
    case Term::Kind::Choice: {
      std::vector<TermPtr> alts;
      alts.reserve(g->alts.size());
      for (const auto& a : g->alts) alts.push_back(crash(a, victim));
      return make_choice(std::move(alts), g->span);
    }
    case Term::Kind::Action: {
      bool hits_sender = g->sender.id == victim;
      bool hits_receiver = g->receiver.id == victim;
      if (!hits_sender && !hits_receiver) {
        std::vector<Branch> branches;
        branches.reserve(g->branches.size());
        for (const auto& b : g->branches)
          branches.push_back({b.msg, crash(b.cont, victim)});
        return make_action(g->sender, g->receiver, g->channel,
                           std::move(branches), g->span);
      }
      const Branch* err = find_err_branch(g);
      if (!err)
        throw MissingErrBranchError("crash of " + victim.str() +
                                    " hits an action on channel " +
                                    g->channel.name + " with no ERR branch");
      Endpoint sender = g->sender;
      Endpoint receiver = g->receiver;
      if (hits_sender) sender.crashed = true;
      if (hits_receiver) receiver.crashed = true;
      std::vector<Branch> branches{{Message::make_err(),
                                    crash(err->cont, victim)}};
      return make_action(sender, receiver, g->channel, std::move(branches),
                         g->span);
    }
  }
  return g;
}

ParticipantSet subjects(const TransitionLabel& label) {
  switch (label.kind) {
    case TransitionLabel::Kind::Comm:
      return {label.sender, label.receiver};
    case TransitionLabel::Kind::Fail:
    case TransitionLabel::Kind::Crash:
      return {label.subject};
  }
  return {};
}

}  // namespace mpst
