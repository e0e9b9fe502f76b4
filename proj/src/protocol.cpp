// Copyright 2026 The bidsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bidsim/protocol.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include <fmt/format.h>

namespace bidsim {

namespace {

constexpr std::array<std::string_view, 8> kMessageTypeNames = {
    "CallForProposal", "NotUnderstood", "Refusal", "Offer",
    "OfferRejection",  "OfferAcceptance", "Error", "Conforming",
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Outgoing reply_to(std::string_view self, const Frame& incoming, MessageType type, SimTime now,
                  InteractionElements elements = {}) {
  Frame frame;
  frame.msg_type = type;
  frame.sender = std::string(self);
  frame.receiver = incoming.sender;
  frame.conversation_id = incoming.conversation_id;
  frame.sent_at = now;
  frame.elements = std::move(elements);
  return {topic_for_reply(incoming.sender), std::move(frame)};
}

Outgoing direct(MessageType type, std::string_view from, const std::string& to, const std::string& conversation,
                SimTime now) {
  Frame frame;
  frame.msg_type = type;
  frame.sender = std::string(from);
  frame.receiver = to;
  frame.conversation_id = conversation;
  frame.sent_at = now;
  return {topic_for_reply(to), std::move(frame)};
}

}  // namespace

std::string_view to_string(MessageType type) { return kMessageTypeNames[static_cast<std::size_t>(type)]; }

std::optional<MessageType> parse_message_type(std::string_view text) {
  for (std::size_t i = 0; i < kMessageTypeNames.size(); ++i) {
    if (kMessageTypeNames[i] == text) return static_cast<MessageType>(i);
  }
  return std::nullopt;
}

std::string_view to_string(RefusalReason reason) {
  return reason == RefusalReason::Busy ? "busy" : "quality_mismatch";
}

std::string_view to_string(DiscoveryMode mode) {
  return mode == DiscoveryMode::Multicast ? "multicast" : "broadcast";
}

std::optional<DiscoveryMode> parse_discovery_mode(std::string_view text) {
  if (text == "multicast") return DiscoveryMode::Multicast;
  if (text == "broadcast") return DiscoveryMode::Broadcast;
  return std::nullopt;
}

bool elements_conform(MessageType type, const InteractionElements& e) {
  const bool cfp_fields = e.requested_service || e.quality_req || e.reply_by;
  const bool offer_fields = e.offered_cost || e.offered_duration || e.offered_quality;
  const bool refusal_fields = e.refusal_reason.has_value();
  switch (type) {
    case MessageType::CallForProposal:
      return e.requested_service && e.quality_req && e.reply_by && !offer_fields && !refusal_fields;
    case MessageType::Offer:
      return e.offered_cost && e.offered_duration && e.offered_quality && !cfp_fields && !refusal_fields;
    case MessageType::Refusal:
      return refusal_fields && !cfp_fields && !offer_fields;
    default:
      return !cfp_fields && !offer_fields && !refusal_fields;
  }
}

std::string topic_for_cfp(const ServiceTag& service, DiscoveryMode mode) {
  if (mode == DiscoveryMode::Broadcast) return "cfp/all";
  return "cfp/" + service.id();
}

std::string topic_for_reply(std::string_view aas_id) {
  if (aas_id.empty()) throw std::invalid_argument("reply topic needs a non-empty aas_id");
  return "message/" + std::string(aas_id);
}

std::string format_trace_line(const Frame& frame, std::string_view topic) {
  std::string line = fmt::format("t={} {} {} {}->{} conv={} seq={}", frame.sent_at.millis(), topic,
                                 to_string(frame.msg_type), frame.sender, frame.receiver,
                                 frame.conversation_id, frame.message_seq);
  const auto& e = frame.elements;
  if (e.requested_service) line += fmt::format(" svc={}", e.requested_service->id());
  if (e.quality_req) line += fmt::format(" q_req={}", *e.quality_req);
  if (e.reply_by) line += fmt::format(" reply_by={}", e.reply_by->millis());
  if (e.offered_cost) line += fmt::format(" cost={}", *e.offered_cost);
  if (e.offered_duration) line += fmt::format(" dur={}", e.offered_duration->millis());
  if (e.offered_quality) line += fmt::format(" q_out={}", *e.offered_quality);
  if (e.refusal_reason) line += fmt::format(" reason={}", to_string(*e.refusal_reason));
  return line;
}

std::string make_conversation_id(std::string_view requester, int round) {
  return fmt::format("{}/{}", requester, round);
}

bool conversation_owned_by(std::string_view conversation, std::string_view requester) {
  return conversation.size() > requester.size() && conversation.starts_with(requester) &&
         conversation[requester.size()] == '/';
}

// ---------------------------------------------------------------------------

bool is_terminal(const SrState& state) {
  return std::holds_alternative<sr::Succeeded>(state) || std::holds_alternative<sr::GaveUp>(state);
}

std::string_view state_name(const SrState& state) {
  constexpr std::array<std::string_view, 6> names = {"Idle",    "Collecting", "Evaluating", "AwaitingConforming",
                                                     "Succeeded", "GaveUp"};
  return names[state.index()];
}

std::string_view state_name(const SpState& state) {
  constexpr std::array<std::string_view, 3> names = {"Listening", "OfferPending", "Working"};
  return names[state.index()];
}

namespace {

SrStep start_round(const SrContext& ctx, const SrState& state, int round, SimTime now) {
  if (!std::holds_alternative<sr::Idle>(state)) return {state, {}, std::nullopt};
  const auto& profile = ctx.profile;
  Frame cfp;
  cfp.msg_type = MessageType::CallForProposal;
  cfp.sender = profile.aas_id;
  cfp.receiver = topic_for_cfp(profile.requested, ctx.mode);
  cfp.conversation_id = make_conversation_id(profile.aas_id, round);
  cfp.sent_at = now;
  cfp.elements.requested_service = profile.requested;
  cfp.elements.quality_req = profile.quality_req;
  cfp.elements.reply_by = now + profile.t_exp;

  sr::Collecting collecting;
  collecting.conversation = cfp.conversation_id;
  collecting.deadline = now + profile.t_exp;

  SrStep step{std::move(collecting), {}, std::nullopt};
  std::string topic = cfp.receiver;
  step.out.push_back({std::move(topic), std::move(cfp)});
  return step;
}

int round_of(std::string_view conversation) {
  const auto slash = conversation.rfind('/');
  int round = 0;
  for (char c : conversation.substr(slash + 1)) round = round * 10 + (c - '0');
  return round;
}

SrStep close_round(const SrContext& ctx, const sr::Collecting& round, SimTime now) {
  const auto& profile = ctx.profile;
  // Evaluating is transient: the decision is taken within the same instant.
  const auto& offers = round.offers;

  SrStep step{sr::Idle{}, {}, std::nullopt};
  const auto winner = ctx.select_offer(offers, profile.budget);

  for (std::size_t i = 0; i < offers.size(); ++i) {
    const auto type = (winner && *winner == i) ? MessageType::OfferAcceptance : MessageType::OfferRejection;
    step.out.push_back(direct(type, profile.aas_id, offers[i].provider, round.conversation, now));
  }

  if (winner) {
    step.next = sr::AwaitingConforming{round.conversation, offers[*winner].provider, offers[*winner].cost};
    return step;
  }

  RoundOutcome outcome;
  outcome.round = round_of(round.conversation);
  outcome.over_budget_offers = static_cast<int>(offers.size());
  outcome.busy_refusals = round.busy_refusals;
  outcome.permanent_refusals = round.permanent_refusals;
  const auto decision = ctx.give_up_rule(outcome);
  step.decision = decision;
  step.next = decision == RoundDecision::Retry ? SrState{sr::Idle{}} : SrState{sr::GaveUp{}};
  return step;
}

SrStep sr_receive(const SrContext& ctx, const SrState& state, const Frame& f, SimTime now) {
  const auto& profile = ctx.profile;
  SrStep unchanged{state, {}, std::nullopt};
  if (!conversation_owned_by(f.conversation_id, profile.aas_id)) return unchanged;

  auto* collecting = std::get_if<sr::Collecting>(&state);
  const bool current_round = collecting && collecting->conversation == f.conversation_id;

  if (f.msg_type == MessageType::NotUnderstood) {
    if (current_round) {
      auto next = *collecting;
      ++next.permanent_refusals;
      return {std::move(next), {}, std::nullopt};
    }
    return unchanged;
  }
  if (!elements_conform(f.msg_type, f.elements)) {
    unchanged.out.push_back(reply_to(profile.aas_id, f, MessageType::NotUnderstood, now));
    return unchanged;
  }

  switch (f.msg_type) {
    case MessageType::Offer: {
      if (!current_round) {
        // Late or stale binding offer: release the provider.
        unchanged.out.push_back(reply_to(profile.aas_id, f, MessageType::OfferRejection, now));
        return unchanged;
      }
      const bool duplicate = std::any_of(collecting->offers.begin(), collecting->offers.end(),
                                         [&](const OfferSeen& o) { return o.provider == f.sender; });
      if (duplicate) return unchanged;
      auto next = *collecting;
      next.offers.push_back(
          {f.sender, *f.elements.offered_cost, *f.elements.offered_duration, *f.elements.offered_quality, next.arrivals++});
      return {std::move(next), {}, std::nullopt};
    }
    case MessageType::Refusal: {
      if (!current_round) return unchanged;
      auto next = *collecting;
      if (*f.elements.refusal_reason == RefusalReason::Busy) {
        ++next.busy_refusals;
      } else {
        ++next.permanent_refusals;
      }
      return {std::move(next), {}, std::nullopt};
    }
    case MessageType::Conforming:
    case MessageType::Error: {
      const auto* waiting = std::get_if<sr::AwaitingConforming>(&state);
      if (!waiting || waiting->conversation != f.conversation_id || waiting->provider != f.sender) {
        return unchanged;
      }
      if (f.msg_type == MessageType::Conforming) {
        return {sr::Succeeded{waiting->provider, waiting->cost}, {}, std::nullopt};
      }
      RoundOutcome outcome;
      outcome.round = round_of(waiting->conversation);
      outcome.provider_error = true;
      const auto decision = ctx.give_up_rule(outcome);
      return {decision == RoundDecision::Retry ? SrState{sr::Idle{}} : SrState{sr::GaveUp{}}, {}, decision};
    }
    default:
      // CallForProposal, OfferRejection, OfferAcceptance are never addressed to requesters.
      unchanged.out.push_back(reply_to(profile.aas_id, f, MessageType::NotUnderstood, now));
      return unchanged;
  }
}

}  // namespace

SrStep sr_transition(const SrContext& ctx, const SrState& state, const SrInput& input, SimTime now) {
  if (is_terminal(state)) return {state, {}, std::nullopt};
  return std::visit(
      Overloaded{
          [&](const sr_input::StartRound& start) { return start_round(ctx, state, start.round, now); },
          [&](const sr_input::CollectionDeadline&) -> SrStep {
            const auto* collecting = std::get_if<sr::Collecting>(&state);
            if (!collecting || now < collecting->deadline) return {state, {}, std::nullopt};
            return close_round(ctx, *collecting, now);
          },
          [&](const sr_input::Received& in) { return sr_receive(ctx, state, in.frame, now); },
      },
      input);
}

// ---------------------------------------------------------------------------

namespace {

SpStep sp_receive(const SpState& state, const ProviderProfile& profile, const ProviderTiming& timing,
                  const Frame& f, SimTime now) {
  SpStep step{state, timing, {}, std::nullopt};
  if (f.msg_type == MessageType::NotUnderstood) return step;
  if (!elements_conform(f.msg_type, f.elements)) {
    step.out.push_back(reply_to(profile.aas_id, f, MessageType::NotUnderstood, now));
    return step;
  }

  // The binding window lapses on its own; no timer is needed to release it.
  SpState current = state;
  if (const auto* pending = std::get_if<sp::OfferPending>(&state); pending && now > pending->binding_until) {
    current = sp::Listening{};
  }
  step.next = current;

  switch (f.msg_type) {
    case MessageType::CallForProposal: {
      const auto& e = f.elements;
      if (!profile.offers(*e.requested_service)) {
        step.out.push_back(reply_to(profile.aas_id, f, MessageType::NotUnderstood, now));
      } else if (*e.quality_req > profile.quality_out) {
        InteractionElements refusal;
        refusal.refusal_reason = RefusalReason::QualityMismatch;
        step.out.push_back(reply_to(profile.aas_id, f, MessageType::Refusal, now, refusal));
      } else if (!std::holds_alternative<sp::Listening>(current) || !is_actionable(profile, timing, now)) {
        InteractionElements refusal;
        refusal.refusal_reason = RefusalReason::Busy;
        step.out.push_back(reply_to(profile.aas_id, f, MessageType::Refusal, now, refusal));
      } else {
        InteractionElements offer;
        offer.offered_cost = profile.cost;
        offer.offered_duration = profile.duration;
        offer.offered_quality = profile.quality_out;
        step.out.push_back(reply_to(profile.aas_id, f, MessageType::Offer, now, offer));
        step.next = sp::OfferPending{f.conversation_id, f.sender, now + profile.t_exp};
        step.timing.last_offer = now;
      }
      return step;
    }
    case MessageType::OfferRejection: {
      const auto* pending = std::get_if<sp::OfferPending>(&current);
      if (pending && pending->conversation == f.conversation_id) {
        // A rejected offer stops binding the provider.
        step.next = sp::Listening{};
        step.timing.last_offer.reset();
      }
      return step;
    }
    case MessageType::OfferAcceptance: {
      const auto* pending = std::get_if<sp::OfferPending>(&current);
      if (pending && pending->conversation == f.conversation_id && pending->requester == f.sender) {
        const SimTime until = now + profile.duration;
        step.next = sp::Working{f.conversation_id, f.sender, until};
        step.timing.agreement = now;
        step.timing.agreed_duration = profile.duration;
        step.work_timer = until;
      } else {
        step.out.push_back(reply_to(profile.aas_id, f, MessageType::Error, now));
      }
      return step;
    }
    default:
      step.out.push_back(reply_to(profile.aas_id, f, MessageType::NotUnderstood, now));
      return step;
  }
}

}  // namespace

SpStep sp_transition(const SpState& state, const ProviderProfile& profile, const ProviderTiming& timing,
                     const SpInput& input, SimTime now) {
  return std::visit(Overloaded{
                        [&](const sp_input::Received& in) { return sp_receive(state, profile, timing, in.frame, now); },
                        [&](const sp_input::WorkDone&) -> SpStep {
                          const auto* working = std::get_if<sp::Working>(&state);
                          if (!working || now < working->until) return {state, timing, {}, std::nullopt};
                          SpStep step{sp::Listening{}, timing, {}, std::nullopt};
                          step.out.push_back(direct(MessageType::Conforming, profile.aas_id, working->requester,
                                                    working->conversation, now));
                          return step;
                        },
                    },
                    input);
}

}  // namespace bidsim
