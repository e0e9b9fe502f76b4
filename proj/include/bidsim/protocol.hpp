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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bidsim/core_model.hpp"

namespace bidsim {

enum class MessageType {
  CallForProposal,
  NotUnderstood,
  Refusal,
  Offer,
  OfferRejection,
  OfferAcceptance,
  Error,
  Conforming,
};

std::string_view to_string(MessageType type);
std::optional<MessageType> parse_message_type(std::string_view text);

enum class RefusalReason {
  Busy,             // capable, but not actionable right now
  QualityMismatch,  // q_req > q_out, permanent
};

std::string_view to_string(RefusalReason reason);

enum class DiscoveryMode { Multicast, Broadcast };

std::string_view to_string(DiscoveryMode mode);
std::optional<DiscoveryMode> parse_discovery_mode(std::string_view text);

struct InteractionElements {
  std::optional<ServiceTag> requested_service;
  std::optional<int> quality_req;
  std::optional<SimTime> reply_by;
  std::optional<double> offered_cost;
  std::optional<SimDuration> offered_duration;
  std::optional<int> offered_quality;
  std::optional<RefusalReason> refusal_reason;

  bool operator==(const InteractionElements&) const = default;
};

/// True when exactly the elements belonging to `type` are present.
bool elements_conform(MessageType type, const InteractionElements& elements);

struct Frame {
  MessageType msg_type = MessageType::NotUnderstood;
  std::string sender;
  std::string receiver;  // aas_id, or the topic for one-to-many frames
  std::string conversation_id;
  std::uint64_t message_seq = 0;
  SimTime sent_at;
  InteractionElements elements;

  bool operator==(const Frame&) const = default;
};

/// A frame together with the topic it is published on.
struct Outgoing {
  std::string topic;
  Frame frame;
};

std::string topic_for_cfp(const ServiceTag& service, DiscoveryMode mode);

/// "message/<aas_id>"; throws std::invalid_argument for an empty id.
std::string topic_for_reply(std::string_view aas_id);

/// One trace line: `t=<millis> <topic> <msg_type> <sender>-><receiver> conv=<id> <elements>`.
std::string format_trace_line(const Frame& frame, std::string_view topic);

/// Conversation ids are "<requester aas_id>/<round>".
std::string make_conversation_id(std::string_view requester, int round);
bool conversation_owned_by(std::string_view conversation, std::string_view requester);

// ---------------------------------------------------------------------------
// Requester state machine

struct OfferSeen {
  std::string provider;
  double cost = 0.0;
  SimDuration duration;
  int quality = 0;
  std::uint64_t arrival = 0;  // order of arrival within the round
};

namespace sr {
struct Idle {};
struct Collecting {
  std::string conversation;
  SimTime deadline;
  std::vector<OfferSeen> offers;
  int busy_refusals = 0;
  int permanent_refusals = 0;  // quality mismatch or not understood
  std::uint64_t arrivals = 0;
};
struct Evaluating {
  Collecting round;
};
struct AwaitingConforming {
  std::string conversation;
  std::string provider;
  double cost = 0.0;
};
struct Succeeded {
  std::string provider;
  double cost = 0.0;
};
struct GaveUp {};
}  // namespace sr

using SrState = std::variant<sr::Idle, sr::Collecting, sr::Evaluating, sr::AwaitingConforming,
                             sr::Succeeded, sr::GaveUp>;

bool is_terminal(const SrState& state);
std::string_view state_name(const SrState& state);

struct RoundOutcome {
  int round = 0;
  int in_budget_offers = 0;
  int over_budget_offers = 0;
  int busy_refusals = 0;
  int permanent_refusals = 0;
  bool provider_error = false;  // accepted provider answered with Error
};

enum class RoundDecision { Retry, GiveUp };

using GiveUpRule = std::function<RoundDecision(const RoundOutcome&)>;

/// Index of the offer to accept, or nothing when no offer is acceptable.
using OfferSelector = std::function<std::optional<std::size_t>(std::span<const OfferSeen>, double budget)>;

namespace sr_input {
struct StartRound {
  int round = 1;
};
struct CollectionDeadline {};
struct Received {
  const Frame& frame;
};
}  // namespace sr_input

using SrInput = std::variant<sr_input::StartRound, sr_input::CollectionDeadline, sr_input::Received>;

struct SrStep {
  SrState next;
  std::vector<Outgoing> out;
  std::optional<RoundDecision> decision;  // set when a round closed without a deal
};

/// Everything the requester machine reads but never changes.
struct SrContext {
  const RequesterProfile& profile;
  DiscoveryMode mode = DiscoveryMode::Multicast;
  const GiveUpRule& give_up_rule;
  const OfferSelector& select_offer;
};

/// Frames in `out` carry message_seq 0; the owning agent stamps sequence numbers.
SrStep sr_transition(const SrContext& ctx, const SrState& state, const SrInput& input, SimTime now);

// ---------------------------------------------------------------------------
// Provider state machine

namespace sp {
struct Listening {};
struct OfferPending {
  std::string conversation;
  std::string requester;
  SimTime binding_until;
};
struct Working {
  std::string conversation;
  std::string requester;
  SimTime until;
};
}  // namespace sp

using SpState = std::variant<sp::Listening, sp::OfferPending, sp::Working>;

std::string_view state_name(const SpState& state);

namespace sp_input {
struct Received {
  const Frame& frame;
};
struct WorkDone {};
}  // namespace sp_input

using SpInput = std::variant<sp_input::Received, sp_input::WorkDone>;

struct SpStep {
  SpState next;
  ProviderTiming timing;
  std::vector<Outgoing> out;
  std::optional<SimTime> work_timer;  // set when the provider starts a job
};

SpStep sp_transition(const SpState& state, const ProviderProfile& profile, const ProviderTiming& timing,
                     const SpInput& input, SimTime now);

}  // namespace bidsim
