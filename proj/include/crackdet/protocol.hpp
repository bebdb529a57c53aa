#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crackdet/geodesy.hpp"

namespace crackdet {

enum class MessageKind : std::uint8_t {
    Discover = 0,
    Presence = 1,
    DetectionRequest = 2,
    RequestAck = 3,
    VehicleStatus = 4,
    DetectionResult = 5,
    ResultAck = 6,
};

struct DetectionRequestPayload {
    std::uint32_t crack_id = 0;
    GeoPoint crack;
    std::uint16_t roi_w = 512;
    std::uint16_t roi_h = 512;
    double deadline_s = 0.0;
    bool operator==(const DetectionRequestPayload&) const = default;
};

struct RequestAckPayload {
    std::uint32_t crack_id = 0;
    bool operator==(const RequestAckPayload&) const = default;
};

struct VehicleStatusPayload {
    GeoPoint fix;
    double heading_deg = 0.0;
    double speed_mps = 0.0;
    bool operator==(const VehicleStatusPayload&) const = default;
};

struct DetectionResultPayload {
    std::uint32_t crack_id = 0;
    bool has_length = false;
    double length_m = 0.0;
    std::array<std::uint8_t, 4> corr{0, 0, 0, 0};
    std::uint64_t mask_digest = 0;
    bool operator==(const DetectionResultPayload&) const = default;
};

struct ResultAckPayload {
    std::uint32_t crack_id = 0;
    bool operator==(const ResultAckPayload&) const = default;
};

using MessagePayload = std::variant<std::monostate, DetectionRequestPayload,
                                    RequestAckPayload, VehicleStatusPayload,
                                    DetectionResultPayload, ResultAckPayload>;

struct ProtocolMessage {
    MessageKind kind = MessageKind::Discover;
    std::uint32_t seq = 0;
    std::uint32_t sender_id = 0;
    MessagePayload payload;
    bool operator==(const ProtocolMessage&) const = default;
};

/// Little-endian fixed-header wire codec (magic, version, kind, seq,
/// sender_id, payload length, payload).
std::vector<std::uint8_t> encode(const ProtocolMessage& msg);
/// Throws DecodeError (with byte offset) on malformed input.
ProtocolMessage decode(const std::vector<std::uint8_t>& bytes);

// ---------------------------------------------------------------------------
// RSU state machine

enum class RsuPhase { Scanning, AwaitRequestAck, AwaitResult, Complete, Failed };

struct RsuConfig {
    std::uint32_t sender_id = 1;
    DetectionRequestPayload task;
    double request_timeout_s = 0.5;
    double result_timeout_s = 2.0;
    int max_retries = 5;
};

struct RsuState {
    RsuPhase phase = RsuPhase::Scanning;
    std::uint32_t pending_crack_id = 0;
    int retry_count = 0;
    std::optional<double> timer_deadline;
    std::uint32_t next_seq = 0;
    std::optional<DetectionResultPayload> result;
};

struct RsuEvent {
    double now = 0.0;
    std::optional<ProtocolMessage> msg;  // tick when absent
};

struct StepOutput {
    std::vector<ProtocolMessage> outgoing;
};

StepOutput rsu_step(RsuState& state, const RsuEvent& event, const RsuConfig& cfg);

// ---------------------------------------------------------------------------
// OBU state machine

enum class ObuPhase { Listening, TaskAssigned, Detecting, Reporting, Done };

struct ObuConfig {
    std::uint32_t sender_id = 2;
    double presence_period_s = 0.5;
    double status_period_s = 1.0;
    double result_retransmit_s = 1.0;
};

struct VehiclePose {
    GeoPoint fix;
    double heading_deg = 0.0;
    double speed_mps = 0.0;
};

struct ObuState {
    ObuPhase phase = ObuPhase::Listening;
    std::optional<DetectionRequestPayload> assigned;
    std::optional<DetectionResultPayload> result_buffer;
    VehiclePose pose;
    bool in_range = false;
    double last_presence = -1e18;
    double last_status = -1e18;
    std::optional<double> retransmit_deadline;
    std::uint32_t next_seq = 0;
};

struct ObuEvent {
    enum class Kind { Tick, Message, StartDetection, DetectionComplete };
    Kind kind = Kind::Tick;
    double now = 0.0;
    std::optional<ProtocolMessage> msg;
    std::optional<VehiclePose> pose;  // carried by ticks
    bool in_range = false;
    std::optional<DetectionResultPayload> result;  // DetectionComplete
};

StepOutput obu_step(ObuState& state, const ObuEvent& event, const ObuConfig& cfg);

const char* to_string(MessageKind k);
const char* to_string(RsuPhase p);
const char* to_string(ObuPhase p);

}  // namespace crackdet
