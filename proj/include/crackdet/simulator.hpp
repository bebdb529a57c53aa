#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crackdet/protocol.hpp"

namespace crackdet {

struct ChannelConfig {
    double drop_probability = 0.0;
    double delay_min_s = 0.01;
    double delay_max_s = 0.05;
    std::uint64_t seed = 0;
};

struct TrajectoryPoint {
    double time_s = 0.0;
    VehiclePose pose;
};

/// Scripted simulation input: vehicle path, RSU placement, detection timing.
struct Scenario {
    std::vector<TrajectoryPoint> trajectory;  // linearly interpolated
    GeoPoint rsu_position;
    double rsu_range_m = 150.0;
    double detection_latency_s = 1.0;          // StartDetection -> DetectionComplete
    DetectionResultPayload detection_result;   // injected as detection-complete
    double horizon_s = 60.0;
    double tick_period_s = 0.1;
};

struct TranscriptEntry {
    double time_s = 0.0;
    std::string actor;   // "rsu" | "obu" | "channel"
    std::string event;   // "send" | "recv" | "drop" | "phase" | "timeout"
    std::string detail;
};

struct SimulationResult {
    std::vector<TranscriptEntry> transcript;
    RsuPhase rsu_final = RsuPhase::Scanning;
    ObuPhase obu_final = ObuPhase::Listening;
    bool timed_out = false;
};

/// Deterministic discrete-event run of one RSU/OBU exchange over the lossy
/// channel. Presence beacons model physical proximity detection and bypass
/// the channel; all data messages are subject to drop and delay.
SimulationResult simulate(const RsuConfig& rsu_cfg, const ObuConfig& obu_cfg,
                          const ChannelConfig& channel, const Scenario& scenario);

/// Newline-delimited transcript rendering, stable across runs.
std::string format_transcript(const SimulationResult& result);

}  // namespace crackdet
