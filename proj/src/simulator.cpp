#include "crackdet/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <queue>
#include <random>

#include "crackdet/geodesy.hpp"

namespace crackdet {

namespace {

struct SimEvent {
    double time = 0.0;
    std::uint64_t order = 0;  // stable tie-break
    enum class Type { RsuTick, ObuTick, DeliverToRsu, DeliverToObu, StartDetection,
                      DetectionComplete } type = Type::RsuTick;
    ProtocolMessage msg;
};

struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.order > b.order;
    }
};

VehiclePose pose_at(const Scenario& s, double t) {
    const auto& tr = s.trajectory;
    if (tr.empty()) return {};
    if (t <= tr.front().time_s) return tr.front().pose;
    if (t >= tr.back().time_s) return tr.back().pose;
    for (std::size_t i = 1; i < tr.size(); ++i) {
        if (t > tr[i].time_s) continue;
        const double a = (t - tr[i - 1].time_s) / (tr[i].time_s - tr[i - 1].time_s);
        const VehiclePose& p0 = tr[i - 1].pose;
        const VehiclePose& p1 = tr[i].pose;
        VehiclePose p;
        p.fix.lat_deg = p0.fix.lat_deg + a * (p1.fix.lat_deg - p0.fix.lat_deg);
        p.fix.lon_deg = p0.fix.lon_deg + a * (p1.fix.lon_deg - p0.fix.lon_deg);
        p.fix.alt_m = p0.fix.alt_m + a * (p1.fix.alt_m - p0.fix.alt_m);
        p.heading_deg = p0.heading_deg + a * (p1.heading_deg - p0.heading_deg);
        p.speed_mps = p0.speed_mps + a * (p1.speed_mps - p0.speed_mps);
        return p;
    }
    return tr.back().pose;
}

bool in_rsu_range(const Scenario& s, const VehiclePose& pose) {
    const EnuVector d = geodetic_to_enu(pose.fix, s.rsu_position);
    return std::hypot(d.east_m, d.north_m) <= s.rsu_range_m;
}

std::string describe(const ProtocolMessage& m) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s seq=%u from=%u", to_string(m.kind), m.seq,
                  m.sender_id);
    return buf;
}

}  // namespace

SimulationResult simulate(const RsuConfig& rsu_cfg, const ObuConfig& obu_cfg,
                          const ChannelConfig& channel, const Scenario& scenario) {
    SimulationResult result;
    RsuState rsu;
    ObuState obu;
    std::mt19937_64 rng(channel.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue;
    std::uint64_t order = 0;

    const auto log = [&](double t, const char* actor, const char* event,
                         std::string detail) {
        result.transcript.push_back({t, actor, event, std::move(detail)});
    };

    const auto push = [&](double t, SimEvent::Type type, ProtocolMessage msg = {}) {
        queue.push({t, order++, type, std::move(msg)});
    };

    // Every send crosses the channel except Presence beacons, which model
    // the RSU physically detecting the vehicle in range.
    const auto send = [&](double now, bool from_rsu, const ProtocolMessage& m) {
        log(now, from_rsu ? "rsu" : "obu", "send", describe(m));
        if (m.kind != MessageKind::Presence && unit(rng) < channel.drop_probability) {
            log(now, "channel", "drop", describe(m));
            return;
        }
        const double delay =
            m.kind == MessageKind::Presence
                ? channel.delay_min_s
                : channel.delay_min_s + unit(rng) * (channel.delay_max_s - channel.delay_min_s);
        push(now + delay, from_rsu ? SimEvent::Type::DeliverToObu : SimEvent::Type::DeliverToRsu,
             m);
    };

    const auto flush = [&](double now, bool from_rsu, const StepOutput& out) {
        for (const ProtocolMessage& m : out.outgoing) send(now, from_rsu, m);
    };

    auto track_phases = [&, last_rsu = RsuPhase::Scanning,
                         last_obu = ObuPhase::Listening](double now) mutable {
        if (rsu.phase != last_rsu) {
            log(now, "rsu", "phase", to_string(rsu.phase));
            last_rsu = rsu.phase;
        }
        if (obu.phase != last_obu) {
            log(now, "obu", "phase", to_string(obu.phase));
            last_obu = obu.phase;
        }
    };

    for (double t = 0.0; t <= scenario.horizon_s + 1e-9; t += scenario.tick_period_s) {
        push(t, SimEvent::Type::RsuTick);
        push(t, SimEvent::Type::ObuTick);
    }

    bool detection_scheduled = false;
    const auto terminal = [&] {
        if (rsu.phase == RsuPhase::Failed) return true;
        return rsu.phase == RsuPhase::Complete && obu.phase == ObuPhase::Done;
    };

    double now = 0.0;
    while (!queue.empty()) {
        const SimEvent ev = queue.top();
        queue.pop();
        now = ev.time;
        if (now > scenario.horizon_s) break;

        switch (ev.type) {
            case SimEvent::Type::RsuTick:
                flush(now, true, rsu_step(rsu, {now, std::nullopt}, rsu_cfg));
                break;
            case SimEvent::Type::ObuTick: {
                ObuEvent e;
                e.kind = ObuEvent::Kind::Tick;
                e.now = now;
                e.pose = pose_at(scenario, now);
                e.in_range = in_rsu_range(scenario, *e.pose);
                flush(now, false, obu_step(obu, e, obu_cfg));
                break;
            }
            case SimEvent::Type::DeliverToRsu:
                log(now, "rsu", "recv", describe(ev.msg));
                flush(now, true, rsu_step(rsu, {now, ev.msg}, rsu_cfg));
                break;
            case SimEvent::Type::DeliverToObu: {
                log(now, "obu", "recv", describe(ev.msg));
                ObuEvent e;
                e.kind = ObuEvent::Kind::Message;
                e.now = now;
                e.msg = ev.msg;
                flush(now, false, obu_step(obu, e, obu_cfg));
                if (obu.phase == ObuPhase::TaskAssigned && !detection_scheduled) {
                    detection_scheduled = true;
                    push(now, SimEvent::Type::StartDetection);
                    push(now + scenario.detection_latency_s, SimEvent::Type::DetectionComplete);
                }
                break;
            }
            case SimEvent::Type::StartDetection: {
                ObuEvent e;
                e.kind = ObuEvent::Kind::StartDetection;
                e.now = now;
                flush(now, false, obu_step(obu, e, obu_cfg));
                break;
            }
            case SimEvent::Type::DetectionComplete: {
                ObuEvent e;
                e.kind = ObuEvent::Kind::DetectionComplete;
                e.now = now;
                e.result = scenario.detection_result;
                flush(now, false, obu_step(obu, e, obu_cfg));
                break;
            }
        }
        track_phases(now);
        if (terminal()) break;
    }

    result.rsu_final = rsu.phase;
    result.obu_final = obu.phase;
    result.timed_out = !terminal();
    if (result.timed_out) log(now, "channel", "timeout", "horizon exceeded");
    return result;
}

std::string format_transcript(const SimulationResult& result) {
    std::string out;
    char line[256];
    for (const TranscriptEntry& e : result.transcript) {
        std::snprintf(line, sizeof(line), "%.6f %s %s %s\n", e.time_s, e.actor.c_str(),
                      e.event.c_str(), e.detail.c_str());
        out += line;
    }
    char tail[128];
    std::snprintf(tail, sizeof(tail), "final rsu=%s obu=%s timed_out=%d\n",
                  to_string(result.rsu_final), to_string(result.obu_final),
                  result.timed_out ? 1 : 0);
    out += tail;
    return out;
}

}  // namespace crackdet
