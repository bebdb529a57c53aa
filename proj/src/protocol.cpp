#include "crackdet/protocol.hpp"

#include <cstring>

#include "crackdet/errors.hpp"

namespace crackdet {

namespace {

constexpr std::uint16_t kMagic = 0xC2D7;
constexpr std::uint8_t kVersion = 1;
constexpr std::size_t kHeaderSize = 16;

struct Writer {
    std::vector<std::uint8_t> buf;

    void u8(std::uint8_t v) { buf.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }
};

struct Reader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw DecodeError("truncated message", pos);
    }
    std::uint8_t u8() {
        need(1);
        return buf[pos++];
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = 0;
        for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(buf[pos++]) << (8 * i);
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos++]) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
};

void write_payload(Writer& w, const ProtocolMessage& msg) {
    switch (msg.kind) {
        case MessageKind::Discover:
        case MessageKind::Presence:
            break;
        case MessageKind::DetectionRequest: {
            const auto& p = std::get<DetectionRequestPayload>(msg.payload);
            w.u32(p.crack_id);
            w.f64(p.crack.lat_deg);
            w.f64(p.crack.lon_deg);
            w.f64(p.crack.alt_m);
            w.u16(p.roi_w);
            w.u16(p.roi_h);
            w.f64(p.deadline_s);
            break;
        }
        case MessageKind::RequestAck:
            w.u32(std::get<RequestAckPayload>(msg.payload).crack_id);
            break;
        case MessageKind::VehicleStatus: {
            const auto& p = std::get<VehicleStatusPayload>(msg.payload);
            w.f64(p.fix.lat_deg);
            w.f64(p.fix.lon_deg);
            w.f64(p.fix.alt_m);
            w.f64(p.heading_deg);
            w.f64(p.speed_mps);
            break;
        }
        case MessageKind::DetectionResult: {
            const auto& p = std::get<DetectionResultPayload>(msg.payload);
            w.u32(p.crack_id);
            w.u8(p.has_length ? 1 : 0);
            w.f64(p.length_m);
            for (std::uint8_t c : p.corr) w.u8(c);
            w.u64(p.mask_digest);
            break;
        }
        case MessageKind::ResultAck:
            w.u32(std::get<ResultAckPayload>(msg.payload).crack_id);
            break;
    }
}

MessagePayload read_payload(Reader& r, MessageKind kind) {
    switch (kind) {
        case MessageKind::Discover:
        case MessageKind::Presence:
            return std::monostate{};
        case MessageKind::DetectionRequest: {
            DetectionRequestPayload p;
            p.crack_id = r.u32();
            p.crack.lat_deg = r.f64();
            p.crack.lon_deg = r.f64();
            p.crack.alt_m = r.f64();
            p.roi_w = r.u16();
            p.roi_h = r.u16();
            p.deadline_s = r.f64();
            return p;
        }
        case MessageKind::RequestAck:
            return RequestAckPayload{r.u32()};
        case MessageKind::VehicleStatus: {
            VehicleStatusPayload p;
            p.fix.lat_deg = r.f64();
            p.fix.lon_deg = r.f64();
            p.fix.alt_m = r.f64();
            p.heading_deg = r.f64();
            p.speed_mps = r.f64();
            return p;
        }
        case MessageKind::DetectionResult: {
            DetectionResultPayload p;
            p.crack_id = r.u32();
            p.has_length = r.u8() != 0;
            p.length_m = r.f64();
            for (std::uint8_t& c : p.corr) c = r.u8();
            p.mask_digest = r.u64();
            return p;
        }
        case MessageKind::ResultAck:
            return ResultAckPayload{r.u32()};
    }
    throw DecodeError("unknown message kind", 3);
}

}  // namespace

std::vector<std::uint8_t> encode(const ProtocolMessage& msg) {
    Writer payload;
    write_payload(payload, msg);

    Writer w;
    w.u16(kMagic);
    w.u8(kVersion);
    w.u8(static_cast<std::uint8_t>(msg.kind));
    w.u32(msg.seq);
    w.u32(msg.sender_id);
    w.u32(static_cast<std::uint32_t>(payload.buf.size()));
    w.buf.insert(w.buf.end(), payload.buf.begin(), payload.buf.end());
    return w.buf;
}

ProtocolMessage decode(const std::vector<std::uint8_t>& bytes) {
    Reader r{bytes};
    if (r.u16() != kMagic) throw DecodeError("bad magic", 0);
    if (r.u8() != kVersion) throw DecodeError("unsupported version", 2);
    const std::uint8_t kind_byte = r.u8();
    if (kind_byte > static_cast<std::uint8_t>(MessageKind::ResultAck))
        throw DecodeError("unknown message kind", 3);

    ProtocolMessage msg;
    msg.kind = static_cast<MessageKind>(kind_byte);
    msg.seq = r.u32();
    msg.sender_id = r.u32();
    const std::uint32_t len = r.u32();
    if (kHeaderSize + len != bytes.size())
        throw DecodeError("payload length mismatch", 12);
    msg.payload = read_payload(r, msg.kind);
    if (r.pos != bytes.size()) throw DecodeError("trailing bytes", r.pos);
    return msg;
}

// ---------------------------------------------------------------------------

namespace {

ProtocolMessage make(MessageKind kind, std::uint32_t& seq, std::uint32_t sender,
                     MessagePayload payload = std::monostate{}) {
    ProtocolMessage m;
    m.kind = kind;
    m.seq = seq++;
    m.sender_id = sender;
    m.payload = std::move(payload);
    return m;
}

}  // namespace

StepOutput rsu_step(RsuState& state, const RsuEvent& event, const RsuConfig& cfg) {
    StepOutput out;
    const double now = event.now;

    const auto send_request = [&] {
        out.outgoing.push_back(make(MessageKind::DetectionRequest, state.next_seq,
                                    cfg.sender_id, cfg.task));
        state.timer_deadline = now + cfg.request_timeout_s;
    };
    const auto resend_result_wait = [&] {
        // Re-issue the request so a lost DetectionResult gets triggered again.
        out.outgoing.push_back(make(MessageKind::DetectionRequest, state.next_seq,
                                    cfg.sender_id, cfg.task));
        state.timer_deadline = now + cfg.result_timeout_s;
    };

    if (event.msg) {
        const ProtocolMessage& msg = *event.msg;
        switch (state.phase) {
            case RsuPhase::Scanning:
                if (msg.kind == MessageKind::Presence) {
                    state.phase = RsuPhase::AwaitRequestAck;
                    state.pending_crack_id = cfg.task.crack_id;
                    state.retry_count = 0;
                    send_request();
                }
                break;
            case RsuPhase::AwaitRequestAck:
                if (msg.kind == MessageKind::RequestAck &&
                    std::get<RequestAckPayload>(msg.payload).crack_id == state.pending_crack_id) {
                    state.phase = RsuPhase::AwaitResult;
                    state.retry_count = 0;
                    state.timer_deadline = now + cfg.result_timeout_s;
                }
                break;
            case RsuPhase::AwaitResult:
                if (msg.kind == MessageKind::DetectionResult &&
                    std::get<DetectionResultPayload>(msg.payload).crack_id ==
                        state.pending_crack_id) {
                    state.result = std::get<DetectionResultPayload>(msg.payload);
                    state.phase = RsuPhase::Complete;
                    state.timer_deadline.reset();
                    out.outgoing.push_back(make(MessageKind::ResultAck, state.next_seq,
                                                cfg.sender_id,
                                                ResultAckPayload{state.pending_crack_id}));
                }
                break;
            case RsuPhase::Complete:
                // Re-ack duplicate results so the OBU can finish.
                if (msg.kind == MessageKind::DetectionResult &&
                    std::get<DetectionResultPayload>(msg.payload).crack_id ==
                        state.pending_crack_id)
                    out.outgoing.push_back(make(MessageKind::ResultAck, state.next_seq,
                                                cfg.sender_id,
                                                ResultAckPayload{state.pending_crack_id}));
                break;
            case RsuPhase::Failed:
                break;  // unexpected messages are ignored
        }
        return out;
    }

    // Tick: timer handling.
    if (state.timer_deadline && now >= *state.timer_deadline) {
        if (state.retry_count >= cfg.max_retries) {
            state.phase = RsuPhase::Failed;
            state.timer_deadline.reset();
            return out;
        }
        ++state.retry_count;
        if (state.phase == RsuPhase::AwaitRequestAck) send_request();
        else if (state.phase == RsuPhase::AwaitResult) resend_result_wait();
    }
    return out;
}

StepOutput obu_step(ObuState& state, const ObuEvent& event, const ObuConfig& cfg) {
    StepOutput out;
    const double now = event.now;

    const auto send_result = [&] {
        out.outgoing.push_back(make(MessageKind::DetectionResult, state.next_seq,
                                    cfg.sender_id, *state.result_buffer));
        state.retransmit_deadline = now + cfg.result_retransmit_s;
    };

    switch (event.kind) {
        case ObuEvent::Kind::Message: {
            const ProtocolMessage& msg = *event.msg;
            if (msg.kind == MessageKind::DetectionRequest) {
                const auto& req = std::get<DetectionRequestPayload>(msg.payload);
                if (state.phase == ObuPhase::Listening) {
                    state.assigned = req;
                    state.phase = ObuPhase::TaskAssigned;
                    out.outgoing.push_back(make(MessageKind::RequestAck, state.next_seq,
                                                cfg.sender_id, RequestAckPayload{req.crack_id}));
                } else if (state.assigned && state.assigned->crack_id == req.crack_id) {
                    // Duplicate request: idempotent re-ack, and if the result is
                    // already out, resend it (the RSU may have lost it).
                    out.outgoing.push_back(make(MessageKind::RequestAck, state.next_seq,
                                                cfg.sender_id, RequestAckPayload{req.crack_id}));
                    if (state.phase == ObuPhase::Reporting) send_result();
                }
            } else if (msg.kind == MessageKind::ResultAck && state.phase == ObuPhase::Reporting &&
                       std::get<ResultAckPayload>(msg.payload).crack_id ==
                           state.result_buffer->crack_id) {
                state.phase = ObuPhase::Done;
                state.retransmit_deadline.reset();
            }
            break;
        }
        case ObuEvent::Kind::StartDetection:
            if (state.phase == ObuPhase::TaskAssigned) state.phase = ObuPhase::Detecting;
            break;
        case ObuEvent::Kind::DetectionComplete:
            if (!state.assigned)
                throw ProtocolViolationError("detection-complete without an assigned task");
            if (state.phase == ObuPhase::TaskAssigned || state.phase == ObuPhase::Detecting) {
                state.result_buffer = *event.result;
                state.phase = ObuPhase::Reporting;
                send_result();
            }
            break;
        case ObuEvent::Kind::Tick: {
            if (event.pose) state.pose = *event.pose;
            state.in_range = event.in_range;

            if (state.phase == ObuPhase::Listening && state.in_range &&
                now - state.last_presence >= cfg.presence_period_s) {
                state.last_presence = now;
                out.outgoing.push_back(make(MessageKind::Presence, state.next_seq,
                                            cfg.sender_id));
            }
            const bool active = state.phase == ObuPhase::TaskAssigned ||
                                state.phase == ObuPhase::Detecting ||
                                state.phase == ObuPhase::Reporting;
            if (active && now - state.last_status >= cfg.status_period_s) {
                state.last_status = now;
                out.outgoing.push_back(make(
                    MessageKind::VehicleStatus, state.next_seq, cfg.sender_id,
                    VehicleStatusPayload{state.pose.fix, state.pose.heading_deg,
                                         state.pose.speed_mps}));
            }
            if (state.phase == ObuPhase::Reporting && state.retransmit_deadline &&
                now >= *state.retransmit_deadline)
                send_result();
            break;
        }
    }
    return out;
}

const char* to_string(MessageKind k) {
    switch (k) {
        case MessageKind::Discover: return "Discover";
        case MessageKind::Presence: return "Presence";
        case MessageKind::DetectionRequest: return "DetectionRequest";
        case MessageKind::RequestAck: return "RequestAck";
        case MessageKind::VehicleStatus: return "VehicleStatus";
        case MessageKind::DetectionResult: return "DetectionResult";
        case MessageKind::ResultAck: return "ResultAck";
    }
    return "?";
}

const char* to_string(RsuPhase p) {
    switch (p) {
        case RsuPhase::Scanning: return "Scanning";
        case RsuPhase::AwaitRequestAck: return "AwaitRequestAck";
        case RsuPhase::AwaitResult: return "AwaitResult";
        case RsuPhase::Complete: return "Complete";
        case RsuPhase::Failed: return "Failed";
    }
    return "?";
}

const char* to_string(ObuPhase p) {
    switch (p) {
        case ObuPhase::Listening: return "Listening";
        case ObuPhase::TaskAssigned: return "TaskAssigned";
        case ObuPhase::Detecting: return "Detecting";
        case ObuPhase::Reporting: return "Reporting";
        case ObuPhase::Done: return "Done";
    }
    return "?";
}

}  // namespace crackdet
