#include "crackdet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "crackdet/errors.hpp"

namespace crackdet {

namespace {

using nlohmann::json;

json frame_to_json(const FrameRecord& f) {
    return json{{"type", "frame"},
                {"timestamp", f.timestamp},
                {"frame_id", f.frame_id},
                {"lat", f.vehicle_fix.lat_deg},
                {"lon", f.vehicle_fix.lon_deg},
                {"alt", f.vehicle_fix.alt_m},
                {"heading_deg", f.heading_deg},
                {"image_path", f.image_path}};
}

FrameRecord frame_from_json(const json& j) {
    FrameRecord f;
    f.timestamp = j.at("timestamp").get<double>();
    f.frame_id = j.value("frame_id", "");
    f.vehicle_fix = {j.at("lat").get<double>(), j.at("lon").get<double>(),
                     j.value("alt", 0.0)};
    f.heading_deg = j.at("heading_deg").get<double>();
    f.image_path = j.value("image_path", "");
    return f;
}

}  // namespace

SessionLog sync_frames(const std::vector<TimedImage>& images,
                       const std::vector<GpsSample>& gps, double max_skew_s,
                       SyncStats* stats) {
    if (images.empty() || gps.empty())
        throw SyncError("empty image or gps stream");

    SessionLog log;
    SyncStats local;
    for (const TimedImage& img : images) {
        // gps is time-sorted; binary search for the nearest sample
        const auto it = std::lower_bound(
            gps.begin(), gps.end(), img.timestamp,
            [](const GpsSample& s, double t) { return s.timestamp < t; });
        const GpsSample* best = nullptr;
        if (it != gps.end()) best = &*it;
        if (it != gps.begin()) {
            const GpsSample* prev = &*(it - 1);
            if (!best || std::abs(prev->timestamp - img.timestamp) <=
                             std::abs(best->timestamp - img.timestamp))
                best = prev;
        }
        if (!best || std::abs(best->timestamp - img.timestamp) > max_skew_s) {
            ++local.dropped;
            continue;
        }
        FrameRecord f;
        f.timestamp = img.timestamp;
        f.frame_id = img.frame_id;
        f.image_path = img.path;
        f.vehicle_fix = best->fix;
        f.heading_deg = best->heading_deg;
        log.frames.push_back(std::move(f));
        ++local.paired;
    }
    if (stats) *stats = local;
    if (log.frames.empty())
        throw SyncError("no image could be paired with a gps sample");
    return log;
}

SessionLog load_session(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open session log: " + path);

    SessionLog log;
    bool saw_header = false;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        const std::string type = j.value("type", "");
        if (type == "session") {
            saw_header = true;
            log.camera_model_path = j.value("camera_model", "");
            log.task.crack_id = j.at("crack_id").get<std::uint32_t>();
            log.task.position = {j.at("crack_lat").get<double>(),
                                 j.at("crack_lon").get<double>(),
                                 j.value("crack_alt", 0.0)};
            log.task.roi_w = j.value("roi_w", 512);
            log.task.roi_h = j.value("roi_h", 512);
        } else if (type == "frame") {
            log.frames.push_back(frame_from_json(j));
        }
    }
    if (!saw_header) throw ConfigError("session log has no session header record");
    for (std::size_t i = 1; i < log.frames.size(); ++i)
        if (log.frames[i].timestamp < log.frames[i - 1].timestamp)
            throw ConfigError("session log timestamps must be nondecreasing");
    return log;
}

void save_session(const SessionLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write session log: " + path);
    json header{{"type", "session"},
                {"camera_model", log.camera_model_path},
                {"crack_id", log.task.crack_id},
                {"crack_lat", log.task.position.lat_deg},
                {"crack_lon", log.task.position.lon_deg},
                {"crack_alt", log.task.position.alt_m},
                {"roi_w", log.task.roi_w},
                {"roi_h", log.task.roi_h}};
    out << header.dump() << "\n";
    for (const FrameRecord& f : log.frames) out << frame_to_json(f).dump() << "\n";
}

std::vector<Stage2Frame> run_stage2(const SessionLog& log, const CameraModel& model,
                                    double threshold_ppm) {
    std::vector<Stage2Frame> retained;
    for (const FrameRecord& f : log.frames) {
        const VehicleVector p_rel = crack_relative_to_lens(f, log.task.position, model);
        const GateResult gate = resolution_gate(p_rel, model, threshold_ppm);
        if (!gate.pass) continue;
        const PixelPoint px =
            project_pinhole(vehicle_to_camera(p_rel, model), model.intrinsics);
        if (px.u < 0 || px.u >= model.intrinsics.i_w || px.v < 0 ||
            px.v >= model.intrinsics.i_h)
            continue;
        Stage2Frame s;
        s.frame = f;
        s.frame.pixels_per_meter = gate.measured_ppm;
        s.frame.crack_distance_m = p_rel.vec().norm();
        s.window = compute_crop_window(px, log.task.roi_w, log.task.roi_h,
                                       model.intrinsics.i_w, model.intrinsics.i_h);
        retained.push_back(std::move(s));
    }
    return retained;
}

std::uint64_t mask_digest(const BinaryMask& mask) {
    std::uint64_t h = 14695981039346656037ull;
    const auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(mask.width));
    mix(static_cast<std::uint64_t>(mask.height));
    for (std::uint8_t b : mask.bits) mix(b);
    return h;
}

namespace {

BinaryMask run_detector(const GrayImage& crop, const CropWindow& window,
                        const DetectorConfig& det, const std::string& frame_id) {
    BinaryMask mask;
    if (det.choice == DetectorChoice::BlackHat) {
        mask = blackhat_mask(crop, det.blackhat_kernel, det.blackhat_threshold);
    } else {
        const std::filesystem::path p =
            std::filesystem::path(det.mask_dir) / (frame_id + "_mask.png");
        mask = load_mask(p.string(), det.mask_threshold);
        if (mask.width != window.b_w || mask.height != window.b_h)
            throw ConfigError("external mask size does not match crop: " + p.string());
    }
    mask.origin_u = window.u_min;
    mask.origin_v = window.v_min;
    return mask;
}

std::optional<double> frame_length(const Stage2Frame& s, const CameraModel& model,
                                   const DetectorConfig& det) {
    try {
        const GrayImage full = load_gray(s.frame.image_path);
        const GrayImage crop = crop_image(full, s.window.u_min, s.window.v_min,
                                          s.window.b_w, s.window.b_h);
        const BinaryMask mask = run_detector(crop, s.window, det, s.frame.frame_id);
        const GroundPoints pts = mask_to_ground(mask, model);
        if (pts.points.empty()) return std::nullopt;
        return estimate_length(select_edge_corners(pts.points)).length_m;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

DetectionReport run_stage3(const std::vector<Stage2Frame>& retained,
                           const SessionLog& log, const CameraModel& model,
                           const DetectorConfig& detector, double threshold_ppm,
                           const std::string& output_dir) {
    if (retained.empty())
        throw std::domain_error("run_stage3: no retained frames");

    std::vector<FrameRecord> frames;
    frames.reserve(retained.size());
    for (const Stage2Frame& s : retained) frames.push_back(s.frame);
    const std::size_t best =
        select_best_frame(frames, model, log.task.position, threshold_ppm);
    const Stage2Frame& sel = retained[best];

    DetectionReport report;
    report.crack_id = log.task.crack_id;
    report.selected_frame_id = sel.frame.frame_id;
    report.window = sel.window;

    std::filesystem::create_directories(output_dir);
    const GrayImage full = load_gray(sel.frame.image_path);
    const GrayImage crop = crop_image(full, sel.window.u_min, sel.window.v_min,
                                      sel.window.b_w, sel.window.b_h);
    const std::filesystem::path crop_path =
        std::filesystem::path(output_dir) / (sel.frame.frame_id + "_crop.png");
    save_gray(crop, crop_path.string());

    BinaryMask mask = run_detector(crop, sel.window, detector, sel.frame.frame_id);
    const std::filesystem::path mask_path =
        std::filesystem::path(output_dir) / (sel.frame.frame_id + "_mask.png");
    save_mask(mask, mask_path.string());
    report.mask_path = mask_path.string();
    report.mask_digest = mask_digest(mask);

    // Sidecar record re-anchors crop coordinates in the full frame.
    {
        nlohmann::json side{{"frame_id", sel.frame.frame_id},
                            {"u_min", sel.window.u_min},
                            {"v_min", sel.window.v_min},
                            {"b_w", sel.window.b_w},
                            {"b_h", sel.window.b_h}};
        std::ofstream out(std::filesystem::path(output_dir) /
                          (sel.frame.frame_id + "_crop.json"));
        out << side.dump(2) << "\n";
    }

    const GroundPoints pts = mask_to_ground(mask, model);
    report.skipped_pixels = pts.skipped;
    if (!pts.points.empty()) {
        const CrackEdges edges = select_edge_corners(pts.points);
        report.corr = edges.corr;
        try {
            LengthEstimate est = estimate_length(edges);
            est.frame_id = sel.frame.frame_id;
            report.length = est;
        } catch (const InsufficientExtentError&) {
            // corr vector is still reported and transmitted
        }
    }

    for (const Stage2Frame& s : retained) {
        DetectionReport::FrameDiag d;
        d.frame_id = s.frame.frame_id;
        d.pixels_per_meter = s.frame.pixels_per_meter;
        d.length_m = frame_length(s, model, detector);
        report.diagnostics.push_back(std::move(d));
    }
    return report;
}

void save_report(const DetectionReport& report, const std::string& path) {
    json j{{"crack_id", report.crack_id},
           {"selected_frame_id", report.selected_frame_id},
           {"window", {{"u_min", report.window.u_min},
                       {"v_min", report.window.v_min},
                       {"u_max", report.window.u_max},
                       {"v_max", report.window.v_max}}},
           {"mask_path", report.mask_path},
           {"mask_digest", report.mask_digest},
           {"corr", report.corr},
           {"skipped_pixels", report.skipped_pixels}};
    if (report.length) {
        j["length_m"] = report.length->length_m;
        j["endpoints"] = {{report.length->endpoints.first.x_m,
                           report.length->endpoints.first.y_m,
                           report.length->endpoints.first.z_m},
                          {report.length->endpoints.second.x_m,
                           report.length->endpoints.second.y_m,
                           report.length->endpoints.second.z_m}};
    }
    json diags = json::array();
    for (const auto& d : report.diagnostics) {
        json e{{"frame_id", d.frame_id}, {"pixels_per_meter", d.pixels_per_meter}};
        if (d.length_m) e["length_m"] = *d.length_m;
        diags.push_back(std::move(e));
    }
    j["diagnostics"] = diags;

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write report: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace crackdet
