// crackdet command-line front end: calibrate / simulate / process / eval /
// crop / length subcommands over the library. Exit codes: 0 success,
// 2 invalid input or configuration, 3 pipeline/runtime failure.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crackdet/calibration.hpp"
#include "crackdet/camera.hpp"
#include "crackdet/crack.hpp"
#include "crackdet/crop.hpp"
#include "crackdet/errors.hpp"
#include "crackdet/metrics.hpp"
#include "crackdet/pipeline.hpp"
#include "crackdet/protocol.hpp"
#include "crackdet/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace crackdet;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitPipeline = 3;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    return json::parse(in);
}

GeoPoint geo_from(const json& j) {
    return {j.at("lat").get<double>(), j.at("lon").get<double>(), j.value("alt", 0.0)};
}

/// Optional config file: camera model path, gate threshold, detector choice,
/// protocol timers. Command-line flags override config values.
struct CliConfig {
    std::string camera_model;
    double threshold_ppm = 60.0;
    std::string detector = "blackhat";
    DetectorConfig detector_cfg;
    RsuConfig rsu;
    ObuConfig obu;
    double max_skew_s = 0.1;
};

CliConfig read_config(const std::string& path) {
    CliConfig c;
    if (path.empty()) return c;
    const json j = load_json(path);
    c.camera_model = j.value("camera_model", "");
    c.threshold_ppm = j.value("threshold_ppm", c.threshold_ppm);
    c.detector = j.value("detector", c.detector);
    c.detector_cfg.blackhat_kernel = j.value("blackhat_kernel", 9);
    c.detector_cfg.blackhat_threshold = j.value("blackhat_threshold", 60);
    c.detector_cfg.mask_threshold = j.value("mask_threshold", 0.5);
    c.max_skew_s = j.value("max_skew_s", c.max_skew_s);
    if (j.contains("protocol")) {
        const json& p = j["protocol"];
        c.rsu.request_timeout_s = p.value("request_timeout_s", c.rsu.request_timeout_s);
        c.rsu.result_timeout_s = p.value("result_timeout_s", c.rsu.result_timeout_s);
        c.rsu.max_retries = p.value("max_retries", c.rsu.max_retries);
        c.obu.presence_period_s = p.value("presence_period_s", c.obu.presence_period_s);
        c.obu.status_period_s = p.value("status_period_s", c.obu.status_period_s);
        c.obu.result_retransmit_s = p.value("result_retransmit_s", c.obu.result_retransmit_s);
    }
    return c;
}

DetectorConfig parse_detector(const std::string& spec, DetectorConfig base) {
    if (spec == "blackhat") {
        base.choice = DetectorChoice::BlackHat;
    } else if (spec.rfind("maskdir:", 0) == 0) {
        base.choice = DetectorChoice::MaskDir;
        base.mask_dir = spec.substr(8);
        if (base.mask_dir.empty())
            throw ConfigError("maskdir: requires a directory path");
    } else {
        throw ConfigError("unknown detector '" + spec + "' (blackhat | maskdir:<path>)");
    }
    return base;
}

// ---------------------------------------------------------------------------

int cmd_calibrate(const std::string& samples_path, const std::string& camera_path,
                  double range_deg, double step_deg, const std::string& out_path) {
    const CameraModel model = load_camera_model(camera_path);
    const json j = load_json(samples_path);

    std::vector<CalibrationSample> samples;
    for (const json& e : j.at("samples")) {
        CalibrationSample s;
        s.image_id = e.value("image_id", "");
        s.vehicle_fix = geo_from(e.at("vehicle"));
        s.heading_deg = e.at("heading_deg").get<double>();
        s.target_fix = geo_from(e.at("target"));
        const json& b = e.at("gt_box");
        s.gt_box = {b.at("center_u").get<double>(), b.at("center_v").get<double>(),
                    b.at("width").get<double>(), b.at("height").get<double>()};
        samples.push_back(std::move(s));
    }

    const CalibrationResult r =
        calibrate_extrinsics(samples, model, {range_deg, step_deg});

    json out{{"yaw_deg", r.angles.yaw_deg},
             {"pitch_deg", r.angles.pitch_deg},
             {"roll_deg", r.angles.roll_deg},
             {"objective", r.objective}};
    json per = json::array();
    for (const SampleScore& s : r.per_sample)
        per.push_back({{"image_id", s.image_id},
                       {"feasible", s.feasible},
                       {"oog", s.score.oog},
                       {"aot", s.score.aot}});
    out["per_sample"] = per;

    std::printf("yaw=%.1f pitch=%.1f roll=%.1f (objective %.6f)\n", r.angles.yaw_deg,
                r.angles.pitch_deg, r.angles.roll_deg, r.objective);
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        os << out.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const CliConfig& cfg, const std::string& scenario_path, double drop,
                 double delay_min, double delay_max, std::uint64_t seed, int max_retries,
                 const std::string& out_path) {
    const json j = load_json(scenario_path);

    RsuConfig rsu = cfg.rsu;
    if (max_retries >= 0) rsu.max_retries = max_retries;
    rsu.task.crack_id = j.at("crack_id").get<std::uint32_t>();
    rsu.task.crack = geo_from(j.at("crack"));
    rsu.task.deadline_s = j.value("deadline_s", 0.0);

    Scenario scenario;
    scenario.rsu_position = geo_from(j.at("rsu_position"));
    scenario.rsu_range_m = j.value("rsu_range_m", scenario.rsu_range_m);
    scenario.detection_latency_s = j.value("detection_latency_s", scenario.detection_latency_s);
    scenario.horizon_s = j.value("horizon_s", scenario.horizon_s);
    scenario.tick_period_s = j.value("tick_period_s", scenario.tick_period_s);
    for (const json& p : j.at("trajectory")) {
        TrajectoryPoint t;
        t.time_s = p.at("time_s").get<double>();
        t.pose.fix = geo_from(p);
        t.pose.heading_deg = p.value("heading_deg", 0.0);
        t.pose.speed_mps = p.value("speed_mps", 0.0);
        scenario.trajectory.push_back(std::move(t));
    }
    if (j.contains("detection_result")) {
        const json& r = j["detection_result"];
        scenario.detection_result.crack_id = rsu.task.crack_id;
        scenario.detection_result.has_length = r.contains("length_m");
        scenario.detection_result.length_m = r.value("length_m", 0.0);
    } else {
        scenario.detection_result.crack_id = rsu.task.crack_id;
    }

    const SimulationResult result =
        simulate(rsu, cfg.obu, {drop, delay_min, delay_max, seed}, scenario);
    const std::string transcript = format_transcript(result);
    if (out_path.empty()) {
        std::fputs(transcript.c_str(), stdout);
    } else {
        std::ofstream os(out_path, std::ios::binary);
        os << transcript;
    }
    return result.rsu_final == RsuPhase::Failed || result.timed_out ? kExitPipeline
                                                                    : kExitOk;
}

int cmd_process(const CliConfig& cfg, const std::string& session_path,
                std::string camera_path, const std::string& detector_spec,
                double threshold_ppm, const std::string& out_dir) {
    SessionLog log = load_session(session_path);
    if (camera_path.empty()) camera_path = log.camera_model_path;
    if (camera_path.empty())
        throw ConfigError("no camera model (flag, config, or session header)");
    const CameraModel model = load_camera_model(camera_path);
    const DetectorConfig detector = parse_detector(detector_spec, cfg.detector_cfg);

    const auto retained = run_stage2(log, model, threshold_ppm);
    if (retained.empty()) {
        std::fprintf(stderr, "no frame passed the resolution gate\n");
        return kExitPipeline;
    }
    const DetectionReport report =
        run_stage3(retained, log, model, detector, threshold_ppm, out_dir);
    save_report(report, (fs::path(out_dir) / "report.json").string());

    if (report.length)
        std::printf("crack %u: length %.3f m (frame %s)\n", report.crack_id,
                    report.length->length_m, report.selected_frame_id.c_str());
    else
        std::printf("crack %u: insufficient extent (corr %d %d %d %d)\n", report.crack_id,
                    report.corr[0], report.corr[1], report.corr[2], report.corr[3]);
    return kExitOk;
}

int cmd_eval(const std::string& pred_dir, const std::string& gt_dir,
             const std::string& out_path) {
    std::vector<ScoreMap> preds;
    std::vector<BinaryMask> gts;
    std::vector<fs::path> gt_files;
    for (const auto& e : fs::directory_iterator(gt_dir))
        if (e.path().extension() == ".png") gt_files.push_back(e.path());
    std::sort(gt_files.begin(), gt_files.end());
    for (const fs::path& g : gt_files) {
        const fs::path p = fs::path(pred_dir) / g.filename();
        if (!fs::exists(p))
            throw ConfigError("missing prediction for " + g.filename().string());
        gts.push_back(load_mask(g.string()));
        preds.push_back(load_score_map(p.string()));
    }
    if (gts.empty()) throw ConfigError("no ground-truth masks in " + gt_dir);

    const auto thresholds = default_thresholds();
    const MetricsBundle b = ods_ois_ap(preds, gts, thresholds);
    std::printf("images: %zu\n", gts.size());
    std::printf("ODS F1: %.4f (t=%.2f, P=%.4f, R=%.4f)\n", b.ods_f1, b.ods_threshold,
                b.precision_at_ods, b.recall_at_ods);
    std::printf("OIS F1: %.4f\n", b.ois_f1);
    std::printf("AP:     %.4f\n", b.ap);

    if (!out_path.empty()) {
        json sweep = json::array();
        for (double t : thresholds) {
            const PrfResult r = prf_at_threshold(preds, gts, t);
            sweep.push_back({{"threshold", t},
                             {"precision", r.precision},
                             {"recall", r.recall},
                             {"f1", r.f1}});
        }
        json out{{"ods_f1", b.ods_f1},       {"ods_threshold", b.ods_threshold},
                 {"precision_at_ods", b.precision_at_ods},
                 {"recall_at_ods", b.recall_at_ods},
                 {"ois_f1", b.ois_f1},       {"ap", b.ap},
                 {"sweep", sweep}};
        std::ofstream os(out_path);
        os << out.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_crop(const std::string& image_path, const std::string& camera_path,
             const GeoPoint& crack, const GeoPoint& vehicle, double heading_deg,
             int roi, double threshold_ppm, const std::string& out_path) {
    const CameraModel model = load_camera_model(camera_path);
    FrameRecord frame;
    frame.vehicle_fix = vehicle;
    frame.heading_deg = heading_deg;

    const VehicleVector p_rel = crack_relative_to_lens(frame, crack, model);
    const GateResult gate = resolution_gate(p_rel, model, threshold_ppm);
    if (!gate.pass) {
        std::fprintf(stderr, "frame rejected: %s (%.1f px/m)\n",
                     gate.reject_reason.c_str(), gate.measured_ppm);
        return kExitPipeline;
    }
    const PixelPoint px = project_pinhole(vehicle_to_camera(p_rel, model), model.intrinsics);
    const CropWindow w =
        compute_crop_window(px, roi, roi, model.intrinsics.i_w, model.intrinsics.i_h);
    std::printf("center (%.1f, %.1f) window [%d, %d) x [%d, %d) at %.1f px/m\n", px.u,
                px.v, w.u_min, w.u_max, w.v_min, w.v_max, gate.measured_ppm);

    if (!out_path.empty()) {
        const GrayImage full = load_gray(image_path);
        save_gray(crop_image(full, w.u_min, w.v_min, w.b_w, w.b_h), out_path);
    }
    return kExitOk;
}

int cmd_length(const std::string& mask_path, const std::string& camera_path,
               int origin_u, int origin_v, double mask_threshold,
               const std::string& out_path) {
    const CameraModel model = load_camera_model(camera_path);
    BinaryMask mask = load_mask(mask_path, mask_threshold);
    mask.origin_u = origin_u;
    mask.origin_v = origin_v;

    const GroundPoints pts = mask_to_ground(mask, model);
    if (pts.points.empty()) {
        std::fprintf(stderr, "mask reconstructs to no ground points\n");
        return kExitPipeline;
    }
    const CrackEdges edges = select_edge_corners(pts.points);
    json out{{"corr", edges.corr},
             {"ground_points", pts.points.size()},
             {"skipped_pixels", pts.skipped}};
    try {
        const LengthEstimate est = estimate_length(edges);
        out["length_m"] = est.length_m;
        std::printf("length %.3f m (corr %d %d %d %d)\n", est.length_m, edges.corr[0],
                    edges.corr[1], edges.corr[2], edges.corr[3]);
    } catch (const InsufficientExtentError&) {
        std::printf("insufficient extent (corr %d %d %d %d)\n", edges.corr[0],
                    edges.corr[1], edges.corr[2], edges.corr[3]);
    }
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        os << out.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"infrastructure-guided road crack detection pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "estimate mounting angles from samples");
    std::string cal_samples, cal_camera, cal_out;
    double cal_range = 10.0, cal_step = 1.0;
    cal->add_option("--samples", cal_samples, "calibration samples JSON")->required();
    cal->add_option("--camera", cal_camera, "camera model JSON");
    cal->add_option("--range", cal_range, "search range, degrees");
    cal->add_option("--step", cal_step, "grid resolution, degrees");
    cal->add_option("--out", cal_out, "write angle report JSON");

    // simulate
    auto* sim = app.add_subcommand("simulate", "run an RSU/OBU exchange over a lossy channel");
    std::string sim_scenario, sim_out;
    double sim_drop = 0.0, sim_dmin = 0.01, sim_dmax = 0.05;
    std::uint64_t sim_seed = 0;
    int sim_retries = -1;
    sim->add_option("--scenario", sim_scenario, "scenario JSON")->required();
    sim->add_option("--drop", sim_drop, "drop probability")->check(CLI::Range(0.0, 1.0));
    sim->add_option("--delay-min", sim_dmin, "min channel delay, s");
    sim->add_option("--delay-max", sim_dmax, "max channel delay, s");
    sim->add_option("--seed", sim_seed, "channel RNG seed");
    sim->add_option("--max-retries", sim_retries, "RSU retry budget");
    sim->add_option("--out", sim_out, "write transcript to file");

    // process
    auto* proc = app.add_subcommand("process", "run stages II-III over a session log");
    std::string proc_session, proc_camera, proc_detector, proc_out = "out";
    double proc_ppm = -1.0;
    proc->add_option("--session", proc_session, "session log (NDJSON)")->required();
    proc->add_option("--camera", proc_camera, "camera model JSON");
    proc->add_option("--detector", proc_detector, "blackhat | maskdir:<path>");
    proc->add_option("--threshold-ppm", proc_ppm, "resolution gate, px/m");
    proc->add_option("--out", proc_out, "output directory");

    // eval
    auto* ev = app.add_subcommand("eval", "score prediction maps against ground truth");
    std::string ev_pred, ev_gt, ev_out;
    ev->add_option("--pred", ev_pred, "prediction directory")->required();
    ev->add_option("--gt", ev_gt, "ground-truth directory")->required();
    ev->add_option("--out", ev_out, "write metrics JSON");

    // crop
    auto* cr = app.add_subcommand("crop", "compute/extract the crop window for one frame");
    std::string cr_image, cr_camera, cr_out;
    double cr_lat = 0, cr_lon = 0, cr_alt = 0, cr_vlat = 0, cr_vlon = 0, cr_valt = 0,
           cr_heading = 0, cr_ppm = -1.0;
    int cr_roi = 512;
    cr->add_option("--image", cr_image, "full-resolution frame");
    cr->add_option("--camera", cr_camera, "camera model JSON");
    cr->add_option("--lat", cr_lat, "crack latitude")->required();
    cr->add_option("--lon", cr_lon, "crack longitude")->required();
    cr->add_option("--alt", cr_alt, "crack altitude");
    cr->add_option("--veh-lat", cr_vlat, "vehicle latitude")->required();
    cr->add_option("--veh-lon", cr_vlon, "vehicle longitude")->required();
    cr->add_option("--veh-alt", cr_valt, "vehicle altitude");
    cr->add_option("--heading", cr_heading, "vehicle heading, deg clockwise from north");
    cr->add_option("--roi", cr_roi, "crop side length, px");
    cr->add_option("--threshold-ppm", cr_ppm, "resolution gate, px/m");
    cr->add_option("--out", cr_out, "write cropped image");

    // length
    auto* len = app.add_subcommand("length", "estimate crack length from a mask");
    std::string len_mask, len_camera, len_out;
    int len_ou = 0, len_ov = 0;
    double len_thresh = 0.5;
    len->add_option("--mask", len_mask, "mask image")->required();
    len->add_option("--camera", len_camera, "camera model JSON");
    len->add_option("--origin-u", len_ou, "mask origin u in the full frame");
    len->add_option("--origin-v", len_ov, "mask origin v in the full frame");
    len->add_option("--mask-threshold", len_thresh, "binarization threshold");
    len->add_option("--out", len_out, "write length report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        const CliConfig cfg = read_config(config_path);
        const auto camera_or = [&](const std::string& flag) {
            if (!flag.empty()) return flag;
            if (!cfg.camera_model.empty()) return cfg.camera_model;
            throw ConfigError("no camera model given (--camera or config)");
        };

        if (cal->parsed())
            return cmd_calibrate(cal_samples, camera_or(cal_camera), cal_range, cal_step,
                                 cal_out);
        if (sim->parsed())
            return cmd_simulate(cfg, sim_scenario, sim_drop, sim_dmin, sim_dmax, sim_seed,
                                sim_retries, sim_out);
        if (proc->parsed())
            return cmd_process(cfg, proc_session, proc_camera,
                               proc_detector.empty() ? cfg.detector : proc_detector,
                               proc_ppm > 0 ? proc_ppm : cfg.threshold_ppm, proc_out);
        if (ev->parsed()) return cmd_eval(ev_pred, ev_gt, ev_out);
        if (cr->parsed())
            return cmd_crop(cr_image, camera_or(cr_camera), {cr_lat, cr_lon, cr_alt},
                            {cr_vlat, cr_vlon, cr_valt}, cr_heading, cr_roi,
                            cr_ppm > 0 ? cr_ppm : cfg.threshold_ppm, cr_out);
        if (len->parsed())
            return cmd_length(len_mask, camera_or(len_camera), len_ou, len_ov, len_thresh,
                              len_out);
        return kExitValidation;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "error: malformed input: %s\n", e.what());
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPipeline;
    }
}
