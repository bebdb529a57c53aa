#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crackdet/camera.hpp"
#include "crackdet/crack.hpp"
#include "crackdet/crop.hpp"
#include "crackdet/geodesy.hpp"
#include "crackdet/image.hpp"

namespace crackdet {

struct CrackTask {
    std::uint32_t crack_id = 0;
    GeoPoint position;
    int roi_w = 512;
    int roi_h = 512;
};

struct SessionLog {
    std::vector<FrameRecord> frames;  // timestamps nondecreasing
    CrackTask task;
    std::string camera_model_path;
};

struct TimedImage {
    double timestamp = 0.0;
    std::string path;
    std::string frame_id;
};

struct GpsSample {
    double timestamp = 0.0;
    GeoPoint fix;
    double heading_deg = 0.0;
};

struct SyncError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyncStats {
    std::size_t paired = 0;
    std::size_t dropped = 0;  // beyond max skew
};

/// Pair each image with the nearest GPS sample within max_skew_s.
/// Throws SyncError when the time ranges do not overlap at all.
SessionLog sync_frames(const std::vector<TimedImage>& images,
                       const std::vector<GpsSample>& gps, double max_skew_s = 0.1,
                       SyncStats* stats = nullptr);

/// Session log file: NDJSON; a "session" header record then "frame" records.
SessionLog load_session(const std::string& path);
void save_session(const SessionLog& log, const std::string& path);

struct Stage2Frame {
    FrameRecord frame;
    CropWindow window;
};

/// Frames passing the resolution gate with a visible projected crack center,
/// each with its crop window, in time order.
std::vector<Stage2Frame> run_stage2(const SessionLog& log, const CameraModel& model,
                                    double threshold_ppm);

enum class DetectorChoice { BlackHat, MaskDir };

struct DetectorConfig {
    DetectorChoice choice = DetectorChoice::BlackHat;
    int blackhat_kernel = 9;
    int blackhat_threshold = 60;
    std::string mask_dir;           // for DetectorChoice::MaskDir
    double mask_threshold = 0.5;
};

struct DetectionReport {
    std::uint32_t crack_id = 0;
    std::string selected_frame_id;
    CropWindow window;
    std::string mask_path;
    std::uint64_t mask_digest = 0;
    std::array<int, 4> corr{0, 0, 0, 0};
    std::optional<LengthEstimate> length;
    std::size_t skipped_pixels = 0;
    // per-frame diagnostics for every retained frame
    struct FrameDiag {
        std::string frame_id;
        double pixels_per_meter = 0.0;
        std::optional<double> length_m;
    };
    std::vector<FrameDiag> diagnostics;
};

/// Crop the best frame, run the detector, reconstruct to the ground plane,
/// select edge corners and estimate the crack length.
DetectionReport run_stage3(const std::vector<Stage2Frame>& retained,
                           const SessionLog& log, const CameraModel& model,
                           const DetectorConfig& detector, double threshold_ppm,
                           const std::string& output_dir);

void save_report(const DetectionReport& report, const std::string& path);

/// FNV-1a over the mask bits; ties the transmitted result to the mask file.
std::uint64_t mask_digest(const BinaryMask& mask);

}  // namespace crackdet
