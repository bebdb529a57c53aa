#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crackdet/camera.hpp"
#include "crackdet/geodesy.hpp"
#include "crackdet/image.hpp"

namespace crackdet {

/// Morphological black-hat (closing minus original), thresholded.
/// Responds to thin dark structures on a bright background.
/// Throws ConfigError on even/undersized kernels or kernel > image.
BinaryMask blackhat_mask(const GrayImage& img, int kernel_size, int threshold);

struct GroundPoints {
    std::vector<VehicleVector> points;  // row-major over set mask bits
    std::size_t skipped = 0;            // rays that missed the ground
};

/// Reconstruct every set mask bit to the ground plane of F_V.
GroundPoints mask_to_ground(const BinaryMask& mask, const CameraModel& model);

/// Per-quadrant farthest points from the centroid (quadrants around the
/// centroid in the vehicle x/y plane; 1: +x+y, 2: -x+y, 3: -x-y, 4: +x-y).
struct CrackEdges {
    std::map<int, VehicleVector> corners;
    std::array<int, 4> corr{0, 0, 0, 0};  // corr[q-1] = 1 iff quadrant q populated
    VehicleVector center;
};

CrackEdges select_edge_corners(const std::vector<VehicleVector>& points);

struct LengthEstimate {
    double length_m = 0.0;
    std::pair<VehicleVector, VehicleVector> endpoints;
    std::string frame_id;
};

struct InsufficientExtentError : std::runtime_error {
    explicit InsufficientExtentError(const std::array<int, 4>& c)
        : std::runtime_error("crack does not span quadrants 2 and 4"), corr(c) {}
    std::array<int, 4> corr;
};

/// Euclidean distance between the quadrant-2 and quadrant-4 corners.
LengthEstimate estimate_length(const CrackEdges& edges);

}  // namespace crackdet
