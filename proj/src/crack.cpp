#include "crackdet/crack.hpp"

#include <algorithm>
#include <cmath>

#include "crackdet/errors.hpp"

namespace crackdet {

namespace {

enum class Morph { Dilate, Erode };

// Flat square structuring element, clipped at the borders. The square
// window separates into a horizontal and a vertical pass.
GrayImage morph(const GrayImage& img, int k, Morph op) {
    const int r = k / 2;
    const auto pick = [op](std::uint8_t a, std::uint8_t b) {
        return op == Morph::Dilate ? std::max(a, b) : std::min(a, b);
    };

    GrayImage tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const int x0 = std::max(0, x - r), x1 = std::min(img.width - 1, x + r);
            std::uint8_t v = img.at(x0, y);
            for (int xx = x0 + 1; xx <= x1; ++xx) v = pick(v, img.at(xx, y));
            tmp.at(x, y) = v;
        }

    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const int y0 = std::max(0, y - r), y1 = std::min(img.height - 1, y + r);
        for (int x = 0; x < img.width; ++x) {
            std::uint8_t v = tmp.at(x, y0);
            for (int yy = y0 + 1; yy <= y1; ++yy) v = pick(v, tmp.at(x, yy));
            out.at(x, y) = v;
        }
    }
    return out;
}

}  // namespace

BinaryMask blackhat_mask(const GrayImage& img, int kernel_size, int threshold) {
    if (kernel_size < 3 || kernel_size % 2 == 0)
        throw ConfigError("blackhat kernel must be odd and >= 3");
    if (kernel_size > img.width || kernel_size > img.height)
        throw ConfigError("blackhat kernel larger than image");

    const GrayImage closed = morph(morph(img, kernel_size, Morph::Dilate),
                                   kernel_size, Morph::Erode);
    BinaryMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const int diff = static_cast<int>(closed.pixels[i]) - static_cast<int>(img.pixels[i]);
        mask.bits[i] = diff > threshold ? 1 : 0;
    }
    return mask;
}

GroundPoints mask_to_ground(const BinaryMask& mask, const CameraModel& model) {
    GroundPoints out;
    out.points.reserve(mask.count());
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            const PixelPoint px{static_cast<double>(mask.origin_u + x),
                                static_cast<double>(mask.origin_v + y)};
            try {
                out.points.push_back(back_project_ground(px, model));
            } catch (const NoGroundIntersectionError&) {
                ++out.skipped;
            }
        }
    return out;
}

CrackEdges select_edge_corners(const std::vector<VehicleVector>& points) {
    if (points.empty())
        throw std::domain_error("select_edge_corners: empty point set");

    CrackEdges edges;
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (const VehicleVector& p : points) {
        sx += p.x_m;
        sy += p.y_m;
        sz += p.z_m;
    }
    const double n = static_cast<double>(points.size());
    edges.center = {sx / n, sy / n, sz / n};

    // Half-open quadrant partition; the exact center is not a candidate.
    const auto quadrant = [](double dx, double dy) {
        if (dx >= 0 && dy > 0) return 1;
        if (dx < 0 && dy >= 0) return 2;
        if (dx <= 0 && dy < 0) return 3;
        if (dx > 0 && dy <= 0) return 4;
        return 0;
    };

    std::array<double, 4> best_d2{-1.0, -1.0, -1.0, -1.0};
    for (const VehicleVector& p : points) {
        const double dx = p.x_m - edges.center.x_m;
        const double dy = p.y_m - edges.center.y_m;
        const int q = quadrant(dx, dy);
        if (q == 0) continue;
        const double dz = p.z_m - edges.center.z_m;
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 > best_d2[q - 1]) {  // ties keep the earlier point
            best_d2[q - 1] = d2;
            edges.corners[q] = p;
            edges.corr[q - 1] = 1;
        }
    }
    return edges;
}

LengthEstimate estimate_length(const CrackEdges& edges) {
    if (!edges.corr[1] || !edges.corr[3])
        throw InsufficientExtentError(edges.corr);

    const VehicleVector a = edges.corners.at(2);
    const VehicleVector b = edges.corners.at(4);
    LengthEstimate est;
    est.endpoints = {a, b};
    est.length_m = (a.vec() - b.vec()).norm();
    return est;
}

}  // namespace crackdet
