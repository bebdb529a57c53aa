#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crackdet {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Per-pixel crack mask plus the crop origin in the full frame.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // 0 or 1
    int origin_u = 0;
    int origin_v = 0;

    BinaryMask() = default;
    BinaryMask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

    std::uint8_t& at(int x, int y) { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count() const;
};

/// Post-sigmoid prediction scores in [0,1], row-major.
struct ScoreMap {
    int width = 0;
    int height = 0;
    std::vector<double> scores;

    ScoreMap() = default;
    ScoreMap(int w, int h, double fill = 0.0)
        : width(w), height(h), scores(static_cast<std::size_t>(w) * h, fill) {}
};

/// Raw logits, row-major.
struct LogitMap {
    int width = 0;
    int height = 0;
    std::vector<double> logits;

    LogitMap() = default;
    LogitMap(int w, int h, double fill = 0.0)
        : width(w), height(h), logits(static_cast<std::size_t>(w) * h, fill) {}
};

GrayImage load_gray(const std::string& path);
void save_gray(const GrayImage& img, const std::string& path);

/// Any pixel strictly above threshold*255 counts as crack.
BinaryMask load_mask(const std::string& path, double threshold = 0.5);
void save_mask(const BinaryMask& mask, const std::string& path);

/// 8/16-bit grayscale rescaled to [0,1].
ScoreMap load_score_map(const std::string& path);

GrayImage crop_image(const GrayImage& img, int u_min, int v_min, int w, int h);

}  // namespace crackdet
