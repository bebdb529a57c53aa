#include "crackdet/image.hpp"

#include <numeric>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "crackdet/errors.hpp"

namespace crackdet {

std::size_t BinaryMask::count() const {
    return std::accumulate(bits.begin(), bits.end(), std::size_t{0});
}

GrayImage load_gray(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw ConfigError("cannot read image: " + path);
    GrayImage img(m.cols, m.rows);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) img.at(x, y) = m.at<std::uint8_t>(y, x);
    return img;
}

void save_gray(const GrayImage& img, const std::string& path) {
    cv::Mat m(img.height, img.width, CV_8UC1);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) m.at<std::uint8_t>(y, x) = img.at(x, y);
    if (!cv::imwrite(path, m)) throw ConfigError("cannot write image: " + path);
}

BinaryMask load_mask(const std::string& path, double threshold) {
    cv::Mat m = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw ConfigError("cannot read mask: " + path);
    BinaryMask mask(m.cols, m.rows);
    const double cut = threshold * 255.0;
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) mask.at(x, y) = m.at<std::uint8_t>(y, x) > cut ? 1 : 0;
    return mask;
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    cv::Mat m(mask.height, mask.width, CV_8UC1);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            m.at<std::uint8_t>(y, x) = mask.at(x, y) ? 255 : 0;
    if (!cv::imwrite(path, m)) throw ConfigError("cannot write mask: " + path);
}

ScoreMap load_score_map(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED | cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw ConfigError("cannot read score map: " + path);
    ScoreMap s(m.cols, m.rows);
    const double scale = m.depth() == CV_16U ? 65535.0 : 255.0;
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) {
            const double raw = m.depth() == CV_16U
                                   ? static_cast<double>(m.at<std::uint16_t>(y, x))
                                   : static_cast<double>(m.at<std::uint8_t>(y, x));
            s.scores[static_cast<std::size_t>(y) * m.cols + x] = raw / scale;
        }
    return s;
}

GrayImage crop_image(const GrayImage& img, int u_min, int v_min, int w, int h) {
    if (u_min < 0 || v_min < 0 || u_min + w > img.width || v_min + h > img.height)
        throw ConfigError("crop window outside image bounds");
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = img.at(u_min + x, v_min + y);
    return out;
}

}  // namespace crackdet
