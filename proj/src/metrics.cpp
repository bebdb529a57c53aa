#include "crackdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace crackdet {

namespace {

struct Counts {
    long long tp = 0, fp = 0, fn = 0;
};

Counts count_at(const ScoreMap& pred, const BinaryMask& gt, double t) {
    if (pred.width != gt.width || pred.height != gt.height)
        throw std::domain_error("prediction/ground-truth shape mismatch");
    Counts c;
    for (std::size_t i = 0; i < pred.scores.size(); ++i) {
        const bool p = pred.scores[i] > t;
        const bool g = gt.bits[i] != 0;
        if (p && g) ++c.tp;
        else if (p) ++c.fp;
        else if (g) ++c.fn;
    }
    return c;
}

PrfResult prf_from_counts(const Counts& c) {
    PrfResult r;
    r.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    r.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    r.f1 = r.precision + r.recall > 0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

// softplus(x) = log(1 + e^x) without overflow
double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

void check_shape(const LogitMap& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::domain_error("logit/ground-truth shape mismatch");
}

}  // namespace

PrfResult prf_at_threshold(const std::vector<ScoreMap>& preds,
                           const std::vector<BinaryMask>& gts, double t) {
    if (preds.size() != gts.size())
        throw std::domain_error("prediction/ground-truth count mismatch");
    Counts total;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const Counts c = count_at(preds[i], gts[i], t);
        total.tp += c.tp;
        total.fp += c.fp;
        total.fn += c.fn;
    }
    return prf_from_counts(total);
}

std::vector<double> default_thresholds() {
    std::vector<double> t;
    for (int i = 1; i <= 99; ++i) t.push_back(i / 100.0);
    return t;
}

MetricsBundle ods_ois_ap(const std::vector<ScoreMap>& preds,
                         const std::vector<BinaryMask>& gts,
                         const std::vector<double>& thresholds) {
    if (preds.empty() || preds.size() != gts.size())
        throw std::domain_error("need at least one prediction/ground-truth pair");
    if (thresholds.empty())
        throw std::domain_error("empty threshold list");

    MetricsBundle out;
    const double n_img = static_cast<double>(preds.size());

    // ODS: max over shared thresholds of the mean per-image F1. Averaging the
    // per-image scores (rather than pooling confusion counts) is what makes
    // ODS <= OIS hold unconditionally: max-of-mean <= mean-of-max.
    std::vector<std::pair<double, double>> pr;  // (recall, precision), pooled
    pr.reserve(thresholds.size());
    for (double t : thresholds) {
        double f1 = 0.0, prec = 0.0, rec = 0.0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            const PrfResult r = prf_from_counts(count_at(preds[i], gts[i], t));
            f1 += r.f1;
            prec += r.precision;
            rec += r.recall;
        }
        f1 /= n_img;
        if (f1 > out.ods_f1) {
            out.ods_f1 = f1;
            out.precision_at_ods = prec / n_img;
            out.recall_at_ods = rec / n_img;
            out.ods_threshold = t;
        }
        const PrfResult pooled = prf_at_threshold(preds, gts, t);
        pr.emplace_back(pooled.recall, pooled.precision);
    }

    // OIS: mean over images of the per-image best F1.
    double ois_sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        double best = 0.0;
        for (double t : thresholds)
            best = std::max(best, prf_from_counts(count_at(preds[i], gts[i], t)).f1);
        ois_sum += best;
    }
    out.ois_f1 = ois_sum / n_img;

    // AP: trapezoid over recall with the monotone precision envelope, anchored
    // at recall 0 so a constant-precision curve integrates to its full area.
    std::sort(pr.begin(), pr.end());
    for (std::size_t i = pr.size(); i-- > 1;)
        pr[i - 1].second = std::max(pr[i - 1].second, pr[i].second);
    pr.insert(pr.begin(), {0.0, pr.front().second});
    double ap = 0.0;
    for (std::size_t i = 1; i < pr.size(); ++i)
        ap += (pr[i].first - pr[i - 1].first) * (pr[i].second + pr[i - 1].second) / 2.0;
    out.ap = ap;
    return out;
}

double weighted_bce(const LogitMap& logits, const BinaryMask& gt, const LossWeights& w) {
    check_shape(logits, gt);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.logits.size(); ++i) {
        const double x = logits.logits[i];
        // -y log σ(x) = softplus(-x); -(1-y) log(1-σ(x)) = softplus(x)
        sum += gt.bits[i] ? w.omega_pos * softplus(-x) : w.omega_neg * softplus(x);
    }
    return sum / static_cast<double>(logits.logits.size());
}

double dice_loss(const LogitMap& logits, const BinaryMask& gt, double eps) {
    check_shape(logits, gt);
    if (!(eps > 0.0)) throw std::domain_error("dice eps must be positive");
    double inter = 0.0, psum = 0.0, gsum = 0.0;
    for (std::size_t i = 0; i < logits.logits.size(); ++i) {
        const double p = sigmoid(logits.logits[i]);
        psum += p;
        if (gt.bits[i]) {
            inter += p;
            gsum += 1.0;
        }
    }
    return 1.0 - (2.0 * inter + eps) / (psum + gsum + eps);
}

double combined_loss(const LogitMap& logits, const BinaryMask& gt, const LossWeights& w) {
    return w.lambda_bce * weighted_bce(logits, gt, w) +
           w.lambda_dice * dice_loss(logits, gt, w.dice_eps);
}

double combined_total_loss(const LogitMap& final_map,
                           const std::vector<LogitMap>& intermediates,
                           const BinaryMask& gt, const LossWeights& w) {
    double total = combined_loss(final_map, gt, w);
    for (const LogitMap& m : intermediates) total += combined_loss(m, gt, w);
    return total;
}

AugmentationPlan density_augmentation_plan(const std::vector<BinaryMask>& masks,
                                           const DensityBands& bands) {
    if (masks.empty())
        throw std::domain_error("density_augmentation_plan: no masks");

    AugmentationPlan plan;
    plan.category_per_image.reserve(masks.size());
    for (const BinaryMask& m : masks) {
        const double f = m.bits.empty()
                             ? 0.0
                             : static_cast<double>(m.count()) / static_cast<double>(m.bits.size());
        DensityCategory c;
        if (f == 0.0) c = DensityCategory::None;
        else if (f <= bands.minimal_max) c = DensityCategory::Minimal;
        else if (f <= bands.moderate_max) c = DensityCategory::Moderate;
        else c = DensityCategory::Dense;
        plan.category_per_image.push_back(c);
        ++plan.category_counts[static_cast<int>(c)];
    }

    std::vector<std::size_t> populated;
    for (std::size_t n : plan.category_counts)
        if (n > 0) populated.push_back(n);
    std::sort(populated.begin(), populated.end());
    const double median =
        populated.size() % 2 == 1
            ? static_cast<double>(populated[populated.size() / 2])
            : (static_cast<double>(populated[populated.size() / 2 - 1]) +
               static_cast<double>(populated[populated.size() / 2])) / 2.0;

    for (int c = 0; c < 4; ++c)
        if (plan.category_counts[c] > 0 &&
            static_cast<double>(plan.category_counts[c]) < median)
            plan.replication_factor[c] = 2;
    return plan;
}

const char* to_string(DensityCategory c) {
    switch (c) {
        case DensityCategory::None: return "none";
        case DensityCategory::Minimal: return "minimal";
        case DensityCategory::Moderate: return "moderate";
        case DensityCategory::Dense: return "dense";
    }
    return "?";
}

}  // namespace crackdet
