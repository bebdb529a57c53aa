#pragma once

#include <array>
#include <string>
#include <vector>

#include "crackdet/image.hpp"

namespace crackdet {

struct LossWeights {
    double omega_pos = 5.0;
    double omega_neg = 1.0;
    double lambda_bce = 0.7;
    double lambda_dice = 0.3;
    double dice_eps = 1.0;
};

struct PrfResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct MetricsBundle {
    double ods_f1 = 0.0;
    double ois_f1 = 0.0;
    double precision_at_ods = 0.0;
    double recall_at_ods = 0.0;
    double ap = 0.0;
    double ods_threshold = 0.0;
};

/// Dataset-wide precision/recall/F1 at a fixed threshold (score > t counts
/// as positive). Empty denominators yield 0.
PrfResult prf_at_threshold(const std::vector<ScoreMap>& preds,
                           const std::vector<BinaryMask>& gts, double t);

/// ODS/OIS F1 and AP over a threshold sweep. ODS is the best shared-threshold
/// mean per-image F1 (so ODS <= OIS always); AP integrates the pooled
/// precision-recall curve, anchored at recall 0.
MetricsBundle ods_ois_ap(const std::vector<ScoreMap>& preds,
                         const std::vector<BinaryMask>& gts,
                         const std::vector<double>& thresholds);

/// Default sweep 0.01 .. 0.99 step 0.01.
std::vector<double> default_thresholds();

/// Class-weighted binary cross-entropy over logits, stable log-sigmoid form.
double weighted_bce(const LogitMap& logits, const BinaryMask& gt, const LossWeights& w);

/// Soft Dice loss over sigmoid probabilities.
double dice_loss(const LogitMap& logits, const BinaryMask& gt, double eps = 1.0);

/// lambda_bce * wBCE + lambda_dice * Dice.
double combined_loss(const LogitMap& logits, const BinaryMask& gt, const LossWeights& w);

/// Combined loss of the final map plus every intermediate decoder map.
double combined_total_loss(const LogitMap& final_map,
                           const std::vector<LogitMap>& intermediates,
                           const BinaryMask& gt, const LossWeights& w);

enum class DensityCategory { None, Minimal, Moderate, Dense };

struct DensityBands {
    double minimal_max = 0.005;  // none: f == 0; minimal: 0 < f <= minimal_max
    double moderate_max = 0.02;  // moderate: <= moderate_max; dense: above
};

struct AugmentationPlan {
    std::vector<DensityCategory> category_per_image;
    std::array<int, 4> replication_factor{1, 1, 1, 1};  // indexed by category
    std::array<std::size_t, 4> category_counts{0, 0, 0, 0};
};

/// Crack-density grouping; populated categories strictly below the median
/// populated-category count get replication factor 2.
AugmentationPlan density_augmentation_plan(const std::vector<BinaryMask>& masks,
                                           const DensityBands& bands = {});

const char* to_string(DensityCategory c);

}  // namespace crackdet
