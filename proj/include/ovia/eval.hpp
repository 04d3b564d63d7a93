#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ovia/image.hpp"

namespace ovia {

struct ConfusionCounts {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;
};

/// Ratios with zero denominators are reported as absent, not 0.
struct ConfusionMetrics {
    std::optional<double> accuracy;
    std::optional<double> sensitivity;
    std::optional<double> specificity;
    std::optional<double> precision;
};

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (FPR, TPR), (0,0) to (1,1)
    double auc = 0.0;
};

struct LocalizationResult {
    bool count_match = false;
    std::vector<double> matched_distances;  // ordered by ground-truth index
    int matched = 0;
    int unmatched_predictions = 0;
    int unmatched_ground_truth = 0;
    double fraction_within_radius = 0.0;
    std::vector<std::pair<int, int>> pairs;  // (prediction index, gt index)
};

struct CountErrorEntry {
    std::string image_id;
    int true_count = 0;       // y_j
    int predicted_count = 0;  // y_hat_j
    int oocyte_count = 0;     // n_j
};

struct CountErrorReport {
    std::vector<CountErrorEntry> entries;
    double mae = 0.0;
    std::map<int, int> histogram;  // signed difference y_hat - y -> image count
    std::optional<double> ks_vs_reference;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// |pred n gt| / |pred u gt| for one class; 1 when both sets are empty.
/// Throws SizeMismatch.
double iou(const LabelMask& pred, const LabelMask& gt, std::uint8_t cls);

/// Greedy nearest-pair matching by ascending distance; unmatched points on
/// either side are counted. fraction_within_radius counts matched pairs with
/// distance strictly below `radius` over max(#pred, #gt).
LocalizationResult localization_check(const std::vector<Point2>& predictions,
                                      const std::vector<Point2>& ground_truth,
                                      double radius = 10.0);

ConfusionMetrics confusion_metrics(const ConfusionCounts& counts);

/// Threshold sweep over the distinct scores including the +-inf endpoints;
/// AUC by the trapezoid rule (equals pair-counting with half credit for
/// ties). Throws SingleClass.
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels);

/// MAE = mean |y_j - y_hat_j| plus a signed-difference histogram spanning the
/// observed range. Throws LengthMismatch; requires at least one image.
CountErrorReport count_error_report(const std::vector<int>& true_counts,
                                    const std::vector<int>& predicted_counts,
                                    const std::vector<int>& oocyte_counts = {},
                                    const std::vector<std::string>& image_ids = {});

/// Two-sample Kolmogorov-Smirnov statistic D = max |ECDF_a - ECDF_b|.
/// Throws EmptySample.
double ks_statistic(const std::vector<int>& sample_a, const std::vector<int>& sample_b);

}  // namespace ovia
