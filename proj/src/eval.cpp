#include "ovia/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ovia {

double iou(const LabelMask& pred, const LabelMask& gt, std::uint8_t cls) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw SizeMismatch("iou: mask sizes differ");
    }
    long intersection = 0, unioned = 0;
    for (std::size_t i = 0; i < pred.labels.size(); ++i) {
        const bool in_pred = pred.labels[i] == cls;
        const bool in_gt = gt.labels[i] == cls;
        intersection += (in_pred && in_gt) ? 1 : 0;
        unioned += (in_pred || in_gt) ? 1 : 0;
    }
    if (unioned == 0) return 1.0;  // both empty
    return static_cast<double>(intersection) / static_cast<double>(unioned);
}

LocalizationResult localization_check(const std::vector<Point2>& predictions,
                                      const std::vector<Point2>& ground_truth, double radius) {
    struct Candidate {
        double dist;
        int pred;
        int gt;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(predictions.size() * ground_truth.size());
    for (std::size_t p = 0; p < predictions.size(); ++p) {
        for (std::size_t g = 0; g < ground_truth.size(); ++g) {
            const double dx = predictions[p].x - ground_truth[g].x;
            const double dy = predictions[p].y - ground_truth[g].y;
            candidates.push_back(
                {std::sqrt(dx * dx + dy * dy), static_cast<int>(p), static_cast<int>(g)});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        if (a.pred != b.pred) return a.pred < b.pred;
        return a.gt < b.gt;
    });

    std::vector<char> pred_used(predictions.size(), 0);
    std::vector<char> gt_used(ground_truth.size(), 0);
    std::vector<std::pair<int, double>> matches;  // (gt index, distance)
    LocalizationResult result;
    for (const Candidate& c : candidates) {
        if (pred_used[c.pred] || gt_used[c.gt]) continue;
        pred_used[c.pred] = 1;
        gt_used[c.gt] = 1;
        matches.emplace_back(c.gt, c.dist);
        result.pairs.emplace_back(c.pred, c.gt);
    }
    std::sort(matches.begin(), matches.end());
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });

    result.count_match = predictions.size() == ground_truth.size();
    result.matched = static_cast<int>(matches.size());
    result.unmatched_predictions = static_cast<int>(predictions.size() - matches.size());
    result.unmatched_ground_truth = static_cast<int>(ground_truth.size() - matches.size());
    int within = 0;
    for (const auto& [gt, dist] : matches) {
        result.matched_distances.push_back(dist);
        if (dist < radius) ++within;
    }
    const std::size_t denom = std::max(predictions.size(), ground_truth.size());
    result.fraction_within_radius =
        denom == 0 ? 1.0 : static_cast<double>(within) / static_cast<double>(denom);
    return result;
}

ConfusionMetrics confusion_metrics(const ConfusionCounts& counts) {
    ConfusionMetrics metrics;
    const long total = counts.tp + counts.fp + counts.tn + counts.fn;
    if (total > 0) {
        metrics.accuracy = static_cast<double>(counts.tp + counts.tn) / total;
    }
    if (counts.tp + counts.fn > 0) {
        metrics.sensitivity = static_cast<double>(counts.tp) / (counts.tp + counts.fn);
    }
    if (counts.tn + counts.fp > 0) {
        metrics.specificity = static_cast<double>(counts.tn) / (counts.tn + counts.fp);
    }
    if (counts.tp + counts.fp > 0) {
        metrics.precision = static_cast<double>(counts.tp) / (counts.tp + counts.fp);
    }
    return metrics;
}

RocCurve roc_auc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) {
        throw LengthMismatch("roc_auc: score and label counts differ");
    }
    long pos = 0, neg = 0;
    for (bool l : labels) (l ? pos : neg) += 1;
    if (pos == 0 || neg == 0) {
        throw SingleClass("roc_auc: need both classes");
    }

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);  // threshold +inf
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        // All samples sharing one score move together (one diagonal step).
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] ? tp : fp) += 1;
            ++i;
        }
        curve.points.emplace_back(static_cast<double>(fp) / neg, static_cast<double>(tp) / pos);
    }
    // The last point is (1,1): the -inf threshold.

    double auc = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& [x0, y0] = curve.points[k - 1];
        const auto& [x1, y1] = curve.points[k];
        auc += (x1 - x0) * (y0 + y1) / 2.0;
    }
    curve.auc = auc;
    return curve;
}

CountErrorReport count_error_report(const std::vector<int>& true_counts,
                                    const std::vector<int>& predicted_counts,
                                    const std::vector<int>& oocyte_counts,
                                    const std::vector<std::string>& image_ids) {
    if (true_counts.size() != predicted_counts.size()) {
        throw LengthMismatch("count_error_report: list lengths differ");
    }
    if (true_counts.empty()) {
        throw LengthMismatch("count_error_report: need at least one image");
    }

    CountErrorReport report;
    double abs_sum = 0.0;
    for (std::size_t j = 0; j < true_counts.size(); ++j) {
        CountErrorEntry entry;
        entry.image_id = j < image_ids.size() ? image_ids[j] : "image_" + std::to_string(j);
        entry.true_count = true_counts[j];
        entry.predicted_count = predicted_counts[j];
        entry.oocyte_count = j < oocyte_counts.size() ? oocyte_counts[j] : 0;
        report.entries.push_back(entry);
        abs_sum += std::abs(true_counts[j] - predicted_counts[j]);
        report.histogram[predicted_counts[j] - true_counts[j]] += 1;
    }
    report.mae = abs_sum / static_cast<double>(true_counts.size());
    return report;
}

double ks_statistic(const std::vector<int>& sample_a, const std::vector<int>& sample_b) {
    if (sample_a.empty() || sample_b.empty()) {
        throw EmptySample("ks_statistic: both samples must be non-empty");
    }
    std::vector<int> a(sample_a), b(sample_b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < a.size() && ib < b.size()) {
        const int v = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] == v) ++ia;
        while (ib < b.size() && b[ib] == v) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    // Past one sample's end the gap only shrinks toward 0; the loop above has
    // already seen the maximum.
    return d;
}

}  // namespace ovia
