#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "ovia/eval.hpp"
#include "ovia/rng.hpp"

using namespace ovia;

TEST_CASE("iou: examples") {
    LabelMask a(10, 1), b(10, 1);
    for (int x = 0; x < 10; ++x) a.at(x, 0) = b.at(x, 0) = 1;
    CHECK(iou(a, b, 1) == doctest::Approx(1.0));

    LabelMask c(10, 1), d(10, 1);
    for (int x = 0; x < 5; ++x) c.at(x, 0) = 1;
    for (int x = 5; x < 10; ++x) d.at(x, 0) = 1;
    CHECK(iou(c, d, 1) == doctest::Approx(0.0));

    // pred = left half of gt plus an equal-area patch elsewhere: |I| = A/2,
    // |U| = 3A/2.
    LabelMask gt(20, 1), pred(20, 1);
    for (int x = 0; x < 8; ++x) gt.at(x, 0) = 1;
    for (int x = 0; x < 4; ++x) pred.at(x, 0) = 1;
    for (int x = 10; x < 14; ++x) pred.at(x, 0) = 1;
    CHECK(iou(pred, gt, 1) == doctest::Approx(1.0 / 3.0));

    CHECK(iou(LabelMask(4, 4), LabelMask(4, 4), 2) == 1.0);  // both empty
    CHECK_THROWS_AS(iou(LabelMask(4, 4), LabelMask(5, 4), 1), SizeMismatch);
}

TEST_CASE("iou: symmetric and order-invariant") {
    Rng rng(1);
    LabelMask a(16, 16), b(16, 16);
    for (auto& v : a.labels) v = static_cast<std::uint8_t>(rng.uniform_below(3));
    for (auto& v : b.labels) v = static_cast<std::uint8_t>(rng.uniform_below(3));
    for (std::uint8_t cls = 0; cls < 3; ++cls) {
        CHECK(iou(a, b, cls) == iou(b, a, cls));
    }
}

TEST_CASE("localization_check: examples") {
    const std::vector<Point2> pts{{10, 10}, {200, 50}, {77, 300}};
    const LocalizationResult same = localization_check(pts, pts);
    CHECK(same.count_match);
    CHECK(same.fraction_within_radius == doctest::Approx(1.0));
    for (double d : same.matched_distances) CHECK(d == 0.0);

    const std::vector<Point2> gt{{100, 100}};
    const std::vector<Point2> shifted{{106, 108}};
    const LocalizationResult res = localization_check(shifted, gt, 10.0);
    CHECK(res.matched_distances[0] == doctest::Approx(10.0));
    CHECK(res.fraction_within_radius == 0.0);  // strict "inferior to 10"
}

TEST_CASE("localization_check: unmatched points are counted") {
    const std::vector<Point2> pred{{10, 10}, {500, 500}};
    const std::vector<Point2> gt{{11, 10}};
    const LocalizationResult res = localization_check(pred, gt, 10.0);
    CHECK_FALSE(res.count_match);
    CHECK(res.matched == 1);
    CHECK(res.unmatched_predictions == 1);
    CHECK(res.unmatched_ground_truth == 0);
    CHECK(res.fraction_within_radius == doctest::Approx(0.5));
}

TEST_CASE("localization_check: pairing matches the exhaustive assignment oracle") {
    Rng rng(2);
    for (int round = 0; round < 10; ++round) {
        // Well-separated ground truth with small perturbations, the regime
        // where the greedy pairing is the unique sensible assignment.
        const int n = 2 + static_cast<int>(rng.uniform_below(4));
        std::vector<Point2> gt, pred;
        for (int i = 0; i < n; ++i) {
            gt.push_back({100.0 + 300.0 * (i % 3), 100.0 + 300.0 * (i / 3)});
            pred.push_back({gt[i].x + rng.uniform(-5, 5), gt[i].y + rng.uniform(-5, 5)});
        }
        std::vector<int> order(pred.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        rng.shuffle(order);
        std::vector<Point2> shuffled;
        for (int i : order) shuffled.push_back(pred[i]);

        const LocalizationResult res = localization_check(shuffled, gt);
        const auto expected = oracle::min_cost_assignment(shuffled, gt);
        auto pairs = res.pairs;
        std::sort(pairs.begin(), pairs.end());
        CHECK(pairs == expected);
    }
}

TEST_CASE("confusion_metrics") {
    SUBCASE("balanced 70% operating point") {
        const ConfusionMetrics m = confusion_metrics({7, 3, 7, 3});
        CHECK(*m.accuracy == doctest::Approx(0.7));
        CHECK(*m.sensitivity == doctest::Approx(0.7));
        CHECK(*m.specificity == doctest::Approx(0.7));
        CHECK(*m.precision == doctest::Approx(0.7));
    }
    SUBCASE("perfect classifier") {
        const ConfusionMetrics m = confusion_metrics({5, 0, 9, 0});
        CHECK(*m.accuracy == 1.0);
        CHECK(*m.sensitivity == 1.0);
        CHECK(*m.specificity == 1.0);
        CHECK(*m.precision == 1.0);
    }
    SUBCASE("no positives in ground truth: sensitivity absent") {
        const ConfusionMetrics m = confusion_metrics({0, 2, 8, 0});
        CHECK_FALSE(m.sensitivity.has_value());
        CHECK(m.specificity.has_value());
    }
}

TEST_CASE("roc_auc: perfect and inverted rankings") {
    const std::vector<double> scores{0.9, 0.8, 0.7, 0.2, 0.1};
    const std::vector<bool> labels{true, true, true, false, false};
    CHECK(roc_auc(scores, labels).auc == doctest::Approx(1.0));

    const std::vector<bool> inverted{false, false, false, true, true};
    CHECK(roc_auc(scores, inverted).auc == doctest::Approx(0.0));

    CHECK_THROWS_AS(roc_auc({1.0, 2.0}, {true, true}), SingleClass);
}

TEST_CASE("roc_auc: endpoints and monotone sweep") {
    Rng rng(3);
    std::vector<double> scores;
    std::vector<bool> labels;
    for (int i = 0; i < 50; ++i) {
        scores.push_back(rng.uniform(-1, 1));
        labels.push_back(rng.bernoulli(0.4));
    }
    labels[0] = true;
    labels[1] = false;
    const RocCurve curve = roc_auc(scores, labels);
    CHECK(curve.points.front() == std::pair<double, double>{0.0, 0.0});
    CHECK(curve.points.back() == std::pair<double, double>{1.0, 1.0});
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].first >= curve.points[i - 1].first);
        CHECK(curve.points[i].second >= curve.points[i - 1].second);
    }
}

TEST_CASE("roc_auc: trapezoid equals pair counting, ties included") {
    Rng rng(4);
    for (int round = 0; round < 10; ++round) {
        std::vector<double> scores;
        std::vector<bool> labels;
        for (int i = 0; i < 100; ++i) {
            // Quantized scores force ties between and within classes.
            scores.push_back(std::floor(rng.uniform(0, 10)) / 10.0);
            labels.push_back(rng.bernoulli(0.5));
        }
        labels[0] = true;
        labels[1] = false;
        const double trapezoid = roc_auc(scores, labels).auc;
        const double paired = oracle::auc_pair_count(scores, labels);
        CHECK(std::abs(trapezoid - paired) < 1e-12);
    }
}

TEST_CASE("count_error_report") {
    SUBCASE("exact predictions") {
        const CountErrorReport r = count_error_report({2, 3, 1}, {2, 3, 1});
        CHECK(r.mae == 0.0);
        CHECK(r.histogram.at(0) == 3);
    }
    SUBCASE("hand arithmetic") {
        const CountErrorReport r = count_error_report({2, 3}, {3, 1});
        CHECK(r.mae == doctest::Approx(1.5));
    }
    SUBCASE("matches a direct-sum oracle") {
        Rng rng(5);
        std::vector<int> y, yhat;
        for (int i = 0; i < 40; ++i) {
            y.push_back(static_cast<int>(rng.uniform_below(8)));
            yhat.push_back(static_cast<int>(rng.uniform_below(8)));
        }
        const CountErrorReport r = count_error_report(y, yhat);
        double sum = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - yhat[i]);
        CHECK(r.mae == doctest::Approx(sum / y.size()));
        int mass = 0;
        for (const auto& [diff, n] : r.histogram) mass += n;
        CHECK(mass == static_cast<int>(y.size()));
    }
    SUBCASE("translation covariance") {
        const std::vector<int> y{1, 4, 2, 2}, yhat{2, 3, 2, 5};
        const double base = count_error_report(y, yhat).mae;
        std::vector<int> y2(y), yhat2(yhat);
        for (auto& v : y2) v += 3;
        for (auto& v : yhat2) v += 3;
        CHECK(count_error_report(y2, yhat2).mae == doctest::Approx(base));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(count_error_report({1, 2}, {1}), LengthMismatch);
        CHECK_THROWS_AS(count_error_report({}, {}), LengthMismatch);
    }
}

TEST_CASE("ks_statistic") {
    CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_statistic({0, 0, 1}, {5, 6, 7}) == doctest::Approx(1.0));
    CHECK(ks_statistic({0, 0, 1}, {0, 1, 1}) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(ks_statistic({}, {1}), EmptySample);

    Rng rng(6);
    for (int round = 0; round < 10; ++round) {
        std::vector<int> a, b;
        for (int i = 0; i < 20; ++i) a.push_back(static_cast<int>(rng.uniform_below(6)) - 3);
        for (int i = 0; i < 31; ++i) b.push_back(static_cast<int>(rng.uniform_below(6)) - 3);
        const double d = ks_statistic(a, b);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
        CHECK(ks_statistic(b, a) == doctest::Approx(d));
        CHECK(ks_statistic(a, a) == 0.0);
    }
}
