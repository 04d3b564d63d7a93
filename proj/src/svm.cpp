#include "ovia/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ovia/rng.hpp"

namespace ovia {

double rbf_kernel(const std::vector<double>& x, const std::vector<double>& z, double gamma) {
    if (x.size() != z.size()) {
        throw DimensionMismatch("rbf_kernel: vector lengths " + std::to_string(x.size()) +
                                " vs " + std::to_string(z.size()));
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - z[i];
        sq += d * d;
    }
    return std::exp(-gamma * sq);
}

namespace {

/// Platt-style SMO over the soft-margin dual with a full kernel cache and an
/// fx cache (fx_i = sum_j alpha_j y_j K_ij, threshold excluded). Fallback
/// pair scans start at seeded-random positions.
class SmoSolver {
  public:
    SmoSolver(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
              double cost, double gamma, double tol, std::uint64_t seed)
        : rows_(rows),
          labels_(labels),
          cost_(cost),
          tol_(tol),
          rng_(seed),
          n_(rows.size()),
          alpha_(rows.size(), 0.0),
          fx_(rows.size(), 0.0),
          kernel_(rows.size() * rows.size()) {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                const double k = rbf_kernel(rows[i], rows[j], gamma);
                kernel_[i * n_ + j] = k;
                kernel_[j * n_ + i] = k;
            }
        }
    }

    bool solve(int max_passes) {
        bool examine_all = true;
        for (int pass = 0; pass < max_passes; ++pass) {
            int changed = 0;
            if (examine_all) {
                for (std::size_t i = 0; i < n_; ++i) changed += examine(i);
                if (changed == 0) return true;
                examine_all = false;
            } else {
                for (std::size_t i = 0; i < n_; ++i) {
                    if (is_free(alpha_[i])) changed += examine(i);
                }
                if (changed == 0) examine_all = true;
            }
        }
        return false;
    }

    const std::vector<double>& alpha() const { return alpha_; }

    /// Bias recomputed from the final multipliers: averaged over free support
    /// vectors when any exist, otherwise the midpoint of the KKT-feasible
    /// interval (the running estimate is only unique when free vectors pin
    /// it).
    double canonical_bias() const {
        double free_sum = 0.0;
        int free_count = 0;
        double lo = -1e300, hi = 1e300;
        for (std::size_t i = 0; i < n_; ++i) {
            const double target = labels_[i] - fx_[i];
            if (is_free(alpha_[i])) {
                free_sum += target;
                ++free_count;
            } else if ((labels_[i] == 1 && alpha_[i] <= kEps) ||
                       (labels_[i] == -1 && alpha_[i] >= cost_ - kEps)) {
                lo = std::max(lo, target);
            } else {
                hi = std::min(hi, target);
            }
        }
        if (free_count > 0) return free_sum / free_count;
        if (lo > hi) return bias_;
        return (lo + hi) / 2.0;
    }

  private:
    static constexpr double kEps = 1e-12;

    bool is_free(double a) const { return a > kEps && a < cost_ - kEps; }
    double kern(std::size_t i, std::size_t j) const { return kernel_[i * n_ + j]; }
    double error(std::size_t i) const { return fx_[i] + bias_ - labels_[i]; }

    int examine(std::size_t i2) {
        const double y2 = labels_[i2];
        const double e2 = error(i2);
        const double r2 = e2 * y2;
        const bool violates =
            (r2 < -tol_ && alpha_[i2] < cost_ - kEps) || (r2 > tol_ && alpha_[i2] > kEps);
        if (!violates) return 0;

        // Second-choice heuristic: largest |e1 - e2| among free multipliers.
        std::size_t best = n_;
        double best_gap = -1.0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!is_free(alpha_[i])) continue;
            const double gap = std::abs(error(i) - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best < n_ && take_step(best, i2)) return 1;

        // Fallback scans, each from a seeded-random start.
        const std::size_t start1 = rng_.uniform_below(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (start1 + k) % n_;
            if (is_free(alpha_[i1]) && take_step(i1, i2)) return 1;
        }
        const std::size_t start2 = rng_.uniform_below(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            const std::size_t i1 = (start2 + k) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1];
        const double a2 = alpha_[i2];
        const double y1 = labels_[i1];
        const double y2 = labels_[i2];
        const double e1 = error(i1);
        const double e2 = error(i2);
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(cost_, cost_ + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - cost_);
            hi = std::min(cost_, a1 + a2);
        }
        if (hi - lo < kEps) return false;

        const double k11 = kern(i1, i1);
        const double k12 = kern(i1, i2);
        const double k22 = kern(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;

        double a2_new;
        if (eta > 0.0) {
            a2_new = a2 + y2 * (e1 - e2) / eta;
            a2_new = std::clamp(a2_new, lo, hi);
        } else {
            // Flat direction: evaluate the objective at both clip bounds.
            const double f1 = y1 * fx_[i1] - a1 * k11 - s * a2 * k12;
            const double f2 = y2 * fx_[i2] - s * a1 * k12 - a2 * k22;
            const double l1 = a1 + s * (a2 - lo);
            const double h1 = a1 + s * (a2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 +
                                  s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 +
                                  s * hi * h1 * k12;
            if (obj_lo < obj_hi - kEps) {
                a2_new = lo;
            } else if (obj_hi < obj_lo - kEps) {
                a2_new = hi;
            } else {
                return false;
            }
        }
        if (std::abs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;
        const double a1_new = a1 + s * (a2 - a2_new);

        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);
        const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
        if (is_free(a1_new)) {
            bias_ = b1;
        } else if (is_free(a2_new)) {
            bias_ = b2;
        } else {
            bias_ = (b1 + b2) / 2.0;
        }

        alpha_[i1] = a1_new;
        alpha_[i2] = a2_new;
        for (std::size_t k = 0; k < n_; ++k) {
            fx_[k] += d1 * kern(i1, k) + d2 * kern(i2, k);
        }
        return true;
    }

    const std::vector<std::vector<double>>& rows_;
    const std::vector<int>& labels_;
    double cost_;
    double tol_;
    Rng rng_;
    std::size_t n_;
    std::vector<double> alpha_;
    std::vector<double> fx_;
    std::vector<double> kernel_;
    double bias_ = 0.0;
};

std::vector<std::vector<double>> select_columns(const std::vector<std::vector<double>>& rows,
                                                const std::vector<int>& subset) {
    if (subset.empty()) return rows;
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        std::vector<double> projected;
        projected.reserve(subset.size());
        for (int j : subset) {
            projected.push_back(row.at(static_cast<std::size_t>(j)));
        }
        out.push_back(std::move(projected));
    }
    return out;
}

}  // namespace

SvmModel train(const std::vector<std::vector<double>>& rows_normalized,
               const std::vector<int>& labels, const SvmHyperparams& hp, const TrainControl& ctrl,
               NormStats stats) {
    if (rows_normalized.size() != labels.size()) {
        throw DimensionMismatch("train: row and label counts differ");
    }
    if (rows_normalized.size() < 2) {
        throw TooFewSamples("train: need at least 2 samples");
    }
    int pos = 0, neg = 0;
    for (int y : labels) {
        if (y == 1) {
            ++pos;
        } else if (y == -1) {
            ++neg;
        } else {
            throw Error("train: labels must be +1/-1");
        }
    }
    if (pos == 0 || neg == 0) {
        throw DegenerateLabels("train: both classes must be present");
    }

    SmoSolver solver(rows_normalized, labels, hp.cost, hp.gamma, ctrl.tol, ctrl.seed);
    const bool converged = solver.solve(ctrl.max_passes);

    SvmModel model;
    model.hp = hp;
    model.norm = std::move(stats);
    model.bias = solver.canonical_bias();
    model.seed = ctrl.seed;
    model.converged = converged;
    for (std::size_t i = 0; i < rows_normalized.size(); ++i) {
        if (solver.alpha()[i] > 1e-10) {
            model.support_vectors.push_back(rows_normalized[i]);
            model.coefficients.push_back(solver.alpha()[i] * labels[i]);
        }
    }
    return model;
}

SvmModel train_raw(const std::vector<std::vector<double>>& rows_raw, const std::vector<int>& labels,
                   const SvmHyperparams& hp, const TrainControl& ctrl) {
    NormStats stats = fit_norm(rows_raw);
    std::vector<std::vector<double>> normalized;
    normalized.reserve(rows_raw.size());
    for (const auto& row : rows_raw) {
        normalized.push_back(apply_norm(row, stats));
    }
    return train(normalized, labels, hp, ctrl, std::move(stats));
}

double decision(const SvmModel& model, const std::vector<double>& raw) {
    const std::vector<double> x = apply_norm(raw, model.norm);
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        f += model.coefficients[i] * rbf_kernel(model.support_vectors[i], x, model.hp.gamma);
    }
    return f;
}

Viability predict(const SvmModel& model, const std::vector<double>& raw) {
    return decision(model, raw) > 0.0 ? Viability::Viable : Viability::Nonviable;
}

std::vector<int> stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed) {
    if (k < 2) {
        throw Error("stratified_kfold: k must be >= 2");
    }
    std::vector<int> classes(labels.begin(), labels.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    std::vector<int> folds(labels.size(), -1);
    Rng rng(derive_seed(seed, 0xf01d));
    for (int cls : classes) {
        std::vector<std::size_t> indices;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) indices.push_back(i);
        }
        if (indices.size() < static_cast<std::size_t>(k)) {
            throw TooFewPerClass("stratified_kfold: class " + std::to_string(cls) + " has " +
                                 std::to_string(indices.size()) + " members, need >= " +
                                 std::to_string(k));
        }
        rng.shuffle(indices);
        for (std::size_t pos = 0; pos < indices.size(); ++pos) {
            folds[indices[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
        }
    }
    return folds;
}

CvReport grid_search(const std::vector<std::vector<double>>& rows_raw,
                     const std::vector<int>& labels, const std::vector<double>& cost_grid,
                     const std::vector<double>& gamma_grid, int k, std::uint64_t seed,
                     const TrainControl& ctrl) {
    if (cost_grid.empty() || gamma_grid.empty()) {
        throw Error("grid_search: empty grid");
    }
    const std::vector<int> folds = stratified_kfold(labels, k, derive_seed(seed, 0xcf0));

    CvReport report;
    bool have_best = false;
    std::size_t point_index = 0;
    for (double cost : cost_grid) {
        for (double gamma : gamma_grid) {
            CvPoint point;
            point.hp = {cost, gamma};
            for (int fold = 0; fold < k; ++fold) {
                std::vector<std::vector<double>> train_rows;
                std::vector<int> train_labels;
                std::vector<std::size_t> val_indices;
                for (std::size_t i = 0; i < rows_raw.size(); ++i) {
                    if (folds[i] == fold) {
                        val_indices.push_back(i);
                    } else {
                        train_rows.push_back(rows_raw[i]);
                        train_labels.push_back(labels[i]);
                    }
                }
                TrainControl fold_ctrl = ctrl;
                fold_ctrl.seed = derive_seed(ctrl.seed, point_index * 131 + fold);
                const SvmModel model = train_raw(train_rows, train_labels, point.hp, fold_ctrl);
                int correct = 0;
                for (std::size_t i : val_indices) {
                    const int predicted = decision(model, rows_raw[i]) > 0.0 ? 1 : -1;
                    if (predicted == labels[i]) ++correct;
                }
                point.fold_accuracies.push_back(static_cast<double>(correct) /
                                                static_cast<double>(val_indices.size()));
            }
            double sum = 0.0;
            for (double a : point.fold_accuracies) sum += a;
            point.mean_accuracy = sum / static_cast<double>(k);

            const bool better =
                !have_best || point.mean_accuracy > report.best.mean_accuracy ||
                (point.mean_accuracy == report.best.mean_accuracy &&
                 (point.hp.cost < report.best.hp.cost ||
                  (point.hp.cost == report.best.hp.cost && point.hp.gamma < report.best.hp.gamma)));
            if (better) {
                report.best = point;
                have_best = true;
            }
            report.grid.push_back(std::move(point));
            ++point_index;
        }
    }
    return report;
}

double loo_accuracy(const std::vector<std::vector<double>>& rows_raw,
                    const std::vector<int>& labels, const SvmHyperparams& hp,
                    const std::vector<int>& feature_subset, const TrainControl& ctrl) {
    int pos = 0, neg = 0;
    for (int y : labels) (y == 1 ? pos : neg) += 1;
    if (pos < 2 || neg < 2) {
        throw TooFewPerClass("loo_accuracy: need at least 2 samples per class");
    }
    const std::vector<std::vector<double>> projected = select_columns(rows_raw, feature_subset);

    int correct = 0;
    for (std::size_t held = 0; held < projected.size(); ++held) {
        std::vector<std::vector<double>> train_rows;
        std::vector<int> train_labels;
        train_rows.reserve(projected.size() - 1);
        for (std::size_t i = 0; i < projected.size(); ++i) {
            if (i == held) continue;
            train_rows.push_back(projected[i]);
            train_labels.push_back(labels[i]);
        }
        TrainControl split_ctrl = ctrl;
        split_ctrl.seed = derive_seed(ctrl.seed, 0x100 + held);
        const SvmModel model = train_raw(train_rows, train_labels, hp, split_ctrl);
        const int predicted = decision(model, projected[held]) > 0.0 ? 1 : -1;
        if (predicted == labels[held]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(projected.size());
}

double dual_objective(const SvmModel& model) {
    double sum_alpha = 0.0;
    for (double c : model.coefficients) sum_alpha += std::abs(c);
    double quad = 0.0;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        for (std::size_t j = 0; j < model.support_vectors.size(); ++j) {
            quad += model.coefficients[i] * model.coefficients[j] *
                    rbf_kernel(model.support_vectors[i], model.support_vectors[j],
                               model.hp.gamma);
        }
    }
    return sum_alpha - 0.5 * quad;
}

void save_model(const SvmModel& model, const std::string& path) {
    nlohmann::json doc;
    doc["format"] = "ovia-svm";
    doc["version"] = 1;
    doc["hyperparams"] = {{"C", model.hp.cost}, {"gamma", model.hp.gamma}};
    doc["norm"] = {{"mean", model.norm.mean}, {"std", model.norm.stddev}};
    doc["support_vectors"] = model.support_vectors;
    doc["coefficients"] = model.coefficients;
    doc["bias"] = model.bias;
    doc["seed"] = model.seed;
    doc["folds"] = model.fold_count;
    doc["converged"] = model.converged;

    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open for writing: " + path);
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoFailure("write failed: " + path);
    }
}

SvmModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingFile("cannot open: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error("model file is not valid JSON: " + path + " (" + e.what() + ")");
    }
    if (doc.value("format", "") != "ovia-svm") {
        throw Error("not an ovia-svm model file: " + path);
    }
    SvmModel model;
    model.hp.cost = doc.at("hyperparams").at("C").get<double>();
    model.hp.gamma = doc.at("hyperparams").at("gamma").get<double>();
    model.norm.mean = doc.at("norm").at("mean").get<std::vector<double>>();
    model.norm.stddev = doc.at("norm").at("std").get<std::vector<double>>();
    model.support_vectors = doc.at("support_vectors").get<std::vector<std::vector<double>>>();
    model.coefficients = doc.at("coefficients").get<std::vector<double>>();
    model.bias = doc.at("bias").get<double>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.fold_count = doc.value("folds", 0);
    model.converged = doc.value("converged", true);
    return model;
}

}  // namespace ovia
