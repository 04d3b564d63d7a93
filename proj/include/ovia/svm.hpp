#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovia/features.hpp"

namespace ovia {

struct SvmHyperparams {
    double cost = 1.0;     // C
    double gamma = 1e-2;   // RBF width
};

struct TrainControl {
    double tol = 1e-3;       // KKT tolerance
    int max_passes = 1000;   // cap on outer SMO sweeps
    std::uint64_t seed = 1;  // pair-selection shuffling
};

/// Trained RBF soft-margin SVM. Support vectors are stored normalized;
/// decision() applies `norm` to raw inputs first.
struct SvmModel {
    SvmHyperparams hp;
    NormStats norm;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> coefficients;  // alpha_i * y_i
    double bias = 0.0;
    std::uint64_t seed = 0;
    int fold_count = 0;
    bool converged = true;
};

struct CvPoint {
    SvmHyperparams hp;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0.0;
};

struct CvReport {
    std::vector<CvPoint> grid;  // evaluation order: cost ascending, then gamma
    CvPoint best;
};

/// exp(-gamma * ||x-z||^2). Throws DimensionMismatch.
double rbf_kernel(const std::vector<double>& x, const std::vector<double>& z, double gamma);

/// SMO solve of the soft-margin dual on already-normalized rows with labels
/// +-1. KKT conditions hold within ctrl.tol on return; if the sweep cap is
/// hit first the best iterate is returned with converged = false. The fitted
/// NormStats are stored in the model for prediction time. Throws
/// DegenerateLabels if only one class is present.
SvmModel train(const std::vector<std::vector<double>>& rows_normalized,
               const std::vector<int>& labels, const SvmHyperparams& hp, const TrainControl& ctrl,
               NormStats stats);

/// Fits z-score stats on the raw rows, then trains on the normalized data.
SvmModel train_raw(const std::vector<std::vector<double>>& rows_raw, const std::vector<int>& labels,
                   const SvmHyperparams& hp, const TrainControl& ctrl);

/// f(x) = sum_i alpha_i y_i K(s_i, norm(x)) + b on a raw input row.
double decision(const SvmModel& model, const std::vector<double>& raw);

/// viable iff decision > 0; an exact 0 is nonviable.
Viability predict(const SvmModel& model, const std::vector<double>& raw);

/// Fold id per sample; per-class counts across folds differ by at most 1.
/// Throws TooFewPerClass when a class has fewer than k members.
std::vector<int> stratified_kfold(const std::vector<int>& labels, int k, std::uint64_t seed);

/// Exhaustive grid evaluation by stratified k-fold CV; the best point has the
/// highest mean fold accuracy, ties resolved to smaller C then smaller gamma.
/// Normalization stats are refit on each fold's training part.
CvReport grid_search(const std::vector<std::vector<double>>& rows_raw,
                     const std::vector<int>& labels, const std::vector<double>& cost_grid,
                     const std::vector<double>& gamma_grid, int k, std::uint64_t seed,
                     const TrainControl& ctrl = {});

/// Leave-one-out accuracy with an optional feature-column subset applied
/// before normalization; stats are refit on every split.
double loo_accuracy(const std::vector<std::vector<double>>& rows_raw,
                    const std::vector<int>& labels, const SvmHyperparams& hp,
                    const std::vector<int>& feature_subset, const TrainControl& ctrl = {});

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij,
/// computable from the stored support vectors alone.
double dual_objective(const SvmModel& model);

// Model file: JSON with version tag, hyperparams, normalization stats,
// support vectors, coefficients, bias, and seed.
void save_model(const SvmModel& model, const std::string& path);
SvmModel load_model(const std::string& path);

}  // namespace ovia
