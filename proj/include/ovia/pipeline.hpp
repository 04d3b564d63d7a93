#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ovia/eval.hpp"
#include "ovia/manifest.hpp"
#include "ovia/svm.hpp"
#include "ovia/synth.hpp"

namespace ovia {

/// Scene-generation knobs for the synth subcommand.
struct SynthConfig {
    int scenes = 30;
    int width = 1392;
    int height = 1040;
    int min_oocytes = 1;
    int max_oocytes = 7;
    double noise_sigma = 3.0;
    OocyteSampler sampler;
};

/// One config drives every subcommand; defaults are the pipeline's canonical
/// thresholds (localization area 10^4, polar-body area 500, ROI side 416,
/// localization radius 10).
struct RunConfig {
    std::uint64_t seed = 1;
    long localization_min_area = 10000;
    long polar_body_min_area = 500;
    int roi_side = 416;
    double localization_radius = 10.0;
    std::vector<double> cost_grid{0.1, 1.0, 10.0, 100.0};
    std::vector<double> gamma_grid{1e-4, 1e-3, 1e-2, 1e-1};
    int folds = 5;
    double svm_tol = 1e-3;
    int svm_max_passes = 1000;
    SynthConfig synth;
};

RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& config, const std::string& path);

/// ROI index entry persisted as rois.json next to the ROI rasters.
struct RoiRecord {
    std::string id;
    std::string source_image;  // manifest entry id
    int center_x = 0;
    int center_y = 0;
    std::string image_path;
    std::string mask_path;
    Viability label = Viability::Unknown;
};

struct LocalizeImageReport {
    std::string image_id;
    int ground_truth_count = 0;
    int detected_count = 0;
    bool count_match = false;
    std::vector<double> matched_distances;
    double fraction_within_radius = 0.0;
};

struct LocalizeReport {
    std::vector<LocalizeImageReport> images;
    int images_with_count_match = 0;
    double fraction_within_radius = 0.0;  // pooled over all matches
};

/// Writes scene_XXX/{image.pgm,mask.pgm,truth.json} per scene plus
/// manifest.json; deterministic per config seed.
Manifest run_synth(const RunConfig& config, const std::string& out_dir);

/// Mask class 1 forms the binary foreground; components below the area
/// threshold are suppressed and one ROI is cut per surviving component.
/// Writes roi rasters, rois.json, and localization_report.json.
LocalizeReport run_localize(const Manifest& manifest, const RunConfig& config,
                            const std::string& out_dir);

/// Extracts the 24-feature vector per ROI into features.csv; ROIs whose
/// extraction fails are skipped with a logged reason.
std::vector<FeatureVector> run_extract(const std::string& rois_json_path,
                                       const RunConfig& config, const std::string& csv_path);

/// Grid search + final training on all labeled rows; writes model.json and
/// cv_report.json.
SvmModel run_train(const std::string& features_csv, const RunConfig& config,
                   const std::string& model_path, const std::string& cv_report_path);

/// Writes predictions.csv (oocyte_id, decision value, label).
void run_predict(const std::string& model_path, const std::string& features_csv,
                 const std::string& predictions_csv);

struct EvaluateInputs {
    std::string predictions_csv;
    std::string rois_json;
    std::string manifest_path;
    std::optional<std::string> pred_mask_dir;  // enables the IoU section
    std::optional<std::string> localization_report;  // copied into the report
};

/// Assembles the evaluation report (confusion metrics, ROC/AUC, count-error
/// reports for the model and the expert with the KS statistic between their
/// error samples, optional per-class IoU). Writes report.json and roc.csv.
void run_evaluate(const EvaluateInputs& inputs, const RunConfig& config,
                  const std::string& report_path, const std::string& roc_csv_path);

struct AblationRow {
    std::string subset_name;
    int feature_count = 0;
    double loo_accuracy = 0.0;
};

/// LOO accuracy for the four canonical feature subsets; writes ablation.json.
std::vector<AblationRow> run_ablate(const std::string& features_csv, const RunConfig& config,
                                    const std::string& out_path);

}  // namespace ovia
