#include "ovia/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ovia/pgm.hpp"

namespace ovia {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string scene_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "scene_%03d", index);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open for writing: " + path);
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoFailure("write failed: " + path);
    }
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingFile("cannot open: " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error("invalid JSON in " + path + ": " + e.what());
    }
    return doc;
}

json reference_to_json(const ReferenceFeatures& ref) {
    return json{{"mu_c", ref.mu_c},
                {"e_c", ref.e_c},
                {"gamma_c", ref.gamma_c},
                {"mu_z", ref.mu_z},
                {"e_z", ref.e_z},
                {"gamma_z", ref.gamma_z},
                {"m", ref.misalignment},
                {"r", ref.area_ratio},
                {"n_pb", ref.n_pb},
                {"S_pb", ref.s_pb}};
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    const json doc = load_json(path);
    RunConfig config;
    config.seed = doc.value("seed", config.seed);
    config.localization_min_area = doc.value("localization_min_area", config.localization_min_area);
    config.polar_body_min_area = doc.value("polar_body_min_area", config.polar_body_min_area);
    config.roi_side = doc.value("roi_side", config.roi_side);
    config.localization_radius = doc.value("localization_radius", config.localization_radius);
    if (doc.contains("svm")) {
        const json& svm = doc["svm"];
        config.cost_grid = svm.value("c_grid", config.cost_grid);
        config.gamma_grid = svm.value("gamma_grid", config.gamma_grid);
        config.folds = svm.value("folds", config.folds);
        config.svm_tol = svm.value("tol", config.svm_tol);
        config.svm_max_passes = svm.value("max_passes", config.svm_max_passes);
    }
    if (doc.contains("synth")) {
        const json& synth = doc["synth"];
        config.synth.scenes = synth.value("scenes", config.synth.scenes);
        config.synth.width = synth.value("width", config.synth.width);
        config.synth.height = synth.value("height", config.synth.height);
        config.synth.min_oocytes = synth.value("min_oocytes", config.synth.min_oocytes);
        config.synth.max_oocytes = synth.value("max_oocytes", config.synth.max_oocytes);
        config.synth.noise_sigma = synth.value("noise_sigma", config.synth.noise_sigma);
    }
    return config;
}

void save_run_config(const RunConfig& config, const std::string& path) {
    json doc;
    doc["seed"] = config.seed;
    doc["localization_min_area"] = config.localization_min_area;
    doc["polar_body_min_area"] = config.polar_body_min_area;
    doc["roi_side"] = config.roi_side;
    doc["localization_radius"] = config.localization_radius;
    doc["svm"] = {{"c_grid", config.cost_grid},
                  {"gamma_grid", config.gamma_grid},
                  {"folds", config.folds},
                  {"tol", config.svm_tol},
                  {"max_passes", config.svm_max_passes}};
    doc["synth"] = {{"scenes", config.synth.scenes},
                    {"width", config.synth.width},
                    {"height", config.synth.height},
                    {"min_oocytes", config.synth.min_oocytes},
                    {"max_oocytes", config.synth.max_oocytes},
                    {"noise_sigma", config.synth.noise_sigma}};
    write_text(path, doc.dump(2) + "\n");
}

Manifest run_synth(const RunConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const SynthConfig& sc = config.synth;

    Manifest manifest;
    for (int s = 0; s < sc.scenes; ++s) {
        Rng count_rng(derive_seed(config.seed, 0x5c00 + s));
        int count = sc.min_oocytes;
        if (sc.max_oocytes > sc.min_oocytes) {
            count += static_cast<int>(
                count_rng.uniform_below(sc.max_oocytes - sc.min_oocytes + 1));
        }
        const SceneSpec spec = sample_scene(derive_seed(config.seed, 0x5e00 + s), sc.width,
                                            sc.height, count, sc.noise_sigma, sc.sampler);
        const Scene scene = generate_scene(spec);

        const std::string name = scene_name(s);
        const fs::path scene_dir = fs::path(out_dir) / name;
        fs::create_directories(scene_dir);
        save_gray_image(scene.image, (scene_dir / "image.pgm").string());
        save_label_mask(scene.mask, (scene_dir / "mask.pgm").string());

        json truth;
        truth["seed"] = spec.seed;
        truth["oocytes"] = json::array();
        ManifestEntry entry;
        entry.image_path = (scene_dir / "image.pgm").string();
        entry.mask_path = (scene_dir / "mask.pgm").string();
        entry.id = name;
        int viable_count = 0;
        for (const OocyteTruth& oo : scene.truth) {
            json record;
            record["cx"] = oo.center_x;
            record["cy"] = oo.center_y;
            record["viable"] = oo.viable;
            record["reference"] = reference_to_json(oo.ref);
            truth["oocytes"].push_back(std::move(record));
            ManifestOocyte moo;
            moo.cx = round_half_away(oo.center_x);
            moo.cy = round_half_away(oo.center_y);
            moo.viable = oo.viable;
            entry.oocytes.push_back(moo);
            if (oo.viable) ++viable_count;
        }
        entry.true_viable_count = viable_count;
        write_text((scene_dir / "truth.json").string(), truth.dump(2) + "\n");
        manifest.entries.push_back(std::move(entry));
    }
    save_manifest(manifest, (fs::path(out_dir) / "manifest.json").string());
    return manifest;
}

LocalizeReport run_localize(const Manifest& manifest, const RunConfig& config,
                            const std::string& out_dir) {
    fs::create_directories(out_dir);

    LocalizeReport report;
    json roi_index = json::array();
    long pooled_within = 0;
    long pooled_denom = 0;

    for (const ManifestEntry& entry : manifest.entries) {
        const GrayImage image = load_gray_image(entry.image_path);
        const LabelMask mask = load_label_mask(entry.mask_path);
        const auto components = suppress_small(
            connected_components(mask_to_binary(
                                     mask, static_cast<std::uint8_t>(LabelClass::Cytoplasm)),
                                 static_cast<std::uint8_t>(LabelClass::Cytoplasm)),
            config.localization_min_area);

        std::vector<Point2> detected;
        for (const Component& c : components) {
            detected.push_back({c.centroid_x, c.centroid_y});
        }
        std::vector<Point2> expected;
        for (const ManifestOocyte& oo : entry.oocytes) {
            expected.push_back({static_cast<double>(oo.cx), static_cast<double>(oo.cy)});
        }
        const LocalizationResult loc =
            localization_check(detected, expected, config.localization_radius);

        // Detected components inherit the expert label of the ground-truth
        // center they matched (within the localization radius).
        std::vector<Viability> labels(components.size(), Viability::Unknown);
        for (std::size_t p = 0; p < loc.pairs.size(); ++p) {
            const auto [pred_idx, gt_idx] = loc.pairs[p];
            if (loc.matched_distances[p] < config.localization_radius) {
                labels[pred_idx] = entry.oocytes[gt_idx].viable ? Viability::Viable
                                                                : Viability::Nonviable;
            }
        }

        for (std::size_t k = 0; k < components.size(); ++k) {
            const std::string roi_id = entry.id + "_oocyte_" + std::to_string(k);
            const Roi roi = extract_roi(image, mask, components[k].centroid_x,
                                        components[k].centroid_y, config.roi_side, roi_id);
            const std::string image_name = roi_id + "_image.pgm";
            const std::string mask_name = roi_id + "_mask.pgm";
            save_gray_image(roi.image, (fs::path(out_dir) / image_name).string());
            save_label_mask(roi.mask, (fs::path(out_dir) / mask_name).string());
            roi_index.push_back({{"id", roi_id},
                                 {"source_image", entry.id},
                                 {"center", {roi.center_x, roi.center_y}},
                                 {"image", image_name},
                                 {"mask", mask_name},
                                 {"label", viability_name(labels[k])}});
        }

        LocalizeImageReport image_report;
        image_report.image_id = entry.id;
        image_report.ground_truth_count = static_cast<int>(entry.oocytes.size());
        image_report.detected_count = static_cast<int>(components.size());
        image_report.count_match = loc.count_match;
        image_report.matched_distances = loc.matched_distances;
        image_report.fraction_within_radius = loc.fraction_within_radius;
        if (loc.count_match) ++report.images_with_count_match;
        for (double d : loc.matched_distances) {
            if (d < config.localization_radius) ++pooled_within;
        }
        pooled_denom += std::max(image_report.ground_truth_count, image_report.detected_count);
        report.images.push_back(std::move(image_report));
    }
    report.fraction_within_radius =
        pooled_denom == 0 ? 1.0
                          : static_cast<double>(pooled_within) / static_cast<double>(pooled_denom);

    write_text((fs::path(out_dir) / "rois.json").string(), roi_index.dump(2) + "\n");

    json loc_doc;
    loc_doc["images"] = json::array();
    for (const LocalizeImageReport& r : report.images) {
        loc_doc["images"].push_back({{"image", r.image_id},
                                     {"ground_truth_count", r.ground_truth_count},
                                     {"detected_count", r.detected_count},
                                     {"count_match", r.count_match},
                                     {"matched_distances", r.matched_distances},
                                     {"fraction_within_radius", r.fraction_within_radius}});
    }
    loc_doc["images_with_count_match"] = report.images_with_count_match;
    loc_doc["total_images"] = report.images.size();
    loc_doc["fraction_within_radius"] = report.fraction_within_radius;
    write_text((fs::path(out_dir) / "localization_report.json").string(), loc_doc.dump(2) + "\n");
    return report;
}

std::vector<FeatureVector> run_extract(const std::string& rois_json_path, const RunConfig& config,
                                       const std::string& csv_path) {
    const json roi_index = load_json(rois_json_path);
    if (!roi_index.is_array()) {
        throw Error("rois index must be a JSON array: " + rois_json_path);
    }
    const fs::path base = fs::path(rois_json_path).parent_path();

    std::vector<FeatureVector> rows;
    for (const json& record : roi_index) {
        const std::string roi_id = record.at("id").get<std::string>();
        Roi roi;
        roi.source_id = roi_id;
        roi.center_x = record.at("center").at(0).get<int>();
        roi.center_y = record.at("center").at(1).get<int>();
        roi.image = load_gray_image((base / record.at("image").get<std::string>()).string());
        roi.mask = load_label_mask((base / record.at("mask").get<std::string>()).string());
        try {
            FeatureVector fv = extract_features(roi, config.polar_body_min_area);
            fv.label = viability_from_name(record.at("label").get<std::string>());
            rows.push_back(std::move(fv));
        } catch (const Error& e) {
            std::cerr << "extract: skipping " << roi_id << ": " << e.what() << "\n";
        }
    }
    write_feature_csv(rows, csv_path);
    return rows;
}

namespace {

void split_labeled(const std::vector<FeatureVector>& rows,
                   std::vector<std::vector<double>>& matrix, std::vector<int>& labels,
                   std::vector<std::string>& ids) {
    for (const FeatureVector& fv : rows) {
        if (fv.label == Viability::Unknown) continue;
        matrix.emplace_back(fv.values.begin(), fv.values.end());
        labels.push_back(fv.label == Viability::Viable ? 1 : -1);
        ids.push_back(fv.oocyte_id);
    }
}

json cv_point_to_json(const CvPoint& point) {
    return json{{"C", point.hp.cost},
                {"gamma", point.hp.gamma},
                {"fold_accuracies", point.fold_accuracies},
                {"mean_accuracy", point.mean_accuracy}};
}

}  // namespace

SvmModel run_train(const std::string& features_csv, const RunConfig& config,
                   const std::string& model_path, const std::string& cv_report_path) {
    const std::vector<FeatureVector> rows = read_feature_csv(features_csv);
    std::vector<std::vector<double>> matrix;
    std::vector<int> labels;
    std::vector<std::string> ids;
    split_labeled(rows, matrix, labels, ids);
    if (matrix.empty()) {
        throw DegenerateLabels("train: no labeled rows in " + features_csv);
    }

    TrainControl ctrl;
    ctrl.tol = config.svm_tol;
    ctrl.max_passes = config.svm_max_passes;
    ctrl.seed = derive_seed(config.seed, 0x7211);
    const CvReport cv = grid_search(matrix, labels, config.cost_grid, config.gamma_grid,
                                    config.folds, derive_seed(config.seed, 0x9d0f), ctrl);

    TrainControl final_ctrl = ctrl;
    final_ctrl.seed = derive_seed(config.seed, 0xf1a1);
    SvmModel model = train_raw(matrix, labels, cv.best.hp, final_ctrl);
    model.fold_count = config.folds;
    save_model(model, model_path);

    json report;
    report["best"] = cv_point_to_json(cv.best);
    report["grid"] = json::array();
    for (const CvPoint& point : cv.grid) {
        report["grid"].push_back(cv_point_to_json(point));
    }
    report["folds"] = config.folds;
    report["seed"] = config.seed;
    write_text(cv_report_path, report.dump(2) + "\n");
    return model;
}

void run_predict(const std::string& model_path, const std::string& features_csv,
                 const std::string& predictions_csv) {
    const SvmModel model = load_model(model_path);
    const std::vector<FeatureVector> rows = read_feature_csv(features_csv);

    std::ostringstream out;
    out << "oocyte_id,decision,label\n";
    for (const FeatureVector& fv : rows) {
        const std::vector<double> values(fv.values.begin(), fv.values.end());
        const double score = decision(model, values);
        out << fv.oocyte_id << ',' << format_double(score) << ','
            << viability_name(score > 0.0 ? Viability::Viable : Viability::Nonviable) << '\n';
    }
    write_text(predictions_csv, out.str());
}

namespace {

struct PredictionRow {
    std::string oocyte_id;
    double score = 0.0;
    Viability label = Viability::Unknown;
};

std::vector<PredictionRow> read_predictions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingFile("cannot open: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error("predictions csv is empty: " + path);
    }
    std::vector<PredictionRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        PredictionRow row;
        std::string field;
        if (!std::getline(ss, row.oocyte_id, ',') || !std::getline(ss, field, ',')) {
            throw Error("bad predictions row: " + line);
        }
        row.score = std::stod(field);
        if (!std::getline(ss, field, ',')) {
            throw Error("predictions row missing label: " + line);
        }
        row.label = viability_from_name(field);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void run_evaluate(const EvaluateInputs& inputs, const RunConfig& config,
                  const std::string& report_path, const std::string& roc_csv_path) {
    const std::vector<PredictionRow> predictions = read_predictions_csv(inputs.predictions_csv);
    const json roi_index = load_json(inputs.rois_json);
    const Manifest manifest = load_manifest(inputs.manifest_path);

    struct RoiInfo {
        std::string source_image;
        Viability expert = Viability::Unknown;
    };
    std::map<std::string, RoiInfo> roi_info;
    for (const json& record : roi_index) {
        roi_info[record.at("id").get<std::string>()] = {
            record.at("source_image").get<std::string>(),
            viability_from_name(record.at("label").get<std::string>())};
    }

    // Confusion counts and ROC against the expert labels.
    ConfusionCounts counts;
    std::vector<double> scores;
    std::vector<bool> score_labels;
    std::map<std::string, int> predicted_viable_per_image;
    for (const PredictionRow& row : predictions) {
        const auto it = roi_info.find(row.oocyte_id);
        if (it == roi_info.end()) continue;
        if (row.label == Viability::Viable) {
            predicted_viable_per_image[it->second.source_image] += 1;
        }
        if (it->second.expert == Viability::Unknown) continue;
        const bool expert_viable = it->second.expert == Viability::Viable;
        const bool predicted_viable = row.label == Viability::Viable;
        if (predicted_viable && expert_viable) ++counts.tp;
        if (predicted_viable && !expert_viable) ++counts.fp;
        if (!predicted_viable && !expert_viable) ++counts.tn;
        if (!predicted_viable && expert_viable) ++counts.fn;
        scores.push_back(row.score);
        score_labels.push_back(expert_viable);
    }
    const ConfusionMetrics metrics = confusion_metrics(counts);

    json report;
    report["confusion"] = {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn},
                           {"fn", counts.fn}};
    auto metric_or_null = [](const std::optional<double>& m) {
        return m ? json(*m) : json(nullptr);
    };
    report["metrics"] = {{"accuracy", metric_or_null(metrics.accuracy)},
                         {"sensitivity", metric_or_null(metrics.sensitivity)},
                         {"specificity", metric_or_null(metrics.specificity)},
                         {"precision", metric_or_null(metrics.precision)}};

    bool have_pos = false, have_neg = false;
    for (bool l : score_labels) (l ? have_pos : have_neg) = true;
    if (have_pos && have_neg) {
        const RocCurve roc = roc_auc(scores, score_labels);
        json points = json::array();
        std::ostringstream roc_csv;
        roc_csv << "fpr,tpr\n";
        for (const auto& [fpr, tpr] : roc.points) {
            points.push_back({fpr, tpr});
            roc_csv << format_double(fpr) << ',' << format_double(tpr) << '\n';
        }
        report["roc"] = {{"points", std::move(points)}, {"auc", roc.auc}};
        write_text(roc_csv_path, roc_csv.str());
    } else {
        report["roc"] = nullptr;
        write_text(roc_csv_path, "fpr,tpr\n");
    }

    // Per-image viable-count errors for both annotation sources.
    std::vector<int> true_counts, model_counts, expert_counts, oocyte_counts;
    std::vector<std::string> image_ids;
    for (const ManifestEntry& entry : manifest.entries) {
        if (!entry.true_viable_count) continue;
        int expert_viable = 0;
        for (const ManifestOocyte& oo : entry.oocytes) expert_viable += oo.viable ? 1 : 0;
        true_counts.push_back(*entry.true_viable_count);
        expert_counts.push_back(expert_viable);
        const auto it = predicted_viable_per_image.find(entry.id);
        model_counts.push_back(it == predicted_viable_per_image.end() ? 0 : it->second);
        oocyte_counts.push_back(static_cast<int>(entry.oocytes.size()));
        image_ids.push_back(entry.id);
    }
    if (!true_counts.empty()) {
        CountErrorReport model_report =
            count_error_report(true_counts, model_counts, oocyte_counts, image_ids);
        CountErrorReport expert_report =
            count_error_report(true_counts, expert_counts, oocyte_counts, image_ids);
        std::vector<int> model_errors, expert_errors;
        for (std::size_t j = 0; j < true_counts.size(); ++j) {
            model_errors.push_back(model_counts[j] - true_counts[j]);
            expert_errors.push_back(expert_counts[j] - true_counts[j]);
        }
        const double ks = ks_statistic(model_errors, expert_errors);
        model_report.ks_vs_reference = ks;

        auto count_report_to_json = [](const CountErrorReport& r) {
            json entries = json::array();
            for (const CountErrorEntry& e : r.entries) {
                entries.push_back({{"image", e.image_id},
                                   {"y", e.true_count},
                                   {"y_hat", e.predicted_count},
                                   {"n", e.oocyte_count}});
            }
            json histogram = json::object();
            for (const auto& [diff, n] : r.histogram) {
                histogram[std::to_string(diff)] = n;
            }
            return json{{"entries", std::move(entries)},
                        {"mae", r.mae},
                        {"histogram", std::move(histogram)}};
        };
        report["count_error"] = {{"model", count_report_to_json(model_report)},
                                 {"expert", count_report_to_json(expert_report)},
                                 {"ks_model_vs_expert", ks}};
    } else {
        report["count_error"] = nullptr;
    }

    // Optional per-class IoU of externally predicted masks against the
    // manifest's ground-truth masks (mirrored relative paths).
    if (inputs.pred_mask_dir) {
        const fs::path manifest_dir = fs::path(inputs.manifest_path).parent_path();
        std::array<double, kNumClasses> sums{};
        int evaluated = 0;
        for (const ManifestEntry& entry : manifest.entries) {
            const fs::path rel = fs::path(entry.mask_path).lexically_relative(manifest_dir);
            const fs::path pred_path = fs::path(*inputs.pred_mask_dir) / rel;
            const LabelMask pred = load_label_mask(pred_path.string());
            const LabelMask gt = load_label_mask(entry.mask_path);
            for (int cls = 0; cls < kNumClasses; ++cls) {
                sums[cls] += iou(pred, gt, static_cast<std::uint8_t>(cls));
            }
            ++evaluated;
        }
        json iou_doc;
        for (int cls = 0; cls < kNumClasses; ++cls) {
            iou_doc[label_class_name(static_cast<LabelClass>(cls))] =
                evaluated > 0 ? sums[cls] / evaluated : 1.0;
        }
        report["iou"] = std::move(iou_doc);
    } else {
        report["iou"] = nullptr;
    }

    if (inputs.localization_report) {
        report["localization"] = load_json(*inputs.localization_report);
    } else {
        report["localization"] = nullptr;
    }

    (void)config;
    write_text(report_path, report.dump(2) + "\n");
}

std::vector<AblationRow> run_ablate(const std::string& features_csv, const RunConfig& config,
                                    const std::string& out_path) {
    const std::vector<FeatureVector> rows = read_feature_csv(features_csv);
    std::vector<std::vector<double>> matrix;
    std::vector<int> labels;
    std::vector<std::string> ids;
    split_labeled(rows, matrix, labels, ids);
    if (matrix.empty()) {
        throw DegenerateLabels("ablate: no labeled rows in " + features_csv);
    }

    TrainControl ctrl;
    ctrl.tol = config.svm_tol;
    ctrl.max_passes = config.svm_max_passes;
    ctrl.seed = derive_seed(config.seed, 0xab1a);
    const CvReport cv = grid_search(matrix, labels, config.cost_grid, config.gamma_grid,
                                    config.folds, derive_seed(config.seed, 0x9d0f), ctrl);

    const std::vector<std::pair<std::string, std::vector<int>>> subsets = {
        {"n_pb", feature_subset_npb()},
        {"n_pb+texture", feature_subset_npb_texture()},
        {"n_pb+geometry", feature_subset_npb_geometry()},
        {"all", feature_subset_all()},
    };

    std::vector<AblationRow> table;
    for (const auto& [name, subset] : subsets) {
        AblationRow row;
        row.subset_name = name;
        row.feature_count = static_cast<int>(subset.size());
        row.loo_accuracy = loo_accuracy(matrix, labels, cv.best.hp, subset, ctrl);
        table.push_back(std::move(row));
    }

    json doc;
    doc["hyperparams"] = {{"C", cv.best.hp.cost}, {"gamma", cv.best.hp.gamma}};
    doc["rows"] = json::array();
    for (const AblationRow& row : table) {
        doc["rows"].push_back({{"features", row.subset_name},
                               {"number_of_features", row.feature_count},
                               {"accuracy", row.loo_accuracy}});
    }
    write_text(out_path, doc.dump(2) + "\n");
    return table;
}

}  // namespace ovia
