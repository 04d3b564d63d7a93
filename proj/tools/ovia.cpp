// ovia: oocyte localization, feature extraction, viability classification,
// and evaluation over segmentation masks, plus a synthetic scene generator
// with analytic ground truth.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ovia/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

ovia::RunConfig resolve_config(const CommonOpts& opts) {
    ovia::RunConfig config;
    if (!opts.config_path.empty()) {
        config = ovia::load_run_config(opts.config_path);
    }
    if (opts.seed_set) {
        config.seed = opts.seed;
    }
    return config;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "override the config seed")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oocyte viability analysis pipeline"};
    app.require_subcommand(1);

    CommonOpts opts;

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic scenes with ground truth");
    std::string synth_out = "dataset";
    int synth_scenes = -1;
    add_common(synth, opts);
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--scenes", synth_scenes, "number of scenes (overrides config)");

    // localize
    auto* localize = app.add_subcommand("localize", "detect oocytes and cut ROIs from masks");
    std::string localize_manifest;
    std::string localize_out = "rois";
    add_common(localize, opts);
    localize->add_option("--manifest", localize_manifest, "dataset manifest.json")->required();
    localize->add_option("--out", localize_out, "output directory");

    // extract
    auto* extract = app.add_subcommand("extract", "compute the 24-feature vector per ROI");
    std::string extract_rois;
    std::string extract_out = "features.csv";
    add_common(extract, opts);
    extract->add_option("--rois", extract_rois, "rois.json written by localize")->required();
    extract->add_option("--out", extract_out, "output feature CSV");

    // train
    auto* train = app.add_subcommand("train", "grid-search and train the RBF SVM");
    std::string train_features;
    std::string train_model = "model.json";
    std::string train_cv = "cv_report.json";
    add_common(train, opts);
    train->add_option("--features", train_features, "feature CSV")->required();
    train->add_option("--model", train_model, "output model file");
    train->add_option("--cv-report", train_cv, "output CV report");

    // predict
    auto* predict = app.add_subcommand("predict", "label oocytes with a trained model");
    std::string predict_model;
    std::string predict_features;
    std::string predict_out = "predictions.csv";
    add_common(predict, opts);
    predict->add_option("--model", predict_model, "model file")->required();
    predict->add_option("--features", predict_features, "feature CSV")->required();
    predict->add_option("--out", predict_out, "output predictions CSV");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "assemble the evaluation report");
    ovia::EvaluateInputs eval_inputs;
    std::string eval_pred_masks;
    std::string eval_loc_report;
    std::string eval_report = "report.json";
    std::string eval_roc = "roc.csv";
    add_common(evaluate, opts);
    evaluate->add_option("--predictions", eval_inputs.predictions_csv, "predictions CSV")
        ->required();
    evaluate->add_option("--rois", eval_inputs.rois_json, "rois.json written by localize")
        ->required();
    evaluate->add_option("--manifest", eval_inputs.manifest_path, "dataset manifest.json")
        ->required();
    evaluate->add_option("--pred-masks", eval_pred_masks,
                         "directory of predicted masks mirroring the dataset layout");
    evaluate->add_option("--localization-report", eval_loc_report,
                         "localization_report.json to embed");
    evaluate->add_option("--report", eval_report, "output report JSON");
    evaluate->add_option("--roc", eval_roc, "output ROC CSV");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "LOO accuracy for the four feature subsets");
    std::string ablate_features;
    std::string ablate_out = "ablation.json";
    add_common(ablate, opts);
    ablate->add_option("--features", ablate_features, "feature CSV")->required();
    ablate->add_option("--out", ablate_out, "output ablation table JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const ovia::RunConfig base = resolve_config(opts);

        if (synth->parsed()) {
            ovia::RunConfig config = base;
            if (synth_scenes >= 0) config.synth.scenes = synth_scenes;
            const ovia::Manifest manifest = ovia::run_synth(config, synth_out);
            std::cout << "wrote " << manifest.entries.size() << " scenes to " << synth_out
                      << "\n";
        } else if (localize->parsed()) {
            const ovia::Manifest manifest = ovia::load_manifest(localize_manifest);
            const ovia::LocalizeReport report = ovia::run_localize(manifest, base, localize_out);
            int rois = 0;
            for (const auto& img : report.images) rois += img.detected_count;
            std::cout << "localized " << rois << " oocytes in " << report.images.size()
                      << " images (" << report.images_with_count_match
                      << " with matching counts)\n";
        } else if (extract->parsed()) {
            const auto rows = ovia::run_extract(extract_rois, base, extract_out);
            std::cout << "wrote " << rows.size() << " feature rows to " << extract_out << "\n";
        } else if (train->parsed()) {
            const ovia::SvmModel model = ovia::run_train(train_features, base, train_model,
                                                         train_cv);
            std::printf("trained model: C=%g gamma=%g, %zu support vectors%s\n", model.hp.cost,
                        model.hp.gamma, model.support_vectors.size(),
                        model.converged ? "" : " (not converged)");
        } else if (predict->parsed()) {
            ovia::run_predict(predict_model, predict_features, predict_out);
            std::cout << "wrote predictions to " << predict_out << "\n";
        } else if (evaluate->parsed()) {
            if (!eval_pred_masks.empty()) eval_inputs.pred_mask_dir = eval_pred_masks;
            if (!eval_loc_report.empty()) eval_inputs.localization_report = eval_loc_report;
            ovia::run_evaluate(eval_inputs, base, eval_report, eval_roc);
            std::cout << "wrote report to " << eval_report << "\n";
        } else if (ablate->parsed()) {
            const auto table = ovia::run_ablate(ablate_features, base, ablate_out);
            std::printf("%-14s %-18s %s\n", "features", "number of features", "accuracy");
            for (const auto& row : table) {
                std::printf("%-14s %-18d %.3f\n", row.subset_name.c_str(), row.feature_count,
                            row.loo_accuracy);
            }
        }
    } catch (const ovia::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
