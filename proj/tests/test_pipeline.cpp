#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ovia/pgm.hpp"
#include "ovia/pipeline.hpp"
#include "test_util.hpp"

using namespace ovia;
using ovia::test::TempDir;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunConfig small_config() {
    RunConfig config;
    config.seed = 2024;
    config.synth.scenes = 28;
    config.synth.width = 416;
    config.synth.height = 416;
    config.synth.min_oocytes = 1;
    config.synth.max_oocytes = 1;
    config.synth.noise_sigma = 3.0;
    return config;
}

}  // namespace

TEST_CASE("run_config: JSON round trip with defaults") {
    TempDir dir("cfg");
    RunConfig config;
    config.seed = 77;
    config.folds = 4;
    config.cost_grid = {0.5, 5.0};
    save_run_config(config, dir.file("config.json"));
    const RunConfig loaded = load_run_config(dir.file("config.json"));
    CHECK(loaded.seed == 77);
    CHECK(loaded.folds == 4);
    CHECK(loaded.cost_grid == std::vector<double>{0.5, 5.0});
    CHECK(loaded.localization_min_area == 10000);
    CHECK(loaded.polar_body_min_area == 500);
    CHECK(loaded.roi_side == 416);
    CHECK(loaded.localization_radius == 10.0);

    // Partial config files fall back to defaults.
    {
        std::ofstream out(dir.file("partial.json"));
        out << "{\"seed\": 5}";
    }
    const RunConfig partial = load_run_config(dir.file("partial.json"));
    CHECK(partial.seed == 5);
    CHECK(partial.folds == 5);
    CHECK(partial.gamma_grid.size() == 4);
}

TEST_CASE("run_synth: deterministic dataset on disk") {
    TempDir dir("synth");
    RunConfig config = small_config();
    config.synth.scenes = 3;

    const Manifest manifest = run_synth(config, dir.file("a"));
    CHECK(manifest.entries.size() == 3);
    const Manifest reloaded = load_manifest(dir.file("a") + "/manifest.json");
    CHECK(reloaded.entries.size() == 3);
    for (const auto& entry : reloaded.entries) {
        CHECK(fs::exists(entry.image_path));
        CHECK(fs::exists(entry.mask_path));
        CHECK(entry.oocytes.size() == 1);
        CHECK(entry.true_viable_count.has_value());
    }

    run_synth(config, dir.file("b"));
    CHECK(slurp(dir.file("a") + "/manifest.json") == slurp(dir.file("b") + "/manifest.json"));
    CHECK(slurp(dir.file("a") + "/scene_000/image.pgm") ==
          slurp(dir.file("b") + "/scene_000/image.pgm"));
    CHECK(slurp(dir.file("a") + "/scene_000/truth.json") ==
          slurp(dir.file("b") + "/scene_000/truth.json"));
}

TEST_CASE("run_localize: zero ROIs on an all-background mask") {
    TempDir dir("loc");
    GrayImage image(416, 416, 180);
    LabelMask mask(416, 416);
    save_gray_image(image, dir.file("img.pgm"));
    save_label_mask(mask, dir.file("msk.pgm"));
    Manifest manifest;
    ManifestEntry entry;
    entry.image_path = dir.file("img.pgm");
    entry.mask_path = dir.file("msk.pgm");
    entry.id = "img";
    manifest.entries.push_back(entry);

    const LocalizeReport report = run_localize(manifest, RunConfig{}, dir.file("out"));
    CHECK(report.images.size() == 1);
    CHECK(report.images[0].detected_count == 0);
    const auto rois = nlohmann::json::parse(slurp(dir.file("out") + "/rois.json"));
    CHECK(rois.empty());
}

TEST_CASE("run_localize: frame smaller than the ROI side") {
    TempDir dir("loc");
    GrayImage image(300, 300, 180);
    LabelMask mask(300, 300);
    for (int y = 80; y < 220; ++y)
        for (int x = 80; x < 220; ++x) mask.at(x, y) = 1;
    save_gray_image(image, dir.file("img.pgm"));
    save_label_mask(mask, dir.file("msk.pgm"));
    Manifest manifest;
    ManifestEntry entry;
    entry.image_path = dir.file("img.pgm");
    entry.mask_path = dir.file("msk.pgm");
    entry.id = "img";
    manifest.entries.push_back(entry);

    CHECK_THROWS_AS(run_localize(manifest, RunConfig{}, dir.file("out")), FrameTooSmall);
}

TEST_CASE("pipeline end to end on a synthetic dataset") {
    TempDir dir("e2e");
    const RunConfig config = small_config();

    const Manifest manifest = run_synth(config, dir.file("data"));
    const LocalizeReport loc = run_localize(manifest, config, dir.file("rois"));
    CHECK(loc.images_with_count_match == static_cast<int>(manifest.entries.size()));
    CHECK(loc.fraction_within_radius == doctest::Approx(1.0));

    const auto rows =
        run_extract(dir.file("rois") + "/rois.json", config, dir.file("features.csv"));
    CHECK(rows.size() == manifest.entries.size());
    int viable = 0, nonviable = 0;
    for (const auto& fv : rows) {
        if (fv.label == Viability::Viable) ++viable;
        if (fv.label == Viability::Nonviable) ++nonviable;
    }
    REQUIRE(viable >= 5);
    REQUIRE(nonviable >= 5);

    const SvmModel model = run_train(dir.file("features.csv"), config, dir.file("model.json"),
                                     dir.file("cv_report.json"));
    CHECK(model.converged);
    run_predict(dir.file("model.json"), dir.file("features.csv"), dir.file("predictions.csv"));

    EvaluateInputs inputs;
    inputs.predictions_csv = dir.file("predictions.csv");
    inputs.rois_json = dir.file("rois") + "/rois.json";
    inputs.manifest_path = dir.file("data") + "/manifest.json";
    inputs.pred_mask_dir = dir.file("data");  // ground truth as "predictions"
    inputs.localization_report = dir.file("rois") + "/localization_report.json";
    run_evaluate(inputs, config, dir.file("report.json"), dir.file("roc.csv"));

    const auto report = nlohmann::json::parse(slurp(dir.file("report.json")));
    // Training data is separable and predictions are on the training set:
    // the confusion matrix is clean and the count errors vanish.
    CHECK(report["metrics"]["accuracy"].get<double>() == doctest::Approx(1.0));
    CHECK(report["roc"]["auc"].get<double>() == doctest::Approx(1.0));
    CHECK(report["count_error"]["model"]["mae"].get<double>() == doctest::Approx(0.0));
    CHECK(report["count_error"]["expert"]["mae"].get<double>() == doctest::Approx(0.0));
    CHECK(report["count_error"]["ks_model_vs_expert"].get<double>() == doctest::Approx(0.0));
    for (const char* cls : {"background", "cytoplasm", "zona_pellucida", "polar_body",
                            "cumulus_cells"}) {
        CHECK(report["iou"][cls].get<double>() == doctest::Approx(1.0));
    }
    CHECK(report["localization"]["fraction_within_radius"].get<double>() ==
          doctest::Approx(1.0));

    const auto ablation = run_ablate(dir.file("features.csv"), config, dir.file("ablation.json"));
    REQUIRE(ablation.size() == 4);
    CHECK(ablation[0].feature_count == 1);
    CHECK(ablation[1].feature_count == 14);
    CHECK(ablation[2].feature_count == 11);
    CHECK(ablation[3].feature_count == 24);
    CHECK(ablation[3].loo_accuracy >= ablation[0].loo_accuracy);

    // Rerunning every stage with the same seed is byte-identical.
    TempDir dir2("e2e_rerun");
    run_synth(config, dir2.file("data"));
    const Manifest manifest2 = load_manifest(dir2.file("data") + "/manifest.json");
    run_localize(manifest2, config, dir2.file("rois"));
    run_extract(dir2.file("rois") + "/rois.json", config, dir2.file("features.csv"));
    run_train(dir2.file("features.csv"), config, dir2.file("model.json"),
              dir2.file("cv_report.json"));
    run_predict(dir2.file("model.json"), dir2.file("features.csv"),
                dir2.file("predictions.csv"));
    CHECK(slurp(dir.file("features.csv")) == slurp(dir2.file("features.csv")));
    CHECK(slurp(dir.file("model.json")) == slurp(dir2.file("model.json")));
    CHECK(slurp(dir.file("predictions.csv")) == slurp(dir2.file("predictions.csv")));
}

TEST_CASE("load_manifest: validation") {
    TempDir dir("man");
    save_gray_image(GrayImage(8, 8, 1), dir.file("img.pgm"));
    save_label_mask(LabelMask(8, 8), dir.file("msk.pgm"));

    auto write_manifest = [&](const std::string& body) {
        std::ofstream out(dir.file("manifest.json"));
        out << body;
    };

    SUBCASE("referenced files must exist") {
        write_manifest(R"({"entries":[{"image":"gone.pgm","mask":"msk.pgm",
                           "oocytes":[],"true_viable_count":null}]})");
        CHECK_THROWS_AS(load_manifest(dir.file("manifest.json")), MissingFile);
    }
    SUBCASE("true_viable_count bounded by the oocyte list") {
        write_manifest(R"({"entries":[{"image":"img.pgm","mask":"msk.pgm",
                           "oocytes":[{"cx":1,"cy":1,"viable":true}],
                           "true_viable_count":2}]})");
        CHECK_THROWS_AS(load_manifest(dir.file("manifest.json")), InvalidManifest);
    }
    SUBCASE("true_viable_count must be nonnegative") {
        write_manifest(R"({"entries":[{"image":"img.pgm","mask":"msk.pgm",
                           "oocytes":[{"cx":1,"cy":1,"viable":true}],
                           "true_viable_count":-1}]})");
        CHECK_THROWS_AS(load_manifest(dir.file("manifest.json")), InvalidManifest);
    }
    SUBCASE("null count and a valid entry load fine") {
        write_manifest(R"({"entries":[{"image":"img.pgm","mask":"msk.pgm",
                           "oocytes":[{"cx":1,"cy":1,"viable":true}],
                           "true_viable_count":null}]})");
        const Manifest m = load_manifest(dir.file("manifest.json"));
        REQUIRE(m.entries.size() == 1);
        CHECK_FALSE(m.entries[0].true_viable_count.has_value());
        CHECK(m.entries[0].oocytes.size() == 1);
    }
    SUBCASE("non-JSON input") {
        write_manifest("not json at all {");
        CHECK_THROWS_AS(load_manifest(dir.file("manifest.json")), InvalidManifest);
    }
}

TEST_CASE("run_train: single-class csv is rejected") {
    TempDir dir("train");
    std::vector<FeatureVector> rows(6);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].oocyte_id = "oo_" + std::to_string(i);
        rows[i].values.fill(static_cast<double>(i));
        rows[i].label = Viability::Viable;
    }
    write_feature_csv(rows, dir.file("features.csv"));
    CHECK_THROWS_AS(run_train(dir.file("features.csv"), RunConfig{}, dir.file("model.json"),
                              dir.file("cv.json")),
                    Error);
}

TEST_CASE("run_extract: rows with missing classes are skipped") {
    TempDir dir("skip");
    // One good ROI and one whose mask lacks a zona.
    OocyteSpec oo;
    oo.cytoplasm = {208, 208, 100, 100, 0};
    oo.zona_outer = {208, 208, 135, 135, 0};
    const Scene good = generate_scene({416, 416, {oo}, 0.0, 3});
    LabelMask broken = good.mask;
    for (auto& v : broken.labels) {
        if (v == 2) v = 0;
    }
    save_gray_image(good.image, dir.file("a_image.pgm"));
    save_label_mask(good.mask, dir.file("a_mask.pgm"));
    save_gray_image(good.image, dir.file("b_image.pgm"));
    save_label_mask(broken, dir.file("b_mask.pgm"));
    {
        std::ofstream out(dir.file("rois.json"));
        out << R"([{"id":"a","source_image":"img","center":[208,208],
                    "image":"a_image.pgm","mask":"a_mask.pgm","label":"viable"},
                   {"id":"b","source_image":"img","center":[208,208],
                    "image":"b_image.pgm","mask":"b_mask.pgm","label":"nonviable"}])";
    }
    const auto rows = run_extract(dir.file("rois.json"), RunConfig{}, dir.file("features.csv"));
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].oocyte_id == "a");
}
