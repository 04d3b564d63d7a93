#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ovia/geometry.hpp"
#include "ovia/morphology.hpp"
#include "ovia/texture.hpp"

namespace ovia {

inline constexpr int kNumFeatures = 24;

/// Canonical feature order; also the CSV column names.
extern const std::array<const char*, kNumFeatures> kFeatureNames;

/// Canonical indices of the named feature groups (ablation subsets).
inline constexpr int kIdxNpb = 8;
std::vector<int> feature_subset_npb();           // {n_pb}
std::vector<int> feature_subset_npb_texture();   // {n_pb} + 13 texture
std::vector<int> feature_subset_npb_geometry();  // {n_pb} + 10 other geometric
std::vector<int> feature_subset_all();           // all 24

enum class Viability { Nonviable, Viable, Unknown };

const char* viability_name(Viability v);
Viability viability_from_name(const std::string& name);

struct FeatureVector {
    std::string oocyte_id;
    std::array<double, kNumFeatures> values{};
    Viability label = Viability::Unknown;
};

/// Per-feature z-score statistics fitted on training data.
struct NormStats {
    std::vector<double> mean;
    std::vector<double> stddev;  // population std

    std::size_t dim() const { return mean.size(); }
};

/// Concatenation of the geometric and texture features in canonical order.
FeatureVector extract_features(const Roi& roi, long polar_body_min_area = kPolarBodyMinArea);

FeatureVector assemble_features(const GeometricFeatures& geo, const TextureFeatures& tex);

/// Per-column mean and population std. Throws TooFewSamples (<2 rows).
NormStats fit_norm(const std::vector<std::vector<double>>& rows);

/// (x - mean)/std per feature; zero-std features map to 0.
std::vector<double> apply_norm(const std::vector<double>& v, const NormStats& stats);

// Feature CSV: header `oocyte_id,<24 canonical names>,label`, one row per
// oocyte, labels viable|nonviable|unknown.
void write_feature_csv(const std::vector<FeatureVector>& rows, const std::string& path);
std::vector<FeatureVector> read_feature_csv(const std::string& path);

}  // namespace ovia
