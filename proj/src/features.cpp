#include "ovia/features.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ovia {

const std::array<const char*, kNumFeatures> kFeatureNames = {
    "mu_c", "e_c",   "gamma_c", "mu_z",  "e_z",   "gamma_z", "m",     "r",
    "n_pb", "S_pb",  "S_cc",    "E_LL3", "E_LH1", "E_HL1",   "E_HH1", "E_LH2",
    "E_HL2", "E_HH2", "E_LH3",  "E_HL3", "E_HH3", "mean",    "variance", "entropy",
};

std::vector<int> feature_subset_npb() {
    return {kIdxNpb};
}

std::vector<int> feature_subset_npb_texture() {
    std::vector<int> subset{kIdxNpb};
    for (int i = 11; i < kNumFeatures; ++i) subset.push_back(i);
    return subset;
}

std::vector<int> feature_subset_npb_geometry() {
    std::vector<int> subset;
    for (int i = 0; i < 11; ++i) subset.push_back(i);
    return subset;
}

std::vector<int> feature_subset_all() {
    std::vector<int> subset(kNumFeatures);
    for (int i = 0; i < kNumFeatures; ++i) subset[i] = i;
    return subset;
}

const char* viability_name(Viability v) {
    switch (v) {
        case Viability::Viable: return "viable";
        case Viability::Nonviable: return "nonviable";
        case Viability::Unknown: return "unknown";
    }
    return "unknown";
}

Viability viability_from_name(const std::string& name) {
    if (name == "viable") return Viability::Viable;
    if (name == "nonviable") return Viability::Nonviable;
    if (name == "unknown") return Viability::Unknown;
    throw Error("unknown viability label: '" + name + "'");
}

FeatureVector assemble_features(const GeometricFeatures& geo, const TextureFeatures& tex) {
    FeatureVector fv;
    fv.values[0] = geo.mu_c;
    fv.values[1] = geo.e_c;
    fv.values[2] = geo.gamma_c;
    fv.values[3] = geo.mu_z;
    fv.values[4] = geo.e_z;
    fv.values[5] = geo.gamma_z;
    fv.values[6] = geo.misalignment;
    fv.values[7] = geo.area_ratio;
    fv.values[8] = geo.n_pb;
    fv.values[9] = static_cast<double>(geo.s_pb);
    fv.values[10] = static_cast<double>(geo.s_cc);
    for (int b = 0; b < kNumBands; ++b) {
        fv.values[11 + b] = tex.energy[b];
    }
    fv.values[21] = tex.mean;
    fv.values[22] = tex.variance;
    fv.values[23] = tex.entropy;
    return fv;
}

FeatureVector extract_features(const Roi& roi, long polar_body_min_area) {
    const GeometricFeatures geo = compute_geometry(roi, polar_body_min_area);
    const TextureFeatures tex = compute_texture(roi);
    FeatureVector fv = assemble_features(geo, tex);
    fv.oocyte_id = roi.source_id;
    return fv;
}

NormStats fit_norm(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) {
        throw TooFewSamples("fit_norm: need at least 2 vectors, got " +
                            std::to_string(rows.size()));
    }
    const std::size_t dim = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != dim) {
            throw DimensionMismatch("fit_norm: inconsistent row widths");
        }
    }
    NormStats stats;
    stats.mean.assign(dim, 0.0);
    stats.stddev.assign(dim, 0.0);
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < dim; ++j) stats.mean[j] += row[j];
    }
    for (std::size_t j = 0; j < dim; ++j) stats.mean[j] /= static_cast<double>(rows.size());
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double d = row[j] - stats.mean[j];
            stats.stddev[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < dim; ++j) {
        stats.stddev[j] = std::sqrt(stats.stddev[j] / static_cast<double>(rows.size()));
    }
    return stats;
}

std::vector<double> apply_norm(const std::vector<double>& v, const NormStats& stats) {
    if (v.size() != stats.dim()) {
        throw DimensionMismatch("apply_norm: vector width " + std::to_string(v.size()) +
                                " does not match stats width " + std::to_string(stats.dim()));
    }
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        out[j] = stats.stddev[j] > 0.0 ? (v[j] - stats.mean[j]) / stats.stddev[j] : 0.0;
    }
    return out;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_feature_csv(const std::vector<FeatureVector>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open for writing: " + path);
    }
    out << "oocyte_id";
    for (const char* name : kFeatureNames) out << ',' << name;
    out << ",label\n";
    for (const FeatureVector& fv : rows) {
        out << fv.oocyte_id;
        for (double v : fv.values) out << ',' << format_double(v);
        out << ',' << viability_name(fv.label) << '\n';
    }
    out.flush();
    if (!out) {
        throw IoFailure("write failed: " + path);
    }
}

std::vector<FeatureVector> read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingFile("cannot open: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error("feature csv is empty: " + path);
    }
    std::vector<FeatureVector> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        FeatureVector fv;
        if (!std::getline(ss, field, ',')) continue;
        fv.oocyte_id = field;
        for (int j = 0; j < kNumFeatures; ++j) {
            if (!std::getline(ss, field, ',')) {
                throw Error("feature csv row too short: " + line);
            }
            fv.values[j] = std::stod(field);
        }
        if (!std::getline(ss, field, ',')) {
            throw Error("feature csv row missing label: " + line);
        }
        fv.label = viability_from_name(field);
        rows.push_back(std::move(fv));
    }
    return rows;
}

}  // namespace ovia
