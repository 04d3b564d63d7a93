#pragma once

#include <cstdint>
#include <vector>

#include "ovia/geometry.hpp"
#include "ovia/image.hpp"
#include "ovia/rng.hpp"

namespace ovia {

/// One polar body: a disc placed in the perivitelline gap at the given
/// parametric angle (radians, measured from the zona center).
struct PolarBodySpec {
    double angle = 0.0;
    double radius = 0.0;
};

/// Analytic description of one synthetic oocyte. Invariant: the cytoplasm
/// ellipse lies strictly inside the zona outer ellipse; semi-axes > 0.
struct OocyteSpec {
    Ellipse cytoplasm;
    Ellipse zona_outer;
    std::vector<PolarBodySpec> polar_bodies;
    bool cumulus = false;
    double cumulus_angle = 0.0;
    double cumulus_radius = 0.0;
    double base_intensity = 120.0;        // cytoplasm base gray level
    double granularity_amplitude = 0.0;   // value-noise amplitude in the cytoplasm
    double granularity_scale = 3.0;       // lattice cell size in pixels
    bool viable = false;
    bool fully_visible = true;
};

struct SceneSpec {
    int width = 0;
    int height = 0;
    std::vector<OocyteSpec> oocytes;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

/// Exact feature values implied by an OocyteSpec (continuous areas, no
/// rasterization). gamma is 1 by construction for a perfect ellipse.
struct ReferenceFeatures {
    double mu_c = 0.0;
    double e_c = 0.0;
    double gamma_c = 1.0;
    double mu_z = 0.0;
    double e_z = 0.0;
    double gamma_z = 1.0;
    double misalignment = 0.0;
    double area_ratio = 0.0;
    int n_pb = 0;
    double s_pb = 0.0;
};

struct OocyteTruth {
    double center_x = 0.0;  // cytoplasm ellipse center
    double center_y = 0.0;
    bool viable = false;
    ReferenceFeatures ref;
};

struct Scene {
    GrayImage image;
    LabelMask mask;
    std::vector<OocyteTruth> truth;
};

// Synthetic viability rule: viable iff exactly one polar body, cytoplasm
// eccentricity < 0.4, and granularity amplitude below the threshold.
inline constexpr double kViableMaxEccentricity = 0.4;
inline constexpr double kViableMaxGranularity = 10.0;

bool synthetic_viability(const OocyteSpec& spec);

/// Rasterizes the scene: labels by exact point-in-ellipse tests (polar-body
/// discs clipped to the perivitelline gap, cumulus patches fill background
/// only), intensities = per-class base + cytoplasm value-noise + Gaussian
/// noise, clamped to 0..255. Deterministic for a fixed seed. Throws
/// SpecOutOfFrame if an oocyte marked fully visible exits the frame.
Scene generate_scene(const SceneSpec& spec);

/// Exact feature values from the oocyte description via the same formulas the
/// geometry module implements.
ReferenceFeatures reference_features(const OocyteSpec& spec);

/// Distribution knobs for randomly sampled oocytes. Defaults produce the
/// classification dataset mix: informative n_pb, eccentricity, and
/// granularity with margins around the viability thresholds.
struct OocyteSampler {
    double min_semi_axis = 75.0;
    double max_semi_axis = 110.0;
    double min_gap = 34.0;
    double max_gap = 44.0;
    double max_misalignment = 8.0;
    double round_fraction = 0.75;        // P(e in the low band)
    double low_ecc_max = 0.30;
    double high_ecc_min = 0.45;
    double high_ecc_max = 0.60;
    double single_pb_fraction = 0.75;    // else 0 or 2 polar bodies
    double low_granularity_fraction = 0.80;
    double low_granularity_max = 6.0;
    double high_granularity_min = 18.0;
    double high_granularity_max = 30.0;
    double cumulus_fraction = 0.30;
};

/// Samples one oocyte centered near (cx, cy); viable flag set by the
/// synthetic viability rule.
OocyteSpec sample_oocyte(Rng& rng, double cx, double cy, const OocyteSampler& sampler = {});

/// Samples a full scene with `count` non-overlapping oocytes placed on a
/// jittered grid. Throws Error if the frame cannot hold that many.
SceneSpec sample_scene(std::uint64_t seed, int width, int height, int count, double noise_sigma,
                       const OocyteSampler& sampler = {});

}  // namespace ovia
