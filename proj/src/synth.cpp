#include "ovia/synth.hpp"

#include <algorithm>
#include <cmath>

namespace ovia {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Per-class base gray levels (bright-field look: light background, darker
// structures). Cytoplasm uses the per-oocyte base intensity instead.
constexpr double kBackgroundIntensity = 200.0;
constexpr double kZonaIntensity = 170.0;
constexpr double kPolarBodyIntensity = 90.0;
constexpr double kCumulusIntensity = 60.0;

struct EllipseFrame {
    double cx, cy, cos_t, sin_t, inv_a2, inv_b2, a, b;

    explicit EllipseFrame(const Ellipse& e)
        : cx(e.cx),
          cy(e.cy),
          cos_t(std::cos(e.theta)),
          sin_t(std::sin(e.theta)),
          inv_a2(1.0 / (e.a * e.a)),
          inv_b2(1.0 / (e.b * e.b)),
          a(e.a),
          b(e.b) {}

    /// Quadratic form value; < 1 inside, = 1 on the boundary.
    double eval(double x, double y) const {
        const double dx = x - cx;
        const double dy = y - cy;
        const double u = cos_t * dx + sin_t * dy;
        const double v = -sin_t * dx + cos_t * dy;
        return u * u * inv_a2 + v * v * inv_b2;
    }

    bool contains(double x, double y) const { return eval(x, y) <= 1.0; }
};

/// Axis-aligned half-extents of a rotated ellipse.
void ellipse_half_extents(const Ellipse& e, double& hx, double& hy) {
    const double c = std::cos(e.theta);
    const double s = std::sin(e.theta);
    hx = std::sqrt(e.a * e.a * c * c + e.b * e.b * s * s);
    hy = std::sqrt(e.a * e.a * s * s + e.b * e.b * c * c);
}

/// Distance from `origin` along direction `phi` to the ellipse boundary
/// (largest real root); negative when the ray misses.
double ray_exit_distance(const Ellipse& ell, double ox, double oy, double phi) {
    const EllipseFrame frame(ell);
    const double dx = std::cos(phi);
    const double dy = std::sin(phi);
    const double uo = frame.cos_t * (ox - frame.cx) + frame.sin_t * (oy - frame.cy);
    const double vo = -frame.sin_t * (ox - frame.cx) + frame.cos_t * (oy - frame.cy);
    const double ud = frame.cos_t * dx + frame.sin_t * dy;
    const double vd = -frame.sin_t * dx + frame.cos_t * dy;
    const double qa = ud * ud * frame.inv_a2 + vd * vd * frame.inv_b2;
    const double qb = 2.0 * (uo * ud * frame.inv_a2 + vo * vd * frame.inv_b2);
    const double qc = uo * uo * frame.inv_a2 + vo * vo * frame.inv_b2 - 1.0;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return -1.0;
    return (-qb + std::sqrt(disc)) / (2.0 * qa);
}

/// Smooth deterministic value noise in [-1, 1] at lattice scale `scale`.
double value_noise(std::uint64_t seed, double x, double y, double scale) {
    const double gx = x / scale;
    const double gy = y / scale;
    const double fx0 = std::floor(gx);
    const double fy0 = std::floor(gy);
    const long i0 = static_cast<long>(fx0);
    const long j0 = static_cast<long>(fy0);
    const double tx = gx - fx0;
    const double ty = gy - fy0;
    const double wx = tx * tx * (3.0 - 2.0 * tx);
    const double wy = ty * ty * (3.0 - 2.0 * ty);

    auto lattice = [seed](long i, long j) {
        const std::uint64_t h =
            splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(i)) ^
                       static_cast<std::uint64_t>(j) * 0x9e3779b97f4a7c15ULL);
        return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;  // [-1, 1)
    };
    const double v00 = lattice(i0, j0);
    const double v10 = lattice(i0 + 1, j0);
    const double v01 = lattice(i0, j0 + 1);
    const double v11 = lattice(i0 + 1, j0 + 1);
    const double top = v00 + wx * (v10 - v00);
    const double bottom = v01 + wx * (v11 - v01);
    return top + wy * (bottom - top);
}

struct PlacedPolarBody {
    double cx, cy, radius;
};

std::vector<PlacedPolarBody> place_polar_bodies(const OocyteSpec& oocyte) {
    std::vector<PlacedPolarBody> placed;
    for (const PolarBodySpec& pb : oocyte.polar_bodies) {
        const double r_in =
            ray_exit_distance(oocyte.cytoplasm, oocyte.zona_outer.cx, oocyte.zona_outer.cy,
                              pb.angle);
        const double r_out = ray_exit_distance(oocyte.zona_outer, oocyte.zona_outer.cx,
                                               oocyte.zona_outer.cy, pb.angle);
        if (r_in <= 0.0 || r_out <= r_in) continue;
        const double mid = (r_in + r_out) / 2.0;
        placed.push_back({oocyte.zona_outer.cx + mid * std::cos(pb.angle),
                          oocyte.zona_outer.cy + mid * std::sin(pb.angle), pb.radius});
    }
    return placed;
}

void check_spec(const SceneSpec& spec) {
    for (std::size_t k = 0; k < spec.oocytes.size(); ++k) {
        const OocyteSpec& oo = spec.oocytes[k];
        if (oo.cytoplasm.a <= 0.0 || oo.cytoplasm.b <= 0.0 || oo.zona_outer.a <= 0.0 ||
            oo.zona_outer.b <= 0.0 || oo.cytoplasm.a < oo.cytoplasm.b ||
            oo.zona_outer.a < oo.zona_outer.b) {
            throw Error("generate_scene: oocyte " + std::to_string(k) + " has invalid semi-axes");
        }
        const EllipseFrame outer(oo.zona_outer);
        for (int s = 0; s < 256; ++s) {
            const double t = 2.0 * kPi * s / 256.0;
            const double u = oo.cytoplasm.a * std::cos(t);
            const double v = oo.cytoplasm.b * std::sin(t);
            const double ct = std::cos(oo.cytoplasm.theta);
            const double st = std::sin(oo.cytoplasm.theta);
            const double px = oo.cytoplasm.cx + ct * u - st * v;
            const double py = oo.cytoplasm.cy + st * u + ct * v;
            if (outer.eval(px, py) >= 1.0) {
                throw Error("generate_scene: oocyte " + std::to_string(k) +
                            " cytoplasm not strictly inside zona");
            }
        }
        if (oo.fully_visible) {
            double hx, hy;
            ellipse_half_extents(oo.zona_outer, hx, hy);
            if (oo.zona_outer.cx - hx < 0.0 || oo.zona_outer.cx + hx > spec.width - 1 ||
                oo.zona_outer.cy - hy < 0.0 || oo.zona_outer.cy + hy > spec.height - 1) {
                throw SpecOutOfFrame("generate_scene: fully visible oocyte " + std::to_string(k) +
                                     " exits the frame");
            }
        }
    }
}

}  // namespace

bool synthetic_viability(const OocyteSpec& spec) {
    const double ecc =
        std::sqrt(std::max(0.0, 1.0 - (spec.cytoplasm.b * spec.cytoplasm.b) /
                                          (spec.cytoplasm.a * spec.cytoplasm.a)));
    return spec.polar_bodies.size() == 1 && ecc < kViableMaxEccentricity &&
           spec.granularity_amplitude < kViableMaxGranularity;
}

ReferenceFeatures reference_features(const OocyteSpec& spec) {
    ReferenceFeatures ref;
    ref.mu_c = (spec.cytoplasm.a + spec.cytoplasm.b) / 2.0;
    ref.e_c = std::sqrt(std::max(0.0, 1.0 - (spec.cytoplasm.b * spec.cytoplasm.b) /
                                                (spec.cytoplasm.a * spec.cytoplasm.a)));
    ref.gamma_c = 1.0;
    ref.mu_z = (spec.zona_outer.a + spec.zona_outer.b) / 2.0;
    ref.e_z = std::sqrt(std::max(0.0, 1.0 - (spec.zona_outer.b * spec.zona_outer.b) /
                                                (spec.zona_outer.a * spec.zona_outer.a)));
    ref.gamma_z = 1.0;
    const double dx = spec.cytoplasm.cx - spec.zona_outer.cx;
    const double dy = spec.cytoplasm.cy - spec.zona_outer.cy;
    ref.misalignment = std::sqrt(dx * dx + dy * dy);
    ref.area_ratio =
        (spec.cytoplasm.a * spec.cytoplasm.b) / (spec.zona_outer.a * spec.zona_outer.b);
    ref.n_pb = static_cast<int>(spec.polar_bodies.size());
    ref.s_pb = 0.0;
    for (const PolarBodySpec& pb : spec.polar_bodies) {
        ref.s_pb += kPi * pb.radius * pb.radius;
    }
    return ref;
}

Scene generate_scene(const SceneSpec& spec) {
    check_spec(spec);

    Scene scene;
    scene.mask = LabelMask(spec.width, spec.height, 0);
    RealRaster intensity(spec.width, spec.height, kBackgroundIntensity);

    for (std::size_t k = 0; k < spec.oocytes.size(); ++k) {
        const OocyteSpec& oo = spec.oocytes[k];
        const EllipseFrame inner(oo.cytoplasm);
        const EllipseFrame outer(oo.zona_outer);
        const auto polar_bodies = place_polar_bodies(oo);
        const std::uint64_t texture_seed = derive_seed(spec.seed, 0x7e0a + k);

        double cumulus_cx = 0.0, cumulus_cy = 0.0;
        if (oo.cumulus) {
            const double reach =
                ray_exit_distance(oo.zona_outer, oo.zona_outer.cx, oo.zona_outer.cy,
                                  oo.cumulus_angle) +
                0.6 * oo.cumulus_radius;
            cumulus_cx = oo.zona_outer.cx + reach * std::cos(oo.cumulus_angle);
            cumulus_cy = oo.zona_outer.cy + reach * std::sin(oo.cumulus_angle);
        }

        // Bounding box over every primitive this oocyte can touch.
        double hx, hy;
        ellipse_half_extents(oo.zona_outer, hx, hy);
        double x_lo = oo.zona_outer.cx - hx, x_hi = oo.zona_outer.cx + hx;
        double y_lo = oo.zona_outer.cy - hy, y_hi = oo.zona_outer.cy + hy;
        if (oo.cumulus) {
            x_lo = std::min(x_lo, cumulus_cx - oo.cumulus_radius);
            x_hi = std::max(x_hi, cumulus_cx + oo.cumulus_radius);
            y_lo = std::min(y_lo, cumulus_cy - oo.cumulus_radius);
            y_hi = std::max(y_hi, cumulus_cy + oo.cumulus_radius);
        }
        const int bx0 = std::max(0, static_cast<int>(std::floor(x_lo)) - 1);
        const int bx1 = std::min(spec.width - 1, static_cast<int>(std::ceil(x_hi)) + 1);
        const int by0 = std::max(0, static_cast<int>(std::floor(y_lo)) - 1);
        const int by1 = std::min(spec.height - 1, static_cast<int>(std::ceil(y_hi)) + 1);

        for (int y = by0; y <= by1; ++y) {
            for (int x = bx0; x <= bx1; ++x) {
                if (scene.mask.at(x, y) != 0) continue;  // first oocyte wins

                const double px = x;
                const double py = y;
                std::uint8_t label = 0;
                double value = kBackgroundIntensity;

                const bool in_outer = outer.contains(px, py);
                const bool in_inner = in_outer && inner.contains(px, py);
                bool in_pb = false;
                if (in_outer && !in_inner) {
                    for (const PlacedPolarBody& pb : polar_bodies) {
                        const double dx = px - pb.cx;
                        const double dy = py - pb.cy;
                        if (dx * dx + dy * dy <= pb.radius * pb.radius) {
                            in_pb = true;
                            break;
                        }
                    }
                }

                if (in_pb) {
                    label = static_cast<std::uint8_t>(LabelClass::PolarBody);
                    value = kPolarBodyIntensity;
                } else if (in_inner) {
                    label = static_cast<std::uint8_t>(LabelClass::Cytoplasm);
                    value = oo.base_intensity +
                            oo.granularity_amplitude *
                                value_noise(texture_seed, px, py, oo.granularity_scale);
                } else if (in_outer) {
                    label = static_cast<std::uint8_t>(LabelClass::ZonaPellucida);
                    value = kZonaIntensity;
                } else if (oo.cumulus) {
                    const double dx = px - cumulus_cx;
                    const double dy = py - cumulus_cy;
                    if (dx * dx + dy * dy <= oo.cumulus_radius * oo.cumulus_radius) {
                        label = static_cast<std::uint8_t>(LabelClass::CumulusCells);
                        value = kCumulusIntensity;
                    }
                }

                if (label != 0) {
                    scene.mask.at(x, y) = label;
                    intensity.at(x, y) = value;
                }
            }
        }

        OocyteTruth truth;
        truth.center_x = oo.cytoplasm.cx;
        truth.center_y = oo.cytoplasm.cy;
        truth.viable = oo.viable;
        truth.ref = reference_features(oo);
        scene.truth.push_back(truth);
    }

    Rng noise(derive_seed(spec.seed, 0x6e01));
    scene.image = GrayImage(spec.width, spec.height);
    for (std::size_t i = 0; i < intensity.values.size(); ++i) {
        double v = intensity.values[i];
        if (spec.noise_sigma > 0.0) {
            v += noise.gaussian(0.0, spec.noise_sigma);
        }
        scene.image.pixels[i] =
            static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
    return scene;
}

OocyteSpec sample_oocyte(Rng& rng, double cx, double cy, const OocyteSampler& sampler) {
    OocyteSpec oo;
    const double theta = rng.uniform(0.0, kPi);
    const double a_c = rng.uniform(sampler.min_semi_axis, sampler.max_semi_axis);
    const double ecc = rng.bernoulli(sampler.round_fraction)
                           ? rng.uniform(0.0, sampler.low_ecc_max)
                           : rng.uniform(sampler.high_ecc_min, sampler.high_ecc_max);
    const double b_c = a_c * std::sqrt(1.0 - ecc * ecc);
    const double gap = rng.uniform(sampler.min_gap, sampler.max_gap);
    const double mis = rng.uniform(0.0, sampler.max_misalignment);
    const double mis_angle = rng.uniform(0.0, 2.0 * kPi);

    oo.zona_outer = {cx, cy, a_c + gap + 2.0 * mis, b_c + gap + 2.0 * mis, theta};
    oo.cytoplasm = {cx + mis * std::cos(mis_angle), cy + mis * std::sin(mis_angle), a_c, b_c,
                    theta};

    int pb_count = 1;
    if (!rng.bernoulli(sampler.single_pb_fraction)) {
        pb_count = rng.bernoulli(0.5) ? 0 : 2;
    }
    const double base_angle = rng.uniform(0.0, 2.0 * kPi);
    for (int i = 0; i < pb_count; ++i) {
        const double angle = base_angle + i * (2.0 * kPi / 3.0);
        const double r_in = ray_exit_distance(oo.cytoplasm, cx, cy, angle);
        const double r_out = ray_exit_distance(oo.zona_outer, cx, cy, angle);
        const double cap = 0.45 * (r_out - r_in);
        if (cap < 13.0) continue;  // too thin along this ray; skip the disc
        oo.polar_bodies.push_back({angle, rng.uniform(13.0, std::min(17.0, cap))});
    }

    oo.granularity_amplitude = rng.bernoulli(sampler.low_granularity_fraction)
                                   ? rng.uniform(0.0, sampler.low_granularity_max)
                                   : rng.uniform(sampler.high_granularity_min,
                                                 sampler.high_granularity_max);
    oo.base_intensity = rng.uniform(110.0, 130.0);
    oo.cumulus = rng.bernoulli(sampler.cumulus_fraction);
    oo.cumulus_angle = rng.uniform(0.0, 2.0 * kPi);
    oo.cumulus_radius = rng.uniform(25.0, 40.0);
    oo.viable = synthetic_viability(oo);
    return oo;
}

SceneSpec sample_scene(std::uint64_t seed, int width, int height, int count, double noise_sigma,
                       const OocyteSampler& sampler) {
    const double max_outer =
        sampler.max_semi_axis + sampler.max_gap + 2.0 * sampler.max_misalignment;
    const int cell = static_cast<int>(std::ceil(2.0 * max_outer)) + 8;
    const int cols = width / cell;
    const int rows = height / cell;
    if (cols * rows < count) {
        throw Error("sample_scene: frame " + std::to_string(width) + "x" + std::to_string(height) +
                    " holds at most " + std::to_string(cols * rows) + " oocytes, requested " +
                    std::to_string(count));
    }
    const double x_off = (width - cols * cell) / 2.0;
    const double y_off = (height - rows * cell) / 2.0;

    Rng rng(derive_seed(seed, 0x5ce0));
    std::vector<int> cells(static_cast<std::size_t>(cols) * rows);
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
    rng.shuffle(cells);

    SceneSpec spec;
    spec.width = width;
    spec.height = height;
    spec.noise_sigma = noise_sigma;
    spec.seed = seed;
    const double jitter = std::max(0.0, cell / 2.0 - max_outer - 2.0);
    for (int i = 0; i < count; ++i) {
        const int cell_idx = cells[static_cast<std::size_t>(i)];
        const double cx = x_off + (cell_idx % cols + 0.5) * cell +
                          rng.uniform(-jitter, jitter);
        const double cy = y_off + (cell_idx / cols + 0.5) * cell +
                          rng.uniform(-jitter, jitter);
        spec.oocytes.push_back(sample_oocyte(rng, cx, cy, sampler));
    }
    return spec;
}

}  // namespace ovia
