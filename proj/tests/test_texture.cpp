#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "ovia/rng.hpp"
#include "ovia/synth.hpp"
#include "ovia/texture.hpp"

using namespace ovia;

namespace {

RealRaster random_raster(Rng& rng, int w, int h, double lo = 0.0, double hi = 255.0) {
    RealRaster img(w, h);
    for (auto& v : img.values) v = rng.uniform(lo, hi);
    return img;
}

BinaryMask full_mask(int w, int h) {
    return BinaryMask(w, h, 1);
}

}  // namespace

TEST_CASE("uwt_haar3: constant image") {
    const RealRaster img(16, 16, 42.0);
    const WaveletBands bands = uwt_haar3(img);
    for (int b = kLH1; b <= kHH3; ++b) {
        for (double v : bands.band[b].values) CHECK(v == 0.0);
    }
    // Each low-pass level multiplies a constant by 2 (sqrt(2) per axis).
    for (double v : bands.band[kLL3].values) CHECK(v == doctest::Approx(8.0 * 42.0));
}

TEST_CASE("uwt_haar3: level-1 HH matches the hand convolution") {
    Rng rng(8);
    const RealRaster img = random_raster(rng, 8, 8);
    const WaveletBands bands = uwt_haar3(img);
    // At interior pixels the 2x2 stencil [[p,q],[r,s]] gives (p-q-r+s)/2.
    for (int y = 0; y < 7; ++y) {
        for (int x = 0; x < 7; ++x) {
            const double p = img.at(x, y), q = img.at(x + 1, y);
            const double r = img.at(x, y + 1), s = img.at(x + 1, y + 1);
            CHECK(bands.band[kHH1].at(x, y) == doctest::Approx((p - q - r + s) / 2.0));
        }
    }
}

TEST_CASE("uwt_haar3: equals the direct dilated-convolution oracle") {
    Rng rng(9);
    for (int round = 0; round < 5; ++round) {
        const RealRaster img = random_raster(rng, 32, 32);
        const WaveletBands bands = uwt_haar3(img);
        const auto expected = oracle::uwt_direct(img);
        for (int b = 0; b < kNumBands; ++b) {
            double max_err = 0.0;
            for (std::size_t i = 0; i < expected[b].values.size(); ++i) {
                max_err = std::max(max_err,
                                   std::abs(bands.band[b].values[i] - expected[b].values[i]));
            }
            CHECK(max_err < 1e-9);
        }
    }
}

TEST_CASE("uwt_haar3: image too small") {
    CHECK_THROWS_AS(uwt_haar3(RealRaster(7, 16)), ImageTooSmall);
    CHECK_THROWS_AS(uwt_haar3(RealRaster(16, 7)), ImageTooSmall);
}

TEST_CASE("subband_energies: constant image has zero detail energy") {
    const WaveletBands bands = uwt_haar3(RealRaster(16, 16, 99.0));
    const auto energies = subband_energies(bands, full_mask(16, 16));
    for (int b = kLH1; b <= kHH3; ++b) CHECK(energies[b] == 0.0);
    CHECK(energies[kLL3] == doctest::Approx(8.0 * 99.0 * 8.0 * 99.0));
}

TEST_CASE("subband_energies: homogeneity of degree 2") {
    Rng rng(10);
    const RealRaster img = random_raster(rng, 24, 24);
    RealRaster doubled = img;
    for (auto& v : doubled.values) v *= 2.0;
    const auto e1 = subband_energies(uwt_haar3(img), full_mask(24, 24));
    const auto e2 = subband_energies(uwt_haar3(doubled), full_mask(24, 24));
    for (int b = 0; b < kNumBands; ++b) {
        CHECK(e2[b] == doctest::Approx(4.0 * e1[b]).epsilon(1e-12));
    }
}

TEST_CASE("subband_energies: checkerboard concentrates in HH1") {
    RealRaster board(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) board.at(x, y) = ((x + y) % 2 == 0) ? 0.0 : 255.0;
    const auto energies = subband_energies(uwt_haar3(board), full_mask(32, 32));
    CHECK(energies[kHH1] > energies[kLH1]);
    CHECK(energies[kHH1] > energies[kHL1]);
}

TEST_CASE("subband_energies: errors") {
    const WaveletBands bands = uwt_haar3(RealRaster(16, 16, 1.0));
    CHECK_THROWS_AS(subband_energies(bands, BinaryMask(16, 16)), EmptyMask);
    CHECK_THROWS_AS(subband_energies(bands, full_mask(8, 8)), DimensionMismatch);
}

TEST_CASE("intensity_stats: examples") {
    SUBCASE("constant 42") {
        const IntensityStats s = intensity_stats(GrayImage(16, 16, 42), full_mask(16, 16));
        CHECK(s.mean == doctest::Approx(42.0));
        CHECK(s.variance == 0.0);
        CHECK(s.entropy == 0.0);
    }
    SUBCASE("uniform histogram over all 256 values") {
        GrayImage img(256, 4);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 256; ++x) img.at(x, y) = static_cast<std::uint8_t>(x);
        const IntensityStats s = intensity_stats(img, full_mask(256, 4));
        CHECK(s.entropy == doctest::Approx(8.0));
    }
    SUBCASE("two values in equal counts") {
        GrayImage img(16, 2);
        for (int x = 0; x < 16; ++x) {
            img.at(x, 0) = 0;
            img.at(x, 1) = 255;
        }
        const IntensityStats s = intensity_stats(img, full_mask(16, 2));
        CHECK(s.mean == doctest::Approx(127.5));
        CHECK(s.variance == doctest::Approx(127.5 * 127.5));
        CHECK(s.entropy == doctest::Approx(1.0));
    }
    SUBCASE("empty mask") {
        CHECK_THROWS_AS(intensity_stats(GrayImage(8, 8), BinaryMask(8, 8)), EmptyMask);
    }
}

TEST_CASE("intensity_stats: entropy invariant under bijective remap") {
    Rng rng(11);
    GrayImage img(32, 32);
    for (auto& v : img.pixels) v = static_cast<std::uint8_t>(rng.uniform_below(256));
    GrayImage flipped = img;
    for (auto& v : flipped.pixels) v = static_cast<std::uint8_t>(255 - v);
    const IntensityStats a = intensity_stats(img, full_mask(32, 32));
    const IntensityStats b = intensity_stats(flipped, full_mask(32, 32));
    CHECK(a.entropy == doctest::Approx(b.entropy).epsilon(1e-12));
}

TEST_CASE("energies are shift equivariant away from borders") {
    Rng rng(12);
    const RealRaster big = random_raster(rng, 96, 96);
    const int shift_x = 5, shift_y = 3;

    auto window = [&](int ox, int oy) {
        RealRaster out(64, 64);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) out.at(x, y) = big.at(ox + x, oy + y);
        return out;
    };
    const RealRaster a = window(8, 8);
    const RealRaster b = window(8 + shift_x, 8 + shift_y);

    // Mask 16..47 in a-coordinates; >= 8 px from every border in both crops.
    BinaryMask mask_a(64, 64), mask_b(64, 64);
    for (int y = 16; y < 48; ++y)
        for (int x = 16; x < 48; ++x) {
            mask_a.set(x, y, true);
            mask_b.set(x - shift_x, y - shift_y, true);
        }

    const auto ea = subband_energies(uwt_haar3(a), mask_a);
    const auto eb = subband_energies(uwt_haar3(b), mask_b);
    for (int band = 0; band < kNumBands; ++band) {
        CHECK(ea[band] == doctest::Approx(eb[band]).epsilon(1e-6));
    }
}

TEST_CASE("compute_texture: flat oocyte with matched surroundings") {
    // Base intensity equal to the zona's, no polar bodies, no noise: nothing
    // within the filters' reach of a cytoplasm pixel differs, so every detail
    // coefficient over the mask is exactly zero.
    OocyteSpec oo;
    oo.cytoplasm = {208, 208, 100, 100, 0};
    oo.zona_outer = {208, 208, 140, 140, 0};
    oo.base_intensity = 170.0;
    oo.granularity_amplitude = 0.0;
    const Scene scene = generate_scene({416, 416, {oo}, 0.0, 21});
    Roi roi;
    roi.image = scene.image;
    roi.mask = scene.mask;
    const TextureFeatures tex = compute_texture(roi);
    for (int b = kLH1; b <= kHH3; ++b) CHECK(tex.energy[b] == 0.0);
    CHECK(tex.variance == 0.0);
    CHECK(tex.mean == doctest::Approx(170.0));
}

TEST_CASE("compute_texture: granularity raises high-frequency energy") {
    auto make = [](double amplitude) {
        OocyteSpec oo;
        oo.cytoplasm = {208, 208, 100, 100, 0};
        oo.zona_outer = {208, 208, 140, 140, 0};
        oo.granularity_amplitude = amplitude;
        const Scene scene = generate_scene({416, 416, {oo}, 0.0, 22});
        Roi roi;
        roi.image = scene.image;
        roi.mask = scene.mask;
        return compute_texture(roi);
    };
    const TextureFeatures low = make(0.0);
    const TextureFeatures high = make(25.0);
    CHECK(high.energy[kHH1] > low.energy[kHH1]);
}

TEST_CASE("compute_texture: missing cytoplasm") {
    Roi roi;
    roi.image = GrayImage(416, 416, 100);
    roi.mask = LabelMask(416, 416);
    CHECK_THROWS_AS(compute_texture(roi), MissingCytoplasm);
}
