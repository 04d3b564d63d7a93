#pragma once

#include <array>
#include <string>

#include "ovia/image.hpp"
#include "ovia/morphology.hpp"

namespace ovia {

/// Subband order for the three-level undecimated Haar transform. In band
/// names the first letter is the filter along x, the second along y.
enum WaveletBand : int {
    kLL3 = 0,
    kLH1, kHL1, kHH1,
    kLH2, kHL2, kHH2,
    kLH3, kHL3, kHH3,
};

inline constexpr int kNumBands = 10;
extern const std::array<const char*, kNumBands> kBandNames;

struct WaveletBands {
    int width = 0;
    int height = 0;
    std::array<RealRaster, kNumBands> band;
};

/// The 13 texture features of one oocyte.
struct TextureFeatures {
    std::array<double, kNumBands> energy{};  // indexed by WaveletBand
    double mean = 0.0;
    double variance = 0.0;
    double entropy = 0.0;
};

/// Three-level undecimated (a-trous) Haar transform. Level-l filters are
/// h = [1,1]/sqrt(2), g = [1,-1]/sqrt(2) with 2^(l-1)-1 zeros inserted
/// between taps; taps sit at offsets {0, 2^(l-1)} so y[n] combines x[n] and
/// x[n + 2^(l-1)]. Detail bands are produced from the cascaded low-pass; all
/// ten subbands stay full image size. Boundaries use half-sample symmetric
/// extension. Throws ImageTooSmall below 8x8.
WaveletBands uwt_haar3(const RealRaster& image);
WaveletBands uwt_haar3(const GrayImage& image);

/// Mean squared coefficient over the masked pixels, one value per subband.
/// Throws EmptyMask / DimensionMismatch.
std::array<double, kNumBands> subband_energies(const WaveletBands& bands, const BinaryMask& mask);

struct IntensityStats {
    double mean = 0.0;
    double variance = 0.0;  // population variance
    double entropy = 0.0;   // bits, 256-bin histogram
};

/// Mean, population variance, and histogram entropy of the masked intensities.
/// Throws EmptyMask / DimensionMismatch.
IntensityStats intensity_stats(const GrayImage& image, const BinaryMask& mask);

/// Assembles the 13 texture features using the largest cytoplasm component as
/// the mask. Throws MissingCytoplasm.
TextureFeatures compute_texture(const Roi& roi);

}  // namespace ovia
