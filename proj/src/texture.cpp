#include "ovia/texture.hpp"

#include <cmath>

namespace ovia {

const std::array<const char*, kNumBands> kBandNames = {
    "E_LL3", "E_LH1", "E_HL1", "E_HH1", "E_LH2",
    "E_HL2", "E_HH2", "E_LH3", "E_HL3", "E_HH3",
};

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

/// Half-sample symmetric index: x[-1] = x[0], x[n] = x[n-1].
inline int reflect(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

/// y[n] = s0*x[n] + s1*x[n + dilation] along x for every row.
RealRaster filter_rows(const RealRaster& src, double s0, double s1, int dilation) {
    RealRaster out(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        const double* row = src.values.data() + static_cast<std::size_t>(y) * src.width;
        double* orow = out.values.data() + static_cast<std::size_t>(y) * src.width;
        for (int x = 0; x < src.width; ++x) {
            orow[x] = s0 * row[x] + s1 * row[reflect(x + dilation, src.width)];
        }
    }
    return out;
}

/// y[n] = s0*x[n] + s1*x[n + dilation] along y for every column.
RealRaster filter_cols(const RealRaster& src, double s0, double s1, int dilation) {
    RealRaster out(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        const int y2 = reflect(y + dilation, src.height);
        const double* row = src.values.data() + static_cast<std::size_t>(y) * src.width;
        const double* row2 = src.values.data() + static_cast<std::size_t>(y2) * src.width;
        double* orow = out.values.data() + static_cast<std::size_t>(y) * src.width;
        for (int x = 0; x < src.width; ++x) {
            orow[x] = s0 * row[x] + s1 * row2[x];
        }
    }
    return out;
}

}  // namespace

WaveletBands uwt_haar3(const RealRaster& image) {
    if (image.width < 8 || image.height < 8) {
        throw ImageTooSmall("uwt_haar3: image must be at least 8x8, got " +
                            std::to_string(image.width) + "x" + std::to_string(image.height));
    }

    WaveletBands bands;
    bands.width = image.width;
    bands.height = image.height;

    RealRaster approx = image;
    for (int level = 1; level <= 3; ++level) {
        const int dilation = 1 << (level - 1);
        const RealRaster low_x = filter_rows(approx, kInvSqrt2, kInvSqrt2, dilation);
        const RealRaster high_x = filter_rows(approx, kInvSqrt2, -kInvSqrt2, dilation);
        const int base = 1 + (level - 1) * 3;
        bands.band[base + 0] = filter_cols(low_x, kInvSqrt2, -kInvSqrt2, dilation);   // LH
        bands.band[base + 1] = filter_cols(high_x, kInvSqrt2, kInvSqrt2, dilation);   // HL
        bands.band[base + 2] = filter_cols(high_x, kInvSqrt2, -kInvSqrt2, dilation);  // HH
        approx = filter_cols(low_x, kInvSqrt2, kInvSqrt2, dilation);
    }
    bands.band[kLL3] = std::move(approx);
    return bands;
}

WaveletBands uwt_haar3(const GrayImage& image) {
    return uwt_haar3(to_real(image));
}

std::array<double, kNumBands> subband_energies(const WaveletBands& bands, const BinaryMask& mask) {
    if (mask.width != bands.width || mask.height != bands.height) {
        throw DimensionMismatch("subband_energies: mask size differs from subband size");
    }
    long count = 0;
    for (std::uint8_t v : mask.fg) count += v ? 1 : 0;
    if (count == 0) {
        throw EmptyMask("subband_energies: empty mask");
    }

    std::array<double, kNumBands> energies{};
    for (int b = 0; b < kNumBands; ++b) {
        double sum = 0.0;
        const auto& values = bands.band[b].values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (mask.fg[i]) sum += values[i] * values[i];
        }
        energies[b] = sum / static_cast<double>(count);
    }
    return energies;
}

IntensityStats intensity_stats(const GrayImage& image, const BinaryMask& mask) {
    if (mask.width != image.width || mask.height != image.height) {
        throw DimensionMismatch("intensity_stats: mask size differs from image size");
    }
    long count = 0;
    double sum = 0.0;
    std::array<long, 256> histogram{};
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        if (!mask.fg[i]) continue;
        ++count;
        sum += image.pixels[i];
        ++histogram[image.pixels[i]];
    }
    if (count == 0) {
        throw EmptyMask("intensity_stats: empty mask");
    }

    IntensityStats stats;
    stats.mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        if (!mask.fg[i]) continue;
        const double d = image.pixels[i] - stats.mean;
        sq += d * d;
    }
    stats.variance = sq / static_cast<double>(count);
    double entropy = 0.0;
    for (long h : histogram) {
        if (h == 0) continue;
        const double p = static_cast<double>(h) / static_cast<double>(count);
        entropy -= p * std::log2(p);
    }
    stats.entropy = entropy;
    return stats;
}

TextureFeatures compute_texture(const Roi& roi) {
    const auto components = connected_components(
        mask_to_binary(roi.mask, static_cast<std::uint8_t>(LabelClass::Cytoplasm)),
        static_cast<std::uint8_t>(LabelClass::Cytoplasm));
    if (components.empty()) {
        throw MissingCytoplasm("compute_texture: ROI has no cytoplasm pixels");
    }
    const Component& cytoplasm = keep_largest(components);
    BinaryMask mask(roi.mask.width, roi.mask.height);
    for (const PixelCoord& p : cytoplasm.pixels) mask.set(p.x, p.y, true);

    const WaveletBands bands = uwt_haar3(roi.image);
    TextureFeatures tex;
    tex.energy = subband_energies(bands, mask);
    const IntensityStats stats = intensity_stats(roi.image, mask);
    tex.mean = stats.mean;
    tex.variance = stats.variance;
    tex.entropy = stats.entropy;
    return tex;
}

}  // namespace ovia
