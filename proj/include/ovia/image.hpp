#pragma once

#include <cstdint>
#include <vector>

#include "ovia/errors.hpp"

namespace ovia {

/// Pixel class ids used by label masks.
enum class LabelClass : std::uint8_t {
    Background = 0,
    Cytoplasm = 1,
    ZonaPellucida = 2,
    PolarBody = 3,
    CumulusCells = 4,
};

inline constexpr int kNumClasses = 5;
inline constexpr std::uint8_t kMaxLabel = 4;

const char* label_class_name(LabelClass cls);

/// Single-channel 8-bit raster, row-major, top-left origin.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return pixels.size(); }

    bool operator==(const GrayImage&) const = default;
};

/// Per-pixel class labels, values in {0..4}.
struct LabelMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;

    LabelMask() = default;
    LabelMask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return labels.size(); }

    bool operator==(const LabelMask&) const = default;
};

/// Boolean raster; 1 = foreground.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> fg;

    BinaryMask() = default;
    BinaryMask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), fg(static_cast<std::size_t>(w) * h, fill) {}

    bool at(int x, int y) const { return fg[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { fg[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    std::size_t size() const { return fg.size(); }

    bool operator==(const BinaryMask&) const = default;
};

/// Full-size raster of real values (wavelet coefficients, intensity planes).
struct RealRaster {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealRaster() = default;
    RealRaster(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Pixel true iff the mask label equals `cls`.
BinaryMask mask_to_binary(const LabelMask& mask, std::uint8_t cls);

RealRaster to_real(const GrayImage& image);

}  // namespace ovia
