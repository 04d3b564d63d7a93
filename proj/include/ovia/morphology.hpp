#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ovia/image.hpp"

namespace ovia {

struct PixelCoord {
    int x = 0;
    int y = 0;
    bool operator==(const PixelCoord&) const = default;
};

/// One 8-connected foreground component. Pixels are in scan order
/// (row-major). Frame dimensions are carried so boundary tests can treat the
/// frame edge as outside.
struct Component {
    std::uint8_t cls = 0;
    std::vector<PixelCoord> pixels;
    long area = 0;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    int min_row = 0;
    int min_col = 0;
    int frame_width = 0;
    int frame_height = 0;
};

/// A fixed-size window cropped from a source frame; image and mask crops stay
/// aligned. `center` is the requested (rounded) center before clamping.
struct Roi {
    std::string source_id;
    int center_x = 0;
    int center_y = 0;
    int origin_x = 0;  // top-left of the window in the source frame
    int origin_y = 0;
    GrayImage image;
    LabelMask mask;
};

inline constexpr int kRoiSide = 416;

/// 8-connected components of the foreground, ordered by (min row, min col).
/// Components partition the foreground exactly.
std::vector<Component> connected_components(const BinaryMask& mask, std::uint8_t cls = 1);

/// Keeps components with area >= min_area ("smaller than" are suppressed).
std::vector<Component> suppress_small(std::vector<Component> components, long min_area);

/// Maximum-area component; ties go to the earliest in the input order.
/// Throws EmptyInput on an empty list.
const Component& keep_largest(const std::vector<Component>& components);

/// side x side window centered on the rounded center, shifted to stay fully
/// inside the frame (never padded). Throws FrameTooSmall if the frame is
/// smaller than the window.
Roi extract_roi(const GrayImage& image, const LabelMask& mask, double center_x, double center_y,
                int side = kRoiSide, const std::string& source_id = {});

/// Component pixels with at least one 4-neighbor outside the component; the
/// frame edge counts as outside. Scan order.
std::vector<PixelCoord> boundary_pixels(const Component& component);

/// Background pixels not 4-connected to the frame border become foreground.
BinaryMask fill_holes(const BinaryMask& mask);

/// Rounds to nearest integer, halves away from zero.
int round_half_away(double v);

}  // namespace ovia
