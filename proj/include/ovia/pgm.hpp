#pragma once

#include <string>

#include "ovia/image.hpp"

namespace ovia {

// Binary PGM (P5, maxval 255) is the only raster format here. Header is
// `P5\n<width> <height>\n255\n` followed by width*height bytes, row-major,
// top-left origin. The reader tolerates standard PGM whitespace and `#`
// comments; the writer emits the exact header above.

GrayImage load_gray_image(const std::string& path);

/// As load_gray_image, additionally requires every byte <= 4.
LabelMask load_label_mask(const std::string& path);

void save_gray_image(const GrayImage& image, const std::string& path);
void save_label_mask(const LabelMask& mask, const std::string& path);

}  // namespace ovia
