#include "ovia/image.hpp"

namespace ovia {

const char* label_class_name(LabelClass cls) {
    switch (cls) {
        case LabelClass::Background: return "background";
        case LabelClass::Cytoplasm: return "cytoplasm";
        case LabelClass::ZonaPellucida: return "zona_pellucida";
        case LabelClass::PolarBody: return "polar_body";
        case LabelClass::CumulusCells: return "cumulus_cells";
    }
    return "unknown";
}

BinaryMask mask_to_binary(const LabelMask& mask, std::uint8_t cls) {
    BinaryMask out(mask.width, mask.height);
    for (std::size_t i = 0; i < mask.labels.size(); ++i) {
        out.fg[i] = mask.labels[i] == cls ? 1 : 0;
    }
    return out;
}

RealRaster to_real(const GrayImage& image) {
    RealRaster out(image.width, image.height);
    for (std::size_t i = 0; i < image.pixels.size(); ++i) {
        out.values[i] = static_cast<double>(image.pixels[i]);
    }
    return out;
}

}  // namespace ovia
