#include "ovia/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ovia {

namespace {

constexpr int kNeighbors8[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                   {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
constexpr int kNeighbors4[4][2] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}};

}  // namespace

int round_half_away(double v) {
    return static_cast<int>(std::lround(v));
}

std::vector<Component> connected_components(const BinaryMask& mask, std::uint8_t cls) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<std::uint8_t> visited(mask.fg.size(), 0);
    std::vector<Component> components;
    std::vector<PixelCoord> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (!mask.fg[idx] || visited[idx]) continue;

            Component comp;
            comp.cls = cls;
            comp.frame_width = w;
            comp.frame_height = h;
            comp.min_row = y;
            comp.min_col = x;
            long sum_x = 0, sum_y = 0;

            visited[idx] = 1;
            stack.clear();
            stack.push_back({x, y});
            while (!stack.empty()) {
                const PixelCoord p = stack.back();
                stack.pop_back();
                comp.pixels.push_back(p);
                sum_x += p.x;
                sum_y += p.y;
                comp.min_row = std::min(comp.min_row, p.y);
                comp.min_col = std::min(comp.min_col, p.x);
                for (const auto& d : kNeighbors8) {
                    const int nx = p.x + d[0];
                    const int ny = p.y + d[1];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                    if (mask.fg[nidx] && !visited[nidx]) {
                        visited[nidx] = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
            comp.area = static_cast<long>(comp.pixels.size());
            comp.centroid_x = static_cast<double>(sum_x) / comp.area;
            comp.centroid_y = static_cast<double>(sum_y) / comp.area;
            // Scan-order pixel lists make downstream output deterministic.
            std::sort(comp.pixels.begin(), comp.pixels.end(),
                      [](const PixelCoord& a, const PixelCoord& b) {
                          return a.y != b.y ? a.y < b.y : a.x < b.x;
                      });
            components.push_back(std::move(comp));
        }
    }

    std::stable_sort(components.begin(), components.end(),
                     [](const Component& a, const Component& b) {
                         return a.min_row != b.min_row ? a.min_row < b.min_row
                                                       : a.min_col < b.min_col;
                     });
    return components;
}

std::vector<Component> suppress_small(std::vector<Component> components, long min_area) {
    std::erase_if(components, [min_area](const Component& c) { return c.area < min_area; });
    return components;
}

const Component& keep_largest(const std::vector<Component>& components) {
    if (components.empty()) {
        throw EmptyInput("keep_largest: no components");
    }
    const Component* best = &components.front();
    for (const Component& c : components) {
        if (c.area > best->area) best = &c;
    }
    return *best;
}

Roi extract_roi(const GrayImage& image, const LabelMask& mask, double center_x, double center_y,
                int side, const std::string& source_id) {
    if (image.width < side || image.height < side) {
        throw FrameTooSmall("extract_roi: frame " + std::to_string(image.width) + "x" +
                            std::to_string(image.height) + " smaller than window side " +
                            std::to_string(side));
    }
    const int cx = round_half_away(center_x);
    const int cy = round_half_away(center_y);
    const int half = side / 2;
    int x0 = std::clamp(cx - half, 0, image.width - side);
    int y0 = std::clamp(cy - half, 0, image.height - side);

    Roi roi;
    roi.source_id = source_id;
    roi.center_x = cx;
    roi.center_y = cy;
    roi.origin_x = x0;
    roi.origin_y = y0;
    roi.image = GrayImage(side, side);
    roi.mask = LabelMask(side, side);
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; ++x) {
            roi.image.at(x, y) = image.at(x0 + x, y0 + y);
            roi.mask.at(x, y) = mask.at(x0 + x, y0 + y);
        }
    }
    return roi;
}

std::vector<PixelCoord> boundary_pixels(const Component& component) {
    const int w = component.frame_width;
    const int h = component.frame_height;
    // Membership bitmap restricted to the component's bounding box.
    int max_row = 0, max_col = 0;
    for (const PixelCoord& p : component.pixels) {
        max_row = std::max(max_row, p.y);
        max_col = std::max(max_col, p.x);
    }
    const int bw = max_col - component.min_col + 1;
    const int bh = max_row - component.min_row + 1;
    std::vector<std::uint8_t> member(static_cast<std::size_t>(bw) * bh, 0);
    auto in_component = [&](int x, int y) {
        const int bx = x - component.min_col;
        const int by = y - component.min_row;
        if (bx < 0 || by < 0 || bx >= bw || by >= bh) return false;
        return member[static_cast<std::size_t>(by) * bw + bx] != 0;
    };
    for (const PixelCoord& p : component.pixels) {
        member[static_cast<std::size_t>(p.y - component.min_row) * bw + (p.x - component.min_col)] =
            1;
    }

    std::vector<PixelCoord> boundary;
    for (const PixelCoord& p : component.pixels) {
        bool edge = false;
        for (const auto& d : kNeighbors4) {
            const int nx = p.x + d[0];
            const int ny = p.y + d[1];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h || !in_component(nx, ny)) {
                edge = true;
                break;
            }
        }
        if (edge) boundary.push_back(p);
    }
    return boundary;
}

BinaryMask fill_holes(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<std::uint8_t> outside(mask.fg.size(), 0);
    std::vector<PixelCoord> stack;

    auto seed = [&](int x, int y) {
        const std::size_t idx = static_cast<std::size_t>(y) * w + x;
        if (!mask.fg[idx] && !outside[idx]) {
            outside[idx] = 1;
            stack.push_back({x, y});
        }
    };
    for (int x = 0; x < w; ++x) {
        seed(x, 0);
        seed(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        seed(0, y);
        seed(w - 1, y);
    }
    while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        for (const auto& d : kNeighbors4) {
            const int nx = p.x + d[0];
            const int ny = p.y + d[1];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            seed(nx, ny);
        }
    }

    BinaryMask filled(w, h);
    for (std::size_t i = 0; i < mask.fg.size(); ++i) {
        filled.fg[i] = outside[i] ? 0 : 1;
    }
    return filled;
}

}  // namespace ovia
