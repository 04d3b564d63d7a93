#pragma once

// Test-only reference implementations, deliberately written along different
// routes than the library code they check.

#include <array>
#include <utility>
#include <vector>

#include "ovia/eval.hpp"
#include "ovia/image.hpp"
#include "ovia/morphology.hpp"

namespace ovia::oracle {

/// 8-connected components by queue-based flood fill over the raw raster.
/// Each component's pixels come back sorted; components sorted by first pixel.
std::vector<std::vector<PixelCoord>> flood_fill_components(const BinaryMask& mask);

/// Three-level undecimated Haar transform by brute-force 2-D dilated 4-tap
/// stencils (no separable passes), half-sample symmetric extension.
/// Band order matches texture.hpp.
std::array<RealRaster, 10> uwt_direct(const RealRaster& image);

/// Soft-margin SVM dual solved by projected gradient ascent with exact
/// projection onto the box-and-hyperplane feasible set.
struct QpSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    double objective = 0.0;
};
QpSolution solve_dual_qp(const std::vector<std::vector<double>>& rows,
                         const std::vector<int>& labels, double cost, double gamma,
                         int iterations = 200000);

double qp_decision(const QpSolution& solution, const std::vector<std::vector<double>>& rows,
                   const std::vector<int>& labels, double gamma,
                   const std::vector<double>& probe);

/// AUC as P(score_pos > score_neg) + 1/2 P(equal) over all pos/neg pairs.
double auc_pair_count(const std::vector<double>& scores, const std::vector<bool>& labels);

/// Boundary pixel count as area minus the 4-neighborhood erosion's area.
long erosion_boundary_count(const BinaryMask& mask);

/// Minimum-total-distance assignment by exhaustive permutation (use only for
/// counts <= ~6). Pairs are (index into a, index into b).
std::vector<std::pair<int, int>> min_cost_assignment(const std::vector<Point2>& a,
                                                     const std::vector<Point2>& b);

}  // namespace ovia::oracle
