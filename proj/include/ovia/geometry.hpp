#pragma once

#include <vector>

#include "ovia/image.hpp"
#include "ovia/morphology.hpp"

namespace ovia {

/// Ellipse in center/axes form. a >= b > 0, theta in [0, pi) is the rotation
/// of the semi-major axis.
struct Ellipse {
    double cx = 0.0;
    double cy = 0.0;
    double a = 0.0;
    double b = 0.0;
    double theta = 0.0;
};

/// The 11 geometric features of one oocyte.
struct GeometricFeatures {
    double mu_c = 0.0;
    double e_c = 0.0;
    double gamma_c = 0.0;
    double mu_z = 0.0;
    double e_z = 0.0;
    double gamma_z = 0.0;
    double misalignment = 0.0;
    double area_ratio = 0.0;
    int n_pb = 0;
    long s_pb = 0;
    long s_cc = 0;
};

struct EllipseShape {
    double mu = 0.0;
    double e = 0.0;
    double gamma = 0.0;
};

inline constexpr long kPolarBodyMinArea = 500;

/// Direct least-squares ellipse fit: minimizes algebraic error of the conic
/// ax^2+bxy+cy^2+dx+ey+f over the points under the ellipse constraint
/// 4ac-b^2=1, solved as a generalized eigenproblem (numerically stable
/// block-partitioned form), then converted to center/axes form.
/// Throws InsufficientPoints (<6) or DegenerateConfiguration.
Ellipse fit_ellipse(const std::vector<PixelCoord>& points);
Ellipse fit_ellipse_xy(const std::vector<double>& xs, const std::vector<double>& ys);

/// mu = (a+b)/2, e = sqrt(1 - b^2/a^2) with a >= b, gamma = a*b*pi/area.
/// Throws NonpositiveArea.
EllipseShape ellipse_features(const Ellipse& ell, double area);

/// Euclidean distance between ellipse centers.
double misalignment(const Ellipse& cytoplasm, const Ellipse& zona);

/// r = s_c / s_z where s_z is the hole-filled outer region's area.
/// Throws NonpositiveArea if s_z <= 0.
double area_ratio(double s_c, double s_z);

/// Count and total area of polar-body (class 3) components with
/// area >= min_area.
struct PolarBodyFeatures {
    int count = 0;
    long total_area = 0;
};
PolarBodyFeatures polar_body_features(const LabelMask& mask, long min_area = kPolarBodyMinArea);

/// Total class-4 pixel count, no size filtering.
long cumulus_area(const LabelMask& mask);

/// Full geometric feature extraction for one ROI: keeps the largest cytoplasm
/// and zona components, fits the cytoplasm ellipse to its boundary and the
/// zona ellipse to the outer boundary of the hole-filled cytoplasm-zona
/// union. Throws MissingCytoplasm / MissingZona and propagates fit errors.
GeometricFeatures compute_geometry(const Roi& roi, long polar_body_min_area = kPolarBodyMinArea);

}  // namespace ovia
