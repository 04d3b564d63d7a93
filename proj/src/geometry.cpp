#include "ovia/geometry.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace ovia {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Converts ax^2+bxy+cy^2+dx+ey+f = 0 to center/axes form.
Ellipse conic_to_ellipse(double a, double b, double c, double d, double e, double f) {
    Eigen::Matrix2d quad;
    quad << a, b / 2.0, b / 2.0, c;
    const double det = quad.determinant();
    if (!(det > 0.0)) {
        throw DegenerateConfiguration("fit_ellipse: conic is not an ellipse");
    }
    // Center solves 2*quad*center = -(d, e).
    Eigen::Vector2d center = quad.inverse() * Eigen::Vector2d(-d / 2.0, -e / 2.0);
    const double cx = center(0);
    const double cy = center(1);
    double f_center = a * cx * cx + b * cx * cy + c * cy * cy + d * cx + e * cy + f;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(quad);
    Eigen::Vector2d lambda = eig.eigenvalues();  // ascending
    Eigen::Matrix2d axes = eig.eigenvectors();
    if (lambda(0) + lambda(1) < 0.0) {  // normalize the conic's sign
        lambda = -lambda;
        f_center = -f_center;
        std::swap(lambda(0), lambda(1));
        axes.col(0).swap(axes.col(1));
    }
    if (!(lambda(0) > 0.0) || !(-f_center > 0.0)) {
        throw DegenerateConfiguration("fit_ellipse: degenerate conic");
    }

    Ellipse ell;
    ell.cx = cx;
    ell.cy = cy;
    ell.a = std::sqrt(-f_center / lambda(0));  // smallest eigenvalue = major axis
    ell.b = std::sqrt(-f_center / lambda(1));
    ell.theta = std::atan2(axes(1, 0), axes(0, 0));
    while (ell.theta < 0.0) ell.theta += kPi;
    while (ell.theta >= kPi) ell.theta -= kPi;
    if (!std::isfinite(ell.a) || !std::isfinite(ell.b) || ell.b <= 0.0) {
        throw DegenerateConfiguration("fit_ellipse: non-finite axes");
    }
    return ell;
}

}  // namespace

Ellipse fit_ellipse_xy(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) {
        throw DimensionMismatch("fit_ellipse: coordinate lists differ in length");
    }
    const std::size_t n = xs.size();
    if (n < 6) {
        throw InsufficientPoints("fit_ellipse: need at least 6 points, got " + std::to_string(n));
    }

    // Center the data; the scatter blocks are far better conditioned around
    // the centroid.
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    Eigen::MatrixXd d1(n, 3), d2(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = xs[i] - mx;
        const double v = ys[i] - my;
        d1(static_cast<Eigen::Index>(i), 0) = u * u;
        d1(static_cast<Eigen::Index>(i), 1) = u * v;
        d1(static_cast<Eigen::Index>(i), 2) = v * v;
        d2(static_cast<Eigen::Index>(i), 0) = u;
        d2(static_cast<Eigen::Index>(i), 1) = v;
        d2(static_cast<Eigen::Index>(i), 2) = 1.0;
    }

    // Block-partitioned solve of the constrained problem: quadratic part from
    // the reduced 3x3 eigenproblem, linear part back-substituted.
    const Eigen::Matrix3d s1 = d1.transpose() * d1;
    const Eigen::Matrix3d s2 = d1.transpose() * d2;
    const Eigen::Matrix3d s3 = d2.transpose() * d2;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(s3);
    if (!lu.isInvertible()) {
        throw DegenerateConfiguration("fit_ellipse: singular scatter block (collinear points?)");
    }
    const Eigen::Matrix3d t = -lu.solve(s2.transpose());
    const Eigen::Matrix3d m = s1 + s2 * t;
    Eigen::Matrix3d reduced;  // C1^-1 * m for constraint 4ac - b^2 = 1
    reduced.row(0) = m.row(2) / 2.0;
    reduced.row(1) = -m.row(1);
    reduced.row(2) = m.row(0) / 2.0;

    Eigen::EigenSolver<Eigen::Matrix3d> eig(reduced);
    Eigen::Vector3d quad_part = Eigen::Vector3d::Zero();
    double best_cond = 0.0;
    bool found = false;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(eig.eigenvalues()(i).imag()) >
            1e-9 * (1.0 + std::abs(eig.eigenvalues()(i).real()))) {
            continue;
        }
        const Eigen::Vector3d v = eig.eigenvectors().col(i).real();
        const double cond = 4.0 * v(0) * v(2) - v(1) * v(1);
        if (cond > best_cond) {
            best_cond = cond;
            quad_part = v;
            found = true;
        }
    }
    if (!found) {
        throw DegenerateConfiguration("fit_ellipse: no ellipse solution");
    }
    const Eigen::Vector3d lin_part = t * quad_part;

    const double ca = quad_part(0), cb = quad_part(1), cc = quad_part(2);
    const double cd = lin_part(0), ce = lin_part(1), cf = lin_part(2);
    // Undo the centering substitution u = x - mx, v = y - my.
    const double d0 = cd - 2.0 * ca * mx - cb * my;
    const double e0 = ce - cb * mx - 2.0 * cc * my;
    const double f0 = cf + ca * mx * mx + cb * mx * my + cc * my * my - cd * mx - ce * my;
    return conic_to_ellipse(ca, cb, cc, d0, e0, f0);
}

Ellipse fit_ellipse(const std::vector<PixelCoord>& points) {
    std::vector<double> xs(points.size()), ys(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        xs[i] = points[i].x;
        ys[i] = points[i].y;
    }
    return fit_ellipse_xy(xs, ys);
}

EllipseShape ellipse_features(const Ellipse& ell, double area) {
    if (!(area > 0.0)) {
        throw NonpositiveArea("ellipse_features: area must be positive");
    }
    EllipseShape shape;
    shape.mu = (ell.a + ell.b) / 2.0;
    shape.e = std::sqrt(std::max(0.0, 1.0 - (ell.b * ell.b) / (ell.a * ell.a)));
    shape.gamma = ell.a * ell.b * kPi / area;
    return shape;
}

double misalignment(const Ellipse& cytoplasm, const Ellipse& zona) {
    const double dx = cytoplasm.cx - zona.cx;
    const double dy = cytoplasm.cy - zona.cy;
    return std::sqrt(dx * dx + dy * dy);
}

double area_ratio(double s_c, double s_z) {
    if (!(s_z > 0.0)) {
        throw NonpositiveArea("area_ratio: zona area must be positive");
    }
    return s_c / s_z;
}

PolarBodyFeatures polar_body_features(const LabelMask& mask, long min_area) {
    const auto components = suppress_small(
        connected_components(mask_to_binary(mask, static_cast<std::uint8_t>(LabelClass::PolarBody)),
                             static_cast<std::uint8_t>(LabelClass::PolarBody)),
        min_area);
    PolarBodyFeatures pb;
    pb.count = static_cast<int>(components.size());
    for (const Component& c : components) {
        pb.total_area += c.area;
    }
    return pb;
}

long cumulus_area(const LabelMask& mask) {
    long count = 0;
    for (std::uint8_t label : mask.labels) {
        if (label == static_cast<std::uint8_t>(LabelClass::CumulusCells)) ++count;
    }
    return count;
}

GeometricFeatures compute_geometry(const Roi& roi, long polar_body_min_area) {
    const auto cyto_components = connected_components(
        mask_to_binary(roi.mask, static_cast<std::uint8_t>(LabelClass::Cytoplasm)),
        static_cast<std::uint8_t>(LabelClass::Cytoplasm));
    if (cyto_components.empty()) {
        throw MissingCytoplasm("compute_geometry: ROI has no cytoplasm pixels");
    }
    const auto zona_components = connected_components(
        mask_to_binary(roi.mask, static_cast<std::uint8_t>(LabelClass::ZonaPellucida)),
        static_cast<std::uint8_t>(LabelClass::ZonaPellucida));
    if (zona_components.empty()) {
        throw MissingZona("compute_geometry: ROI has no zona pellucida pixels");
    }
    const Component& cytoplasm = keep_largest(cyto_components);
    const Component& zona = keep_largest(zona_components);

    const Ellipse cyto_ellipse = fit_ellipse(boundary_pixels(cytoplasm));

    // The zona's raw boundary includes its inner rim; fit the outer contour of
    // the hole-filled cytoplasm-zona union instead.
    BinaryMask unioned(roi.mask.width, roi.mask.height);
    for (const PixelCoord& p : cytoplasm.pixels) unioned.set(p.x, p.y, true);
    for (const PixelCoord& p : zona.pixels) unioned.set(p.x, p.y, true);
    const BinaryMask filled = fill_holes(unioned);
    const auto filled_components = connected_components(filled);
    const Component& outer = keep_largest(filled_components);
    const Ellipse zona_ellipse = fit_ellipse(boundary_pixels(outer));

    const EllipseShape cyto_shape =
        ellipse_features(cyto_ellipse, static_cast<double>(cytoplasm.area));
    const EllipseShape zona_shape = ellipse_features(zona_ellipse, static_cast<double>(outer.area));
    const PolarBodyFeatures pb = polar_body_features(roi.mask, polar_body_min_area);

    GeometricFeatures g;
    g.mu_c = cyto_shape.mu;
    g.e_c = cyto_shape.e;
    g.gamma_c = cyto_shape.gamma;
    g.mu_z = zona_shape.mu;
    g.e_z = zona_shape.e;
    g.gamma_z = zona_shape.gamma;
    g.misalignment = misalignment(cyto_ellipse, zona_ellipse);
    g.area_ratio = area_ratio(static_cast<double>(cytoplasm.area), static_cast<double>(outer.area));
    g.n_pb = pb.count;
    g.s_pb = pb.total_area;
    g.s_cc = cumulus_area(roi.mask);
    return g;
}

}  // namespace ovia
