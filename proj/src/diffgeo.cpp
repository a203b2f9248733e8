#include "meshint/diffgeo.hpp"

#include <cmath>

namespace meshint {

namespace {

constexpr double kMinNz = 1e-3;
constexpr double kGrazingRay = 1e-3;
constexpr double kMinMetricDet = 1e-12;

// Masked finite difference of the normal field along one axis: central where
// both neighbors are foreground, one-sided where only one is, zero otherwise.
Eigen::Vector3d normal_difference(const NormalMap& nm, int x, int y, int dx, int dy) {
    const bool plus = nm.foreground(x + dx, y + dy);
    const bool minus = nm.foreground(x - dx, y - dy);
    if (plus && minus)
        return 0.5 * (nm.normal(x + dx, y + dy) - nm.normal(x - dx, y - dy));
    if (plus) return nm.normal(x + dx, y + dy) - nm.normal(x, y);
    if (minus) return nm.normal(x, y) - nm.normal(x - dx, y - dy);
    return Eigen::Vector3d::Zero();
}

} // namespace

std::pair<Eigen::Vector3d, Eigen::Vector3d> tangents_orthographic(const Eigen::Vector3d& n) {
    const double nz = std::max(n.z(), kMinNz);
    return {Eigen::Vector3d(1.0, 0.0, -n.x() / nz), Eigen::Vector3d(0.0, 1.0, -n.y() / nz)};
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> tangents_perspective(const Eigen::Vector3d& n,
                                                                 const Eigen::Vector3d& r,
                                                                 const Eigen::Vector3d& dr_u,
                                                                 const Eigen::Vector3d& dr_v,
                                                                 double z_bar) {
    const double nr = n.dot(r);
    const Eigen::Vector3d tu = (dr_u - (n.dot(dr_u) / nr) * r) * z_bar;
    const Eigen::Vector3d tv = (dr_v - (n.dot(dr_v) / nr) * r) * z_bar;
    return {tu, tv};
}

std::pair<Eigen::Vector3d, Eigen::Vector3d> tangents_at(const Eigen::Vector3d& n,
                                                        const CameraModel& cam,
                                                        const Eigen::Vector2d& u) {
    if (cam.kind == CameraModel::Kind::Orthographic) return tangents_orthographic(n);
    return tangents_perspective(n, cam.ray(u), cam.ray_du(), cam.ray_dv(), cam.mean_distance_px());
}

Eigen::Matrix2d first_fundamental_form(const Eigen::Vector3d& n, const CameraModel& cam,
                                       const Eigen::Vector2d& u) {
    const auto [tu, tv] = tangents_at(n, cam, u);
    Eigen::Matrix2d I;
    I << tu.dot(tu), tu.dot(tv), tv.dot(tu), tv.dot(tv);
    return I;
}

FundamentalForms fundamental_forms_at(const NormalMap& nm, const CameraModel& cam, int x, int y) {
    const Eigen::Vector2d u(x + 0.5, y + 0.5);
    const Eigen::Vector3d& n = nm.normal(x, y);
    const auto [tu, tv] = tangents_at(n, cam, u);

    FundamentalForms ff;
    ff.first << tu.dot(tu), tu.dot(tv), tv.dot(tu), tv.dot(tv);

    const Eigen::Vector3d dnu = normal_difference(nm, x, y, 1, 0);
    const Eigen::Vector3d dnv = normal_difference(nm, x, y, 0, 1);
    Eigen::Matrix2d raw;
    raw << -tu.dot(dnu), -tu.dot(dnv), -tv.dot(dnu), -tv.dot(dnv);
    ff.second = 0.5 * (raw + raw.transpose());
    return ff;
}

std::pair<double, double> principal_curvatures(const FundamentalForms& ff) {
    const Eigen::Matrix2d& I = ff.first;
    const Eigen::Matrix2d& II = ff.second;
    const double a = I.determinant();
    const double b = -(I(0, 0) * II(1, 1) + I(1, 1) * II(0, 0) - 2.0 * I(0, 1) * II(0, 1));
    const double c = II.determinant();
    const double H = -b / (2.0 * a);
    const double K = c / a;
    const double D = std::sqrt(std::max(H * H - K, 0.0));
    return {H + D, H - D};
}

CurvatureField curvature_field(const NormalMap& nm, const CameraModel& cam) {
    CurvatureField cf;
    cf.width = nm.width;
    cf.height = nm.height;
    cf.kappa_max.assign(nm.normals.size(), 0.0);
    cf.mask = nm.mask;

    std::vector<std::uint8_t> valid(nm.normals.size(), 0);
    const bool persp = cam.kind == CameraModel::Kind::Perspective;

    for (int y = 0; y < nm.height; ++y)
        for (int x = 0; x < nm.width; ++x) {
            const std::size_t idx = nm.index(x, y);
            if (!nm.mask[idx]) continue;
            if (persp) {
                const Eigen::Vector3d r = cam.ray(Eigen::Vector2d(x + 0.5, y + 0.5));
                if (std::abs(nm.normals[idx].dot(r)) < kGrazingRay * r.norm()) continue;
            }
            const FundamentalForms ff = fundamental_forms_at(nm, cam, x, y);
            if (ff.first.determinant() <= kMinMetricDet) continue;
            const auto [k1, k2] = principal_curvatures(ff);
            if (!std::isfinite(k1) || !std::isfinite(k2)) continue;
            cf.kappa_max[idx] = std::max(std::abs(k1), std::abs(k2));
            valid[idx] = 1;
        }

    // degenerate pixels inherit the max over valid 4-neighbors, else 0
    for (int y = 0; y < nm.height; ++y)
        for (int x = 0; x < nm.width; ++x) {
            const std::size_t idx = nm.index(x, y);
            if (!nm.mask[idx] || valid[idx]) continue;
            double best = 0.0;
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k)
                if (nm.inside(nx[k], ny[k]) && valid[nm.index(nx[k], ny[k])])
                    best = std::max(best, cf.kappa_max[nm.index(nx[k], ny[k])]);
            cf.kappa_max[idx] = best;
        }

    return cf;
}

} // namespace meshint
