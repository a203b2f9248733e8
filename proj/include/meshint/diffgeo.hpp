#pragma once

#include "meshint/camera.hpp"
#include "meshint/image.hpp"

#include <utility>

namespace meshint {

// First and second fundamental forms at a point. The first form is the
// foreshortening metric (SPD wherever defined); the second is symmetrized
// after finite differencing.
struct FundamentalForms {
    Eigen::Matrix2d first = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
};

struct CurvatureField {
    int width = 0;
    int height = 0;
    std::vector<double> kappa_max; // |kappa| of the strongest principal curvature, 1/px
    std::vector<std::uint8_t> mask;

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    double at(int x, int y) const { return kappa_max[index(x, y)]; }
    bool foreground(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height && mask[index(x, y)] != 0;
    }
};

// Surface tangents from a normal alone: t_u = e_x - (n_x/n_z) e_z,
// t_v = e_y - (n_y/n_z) e_z. n_z is clamped to 1e-3 from below.
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangents_orthographic(const Eigen::Vector3d& n);

// Weak-perspective tangents t_i = (dr_i - ((n.dr_i)/(n.r)) r) * z_bar.
// Caller guarantees |n.r| >= 1e-3 * |r|.
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangents_perspective(const Eigen::Vector3d& n,
                                                                 const Eigen::Vector3d& r,
                                                                 const Eigen::Vector3d& dr_u,
                                                                 const Eigen::Vector3d& dr_v,
                                                                 double z_bar);

// Tangents for a given normal at a screen position under either projection,
// in pixel units.
std::pair<Eigen::Vector3d, Eigen::Vector3d> tangents_at(const Eigen::Vector3d& n,
                                                        const CameraModel& cam,
                                                        const Eigen::Vector2d& u);

// First fundamental form I = [t_i . t_j] for a face or pixel normal.
Eigen::Matrix2d first_fundamental_form(const Eigen::Vector3d& n, const CameraModel& cam,
                                       const Eigen::Vector2d& u);

// Forms at a pixel: I from the tangents, II = -t_i . d_j n with central
// differences where both neighbors are foreground, one-sided where only one
// is, zero where neither is. II is symmetrized.
FundamentalForms fundamental_forms_at(const NormalMap& nm, const CameraModel& cam, int x, int y);

// Closed-form generalized eigenvalues of kappa * I v = II v, returned with
// k1 >= k2. Requires det(first) > 1e-12.
std::pair<double, double> principal_curvatures(const FundamentalForms& ff);

// Per-pixel maximum absolute principal curvature. Degenerate pixels (metric
// det <= 1e-12 or grazing perspective rays) inherit the maximum of their
// valid 4-neighbors, else 0.
CurvatureField curvature_field(const NormalMap& nm, const CameraModel& cam);

} // namespace meshint
