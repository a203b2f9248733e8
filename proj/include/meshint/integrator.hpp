#pragma once

#include "meshint/camera.hpp"
#include "meshint/halfedge.hpp"
#include "meshint/image.hpp"
#include "meshint/remesher.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace meshint {

// Opposite-angle cotangents can be measured in the face metric (default,
// compensates foreshortening) or in raw screen coordinates.
enum class CotangentMode { Metric, Screen };

// Sparse symmetric positive-semidefinite system whose solution is the
// per-vertex (log-)depth. The constant vector per connected component spans
// the kernel, so solutions are gauge-fixed to zero mean per component.
struct IntegrationSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
    std::vector<Index> component;     // per vertex id
    std::size_t component_count = 0;
    std::size_t skipped_faces = 0;    // degenerate faces dropped with a diagnostic count
};

struct SolveResult {
    Eigen::VectorXd z;
    bool converged = false;
    double relative_residual = 0.0;
    int iterations = 0;
};

// Mesh connectivity plus lifted 3D vertex positions in physical units.
struct IntegratedSurface {
    std::vector<Eigen::Vector3d> positions;       // per vertex id
    std::vector<std::array<Index, 3>> triangles;  // compacted faces
    std::vector<double> depth;                    // per vertex id: z (ortho, px) or h (persp, physical)
};

// Face constants of the discretized functional, from the face normal and the
// rays at its three vertices: m_f = (1/12) sum_{i<=j} (n.r_i)(n.r_j),
// b_f = (1/3) sum_i (n.r_i).
std::pair<double, double> face_constants(const Eigen::Vector3d& n_f,
                                         const std::array<Eigen::Vector3d, 3>& rays);

// Cotangent of the corner angle between edge vectors a and b in the metric I:
// cot = <a,b>_I / sqrt(<a,a>_I <b,b>_I - <a,b>_I^2), with the radicand clamped
// to >= 1e-18 and |cot| clamped to <= 1e6.
double cot_corner(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Matrix2d& I);

// Assembles the optimality condition of the mesh-based integration energy.
// Per face edge (i,j) with opposite cotangent c: 2*c*m_f is added at (i,i)
// and (j,j) and subtracted at (i,j),(j,i); the rhs accumulates
// +-c*b_f*(n_x,n_y).(u_j-u_i) with antisymmetric signs, making
// matrix*z - rhs the exact gradient of the discretized energy.
IntegrationSystem assemble(const ScreenMesh& mesh, const CameraModel& cam,
                           CotangentMode mode = CotangentMode::Metric);

// Diagonally preconditioned CG with per-component deflation of the constant
// mode. The returned z has component mean 0 within 1e-9. Fails (converged =
// false) if the relative residual does not reach tol within 10*V iterations.
SolveResult solve(const IntegrationSystem& sys, double tol = 1e-8);

// Lifts per-vertex depth to 3D. Orthographic: (u,v,z)*pixel_pitch.
// Perspective: h = z_bar * exp(z - mean(z)), position = r(u)*h.
IntegratedSurface lift(const ScreenMesh& mesh, const Eigen::VectorXd& z, const CameraModel& cam);

// Pixel-resolution baseline: the same machinery on the unrefined grid, with
// per-face normals taken from the generating pixel.
struct DenseBaselineResult {
    ScreenMesh mesh;
    SolveResult solution;
};
DenseBaselineResult integrate_dense_baseline(const NormalMap& nm, const CameraModel& cam,
                                             double tol = 1e-8,
                                             CotangentMode mode = CotangentMode::Metric);

} // namespace meshint
