#pragma once

#include "meshint/camera.hpp"
#include "meshint/diffgeo.hpp"
#include "meshint/halfedge.hpp"
#include "meshint/image.hpp"

#include <functional>
#include <vector>

namespace meshint {

// Sizing parameters for the adaptive refinement. Epsilon is the permitted
// approximation error in pixel units; target edge lengths are clamped to
// [l_min, l_max].
struct SizingConfig {
    double epsilon = 0.5;        // px
    double l_min = 1.0;          // px
    double l_max = 100.0;        // px
    int outer_iterations = 10;
    int smoothing_iterations = 5;
    double split_factor = 4.0 / 3.0;
    double collapse_factor = 4.0 / 5.0;
    bool validate_each_iteration = true;

    void check() const;
};

// Per-face pixel coverage in CSR layout: face f covers pixels
// pixel_indices[offsets[f] .. offsets[f+1]).
struct FaceCoverage {
    std::vector<std::size_t> offsets;      // face_capacity()+1 entries
    std::vector<std::uint32_t> pixel_indices; // row-major pixel index

    std::size_t count(Index f) const { return offsets[f + 1] - offsets[f]; }
};

// Two CCW triangles per foreground pixel over the corner lattice, split along
// the (i,j)->(i+1,j+1) diagonal. Corner-touching pixels are made manifold by
// duplicating the shared lattice corner per fan.
ScreenMesh initial_triangulation(const NormalMap& nm);

// Deterministic coverage: a foreground pixel belongs to face f iff its center
// (i+0.5, j+0.5) lies inside f, with a top-left tie rule on shared edges.
FaceCoverage rasterize(const ScreenMesh& mesh, const NormalMap& nm);

// Normalized sum of covered pixel normals; faces without pixels fall back to
// a mask-aware bilinear sample at the face centroid.
Eigen::Vector3d face_normal_from_pixels(const ScreenMesh& mesh, FaceId f, const NormalMap& nm,
                                        const FaceCoverage& coverage);

// Foreshortened edge length sqrt(0.5*(d' I_f d + d' I_f' d)); boundary edges
// use the single face term without the 0.5.
double edge_length_metric(const ScreenMesh& mesh, EdgeId e);

// Target-length update: kappa_v is the max pixel curvature over the star's
// coverage, L_v = sqrt(6*eps/kappa - eps^2) clamped to [l_min, l_max].
void vertex_curvature_and_length(ScreenMesh& mesh, const CurvatureField& cf,
                                 const FaceCoverage& coverage, const SizingConfig& cfg);

// Area- and foreshortening-weighted centroid smoothing. Interior vertices
// move to the solution of (sum w_f I_f) u = sum w_f I_f c_f with
// w_f = A_f sqrt(det I_f)/L_f^2, applied as Jacobi-style passes; moves that
// would invert an incident face are rejected; boundary vertices stay.
void tangential_smooth(ScreenMesh& mesh, const SizingConfig& cfg);

// Refreshes per-face normals and metrics and per-vertex curvature/targets
// from the current rasterization.
FaceCoverage update_mesh_fields(ScreenMesh& mesh, const NormalMap& nm, const CameraModel& cam,
                                const CurvatureField& cf, const SizingConfig& cfg);

// The full refinement loop: split long edges, collapse short ones, flip
// non-Delaunay edges, smooth, then recompute sizing — outer_iterations times.
// The input normal map is expected to be low-pass filtered already.
ScreenMesh refine(const NormalMap& nm, const CameraModel& cam, const SizingConfig& cfg,
                  const std::function<void(const ScreenMesh&, int)>& per_iteration = {});

} // namespace meshint
