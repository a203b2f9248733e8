#pragma once

#include "meshint/camera.hpp"
#include "meshint/image.hpp"
#include "meshint/integrator.hpp"
#include "meshint/remesher.hpp"
#include "meshint/synthetic.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace meshint {

struct EvalReport {
    std::size_t vertex_count = 0;
    std::size_t foreground_pixel_count = 0;
    double compression_rate = 0.0; // 1 - V/|foreground|
    double rmse = -1.0;            // physical units after alignment; -1 when no ground truth
    std::size_t rmse_uncovered = 0;
    double min_angle_deg = 0.0;    // screen-metric angles
    double median_angle_deg = 0.0;
    double angle_fraction_20_120 = 0.0;
    std::map<std::string, double> wall_times; // per stage, seconds
};

struct PipelineOptions {
    SizingConfig sizing;
    double blur_sigma = 1.4142135623730951; // sqrt(2)
    double solver_tol = 1e-8;
    CotangentMode cotangent_mode = CotangentMode::Metric;
    bool dense_baseline = false;
};

struct PipelineResult {
    NormalMap blurred;
    ScreenMesh mesh;
    SolveResult solution;
    IntegratedSurface surface;
    std::optional<DenseBaselineResult> dense;
    std::optional<IntegratedSurface> dense_surface;
    EvalReport report;
};

// Rasterizes the surface depth at foreground pixel centers of the reference
// mask by barycentric interpolation (same coverage rule as the remesher).
// Uncovered foreground pixels are left as background and counted.
DepthMap rasterize_depth(const ScreenMesh& mesh, const IntegratedSurface& surface,
                         int width, int height, const std::vector<std::uint8_t>& mask,
                         std::size_t* uncovered = nullptr);

// RMSE after gauge alignment: optimal offset for orthographic cameras,
// optimal global scale for perspective ones. Returned in physical units.
double rmse_aligned(const DepthMap& predicted, const DepthMap& ground_truth,
                    const CameraModel& cam, std::size_t* excluded = nullptr);
double rmse_aligned(const ScreenMesh& mesh, const IntegratedSurface& surface,
                    const DepthMap& ground_truth, const CameraModel& cam,
                    std::size_t* excluded = nullptr);

// Screen-metric corner angles of all faces, in degrees.
std::vector<double> mesh_metric_angles(const ScreenMesh& mesh);

// blur -> curvature -> refine -> assemble -> solve -> lift, with per-stage
// timings. Throws on solver failure.
PipelineResult run_pipeline(const NormalMap& nm, const CameraModel& cam,
                            const PipelineOptions& options,
                            const DepthMap* ground_truth = nullptr);

struct ScalingRow {
    int resolution = 0;
    std::size_t foreground_pixels = 0;
    std::size_t vertices = 0;
    double compression_rate = 0.0;
    double mesh_seconds = 0.0;
    double integrate_seconds = 0.0;
    std::size_t dense_vertices = 0;
    double dense_seconds = 0.0;
    double rmse = -1.0;
    double dense_rmse = -1.0;
};

// Renders the scene at each resolution with a fixed physical epsilon and
// runs meshing plus integration (and optionally the dense baseline).
std::vector<ScalingRow> scaling_study(SyntheticScene scene, const std::vector<int>& resolutions,
                                      double epsilon_physical, const PipelineOptions& base,
                                      bool dense_baseline);

std::string scaling_csv(const std::vector<ScalingRow>& rows, bool include_timings = true);
std::string report_csv(const EvalReport& report, bool include_timings = true);

} // namespace meshint
