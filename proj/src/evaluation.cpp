#include "meshint/evaluation.hpp"

#include "meshint/image_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace meshint {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

DepthMap rasterize_depth(const ScreenMesh& mesh, const IntegratedSurface& surface,
                         int width, int height, const std::vector<std::uint8_t>& mask,
                         std::size_t* uncovered) {
    DepthMap out(width, height);

    NormalMap grid(width, height); // mask carrier for the shared rasterizer
    grid.mask = mask;
    const FaceCoverage cov = rasterize(mesh, grid);

    std::vector<std::uint8_t> assigned(static_cast<std::size_t>(width) * height, 0);
    for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
        const FaceId f(fi);
        if (mesh.face_deleted(f)) continue;
        const auto vs = mesh.face_vertices(f);
        const auto p = mesh.face_positions(f);
        const double det = (p[1] - p[0]).x() * (p[2] - p[0]).y() -
                           (p[1] - p[0]).y() * (p[2] - p[0]).x();
        if (det == 0.0) continue;
        for (std::size_t k = cov.offsets[fi]; k < cov.offsets[fi + 1]; ++k) {
            const std::size_t idx = cov.pixel_indices[k];
            if (assigned[idx]) continue;
            assigned[idx] = 1;
            const int x = static_cast<int>(idx % width);
            const int y = static_cast<int>(idx / width);
            const Eigen::Vector2d c(x + 0.5, y + 0.5);
            // barycentric interpolation of the per-vertex depth
            const double l1 = ((p[2] - p[1]).x() * (c - p[1]).y() -
                               (p[2] - p[1]).y() * (c - p[1]).x()) / det;
            const double l2 = ((p[0] - p[2]).x() * (c - p[2]).y() -
                               (p[0] - p[2]).y() * (c - p[2]).x()) / det;
            const double l0 = 1.0 - l1 - l2;
            out.mask[idx] = 1;
            out.depth[idx] = l0 * surface.depth[vs[0].i] + l1 * surface.depth[vs[1].i] +
                             l2 * surface.depth[vs[2].i];
        }
    }

    if (uncovered) {
        std::size_t miss = 0;
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (mask[i] && !out.mask[i]) ++miss;
        *uncovered = miss;
    }
    return out;
}

double rmse_aligned(const DepthMap& predicted, const DepthMap& ground_truth,
                    const CameraModel& cam, std::size_t* excluded) {
    if (predicted.width != ground_truth.width || predicted.height != ground_truth.height)
        throw std::invalid_argument("depth map sizes differ");

    std::size_t n = 0, miss = 0;
    for (std::size_t i = 0; i < ground_truth.mask.size(); ++i) {
        if (!ground_truth.mask[i]) continue;
        if (predicted.mask[i])
            ++n;
        else
            ++miss;
    }
    if (excluded) *excluded = miss;
    if (n == 0) throw std::invalid_argument("no overlap between prediction and ground truth");

    double rmse = 0.0;
    if (cam.kind == CameraModel::Kind::Orthographic) {
        double offset = 0.0;
        for (std::size_t i = 0; i < ground_truth.mask.size(); ++i)
            if (ground_truth.mask[i] && predicted.mask[i])
                offset += ground_truth.depth[i] - predicted.depth[i];
        offset /= static_cast<double>(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < ground_truth.mask.size(); ++i)
            if (ground_truth.mask[i] && predicted.mask[i]) {
                const double d = predicted.depth[i] + offset - ground_truth.depth[i];
                acc += d * d;
            }
        // orthographic depths are in pixel units
        rmse = std::sqrt(acc / static_cast<double>(n)) * cam.pixel_pitch;
    } else {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < ground_truth.mask.size(); ++i)
            if (ground_truth.mask[i] && predicted.mask[i]) {
                num += predicted.depth[i] * ground_truth.depth[i];
                den += predicted.depth[i] * predicted.depth[i];
            }
        const double scale = (den > 0.0) ? num / den : 1.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < ground_truth.mask.size(); ++i)
            if (ground_truth.mask[i] && predicted.mask[i]) {
                const double d = scale * predicted.depth[i] - ground_truth.depth[i];
                acc += d * d;
            }
        rmse = std::sqrt(acc / static_cast<double>(n));
    }
    return rmse;
}

double rmse_aligned(const ScreenMesh& mesh, const IntegratedSurface& surface,
                    const DepthMap& ground_truth, const CameraModel& cam, std::size_t* excluded) {
    const DepthMap pred = rasterize_depth(mesh, surface, ground_truth.width, ground_truth.height,
                                          ground_truth.mask, nullptr);
    return rmse_aligned(pred, ground_truth, cam, excluded);
}

std::vector<double> mesh_metric_angles(const ScreenMesh& mesh) {
    std::vector<double> angles;
    angles.reserve(mesh.face_count() * 3);
    for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
        const FaceId f(fi);
        if (mesh.face_deleted(f)) continue;
        const auto p = mesh.face_positions(f);
        const Eigen::Matrix2d& I = mesh.face_metric(f);
        for (int corner = 0; corner < 3; ++corner) {
            const Eigen::Vector2d a = p[(corner + 1) % 3] - p[corner];
            const Eigen::Vector2d b = p[(corner + 2) % 3] - p[corner];
            const double ab = a.dot(I * b);
            const double aa = a.dot(I * a);
            const double bb = b.dot(I * b);
            const double s = std::sqrt(std::max(aa * bb - ab * ab, 0.0));
            angles.push_back(std::atan2(s, ab) * 180.0 / 3.14159265358979323846);
        }
    }
    return angles;
}

PipelineResult run_pipeline(const NormalMap& nm, const CameraModel& cam,
                            const PipelineOptions& options, const DepthMap* ground_truth) {
    PipelineResult result;
    EvalReport& report = result.report;
    report.foreground_pixel_count = nm.foreground_count();

    auto t = Clock::now();
    result.blurred = gaussian_blur_normals(nm, options.blur_sigma);
    report.wall_times["blur"] = seconds_since(t);

    t = Clock::now();
    result.mesh = refine(result.blurred, cam, options.sizing);
    report.wall_times["mesh"] = seconds_since(t);

    t = Clock::now();
    const IntegrationSystem sys = assemble(result.mesh, cam, options.cotangent_mode);
    report.wall_times["assemble"] = seconds_since(t);

    t = Clock::now();
    result.solution = solve(sys, options.solver_tol);
    report.wall_times["solve"] = seconds_since(t);
    if (!result.solution.converged) {
        std::ostringstream os;
        os << "integration solve did not converge: relative residual "
           << result.solution.relative_residual << " after " << result.solution.iterations
           << " iterations";
        throw std::runtime_error(os.str());
    }

    t = Clock::now();
    result.surface = lift(result.mesh, result.solution.z, cam);
    report.wall_times["lift"] = seconds_since(t);

    report.vertex_count = result.mesh.vertex_count();
    report.compression_rate =
        1.0 - static_cast<double>(report.vertex_count) /
                  static_cast<double>(report.foreground_pixel_count);

    std::vector<double> angles = mesh_metric_angles(result.mesh);
    if (!angles.empty()) {
        std::sort(angles.begin(), angles.end());
        report.min_angle_deg = angles.front();
        report.median_angle_deg = angles[angles.size() / 2];
        std::size_t in_range = 0;
        for (const double a : angles)
            if (a >= 20.0 && a <= 120.0) ++in_range;
        report.angle_fraction_20_120 = static_cast<double>(in_range) / angles.size();
    }

    if (options.dense_baseline) {
        t = Clock::now();
        result.dense = integrate_dense_baseline(result.blurred, cam, options.solver_tol,
                                                options.cotangent_mode);
        if (!result.dense->solution.converged)
            throw std::runtime_error("dense baseline solve did not converge");
        result.dense_surface = lift(result.dense->mesh, result.dense->solution.z, cam);
        report.wall_times["dense"] = seconds_since(t);
    }

    if (ground_truth) {
        t = Clock::now();
        report.rmse = rmse_aligned(result.mesh, result.surface, *ground_truth, cam,
                                   &report.rmse_uncovered);
        report.wall_times["eval"] = seconds_since(t);
    }
    return result;
}

std::vector<ScalingRow> scaling_study(SyntheticScene scene, const std::vector<int>& resolutions,
                                      double epsilon_physical, const PipelineOptions& base,
                                      bool dense_baseline) {
    if (resolutions.size() < 2)
        throw std::invalid_argument("scaling study needs at least two resolutions");

    std::vector<ScalingRow> rows;
    for (const int res : resolutions) {
        const double s = static_cast<double>(res) / scene.width;
        SyntheticScene scaled = scene;
        scaled.width = res;
        scaled.height = static_cast<int>(std::lround(scene.height * s));
        scaled.radius = scene.radius * s;
        scaled.center = scene.center * s;
        scaled.crease = scene.crease * s;
        scaled.amplitude = scene.amplitude * s;
        scaled.period = scene.period * s;

        // fixed physical extent across resolutions
        const CameraModel cam = CameraModel::orthographic(static_cast<double>(scene.width) / res);
        auto [nm, gt] = render(scaled);

        PipelineOptions options = base;
        options.sizing.epsilon = cam.physical_to_pixel(epsilon_physical);
        options.dense_baseline = false;

        ScalingRow row;
        row.resolution = res;
        row.foreground_pixels = nm.foreground_count();

        auto t = Clock::now();
        PipelineResult pr = run_pipeline(nm, cam, options, &gt);
        row.vertices = pr.report.vertex_count;
        row.compression_rate = pr.report.compression_rate;
        row.mesh_seconds = pr.report.wall_times["blur"] + pr.report.wall_times["mesh"];
        row.integrate_seconds =
            pr.report.wall_times["assemble"] + pr.report.wall_times["solve"];
        row.rmse = pr.report.rmse;
        (void)t;

        if (dense_baseline) {
            t = Clock::now();
            DenseBaselineResult dense = integrate_dense_baseline(pr.blurred, cam,
                                                                 options.solver_tol,
                                                                 options.cotangent_mode);
            row.dense_seconds = seconds_since(t);
            row.dense_vertices = dense.mesh.vertex_count();
            if (dense.solution.converged) {
                const IntegratedSurface ds = lift(dense.mesh, dense.solution.z, cam);
                row.dense_rmse = rmse_aligned(dense.mesh, ds, gt, cam);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows, bool include_timings) {
    std::ostringstream os;
    os << "resolution,foreground_pixels,vertices,compression_rate,rmse,dense_vertices,dense_rmse";
    if (include_timings) os << ",mesh_seconds,integrate_seconds,dense_seconds";
    os << "\n";
    for (const auto& r : rows) {
        os << r.resolution << "," << r.foreground_pixels << "," << r.vertices << ","
           << fmt(r.compression_rate) << "," << fmt(r.rmse) << "," << r.dense_vertices << ","
           << fmt(r.dense_rmse);
        if (include_timings)
            os << "," << fmt(r.mesh_seconds) << "," << fmt(r.integrate_seconds) << ","
               << fmt(r.dense_seconds);
        os << "\n";
    }
    return os.str();
}

std::string report_csv(const EvalReport& report, bool include_timings) {
    std::ostringstream os;
    os << "vertex_count,foreground_pixel_count,compression_rate,rmse,rmse_uncovered,"
          "min_angle_deg,median_angle_deg,angle_fraction_20_120";
    if (include_timings) {
        for (const auto& [name, unused] : report.wall_times) os << ",seconds_" << name;
    }
    os << "\n";
    os << report.vertex_count << "," << report.foreground_pixel_count << ","
       << fmt(report.compression_rate) << "," << fmt(report.rmse) << "," << report.rmse_uncovered
       << "," << fmt(report.min_angle_deg) << "," << fmt(report.median_angle_deg) << ","
       << fmt(report.angle_fraction_20_120);
    if (include_timings) {
        for (const auto& [unused, t] : report.wall_times) os << "," << fmt(t);
    }
    os << "\n";
    return os.str();
}

} // namespace meshint
