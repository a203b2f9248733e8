#include "meshint/integrator.hpp"

#include "meshint/diffgeo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace meshint {

std::pair<double, double> face_constants(const Eigen::Vector3d& n_f,
                                         const std::array<Eigen::Vector3d, 3>& rays) {
    const double s0 = n_f.dot(rays[0]);
    const double s1 = n_f.dot(rays[1]);
    const double s2 = n_f.dot(rays[2]);
    const double m = (s0 * s0 + s1 * s1 + s2 * s2 + s0 * s1 + s0 * s2 + s1 * s2) / 12.0;
    const double b = (s0 + s1 + s2) / 3.0;
    return {m, b};
}

double cot_corner(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Matrix2d& I) {
    const double ab = a.dot(I * b);
    const double aa = a.dot(I * a);
    const double bb = b.dot(I * b);
    const double radicand = std::max(aa * bb - ab * ab, 1e-18);
    const double cot = ab / std::sqrt(radicand);
    return std::clamp(cot, -1e6, 1e6);
}

IntegrationSystem assemble(const ScreenMesh& mesh, const CameraModel& cam, CotangentMode mode) {
    if (mesh.has_tombstones())
        throw std::logic_error("assemble requires a compacted mesh");

    const Index n = static_cast<Index>(mesh.vertex_count());
    IntegrationSystem sys;
    sys.rhs = Eigen::VectorXd::Zero(n);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.face_count() * 12);

    for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
        const FaceId f(fi);
        const auto vs = mesh.face_vertices(f);
        const auto p = mesh.face_positions(f);
        const double area =
            0.5 * ((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x());
        if (area <= ScreenMesh::kDegenerateArea) {
            ++sys.skipped_faces;
            continue;
        }

        const Eigen::Vector3d& n_f = mesh.face_normal(f);
        const std::array<Eigen::Vector3d, 3> rays = {cam.ray(p[0]), cam.ray(p[1]), cam.ray(p[2])};
        const auto [m_f, b_f] = face_constants(n_f, rays);
        const Eigen::Matrix2d I = (mode == CotangentMode::Metric) ? mesh.face_metric(f)
                                                                  : Eigen::Matrix2d::Identity();
        const Eigen::Vector2d w(n_f.x(), n_f.y());

        for (int corner = 0; corner < 3; ++corner) {
            const int i = (corner + 1) % 3;
            const int j = (corner + 2) % 3;
            const double c = cot_corner(p[i] - p[corner], p[j] - p[corner], I);
            const Index vi = vs[i].i;
            const Index vj = vs[j].i;
            const double a = 2.0 * c * m_f;
            triplets.emplace_back(vi, vi, a);
            triplets.emplace_back(vj, vj, a);
            triplets.emplace_back(vi, vj, -a);
            triplets.emplace_back(vj, vi, -a);
            const double r = c * b_f * w.dot(p[j] - p[i]);
            sys.rhs[vi] += r;
            sys.rhs[vj] -= r;
        }
    }

    sys.matrix.resize(n, n);
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.matrix.makeCompressed();

    // connected components over edges
    std::vector<Index> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (Index ei = 0; ei < mesh.edge_capacity(); ++ei) {
        const EdgeId e(ei);
        const Index a = find(mesh.vertex0(e).i);
        const Index b = find(mesh.vertex1(e).i);
        if (a != b) parent[a] = b;
    }
    sys.component.assign(n, 0);
    std::vector<Index> label(n, kInvalidIndex);
    Index ncomp = 0;
    for (Index v = 0; v < n; ++v) {
        const Index root = find(v);
        if (label[root] == kInvalidIndex) label[root] = ncomp++;
        sys.component[v] = label[root];
    }
    sys.component_count = ncomp;
    return sys;
}

namespace {

// Removes the per-component mean: the projection onto the orthogonal
// complement of the constant-per-component kernel.
void deflate(Eigen::VectorXd& v, const std::vector<Index>& component, std::size_t ncomp) {
    std::vector<double> sum(ncomp, 0.0);
    std::vector<std::size_t> count(ncomp, 0);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        sum[component[i]] += v[i];
        ++count[component[i]];
    }
    for (std::size_t c = 0; c < ncomp; ++c)
        if (count[c] > 0) sum[c] /= static_cast<double>(count[c]);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] -= sum[component[i]];
}

} // namespace

SolveResult solve(const IntegrationSystem& sys, double tol) {
    const Eigen::Index n = sys.matrix.rows();
    SolveResult result;
    result.z = Eigen::VectorXd::Zero(n);
    if (n == 0) {
        result.converged = true;
        return result;
    }

    Eigen::VectorXd b = sys.rhs;
    deflate(b, sys.component, sys.component_count);
    const double norm_b = b.norm();
    if (norm_b < 1e-300) {
        result.converged = true;
        return result;
    }

    Eigen::VectorXd minv(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = sys.matrix.coeff(i, i);
        minv[i] = (d > 0.0) ? 1.0 / d : 1.0;
    }

    const int max_iterations = static_cast<int>(10 * n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = minv.cwiseProduct(r);
    deflate(z, sys.component, sys.component_count);
    Eigen::VectorXd p = z;
    double rz = r.dot(z);

    int it = 0;
    while (it < max_iterations) {
        if (r.norm() <= tol * norm_b) {
            // recurrence can drift; accept only the true residual
            r = b - sys.matrix * x;
            deflate(r, sys.component, sys.component_count);
            if (r.norm() <= tol * norm_b) break;
            z = minv.cwiseProduct(r);
            deflate(z, sys.component, sys.component_count);
            p = z;
            rz = r.dot(z);
        }
        const Eigen::VectorXd Ap = sys.matrix * p;
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) break; // breakdown on the semidefinite kernel
        const double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        deflate(r, sys.component, sys.component_count);
        z = minv.cwiseProduct(r);
        deflate(z, sys.component, sys.component_count);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        ++it;
    }

    deflate(x, sys.component, sys.component_count);
    Eigen::VectorXd true_r = b - sys.matrix * x;
    deflate(true_r, sys.component, sys.component_count);
    result.z = x;
    result.iterations = it;
    result.relative_residual = true_r.norm() / norm_b;
    result.converged = result.relative_residual <= tol;
    return result;
}

IntegratedSurface lift(const ScreenMesh& mesh, const Eigen::VectorXd& z, const CameraModel& cam) {
    if (mesh.has_tombstones()) throw std::logic_error("lift requires a compacted mesh");
    const Index n = static_cast<Index>(mesh.vertex_count());
    if (z.size() != static_cast<Eigen::Index>(n))
        throw std::invalid_argument("depth vector does not match vertex count");

    IntegratedSurface surface;
    surface.positions.resize(n);
    surface.depth.resize(n);

    if (cam.kind == CameraModel::Kind::Orthographic) {
        const double s = cam.pixel_pitch;
        for (Index v = 0; v < n; ++v) {
            const Eigen::Vector2d& u = mesh.position(VertexId(v));
            surface.positions[v] = Eigen::Vector3d(u.x() * s, u.y() * s, z[v] * s);
            surface.depth[v] = z[v];
        }
    } else {
        const double mean = z.mean();
        for (Index v = 0; v < n; ++v) {
            const Eigen::Vector2d& u = mesh.position(VertexId(v));
            const double h = cam.mean_distance * std::exp(z[v] - mean);
            surface.positions[v] = cam.ray(u) * h;
            surface.depth[v] = h;
        }
    }

    surface.triangles.reserve(mesh.face_count());
    for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
        const auto vs = mesh.face_vertices(FaceId(fi));
        surface.triangles.push_back({vs[0].i, vs[1].i, vs[2].i});
    }
    return surface;
}

DenseBaselineResult integrate_dense_baseline(const NormalMap& nm, const CameraModel& cam,
                                             double tol, CotangentMode mode) {
    DenseBaselineResult result;
    result.mesh = initial_triangulation(nm);

    // each face of the pixel grid is covered by exactly one pixel, found from
    // the centroid
    for (Index fi = 0; fi < result.mesh.face_capacity(); ++fi) {
        const FaceId f(fi);
        const Eigen::Vector2d c = result.mesh.face_centroid(f);
        const int x = static_cast<int>(std::floor(c.x()));
        const int y = static_cast<int>(std::floor(c.y()));
        const Eigen::Vector3d n = nm.foreground(x, y) ? nm.normal(x, y) : Eigen::Vector3d::UnitZ();
        result.mesh.set_face_normal(f, n);
        result.mesh.set_face_metric(f, first_fundamental_form(n, cam, c));
    }

    const IntegrationSystem sys = assemble(result.mesh, cam, mode);
    result.solution = solve(sys, tol);
    return result;
}

} // namespace meshint
