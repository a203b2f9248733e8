#include "meshint/remesher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meshint {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Edge-function tie rule: a pixel center exactly on an edge belongs to the
// face whose traversal direction d satisfies (d.y > 0) or (d.y == 0 and
// d.x < 0). Shared edges are traversed in opposite directions by the two
// incident faces, so every tie is claimed exactly once.
bool center_in_face(const std::array<Eigen::Vector2d, 3>& p, const Eigen::Vector2d& c) {
    for (int k = 0; k < 3; ++k) {
        const Eigen::Vector2d& a = p[k];
        const Eigen::Vector2d& b = p[(k + 1) % 3];
        const double e = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
        if (e < 0.0) return false;
        if (e == 0.0) {
            const double dx = b.x() - a.x();
            const double dy = b.y() - a.y();
            if (!(dy > 0.0 || (dy == 0.0 && dx < 0.0))) return false;
        }
    }
    return true;
}

} // namespace

void SizingConfig::check() const {
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    if (!(0.0 < l_min && l_min < l_max)) throw std::invalid_argument("need 0 < l_min < l_max");
    if (outer_iterations < 0 || smoothing_iterations < 0)
        throw std::invalid_argument("iteration counts must be non-negative");
}

// ---------------------------------------------------------------------------
// initial triangulation
// ---------------------------------------------------------------------------

ScreenMesh initial_triangulation(const NormalMap& nm) {
    const int w = nm.width, h = nm.height;
    if (nm.foreground_count() == 0) throw std::invalid_argument("empty mask");

    const int cw = w + 1, ch = h + 1;
    auto corner_index = [cw](int cx, int cy) { return static_cast<std::size_t>(cy) * cw + cx; };

    // Quadrant pixels around corner (cx,cy) in cyclic order NW, NE, SE, SW.
    // Edge-connected groups of foreground quadrants get one vertex copy each,
    // which resolves corner-touching pixels into separate manifold fans.
    auto quadrant_pixel = [](int cx, int cy, int q, int* px, int* py) {
        static const int dx[4] = {-1, 0, 0, -1};
        static const int dy[4] = {-1, -1, 0, 0};
        *px = cx + dx[q];
        *py = cy + dy[q];
    };

    std::vector<std::array<Index, 4>> corner_vertex(
        static_cast<std::size_t>(cw) * ch,
        {kInvalidIndex, kInvalidIndex, kInvalidIndex, kInvalidIndex});
    std::vector<Eigen::Vector2d> positions;
    positions.reserve(nm.foreground_count() * 2);

    for (int cy = 0; cy < ch; ++cy)
        for (int cx = 0; cx < cw; ++cx) {
            bool present[4];
            bool any = false;
            for (int q = 0; q < 4; ++q) {
                int px, py;
                quadrant_pixel(cx, cy, q, &px, &py);
                present[q] = nm.foreground(px, py);
                any |= present[q];
            }
            if (!any) continue;

            // connected components on the 4-cycle of present quadrants
            int comp[4] = {-1, -1, -1, -1};
            int ncomp = 0;
            for (int q = 0; q < 4; ++q) {
                if (!present[q] || comp[q] >= 0) continue;
                comp[q] = ncomp;
                // walk both cyclic directions while connected
                for (int dir : {1, 3}) {
                    int cur = q;
                    while (true) {
                        const int nxt = (cur + dir) % 4;
                        if (!present[nxt] || comp[nxt] >= 0) break;
                        comp[nxt] = ncomp;
                        cur = nxt;
                    }
                }
                ++ncomp;
            }
            std::array<Index, 4>& slot = corner_vertex[corner_index(cx, cy)];
            std::vector<Index> comp_vertex(ncomp, kInvalidIndex);
            for (int q = 0; q < 4; ++q) {
                if (!present[q]) continue;
                if (comp_vertex[comp[q]] == kInvalidIndex) {
                    comp_vertex[comp[q]] = static_cast<Index>(positions.size());
                    positions.emplace_back(static_cast<double>(cx), static_cast<double>(cy));
                }
                slot[q] = comp_vertex[comp[q]];
            }
        }

    // two CCW triangles per pixel along the (i,j)->(i+1,j+1) diagonal;
    // quadrant of pixel (x,y) as seen from each of its corners: SE=2 of
    // (x,y), SW=3 of (x+1,y), NE=1 of (x,y+1), NW=0 of (x+1,y+1)
    std::vector<std::array<Index, 3>> triangles;
    triangles.reserve(nm.foreground_count() * 2);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!nm.foreground(x, y)) continue;
            const Index v00 = corner_vertex[corner_index(x, y)][2];
            const Index v10 = corner_vertex[corner_index(x + 1, y)][3];
            const Index v01 = corner_vertex[corner_index(x, y + 1)][1];
            const Index v11 = corner_vertex[corner_index(x + 1, y + 1)][0];
            triangles.push_back({v00, v10, v11});
            triangles.push_back({v00, v11, v01});
        }

    return ScreenMesh::from_triangles(positions, triangles);
}

// ---------------------------------------------------------------------------
// rasterization
// ---------------------------------------------------------------------------

FaceCoverage rasterize(const ScreenMesh& mesh, const NormalMap& nm) {
    FaceCoverage cov;
    cov.offsets.assign(mesh.face_capacity() + 1, 0);
    cov.pixel_indices.reserve(nm.foreground_count());

    for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
        cov.offsets[fi] = cov.pixel_indices.size();
        const FaceId f(fi);
        if (mesh.face_deleted(f)) continue;
        const auto p = mesh.face_positions(f);

        const double minx = std::min({p[0].x(), p[1].x(), p[2].x()});
        const double maxx = std::max({p[0].x(), p[1].x(), p[2].x()});
        const double miny = std::min({p[0].y(), p[1].y(), p[2].y()});
        const double maxy = std::max({p[0].y(), p[1].y(), p[2].y()});
        const int x0 = std::max(0, static_cast<int>(std::floor(minx - 0.5)));
        const int x1 = std::min(nm.width - 1, static_cast<int>(std::ceil(maxx - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor(miny - 0.5)));
        const int y1 = std::min(nm.height - 1, static_cast<int>(std::ceil(maxy - 0.5)));

        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                if (!nm.mask[nm.index(x, y)]) continue;
                if (center_in_face(p, Eigen::Vector2d(x + 0.5, y + 0.5)))
                    cov.pixel_indices.push_back(static_cast<std::uint32_t>(nm.index(x, y)));
            }
    }
    cov.offsets[mesh.face_capacity()] = cov.pixel_indices.size();
    return cov;
}

Eigen::Vector3d face_normal_from_pixels(const ScreenMesh& mesh, FaceId f, const NormalMap& nm,
                                        const FaceCoverage& coverage) {
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (std::size_t k = coverage.offsets[f.i]; k < coverage.offsets[f.i + 1]; ++k)
        sum += nm.normals[coverage.pixel_indices[k]];
    if (sum.norm() > 1e-12) return sum.normalized();

    // empty or cancelling list: mask-aware bilinear sample at the centroid
    const Eigen::Vector2d c = mesh.face_centroid(f);
    const double gx = c.x() - 0.5, gy = c.y() - 0.5;
    const int x0 = static_cast<int>(std::floor(gx));
    const int y0 = static_cast<int>(std::floor(gy));
    const double wx = gx - x0, wy = gy - y0;
    const double weights[4] = {(1 - wx) * (1 - wy), wx * (1 - wy), (1 - wx) * wy, wx * wy};
    const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
    const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
    sum.setZero();
    double wsum = 0.0;
    for (int k = 0; k < 4; ++k)
        if (nm.foreground(xs[k], ys[k])) {
            sum += weights[k] * nm.normal(xs[k], ys[k]);
            wsum += weights[k];
        }
    if (wsum > 1e-12 && sum.norm() > 1e-12) return sum.normalized();

    // centroid over background (e.g. across a mask concavity): nearest
    // foreground pixel in expanding rings
    const int cx = static_cast<int>(std::floor(c.x()));
    const int cy = static_cast<int>(std::floor(c.y()));
    for (int r = 0; r <= 32; ++r) {
        double best_d2 = std::numeric_limits<double>::infinity();
        Eigen::Vector3d best = Eigen::Vector3d::Zero();
        for (int y = cy - r; y <= cy + r; ++y)
            for (int x = cx - r; x <= cx + r; ++x) {
                if (std::max(std::abs(x - cx), std::abs(y - cy)) != r) continue;
                if (!nm.foreground(x, y)) continue;
                const double d2 = (Eigen::Vector2d(x + 0.5, y + 0.5) - c).squaredNorm();
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = nm.normal(x, y);
                }
            }
        if (best_d2 < std::numeric_limits<double>::infinity()) return best;
    }
    return Eigen::Vector3d::UnitZ();
}

// ---------------------------------------------------------------------------
// sizing
// ---------------------------------------------------------------------------

double edge_length_metric(const ScreenMesh& mesh, EdgeId e) {
    const Eigen::Vector2d d = mesh.position(mesh.vertex0(e)) - mesh.position(mesh.vertex1(e));
    const HalfedgeId h0 = mesh.halfedge(e, 0);
    const HalfedgeId h1 = mesh.halfedge(e, 1);
    double q = 0.0;
    int nfaces = 0;
    for (const HalfedgeId h : {h0, h1}) {
        const FaceId f = mesh.face(h);
        if (!f.valid()) continue;
        q += d.dot(mesh.face_metric(f) * d);
        ++nfaces;
    }
    if (nfaces == 2) q *= 0.5;
    return std::sqrt(std::max(q, 0.0));
}

void vertex_curvature_and_length(ScreenMesh& mesh, const CurvatureField& cf,
                                 const FaceCoverage& coverage, const SizingConfig& cfg) {
    // per-face curvature maximum over covered pixels (-1: no pixels)
    std::vector<double> face_kappa(mesh.face_capacity(), -1.0);
    for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
        if (mesh.face_deleted(FaceId(fi))) continue;
        double k = -1.0;
        for (std::size_t j = coverage.offsets[fi]; j < coverage.offsets[fi + 1]; ++j)
            k = std::max(k, cf.kappa_max[coverage.pixel_indices[j]]);
        face_kappa[fi] = k;
    }

    std::vector<FaceId> star;
    for (Index vi = 0; vi < mesh.vertex_capacity(); ++vi) {
        const VertexId v(vi);
        if (mesh.vertex_deleted(v)) continue;
        mesh.one_ring(v, nullptr, &star);
        double kappa = 0.0;
        for (const FaceId f : star)
            if (face_kappa[f.i] >= 0.0) kappa = std::max(kappa, face_kappa[f.i]);
        mesh.set_vertex_curvature(v, kappa);

        double length = cfg.l_max;
        if (kappa > 0.0) {
            const double radicand = 6.0 * cfg.epsilon / kappa - cfg.epsilon * cfg.epsilon;
            length = (radicand <= 0.0) ? cfg.l_min
                                       : std::clamp(std::sqrt(radicand), cfg.l_min, cfg.l_max);
        }
        mesh.set_target_length(v, length);
    }
}

// ---------------------------------------------------------------------------
// tangential smoothing
// ---------------------------------------------------------------------------

void tangential_smooth(ScreenMesh& mesh, const SizingConfig& cfg) {
    std::vector<FaceId> star;
    std::vector<Eigen::Vector2d> target(mesh.vertex_capacity());
    std::vector<std::uint8_t> has_target(mesh.vertex_capacity());

    for (int pass = 0; pass < cfg.smoothing_iterations; ++pass) {
        std::fill(has_target.begin(), has_target.end(), 0);

        // per-face weights from the previous iterate
        std::vector<double> weight(mesh.face_capacity(), 0.0);
        std::vector<Eigen::Vector2d> centroid(mesh.face_capacity());
        for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
            const FaceId f(fi);
            if (mesh.face_deleted(f)) continue;
            const auto vs = mesh.face_vertices(f);
            const double lf = (mesh.target_length(vs[0]) + mesh.target_length(vs[1]) +
                               mesh.target_length(vs[2])) /
                              3.0;
            const double det = std::max(mesh.face_metric(f).determinant(), 0.0);
            weight[fi] = mesh.face_area(f) * std::sqrt(det) / (lf * lf);
            centroid[fi] = mesh.face_centroid(f);
        }

        for (Index vi = 0; vi < mesh.vertex_capacity(); ++vi) {
            const VertexId v(vi);
            if (mesh.vertex_deleted(v) || mesh.is_boundary(v)) continue;
            mesh.one_ring(v, nullptr, &star);
            Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
            Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
            for (const FaceId f : star) {
                const Eigen::Matrix2d wI = weight[f.i] * mesh.face_metric(f);
                M += wI;
                rhs += wI * centroid[f.i];
            }
            // eigenvalues of the symmetric 2x2 system for the condition guard
            const double tr = M.trace();
            const double det = M.determinant();
            const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
            const double lmin = 0.5 * tr - disc;
            const double lmax = 0.5 * tr + disc;
            if (!(lmin > 0.0) || lmax > 1e12 * lmin) continue;
            target[vi] = M.inverse() * rhs;
            has_target[vi] = 1;
        }

        // apply in id order; reject moves that would invert an incident face
        for (Index vi = 0; vi < mesh.vertex_capacity(); ++vi) {
            if (!has_target[vi]) continue;
            const VertexId v(vi);
            const Eigen::Vector2d old_pos = mesh.position(v);
            mesh.set_position(v, target[vi]);
            mesh.one_ring(v, nullptr, &star);
            bool ok = true;
            for (const FaceId f : star)
                if (mesh.face_area(f) <= ScreenMesh::kDegenerateArea) {
                    ok = false;
                    break;
                }
            if (!ok) mesh.set_position(v, old_pos);
        }
    }
}

FaceCoverage update_mesh_fields(ScreenMesh& mesh, const NormalMap& nm, const CameraModel& cam,
                                const CurvatureField& cf, const SizingConfig& cfg) {
    FaceCoverage cov = rasterize(mesh, nm);
    for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
        const FaceId f(fi);
        if (mesh.face_deleted(f)) continue;
        const Eigen::Vector3d n = face_normal_from_pixels(mesh, f, nm, cov);
        mesh.set_face_normal(f, n);
        mesh.set_face_metric(f, first_fundamental_form(n, cam, mesh.face_centroid(f)));
    }
    vertex_curvature_and_length(mesh, cf, cov, cfg);
    return cov;
}

// ---------------------------------------------------------------------------
// refinement loop
// ---------------------------------------------------------------------------

namespace {

double edge_target_length(const ScreenMesh& mesh, EdgeId e) {
    return 0.5 * (mesh.target_length(mesh.vertex0(e)) + mesh.target_length(mesh.vertex1(e)));
}

// Snapshot of alive edges sorted by metric length (ties by id).
std::vector<std::pair<double, Index>> edge_snapshot(const ScreenMesh& mesh) {
    std::vector<std::pair<double, Index>> edges;
    edges.reserve(mesh.edge_count());
    for (Index ei = 0; ei < mesh.edge_capacity(); ++ei)
        if (!mesh.edge_deleted(EdgeId(ei)))
            edges.emplace_back(edge_length_metric(mesh, EdgeId(ei)), ei);
    return edges;
}

void split_pass(ScreenMesh& mesh, const SizingConfig& cfg) {
    auto edges = edge_snapshot(mesh);
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first; // longest first
        return a.second < b.second;
    });
    for (const auto& le : edges) {
        const EdgeId e(le.second);
        if (mesh.edge_deleted(e)) continue;
        // boundary edges are never split: every boundary vertex must stay on
        // the initial silhouette polyline
        if (mesh.is_boundary(e)) continue;
        const double l = edge_length_metric(mesh, e);
        if (l > cfg.split_factor * edge_target_length(mesh, e)) mesh.edge_split(e);
    }
}

// True if the boundary vertex is collinear with its two boundary neighbors.
bool boundary_vertex_straight(const ScreenMesh& mesh, VertexId v) {
    const HalfedgeId out = mesh.out_halfedge(v);
    if (!mesh.is_boundary(out)) return false;
    const Eigen::Vector2d& pn = mesh.position(mesh.to_vertex(out));
    const Eigen::Vector2d& pp = mesh.position(mesh.from_vertex(mesh.prev(out)));
    const Eigen::Vector2d& p = mesh.position(v);
    const double cross = (p.x() - pp.x()) * (pn.y() - p.y()) - (p.y() - pp.y()) * (pn.x() - p.x());
    return std::abs(cross) <= 1e-9;
}

bool choose_collapse_target(const ScreenMesh& mesh, EdgeId e, Eigen::Vector2d* target) {
    const VertexId a = mesh.vertex0(e);
    const VertexId b = mesh.vertex1(e);
    const bool ba = mesh.is_boundary(a);
    const bool bb = mesh.is_boundary(b);
    if (!ba && !bb) {
        *target = 0.5 * (mesh.position(a) + mesh.position(b));
        return true;
    }
    if (ba != bb) {
        *target = mesh.position(ba ? a : b);
        return true;
    }
    if (!mesh.is_boundary(e)) return false;
    // both endpoints on the boundary: keep a silhouette corner if exactly one
    // endpoint is one, otherwise keep the lower id
    const bool sa = boundary_vertex_straight(mesh, a);
    const bool sb = boundary_vertex_straight(mesh, b);
    if (sa != sb) {
        *target = mesh.position(sa ? b : a);
        return true;
    }
    *target = mesh.position(a.i < b.i ? a : b);
    return true;
}

// The new edges around the merged vertex must not exceed the split threshold.
bool collapse_creates_long_edge(const ScreenMesh& mesh, EdgeId e, const Eigen::Vector2d& target,
                                const SizingConfig& cfg) {
    const VertexId a = mesh.vertex0(e);
    const VertexId b = mesh.vertex1(e);
    const double merged_target = edge_target_length(mesh, e);
    std::vector<VertexId> ring;
    for (const VertexId v : {a, b}) {
        if (mesh.position(v) == target) continue; // its edges keep their length
        mesh.one_ring(v, &ring);
        for (const VertexId w : ring) {
            if (w == a || w == b) continue;
            const Eigen::Vector2d d = mesh.position(w) - target;
            // approximate the new metric with the faces of the existing edge
            HalfedgeId h = mesh.out_halfedge(v);
            const HalfedgeId start = h;
            double q = 0.0;
            int nf = 0;
            do {
                if (mesh.to_vertex(h) == w) {
                    for (const HalfedgeId side : {h, mesh.twin(h)}) {
                        const FaceId f = mesh.face(side);
                        if (!f.valid()) continue;
                        q += d.dot(mesh.face_metric(f) * d);
                        ++nf;
                    }
                    break;
                }
                h = mesh.rotate_cw(h);
            } while (!(h == start));
            if (nf == 0) continue;
            const double len = std::sqrt(std::max(q / nf, 0.0));
            const double allowed = cfg.split_factor * 0.5 * (merged_target + mesh.target_length(w));
            if (len > allowed) return true;
        }
    }
    return false;
}

void collapse_pass(ScreenMesh& mesh, const SizingConfig& cfg) {
    auto edges = edge_snapshot(mesh);
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first; // shortest first
        return a.second < b.second;
    });
    for (const auto& le : edges) {
        const EdgeId e(le.second);
        if (mesh.edge_deleted(e)) continue;
        const double l = edge_length_metric(mesh, e);
        if (l >= cfg.collapse_factor * edge_target_length(mesh, e)) continue;
        Eigen::Vector2d target;
        if (!choose_collapse_target(mesh, e, &target)) continue;
        if (collapse_creates_long_edge(mesh, e, target, cfg)) continue;
        mesh.edge_collapse(e, target);
    }
}

double corner_angle(const Eigen::Vector2d& at, const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    const Eigen::Vector2d a = p - at;
    const Eigen::Vector2d b = q - at;
    const double cross = a.x() * b.y() - a.y() * b.x();
    return std::atan2(std::abs(cross), a.dot(b));
}

void flip_pass(ScreenMesh& mesh) {
    const std::size_t cap = 10 * mesh.edge_count();
    std::size_t total = 0;
    bool changed = true;
    while (changed && total < cap) {
        changed = false;
        for (Index ei = 0; ei < mesh.edge_capacity() && total < cap; ++ei) {
            const EdgeId e(ei);
            if (mesh.edge_deleted(e) || mesh.is_boundary(e)) continue;
            const HalfedgeId h = mesh.halfedge(e, 0);
            const HalfedgeId o = mesh.halfedge(e, 1);
            const Eigen::Vector2d& pa = mesh.position(mesh.from_vertex(h));
            const Eigen::Vector2d& pb = mesh.position(mesh.to_vertex(h));
            const Eigen::Vector2d& pc = mesh.position(mesh.to_vertex(mesh.next(h)));
            const Eigen::Vector2d& pd = mesh.position(mesh.to_vertex(mesh.next(o)));
            // plain screen Delaunay criterion on the opposite angles
            if (corner_angle(pc, pa, pb) + corner_angle(pd, pb, pa) <= kPi + 1e-9) continue;
            if (mesh.edge_flip(e)) {
                changed = true;
                ++total;
            }
        }
    }
}

} // namespace

ScreenMesh refine(const NormalMap& nm, const CameraModel& cam, const SizingConfig& cfg,
                  const std::function<void(const ScreenMesh&, int)>& per_iteration) {
    cfg.check();
    const CurvatureField cf = curvature_field(nm, cam);
    ScreenMesh mesh = initial_triangulation(nm);
    update_mesh_fields(mesh, nm, cam, cf, cfg);

    for (int iter = 0; iter < cfg.outer_iterations; ++iter) {
        split_pass(mesh, cfg);
        collapse_pass(mesh, cfg);
        flip_pass(mesh);
        tangential_smooth(mesh, cfg);
        mesh.garbage_collect();
        update_mesh_fields(mesh, nm, cam, cf, cfg);
        if (cfg.validate_each_iteration) {
            std::string why;
            if (!mesh.validate(&why))
                throw std::logic_error("mesh validation failed after refinement iteration " +
                                       std::to_string(iter) + ": " + why);
        }
        if (per_iteration) per_iteration(mesh, iter);
    }
    return mesh;
}

} // namespace meshint
