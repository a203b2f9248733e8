#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace meshint {

/*
 * Halfedge triangulation over continuous 2D screen coordinates.
 *
 * Connectivity is index based. Edge e owns halfedges 2e and 2e+1, which are
 * each other's twins. Every halfedge stores the vertex it points to, its
 * next/prev halfedge and its face; boundary halfedges carry an invalid face
 * and are linked into boundary loops. The outgoing halfedge stored per vertex
 * is a boundary halfedge whenever the vertex lies on the boundary, which
 * makes boundary tests O(1).
 *
 * Faces are kept positively oriented in screen coordinates (signed area > 0).
 * Deleted elements are tombstoned; garbage_collect() compacts the arrays in a
 * stable order so element ids remain deterministic.
 */

using Index = std::uint32_t;
inline constexpr Index kInvalidIndex = std::numeric_limits<Index>::max();

struct VertexId {
    Index i = kInvalidIndex;
    VertexId() = default;
    explicit VertexId(Index v) : i(v) {}
    bool valid() const { return i != kInvalidIndex; }
    bool operator==(const VertexId&) const = default;
};
struct HalfedgeId {
    Index i = kInvalidIndex;
    HalfedgeId() = default;
    explicit HalfedgeId(Index v) : i(v) {}
    bool valid() const { return i != kInvalidIndex; }
    bool operator==(const HalfedgeId&) const = default;
};
struct EdgeId {
    Index i = kInvalidIndex;
    EdgeId() = default;
    explicit EdgeId(Index v) : i(v) {}
    bool valid() const { return i != kInvalidIndex; }
    bool operator==(const EdgeId&) const = default;
};
struct FaceId {
    Index i = kInvalidIndex;
    FaceId() = default;
    explicit FaceId(Index v) : i(v) {}
    bool valid() const { return i != kInvalidIndex; }
    bool operator==(const FaceId&) const = default;
};

class ScreenMesh {
public:
    // Signed areas at or below this threshold count as degenerate.
    static constexpr double kDegenerateArea = 1e-9;

    ScreenMesh() = default;

    // Builds connectivity from CCW triangles. Throws std::invalid_argument on
    // non-manifold input (complex edges, bowtie vertices, doubled faces).
    static ScreenMesh from_triangles(const std::vector<Eigen::Vector2d>& positions,
                                     const std::vector<std::array<Index, 3>>& triangles);

    // --- element counts (excluding tombstones) ---------------------------
    std::size_t vertex_count() const { return vertices_.size() - deleted_vertices_; }
    std::size_t edge_count() const { return edge_deleted_.size() - deleted_edges_; }
    std::size_t face_count() const { return faces_.size() - deleted_faces_; }
    std::size_t vertex_capacity() const { return vertices_.size(); }
    std::size_t edge_capacity() const { return edge_deleted_.size(); }
    std::size_t face_capacity() const { return faces_.size(); }
    bool has_tombstones() const {
        return deleted_vertices_ + deleted_edges_ + deleted_faces_ > 0;
    }

    bool vertex_deleted(VertexId v) const { return vertices_[v.i].deleted; }
    bool edge_deleted(EdgeId e) const { return edge_deleted_[e.i] != 0; }
    bool face_deleted(FaceId f) const { return faces_[f.i].deleted; }

    // --- navigation -------------------------------------------------------
    HalfedgeId twin(HalfedgeId h) const { return HalfedgeId(h.i ^ 1u); }
    EdgeId edge(HalfedgeId h) const { return EdgeId(h.i >> 1); }
    HalfedgeId halfedge(EdgeId e, int side) const { return HalfedgeId(2 * e.i + side); }
    HalfedgeId next(HalfedgeId h) const { return halfedges_[h.i].next; }
    HalfedgeId prev(HalfedgeId h) const { return halfedges_[h.i].prev; }
    VertexId to_vertex(HalfedgeId h) const { return halfedges_[h.i].to; }
    VertexId from_vertex(HalfedgeId h) const { return halfedges_[twin(h).i].to; }
    FaceId face(HalfedgeId h) const { return halfedges_[h.i].face; }
    HalfedgeId out_halfedge(VertexId v) const { return vertices_[v.i].out; }
    HalfedgeId face_halfedge(FaceId f) const { return faces_[f.i].halfedge; }

    VertexId vertex0(EdgeId e) const { return from_vertex(halfedge(e, 0)); }
    VertexId vertex1(EdgeId e) const { return to_vertex(halfedge(e, 0)); }

    bool is_boundary(HalfedgeId h) const { return !halfedges_[h.i].face.valid(); }
    bool is_boundary(EdgeId e) const {
        return is_boundary(halfedge(e, 0)) || is_boundary(halfedge(e, 1));
    }
    bool is_boundary(VertexId v) const {
        HalfedgeId h = out_halfedge(v);
        return h.valid() && is_boundary(h);
    }

    // Clockwise rotation around the origin vertex of h (twin then next).
    HalfedgeId rotate_cw(HalfedgeId h) const { return next(twin(h)); }
    // Counterclockwise rotation (prev then twin).
    HalfedgeId rotate_ccw(HalfedgeId h) const { return twin(prev(h)); }

    std::array<VertexId, 3> face_vertices(FaceId f) const;
    std::array<Eigen::Vector2d, 3> face_positions(FaceId f) const;

    // Counterclockwise ordered one-ring neighbors and star faces.
    void one_ring(VertexId v, std::vector<VertexId>* neighbors,
                  std::vector<FaceId>* faces = nullptr) const;
    std::size_t valence(VertexId v) const;

    // --- geometry and attributes ------------------------------------------
    const Eigen::Vector2d& position(VertexId v) const { return vertices_[v.i].pos; }
    void set_position(VertexId v, const Eigen::Vector2d& p) { vertices_[v.i].pos = p; }
    double target_length(VertexId v) const { return vertices_[v.i].target_length; }
    void set_target_length(VertexId v, double l) { vertices_[v.i].target_length = l; }
    double vertex_curvature(VertexId v) const { return vertices_[v.i].kappa; }
    void set_vertex_curvature(VertexId v, double k) { vertices_[v.i].kappa = k; }

    const Eigen::Vector3d& face_normal(FaceId f) const { return faces_[f.i].normal; }
    void set_face_normal(FaceId f, const Eigen::Vector3d& n) { faces_[f.i].normal = n; }
    const Eigen::Matrix2d& face_metric(FaceId f) const { return faces_[f.i].metric; }
    void set_face_metric(FaceId f, const Eigen::Matrix2d& m) { faces_[f.i].metric = m; }

    double face_area(FaceId f) const;      // signed screen area
    Eigen::Vector2d face_centroid(FaceId f) const;

    // --- local edits --------------------------------------------------------
    // Splits e at the given position (2 faces become 4; 1 becomes 2 on the
    // boundary). The new vertex gets the endpoint means of target length and
    // curvature; child faces inherit the parent caches.
    VertexId edge_split(EdgeId e, const Eigen::Vector2d& position);
    VertexId edge_split(EdgeId e); // midpoint

    // Collapse legality: link condition, boundary policy (boundary vertices
    // keep their position; a boundary-boundary pair requires a boundary edge
    // and an endpoint target), and no surviving face degenerate or inverted
    // at the target. Returns false without mutating on rejection.
    bool collapse_legal(EdgeId e, const Eigen::Vector2d& target) const;
    bool edge_collapse(EdgeId e, const Eigen::Vector2d& target);

    // Flips an interior edge whose adjacent faces form a strictly convex
    // quadrilateral; rejects boundary edges, existing opposite edges and
    // flips that would create degenerate faces.
    bool flip_legal(EdgeId e) const;
    bool edge_flip(EdgeId e);

    // --- maintenance ---------------------------------------------------------
    // Stable compaction of tombstoned elements; invalidates all ids.
    void garbage_collect();

    // Full connectivity and orientation validation; returns false and fills
    // `why` (if given) on the first violated invariant. Checks twin/next/prev
    // consistency, single-fan vertices, face orientation and the Euler count
    // V - E + F = 2C - B for genus-0 components.
    bool validate(std::string* why = nullptr) const;

private:
    struct Halfedge {
        VertexId to;
        HalfedgeId next;
        HalfedgeId prev;
        FaceId face;
    };
    struct Vertex {
        Eigen::Vector2d pos = Eigen::Vector2d::Zero();
        HalfedgeId out;
        double target_length = 0.0;
        double kappa = 0.0;
        bool deleted = false;
    };
    struct Face {
        HalfedgeId halfedge;
        Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
        Eigen::Matrix2d metric = Eigen::Matrix2d::Identity();
        bool deleted = false;
    };

    std::vector<Halfedge> halfedges_;
    std::vector<Vertex> vertices_;
    std::vector<Face> faces_;
    std::vector<std::uint8_t> edge_deleted_;
    std::size_t deleted_vertices_ = 0;
    std::size_t deleted_edges_ = 0;
    std::size_t deleted_faces_ = 0;

    VertexId new_vertex(const Eigen::Vector2d& p);
    EdgeId new_edge(VertexId from, VertexId to);
    FaceId new_face();

    void set_next(HalfedgeId h, HalfedgeId n) {
        halfedges_[h.i].next = n;
        halfedges_[n.i].prev = h;
    }
    void set_to_vertex(HalfedgeId h, VertexId v) { halfedges_[h.i].to = v; }
    void set_face(HalfedgeId h, FaceId f) { halfedges_[h.i].face = f; }
    void set_face_halfedge(FaceId f, HalfedgeId h) { faces_[f.i].halfedge = h; }
    void set_out_halfedge(VertexId v, HalfedgeId h) { vertices_[v.i].out = h; }

    // Re-points the outgoing halfedge to a boundary halfedge if one exists.
    void adjust_out_halfedge(VertexId v);

    void delete_vertex(VertexId v);
    void delete_edge_record(EdgeId e);
    void delete_face_record(FaceId f);

    // Removes halfedge pair of e from its loops and merges a's incidences
    // into the surviving vertex; helper of edge_collapse.
    void collapse_rewire(HalfedgeId h);
    void remove_degenerate_loop(HalfedgeId h);

    static double triangle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                const Eigen::Vector2d& c) {
        return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
    }
};

} // namespace meshint
