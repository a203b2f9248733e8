#include "meshint/halfedge.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace meshint {

namespace {

inline std::uint64_t directed_key(Index a, Index b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

} // namespace

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

VertexId ScreenMesh::new_vertex(const Eigen::Vector2d& p) {
    Vertex v;
    v.pos = p;
    vertices_.push_back(v);
    return VertexId(static_cast<Index>(vertices_.size() - 1));
}

EdgeId ScreenMesh::new_edge(VertexId from, VertexId to) {
    Halfedge h0, h1;
    h0.to = to;
    h1.to = from;
    halfedges_.push_back(h0);
    halfedges_.push_back(h1);
    edge_deleted_.push_back(0);
    return EdgeId(static_cast<Index>(edge_deleted_.size() - 1));
}

FaceId ScreenMesh::new_face() {
    faces_.push_back(Face{});
    return FaceId(static_cast<Index>(faces_.size() - 1));
}

void ScreenMesh::delete_vertex(VertexId v) {
    vertices_[v.i].deleted = true;
    vertices_[v.i].out = HalfedgeId();
    ++deleted_vertices_;
}

void ScreenMesh::delete_edge_record(EdgeId e) {
    edge_deleted_[e.i] = 1;
    ++deleted_edges_;
}

void ScreenMesh::delete_face_record(FaceId f) {
    faces_[f.i].deleted = true;
    faces_[f.i].halfedge = HalfedgeId();
    ++deleted_faces_;
}

ScreenMesh ScreenMesh::from_triangles(const std::vector<Eigen::Vector2d>& positions,
                                      const std::vector<std::array<Index, 3>>& triangles) {
    ScreenMesh m;
    m.vertices_.reserve(positions.size());
    for (const auto& p : positions) m.new_vertex(p);
    m.faces_.reserve(triangles.size());
    m.halfedges_.reserve(triangles.size() * 3 + 16);

    std::unordered_map<std::uint64_t, Index> directed; // (from,to) -> halfedge
    directed.reserve(triangles.size() * 4);

    for (const auto& tri : triangles) {
        const Index a = tri[0], b = tri[1], c = tri[2];
        if (a >= positions.size() || b >= positions.size() || c >= positions.size())
            throw std::invalid_argument("triangle index out of range");
        if (a == b || b == c || a == c)
            throw std::invalid_argument("degenerate triangle indices");
        if (triangle_area(positions[a], positions[b], positions[c]) <= 0.0)
            throw std::invalid_argument("triangle is not counterclockwise");

        const FaceId f = m.new_face();
        std::array<HalfedgeId, 3> loop;
        const Index vs[4] = {a, b, c, a};
        for (int k = 0; k < 3; ++k) {
            const Index from = vs[k], to = vs[k + 1];
            auto it = directed.find(directed_key(from, to));
            HalfedgeId h;
            if (it != directed.end()) {
                h = HalfedgeId(it->second);
                if (m.halfedges_[h.i].face.valid())
                    throw std::invalid_argument("non-manifold edge (more than two faces)");
            } else {
                const EdgeId e = m.new_edge(VertexId(from), VertexId(to));
                h = m.halfedge(e, 0);
                directed.emplace(directed_key(from, to), h.i);
                directed.emplace(directed_key(to, from), m.twin(h).i);
            }
            m.set_face(h, f);
            loop[k] = h;
        }
        for (int k = 0; k < 3; ++k) {
            m.set_next(loop[k], loop[(k + 1) % 3]);
            m.set_out_halfedge(VertexId(vs[k]), loop[k]);
        }
        m.set_face_halfedge(f, loop[0]);
    }

    // link boundary loops: each boundary halfedge continues at the unique
    // outgoing boundary halfedge of its head vertex
    std::vector<HalfedgeId> boundary_out(positions.size());
    for (Index hi = 0; hi < m.halfedges_.size(); ++hi) {
        const HalfedgeId h(hi);
        if (m.halfedges_[hi].face.valid()) continue;
        const VertexId from = m.from_vertex(h);
        if (boundary_out[from.i].valid())
            throw std::invalid_argument("non-manifold vertex (multiple boundary fans)");
        boundary_out[from.i] = h;
    }
    for (Index hi = 0; hi < m.halfedges_.size(); ++hi) {
        const HalfedgeId h(hi);
        if (m.halfedges_[hi].face.valid()) continue;
        const HalfedgeId n = boundary_out[m.to_vertex(h).i];
        if (!n.valid()) throw std::invalid_argument("broken boundary loop");
        m.set_next(h, n);
    }
    for (Index vi = 0; vi < positions.size(); ++vi) {
        if (!m.vertices_[vi].out.valid()) throw std::invalid_argument("isolated vertex");
        if (boundary_out[vi].valid()) m.set_out_halfedge(VertexId(vi), boundary_out[vi]);
    }

    // single-fan check: circulating must reach every outgoing halfedge
    std::vector<Index> out_degree(positions.size(), 0);
    for (Index hi = 0; hi < m.halfedges_.size(); ++hi)
        ++out_degree[m.from_vertex(HalfedgeId(hi)).i];
    for (Index vi = 0; vi < positions.size(); ++vi) {
        const VertexId v(vi);
        Index seen = 0;
        const HalfedgeId start = m.out_halfedge(v);
        HalfedgeId h = start;
        do {
            ++seen;
            if (seen > out_degree[vi]) break;
            h = m.rotate_cw(h);
        } while (!(h == start));
        if (seen != out_degree[vi])
            throw std::invalid_argument("non-manifold vertex (disconnected fans)");
    }
    return m;
}

// ---------------------------------------------------------------------------
// queries
// ---------------------------------------------------------------------------

std::array<VertexId, 3> ScreenMesh::face_vertices(FaceId f) const {
    const HalfedgeId h0 = face_halfedge(f);
    const HalfedgeId h1 = next(h0);
    const HalfedgeId h2 = next(h1);
    return {to_vertex(h2), to_vertex(h0), to_vertex(h1)};
}

std::array<Eigen::Vector2d, 3> ScreenMesh::face_positions(FaceId f) const {
    const auto vs = face_vertices(f);
    return {position(vs[0]), position(vs[1]), position(vs[2])};
}

double ScreenMesh::face_area(FaceId f) const {
    const auto p = face_positions(f);
    return triangle_area(p[0], p[1], p[2]);
}

Eigen::Vector2d ScreenMesh::face_centroid(FaceId f) const {
    const auto p = face_positions(f);
    return (p[0] + p[1] + p[2]) / 3.0;
}

void ScreenMesh::one_ring(VertexId v, std::vector<VertexId>* neighbors,
                          std::vector<FaceId>* faces) const {
    if (neighbors) neighbors->clear();
    if (faces) faces->clear();
    const HalfedgeId start = out_halfedge(v);
    if (!start.valid()) return;
    // clockwise sweep starting at the boundary halfedge (if any), reversed to
    // counterclockwise order
    HalfedgeId h = start;
    do {
        if (neighbors) neighbors->push_back(to_vertex(h));
        if (faces && face(h).valid()) faces->push_back(face(h));
        h = rotate_cw(h);
    } while (!(h == start));
    if (neighbors) std::reverse(neighbors->begin(), neighbors->end());
    if (faces) std::reverse(faces->begin(), faces->end());
}

std::size_t ScreenMesh::valence(VertexId v) const {
    const HalfedgeId start = out_halfedge(v);
    if (!start.valid()) return 0;
    std::size_t n = 0;
    HalfedgeId h = start;
    do {
        ++n;
        h = rotate_cw(h);
    } while (!(h == start));
    return n;
}

void ScreenMesh::adjust_out_halfedge(VertexId v) {
    const HalfedgeId start = out_halfedge(v);
    if (!start.valid()) return;
    HalfedgeId h = start;
    do {
        if (is_boundary(h)) {
            set_out_halfedge(v, h);
            return;
        }
        h = rotate_cw(h);
    } while (!(h == start));
}

// ---------------------------------------------------------------------------
// edge split
// ---------------------------------------------------------------------------

VertexId ScreenMesh::edge_split(EdgeId e) {
    const Eigen::Vector2d mid = 0.5 * (position(vertex0(e)) + position(vertex1(e)));
    return edge_split(e, mid);
}

VertexId ScreenMesh::edge_split(EdgeId e, const Eigen::Vector2d& pos) {
    const HalfedgeId h = halfedge(e, 0); // a -> b
    const HalfedgeId o = halfedge(e, 1); // b -> a
    const VertexId a = from_vertex(h);
    const VertexId b = to_vertex(h);
    const FaceId f0 = face(h);
    const FaceId f1 = face(o);

    const VertexId m = new_vertex(pos);
    vertices_[m.i].target_length = 0.5 * (target_length(a) + target_length(b));
    vertices_[m.i].kappa = 0.5 * (vertex_curvature(a) + vertex_curvature(b));

    const EdgeId e2 = new_edge(m, b);
    const HalfedgeId h2 = halfedge(e2, 0); // m -> b
    const HalfedgeId o2 = halfedge(e2, 1); // b -> m

    set_to_vertex(h, m); // e becomes a <-> m

    if (f0.valid()) {
        // (a,b,c) -> (a,m,c) + new (m,b,c)
        const HalfedgeId hn = next(h);  // b -> c
        const HalfedgeId hp = prev(h);  // c -> a
        const EdgeId ec = new_edge(to_vertex(hn), m);
        const HalfedgeId hc = halfedge(ec, 0);  // c -> m
        const HalfedgeId hcm = halfedge(ec, 1); // m -> c
        set_next(h, hcm);
        set_next(hcm, hp);
        set_next(hp, h);
        set_face(hcm, f0);
        set_face_halfedge(f0, h);

        const FaceId f2 = new_face();
        set_next(h2, hn);
        set_next(hn, hc);
        set_next(hc, h2);
        set_face(h2, f2);
        set_face(hn, f2);
        set_face(hc, f2);
        set_face_halfedge(f2, h2);
        faces_[f2.i].normal = faces_[f0.i].normal;
        faces_[f2.i].metric = faces_[f0.i].metric;
    } else {
        // boundary loop gains one halfedge: ... -> h (a->m) -> h2 (m->b) -> ...
        const HalfedgeId hn = next(h);
        set_next(h, h2);
        set_next(h2, hn);
        set_face(h2, FaceId());
    }

    if (f1.valid()) {
        // (b,a,d) -> (m,a,d) + new (b,m,d)
        const HalfedgeId on = next(o);  // a -> d
        const HalfedgeId op = prev(o);  // d -> b
        const EdgeId ed = new_edge(to_vertex(on), m);
        const HalfedgeId hd = halfedge(ed, 0);  // d -> m
        const HalfedgeId hdm = halfedge(ed, 1); // m -> d
        set_next(o, on);
        set_next(on, hd);
        set_next(hd, o);
        set_face(hd, f1);
        set_face_halfedge(f1, o);

        const FaceId f3 = new_face();
        set_next(o2, hdm);
        set_next(hdm, op);
        set_next(op, o2);
        set_face(o2, f3);
        set_face(hdm, f3);
        set_face(op, f3);
        set_face_halfedge(f3, o2);
        faces_[f3.i].normal = faces_[f1.i].normal;
        faces_[f3.i].metric = faces_[f1.i].metric;
    } else {
        // boundary loop: ... -> o2 (b->m) -> o (m->a) -> ...
        const HalfedgeId op = prev(o);
        set_next(op, o2);
        set_next(o2, o);
        set_face(o2, FaceId());
    }

    if (out_halfedge(b) == o) set_out_halfedge(b, o2);
    set_out_halfedge(m, h2);
    adjust_out_halfedge(m);
    return m;
}

// ---------------------------------------------------------------------------
// edge collapse
// ---------------------------------------------------------------------------

namespace {
struct CollapsePlan {
    bool ok = false;
    VertexId removed;
    VertexId survivor;
};
} // namespace

// Resolves the collapse direction from the boundary policy. Boundary
// vertices never move: the target must coincide with a boundary endpoint.
static CollapsePlan plan_collapse(const ScreenMesh& m, EdgeId e, const Eigen::Vector2d& target) {
    CollapsePlan plan;
    const VertexId a = m.vertex0(e);
    const VertexId b = m.vertex1(e);
    const bool ba = m.is_boundary(a);
    const bool bb = m.is_boundary(b);

    auto is_at = [&](VertexId v) { return m.position(v) == target; };

    if (ba && bb) {
        if (!m.is_boundary(e)) return plan;
        if (is_at(a)) {
            plan.survivor = a;
            plan.removed = b;
        } else if (is_at(b)) {
            plan.survivor = b;
            plan.removed = a;
        } else {
            return plan;
        }
    } else if (ba) {
        if (!is_at(a)) return plan;
        plan.survivor = a;
        plan.removed = b;
    } else if (bb) {
        if (!is_at(b)) return plan;
        plan.survivor = b;
        plan.removed = a;
    } else {
        plan.survivor = b;
        plan.removed = a;
    }
    plan.ok = true;
    return plan;
}

bool ScreenMesh::collapse_legal(EdgeId e, const Eigen::Vector2d& target) const {
    if (edge_deleted(e)) return false;
    const CollapsePlan plan = plan_collapse(*this, e, target);
    if (!plan.ok) return false;

    // halfedge from removed vertex to survivor
    HalfedgeId h = halfedge(e, 0);
    if (!(from_vertex(h) == plan.removed)) h = twin(h);
    const HalfedgeId o = twin(h);

    // opposite vertices of the adjacent faces
    VertexId vl, vr;
    if (face(h).valid()) {
        vl = to_vertex(next(h));
        // a face whose remaining edges are both boundary would degenerate
        if (is_boundary(twin(next(h))) && is_boundary(twin(prev(h)))) return false;
    }
    if (face(o).valid()) {
        vr = to_vertex(next(o));
        if (is_boundary(twin(next(o))) && is_boundary(twin(prev(o)))) return false;
    }
    if (vl == vr) return false; // isolated edge or triangle pillow

    // link condition: shared one-ring vertices must be exactly {vl, vr}
    std::vector<VertexId> ring_r, ring_s;
    one_ring(plan.removed, &ring_r);
    one_ring(plan.survivor, &ring_s);
    for (const VertexId vv : ring_r) {
        if (vv == plan.survivor || vv == vl || vv == vr) continue;
        if (std::find(ring_s.begin(), ring_s.end(), vv) != ring_s.end()) return false;
    }

    // no surviving face may become degenerate or inverted at the target
    const FaceId dying0 = face(h);
    const FaceId dying1 = face(o);
    for (const VertexId v : {plan.removed, plan.survivor}) {
        if (v == plan.survivor && position(plan.survivor) == target) continue;
        std::vector<FaceId> star;
        one_ring(v, nullptr, &star);
        for (const FaceId f : star) {
            if (f == dying0 || f == dying1) continue;
            auto vs = face_vertices(f);
            Eigen::Vector2d p[3];
            for (int k = 0; k < 3; ++k)
                p[k] = (vs[k] == plan.removed || vs[k] == plan.survivor) ? target
                                                                         : position(vs[k]);
            if (triangle_area(p[0], p[1], p[2]) <= kDegenerateArea) return false;
        }
    }
    return true;
}

void ScreenMesh::collapse_rewire(HalfedgeId h) {
    const HalfedgeId o = twin(h);
    const VertexId r = from_vertex(h);
    const VertexId s = to_vertex(h);
    const HalfedgeId hn = next(h);
    const HalfedgeId hp = prev(h);
    const HalfedgeId on = next(o);
    const HalfedgeId op = prev(o);

    // re-point halfedges incoming to the removed vertex
    std::vector<HalfedgeId> incoming;
    HalfedgeId g = out_halfedge(r);
    const HalfedgeId start = g;
    do {
        incoming.push_back(twin(g));
        g = rotate_cw(g);
    } while (!(g == start));
    for (const HalfedgeId in : incoming) set_to_vertex(in, s);

    // splice h and o out of their loops
    set_next(hp, hn);
    set_next(op, on);

    if (out_halfedge(s) == o) set_out_halfedge(s, hn);

    delete_vertex(r);
    delete_edge_record(edge(h));
}

void ScreenMesh::remove_degenerate_loop(HalfedgeId h0) {
    // two-halfedge loop {h0: v->w, h1: w->v}; edge(h0) survives, edge(h1) and
    // the enclosed face die; h0 takes over the role of twin(h1)
    const HalfedgeId h1 = next(h0);
    const HalfedgeId o0 = twin(h0);
    const HalfedgeId o1 = twin(h1);
    const VertexId v = from_vertex(h0);
    const VertexId w = to_vertex(h0);
    const FaceId dead = face(h0);

    const FaceId fa = face(o1);
    const HalfedgeId n1 = next(o1);
    const HalfedgeId p1 = prev(o1);

    set_face(h0, fa);
    if (fa.valid() && face_halfedge(fa) == o1) set_face_halfedge(fa, h0);
    set_next(p1, h0);
    set_next(h0, n1);

    if (out_halfedge(w) == h1) set_out_halfedge(w, o0);
    if (out_halfedge(v) == o1) set_out_halfedge(v, h0);

    delete_edge_record(edge(h1));
    if (dead.valid()) delete_face_record(dead);
}

bool ScreenMesh::edge_collapse(EdgeId e, const Eigen::Vector2d& target) {
    if (!collapse_legal(e, target)) return false;
    const CollapsePlan plan = plan_collapse(*this, e, target);

    HalfedgeId h = halfedge(e, 0);
    if (!(from_vertex(h) == plan.removed)) h = twin(h);
    const HalfedgeId o = twin(h);

    const bool had_f0 = face(h).valid();
    const bool had_f1 = face(o).valid();
    const HalfedgeId hn = next(h); // survives side 0; originates at survivor
    const HalfedgeId op = prev(o); // survives side 1; ends at survivor
    const VertexId vl = had_f0 ? to_vertex(hn) : VertexId();
    const VertexId vr = had_f1 ? to_vertex(next(o)) : VertexId();

    // merged attributes
    const double len = 0.5 * (target_length(plan.removed) + target_length(plan.survivor));
    const double kap = 0.5 * (vertex_curvature(plan.removed) + vertex_curvature(plan.survivor));

    collapse_rewire(h);
    if (had_f0) remove_degenerate_loop(hn);
    if (had_f1) remove_degenerate_loop(op);

    set_position(plan.survivor, target);
    set_target_length(plan.survivor, len);
    set_vertex_curvature(plan.survivor, kap);

    adjust_out_halfedge(plan.survivor);
    if (vl.valid()) adjust_out_halfedge(vl);
    if (vr.valid()) adjust_out_halfedge(vr);
    return true;
}

// ---------------------------------------------------------------------------
// edge flip
// ---------------------------------------------------------------------------

bool ScreenMesh::flip_legal(EdgeId e) const {
    if (edge_deleted(e) || is_boundary(e)) return false;
    const HalfedgeId h = halfedge(e, 0); // a -> b
    const HalfedgeId o = halfedge(e, 1); // b -> a
    const VertexId a = from_vertex(h);
    const VertexId b = to_vertex(h);
    const VertexId c = to_vertex(next(h));
    const VertexId d = to_vertex(next(o));
    if (c == d) return false;

    // flipped edge must not already exist
    std::vector<VertexId> ring;
    one_ring(c, &ring);
    if (std::find(ring.begin(), ring.end(), d) != ring.end()) return false;

    // both new faces must stay positively oriented (convex quad)
    const Eigen::Vector2d& pa = position(a);
    const Eigen::Vector2d& pb = position(b);
    const Eigen::Vector2d& pc = position(c);
    const Eigen::Vector2d& pd = position(d);
    if (triangle_area(pa, pd, pc) <= kDegenerateArea) return false;
    if (triangle_area(pd, pb, pc) <= kDegenerateArea) return false;
    return true;
}

bool ScreenMesh::edge_flip(EdgeId e) {
    if (!flip_legal(e)) return false;

    const HalfedgeId a0 = halfedge(e, 0); // a -> b
    const HalfedgeId b0 = halfedge(e, 1); // b -> a
    const HalfedgeId a1 = next(a0);       // b -> c
    const HalfedgeId a2 = next(a1);       // c -> a
    const HalfedgeId b1 = next(b0);       // a -> d
    const HalfedgeId b2 = next(b1);       // d -> b

    const VertexId va = to_vertex(b0);
    const VertexId vb = to_vertex(a0);
    const VertexId vc = to_vertex(a1);
    const VertexId vd = to_vertex(b1);

    const FaceId fa = face(a0);
    const FaceId fb = face(b0);

    set_to_vertex(a0, vd); // a0: c -> d
    set_to_vertex(b0, vc); // b0: d -> c

    set_next(a0, b2);
    set_next(b2, a1);
    set_next(a1, a0);
    set_next(b0, a2);
    set_next(a2, b1);
    set_next(b1, b0);

    set_face(a1, fa);
    set_face(b1, fb);
    set_face(a0, fa);
    set_face(b0, fb);
    set_face_halfedge(fa, a0);
    set_face_halfedge(fb, b0);

    if (out_halfedge(va) == a0) set_out_halfedge(va, b1);
    if (out_halfedge(vb) == b0) set_out_halfedge(vb, a1);

    // cache inheritance: both new faces span the old quad
    Eigen::Vector3d nsum = faces_[fa.i].normal + faces_[fb.i].normal;
    const Eigen::Vector3d n = (nsum.norm() > 1e-12) ? nsum.normalized() : faces_[fa.i].normal;
    const Eigen::Matrix2d metric = 0.5 * (faces_[fa.i].metric + faces_[fb.i].metric);
    faces_[fa.i].normal = n;
    faces_[fb.i].normal = n;
    faces_[fa.i].metric = metric;
    faces_[fb.i].metric = metric;
    return true;
}

// ---------------------------------------------------------------------------
// maintenance
// ---------------------------------------------------------------------------

void ScreenMesh::garbage_collect() {
    if (!has_tombstones()) return;

    std::vector<Index> vmap(vertices_.size(), kInvalidIndex);
    std::vector<Index> emap(edge_deleted_.size(), kInvalidIndex);
    std::vector<Index> fmap(faces_.size(), kInvalidIndex);

    Index nv = 0, ne = 0, nf = 0;
    for (Index i = 0; i < vertices_.size(); ++i)
        if (!vertices_[i].deleted) vmap[i] = nv++;
    for (Index i = 0; i < edge_deleted_.size(); ++i)
        if (!edge_deleted_[i]) emap[i] = ne++;
    for (Index i = 0; i < faces_.size(); ++i)
        if (!faces_[i].deleted) fmap[i] = nf++;

    auto hmap = [&](HalfedgeId h) {
        if (!h.valid()) return HalfedgeId();
        return HalfedgeId(2 * emap[h.i >> 1] + (h.i & 1));
    };

    std::vector<Halfedge> new_halfedges(2 * ne);
    for (Index e = 0; e < edge_deleted_.size(); ++e) {
        if (edge_deleted_[e]) continue;
        for (int side = 0; side < 2; ++side) {
            const Halfedge& old = halfedges_[2 * e + side];
            Halfedge h;
            h.to = VertexId(vmap[old.to.i]);
            h.next = hmap(old.next);
            h.prev = hmap(old.prev);
            h.face = old.face.valid() ? FaceId(fmap[old.face.i]) : FaceId();
            new_halfedges[2 * emap[e] + side] = h;
        }
    }

    std::vector<Vertex> new_vertices(nv);
    for (Index i = 0; i < vertices_.size(); ++i) {
        if (vertices_[i].deleted) continue;
        Vertex v = vertices_[i];
        v.out = hmap(v.out);
        new_vertices[vmap[i]] = v;
    }

    std::vector<Face> new_faces(nf);
    for (Index i = 0; i < faces_.size(); ++i) {
        if (faces_[i].deleted) continue;
        Face f = faces_[i];
        f.halfedge = hmap(f.halfedge);
        new_faces[fmap[i]] = f;
    }

    halfedges_ = std::move(new_halfedges);
    vertices_ = std::move(new_vertices);
    faces_ = std::move(new_faces);
    edge_deleted_.assign(ne, 0);
    deleted_vertices_ = deleted_edges_ = deleted_faces_ = 0;
}

bool ScreenMesh::validate(std::string* why) const {
    auto bad = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };

    const Index nh = static_cast<Index>(halfedges_.size());
    auto halfedge_alive = [&](HalfedgeId h) {
        return h.valid() && h.i < nh && !edge_deleted_[h.i >> 1];
    };

    for (Index hi = 0; hi < nh; ++hi) {
        if (edge_deleted_[hi >> 1]) continue;
        const HalfedgeId h(hi);
        const Halfedge& rec = halfedges_[hi];
        if (!rec.to.valid() || rec.to.i >= vertices_.size() || vertices_[rec.to.i].deleted)
            return bad("halfedge points to a dead vertex");
        if (!halfedge_alive(rec.next) || !halfedge_alive(rec.prev))
            return bad("halfedge has dead next/prev");
        if (!(prev(next(h)) == h) || !(next(prev(h)) == h))
            return bad("next/prev are not inverse");
        if (rec.face.valid() && (rec.face.i >= faces_.size() || faces_[rec.face.i].deleted))
            return bad("halfedge references a dead face");
    }

    std::size_t oriented_halfedges = 0;
    for (Index fi = 0; fi < faces_.size(); ++fi) {
        if (faces_[fi].deleted) continue;
        const FaceId f(fi);
        const HalfedgeId h0 = face_halfedge(f);
        if (!halfedge_alive(h0)) return bad("face references a dead halfedge");
        HalfedgeId h = h0;
        int n = 0;
        do {
            if (!(face(h) == f)) return bad("face loop halfedge with wrong face");
            h = next(h);
            if (++n > 3) break;
        } while (!(h == h0));
        if (n != 3) return bad("face loop is not a triangle");
        oriented_halfedges += 3;
        const auto vs = face_vertices(f);
        if (vs[0] == vs[1] || vs[1] == vs[2] || vs[0] == vs[2])
            return bad("face with repeated vertices");
        if (face_area(f) <= 0.0) return bad("face with non-positive area");
    }

    // boundary loops
    std::size_t boundary_halfedges = 0;
    for (Index hi = 0; hi < nh; ++hi)
        if (!edge_deleted_[hi >> 1] && !halfedges_[hi].face.valid()) ++boundary_halfedges;
    if (oriented_halfedges + boundary_halfedges != 2 * edge_count())
        return bad("halfedge/face bookkeeping mismatch");

    std::vector<std::uint8_t> visited(nh, 0);
    std::size_t boundary_loops = 0;
    std::size_t boundary_visited = 0;
    for (Index hi = 0; hi < nh; ++hi) {
        if (edge_deleted_[hi >> 1] || halfedges_[hi].face.valid() || visited[hi]) continue;
        ++boundary_loops;
        HalfedgeId h(hi);
        std::size_t steps = 0;
        do {
            if (halfedges_[h.i].face.valid()) return bad("boundary loop enters a face");
            visited[h.i] = 1;
            ++boundary_visited;
            h = next(h);
            if (++steps > boundary_halfedges + 1) return bad("boundary loop does not close");
        } while (!(h == HalfedgeId(hi)));
    }
    if (boundary_visited != boundary_halfedges) return bad("boundary halfedges not in loops");

    // vertices: single fan, boundary convention
    std::vector<Index> out_degree(vertices_.size(), 0);
    for (Index hi = 0; hi < nh; ++hi)
        if (!edge_deleted_[hi >> 1]) ++out_degree[from_vertex(HalfedgeId(hi)).i];
    for (Index vi = 0; vi < vertices_.size(); ++vi) {
        if (vertices_[vi].deleted) continue;
        const VertexId v(vi);
        const HalfedgeId start = out_halfedge(v);
        if (!halfedge_alive(start)) return bad("vertex with dead outgoing halfedge");
        if (!(from_vertex(start) == v)) return bad("outgoing halfedge not incident");
        Index seen = 0;
        bool fan_has_boundary = false;
        HalfedgeId h = start;
        do {
            if (is_boundary(h)) fan_has_boundary = true;
            if (++seen > out_degree[vi]) break;
            h = rotate_cw(h);
        } while (!(h == start));
        if (seen != out_degree[vi]) return bad("vertex fan does not cover all halfedges");
        if (fan_has_boundary && !is_boundary(start))
            return bad("boundary vertex without boundary outgoing halfedge");
    }

    // Euler characteristic per genus-0 component set: V - E + F = 2C - B
    std::vector<Index> parent(vertices_.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&parent](Index x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (Index e = 0; e < edge_deleted_.size(); ++e) {
        if (edge_deleted_[e]) continue;
        const Index x = find(vertex0(EdgeId(e)).i);
        const Index y = find(vertex1(EdgeId(e)).i);
        if (x != y) parent[x] = y;
    }
    std::size_t components = 0;
    for (Index vi = 0; vi < vertices_.size(); ++vi)
        if (!vertices_[vi].deleted && find(vi) == vi) ++components;

    const std::ptrdiff_t euler = static_cast<std::ptrdiff_t>(vertex_count()) -
                                 static_cast<std::ptrdiff_t>(edge_count()) +
                                 static_cast<std::ptrdiff_t>(face_count());
    if (euler != 2 * static_cast<std::ptrdiff_t>(components) -
                     static_cast<std::ptrdiff_t>(boundary_loops))
        return bad("Euler characteristic mismatch");

    return true;
}

} // namespace meshint
