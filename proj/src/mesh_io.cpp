#include "meshint/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace meshint {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct FlatMesh {
    std::vector<Eigen::Vector3d> positions;
    std::vector<std::array<Index, 3>> triangles;
};

FlatMesh flatten(const ScreenMesh& mesh) {
    FlatMesh flat;
    std::vector<Index> vmap(mesh.vertex_capacity(), kInvalidIndex);
    for (Index vi = 0; vi < mesh.vertex_capacity(); ++vi) {
        if (mesh.vertex_deleted(VertexId(vi))) continue;
        vmap[vi] = static_cast<Index>(flat.positions.size());
        const Eigen::Vector2d& p = mesh.position(VertexId(vi));
        flat.positions.emplace_back(p.x(), p.y(), 0.0);
    }
    for (Index fi = 0; fi < mesh.face_capacity(); ++fi) {
        if (mesh.face_deleted(FaceId(fi))) continue;
        const auto vs = mesh.face_vertices(FaceId(fi));
        flat.triangles.push_back({vmap[vs[0].i], vmap[vs[1].i], vmap[vs[2].i]});
    }
    return flat;
}

FlatMesh flatten(const IntegratedSurface& surface) {
    return {surface.positions, surface.triangles};
}

void write_obj(const FlatMesh& flat, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    for (const auto& p : flat.positions)
        out << "v " << fmt(p.x()) << " " << fmt(p.y()) << " " << fmt(p.z()) << "\n";
    for (const auto& t : flat.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

void write_ply(const FlatMesh& flat, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << flat.positions.size() << "\n";
    out << "property double x\nproperty double y\nproperty double z\n";
    out << "element face " << flat.triangles.size() << "\n";
    out << "property list uchar int vertex_indices\nend_header\n";
    for (const auto& p : flat.positions)
        out << fmt(p.x()) << " " << fmt(p.y()) << " " << fmt(p.z()) << "\n";
    for (const auto& t : flat.triangles)
        out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace

void save_obj(const ScreenMesh& mesh, const std::string& path) { write_obj(flatten(mesh), path); }
void save_obj(const IntegratedSurface& surface, const std::string& path) {
    write_obj(flatten(surface), path);
}
void save_ply(const ScreenMesh& mesh, const std::string& path) { write_ply(flatten(mesh), path); }
void save_ply(const IntegratedSurface& surface, const std::string& path) {
    write_ply(flatten(surface), path);
}

} // namespace meshint
