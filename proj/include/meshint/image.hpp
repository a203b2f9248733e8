#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace meshint {

// Per-pixel unit normals with a foreground mask. Background pixels carry the
// sentinel normal (0,0,0) and must never be read by downstream code.
struct NormalMap {
    int width = 0;
    int height = 0;
    std::vector<Eigen::Vector3d> normals;
    std::vector<std::uint8_t> mask;

    NormalMap() = default;
    NormalMap(int w, int h)
        : width(w), height(h), normals(static_cast<std::size_t>(w) * h, Eigen::Vector3d::Zero()),
          mask(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool foreground(int x, int y) const { return inside(x, y) && mask[index(x, y)] != 0; }

    const Eigen::Vector3d& normal(int x, int y) const { return normals[index(x, y)]; }
    Eigen::Vector3d& normal(int x, int y) { return normals[index(x, y)]; }

    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (auto m : mask) n += (m != 0);
        return n;
    }
};

// Scalar depth per pixel. Units are pixels for orthographic inputs and
// camera-distance units for perspective ones.
struct DepthMap {
    int width = 0;
    int height = 0;
    std::vector<double> depth;
    std::vector<std::uint8_t> mask;

    DepthMap() = default;
    DepthMap(int w, int h)
        : width(w), height(h), depth(static_cast<std::size_t>(w) * h, 0.0),
          mask(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool inside(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    bool foreground(int x, int y) const { return inside(x, y) && mask[index(x, y)] != 0; }

    double at(int x, int y) const { return depth[index(x, y)]; }
    double& at(int x, int y) { return depth[index(x, y)]; }
};

} // namespace meshint
