#pragma once

#include "meshint/camera.hpp"
#include "meshint/image.hpp"

#include <utility>

namespace meshint {

// Analytic test scenes with mutually consistent normals and depth. Normals
// are emitted analytically, never by differentiating the depth map, so that
// pipeline error stays attributable to the pipeline.
//
// All scenes use the orthographic convention n ~ (-dh/du, -dh/dv, 1),
// unit-normalized, with h the depth towards the camera.
struct SyntheticScene {
    enum class Kind { Plane, Sphere, Cylinder, Wedge, Sinusoid };

    Kind kind = Kind::Plane;
    int width = 0;
    int height = 0;

    // plane: h = a*u + b*v
    double plane_a = 0.0;
    double plane_b = 0.0;

    // sphere: h = sqrt(R^2 - rho^2) inside the disk rho < R around center
    double radius = 0.0;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();

    // cylinder: axis-aligned half cylinder; axis 1 = along v (profile in u)
    int cylinder_axis = 1;

    // wedge: h = s1*d for d < 0, s2*d for d >= 0, d = u - crease
    double slope1 = 0.0;
    double slope2 = 0.0;
    double crease = 0.0;

    // sinusoid: h = amplitude * sin(2*pi*u/period) * sin(2*pi*v/period)
    double amplitude = 0.0;
    double period = 0.0;

    static SyntheticScene plane(int w, int h, double a, double b);
    static SyntheticScene sphere(int w, int h, double radius);
    static SyntheticScene cylinder(int w, int h, double radius, int axis = 1);
    static SyntheticScene wedge(int w, int h, double s1, double s2);
    static SyntheticScene sinusoid(int w, int h, double amplitude, double period);
};

// Exact analytic normals and depth per foreground pixel, sampled at pixel
// centers (i+0.5, j+0.5).
std::pair<NormalMap, DepthMap> render(const SyntheticScene& scene);

} // namespace meshint
