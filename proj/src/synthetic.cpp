#include "meshint/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace meshint {

namespace {

void check_resolution(int w, int h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("scene resolution must be positive");
}

Eigen::Vector3d normal_from_gradient(double hu, double hv) {
    return Eigen::Vector3d(-hu, -hv, 1.0).normalized();
}

} // namespace

SyntheticScene SyntheticScene::plane(int w, int h, double a, double b) {
    check_resolution(w, h);
    if (std::abs(a) >= 10.0 || std::abs(b) >= 10.0)
        throw std::invalid_argument("plane slopes must satisfy |s| < 10");
    SyntheticScene s;
    s.kind = Kind::Plane;
    s.width = w;
    s.height = h;
    s.plane_a = a;
    s.plane_b = b;
    return s;
}

SyntheticScene SyntheticScene::sphere(int w, int h, double radius) {
    check_resolution(w, h);
    if (radius <= 0.0) throw std::invalid_argument("sphere radius must be positive");
    SyntheticScene s;
    s.kind = Kind::Sphere;
    s.width = w;
    s.height = h;
    s.radius = radius;
    s.center = Eigen::Vector2d(0.5 * w, 0.5 * h);
    return s;
}

SyntheticScene SyntheticScene::cylinder(int w, int h, double radius, int axis) {
    check_resolution(w, h);
    if (radius <= 0.0) throw std::invalid_argument("cylinder radius must be positive");
    if (axis != 0 && axis != 1) throw std::invalid_argument("cylinder axis must be 0 or 1");
    SyntheticScene s;
    s.kind = Kind::Cylinder;
    s.width = w;
    s.height = h;
    s.radius = radius;
    s.center = Eigen::Vector2d(0.5 * w, 0.5 * h);
    s.cylinder_axis = axis;
    return s;
}

SyntheticScene SyntheticScene::wedge(int w, int h, double s1, double s2) {
    check_resolution(w, h);
    if (std::abs(s1) >= 10.0 || std::abs(s2) >= 10.0)
        throw std::invalid_argument("wedge slopes must satisfy |s| < 10");
    SyntheticScene s;
    s.kind = Kind::Wedge;
    s.width = w;
    s.height = h;
    s.slope1 = s1;
    s.slope2 = s2;
    s.crease = 0.5 * w;
    return s;
}

SyntheticScene SyntheticScene::sinusoid(int w, int h, double amplitude, double period) {
    check_resolution(w, h);
    if (period <= 2.0) throw std::invalid_argument("sinusoid period must exceed 2 px");
    SyntheticScene s;
    s.kind = Kind::Sinusoid;
    s.width = w;
    s.height = h;
    s.amplitude = amplitude;
    s.period = period;
    return s;
}

std::pair<NormalMap, DepthMap> render(const SyntheticScene& scene) {
    NormalMap nm(scene.width, scene.height);
    DepthMap dm(scene.width, scene.height);

    const double two_pi = 2.0 * std::numbers::pi;

    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            const double u = x + 0.5;
            const double v = y + 0.5;
            const std::size_t idx = nm.index(x, y);

            bool inside = true;
            double h = 0.0;
            Eigen::Vector3d n = Eigen::Vector3d::UnitZ();

            switch (scene.kind) {
            case SyntheticScene::Kind::Plane:
                h = scene.plane_a * u + scene.plane_b * v;
                n = normal_from_gradient(scene.plane_a, scene.plane_b);
                break;
            case SyntheticScene::Kind::Sphere: {
                const double dx = u - scene.center.x();
                const double dy = v - scene.center.y();
                const double rho2 = dx * dx + dy * dy;
                if (rho2 >= scene.radius * scene.radius) {
                    inside = false;
                    break;
                }
                const double hz = std::sqrt(scene.radius * scene.radius - rho2);
                h = hz;
                n = Eigen::Vector3d(dx, dy, hz) / scene.radius;
                break;
            }
            case SyntheticScene::Kind::Cylinder: {
                const double d = (scene.cylinder_axis == 1) ? u - scene.center.x()
                                                            : v - scene.center.y();
                if (std::abs(d) >= scene.radius) {
                    inside = false;
                    break;
                }
                const double hz = std::sqrt(scene.radius * scene.radius - d * d);
                h = hz;
                if (scene.cylinder_axis == 1)
                    n = Eigen::Vector3d(d, 0.0, hz) / scene.radius;
                else
                    n = Eigen::Vector3d(0.0, d, hz) / scene.radius;
                break;
            }
            case SyntheticScene::Kind::Wedge: {
                const double d = u - scene.crease;
                const double s = (d < 0.0) ? scene.slope1 : scene.slope2;
                h = s * d;
                n = normal_from_gradient(s, 0.0);
                break;
            }
            case SyntheticScene::Kind::Sinusoid: {
                const double pu = two_pi * u / scene.period;
                const double pv = two_pi * v / scene.period;
                h = scene.amplitude * std::sin(pu) * std::sin(pv);
                const double hu = scene.amplitude * (two_pi / scene.period) * std::cos(pu) * std::sin(pv);
                const double hv = scene.amplitude * (two_pi / scene.period) * std::sin(pu) * std::cos(pv);
                n = normal_from_gradient(hu, hv);
                break;
            }
            }

            if (!inside) continue;
            nm.mask[idx] = 1;
            nm.normals[idx] = n;
            dm.mask[idx] = 1;
            dm.depth[idx] = h;
        }
    }
    return {std::move(nm), std::move(dm)};
}

} // namespace meshint
