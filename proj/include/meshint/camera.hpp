#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace meshint {

// Projection model tying screen pixels to physical lengths. Rays follow the
// convention r(u) = C^-1 * (u, v, 1) and are deliberately not normalized; the
// orthographic model uses r = e_z everywhere.
struct CameraModel {
    enum class Kind { Orthographic, Perspective };

    Kind kind = Kind::Orthographic;
    Eigen::Matrix3d intrinsics = Eigen::Matrix3d::Identity();
    double mean_distance = 1.0; // weak-perspective z-bar, physical units
    double pixel_pitch = 1.0;   // physical units per pixel at the object

    static CameraModel orthographic(double pitch = 1.0) {
        if (pitch <= 0.0) throw std::invalid_argument("pixel pitch must be positive");
        CameraModel cam;
        cam.kind = Kind::Orthographic;
        cam.pixel_pitch = pitch;
        cam.inv_intrinsics_ = Eigen::Matrix3d::Identity();
        return cam;
    }

    static CameraModel perspective(const Eigen::Matrix3d& intrinsics, double mean_distance) {
        if (mean_distance <= 0.0) throw std::invalid_argument("mean distance must be positive");
        Eigen::FullPivLU<Eigen::Matrix3d> lu(intrinsics);
        if (!lu.isInvertible()) throw std::invalid_argument("intrinsics must be invertible");
        CameraModel cam;
        cam.kind = Kind::Perspective;
        cam.intrinsics = intrinsics;
        cam.mean_distance = mean_distance;
        cam.inv_intrinsics_ = lu.inverse();
        const double focal_px = 0.5 * (intrinsics(0, 0) + intrinsics(1, 1));
        if (focal_px <= 0.0) throw std::invalid_argument("focal length must be positive");
        cam.pixel_pitch = mean_distance / focal_px;
        return cam;
    }

    Eigen::Vector3d ray(const Eigen::Vector2d& u) const {
        if (kind == Kind::Orthographic) return Eigen::Vector3d::UnitZ();
        return inv_intrinsics_ * Eigen::Vector3d(u.x(), u.y(), 1.0);
    }

    // Constant ray derivatives dr/du and dr/dv (zero for orthographic).
    Eigen::Vector3d ray_du() const {
        if (kind == Kind::Orthographic) return Eigen::Vector3d::Zero();
        return inv_intrinsics_.col(0);
    }
    Eigen::Vector3d ray_dv() const {
        if (kind == Kind::Orthographic) return Eigen::Vector3d::Zero();
        return inv_intrinsics_.col(1);
    }

    double pixel_to_physical(double length_px) const { return length_px * pixel_pitch; }
    double physical_to_pixel(double length_phys) const { return length_phys / pixel_pitch; }

    // Mean camera-to-object distance expressed in pixel units; scales the
    // perspective tangents so all internal lengths stay in pixels.
    double mean_distance_px() const { return mean_distance / pixel_pitch; }

private:
    Eigen::Matrix3d inv_intrinsics_ = Eigen::Matrix3d::Identity();
};

} // namespace meshint
