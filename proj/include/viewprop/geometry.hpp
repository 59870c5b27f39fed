#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "viewprop/error.hpp"

namespace viewprop {

using Point3 = Eigen::Vector3d;

/// Pinhole intrinsics. Pixel (i, j) has continuous coordinates (i + 0.0, j + 0.0).
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    bool valid() const {
        return fx > 0.0 && fy > 0.0 && width >= 1 && height >= 1 && cx >= 0.0 && cx < width &&
               cy >= 0.0 && cy < height;
    }

    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d k;
        k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
        return k;
    }
};

/// World-to-camera rigid transform. Camera looks along +Z, x right, y down.
struct RigidPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static RigidPose identity() { return RigidPose{}; }

    bool is_rigid(double tol = 1e-9) const {
        Eigen::Matrix3d gram = rotation.transpose() * rotation;
        double err = (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
        return err <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
    }

    RigidPose inverse() const {
        RigidPose inv;
        inv.rotation = rotation.transpose();
        inv.translation = -(rotation.transpose() * translation);
        return inv;
    }

    Point3 camera_center() const { return -(rotation.transpose() * translation); }
};

struct CameraView {
    std::string view_id;
    CameraIntrinsics intrinsics;
    RigidPose pose;
};

/// Continuous pixel position plus camera-frame depth.
struct PixelSample {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
};

/// Lifts pixel (u, v) at the given depth to a camera-frame point.
inline Point3 backproject_pixel(double u, double v, double depth, const CameraIntrinsics &k) {
    require(std::isfinite(depth) && depth > 0.0, errc::invalid_depth,
            "backproject_pixel: depth must be finite and positive");
    require(std::isfinite(u) && std::isfinite(v), errc::invalid_argument,
            "backproject_pixel: pixel coordinates must be finite");
    return Point3{(u - k.cx) / k.fx * depth, (v - k.cy) / k.fy * depth, depth};
}

/// Projects a camera-frame point to continuous pixel coordinates. No rounding.
inline PixelSample project_point(const Point3 &p, const CameraIntrinsics &k) {
    require(p.z() > 0.0, errc::behind_camera, "project_point: point is behind the camera");
    return PixelSample{k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy, p.z()};
}

inline Point3 transform_point(const RigidPose &t, const Point3 &p) {
    return t.rotation * p + t.translation;
}

/// a ∘ b: applies b first, then a.
inline RigidPose compose(const RigidPose &a, const RigidPose &b) {
    RigidPose out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

/// Transform taking source-camera-frame points to the target camera frame:
/// target ∘ source⁻¹.
inline RigidPose relative_pose(const RigidPose &source, const RigidPose &target) {
    return compose(target, source.inverse());
}

/// Geodesic angle between two rotations, arccos clamped against round-off.
inline double rotation_geodesic(const Eigen::Matrix3d &ra, const Eigen::Matrix3d &rb) {
    double c = ((ra.transpose() * rb).trace() - 1.0) * 0.5;
    return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Rotation geodesic plus lambda_t-weighted Euclidean camera-center distance.
inline double pose_distance(const RigidPose &a, const RigidPose &b, double lambda_t) {
    require(lambda_t >= 0.0, errc::invalid_argument, "pose_distance: lambda_t must be >= 0");
    return rotation_geodesic(a.rotation, b.rotation) +
           lambda_t * (a.camera_center() - b.camera_center()).norm();
}

/// Default translation weight: 1 / median pairwise camera-center distance,
/// which makes the rotation and translation terms commensurate. Falls back
/// to 1 when fewer than two distinct centers exist.
inline double default_lambda_t(std::span<const CameraView> views) {
    std::vector<double> dists;
    dists.reserve(views.size() * (views.size() + 1) / 2);
    for (size_t i = 0; i < views.size(); ++i)
        for (size_t j = i + 1; j < views.size(); ++j)
            dists.push_back(
                (views[i].pose.camera_center() - views[j].pose.camera_center()).norm());
    if (dists.empty()) return 1.0;
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
    double median = dists[dists.size() / 2];
    return median > 0.0 ? 1.0 / median : 1.0;
}

} // namespace viewprop
