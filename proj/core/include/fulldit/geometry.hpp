#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "fulldit/tensor.hpp"

namespace fulldit::geometry {

struct CameraIntrinsics {
    double fx = 1.0, fy = 1.0;   // focal lengths, pixels
    double cx = 0.0, cy = 0.0;   // principal point, pixels
    size_t width = 1, height = 1;

    void validate() const;
    Eigen::Matrix3d matrix() const;
};

// World-to-camera extrinsics: x_cam = R * x_world + T.
struct CameraPose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    // R orthonormal with det +1 to 1e-6, finite entries.
    void validate() const;
};

struct TrajectoryFrame {
    CameraIntrinsics intrinsics;
    CameraPose pose;
    double timestamp = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryFrame> frames;

    size_t size() const { return frames.size(); }
    void validate() const;  // N >= 1, shared width/height, valid poses
};

// Per-pixel 6-vectors (moment o x d, then direction d), stored [H,W,6].
struct PluckerFrame {
    Tensord grid;

    size_t height() const { return grid.dim(0); }
    size_t width() const { return grid.dim(1); }
};

// Camera center in world coordinates: o = -R^T * T.
Eigen::Vector3d camera_center(const CameraPose& pose);

// Raw direction per pixel (u = column, v = row) is R * K^{-1} * [u,v,1]^T + T,
// then unit-normalized; the embedding is (o x d, d). Rays go through integer
// pixel coordinates, not pixel centers.
PluckerFrame plucker_embedding(const CameraPose& pose, const CameraIntrinsics& intr);

enum class IntrinsicsUnit {
    Auto,        // normalized iff fx,fy <= 2 and cx,cy <= 1
    Normalized,  // fx,cx scaled by width; fy,cy scaled by height
    Absolute,
};

struct TrajectoryParseOptions {
    size_t width = 0;   // target frame size; required for Normalized input
    size_t height = 0;
    IntrinsicsUnit unit = IntrinsicsUnit::Auto;
};

// Text format: line 1 is an arbitrary identifier, then one line per frame with
// 19 whitespace-separated decimal floats: timestamp fx fy cx cy 0 0 followed
// by the 12 row-major entries of [R|T].
Trajectory parse_trajectory(const std::string& text, const TrajectoryParseOptions& opts = {});

// Writes intrinsics normalized by width/height (parse with the same
// width/height to round-trip).
std::string serialize_trajectory(const Trajectory& traj, const std::string& identifier = "trajectory");

// Mean geodesic rotation angle, radians.
double rot_err(const Trajectory& gen, const Trajectory& gt);

// Mean L2 translation distance after normalizing each trajectory's total
// translation path length to 1 (skipped when the path length is < 1e-9).
double trans_err(const Trajectory& gen, const Trajectory& gt);

// Mean Frobenius distance between [R|T] matrices, translations normalized as
// in trans_err.
double cam_mc(const Trajectory& gen, const Trajectory& gt);

}  // namespace fulldit::geometry
