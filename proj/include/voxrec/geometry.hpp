// Pinhole camera model, unprojection/projection and rigid-body transforms.
//
// Conventions: camera frame is x right, y down, z forward (into the scene);
// pixel centers sit at integer coordinates; depth is metric millimeters.
// Poses map camera coordinates to world coordinates.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "voxrec/error.hpp"
#include "voxrec/frames.hpp"

namespace voxrec {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Frame : std::uint8_t { kCamera, kWorld };

struct PixelCoord {
  double u = 0.0;  // column
  double v = 0.0;  // row
};

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // fx,fy > 0 and the principal point inside the sensor.
  void validate() const;
};

// Rigid camera-to-world transform. rotation must be a proper rotation:
// ||R^T R - I||_max <= 1e-6 and det(R) = 1 within 1e-6.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();  // mm

  static Pose identity() { return Pose{}; }

  void validate() const;
};

struct PointCloud {
  std::vector<Vec3> points;          // mm, in `frame` coordinates
  std::vector<Color8> colors;        // parallel to points
  Frame frame = Frame::kWorld;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  void clear() {
    points.clear();
    colors.clear();
  }

  // points and colors must have equal length.
  void validate() const;
};

// Inverse pinhole: lifts a pixel plus metric depth to a camera-frame point,
//   x = (u - cx) * depth / fx,  y = (v - cy) * depth / fy,  z = depth.
// Throws DomainError for non-finite or negative inputs.
Vec3 unproject_pixel(const CameraIntrinsics& intr, PixelCoord px, double depth_mm);

// Forward pinhole for a camera-frame point with z > 0. Returns the pixel and
// its depth (= z). Throws DomainError when the point is behind the camera.
std::pair<PixelCoord, double> project_point(const CameraIntrinsics& intr, const Vec3& camera_point);

// R * p + T: camera frame to world frame (or the reverse for an inverted pose).
inline Vec3 transform_point(const Pose& pose, const Vec3& p) {
  return pose.rotation * p + pose.translation;
}

// (a o b)(p) = a(b(p)).
Pose compose_pose(const Pose& a, const Pose& b);

// rotation^T, -rotation^T * T.
Pose invert_pose(const Pose& a);

// Unprojects every valid pixel (depth != 0) on the stride lattice, transforms
// it by `pose`, and emits it with the color sampled at the same pixel (white
// when `color` is null). Point order is row-major over the lattice.
// Throws ShapeError on dimension mismatch, DomainError for stride < 1.
PointCloud unproject_frame(const CameraIntrinsics& intr, const DepthFrame& depth,
                           const ColorFrame* color, const Pose& pose, int stride);

// Same, reusing the caller's cloud storage (cleared first).
void unproject_frame_into(const CameraIntrinsics& intr, const DepthFrame& depth,
                          const ColorFrame* color, const Pose& pose, int stride,
                          PointCloud& out);

}  // namespace voxrec
