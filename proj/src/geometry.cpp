#include "voxrec/geometry.hpp"

#include <cmath>

namespace voxrec {

namespace {

constexpr double kRotationTol = 1e-6;

bool finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw DomainError("CameraIntrinsics: fx and fy must be positive and finite");
  }
  if (width <= 0 || height <= 0) {
    throw DomainError("CameraIntrinsics: width and height must be positive");
  }
  if (!(cx >= 0.0) || !(cx < width) || !(cy >= 0.0) || !(cy < height)) {
    throw DomainError("CameraIntrinsics: principal point must lie inside the sensor");
  }
}

void Pose::validate() const {
  if (!rotation.allFinite() || !finite(translation)) {
    throw DomainError("Pose: entries must be finite");
  }
  const Mat3 gram = rotation.transpose() * rotation;
  const double dev = (gram - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (dev > kRotationTol) {
    throw DomainError("Pose: rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > kRotationTol) {
    throw DomainError("Pose: rotation must be proper (det = 1)");
  }
}

void PointCloud::validate() const {
  if (points.size() != colors.size()) {
    throw ShapeError("PointCloud: points and colors must have equal length");
  }
}

Vec3 unproject_pixel(const CameraIntrinsics& intr, PixelCoord px, double depth_mm) {
  if (!std::isfinite(px.u) || !std::isfinite(px.v)) {
    throw DomainError("unproject_pixel: pixel coordinates must be finite");
  }
  if (!std::isfinite(depth_mm) || depth_mm < 0.0) {
    throw DomainError("unproject_pixel: depth must be finite and >= 0");
  }
  return Vec3((px.u - intr.cx) * depth_mm / intr.fx,
              (px.v - intr.cy) * depth_mm / intr.fy,
              depth_mm);
}

std::pair<PixelCoord, double> project_point(const CameraIntrinsics& intr, const Vec3& p) {
  if (!finite(p)) {
    throw DomainError("project_point: point must be finite");
  }
  if (!(p.z() > 0.0)) {
    throw DomainError("project_point: point is behind the camera (z <= 0)");
  }
  PixelCoord px{intr.fx * p.x() / p.z() + intr.cx, intr.fy * p.y() / p.z() + intr.cy};
  return {px, p.z()};
}

Pose compose_pose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

Pose invert_pose(const Pose& a) {
  Pose out;
  out.rotation = a.rotation.transpose();
  out.translation = -(out.rotation * a.translation);
  return out;
}

void unproject_frame_into(const CameraIntrinsics& intr, const DepthFrame& depth,
                          const ColorFrame* color, const Pose& pose, int stride,
                          PointCloud& out) {
  if (stride < 1) {
    throw DomainError("unproject_frame: stride must be >= 1");
  }
  if (depth.width != intr.width || depth.height != intr.height) {
    throw ShapeError("unproject_frame: depth dimensions do not match intrinsics");
  }
  if (color != nullptr && (color->width != depth.width || color->height != depth.height)) {
    throw ShapeError("unproject_frame: color dimensions do not match depth");
  }

  out.clear();
  out.frame = Frame::kWorld;

  // Per-axis ray factors so the inner loop is two multiplies per point.
  static thread_local std::vector<double> col_factor;
  static thread_local std::vector<double> row_factor;
  col_factor.resize(static_cast<std::size_t>(depth.width));
  row_factor.resize(static_cast<std::size_t>(depth.height));
  for (int x = 0; x < depth.width; ++x) {
    col_factor[static_cast<std::size_t>(x)] = (x - intr.cx) / intr.fx;
  }
  for (int y = 0; y < depth.height; ++y) {
    row_factor[static_cast<std::size_t>(y)] = (y - intr.cy) / intr.fy;
  }

  const std::size_t lattice =
      (static_cast<std::size_t>(depth.width) + stride - 1) / stride *
      ((static_cast<std::size_t>(depth.height) + stride - 1) / stride);
  if (out.points.capacity() < lattice) {
    out.points.reserve(lattice);
    out.colors.reserve(lattice);
  }

  const Mat3& rot = pose.rotation;
  const Vec3& trans = pose.translation;

  for (int y = 0; y < depth.height; y += stride) {
    const float* row = depth.samples.data() + static_cast<std::size_t>(y) * depth.width;
    const Color8* crow =
        color ? color->pixels.data() + static_cast<std::size_t>(y) * color->width : nullptr;
    const double rf = row_factor[static_cast<std::size_t>(y)];
    for (int x = 0; x < depth.width; x += stride) {
      const double d = row[x];
      if (d == 0.0) {
        continue;
      }
      const Vec3 cam(col_factor[static_cast<std::size_t>(x)] * d, rf * d, d);
      out.points.emplace_back(rot * cam + trans);
      out.colors.push_back(crow ? crow[x] : Color8{});
    }
  }
}

PointCloud unproject_frame(const CameraIntrinsics& intr, const DepthFrame& depth,
                           const ColorFrame* color, const Pose& pose, int stride) {
  PointCloud out;
  unproject_frame_into(intr, depth, color, pose, stride, out);
  return out;
}

}  // namespace voxrec
