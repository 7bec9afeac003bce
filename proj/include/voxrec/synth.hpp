#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "voxrec/geometry.hpp"
#include "voxrec/io.hpp"

namespace voxrec {

enum class SceneShape { kSphere, kPlane };

// Analytic test scene rendered into capture files. Depth is the exact
// camera-frame z of the first ray hit through the given intrinsics; rays
// that miss write the invalid sample.
struct SceneSpec {
  SceneShape shape = SceneShape::kSphere;
  Vec3 sphere_center = Vec3(0.0, 0.0, 1000.0);  // world mm
  double sphere_radius_mm = 200.0;
  double plane_z_mm = 1000.0;  // world plane z = const

  int frame_count = 1;
  CameraIntrinsics intrinsics;    // capture (fused) resolution
  std::vector<Pose> camera_path;  // camera-to-world, one per frame

  double noise_sigma_mm = 0.0;  // Gaussian per-sample, result clamped >= 1 mm
  std::uint64_t seed = 1;

  // 1 = single-branch capture at the full resolution. Greater: the coarse
  // branch is rendered at 1/factor resolution (through exactly downscaled
  // intrinsics) alongside a full-resolution fine branch, so the capture
  // exercises upscaling and fusion.
  int lidar_factor = 1;
  bool with_color = true;

  void validate() const;  // ConfigError
};

// Parses the "key value" scene format. Keys: shape (sphere|plane),
// center_x/center_y/center_z, radius, plane_z, frames, fx fy cx cy width
// height, path (static|orbit), orbit_distance, orbit_degrees, noise_sigma,
// seed, lidar_factor, color (0|1). Builds the camera path: "static" holds
// the identity pose; "orbit" sweeps orbit_degrees around the shape at
// orbit_distance, always aiming at it.
SceneSpec read_scene_spec(std::string_view text);

// Renders and writes manifest.txt, intrinsics.txt, poses.txt and the
// per-frame rasters into out_dir (created if missing). Returns the
// manifest that was written.
CaptureManifest synth_capture(const SceneSpec& spec, const std::filesystem::path& out_dir);

}  // namespace voxrec
