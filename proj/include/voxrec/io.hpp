#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "voxrec/depth.hpp"
#include "voxrec/error.hpp"
#include "voxrec/frames.hpp"
#include "voxrec/geometry.hpp"

namespace voxrec {

using Bytes = std::vector<std::uint8_t>;

// One manifest line. Optional branches are empty strings when absent;
// paths are relative to the manifest's directory and may not contain
// whitespace. pose_line indexes the pose track, 0-based.
struct FrameEntry {
  std::int64_t index = 0;
  double timestamp_s = 0.0;
  std::string depth_lidar_path;
  std::string depth_truedepth_path;
  std::string conf_lidar_path;
  std::string conf_truedepth_path;
  std::string color_path;
  std::int64_t pose_line = 0;
};

struct CaptureManifest {
  std::vector<FrameEntry> frames;
};

// Depth raster: "DPT1", u32le width, u32le height, then width*height u16le
// millimeter samples (0 = invalid). All readers throw FormatError with a
// byte offset or line number on malformed input.
DepthFrame read_depth_frame(const Bytes& bytes);
Bytes write_depth_frame(const DepthFrame& frame);

// Confidence raster: "CNF1", same header, u8 levels in {0,1,2}.
ConfidenceFrame read_confidence_frame(const Bytes& bytes);
Bytes write_confidence_frame(const ConfidenceFrame& frame);

// Binary PPM (P6), maxval 255. '#' comments allowed in the header.
ColorFrame read_color_frame(const Bytes& bytes);
Bytes write_color_frame(const ColorFrame& frame);

// Plain-text "key value" lines; keys fx fy cx cy width height, any order,
// '#' comments.
CameraIntrinsics read_intrinsics(std::string_view text);
std::string write_intrinsics(const CameraIntrinsics& intr);

// One camera-to-world pose per line: 12 floats, the rows of [R | T],
// translation in millimeters. Rotations are accepted when orthonormal
// within 1e-4 and re-orthonormalized (Gram-Schmidt) before use; a
// reflection (negative determinant) is rejected.
std::vector<Pose> read_pose_track(std::string_view text);
std::string write_pose_track(const std::vector<Pose>& poses);

// "index timestamp depth_l=... [depth_t=...] [conf_l=...] [conf_t=...]
// [color=...] pose=N" per line, '#' comments. Indices must increase
// strictly, timestamps must not decrease.
CaptureManifest read_manifest(std::string_view text);
std::string write_manifest(const CaptureManifest& manifest);

// Conv stack container: "SRW1", u32le layer count; per layer u32le
// out/in/kh/kw, then the f32le weights and f32le biases.
SrcnnWeights read_srcnn_weights(const Bytes& bytes);
Bytes write_srcnn_weights(const SrcnnWeights& weights);

// ASCII PLY with float x/y/z and uchar red/green/blue, coordinates printed
// to 6 decimal places. read_ply accepts exactly the layout write_ply emits.
std::string write_ply(const PointCloud& cloud);
PointCloud read_ply(std::string_view text);

// Whole-file helpers; failures surface as IoError naming the path.
Bytes load_file(const std::filesystem::path& path);
std::string load_text(const std::filesystem::path& path);
void save_file(const std::filesystem::path& path, const Bytes& bytes);
void save_text(const std::filesystem::path& path, std::string_view text);

}  // namespace voxrec
