#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "voxrec/depth.hpp"
#include "voxrec/error.hpp"
#include "voxrec/frames.hpp"
#include "voxrec/geometry.hpp"
#include "voxrec/io.hpp"
#include "voxrec/voxel.hpp"

namespace voxrec {

enum class Upscaler { kBilinear, kSrcnn };

// Maps relative depth in [0,1] onto this metric range after fusion.
struct NormalizationConfig {
  double z_near_mm = 0.0;
  double z_far_mm = 0.0;
};

struct PipelineConfig {
  Upscaler upscaler = Upscaler::kBilinear;
  std::string srcnn_weights_path;  // required when upscaler is kSrcnn
  int upscale_factor = 4;
  FusionConfig fusion;
  int stride = 1;
  double voxel_size_mm = 5.0;
  Vec3 grid_origin = Vec3::Zero();
  std::optional<NormalizationConfig> normalization;

  // Throws ConfigError on out-of-range values or a missing weights path.
  void validate() const;
};

// Parses the "key value" config format. Keys: upscaler (bilinear|srcnn),
// srcnn_weights, upscale_factor, lidar_weight, use_confidence (0|1),
// stride, voxel_size, origin_x, origin_y, origin_z, z_near, z_far.
// Unknown keys and malformed values are ConfigErrors.
PipelineConfig read_pipeline_config(std::string_view text);

// Intrinsics for the same camera sampled on a factor-times finer pixel
// grid, keeping pixel centers aligned the way the bilinear upscaler does:
// fx' = f*fx, cx' = f*cx + (f-1)/2, and likewise vertically.
CameraIntrinsics upscale_intrinsics(const CameraIntrinsics& intr, int factor);

// Exact inverse of upscale_intrinsics; dimensions must divide by factor.
CameraIntrinsics downscale_intrinsics(const CameraIntrinsics& intr, int factor);

// Everything one capture frame carries. Optional branches may be absent;
// confidence frames pair with their depth branch at that branch's
// resolution (the coarse branch's confidence is replicated to the fused
// resolution before weighting).
struct FrameBundle {
  DepthFrame depth_lidar;
  std::optional<DepthFrame> depth_truedepth;
  std::optional<ConfidenceFrame> conf_lidar;
  std::optional<ConfidenceFrame> conf_truedepth;
  std::optional<ColorFrame> color;
  Pose pose;  // camera-to-world
};

struct FrameStats {
  double upscale_ms = 0.0;
  double fuse_ms = 0.0;  // includes optional normalization
  double unproject_ms = 0.0;
  double voxelize_ms = 0.0;
  std::uint64_t points_inserted = 0;
  std::uint64_t cells_touched = 0;
};

struct StageTiming {
  double mean_ms = 0.0;
  double max_ms = 0.0;
};

struct ThroughputReport {
  std::uint64_t frames_processed = 0;
  double wall_seconds = 0.0;
  double fps = 0.0;
  StageTiming io;
  StageTiming fuse;
  StageTiming upscale;
  StageTiming unproject;
  StageTiming voxelize;
  std::uint64_t points_inserted = 0;
  std::uint64_t occupied_cells = 0;
};

struct ReconstructionReport {
  ThroughputReport throughput;
  std::filesystem::path output_path;
};

// Drives one capture through the fixed stage order: upscale the coarse
// branch, fuse with the fine branch when present, optionally normalize,
// unproject with the configured stride, insert into the grid. Any stage
// failure rethrows with the stage name and leaves the grid as it was
// before the frame.
class ReconstructionPipeline {
 public:
  // `intr` describes the capture at the fused (post-upscale) resolution.
  // Loads the conv weights from the config when the upscaler needs them.
  ReconstructionPipeline(const PipelineConfig& cfg, const CameraIntrinsics& intr);

  FrameStats process_frame(const FrameBundle& bundle);

  const VoxelGrid& grid() const { return grid_; }
  const CameraIntrinsics& intrinsics() const { return intr_; }

 private:
  PipelineConfig cfg_;
  CameraIntrinsics intr_;
  SrcnnWeights weights_;  // empty unless the upscaler is kSrcnn
  VoxelGrid grid_;
  // Per-frame scratch, kept across frames so the streaming loop does not
  // reallocate multi-megabyte buffers every frame.
  PointCloud cloud_;
  DepthFrame up_buf_;
  DepthFrame fuse_buf_;
  ConfidenceFrame conf_buf_;
};

// Loads a manifest and its sibling intrinsics.txt / poses.txt, runs every
// frame in order, writes the grid as PLY. Frame-level file problems are
// rethrown naming the frame index; an empty capture is a ConfigError.
ReconstructionReport run_reconstruction(const std::filesystem::path& manifest_path,
                                        const PipelineConfig& cfg,
                                        const std::filesystem::path& output_ply);

// Same pipeline, but all frames are read and parsed up front (their cost
// is reported as the io stage) and the processing loop runs `repeat`
// times; `warmup_frames` are processed before timing starts.
ThroughputReport bench(const std::filesystem::path& manifest_path, const PipelineConfig& cfg,
                       int warmup_frames, int repeat);

// OBJ subset for mesh input: "v x y z" vertices and "f i j k" triangles
// with 1-based indices. '#' comments and the common no-op keywords (vn,
// vt, s, o, g, mtllib, usemtl) are skipped; anything else is a
// FormatError.
TriangleMesh parse_obj_mesh(std::string_view text);

}  // namespace voxrec
