#include "voxrec/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <utility>
#include <vector>

#include "text_util.hpp"

namespace voxrec {

namespace {

using detail::content_lines;
using detail::parse_double;
using detail::parse_int;
using detail::split_tokens;
using detail::TextLine;

class StageClock {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0_).count();
  }
  void restart() { t0_ = Clock::now(); }

 private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point t0_ = Clock::now();
};

struct StageAccum {
  double total = 0.0;
  double peak = 0.0;
  std::uint64_t n = 0;

  void add(double ms) {
    total += ms;
    peak = std::max(peak, ms);
    ++n;
  }
  StageTiming timing() const { return n == 0 ? StageTiming{} : StageTiming{total / n, peak}; }
};

// Reruns a block so that any engine error comes back as the same type with
// a context prefix; the exit-code mapping in the CLI depends on the type
// surviving.
template <typename Fn>
decltype(auto) tagged(const std::string& tag, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(tag + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(tag + e.what());
  } catch (const IoError& e) {
    throw IoError(tag + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(tag + e.what());
  } catch (const DomainError& e) {
    throw DomainError(tag + e.what());
  }
}

// Confidence levels are categorical, so the coarse branch's map is brought
// to the fused resolution by block replication, not interpolation.
void upscale_confidence_nearest(const ConfidenceFrame& conf, int factor, ConfidenceFrame& out) {
  out.width = conf.width * factor;
  out.height = conf.height * factor;
  out.levels.resize(static_cast<std::size_t>(out.width) * out.height);
  if (factor == 1) {
    std::copy(conf.levels.begin(), conf.levels.end(), out.levels.begin());
    return;
  }
  for (int y = 0; y < out.height; ++y) {
    const std::uint8_t* src =
        conf.levels.data() + static_cast<std::size_t>(y / factor) * conf.width;
    std::uint8_t* dst = out.levels.data() + static_cast<std::size_t>(y) * out.width;
    for (int x = 0; x < out.width; ++x) {
      dst[x] = src[x / factor];
    }
  }
}

const PipelineConfig& validated(const PipelineConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

void PipelineConfig::validate() const {
  if (upscale_factor < 1) {
    throw ConfigError("pipeline config: upscale_factor must be >= 1");
  }
  if (stride < 1) {
    throw ConfigError("pipeline config: stride must be >= 1");
  }
  if (!(voxel_size_mm > 0.0) || !std::isfinite(voxel_size_mm)) {
    throw ConfigError("pipeline config: voxel_size must be positive");
  }
  if (!grid_origin.allFinite()) {
    throw ConfigError("pipeline config: grid origin must be finite");
  }
  if (!(fusion.lidar_weight >= 0.0 && fusion.lidar_weight <= 1.0)) {
    throw ConfigError("pipeline config: lidar_weight must be in [0,1]");
  }
  if (upscaler == Upscaler::kSrcnn && srcnn_weights_path.empty()) {
    throw ConfigError("pipeline config: srcnn upscaler requires srcnn_weights");
  }
  if (normalization) {
    if (!(normalization->z_near_mm > 0.0) ||
        !(normalization->z_far_mm > normalization->z_near_mm)) {
      throw ConfigError("pipeline config: need 0 < z_near < z_far");
    }
  }
}

PipelineConfig read_pipeline_config(std::string_view text) {
  PipelineConfig cfg;
  bool have_z_near = false;
  bool have_z_far = false;
  double z_near = 0.0;
  double z_far = 0.0;

  static constexpr const char* kKeys[] = {
      "upscaler", "srcnn_weights", "upscale_factor", "lidar_weight", "use_confidence",
      "stride",   "voxel_size",    "origin_x",       "origin_y",     "origin_z",
      "z_near",   "z_far",
  };
  constexpr int kKeyCount = static_cast<int>(std::size(kKeys));
  bool seen[kKeyCount] = {};

  try {
    for (const TextLine& line : content_lines(text)) {
      const auto toks = split_tokens(line.text);
      if (toks.size() != 2) {
        throw FormatError::at_line("expected 'key value'", line.number);
      }
      int which = -1;
      for (int i = 0; i < kKeyCount; ++i) {
        if (toks[0] == kKeys[i]) {
          which = i;
          break;
        }
      }
      if (which < 0) {
        throw FormatError::at_line("unknown key '" + std::string(toks[0]) + "'", line.number);
      }
      if (seen[which]) {
        throw FormatError::at_line("duplicate key '" + std::string(toks[0]) + "'", line.number);
      }
      seen[which] = true;

      const std::string_view val = toks[1];
      switch (which) {
        case 0:
          if (val == "bilinear") {
            cfg.upscaler = Upscaler::kBilinear;
          } else if (val == "srcnn") {
            cfg.upscaler = Upscaler::kSrcnn;
          } else {
            throw FormatError::at_line("upscaler must be 'bilinear' or 'srcnn'", line.number);
          }
          break;
        case 1: cfg.srcnn_weights_path = std::string(val); break;
        case 2:
          cfg.upscale_factor = static_cast<int>(parse_int(val, line.number, "upscale_factor"));
          break;
        case 3: cfg.fusion.lidar_weight = parse_double(val, line.number, "lidar_weight"); break;
        case 4: {
          const std::int64_t v = parse_int(val, line.number, "use_confidence");
          if (v != 0 && v != 1) {
            throw FormatError::at_line("use_confidence must be 0 or 1", line.number);
          }
          cfg.fusion.use_confidence = v == 1;
          break;
        }
        case 5: cfg.stride = static_cast<int>(parse_int(val, line.number, "stride")); break;
        case 6: cfg.voxel_size_mm = parse_double(val, line.number, "voxel_size"); break;
        case 7: cfg.grid_origin.x() = parse_double(val, line.number, "origin_x"); break;
        case 8: cfg.grid_origin.y() = parse_double(val, line.number, "origin_y"); break;
        case 9: cfg.grid_origin.z() = parse_double(val, line.number, "origin_z"); break;
        case 10:
          z_near = parse_double(val, line.number, "z_near");
          have_z_near = true;
          break;
        case 11:
          z_far = parse_double(val, line.number, "z_far");
          have_z_far = true;
          break;
      }
    }
  } catch (const FormatError& e) {
    throw ConfigError(std::string("pipeline config: ") + e.what());
  }

  if (have_z_near != have_z_far) {
    throw ConfigError("pipeline config: z_near and z_far must be given together");
  }
  if (have_z_near) {
    cfg.normalization = NormalizationConfig{z_near, z_far};
  }
  cfg.validate();
  return cfg;
}

CameraIntrinsics upscale_intrinsics(const CameraIntrinsics& intr, int factor) {
  if (factor < 1) {
    throw DomainError("upscale_intrinsics: factor must be >= 1");
  }
  intr.validate();
  const double f = factor;
  CameraIntrinsics out;
  out.fx = intr.fx * f;
  out.fy = intr.fy * f;
  out.cx = intr.cx * f + (f - 1.0) / 2.0;
  out.cy = intr.cy * f + (f - 1.0) / 2.0;
  out.width = intr.width * factor;
  out.height = intr.height * factor;
  return out;
}

CameraIntrinsics downscale_intrinsics(const CameraIntrinsics& intr, int factor) {
  if (factor < 1) {
    throw DomainError("downscale_intrinsics: factor must be >= 1");
  }
  intr.validate();
  if (intr.width % factor != 0 || intr.height % factor != 0) {
    throw DomainError("downscale_intrinsics: dimensions do not divide by the factor");
  }
  const double f = factor;
  CameraIntrinsics out;
  out.fx = intr.fx / f;
  out.fy = intr.fy / f;
  out.cx = (intr.cx - (f - 1.0) / 2.0) / f;
  out.cy = (intr.cy - (f - 1.0) / 2.0) / f;
  out.width = intr.width / factor;
  out.height = intr.height / factor;
  return out;
}

ReconstructionPipeline::ReconstructionPipeline(const PipelineConfig& cfg,
                                               const CameraIntrinsics& intr)
    : cfg_(validated(cfg)), intr_(intr), grid_(cfg.voxel_size_mm, cfg.grid_origin) {
  intr_.validate();
  if (cfg_.upscaler == Upscaler::kSrcnn) {
    weights_ = read_srcnn_weights(load_file(cfg_.srcnn_weights_path));
  }
}

FrameStats ReconstructionPipeline::process_frame(const FrameBundle& bundle) {
  FrameStats st;
  const int factor = cfg_.upscale_factor;

  // Upscale the coarse branch to the capture resolution.
  StageClock clock;
  const DepthFrame* current = &bundle.depth_lidar;
  tagged("stage upscale: ", [&] {
    if (bundle.depth_lidar.width * factor != intr_.width ||
        bundle.depth_lidar.height * factor != intr_.height) {
      throw ShapeError("coarse depth dimensions times the factor do not match the intrinsics");
    }
    if (cfg_.upscaler == Upscaler::kSrcnn) {
      up_buf_ = srcnn_upscale(bundle.depth_lidar, weights_, factor);
      current = &up_buf_;
    } else if (factor > 1) {
      upscale_bilinear_into(bundle.depth_lidar, factor, up_buf_);
      current = &up_buf_;
    }
  });
  st.upscale_ms = clock.ms();

  // Fuse with the fine branch, then optionally map relative depth to
  // metric; both are value conditioning, reported as one stage.
  clock.restart();
  tagged("stage fuse: ", [&] {
    if (bundle.depth_truedepth) {
      if (bundle.depth_truedepth->width != intr_.width ||
          bundle.depth_truedepth->height != intr_.height) {
        throw ShapeError("fine depth dimensions do not match the intrinsics");
      }
      const ConfidenceFrame* conf_l = nullptr;
      if (bundle.conf_lidar) {
        if (bundle.conf_lidar->width != bundle.depth_lidar.width ||
            bundle.conf_lidar->height != bundle.depth_lidar.height) {
          throw ShapeError("coarse confidence dimensions do not match the coarse depth");
        }
        upscale_confidence_nearest(*bundle.conf_lidar, factor, conf_buf_);
        conf_l = &conf_buf_;
      }
      const ConfidenceFrame* conf_t = bundle.conf_truedepth ? &*bundle.conf_truedepth : nullptr;
      fuse_depth_into(*current, *bundle.depth_truedepth, conf_l, conf_t, cfg_.fusion, fuse_buf_);
      current = &fuse_buf_;
    }
    if (cfg_.normalization) {
      normalize_relative_to_metric_into(*current, cfg_.normalization->z_near_mm,
                                        cfg_.normalization->z_far_mm, fuse_buf_);
      current = &fuse_buf_;
    }
  });
  st.fuse_ms = clock.ms();

  clock.restart();
  tagged("stage unproject: ", [&] {
    const ColorFrame* color = nullptr;
    if (bundle.color) {
      if (bundle.color->width != intr_.width || bundle.color->height != intr_.height) {
        throw ShapeError("color dimensions do not match the intrinsics");
      }
      color = &*bundle.color;
    }
    unproject_frame_into(intr_, *current, color, bundle.pose, cfg_.stride, cloud_);
  });
  st.unproject_ms = clock.ms();

  clock.restart();
  tagged("stage voxelize: ", [&] {
    // insert_cloud resolves every cell before touching the table, so a bad
    // frame aborts without leaving a partial batch in the grid.
    const InsertStats stats = grid_.insert_cloud(cloud_);
    st.points_inserted = stats.points_in;
    st.cells_touched = stats.cells_touched;
  });
  st.voxelize_ms = clock.ms();
  return st;
}

namespace {

struct Capture {
  std::filesystem::path dir;
  CaptureManifest manifest;
  CameraIntrinsics intr;
  std::vector<Pose> poses;
};

Capture load_capture(const std::filesystem::path& manifest_path) {
  Capture cap;
  cap.dir = manifest_path.parent_path();
  cap.manifest = read_manifest(load_text(manifest_path));
  cap.intr = read_intrinsics(load_text(cap.dir / "intrinsics.txt"));
  cap.poses = read_pose_track(load_text(cap.dir / "poses.txt"));
  return cap;
}

FrameBundle load_bundle(const Capture& cap, const FrameEntry& entry) {
  FrameBundle bundle;
  bundle.depth_lidar = read_depth_frame(load_file(cap.dir / entry.depth_lidar_path));
  if (!entry.depth_truedepth_path.empty()) {
    bundle.depth_truedepth = read_depth_frame(load_file(cap.dir / entry.depth_truedepth_path));
  }
  if (!entry.conf_lidar_path.empty()) {
    bundle.conf_lidar = read_confidence_frame(load_file(cap.dir / entry.conf_lidar_path));
  }
  if (!entry.conf_truedepth_path.empty()) {
    bundle.conf_truedepth = read_confidence_frame(load_file(cap.dir / entry.conf_truedepth_path));
  }
  if (!entry.color_path.empty()) {
    bundle.color = read_color_frame(load_file(cap.dir / entry.color_path));
  }
  if (entry.pose_line < 0 ||
      static_cast<std::size_t>(entry.pose_line) >= cap.poses.size()) {
    throw ConfigError("references pose line " + std::to_string(entry.pose_line) +
                      " but the track has " + std::to_string(cap.poses.size()) + " poses");
  }
  bundle.pose = cap.poses[static_cast<std::size_t>(entry.pose_line)];
  return bundle;
}

std::string frame_tag(const FrameEntry& entry) {
  return "frame " + std::to_string(entry.index) + ": ";
}

}  // namespace

ReconstructionReport run_reconstruction(const std::filesystem::path& manifest_path,
                                        const PipelineConfig& cfg,
                                        const std::filesystem::path& output_ply) {
  const Capture cap = load_capture(manifest_path);
  if (cap.manifest.frames.empty()) {
    throw ConfigError("capture has no frames: " + manifest_path.string());
  }
  ReconstructionPipeline pipeline(cfg, cap.intr);

  StageAccum io, fuse, upscale, unproject, voxelize;
  std::uint64_t points_inserted = 0;
  StageClock wall;
  for (const FrameEntry& entry : cap.manifest.frames) {
    const std::string tag = frame_tag(entry);
    StageClock clock;
    const FrameBundle bundle = tagged(tag, [&] { return load_bundle(cap, entry); });
    io.add(clock.ms());
    const FrameStats st = tagged(tag, [&] { return pipeline.process_frame(bundle); });
    upscale.add(st.upscale_ms);
    fuse.add(st.fuse_ms);
    unproject.add(st.unproject_ms);
    voxelize.add(st.voxelize_ms);
    points_inserted += st.points_inserted;
  }
  const double wall_seconds = wall.ms() / 1000.0;

  save_text(output_ply, write_ply(pipeline.grid().to_cloud()));

  ReconstructionReport report;
  report.output_path = output_ply;
  report.throughput.frames_processed = cap.manifest.frames.size();
  report.throughput.wall_seconds = wall_seconds;
  report.throughput.fps = static_cast<double>(report.throughput.frames_processed) / wall_seconds;
  report.throughput.io = io.timing();
  report.throughput.fuse = fuse.timing();
  report.throughput.upscale = upscale.timing();
  report.throughput.unproject = unproject.timing();
  report.throughput.voxelize = voxelize.timing();
  report.throughput.points_inserted = points_inserted;
  report.throughput.occupied_cells = pipeline.grid().occupied_cells();
  return report;
}

TriangleMesh parse_obj_mesh(std::string_view text) {
  TriangleMesh mesh;
  for (const TextLine& line : content_lines(text)) {
    const auto toks = split_tokens(line.text);
    const std::string_view key = toks[0];
    if (key == "v") {
      if (toks.size() != 4) {
        throw FormatError::at_line("mesh: vertex needs exactly 3 coordinates", line.number);
      }
      mesh.vertices.emplace_back(parse_double(toks[1], line.number, "mesh vertex"),
                                 parse_double(toks[2], line.number, "mesh vertex"),
                                 parse_double(toks[3], line.number, "mesh vertex"));
    } else if (key == "f") {
      if (toks.size() != 4) {
        throw FormatError::at_line("mesh: face needs exactly 3 vertex indices (triangulate first)",
                                   line.number);
      }
      std::array<int, 3> tri{};
      for (int i = 0; i < 3; ++i) {
        const std::int64_t idx =
            parse_int(toks[static_cast<std::size_t>(i + 1)], line.number, "mesh face index");
        if (idx < 1 || idx > static_cast<std::int64_t>(mesh.vertices.size())) {
          throw FormatError::at_line("mesh: face index " + std::to_string(idx) +
                                         " references no vertex defined so far",
                                     line.number);
        }
        tri[static_cast<std::size_t>(i)] = static_cast<int>(idx - 1);
      }
      mesh.triangles.push_back(tri);
    } else if (key == "vn" || key == "vt" || key == "s" || key == "o" || key == "g" ||
               key == "mtllib" || key == "usemtl") {
      continue;
    } else {
      throw FormatError::at_line("mesh: unsupported keyword '" + std::string(key) + "'",
                                 line.number);
    }
  }
  return mesh;
}

ThroughputReport bench(const std::filesystem::path& manifest_path, const PipelineConfig& cfg,
                       int warmup_frames, int repeat) {
  if (repeat < 1) {
    throw ConfigError("bench: repeat must be >= 1");
  }
  if (warmup_frames < 0) {
    throw ConfigError("bench: warmup must be >= 0");
  }
  const Capture cap = load_capture(manifest_path);
  if (cap.manifest.frames.empty()) {
    throw ConfigError("capture has no frames: " + manifest_path.string());
  }

  // Preload and parse everything so the timed loop measures compute only;
  // the parse cost still shows up as the io stage.
  StageAccum io;
  std::vector<FrameBundle> bundles;
  bundles.reserve(cap.manifest.frames.size());
  for (const FrameEntry& entry : cap.manifest.frames) {
    StageClock clock;
    bundles.push_back(tagged(frame_tag(entry), [&] { return load_bundle(cap, entry); }));
    io.add(clock.ms());
  }

  ReconstructionPipeline pipeline(cfg, cap.intr);
  const std::size_t n = bundles.size();
  for (int i = 0; i < warmup_frames; ++i) {
    const FrameEntry& entry = cap.manifest.frames[static_cast<std::size_t>(i) % n];
    tagged(frame_tag(entry),
           [&] { return pipeline.process_frame(bundles[static_cast<std::size_t>(i) % n]); });
  }

  StageAccum fuse, upscale, unproject, voxelize;
  std::uint64_t points_inserted = 0;
  StageClock wall;
  for (int r = 0; r < repeat; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const FrameStats st = tagged(frame_tag(cap.manifest.frames[i]),
                                   [&] { return pipeline.process_frame(bundles[i]); });
      upscale.add(st.upscale_ms);
      fuse.add(st.fuse_ms);
      unproject.add(st.unproject_ms);
      voxelize.add(st.voxelize_ms);
      points_inserted += st.points_inserted;
    }
  }
  const double wall_seconds = wall.ms() / 1000.0;

  ThroughputReport report;
  report.frames_processed = static_cast<std::uint64_t>(repeat) * n;
  report.wall_seconds = wall_seconds;
  report.fps = static_cast<double>(report.frames_processed) / wall_seconds;
  report.io = io.timing();
  report.fuse = fuse.timing();
  report.upscale = upscale.timing();
  report.unproject = unproject.timing();
  report.voxelize = voxelize.timing();
  report.points_inserted = points_inserted;
  report.occupied_cells = pipeline.grid().occupied_cells();
  return report;
}

}  // namespace voxrec
