// Command-line front end for the reconstruction engine. Exit codes:
// 0 success, 2 malformed data file, 3 bad configuration or incompatible
// inputs, 4 filesystem failure, 5 bench below the required fps.
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "voxrec/depth.hpp"
#include "voxrec/io.hpp"
#include "voxrec/pipeline.hpp"
#include "voxrec/synth.hpp"
#include "voxrec/voxel.hpp"

namespace {

using namespace voxrec;

void print_stage_machine(const char* name, const StageTiming& t) {
  std::printf("stage=%s mean_ms=%.6f max_ms=%.6f\n", name, t.mean_ms, t.max_ms);
}

void print_stage_plain(const char* name, const StageTiming& t) {
  std::printf("  %-10s %10.3f %10.3f\n", name, t.mean_ms, t.max_ms);
}

void print_report(const ThroughputReport& r, bool machine) {
  if (machine) {
    print_stage_machine("io", r.io);
    print_stage_machine("upscale", r.upscale);
    print_stage_machine("fuse", r.fuse);
    print_stage_machine("unproject", r.unproject);
    print_stage_machine("voxelize", r.voxelize);
    std::printf("frames=%llu wall_s=%.6f fps=%.6f points=%llu cells=%llu\n",
                static_cast<unsigned long long>(r.frames_processed), r.wall_seconds, r.fps,
                static_cast<unsigned long long>(r.points_inserted),
                static_cast<unsigned long long>(r.occupied_cells));
    return;
  }
  std::printf("frames processed  %llu\n", static_cast<unsigned long long>(r.frames_processed));
  std::printf("wall seconds      %.3f\n", r.wall_seconds);
  std::printf("fps               %.2f\n", r.fps);
  std::printf("points inserted   %llu\n", static_cast<unsigned long long>(r.points_inserted));
  std::printf("occupied cells    %llu\n", static_cast<unsigned long long>(r.occupied_cells));
  std::printf("  %-10s %10s %10s\n", "stage", "mean ms", "max ms");
  print_stage_plain("io", r.io);
  print_stage_plain("upscale", r.upscale);
  print_stage_plain("fuse", r.fuse);
  print_stage_plain("unproject", r.unproject);
  print_stage_plain("voxelize", r.voxelize);
}

int cmd_reconstruct(const std::string& manifest, const std::string& config,
                    const std::string& out, bool machine) {
  const PipelineConfig cfg = read_pipeline_config(load_text(config));
  const ReconstructionReport report = run_reconstruction(manifest, cfg, out);
  print_report(report.throughput, machine);
  if (machine) {
    std::printf("out=%s\n", report.output_path.string().c_str());
  } else {
    std::printf("wrote %s\n", report.output_path.string().c_str());
  }
  return 0;
}

int cmd_bench(const std::string& manifest, const std::string& config, int warmup, int repeat,
              double require_fps, bool machine) {
  const PipelineConfig cfg = read_pipeline_config(load_text(config));
  const ThroughputReport report = bench(manifest, cfg, warmup, repeat);
  print_report(report, machine);
  if (require_fps > 0.0 && report.fps < require_fps) {
    std::fprintf(stderr, "fps %.2f below required %.2f\n", report.fps, require_fps);
    return 5;
  }
  return 0;
}

int cmd_fuse(const std::string& lidar_path, const std::string& truedepth_path,
             const std::string& conf_l_path, const std::string& conf_t_path, double weight,
             const std::string& out) {
  if (conf_l_path.empty() != conf_t_path.empty()) {
    throw ConfigError("fuse: confidence maps must be given for both branches or neither");
  }
  const DepthFrame lidar = read_depth_frame(load_file(lidar_path));
  const DepthFrame truedepth = read_depth_frame(load_file(truedepth_path));
  ConfidenceFrame conf_l, conf_t;
  FusionConfig cfg;
  cfg.lidar_weight = weight;
  cfg.use_confidence = !conf_l_path.empty();
  if (cfg.use_confidence) {
    conf_l = read_confidence_frame(load_file(conf_l_path));
    conf_t = read_confidence_frame(load_file(conf_t_path));
  }
  const DepthFrame fused =
      fuse_depth(lidar, truedepth, cfg.use_confidence ? &conf_l : nullptr,
                 cfg.use_confidence ? &conf_t : nullptr, cfg);
  save_file(out, write_depth_frame(quantize_depth(fused)));
  std::printf("wrote %s (%dx%d)\n", out.c_str(), fused.width, fused.height);
  return 0;
}

int cmd_upscale(const std::string& in, int factor, bool bilinear,
                const std::string& srcnn_weights, const std::string& out) {
  if (bilinear == !srcnn_weights.empty()) {
    throw ConfigError("upscale: choose exactly one of --bilinear or --srcnn");
  }
  const DepthFrame input = read_depth_frame(load_file(in));
  DepthFrame result;
  if (bilinear) {
    result = upscale_bilinear(input, factor);
  } else {
    const SrcnnWeights weights = read_srcnn_weights(load_file(srcnn_weights));
    result = srcnn_upscale(input, weights, factor);
  }
  save_file(out, write_depth_frame(quantize_depth(result)));
  std::printf("wrote %s (%dx%d)\n", out.c_str(), result.width, result.height);
  return 0;
}

int cmd_voxelize_mesh(const std::string& mesh_path, double voxel_size, const std::string& out) {
  const TriangleMesh mesh = parse_obj_mesh(load_text(mesh_path));
  const VoxelGrid grid = voxelize_mesh(mesh, voxel_size, Vec3::Zero());
  save_text(out, write_ply(grid.to_cloud()));
  std::printf("wrote %s (%zu voxels from %zu triangles)\n", out.c_str(), grid.occupied_cells(),
              mesh.triangles.size());
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  const SceneSpec spec = read_scene_spec(load_text(spec_path));
  const CaptureManifest manifest = synth_capture(spec, out_dir);
  std::printf("wrote %zu frames to %s\n", manifest.frames.size(), out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming RGB-D voxel reconstruction"};
  app.require_subcommand(1);

  auto* rec = app.add_subcommand("reconstruct", "Run a capture through the pipeline, export PLY");
  std::string rec_manifest, rec_config, rec_out;
  bool rec_machine = false;
  rec->add_option("--manifest", rec_manifest, "capture manifest")->required();
  rec->add_option("--config", rec_config, "pipeline config")->required();
  rec->add_option("--out", rec_out, "output PLY")->required();
  rec->add_flag("--machine", rec_machine, "key=value output");

  auto* bench_cmd = app.add_subcommand("bench", "Measure pipeline throughput on a capture");
  std::string bench_manifest, bench_config;
  int bench_warmup = 2, bench_repeat = 1;
  double bench_require_fps = 0.0;
  bool bench_machine = false;
  bench_cmd->add_option("--manifest", bench_manifest, "capture manifest")->required();
  bench_cmd->add_option("--config", bench_config, "pipeline config")->required();
  bench_cmd->add_option("--warmup", bench_warmup, "untimed warmup frames");
  bench_cmd->add_option("--repeat", bench_repeat, "timed passes over the capture");
  bench_cmd->add_option("--require-fps", bench_require_fps, "exit 5 when fps falls below this");
  bench_cmd->add_flag("--machine", bench_machine, "key=value output");

  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse two depth frames into one");
  std::string fuse_lidar, fuse_truedepth, fuse_conf_l, fuse_conf_t, fuse_out;
  double fuse_weight = 0.5;
  fuse_cmd->add_option("--lidar", fuse_lidar, "coarse depth frame")->required();
  fuse_cmd->add_option("--truedepth", fuse_truedepth, "fine depth frame")->required();
  fuse_cmd->add_option("--conf-l", fuse_conf_l, "coarse confidence frame");
  fuse_cmd->add_option("--conf-t", fuse_conf_t, "fine confidence frame");
  fuse_cmd->add_option("--weight", fuse_weight, "coarse-branch weight in [0,1]");
  fuse_cmd->add_option("--out", fuse_out, "output depth frame")->required();

  auto* up_cmd = app.add_subcommand("upscale", "Upscale a depth frame");
  std::string up_in, up_srcnn, up_out;
  int up_factor = 0;
  bool up_bilinear = false;
  up_cmd->add_option("--in", up_in, "input depth frame")->required();
  up_cmd->add_option("--factor", up_factor, "integer upscale factor")->required();
  up_cmd->add_flag("--bilinear", up_bilinear, "bilinear interpolation");
  up_cmd->add_option("--srcnn", up_srcnn, "conv-stack weights file");
  up_cmd->add_option("--out", up_out, "output depth frame")->required();

  auto* mesh_cmd = app.add_subcommand("voxelize-mesh", "Voxelize a triangle mesh to PLY");
  std::string mesh_in, mesh_out;
  double mesh_voxel_size = 0.0;
  mesh_cmd->add_option("--mesh", mesh_in, "OBJ-subset mesh file")->required();
  mesh_cmd->add_option("--voxel-size", mesh_voxel_size, "cell size in mm")->required();
  mesh_cmd->add_option("--out", mesh_out, "output PLY")->required();

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic capture");
  std::string synth_spec, synth_out_dir;
  synth_cmd->add_option("--spec", synth_spec, "scene spec file")->required();
  synth_cmd->add_option("--out-dir", synth_out_dir, "capture output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (rec->parsed()) {
      return cmd_reconstruct(rec_manifest, rec_config, rec_out, rec_machine);
    }
    if (bench_cmd->parsed()) {
      return cmd_bench(bench_manifest, bench_config, bench_warmup, bench_repeat,
                       bench_require_fps, bench_machine);
    }
    if (fuse_cmd->parsed()) {
      return cmd_fuse(fuse_lidar, fuse_truedepth, fuse_conf_l, fuse_conf_t, fuse_weight, fuse_out);
    }
    if (up_cmd->parsed()) {
      return cmd_upscale(up_in, up_factor, up_bilinear, up_srcnn, up_out);
    }
    if (mesh_cmd->parsed()) {
      return cmd_voxelize_mesh(mesh_in, mesh_voxel_size, mesh_out);
    }
    if (synth_cmd->parsed()) {
      return cmd_synth(synth_spec, synth_out_dir);
    }
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
