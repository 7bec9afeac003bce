#include "voxrec/synth.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <system_error>

#include "text_util.hpp"
#include "voxrec/pipeline.hpp"

namespace voxrec {

namespace {

using detail::content_lines;
using detail::parse_double;
using detail::parse_int;
using detail::split_tokens;
using detail::TextLine;

constexpr double kPi = 3.14159265358979323846;
// Hits closer than this are treated as the ray grazing its own origin.
constexpr double kMinHit = 1e-9;

std::string frame_name(int index, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "frame_%04d%s", index, suffix);
  return buf;
}

// Camera-frame z of the first intersection along the ray O + t*D, where D
// has camera-frame z component 1 (so t is the depth). Returns 0 on miss.
double hit_sphere(const Vec3& origin, const Vec3& dir, const Vec3& center, double radius) {
  const Vec3 oc = origin - center;
  const double a = dir.squaredNorm();
  const double b = 2.0 * dir.dot(oc);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    return 0.0;
  }
  const double sq = std::sqrt(disc);
  const double t0 = (-b - sq) / (2.0 * a);
  if (t0 > kMinHit) {
    return t0;
  }
  const double t1 = (-b + sq) / (2.0 * a);
  return t1 > kMinHit ? t1 : 0.0;
}

double hit_plane(const Vec3& origin, const Vec3& dir, double plane_z) {
  if (std::abs(dir.z()) < 1e-12) {
    return 0.0;
  }
  const double t = (plane_z - origin.z()) / dir.z();
  return t > kMinHit ? t : 0.0;
}

struct Renderer {
  const SceneSpec& spec;
  std::mt19937_64 rng;
  std::normal_distribution<double> gauss;

  explicit Renderer(const SceneSpec& s) : spec(s), rng(s.seed), gauss(0.0, 1.0) {}

  double trace(const Vec3& origin, const Vec3& dir) {
    return spec.shape == SceneShape::kSphere
               ? hit_sphere(origin, dir, spec.sphere_center, spec.sphere_radius_mm)
               : hit_plane(origin, dir, spec.plane_z_mm);
  }

  DepthFrame render_depth(const CameraIntrinsics& intr, const Pose& pose) {
    DepthFrame frame = DepthFrame::constant(intr.width, intr.height, 0.0f);
    const Vec3 origin = pose.translation;
    for (int v = 0; v < intr.height; ++v) {
      const Vec3 row_dir = pose.rotation.col(1) * ((v - intr.cy) / intr.fy) + pose.rotation.col(2);
      for (int u = 0; u < intr.width; ++u) {
        const Vec3 dir = pose.rotation.col(0) * ((u - intr.cx) / intr.fx) + row_dir;
        double d = trace(origin, dir);
        if (d == 0.0) {
          continue;
        }
        if (spec.noise_sigma_mm > 0.0) {
          d = std::max(1.0, d + gauss(rng) * spec.noise_sigma_mm);
        }
        const long long q = std::llround(d);
        frame.samples[static_cast<std::size_t>(v) * intr.width + u] =
            static_cast<float>(std::clamp(q, 0ll, 65535ll));
      }
    }
    return frame;
  }

  ColorFrame render_color(const CameraIntrinsics& intr, const Pose& pose) {
    ColorFrame frame = ColorFrame::constant(intr.width, intr.height, Color8{0, 0, 0});
    const Vec3 origin = pose.translation;
    for (int v = 0; v < intr.height; ++v) {
      const Vec3 row_dir = pose.rotation.col(1) * ((v - intr.cy) / intr.fy) + pose.rotation.col(2);
      for (int u = 0; u < intr.width; ++u) {
        const Vec3 dir = pose.rotation.col(0) * ((u - intr.cx) / intr.fx) + row_dir;
        const double t = trace(origin, dir);
        if (t == 0.0) {
          continue;
        }
        const Vec3 hit = origin + t * dir;
        Color8 c;
        if (spec.shape == SceneShape::kSphere) {
          const Vec3 normal = (hit - spec.sphere_center) / spec.sphere_radius_mm;
          const double shade = std::max(0.0, -normal.dot(dir.normalized()));
          const auto level = static_cast<std::uint8_t>(55.0 + 200.0 * shade);
          c = Color8{level, level, level};
        } else {
          const long long parity = static_cast<long long>(std::floor(hit.x() / 100.0)) +
                                   static_cast<long long>(std::floor(hit.y() / 100.0));
          c = (parity % 2 + 2) % 2 == 0 ? Color8{220, 220, 220} : Color8{60, 60, 60};
        }
        frame.pixels[static_cast<std::size_t>(v) * intr.width + u] = c;
      }
    }
    return frame;
  }
};

}  // namespace

void SceneSpec::validate() const {
  if (frame_count < 1) {
    throw ConfigError("scene spec: frames must be >= 1");
  }
  if (shape == SceneShape::kSphere) {
    if (!(sphere_radius_mm > 0.0) || !std::isfinite(sphere_radius_mm)) {
      throw ConfigError("scene spec: radius must be positive");
    }
    if (!sphere_center.allFinite()) {
      throw ConfigError("scene spec: center must be finite");
    }
  } else if (!std::isfinite(plane_z_mm)) {
    throw ConfigError("scene spec: plane_z must be finite");
  }
  try {
    intrinsics.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("scene spec: ") + e.what());
  }
  if (camera_path.size() != static_cast<std::size_t>(frame_count)) {
    throw ConfigError("scene spec: camera path must hold one pose per frame");
  }
  if (!(noise_sigma_mm >= 0.0) || !std::isfinite(noise_sigma_mm)) {
    throw ConfigError("scene spec: noise_sigma must be >= 0");
  }
  if (lidar_factor < 1) {
    throw ConfigError("scene spec: lidar_factor must be >= 1");
  }
  if (lidar_factor > 1 &&
      (intrinsics.width % lidar_factor != 0 || intrinsics.height % lidar_factor != 0)) {
    throw ConfigError("scene spec: dimensions must divide by lidar_factor");
  }
}

SceneSpec read_scene_spec(std::string_view text) {
  SceneSpec spec;
  bool orbit = false;
  bool have_orbit_distance = false;
  double orbit_distance = 0.0;
  double orbit_degrees = 360.0;

  static constexpr const char* kKeys[] = {
      "shape",  "center_x", "center_y", "center_z",       "radius",        "plane_z",
      "frames", "fx",       "fy",       "cx",             "cy",            "width",
      "height", "path",     "orbit_distance", "orbit_degrees", "noise_sigma", "seed",
      "lidar_factor", "color",
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
      const int n = line.number;
      switch (which) {
        case 0:
          if (val == "sphere") {
            spec.shape = SceneShape::kSphere;
          } else if (val == "plane") {
            spec.shape = SceneShape::kPlane;
          } else {
            throw FormatError::at_line("shape must be 'sphere' or 'plane'", n);
          }
          break;
        case 1: spec.sphere_center.x() = parse_double(val, n, "center_x"); break;
        case 2: spec.sphere_center.y() = parse_double(val, n, "center_y"); break;
        case 3: spec.sphere_center.z() = parse_double(val, n, "center_z"); break;
        case 4: spec.sphere_radius_mm = parse_double(val, n, "radius"); break;
        case 5: spec.plane_z_mm = parse_double(val, n, "plane_z"); break;
        case 6: spec.frame_count = static_cast<int>(parse_int(val, n, "frames")); break;
        case 7: spec.intrinsics.fx = parse_double(val, n, "fx"); break;
        case 8: spec.intrinsics.fy = parse_double(val, n, "fy"); break;
        case 9: spec.intrinsics.cx = parse_double(val, n, "cx"); break;
        case 10: spec.intrinsics.cy = parse_double(val, n, "cy"); break;
        case 11: spec.intrinsics.width = static_cast<int>(parse_int(val, n, "width")); break;
        case 12: spec.intrinsics.height = static_cast<int>(parse_int(val, n, "height")); break;
        case 13:
          if (val == "static") {
            orbit = false;
          } else if (val == "orbit") {
            orbit = true;
          } else {
            throw FormatError::at_line("path must be 'static' or 'orbit'", n);
          }
          break;
        case 14:
          orbit_distance = parse_double(val, n, "orbit_distance");
          have_orbit_distance = true;
          break;
        case 15: orbit_degrees = parse_double(val, n, "orbit_degrees"); break;
        case 16: spec.noise_sigma_mm = parse_double(val, n, "noise_sigma"); break;
        case 17: {
          const std::int64_t s = parse_int(val, n, "seed");
          if (s < 0) {
            throw FormatError::at_line("seed must be >= 0", n);
          }
          spec.seed = static_cast<std::uint64_t>(s);
          break;
        }
        case 18:
          spec.lidar_factor = static_cast<int>(parse_int(val, n, "lidar_factor"));
          break;
        case 19: {
          const std::int64_t v = parse_int(val, n, "color");
          if (v != 0 && v != 1) {
            throw FormatError::at_line("color must be 0 or 1", n);
          }
          spec.with_color = v == 1;
          break;
        }
      }
    }
  } catch (const FormatError& e) {
    throw ConfigError(std::string("scene spec: ") + e.what());
  }

  for (int i = 7; i <= 12; ++i) {
    if (!seen[i]) {
      throw ConfigError(std::string("scene spec: missing key '") + kKeys[i] + "'");
    }
  }

  if (!orbit) {
    spec.camera_path.assign(static_cast<std::size_t>(std::max(spec.frame_count, 0)), Pose{});
  } else {
    if (!have_orbit_distance || !(orbit_distance > 0.0)) {
      throw ConfigError("scene spec: orbit path requires a positive orbit_distance");
    }
    const Vec3 target = spec.shape == SceneShape::kSphere ? spec.sphere_center
                                                          : Vec3(0.0, 0.0, spec.plane_z_mm);
    for (int i = 0; i < spec.frame_count; ++i) {
      const double theta = orbit_degrees * kPi / 180.0 * i / spec.frame_count;
      const double s = std::sin(theta);
      const double c = std::cos(theta);
      Pose pose;
      pose.rotation.col(0) = Vec3(c, 0.0, -s);   // camera x: screen right
      pose.rotation.col(1) = Vec3(0.0, 1.0, 0.0);  // camera y: screen down
      pose.rotation.col(2) = Vec3(s, 0.0, c);    // camera z: toward the target
      pose.translation = target + orbit_distance * Vec3(-s, 0.0, -c);
      spec.camera_path.push_back(pose);
    }
  }

  spec.validate();
  return spec;
}

CaptureManifest synth_capture(const SceneSpec& spec, const std::filesystem::path& out_dir) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    throw IoError("cannot create output directory " + out_dir.string());
  }

  const bool dual_branch = spec.lidar_factor > 1;
  const CameraIntrinsics coarse_intr =
      dual_branch ? downscale_intrinsics(spec.intrinsics, spec.lidar_factor) : spec.intrinsics;

  Renderer renderer(spec);
  CaptureManifest manifest;
  for (int i = 0; i < spec.frame_count; ++i) {
    const Pose& pose = spec.camera_path[static_cast<std::size_t>(i)];

    FrameEntry entry;
    entry.index = i;
    entry.timestamp_s = i / 30.0;
    entry.pose_line = i;

    entry.depth_lidar_path = frame_name(i, "_l.dpt");
    save_file(out_dir / entry.depth_lidar_path,
              write_depth_frame(renderer.render_depth(coarse_intr, pose)));
    if (dual_branch) {
      entry.depth_truedepth_path = frame_name(i, "_t.dpt");
      save_file(out_dir / entry.depth_truedepth_path,
                write_depth_frame(renderer.render_depth(spec.intrinsics, pose)));
    }
    if (spec.with_color) {
      entry.color_path = frame_name(i, ".ppm");
      save_file(out_dir / entry.color_path,
                write_color_frame(renderer.render_color(spec.intrinsics, pose)));
    }
    manifest.frames.push_back(std::move(entry));
  }

  save_text(out_dir / "intrinsics.txt", write_intrinsics(spec.intrinsics));
  save_text(out_dir / "poses.txt", write_pose_track(spec.camera_path));
  save_text(out_dir / "manifest.txt", write_manifest(manifest));
  return manifest;
}

}  // namespace voxrec
