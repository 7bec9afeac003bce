// Shared test helpers: deliberately naive reference implementations the
// library results are compared against, plus small fixtures. Everything
// here recomputes from first principles; none of it calls back into the
// code under test beyond plain data types.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "voxrec/depth.hpp"
#include "voxrec/frames.hpp"
#include "voxrec/geometry.hpp"

namespace testutil {

using voxrec::Color8;
using voxrec::ConvLayer;
using voxrec::DepthFrame;
using voxrec::PlaneStack;
using voxrec::PointCloud;
using voxrec::Pose;
using voxrec::Vec3;

// Unique scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label) {
    static std::mt19937_64 rng{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() /
            (label + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(-3.14159265358979, 3.14159265358979);
  std::uniform_real_distribution<double> shift(-5000.0, 5000.0);
  Vec3 axis(unit(rng), unit(rng), unit(rng));
  while (axis.norm() < 1e-6) {
    axis = Vec3(unit(rng), unit(rng), unit(rng));
  }
  Pose pose;
  pose.rotation = Eigen::AngleAxisd(angle(rng), axis.normalized()).toRotationMatrix();
  pose.translation = Vec3(shift(rng), shift(rng), shift(rng));
  return pose;
}

inline DepthFrame random_depth(std::mt19937_64& rng, int width, int height,
                               double invalid_ratio = 0.2) {
  std::uniform_int_distribution<int> mm(1, 65535);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  DepthFrame f = DepthFrame::constant(width, height, 0.0f);
  for (float& s : f.samples) {
    if (coin(rng) >= invalid_ratio) {
      s = static_cast<float>(mm(rng));
    }
  }
  return f;
}

// --- fusion reference: one pixel at a time, scalar arithmetic -------------

inline float fuse_reference(float lidar, float truedepth, double conf_l, double conf_t,
                            bool use_confidence, double lidar_weight) {
  const double lv = lidar;
  const double tv = truedepth;
  if (lv != 0.0 && tv != 0.0) {
    double w = lidar_weight;
    if (use_confidence && conf_l + conf_t > 0.0) {
      w = conf_l / (conf_l + conf_t);
    }
    return static_cast<float>(w * lv + (1.0 - w) * tv);
  }
  if (lv != 0.0) {
    return lidar;
  }
  return truedepth;
}

// --- bilinear reference: per output pixel, 4-weight formulation -----------

inline float bilinear_reference_at(const DepthFrame& src, int factor, int ox, int oy) {
  const auto axis = [&](int o, int size, int& lo, int& hi) {
    double s = (o + 0.5) / static_cast<double>(factor) - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(size - 1));
    lo = static_cast<int>(std::floor(s));
    const double frac = s - lo;
    hi = frac > 0.0 ? lo + 1 : lo;
    return frac;
  };
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  const double fx = axis(ox, src.width, x0, x1);
  const double fy = axis(oy, src.height, y0, y1);
  const double v00 = src.at(x0, y0);
  const double v01 = src.at(x1, y0);
  const double v10 = src.at(x0, y1);
  const double v11 = src.at(x1, y1);
  if (v00 == 0.0 || v01 == 0.0 || v10 == 0.0 || v11 == 0.0) {
    return 0.0f;
  }
  return static_cast<float>((1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
                            fy * ((1.0 - fx) * v10 + fx * v11));
}

// --- convolution reference: straight quintuple loop ------------------------

inline PlaneStack conv2d_reference(const PlaneStack& in, const ConvLayer& layer, bool relu) {
  PlaneStack out = PlaneStack::zeros(layer.out_channels, in.height, in.width);
  const int pad_h = (layer.kernel_h - 1) / 2;
  const int pad_w = (layer.kernel_w - 1) / 2;
  for (int oc = 0; oc < layer.out_channels; ++oc) {
    for (int y = 0; y < in.height; ++y) {
      for (int x = 0; x < in.width; ++x) {
        double acc = layer.biases[static_cast<std::size_t>(oc)];
        for (int ic = 0; ic < layer.in_channels; ++ic) {
          for (int ky = 0; ky < layer.kernel_h; ++ky) {
            for (int kx = 0; kx < layer.kernel_w; ++kx) {
              const int sy = std::clamp(y + ky - pad_h, 0, in.height - 1);
              const int sx = std::clamp(x + kx - pad_w, 0, in.width - 1);
              const double w =
                  layer.weights[((static_cast<std::size_t>(oc) * layer.in_channels + ic) *
                                     layer.kernel_h +
                                 ky) *
                                    layer.kernel_w +
                                kx];
              acc += w * in.at(ic, sy, sx);
            }
          }
        }
        out.at(oc, y, x) = relu ? std::max(0.0, acc) : acc;
      }
    }
  }
  return out;
}

// --- voxel accumulation reference: plain ordered map -----------------------

using CellKey = std::array<std::int64_t, 3>;

struct CellSums {
  std::uint64_t count = 0;
  std::uint64_t r = 0, g = 0, b = 0;
};

inline CellKey cell_key_reference(const Vec3& p, double voxel_size, const Vec3& origin) {
  return CellKey{
      static_cast<std::int64_t>(std::floor((p.x() - origin.x()) / voxel_size)),
      static_cast<std::int64_t>(std::floor((p.y() - origin.y()) / voxel_size)),
      static_cast<std::int64_t>(std::floor((p.z() - origin.z()) / voxel_size)),
  };
}

inline std::map<CellKey, CellSums> accumulate_reference(const PointCloud& cloud,
                                                        double voxel_size, const Vec3& origin) {
  std::map<CellKey, CellSums> cells;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Color8 c = cloud.colors.empty() ? Color8{255, 255, 255} : cloud.colors[i];
    CellSums& cell = cells[cell_key_reference(cloud.points[i], voxel_size, origin)];
    cell.count += 1;
    cell.r += c.r;
    cell.g += c.g;
    cell.b += c.b;
  }
  return cells;
}

inline Color8 mean_reference(const CellSums& cell) {
  const std::uint64_t half = cell.count / 2;
  return Color8{static_cast<std::uint8_t>((cell.r + half) / cell.count),
                static_cast<std::uint8_t>((cell.g + half) / cell.count),
                static_cast<std::uint8_t>((cell.b + half) / cell.count)};
}

}  // namespace testutil
