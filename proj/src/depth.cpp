#include "voxrec/depth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace voxrec {

namespace {

// 16-bit full scale used to normalize depth for the conv stack; fixed so
// inference does not depend on per-frame statistics.
constexpr double kDepthScale = 65535.0;

void check_same_dims(const char* what, int w0, int h0, int w1, int h1) {
  if (w0 != w1 || h0 != h1) {
    throw ShapeError(std::string(what) + ": frame dimensions do not match");
  }
}

struct AxisTap {
  int lo = 0;
  int hi = 0;
  double frac = 0.0;  // weight of hi; hi == lo when the tap is exact
};

std::vector<AxisTap> make_taps(int out_size, int in_size, int factor) {
  std::vector<AxisTap> taps(static_cast<std::size_t>(out_size));
  const double inv = 1.0 / factor;
  for (int o = 0; o < out_size; ++o) {
    double s = (o + 0.5) * inv - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in_size - 1));
    const int lo = static_cast<int>(s);
    const double frac = s - lo;
    taps[static_cast<std::size_t>(o)] =
        frac > 0.0 ? AxisTap{lo, lo + 1, frac} : AxisTap{lo, lo, 0.0};
  }
  return taps;
}

}  // namespace

void fuse_depth_into(const DepthFrame& lidar, const DepthFrame& truedepth,
                     const ConfidenceFrame* conf_lidar, const ConfidenceFrame* conf_truedepth,
                     const FusionConfig& cfg, DepthFrame& out) {
  if (!(cfg.lidar_weight >= 0.0 && cfg.lidar_weight <= 1.0)) {
    throw DomainError("fuse_depth: lidar_weight must be in [0,1]");
  }
  check_same_dims("fuse_depth", lidar.width, lidar.height, truedepth.width, truedepth.height);
  if (conf_lidar != nullptr) {
    check_same_dims("fuse_depth: lidar confidence", lidar.width, lidar.height, conf_lidar->width,
                    conf_lidar->height);
  }
  if (conf_truedepth != nullptr) {
    check_same_dims("fuse_depth: truedepth confidence", lidar.width, lidar.height,
                    conf_truedepth->width, conf_truedepth->height);
  }

  const bool per_pixel_weights = cfg.use_confidence && conf_lidar != nullptr && conf_truedepth != nullptr;
  const double w = cfg.lidar_weight;

  out.width = lidar.width;
  out.height = lidar.height;
  out.samples.resize(lidar.samples.size());

  for (std::size_t i = 0; i < lidar.samples.size(); ++i) {
    const double lv = lidar.samples[i];
    const double tv = truedepth.samples[i];
    if (lv != 0.0 && tv != 0.0) {
      double wi = w;
      if (per_pixel_weights) {
        const double cl = conf_lidar->levels[i];
        const double ct = conf_truedepth->levels[i];
        if (cl + ct > 0.0) {
          wi = cl / (cl + ct);
        }
      }
      out.samples[i] = static_cast<float>(wi * lv + (1.0 - wi) * tv);
    } else if (lv != 0.0) {
      out.samples[i] = static_cast<float>(lv);
    } else {
      out.samples[i] = static_cast<float>(tv);  // tv, or 0 when neither is valid
    }
  }
}

DepthFrame fuse_depth(const DepthFrame& lidar, const DepthFrame& truedepth,
                      const ConfidenceFrame* conf_lidar, const ConfidenceFrame* conf_truedepth,
                      const FusionConfig& cfg) {
  DepthFrame out;
  fuse_depth_into(lidar, truedepth, conf_lidar, conf_truedepth, cfg, out);
  return out;
}

void upscale_bilinear_into(const DepthFrame& frame, int factor, DepthFrame& out) {
  if (factor < 1) {
    throw DomainError("upscale_bilinear: factor must be >= 1");
  }
  if (&out == &frame) {
    throw DomainError("upscale_bilinear: output must not alias the input");
  }

  out.width = frame.width * factor;
  out.height = frame.height * factor;
  out.samples.resize(static_cast<std::size_t>(out.width) * out.height);

  const auto col = make_taps(out.width, frame.width, factor);
  const auto row = make_taps(out.height, frame.height, factor);

  for (int oy = 0; oy < out.height; ++oy) {
    const AxisTap& ry = row[static_cast<std::size_t>(oy)];
    const float* src_lo = frame.samples.data() + static_cast<std::size_t>(ry.lo) * frame.width;
    const float* src_hi = frame.samples.data() + static_cast<std::size_t>(ry.hi) * frame.width;
    float* dst = out.samples.data() + static_cast<std::size_t>(oy) * out.width;
    const double fy = ry.frac;
    for (int ox = 0; ox < out.width; ++ox) {
      const AxisTap& rx = col[static_cast<std::size_t>(ox)];
      const double v00 = src_lo[rx.lo];
      const double v01 = src_lo[rx.hi];
      const double v10 = src_hi[rx.lo];
      const double v11 = src_hi[rx.hi];
      if (v00 == 0.0 || v01 == 0.0 || v10 == 0.0 || v11 == 0.0) {
        dst[ox] = 0.0f;
        continue;
      }
      const double fx = rx.frac;
      const double top = v00 + fx * (v01 - v00);
      const double bot = v10 + fx * (v11 - v10);
      dst[ox] = static_cast<float>(top + fy * (bot - top));
    }
  }
}

DepthFrame upscale_bilinear(const DepthFrame& frame, int factor) {
  DepthFrame out;
  upscale_bilinear_into(frame, factor, out);
  return out;
}

void SrcnnWeights::validate() const {
  if (layers.empty()) {
    throw DomainError("SrcnnWeights: at least one layer required");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const ConvLayer& l = layers[i];
    const std::string tag = "SrcnnWeights layer " + std::to_string(i);
    if (l.out_channels <= 0 || l.in_channels <= 0 || l.kernel_h <= 0 || l.kernel_w <= 0) {
      throw DomainError(tag + ": dimensions must be positive");
    }
    if (l.kernel_h % 2 == 0 || l.kernel_w % 2 == 0) {
      throw DomainError(tag + ": kernel dimensions must be odd");
    }
    const std::size_t expect = static_cast<std::size_t>(l.out_channels) * l.in_channels *
                               l.kernel_h * l.kernel_w;
    if (l.weights.size() != expect) {
      throw DomainError(tag + ": weight count does not match declared shape");
    }
    if (l.biases.size() != static_cast<std::size_t>(l.out_channels)) {
      throw DomainError(tag + ": bias count does not match out_channels");
    }
    if (i > 0 && l.in_channels != layers[i - 1].out_channels) {
      throw DomainError(tag + ": in_channels does not chain from previous layer");
    }
  }
  if (layers.front().in_channels != 1) {
    throw DomainError("SrcnnWeights: first layer must take 1 channel");
  }
  if (layers.back().out_channels != 1) {
    throw DomainError("SrcnnWeights: last layer must emit 1 channel");
  }
}

SrcnnWeights SrcnnWeights::identity_stack(int n_layers) {
  SrcnnWeights w;
  for (int i = 0; i < n_layers; ++i) {
    w.layers.push_back(ConvLayer{1, 1, 1, 1, {1.0}, {0.0}});
  }
  return w;
}

PlaneStack PlaneStack::zeros(int channels, int height, int width) {
  PlaneStack s;
  s.channels = channels;
  s.height = height;
  s.width = width;
  s.data.assign(static_cast<std::size_t>(channels) * height * width, 0.0);
  return s;
}

PlaneStack conv2d_forward(const PlaneStack& input, const ConvLayer& layer, Activation activation) {
  if (input.channels != layer.in_channels) {
    throw ShapeError("conv2d_forward: input channel count does not match layer");
  }
  if (layer.kernel_h % 2 == 0 || layer.kernel_w % 2 == 0) {
    throw DomainError("conv2d_forward: kernel dimensions must be odd");
  }
  const std::size_t expect = static_cast<std::size_t>(layer.out_channels) * layer.in_channels *
                             layer.kernel_h * layer.kernel_w;
  if (layer.weights.size() != expect ||
      layer.biases.size() != static_cast<std::size_t>(layer.out_channels)) {
    throw DomainError("conv2d_forward: weight/bias sizes do not match layer shape");
  }

  const int height = input.height;
  const int width = input.width;
  const int pad_h = (layer.kernel_h - 1) / 2;
  const int pad_w = (layer.kernel_w - 1) / 2;

  PlaneStack out = PlaneStack::zeros(layer.out_channels, height, width);
  std::vector<double> acc(static_cast<std::size_t>(width));

  for (int oc = 0; oc < layer.out_channels; ++oc) {
    const double bias = layer.biases[static_cast<std::size_t>(oc)];
    for (int y = 0; y < height; ++y) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int ic = 0; ic < layer.in_channels; ++ic) {
        const double* plane = input.data.data() + static_cast<std::size_t>(ic) * height * width;
        for (int ky = 0; ky < layer.kernel_h; ++ky) {
          const int sy = std::clamp(y + ky - pad_h, 0, height - 1);
          const double* src = plane + static_cast<std::size_t>(sy) * width;
          const double* wrow = layer.weights.data() +
                               ((static_cast<std::size_t>(oc) * layer.in_channels + ic) *
                                    layer.kernel_h +
                                ky) *
                                   layer.kernel_w;
          for (int kx = 0; kx < layer.kernel_w; ++kx) {
            const double wv = wrow[kx];
            const int off = kx - pad_w;
            // Split the row into left-clamped, interior, and right-clamped
            // spans so the interior loop has no per-pixel branching.
            const int x_lo = std::min(width, std::max(0, -off));
            const int x_hi = std::clamp(width - off, x_lo, width);
            for (int x = 0; x < x_lo; ++x) {
              acc[static_cast<std::size_t>(x)] += wv * src[0];
            }
            for (int x = x_lo; x < x_hi; ++x) {
              acc[static_cast<std::size_t>(x)] += wv * src[x + off];
            }
            for (int x = x_hi; x < width; ++x) {
              acc[static_cast<std::size_t>(x)] += wv * src[width - 1];
            }
          }
        }
      }
      double* dst = out.data.data() +
                    (static_cast<std::size_t>(oc) * height + static_cast<std::size_t>(y)) * width;
      if (activation == Activation::kRelu) {
        for (int x = 0; x < width; ++x) {
          dst[x] = std::max(0.0, acc[static_cast<std::size_t>(x)] + bias);
        }
      } else {
        for (int x = 0; x < width; ++x) {
          dst[x] = acc[static_cast<std::size_t>(x)] + bias;
        }
      }
    }
  }
  return out;
}

DepthFrame srcnn_upscale(const DepthFrame& frame, const SrcnnWeights& weights, int factor) {
  weights.validate();

  const DepthFrame up = upscale_bilinear(frame, factor);

  PlaneStack stack = PlaneStack::zeros(1, up.height, up.width);
  for (std::size_t i = 0; i < up.samples.size(); ++i) {
    stack.data[i] = up.samples[i];
  }

  // Running the stack on raw millimeters with biases scaled by the full
  // scale is algebraically the normalize -> conv -> denormalize pipeline,
  // and keeps the identity stack an exact no-op.
  for (std::size_t i = 0; i < weights.layers.size(); ++i) {
    ConvLayer scaled = weights.layers[i];
    for (double& b : scaled.biases) {
      b *= kDepthScale;
    }
    const Activation act =
        i + 1 < weights.layers.size() ? Activation::kRelu : Activation::kNone;
    stack = conv2d_forward(stack, scaled, act);
  }

  DepthFrame out;
  out.width = up.width;
  out.height = up.height;
  out.samples.resize(up.samples.size());
  for (std::size_t i = 0; i < up.samples.size(); ++i) {
    out.samples[i] = up.samples[i] == 0.0f
                         ? 0.0f
                         : static_cast<float>(std::clamp(stack.data[i], 0.0, kDepthScale));
  }
  return out;
}

void normalize_relative_to_metric_into(const DepthFrame& frame, double z_near_mm,
                                       double z_far_mm, DepthFrame& out) {
  if (!(z_near_mm > 0.0) || !(z_far_mm > z_near_mm) || !std::isfinite(z_far_mm)) {
    throw DomainError("normalize_relative_to_metric: need 0 < z_near < z_far");
  }
  out.width = frame.width;
  out.height = frame.height;
  out.samples.resize(frame.samples.size());
  const double range = z_far_mm - z_near_mm;
  for (std::size_t i = 0; i < frame.samples.size(); ++i) {
    const double s = frame.samples[i];
    if (s == 0.0) {
      out.samples[i] = 0.0f;  // invalid stays invalid
      continue;
    }
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DomainError("normalize_relative_to_metric: sample outside [0,1]");
    }
    out.samples[i] = static_cast<float>(z_near_mm + s * range);
  }
}

DepthFrame normalize_relative_to_metric(const DepthFrame& frame, double z_near_mm,
                                        double z_far_mm) {
  DepthFrame out;
  normalize_relative_to_metric_into(frame, z_near_mm, z_far_mm, out);
  return out;
}

DepthFrame quantize_depth(const DepthFrame& frame) {
  DepthFrame out;
  out.width = frame.width;
  out.height = frame.height;
  out.samples.resize(frame.samples.size());
  for (std::size_t i = 0; i < frame.samples.size(); ++i) {
    const double s = frame.samples[i];
    if (!std::isfinite(s) || s < 0.0) {
      throw DomainError("quantize_depth: sample must be finite and non-negative");
    }
    out.samples[i] = static_cast<float>(std::min<long long>(std::llround(s), 65535ll));
  }
  return out;
}

}  // namespace voxrec
