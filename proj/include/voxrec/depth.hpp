// Dual-sensor depth fusion, bilinear / convolutional 4x upscaling, and
// relative-to-metric depth normalization.
//
// Invalid pixels (sample 0) never gain fabricated depth: fusion falls back
// to whichever sensor saw the pixel, bilinear upscaling zeroes any output
// whose contributing source samples include an invalid one, and the
// super-resolution path re-masks pixels that were invalid after upscaling.
#pragma once

#include <cstdint>
#include <vector>

#include "voxrec/error.hpp"
#include "voxrec/frames.hpp"

namespace voxrec {

struct FusionConfig {
  double lidar_weight = 0.5;    // in [0,1]
  bool use_confidence = false;  // per-pixel weights c_l / (c_l + c_t) when both confidences exist
};

// Per-pixel weighted average of two equal-resolution depth frames.
// Both valid: w*lidar + (1-w)*truedepth. One valid: the valid sample.
// Neither: 0. With use_confidence and c_l + c_t > 0, w = c_l / (c_l + c_t).
DepthFrame fuse_depth(const DepthFrame& lidar, const DepthFrame& truedepth,
                      const ConfidenceFrame* conf_lidar, const ConfidenceFrame* conf_truedepth,
                      const FusionConfig& cfg);

// As fuse_depth, reusing out's storage. out may alias an input.
void fuse_depth_into(const DepthFrame& lidar, const DepthFrame& truedepth,
                     const ConfidenceFrame* conf_lidar, const ConfidenceFrame* conf_truedepth,
                     const FusionConfig& cfg, DepthFrame& out);

// Bilinear upscale with align-corners-false sampling: output pixel o reads
// source coordinate (o + 0.5) / factor - 0.5, clamped to the frame. Any
// invalid sample among the contributing neighbors invalidates the output.
DepthFrame upscale_bilinear(const DepthFrame& frame, int factor);

// As upscale_bilinear, reusing out's storage. out must not alias frame.
void upscale_bilinear_into(const DepthFrame& frame, int factor, DepthFrame& out);

struct ConvLayer {
  int out_channels = 0;
  int in_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  std::vector<double> weights;  // out * in * kh * kw, row-major
  std::vector<double> biases;   // out
};

// Channel-chained stack of odd-kernel conv layers, 1 channel in, 1 out.
struct SrcnnWeights {
  std::vector<ConvLayer> layers;

  void validate() const;  // throws DomainError

  // n_layers 1x1 kernels of value 1 with zero bias: the network that maps
  // every input plane to itself.
  static SrcnnWeights identity_stack(int n_layers = 1);
};

// Channel-major plane stack: data[(c*height + y)*width + x].
struct PlaneStack {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  static PlaneStack zeros(int channels, int height, int width);

  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  double& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
};

enum class Activation { kNone, kRelu };

// Same-spatial-size cross-correlation with replicate-edge padding of
// (k-1)/2, plus per-channel bias and optional ReLU.
PlaneStack conv2d_forward(const PlaneStack& input, const ConvLayer& layer, Activation activation);

// Super-resolution upscale: bilinear pre-upsample, then the conv stack with
// ReLU on all but the last layer, operating on depth normalized by the
// 16-bit full scale 65535; the result is clamped to [0, 65535]. Pixels
// invalid after the bilinear stage stay 0. The normalize/denormalize pair
// is folded into the layer biases so the identity stack reproduces the
// bilinear result bit for bit.
DepthFrame srcnn_upscale(const DepthFrame& frame, const SrcnnWeights& weights, int factor);

// Affine map of relative depth in [0,1] onto [z_near, z_far] millimeters.
// Invalid samples stay 0; a valid sample outside [0,1] is a DomainError.
DepthFrame normalize_relative_to_metric(const DepthFrame& frame, double z_near_mm, double z_far_mm);

// As normalize_relative_to_metric, reusing out's storage. out may alias
// frame; on failure out's contents are unspecified.
void normalize_relative_to_metric_into(const DepthFrame& frame, double z_near_mm, double z_far_mm,
                                       DepthFrame& out);

// Rounds samples to the nearest integer millimeter and clamps to the 16-bit
// range so the frame can be stored. Depths under 0.5 mm collapse to the
// invalid marker.
DepthFrame quantize_depth(const DepthFrame& frame);

}  // namespace voxrec
