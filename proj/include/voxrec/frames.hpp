// Raster containers shared by the depth pipeline: metric depth frames,
// RGB color frames, per-pixel sensor confidence, and foreground masks.
// All rasters are row-major with pixel (0,0) at the top-left.
#pragma once

#include <cstdint>
#include <vector>

#include "voxrec/error.hpp"

namespace voxrec {

struct Color8 {
  std::uint8_t r = 255;
  std::uint8_t g = 255;
  std::uint8_t b = 255;

  bool operator==(const Color8&) const = default;
};

// Metric depth image in millimeters. A sample of 0 marks an invalid pixel
// (no sensor return); every valid sample is finite and > 0.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<float> samples;  // height*width, row-major

  static DepthFrame constant(int width, int height, float value);

  float at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
  float& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::size_t pixel_count() const { return samples.size(); }

  // Throws ShapeError / DomainError when the invariants do not hold.
  void validate() const;

  bool operator==(const DepthFrame&) const = default;
};

struct ColorFrame {
  int width = 0;
  int height = 0;
  std::vector<Color8> pixels;  // height*width, row-major

  static ColorFrame constant(int width, int height, Color8 value);

  Color8 at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  Color8& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

  void validate() const;

  bool operator==(const ColorFrame&) const = default;
};

// Per-pixel sensor confidence, levels 0 (low) / 1 (medium) / 2 (high).
struct ConfidenceFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> levels;  // height*width, row-major

  static ConfidenceFrame constant(int width, int height, std::uint8_t level);

  std::uint8_t at(int x, int y) const { return levels[static_cast<std::size_t>(y) * width + x]; }

  void validate() const;

  bool operator==(const ConfidenceFrame&) const = default;
};

// Foreground selector: nonzero = foreground, 0 = background.
struct MaskFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;  // height*width, row-major

  static MaskFrame constant(int width, int height, std::uint8_t value);

  std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

  void validate() const;
};

}  // namespace voxrec
