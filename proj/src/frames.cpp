#include "voxrec/frames.hpp"

#include <cmath>

namespace voxrec {

namespace {

void check_dims(int width, int height, std::size_t count, const char* what) {
  if (width <= 0 || height <= 0) {
    throw ShapeError(std::string(what) + ": dimensions must be positive");
  }
  if (count != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ShapeError(std::string(what) + ": sample count does not match dimensions");
  }
}

}  // namespace

DepthFrame DepthFrame::constant(int width, int height, float value) {
  DepthFrame f;
  f.width = width;
  f.height = height;
  f.samples.assign(static_cast<std::size_t>(width) * height, value);
  return f;
}

void DepthFrame::validate() const {
  check_dims(width, height, samples.size(), "DepthFrame");
  for (float s : samples) {
    if (!std::isfinite(s) || s < 0.0f) {
      throw DomainError("DepthFrame: samples must be finite and >= 0");
    }
  }
}

ColorFrame ColorFrame::constant(int width, int height, Color8 value) {
  ColorFrame f;
  f.width = width;
  f.height = height;
  f.pixels.assign(static_cast<std::size_t>(width) * height, value);
  return f;
}

void ColorFrame::validate() const {
  check_dims(width, height, pixels.size(), "ColorFrame");
}

ConfidenceFrame ConfidenceFrame::constant(int width, int height, std::uint8_t level) {
  ConfidenceFrame f;
  f.width = width;
  f.height = height;
  f.levels.assign(static_cast<std::size_t>(width) * height, level);
  return f;
}

void ConfidenceFrame::validate() const {
  check_dims(width, height, levels.size(), "ConfidenceFrame");
  for (std::uint8_t l : levels) {
    if (l > 2) {
      throw DomainError("ConfidenceFrame: levels must be 0, 1 or 2");
    }
  }
}

MaskFrame MaskFrame::constant(int width, int height, std::uint8_t value) {
  MaskFrame f;
  f.width = width;
  f.height = height;
  f.values.assign(static_cast<std::size_t>(width) * height, value);
  return f;
}

void MaskFrame::validate() const {
  check_dims(width, height, values.size(), "MaskFrame");
}

}  // namespace voxrec
