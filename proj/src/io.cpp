#include "voxrec/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "text_util.hpp"

namespace voxrec {

using detail::TextLine;
using detail::content_lines;
using detail::format_double;
using detail::format_fixed6;
using detail::parse_double;
using detail::parse_int;
using detail::raw_lines;
using detail::split_tokens;

namespace {

// ---------------------------------------------------------------------------
// Binary plumbing

class ByteReader {
 public:
  explicit ByteReader(const Bytes& bytes) : data_(bytes.data()), size_(bytes.size()) {}

  std::size_t offset() const { return off_; }
  std::size_t remaining() const { return size_ - off_; }

  void expect_magic(const char* magic, const char* what) {
    need(4, what);
    if (std::memcmp(data_ + off_, magic, 4) != 0) {
      throw FormatError::at_offset(std::string(what) + ": bad magic", off_);
    }
    off_ += 4;
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return data_[off_++];
  }

  std::uint16_t u16le(const char* what) {
    need(2, what);
    const std::uint16_t v = static_cast<std::uint16_t>(data_[off_]) |
                            static_cast<std::uint16_t>(data_[off_ + 1]) << 8;
    off_ += 2;
    return v;
  }

  std::uint32_t u32le(const char* what) {
    need(4, what);
    const std::uint32_t v = static_cast<std::uint32_t>(data_[off_]) |
                            static_cast<std::uint32_t>(data_[off_ + 1]) << 8 |
                            static_cast<std::uint32_t>(data_[off_ + 2]) << 16 |
                            static_cast<std::uint32_t>(data_[off_ + 3]) << 24;
    off_ += 4;
    return v;
  }

  float f32le(const char* what) { return std::bit_cast<float>(u32le(what)); }

  void done(const char* what) const {
    if (off_ != size_) {
      throw FormatError::at_offset(std::string(what) + ": trailing bytes", off_);
    }
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (size_ - off_ < n) {
      throw FormatError::at_offset(std::string(what) + ": unexpected end of data", off_);
    }
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t off_ = 0;
};

void put_u16le(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32le(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_f32le(Bytes& out, float v) { put_u32le(out, std::bit_cast<std::uint32_t>(v)); }

}  // namespace

// ---------------------------------------------------------------------------
// Depth / confidence rasters

DepthFrame read_depth_frame(const Bytes& bytes) {
  ByteReader r(bytes);
  r.expect_magic("DPT1", "depth frame");
  const std::uint32_t w = r.u32le("depth frame width");
  const std::uint32_t h = r.u32le("depth frame height");
  if (w == 0 || h == 0) {
    throw FormatError::at_offset("depth frame: dimensions must be positive", 4);
  }
  const std::uint64_t count = static_cast<std::uint64_t>(w) * h;
  if (r.remaining() != count * 2) {
    throw FormatError::at_offset(
        r.remaining() < count * 2 ? "depth frame: truncated sample payload"
                                  : "depth frame: trailing bytes after samples",
        r.offset());
  }
  DepthFrame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  frame.samples.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    frame.samples[i] = static_cast<float>(r.u16le("depth sample"));
  }
  return frame;
}

Bytes write_depth_frame(const DepthFrame& frame) {
  frame.validate();
  Bytes out;
  out.reserve(12 + frame.samples.size() * 2);
  out.insert(out.end(), {'D', 'P', 'T', '1'});
  put_u32le(out, static_cast<std::uint32_t>(frame.width));
  put_u32le(out, static_cast<std::uint32_t>(frame.height));
  for (const float s : frame.samples) {
    if (s < 0.0f || s > 65535.0f || s != std::floor(s)) {
      throw DomainError("write_depth_frame: sample not an integer in [0, 65535]; quantize first");
    }
    put_u16le(out, static_cast<std::uint16_t>(s));
  }
  return out;
}

ConfidenceFrame read_confidence_frame(const Bytes& bytes) {
  ByteReader r(bytes);
  r.expect_magic("CNF1", "confidence frame");
  const std::uint32_t w = r.u32le("confidence frame width");
  const std::uint32_t h = r.u32le("confidence frame height");
  if (w == 0 || h == 0) {
    throw FormatError::at_offset("confidence frame: dimensions must be positive", 4);
  }
  const std::uint64_t count = static_cast<std::uint64_t>(w) * h;
  if (r.remaining() != count) {
    throw FormatError::at_offset(
        r.remaining() < count ? "confidence frame: truncated payload"
                              : "confidence frame: trailing bytes after payload",
        r.offset());
  }
  ConfidenceFrame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  frame.levels.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    const std::uint8_t v = r.u8("confidence level");
    if (v > 2) {
      throw FormatError::at_offset("confidence frame: level outside {0,1,2}", at);
    }
    frame.levels[i] = v;
  }
  return frame;
}

Bytes write_confidence_frame(const ConfidenceFrame& frame) {
  frame.validate();
  Bytes out;
  out.reserve(12 + frame.levels.size());
  out.insert(out.end(), {'C', 'N', 'F', '1'});
  put_u32le(out, static_cast<std::uint32_t>(frame.width));
  put_u32le(out, static_cast<std::uint32_t>(frame.height));
  out.insert(out.end(), frame.levels.begin(), frame.levels.end());
  return out;
}

// ---------------------------------------------------------------------------
// PPM color frames

namespace {

bool is_ppm_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

class PpmScanner {
 public:
  explicit PpmScanner(const Bytes& bytes) : data_(bytes.data()), size_(bytes.size()) {}

  std::size_t offset() const { return off_; }
  std::size_t remaining() const { return size_ - off_; }
  const std::uint8_t* cursor() const { return data_ + off_; }

  void skip_separators() {
    while (off_ < size_) {
      if (is_ppm_space(data_[off_])) {
        ++off_;
      } else if (data_[off_] == '#') {
        while (off_ < size_ && data_[off_] != '\n') ++off_;
      } else {
        break;
      }
    }
  }

  std::string_view token(const char* what) {
    skip_separators();
    const std::size_t start = off_;
    while (off_ < size_ && !is_ppm_space(data_[off_]) && data_[off_] != '#') ++off_;
    if (off_ == start) {
      throw FormatError::at_offset(std::string("color frame: missing ") + what, off_);
    }
    return std::string_view(reinterpret_cast<const char*>(data_) + start, off_ - start);
  }

  // The single whitespace byte that separates the header from the payload.
  void expect_one_separator() {
    if (off_ >= size_ || !is_ppm_space(data_[off_])) {
      throw FormatError::at_offset("color frame: expected whitespace before pixel payload", off_);
    }
    ++off_;
  }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t off_ = 0;
};

std::uint32_t parse_ppm_number(std::string_view tok, std::size_t offset, const char* what) {
  std::uint32_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw FormatError::at_offset(std::string("color frame: bad ") + what, offset);
  }
  return v;
}

}  // namespace

ColorFrame read_color_frame(const Bytes& bytes) {
  PpmScanner s(bytes);
  const std::string_view magic = s.token("magic");
  if (magic != "P6") {
    throw FormatError::at_offset("color frame: not a binary PPM (P6)", 0);
  }
  std::size_t at = s.offset();
  const std::uint32_t w = parse_ppm_number(s.token("width"), at, "width");
  at = s.offset();
  const std::uint32_t h = parse_ppm_number(s.token("height"), at, "height");
  if (w == 0 || h == 0) {
    throw FormatError::at_offset("color frame: dimensions must be positive", at);
  }
  at = s.offset();
  const std::uint32_t maxval = parse_ppm_number(s.token("maxval"), at, "maxval");
  if (maxval != 255) {
    throw FormatError::at_offset("color frame: maxval must be 255", at);
  }
  s.expect_one_separator();

  const std::uint64_t count = static_cast<std::uint64_t>(w) * h;
  if (s.remaining() != count * 3) {
    throw FormatError::at_offset(s.remaining() < count * 3
                                     ? "color frame: truncated pixel payload"
                                     : "color frame: trailing bytes after pixels",
                                 s.offset());
  }
  ColorFrame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  frame.pixels.resize(count);
  const std::uint8_t* p = s.cursor();
  for (std::uint64_t i = 0; i < count; ++i) {
    frame.pixels[i] = Color8{p[3 * i], p[3 * i + 1], p[3 * i + 2]};
  }
  return frame;
}

Bytes write_color_frame(const ColorFrame& frame) {
  frame.validate();
  const std::string header = "P6\n" + std::to_string(frame.width) + " " +
                             std::to_string(frame.height) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + frame.pixels.size() * 3);
  for (const Color8& c : frame.pixels) {
    out.push_back(c.r);
    out.push_back(c.g);
    out.push_back(c.b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Intrinsics

CameraIntrinsics read_intrinsics(std::string_view text) {
  CameraIntrinsics intr;
  bool seen[6] = {};
  static constexpr const char* kKeys[6] = {"fx", "fy", "cx", "cy", "width", "height"};

  for (const TextLine& line : content_lines(text)) {
    const auto toks = split_tokens(line.text);
    if (toks.size() != 2) {
      throw FormatError::at_line("intrinsics: expected 'key value'", line.number);
    }
    int which = -1;
    for (int i = 0; i < 6; ++i) {
      if (toks[0] == kKeys[i]) {
        which = i;
        break;
      }
    }
    if (which < 0) {
      throw FormatError::at_line("intrinsics: unknown key '" + std::string(toks[0]) + "'",
                                 line.number);
    }
    if (seen[which]) {
      throw FormatError::at_line("intrinsics: duplicate key '" + std::string(toks[0]) + "'",
                                 line.number);
    }
    seen[which] = true;
    switch (which) {
      case 0: intr.fx = parse_double(toks[1], line.number, "intrinsics fx"); break;
      case 1: intr.fy = parse_double(toks[1], line.number, "intrinsics fy"); break;
      case 2: intr.cx = parse_double(toks[1], line.number, "intrinsics cx"); break;
      case 3: intr.cy = parse_double(toks[1], line.number, "intrinsics cy"); break;
      case 4: intr.width = static_cast<int>(parse_int(toks[1], line.number, "intrinsics width")); break;
      case 5: intr.height = static_cast<int>(parse_int(toks[1], line.number, "intrinsics height")); break;
    }
  }
  for (int i = 0; i < 6; ++i) {
    if (!seen[i]) {
      throw FormatError("intrinsics: missing key '" + std::string(kKeys[i]) + "'");
    }
  }
  try {
    intr.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("intrinsics: ") + e.what());
  }
  return intr;
}

std::string write_intrinsics(const CameraIntrinsics& intr) {
  std::string out;
  out += "fx " + format_double(intr.fx) + "\n";
  out += "fy " + format_double(intr.fy) + "\n";
  out += "cx " + format_double(intr.cx) + "\n";
  out += "cy " + format_double(intr.cy) + "\n";
  out += "width " + std::to_string(intr.width) + "\n";
  out += "height " + std::to_string(intr.height) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Pose track

std::vector<Pose> read_pose_track(std::string_view text) {
  std::vector<Pose> poses;
  for (const TextLine& line : content_lines(text)) {
    const auto toks = split_tokens(line.text);
    if (toks.size() != 12) {
      throw FormatError::at_line("pose track: expected 12 values per pose", line.number);
    }
    double v[12];
    for (int i = 0; i < 12; ++i) {
      v[i] = parse_double(toks[static_cast<std::size_t>(i)], line.number, "pose value");
    }
    Mat3 r;
    r << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
    const Vec3 t(v[3], v[7], v[11]);

    const double max_dev = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (max_dev > 1e-4) {
      throw FormatError::at_line("pose track: rotation not orthonormal within 1e-4", line.number);
    }
    if (r.determinant() <= 0.0) {
      throw FormatError::at_line("pose track: rotation is a reflection (negative determinant)",
                                 line.number);
    }
    // Re-orthonormalize so downstream math sees an exact rotation: two
    // Gram-Schmidt steps, third column forced by the right-hand rule.
    const Vec3 c0 = r.col(0).normalized();
    const Vec3 c1 = (r.col(1) - r.col(1).dot(c0) * c0).normalized();
    const Vec3 c2 = c0.cross(c1);

    Pose pose;
    pose.rotation.col(0) = c0;
    pose.rotation.col(1) = c1;
    pose.rotation.col(2) = c2;
    pose.translation = t;
    poses.push_back(pose);
  }
  return poses;
}

std::string write_pose_track(const std::vector<Pose>& poses) {
  std::string out;
  for (const Pose& p : poses) {
    for (int row = 0; row < 3; ++row) {
      if (row > 0) {
        out += "  ";
      }
      out += format_double(p.rotation(row, 0)) + " " + format_double(p.rotation(row, 1)) + " " +
             format_double(p.rotation(row, 2)) + " " + format_double(p.translation(row));
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

CaptureManifest read_manifest(std::string_view text) {
  CaptureManifest manifest;
  for (const TextLine& line : content_lines(text)) {
    const auto toks = split_tokens(line.text);
    if (toks.size() < 3) {
      throw FormatError::at_line("manifest: expected 'index timestamp key=value...'",
                                 line.number);
    }
    FrameEntry entry;
    entry.index = parse_int(toks[0], line.number, "manifest frame index");
    entry.timestamp_s = parse_double(toks[1], line.number, "manifest timestamp");

    bool have_pose = false;
    for (std::size_t i = 2; i < toks.size(); ++i) {
      const std::string_view tok = toks[i];
      const std::size_t eq = tok.find('=');
      if (eq == std::string_view::npos || eq == 0 || eq + 1 >= tok.size()) {
        throw FormatError::at_line("manifest: expected key=value, got '" + std::string(tok) + "'",
                                   line.number);
      }
      const std::string_view key = tok.substr(0, eq);
      const std::string_view val = tok.substr(eq + 1);
      std::string* dest = nullptr;
      if (key == "depth_l") {
        dest = &entry.depth_lidar_path;
      } else if (key == "depth_t") {
        dest = &entry.depth_truedepth_path;
      } else if (key == "conf_l") {
        dest = &entry.conf_lidar_path;
      } else if (key == "conf_t") {
        dest = &entry.conf_truedepth_path;
      } else if (key == "color") {
        dest = &entry.color_path;
      } else if (key == "pose") {
        if (have_pose) {
          throw FormatError::at_line("manifest: duplicate pose=", line.number);
        }
        entry.pose_line = parse_int(val, line.number, "manifest pose line");
        if (entry.pose_line < 0) {
          throw FormatError::at_line("manifest: pose line must be >= 0", line.number);
        }
        have_pose = true;
        continue;
      } else {
        throw FormatError::at_line("manifest: unknown key '" + std::string(key) + "'",
                                   line.number);
      }
      if (!dest->empty()) {
        throw FormatError::at_line("manifest: duplicate key '" + std::string(key) + "'",
                                   line.number);
      }
      *dest = std::string(val);
    }
    if (entry.depth_lidar_path.empty()) {
      throw FormatError::at_line("manifest: missing depth_l=", line.number);
    }
    if (!have_pose) {
      throw FormatError::at_line("manifest: missing pose=", line.number);
    }
    if (!manifest.frames.empty()) {
      if (entry.index <= manifest.frames.back().index) {
        throw FormatError::at_line("manifest: frame indices must increase strictly", line.number);
      }
      if (entry.timestamp_s < manifest.frames.back().timestamp_s) {
        throw FormatError::at_line("manifest: timestamps must not decrease", line.number);
      }
    }
    manifest.frames.push_back(std::move(entry));
  }
  return manifest;
}

std::string write_manifest(const CaptureManifest& manifest) {
  std::string out;
  for (const FrameEntry& e : manifest.frames) {
    out += std::to_string(e.index) + " " + format_double(e.timestamp_s);
    out += " depth_l=" + e.depth_lidar_path;
    if (!e.depth_truedepth_path.empty()) {
      out += " depth_t=" + e.depth_truedepth_path;
    }
    if (!e.conf_lidar_path.empty()) {
      out += " conf_l=" + e.conf_lidar_path;
    }
    if (!e.conf_truedepth_path.empty()) {
      out += " conf_t=" + e.conf_truedepth_path;
    }
    if (!e.color_path.empty()) {
      out += " color=" + e.color_path;
    }
    out += " pose=" + std::to_string(e.pose_line) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conv stack weights

SrcnnWeights read_srcnn_weights(const Bytes& bytes) {
  ByteReader r(bytes);
  r.expect_magic("SRW1", "weights file");
  const std::uint32_t n_layers = r.u32le("weights layer count");
  SrcnnWeights weights;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    const std::size_t header_at = r.offset();
    ConvLayer layer;
    layer.out_channels = static_cast<int>(r.u32le("layer out_channels"));
    layer.in_channels = static_cast<int>(r.u32le("layer in_channels"));
    layer.kernel_h = static_cast<int>(r.u32le("layer kernel_h"));
    layer.kernel_w = static_cast<int>(r.u32le("layer kernel_w"));
    if (layer.out_channels <= 0 || layer.in_channels <= 0 || layer.kernel_h <= 0 ||
        layer.kernel_w <= 0) {
      throw FormatError::at_offset("weights file: layer dimensions must be positive", header_at);
    }
    // Guard the element count against both truncation and overflow before
    // allocating: it can never exceed the remaining f32 payload.
    const std::uint64_t budget = r.remaining() / 4;
    std::uint64_t count = static_cast<std::uint64_t>(layer.out_channels);
    for (const int dim : {layer.in_channels, layer.kernel_h, layer.kernel_w}) {
      count *= static_cast<std::uint64_t>(dim);
      if (count > budget) {
        throw FormatError::at_offset("weights file: truncated weight payload", r.offset());
      }
    }
    layer.weights.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      layer.weights[i] = r.f32le("layer weight");
    }
    layer.biases.resize(static_cast<std::size_t>(layer.out_channels));
    for (int i = 0; i < layer.out_channels; ++i) {
      layer.biases[static_cast<std::size_t>(i)] = r.f32le("layer bias");
    }
    weights.layers.push_back(std::move(layer));
  }
  r.done("weights file");
  try {
    weights.validate();
  } catch (const DomainError& e) {
    throw FormatError(std::string("weights file: ") + e.what());
  }
  return weights;
}

Bytes write_srcnn_weights(const SrcnnWeights& weights) {
  weights.validate();
  Bytes out;
  out.insert(out.end(), {'S', 'R', 'W', '1'});
  put_u32le(out, static_cast<std::uint32_t>(weights.layers.size()));
  for (const ConvLayer& l : weights.layers) {
    put_u32le(out, static_cast<std::uint32_t>(l.out_channels));
    put_u32le(out, static_cast<std::uint32_t>(l.in_channels));
    put_u32le(out, static_cast<std::uint32_t>(l.kernel_h));
    put_u32le(out, static_cast<std::uint32_t>(l.kernel_w));
    for (const double w : l.weights) {
      put_f32le(out, static_cast<float>(w));
    }
    for (const double b : l.biases) {
      put_f32le(out, static_cast<float>(b));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PLY

namespace {

constexpr const char* kPlyProperties[6] = {
    "property float x",    "property float y",    "property float z",
    "property uchar red",  "property uchar green", "property uchar blue",
};

}  // namespace

std::string write_ply(const PointCloud& cloud) {
  cloud.validate();
  std::string out = "ply\nformat ascii 1.0\nelement vertex " +
                    std::to_string(cloud.points.size()) + "\n";
  for (const char* prop : kPlyProperties) {
    out += prop;
    out += "\n";
  }
  out += "end_header\n";
  const bool colored = !cloud.colors.empty();
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const Color8 c = colored ? cloud.colors[i] : Color8{255, 255, 255};
    out += format_fixed6(p.x()) + " " + format_fixed6(p.y()) + " " + format_fixed6(p.z()) + " " +
           std::to_string(c.r) + " " + std::to_string(c.g) + " " + std::to_string(c.b) + "\n";
  }
  return out;
}

PointCloud read_ply(std::string_view text) {
  const auto lines = raw_lines(text);
  const auto expect = [&](std::size_t idx, std::string_view want) {
    if (idx >= lines.size() || lines[idx] != want) {
      throw FormatError::at_line("ply: expected '" + std::string(want) + "'",
                                 static_cast<int>(idx + 1));
    }
  };
  expect(0, "ply");
  expect(1, "format ascii 1.0");
  if (lines.size() < 3 || lines[2].rfind("element vertex ", 0) != 0) {
    throw FormatError::at_line("ply: expected 'element vertex N'", 3);
  }
  const std::int64_t n = parse_int(lines[2].substr(15), 3, "ply vertex count");
  if (n < 0) {
    throw FormatError::at_line("ply: vertex count must be >= 0", 3);
  }
  for (std::size_t i = 0; i < 6; ++i) {
    expect(3 + i, kPlyProperties[i]);
  }
  expect(9, "end_header");

  PointCloud cloud;
  cloud.frame = Frame::kWorld;
  const std::size_t plausible = std::min<std::size_t>(static_cast<std::size_t>(n), lines.size());
  cloud.points.reserve(plausible);
  cloud.colors.reserve(plausible);
  std::size_t idx = 10;
  for (std::int64_t i = 0; i < n; ++i, ++idx) {
    const int line_no = static_cast<int>(idx + 1);
    if (idx >= lines.size()) {
      throw FormatError::at_line("ply: missing vertex line", line_no);
    }
    const auto toks = split_tokens(lines[idx]);
    if (toks.size() != 6) {
      throw FormatError::at_line("ply: expected 6 values per vertex", line_no);
    }
    const double x = parse_double(toks[0], line_no, "ply x");
    const double y = parse_double(toks[1], line_no, "ply y");
    const double z = parse_double(toks[2], line_no, "ply z");
    Color8 c;
    std::uint8_t* channels[3] = {&c.r, &c.g, &c.b};
    for (int ch = 0; ch < 3; ++ch) {
      const std::int64_t v = parse_int(toks[static_cast<std::size_t>(3 + ch)], line_no, "ply color");
      if (v < 0 || v > 255) {
        throw FormatError::at_line("ply: color channel outside [0, 255]", line_no);
      }
      *channels[ch] = static_cast<std::uint8_t>(v);
    }
    cloud.points.emplace_back(x, y, z);
    cloud.colors.push_back(c);
  }
  for (; idx < lines.size(); ++idx) {
    if (!split_tokens(lines[idx]).empty()) {
      throw FormatError::at_line("ply: trailing content after vertex list",
                                 static_cast<int>(idx + 1));
    }
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// File helpers

Bytes load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  in.seekg(0, std::ios::end);
  const std::streampos end = in.tellg();
  in.seekg(0, std::ios::beg);
  if (end < 0) {
    throw IoError("cannot read " + path.string());
  }
  Bytes bytes(static_cast<std::size_t>(end));
  if (!bytes.empty() && !in.read(reinterpret_cast<char*>(bytes.data()),
                                 static_cast<std::streamsize>(bytes.size()))) {
    throw IoError("cannot read " + path.string());
  }
  return bytes;
}

std::string load_text(const std::filesystem::path& path) {
  const Bytes bytes = load_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void save_file(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  if (!bytes.empty()) {
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  out.flush();
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
}

void save_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
}

}  // namespace voxrec
