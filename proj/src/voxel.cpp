#include "voxrec/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace voxrec {

namespace {

constexpr std::size_t kInitialCapacity = 1024;
// Grow at 70% load; linear probing degrades quickly past that.
constexpr double kMaxLoad = 0.7;
// Indices outside this range cannot round-trip through int64 safely.
constexpr double kMaxIndex = 4.0e18;

std::int64_t cell_coord(double v, double origin, double size) {
  const double idx = std::floor((v - origin) / size);
  if (!(idx >= -kMaxIndex && idx <= kMaxIndex)) {
    throw DomainError("VoxelGrid: point maps outside the addressable index range");
  }
  return static_cast<std::int64_t>(idx);
}

}  // namespace

Color8 VoxelCell::mean_color() const {
  if (count == 0) {
    return Color8{0, 0, 0};
  }
  const std::uint64_t half = count / 2;
  return Color8{static_cast<std::uint8_t>((sum_r + half) / count),
                static_cast<std::uint8_t>((sum_g + half) / count),
                static_cast<std::uint8_t>((sum_b + half) / count)};
}

VoxelGrid::VoxelGrid(double voxel_size_mm, const Vec3& origin)
    : voxel_size_(voxel_size_mm), origin_(origin) {
  if (!(voxel_size_mm > 0.0) || !std::isfinite(voxel_size_mm)) {
    throw DomainError("VoxelGrid: voxel size must be positive and finite");
  }
  if (!origin.allFinite()) {
    throw DomainError("VoxelGrid: origin must be finite");
  }
  keys_.assign(kInitialCapacity, kEmptyKey);
  payloads_.assign(kInitialCapacity, Payload{0, 0, 0, 0, 0});
  mask_ = kInitialCapacity - 1;
}

VoxelIndex VoxelGrid::index_of(const Vec3& p) const {
  if (!p.allFinite()) {
    throw DomainError("VoxelGrid: point must be finite");
  }
  return VoxelIndex{cell_coord(p.x(), origin_.x(), voxel_size_),
                    cell_coord(p.y(), origin_.y(), voxel_size_),
                    cell_coord(p.z(), origin_.z(), voxel_size_)};
}

std::uint64_t VoxelGrid::pack_key(std::int64_t i, std::int64_t j, std::int64_t k) {
  return (static_cast<std::uint64_t>(i + kIndexSpan) << 42) |
         (static_cast<std::uint64_t>(j + kIndexSpan) << 21) |
         static_cast<std::uint64_t>(k + kIndexSpan);
}

// Same floor-of-quotient as index_of, packed and range checked. The range
// comparisons also reject NaN and infinity, so no separate finite check.
std::uint64_t VoxelGrid::packed_cell(const Vec3& p) const {
  const double span = static_cast<double>(kIndexSpan);
  const double fi = std::floor((p.x() - origin_.x()) / voxel_size_);
  const double fj = std::floor((p.y() - origin_.y()) / voxel_size_);
  const double fk = std::floor((p.z() - origin_.z()) / voxel_size_);
  if (!(fi >= -span && fi < span && fj >= -span && fj < span && fk >= -span && fk < span)) {
    throw DomainError("VoxelGrid: point maps outside the insertable cell range");
  }
  return pack_key(static_cast<std::int64_t>(fi), static_cast<std::int64_t>(fj),
                  static_cast<std::int64_t>(fk));
}

std::uint64_t VoxelGrid::hash_key(std::uint64_t packed) {
  std::uint64_t h = packed;
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ull;
  h ^= h >> 33;
  return h;
}

std::size_t VoxelGrid::probe(std::uint64_t packed) const {
  std::size_t idx = static_cast<std::size_t>(hash_key(packed)) & mask_;
  while (keys_[idx] != packed && keys_[idx] != kEmptyKey) {
    idx = (idx + 1) & mask_;
  }
  return idx;
}

void VoxelGrid::grow() {
  std::vector<std::uint64_t> old_keys = std::move(keys_);
  std::vector<Payload> old_payloads = std::move(payloads_);
  const std::size_t new_cap = (mask_ + 1) * 2;
  keys_.assign(new_cap, kEmptyKey);
  payloads_.assign(new_cap, Payload{0, 0, 0, 0, 0});
  mask_ = new_cap - 1;
  for (std::size_t n = 0; n < old_keys.size(); ++n) {
    if (old_keys[n] == kEmptyKey) {
      continue;
    }
    std::size_t idx = static_cast<std::size_t>(hash_key(old_keys[n])) & mask_;
    while (keys_[idx] != kEmptyKey) {
      idx = (idx + 1) & mask_;
    }
    keys_[idx] = old_keys[n];
    payloads_[idx] = old_payloads[n];
  }
}

std::size_t VoxelGrid::locate_or_create(std::uint64_t packed) {
  std::size_t idx = probe(packed);
  if (keys_[idx] == kEmptyKey) {
    if (static_cast<double>(size_ + 1) > static_cast<double>(mask_ + 1) * kMaxLoad) {
      grow();
      idx = probe(packed);
    }
    keys_[idx] = packed;
    ++size_;
  }
  return idx;
}

void VoxelGrid::insert(const Vec3& p, const Color8& color) {
  const std::uint64_t packed = packed_cell(p);
  ++batch_;
  Payload& pl = payloads_[locate_or_create(packed)];
  pl.count += 1;
  pl.sum_r += color.r;
  pl.sum_g += color.g;
  pl.sum_b += color.b;
  pl.stamp = batch_;
  ++total_points_;
}

InsertStats VoxelGrid::insert_cloud(const PointCloud& cloud) {
  if (!cloud.colors.empty() && cloud.colors.size() != cloud.points.size()) {
    throw ShapeError("VoxelGrid: color list does not match point list");
  }
  const std::size_t n_points = cloud.points.size();
  // Resolve every cell before touching the table so a bad point aborts
  // the whole batch instead of leaving it half applied.
  scratch_.resize(n_points);
  for (std::size_t n = 0; n < n_points; ++n) {
    scratch_[n] = packed_cell(cloud.points[n]);
  }

  ++batch_;
  InsertStats stats;
  stats.points_in = n_points;
  const bool colored = !cloud.colors.empty();
  const Color8 white{255, 255, 255};
  // Consecutive pixels usually land in the same cell; reuse the last slot
  // to skip the hash probe. A cached hit is never a first touch and the
  // table cannot grow under it, so the index stays valid.
  std::uint64_t last_packed = kEmptyKey;
  std::size_t last_idx = 0;
  for (std::size_t n = 0; n < n_points; ++n) {
    const std::uint64_t packed = scratch_[n];
    const Color8 c = colored ? cloud.colors[n] : white;
    if (packed != last_packed) {
      last_idx = locate_or_create(packed);
      last_packed = packed;
      Payload& pl = payloads_[last_idx];
      if (pl.stamp != batch_) {
        pl.stamp = batch_;
        ++stats.cells_touched;
      }
    }
    Payload& pl = payloads_[last_idx];
    pl.count += 1;
    pl.sum_r += c.r;
    pl.sum_g += c.g;
    pl.sum_b += c.b;
    ++total_points_;
  }
  return stats;
}

std::optional<VoxelCell> VoxelGrid::find(const VoxelIndex& idx) const {
  if (idx.i < -kIndexSpan || idx.i >= kIndexSpan || idx.j < -kIndexSpan ||
      idx.j >= kIndexSpan || idx.k < -kIndexSpan || idx.k >= kIndexSpan) {
    return std::nullopt;
  }
  const std::size_t at = probe(pack_key(idx.i, idx.j, idx.k));
  if (keys_[at] == kEmptyKey) {
    return std::nullopt;
  }
  const Payload& pl = payloads_[at];
  return VoxelCell{pl.count, pl.sum_r, pl.sum_g, pl.sum_b};
}

PointCloud VoxelGrid::to_cloud() const {
  std::vector<std::uint64_t> occupied;
  occupied.reserve(size_);
  for (std::size_t n = 0; n < keys_.size(); ++n) {
    if (keys_[n] != kEmptyKey) {
      occupied.push_back(keys_[n]);
    }
  }
  // Packed keys hold k in the low bits, then j, then i, all with the same
  // offset, so unsigned key order is exactly ascending (i, j, k); sort on
  // the swizzled key to get ascending (k, j, i).
  std::sort(occupied.begin(), occupied.end(), [](std::uint64_t a, std::uint64_t b) {
    const auto swizzle = [](std::uint64_t key) {
      const std::uint64_t m = (std::uint64_t{1} << 21) - 1;
      return ((key & m) << 42) | (key & (m << 21)) | (key >> 42);
    };
    return swizzle(a) < swizzle(b);
  });

  PointCloud cloud;
  cloud.frame = Frame::kWorld;
  cloud.points.reserve(occupied.size());
  cloud.colors.reserve(occupied.size());
  const std::uint64_t m = (std::uint64_t{1} << 21) - 1;
  for (std::uint64_t key : occupied) {
    const std::int64_t i = static_cast<std::int64_t>((key >> 42) & m) - kIndexSpan;
    const std::int64_t j = static_cast<std::int64_t>((key >> 21) & m) - kIndexSpan;
    const std::int64_t k = static_cast<std::int64_t>(key & m) - kIndexSpan;
    cloud.points.emplace_back(origin_.x() + (static_cast<double>(i) + 0.5) * voxel_size_,
                              origin_.y() + (static_cast<double>(j) + 0.5) * voxel_size_,
                              origin_.z() + (static_cast<double>(k) + 0.5) * voxel_size_);
    const std::size_t at = probe(key);
    const Payload& pl = payloads_[at];
    cloud.colors.push_back(VoxelCell{pl.count, pl.sum_r, pl.sum_g, pl.sum_b}.mean_color());
  }
  return cloud;
}

void TriangleMesh::validate() const {
  for (const Vec3& v : vertices) {
    if (!v.allFinite()) {
      throw DomainError("TriangleMesh: vertices must be finite");
    }
  }
  const int n = static_cast<int>(vertices.size());
  for (const auto& t : triangles) {
    for (int idx : t) {
      if (idx < 0 || idx >= n) {
        throw DomainError("TriangleMesh: triangle index " + std::to_string(idx) +
                          " out of range");
      }
    }
  }
  if (!vertex_colors.empty() && vertex_colors.size() != vertices.size()) {
    throw DomainError("TriangleMesh: vertex color list does not match vertex list");
  }
}

namespace {

Color8 lerp_color(const Color8& a, const Color8& b, const Color8& c, double u, double v) {
  const double w0 = 1.0 - u - v;
  const auto mix = [&](double ca, double cb, double cc) {
    const double m = w0 * ca + u * cb + v * cc;
    return static_cast<std::uint8_t>(std::clamp(std::llround(m), 0ll, 255ll));
  };
  return Color8{mix(a.r, b.r, c.r), mix(a.g, b.g, c.g), mix(a.b, b.b, c.b)};
}

}  // namespace

VoxelGrid voxelize_mesh(const TriangleMesh& mesh, double voxel_size_mm, const Vec3& origin) {
  mesh.validate();
  VoxelGrid grid(voxel_size_mm, origin);
  const double step = voxel_size_mm / 2.0;
  const Color8 white{255, 255, 255};

  for (const auto& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const Color8 ca = mesh.vertex_colors.empty() ? white
                                                 : mesh.vertex_colors[static_cast<std::size_t>(tri[0])];
    const Color8 cb = mesh.vertex_colors.empty() ? white
                                                 : mesh.vertex_colors[static_cast<std::size_t>(tri[1])];
    const Color8 cc = mesh.vertex_colors.empty() ? white
                                                 : mesh.vertex_colors[static_cast<std::size_t>(tri[2])];

    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    if (e1.cross(e2).norm() == 0.0) {
      grid.insert(a, ca);
      grid.insert(b, cb);
      grid.insert(c, cc);
      continue;
    }

    const std::int64_t n1 = std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                                          std::ceil(e1.norm() / step)));
    const std::int64_t n2 = std::max<std::int64_t>(1, static_cast<std::int64_t>(
                                                          std::ceil(e2.norm() / step)));
    const std::int64_t limit = n1 * n2;
    for (std::int64_t ia = 0; ia <= n1; ++ia) {
      // ia/n1 + ib/n2 <= 1 kept in integers so the hypotenuse is exact.
      const std::int64_t ib_max = (limit - ia * n2) / n1;
      const double u = static_cast<double>(ia) / static_cast<double>(n1);
      for (std::int64_t ib = 0; ib <= ib_max; ++ib) {
        const double v = static_cast<double>(ib) / static_cast<double>(n2);
        grid.insert(a + u * e1 + v * e2, lerp_color(ca, cb, cc, u, v));
      }
    }
  }
  return grid;
}

InsertStats composite_background(VoxelGrid& grid, const DepthFrame& depth,
                                 const ColorFrame& color, const MaskFrame* mask,
                                 std::optional<double> depth_threshold_mm,
                                 const CameraIntrinsics& intr, const Pose& pose) {
  if ((mask == nullptr) == !depth_threshold_mm.has_value()) {
    throw ConfigError("composite_background: supply exactly one of mask or depth threshold");
  }
  if (depth.width != color.width || depth.height != color.height) {
    throw ShapeError("composite_background: depth and color dimensions do not match");
  }
  if (mask != nullptr && (mask->width != depth.width || mask->height != depth.height)) {
    throw ShapeError("composite_background: mask dimensions do not match");
  }
  if (intr.width != depth.width || intr.height != depth.height) {
    throw ShapeError("composite_background: intrinsics do not match frame dimensions");
  }
  pose.validate();

  PointCloud cloud;
  cloud.frame = Frame::kWorld;
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const std::size_t at = static_cast<std::size_t>(v) * depth.width + u;
      const float d = depth.samples[at];
      if (d == 0.0f) {
        continue;
      }
      const bool background =
          mask != nullptr ? mask->values[at] == 0 : d > *depth_threshold_mm;
      if (!background) {
        continue;
      }
      const Vec3 p = unproject_pixel(
          intr, PixelCoord{static_cast<double>(u), static_cast<double>(v)}, d);
      cloud.points.push_back(transform_point(pose, p));
      cloud.colors.push_back(color.pixels[at]);
    }
  }
  return grid.insert_cloud(cloud);
}

}  // namespace voxrec
