#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "voxrec/error.hpp"
#include "voxrec/frames.hpp"
#include "voxrec/geometry.hpp"

namespace voxrec {

struct VoxelIndex {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t k = 0;

  bool operator==(const VoxelIndex& o) const { return i == o.i && j == o.j && k == o.k; }
  bool operator!=(const VoxelIndex& o) const { return !(*this == o); }
};

// Per-cell accumulator. Colors are kept as integer sums so insertion order
// never changes the stored state; the mean is computed on read.
struct VoxelCell {
  std::uint64_t count = 0;
  std::uint64_t sum_r = 0;
  std::uint64_t sum_g = 0;
  std::uint64_t sum_b = 0;

  // Rounding-half-up integer mean of the accumulated color.
  Color8 mean_color() const;
};

struct InsertStats {
  std::uint64_t points_in = 0;
  std::uint64_t cells_touched = 0;  // distinct cells hit by this batch
};

// Sparse voxel map over half-open cells [i*s, (i+1)*s) per axis. One
// insertion per pixel in the streaming path, so the layout favors probe
// cost: cell indices are packed into 8-byte keys probed in their own
// array (eight candidates per cache line), with the accumulators in a
// parallel payload array touched only on a hit.
//
// Insertable cells span [-2^20, 2^20) per axis around the origin (about
// +/-5 km at the default 5 mm cell); points beyond that are rejected as
// DomainError. index_of itself has no such limit.
class VoxelGrid {
 public:
  VoxelGrid(double voxel_size_mm, const Vec3& origin);

  double voxel_size() const { return voxel_size_; }
  const Vec3& origin() const { return origin_; }

  // Componentwise floor((p - origin) / voxel_size).
  VoxelIndex index_of(const Vec3& p) const;

  void insert(const Vec3& p, const Color8& color);

  // Equivalent to insert() over the cloud in order, but validates the
  // cloud up front so a failure never leaves a partial batch behind.
  InsertStats insert_cloud(const PointCloud& cloud);

  std::size_t occupied_cells() const { return size_; }
  std::uint64_t total_points() const { return total_points_; }

  std::optional<VoxelCell> find(const VoxelIndex& idx) const;

  // One point per occupied cell at the cell center, colored by the cell
  // mean, ordered by ascending (k, j, i).
  PointCloud to_cloud() const;

 private:
  // Cells addressable per axis: index + kIndexSpan must fit in 21 bits.
  static constexpr std::int64_t kIndexSpan = std::int64_t{1} << 20;
  static constexpr std::uint64_t kEmptyKey = ~std::uint64_t{0};

  struct Payload {
    std::uint64_t count;
    std::uint64_t sum_r, sum_g, sum_b;
    std::uint64_t stamp;  // last batch that touched this cell
  };

  static std::uint64_t pack_key(std::int64_t i, std::int64_t j, std::int64_t k);
  static std::uint64_t hash_key(std::uint64_t packed);
  std::size_t probe(std::uint64_t packed) const;
  void grow();
  // Slot index for the cell, claiming a free slot (growing if needed).
  std::size_t locate_or_create(std::uint64_t packed);
  std::uint64_t packed_cell(const Vec3& p) const;

  double voxel_size_;
  Vec3 origin_;
  std::vector<std::uint64_t> keys_;  // kEmptyKey marks a free slot
  std::vector<Payload> payloads_;
  std::vector<std::uint64_t> scratch_;  // per-batch cell keys, reused
  std::size_t mask_ = 0;  // capacity - 1, capacity is a power of two
  std::size_t size_ = 0;
  std::uint64_t total_points_ = 0;
  std::uint64_t batch_ = 0;
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Color8> vertex_colors;  // empty, or parallel to vertices

  // Throws DomainError on out-of-range indices, non-finite vertices, or a
  // color list whose length does not match the vertex list.
  void validate() const;
};

// Samples every triangle on a barycentric lattice with spacing at most
// voxel_size/2 along both edges (vertices always included), so each vertex
// cell is occupied and every surface point lies within one cell of an
// occupied one. Colors are barycentrically interpolated, white when the
// mesh carries none. Zero-area triangles contribute their vertices only.
VoxelGrid voxelize_mesh(const TriangleMesh& mesh, double voxel_size_mm, const Vec3& origin);

// Projects background pixels of a depth/color pair into the grid. A pixel
// is background when the mask is zero there, or, with a threshold instead,
// when its depth exceeds the threshold. Exactly one selector must be
// supplied (ConfigError otherwise); invalid depth never contributes.
InsertStats composite_background(VoxelGrid& grid, const DepthFrame& depth,
                                 const ColorFrame& color, const MaskFrame* mask,
                                 std::optional<double> depth_threshold_mm,
                                 const CameraIntrinsics& intr, const Pose& pose);

}  // namespace voxrec
