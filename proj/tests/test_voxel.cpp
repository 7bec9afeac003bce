#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "voxrec/voxel.hpp"

using namespace voxrec;

TEST_CASE("index_of floors into half-open cells") {
  const VoxelGrid grid(10.0, Vec3::Zero());
  CHECK(grid.index_of(Vec3(0.0, 0.0, 0.0)) == VoxelIndex{0, 0, 0});
  CHECK(grid.index_of(Vec3(-1.0, 9.99, 20.0)) == VoxelIndex{-1, 0, 2});
  CHECK(grid.index_of(Vec3(10.0, 0.0, 0.0)) == VoxelIndex{1, 0, 0});
  CHECK_THROWS_AS(grid.index_of(Vec3(std::nan(""), 0.0, 0.0)), DomainError);
}

TEST_CASE("index_of honors a shifted origin") {
  const VoxelGrid grid(5.0, Vec3(100.0, -50.0, 0.0));
  CHECK(grid.index_of(Vec3(100.0, -50.0, 0.0)) == VoxelIndex{0, 0, 0});
  CHECK(grid.index_of(Vec3(99.0, -51.0, 4.9)) == VoxelIndex{-1, -1, 0});
}

TEST_CASE("grid construction validates size and origin") {
  CHECK_THROWS_AS(VoxelGrid(0.0, Vec3::Zero()), DomainError);
  CHECK_THROWS_AS(VoxelGrid(-5.0, Vec3::Zero()), DomainError);
  CHECK_THROWS_AS(VoxelGrid(5.0, Vec3(std::nan(""), 0.0, 0.0)), DomainError);
}

TEST_CASE("insert accumulates counts and rounded color means") {
  VoxelGrid grid(10.0, Vec3::Zero());
  grid.insert(Vec3(1.0, 1.0, 1.0), Color8{0, 0, 0});
  CHECK(grid.occupied_cells() == 1);
  grid.insert(Vec3(9.0, 9.0, 9.0), Color8{255, 255, 255});
  CHECK(grid.occupied_cells() == 1);
  CHECK(grid.total_points() == 2);

  const auto cell = grid.find(VoxelIndex{0, 0, 0});
  REQUIRE(cell.has_value());
  CHECK(cell->count == 2);
  CHECK(cell->sum_r == 255);
  CHECK(cell->mean_color() == Color8{128, 128, 128});  // half rounds up

  grid.insert(Vec3(11.0, 0.0, 0.0), Color8{10, 20, 30});
  CHECK(grid.occupied_cells() == 2);
  CHECK_FALSE(grid.find(VoxelIndex{5, 5, 5}).has_value());
}

TEST_CASE("insert rejects points outside the insertable span") {
  VoxelGrid grid(5.0, Vec3::Zero());
  // 2^20 cells of 5 mm is about 5.2 km; 6e9 mm lands far beyond it.
  CHECK_THROWS_AS(grid.insert(Vec3(6.0e9, 0.0, 0.0), Color8{}), DomainError);
  CHECK(grid.occupied_cells() == 0);
  CHECK_FALSE(grid.find(VoxelIndex{2'000'000'000, 0, 0}).has_value());
}

TEST_CASE("insert_cloud reports points and first-touch cells") {
  VoxelGrid grid(10.0, Vec3::Zero());
  const InsertStats none = grid.insert_cloud(PointCloud{});
  CHECK(none.points_in == 0);
  CHECK(none.cells_touched == 0);
  CHECK(grid.occupied_cells() == 0);

  PointCloud same;
  same.points.assign(5, Vec3(3.0, 3.0, 3.0));
  same.colors.assign(5, Color8{100, 100, 100});
  const InsertStats five = grid.insert_cloud(same);
  CHECK(five.points_in == 5);
  CHECK(five.cells_touched == 1);

  // A second batch touches the cell anew.
  const InsertStats again = grid.insert_cloud(same);
  CHECK(again.cells_touched == 1);
  CHECK(grid.total_points() == 10);
}

TEST_CASE("insert_cloud matches the map-based reference and ignores order") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> coord(-120.0, 120.0);
  std::uniform_int_distribution<int> channel(0, 255);

  PointCloud cloud;
  for (int i = 0; i < 100; ++i) {
    cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
    cloud.colors.push_back(Color8{static_cast<std::uint8_t>(channel(rng)),
                                  static_cast<std::uint8_t>(channel(rng)),
                                  static_cast<std::uint8_t>(channel(rng))});
  }

  const double size = 7.0;
  const Vec3 origin(-3.0, 2.0, 0.5);
  const auto reference = testutil::accumulate_reference(cloud, size, origin);

  VoxelGrid grid(size, origin);
  const InsertStats stats = grid.insert_cloud(cloud);
  CHECK(stats.points_in == 100);
  CHECK(stats.cells_touched == reference.size());
  CHECK(grid.occupied_cells() == reference.size());

  for (const auto& [key, sums] : reference) {
    const auto cell = grid.find(VoxelIndex{key[0], key[1], key[2]});
    REQUIRE(cell.has_value());
    CHECK(cell->count == sums.count);
    CHECK(cell->sum_r == sums.r);
    CHECK(cell->sum_g == sums.g);
    CHECK(cell->sum_b == sums.b);
    CHECK(cell->mean_color() == testutil::mean_reference(sums));
  }

  // Shuffled insertion produces the identical grid.
  std::vector<std::size_t> order(cloud.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::shuffle(order.begin(), order.end(), rng);
  PointCloud mixed;
  for (std::size_t i : order) {
    mixed.points.push_back(cloud.points[i]);
    mixed.colors.push_back(cloud.colors[i]);
  }
  VoxelGrid shuffled(size, origin);
  shuffled.insert_cloud(mixed);
  const PointCloud a = grid.to_cloud();
  const PointCloud b = shuffled.to_cloud();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points[i] == b.points[i]);
    CHECK(a.colors[i] == b.colors[i]);
  }
}

TEST_CASE("insert_cloud validates shapes and aborts without partial batches") {
  VoxelGrid grid(10.0, Vec3::Zero());
  PointCloud bad;
  bad.points.assign(3, Vec3(1.0, 1.0, 1.0));
  bad.colors.assign(2, Color8{});
  CHECK_THROWS_AS(grid.insert_cloud(bad), ShapeError);
  CHECK(grid.occupied_cells() == 0);

  PointCloud poisoned;
  poisoned.points.emplace_back(1.0, 1.0, 1.0);  // insertable
  poisoned.points.emplace_back(std::nan(""), 0.0, 0.0);
  CHECK_THROWS_AS(grid.insert_cloud(poisoned), DomainError);
  CHECK(grid.occupied_cells() == 0);
  CHECK(grid.total_points() == 0);
}

TEST_CASE("the table rehashes correctly past its initial capacity") {
  VoxelGrid grid(1.0, Vec3::Zero());
  const int n = 3000;
  for (int i = 0; i < n; ++i) {
    grid.insert(Vec3(static_cast<double>(i) + 0.5, 0.5, 0.5), Color8{1, 2, 3});
  }
  CHECK(grid.occupied_cells() == static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto cell = grid.find(VoxelIndex{i, 0, 0});
    REQUIRE(cell.has_value());
    CHECK(cell->count == 1);
  }
}

TEST_CASE("to_cloud emits cell centers in ascending (k, j, i) order") {
  VoxelGrid grid(10.0, Vec3::Zero());
  CHECK(grid.to_cloud().empty());

  grid.insert(Vec3(1.0, 2.0, 3.0), Color8{9, 9, 9});
  const PointCloud one = grid.to_cloud();
  REQUIRE(one.size() == 1);
  CHECK(one.points[0] == Vec3(5.0, 5.0, 5.0));
  CHECK(one.colors[0] == Color8{9, 9, 9});

  grid.insert(Vec3(1.0, 2.0, 13.0), Color8{});
  grid.insert(Vec3(11.0, 2.0, 3.0), Color8{});
  grid.insert(Vec3(1.0, 12.0, 3.0), Color8{});
  const PointCloud cloud = grid.to_cloud();
  REQUIRE(cloud.size() == 4);
  // (k, j, i) ascending: (0,0,0), (0,0,1), (0,1,0), (1,0,0).
  CHECK(cloud.points[0] == Vec3(5.0, 5.0, 5.0));
  CHECK(cloud.points[1] == Vec3(15.0, 5.0, 5.0));
  CHECK(cloud.points[2] == Vec3(5.0, 15.0, 5.0));
  CHECK(cloud.points[3] == Vec3(5.0, 5.0, 15.0));
}

TEST_CASE("to_cloud agrees with the reference accumulation") {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> coord(-40.0, 40.0);
  PointCloud cloud;
  for (int i = 0; i < 50; ++i) {
    cloud.points.emplace_back(coord(rng), coord(rng), coord(rng));
    cloud.colors.push_back(Color8{static_cast<std::uint8_t>(rng() % 256),
                                  static_cast<std::uint8_t>(rng() % 256),
                                  static_cast<std::uint8_t>(rng() % 256)});
  }
  const double size = 4.0;
  const Vec3 origin = Vec3::Zero();
  VoxelGrid grid(size, origin);
  grid.insert_cloud(cloud);

  const auto reference = testutil::accumulate_reference(cloud, size, origin);
  const PointCloud out = grid.to_cloud();
  REQUIRE(out.size() == reference.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto key = testutil::cell_key_reference(out.points[i], size, origin);
    const auto it = reference.find(key);
    REQUIRE(it != reference.end());
    CHECK(out.colors[i] == testutil::mean_reference(it->second));
    const Vec3 center(origin.x() + (key[0] + 0.5) * size, origin.y() + (key[1] + 0.5) * size,
                      origin.z() + (key[2] + 0.5) * size);
    CHECK((out.points[i] - center).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("voxelize_mesh covers vertices and small triangles stay in one cell") {
  TriangleMesh tiny;
  tiny.vertices = {Vec3(1.0, 1.0, 1.0), Vec3(2.0, 1.0, 1.0), Vec3(1.0, 2.0, 1.0)};
  tiny.triangles = {{0, 1, 2}};
  const VoxelGrid one = voxelize_mesh(tiny, 10.0, Vec3::Zero());
  CHECK(one.occupied_cells() == 1);
  CHECK(one.find(VoxelIndex{0, 0, 0}).has_value());

  CHECK(voxelize_mesh(TriangleMesh{}, 10.0, Vec3::Zero()).occupied_cells() == 0);

  TriangleMesh degenerate;
  degenerate.vertices = {Vec3(0.0, 0.0, 0.0), Vec3(50.0, 0.0, 0.0), Vec3(100.0, 0.0, 0.0)};
  degenerate.triangles = {{0, 1, 2}};
  const VoxelGrid line = voxelize_mesh(degenerate, 10.0, Vec3::Zero());
  CHECK(line.occupied_cells() == 3);  // zero-area triangles sample vertices only
  CHECK(line.find(VoxelIndex{5, 0, 0}).has_value());
}

TEST_CASE("voxelize_mesh matches a dense rasterization within one voxel") {
  const double size = 5.0;
  TriangleMesh mesh;
  mesh.vertices = {Vec3(0.0, 0.0, 0.0), Vec3(50.0, 0.0, 0.0), Vec3(0.0, 50.0, 0.0)};
  mesh.triangles = {{0, 1, 2}};
  const VoxelGrid grid = voxelize_mesh(mesh, size, Vec3::Zero());

  for (const Vec3& v : mesh.vertices) {
    CHECK(grid.find(grid.index_of(v)).has_value());
  }

  // Dense barycentric sampling: every sampled surface point must sit within
  // Chebyshev distance 1 of an occupied cell.
  const int n = 200;
  for (int a = 0; a <= n; ++a) {
    for (int b = 0; b <= n - a; ++b) {
      const double u = static_cast<double>(a) / n;
      const double w = static_cast<double>(b) / n;
      const Vec3 p = mesh.vertices[0] + u * (mesh.vertices[1] - mesh.vertices[0]) +
                     w * (mesh.vertices[2] - mesh.vertices[0]);
      const VoxelIndex at = grid.index_of(p);
      bool near = false;
      for (std::int64_t di = -1; di <= 1 && !near; ++di) {
        for (std::int64_t dj = -1; dj <= 1 && !near; ++dj) {
          for (std::int64_t dk = -1; dk <= 1 && !near; ++dk) {
            near = grid.find(VoxelIndex{at.i + di, at.j + dj, at.k + dk}).has_value();
          }
        }
      }
      CHECK(near);
    }
  }
}

TEST_CASE("voxelize_mesh interpolates vertex colors") {
  TriangleMesh mesh;
  mesh.vertices = {Vec3(0.0, 0.0, 0.0), Vec3(100.0, 0.0, 0.0), Vec3(0.0, 100.0, 0.0)};
  mesh.triangles = {{0, 1, 2}};
  mesh.vertex_colors = {Color8{255, 0, 0}, Color8{0, 255, 0}, Color8{0, 0, 255}};
  const VoxelGrid grid = voxelize_mesh(mesh, 10.0, Vec3::Zero());

  const auto corner = grid.find(grid.index_of(Vec3(100.0, 0.0, 0.0)));
  REQUIRE(corner.has_value());
  const Color8 c = corner->mean_color();
  CHECK(c.g > 200);  // the far corner is dominated by the green vertex
  CHECK(c.r < 60);

  TriangleMesh bad = mesh;
  bad.triangles = {{0, 1, 7}};
  CHECK_THROWS_AS(voxelize_mesh(bad, 10.0, Vec3::Zero()), DomainError);
}

TEST_CASE("composite_background inserts exactly the background pixels") {
  const CameraIntrinsics intr{100.0, 100.0, 1.5, 1.5, 4, 4};
  DepthFrame depth = DepthFrame::constant(4, 4, 1000.0f);
  depth.at(0, 0) = 0.0f;  // invalid pixels never insert
  const ColorFrame color = ColorFrame::constant(4, 4, Color8{50, 60, 70});

  VoxelGrid untouched(5.0, Vec3::Zero());
  const MaskFrame all_fg = MaskFrame::constant(4, 4, 1);
  const InsertStats none =
      composite_background(untouched, depth, color, &all_fg, std::nullopt, intr, Pose::identity());
  CHECK(none.points_in == 0);
  CHECK(untouched.occupied_cells() == 0);

  VoxelGrid full(5.0, Vec3::Zero());
  const InsertStats everything =
      composite_background(full, depth, color, nullptr, 0.0, intr, Pose::identity());
  CHECK(everything.points_in == 15);  // all valid pixels exceed a zero threshold

  MaskFrame half = MaskFrame::constant(4, 4, 1);
  for (int y = 2; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      half.values[static_cast<std::size_t>(y) * 4 + x] = 0;
    }
  }
  VoxelGrid lower(5.0, Vec3::Zero());
  const InsertStats bottom =
      composite_background(lower, depth, color, &half, std::nullopt, intr, Pose::identity());
  CHECK(bottom.points_in == 8);

  // The inserted set equals the per-pixel classification done by hand.
  PointCloud expect;
  for (int y = 2; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      expect.points.push_back(unproject_pixel(intr, PixelCoord{static_cast<double>(x),
                                                               static_cast<double>(y)},
                                              1000.0));
      expect.colors.push_back(Color8{50, 60, 70});
    }
  }
  const auto reference = testutil::accumulate_reference(expect, 5.0, Vec3::Zero());
  CHECK(lower.occupied_cells() == reference.size());
  for (const auto& [key, sums] : reference) {
    const auto cell = lower.find(VoxelIndex{key[0], key[1], key[2]});
    REQUIRE(cell.has_value());
    CHECK(cell->count == sums.count);
  }
}

TEST_CASE("composite_background wants exactly one selector and matching dims") {
  const CameraIntrinsics intr{100.0, 100.0, 1.5, 1.5, 4, 4};
  const DepthFrame depth = DepthFrame::constant(4, 4, 100.0f);
  const ColorFrame color = ColorFrame::constant(4, 4, Color8{});
  const MaskFrame mask = MaskFrame::constant(4, 4, 1);
  VoxelGrid grid(5.0, Vec3::Zero());

  CHECK_THROWS_AS(
      composite_background(grid, depth, color, nullptr, std::nullopt, intr, Pose::identity()),
      ConfigError);
  CHECK_THROWS_AS(
      composite_background(grid, depth, color, &mask, 100.0, intr, Pose::identity()),
      ConfigError);

  const ColorFrame wrong = ColorFrame::constant(3, 4, Color8{});
  CHECK_THROWS_AS(
      composite_background(grid, depth, wrong, &mask, std::nullopt, intr, Pose::identity()),
      ShapeError);
}
