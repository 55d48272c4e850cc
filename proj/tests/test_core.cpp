// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cstring>

#include "oracles.hpp"
#include "spc/config.hpp"
#include "spc/ingest.hpp"
#include "spc/rng.hpp"
#include "spc/tensor.hpp"
#include "spc/weights.hpp"

using namespace spc;

namespace {

std::vector<std::byte> bytes_of_floats(std::initializer_list<float> vals) {
  std::vector<std::byte> out;
  for (float v : vals) {
    uint32_t u = std::bit_cast<uint32_t>(v);
    for (int i = 0; i < 4; ++i) out.push_back(std::byte((u >> (8 * i)) & 0xff));
  }
  return out;
}

}  // namespace

TEST_CASE("load_kitti_bin: empty input yields empty cloud") {
  PointCloud c = load_kitti_bin({}, "empty");
  CHECK(c.points.empty());
  CHECK(c.scene_id == "empty");
}

TEST_CASE("load_kitti_bin: one hand-encoded record round-trips") {
  auto raw = bytes_of_floats({1.0f, 2.0f, 3.0f, 0.5f});
  PointCloud c = load_kitti_bin(raw, "one");
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0] == Point{1.0f, 2.0f, 3.0f, 0.5f});
  CHECK(to_kitti_bin(c) == raw);
}

TEST_CASE("load_kitti_bin: misaligned length is a LengthError") {
  std::vector<std::byte> raw(17, std::byte{0});
  CHECK_THROWS_WITH_AS(load_kitti_bin(raw, "bad"), doctest::Contains("multiple of 16"),
                       Error);
  try {
    load_kitti_bin(raw, "bad");
  } catch (const Error& e) {
    CHECK(e.code() == Status::LengthError);
  }
}

TEST_CASE("load_kitti_bin: NaN component is a ValueError, not a silent drop") {
  auto raw = bytes_of_floats({1.0f, std::numeric_limits<float>::quiet_NaN(), 0.f, 0.f});
  try {
    load_kitti_bin(raw, "nan");
    FAIL("expected ValueError");
  } catch (const Error& e) {
    CHECK(e.code() == Status::ValueError);
  }
}

TEST_CASE("load then re-serialize is byte-identical on random clouds") {
  SplitMix64 rng(101);
  Range3D wide{-50.f, -50.f, -10.f, 50.f, 50.f, 10.f};
  for (int round = 0; round < 20; ++round) {
    PointCloud cloud = oracle::random_cloud(rng, rng.next_below(200), wide, "rt");
    auto bytes = to_kitti_bin(cloud);
    PointCloud again = load_kitti_bin(bytes, "rt");
    CHECK(again.points == cloud.points);
    CHECK(to_kitti_bin(again) == bytes);
  }
}

TEST_CASE("filter_range: identity when all points are inside") {
  SplitMix64 rng(7);
  Range3D r{0.f, 0.f, 0.f, 10.f, 10.f, 10.f};
  Range3D inner{1.f, 1.f, 1.f, 9.f, 9.f, 9.f};
  PointCloud cloud = oracle::random_cloud(rng, 64, inner, "inside");
  CHECK(filter_range(cloud, r).points == cloud.points);
}

TEST_CASE("filter_range: max boundary is excluded (half-open)") {
  PointCloud cloud;
  cloud.points = {Point{10.f, 5.f, 5.f, 0.f}, Point{9.999f, 5.f, 5.f, 0.f}};
  Range3D r{0.f, 0.f, 0.f, 10.f, 10.f, 10.f};
  PointCloud out = filter_range(cloud, r);
  REQUIRE(out.points.size() == 1);
  CHECK(out.points[0].x == 9.999f);

  // Min boundary is included.
  PointCloud lo;
  lo.points = {Point{0.f, 0.f, 0.f, 0.f}};
  CHECK(filter_range(lo, r).points.size() == 1);
}

TEST_CASE("filter_range matches the per-point predicate on random clouds") {
  SplitMix64 rng(202);
  Range3D sample{-10.f, -10.f, -10.f, 10.f, 10.f, 10.f};
  Range3D crop{0.f, 0.f, 0.f, 10.f, 10.f, 10.f};
  PointCloud cloud = oracle::random_cloud(rng, 1000, sample, "rand");
  PointCloud out = filter_range(cloud, crop);

  std::vector<Point> expected;
  for (const Point& p : cloud.points) {
    if (p.x >= crop.min_x && p.x < crop.max_x && p.y >= crop.min_y &&
        p.y < crop.max_y && p.z >= crop.min_z && p.z < crop.max_z) {
      expected.push_back(p);
    }
  }
  CHECK(out.points == expected);

  // Idempotent, and the output is a subsequence of the input.
  CHECK(filter_range(out, crop).points == out.points);
  size_t cursor = 0;
  for (const Point& p : out.points) {
    while (cursor < cloud.points.size() && !(cloud.points[cursor] == p)) ++cursor;
    CHECK(cursor < cloud.points.size());
    ++cursor;
  }
}

TEST_CASE("to_canonical: sorted input is unchanged, swapped input is sorted") {
  SparseVoxelTensor t;
  t.spatial_shape = {2, 2, 2};
  t.channels = 1;
  t.coords = {{0, 0, 1}, {0, 0, 0}};
  t.features = {2.f, 1.f};
  SparseVoxelTensor canon = to_canonical(t);
  CHECK(canon.coords == std::vector<Coord3>{{0, 0, 0}, {0, 0, 1}});
  CHECK(canon.features == std::vector<float>{1.f, 2.f});
  CHECK(to_canonical(canon) == canon);  // idempotent
  CHECK(is_canonical(canon));
  CHECK(!is_canonical(t));
}

TEST_CASE("to_canonical matches a sort-by-key oracle on random tensors") {
  SplitMix64 rng(303);
  for (int round = 0; round < 30; ++round) {
    SparseVoxelTensor t = oracle::random_sparse(rng, {8, 8, 8}, 3, 100);
    // Shuffle coords+features together.
    std::vector<size_t> perm(t.nnz());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.next_below(i)]);
    }
    SparseVoxelTensor shuffled = t;
    for (size_t i = 0; i < perm.size(); ++i) {
      shuffled.coords[i] = t.coords[perm[i]];
      for (int32_t ch = 0; ch < t.channels; ++ch) {
        shuffled.features[i * t.channels + ch] = t.feature(perm[i])[ch];
      }
    }
    CHECK(to_canonical(shuffled) == t);
  }
}

TEST_CASE("to_canonical rejects duplicates and out-of-bounds coords") {
  SparseVoxelTensor dup;
  dup.spatial_shape = {2, 2, 2};
  dup.channels = 1;
  dup.coords = {{0, 0, 0}, {0, 0, 0}};
  dup.features = {1.f, 2.f};
  try {
    to_canonical(dup);
    FAIL("expected DuplicateCoord");
  } catch (const Error& e) {
    CHECK(e.code() == Status::DuplicateCoord);
  }

  SparseVoxelTensor oob;
  oob.spatial_shape = {2, 2, 2};
  oob.channels = 1;
  oob.coords = {{0, 0, 2}};
  oob.features = {1.f};
  try {
    to_canonical(oob);
    FAIL("expected OutOfBounds");
  } catch (const Error& e) {
    CHECK(e.code() == Status::OutOfBounds);
  }
}

TEST_CASE("densify: empty tensor and single placement") {
  SparseVoxelTensor empty;
  empty.spatial_shape = {2, 2, 2};
  empty.channels = 1;
  CHECK(densify(empty) == std::vector<float>(8, 0.f));

  SparseVoxelTensor one;
  one.spatial_shape = {1, 1, 2};
  one.channels = 1;
  one.coords = {{0, 0, 0}};
  one.features = {5.0f};
  CHECK(densify(one) == std::vector<float>{5.0f, 0.0f});
}

TEST_CASE("densify respects the element cap") {
  SparseVoxelTensor t;
  t.spatial_shape = {64, 64, 64};
  t.channels = 64;  // 16M elements
  try {
    densify(t, /*cap=*/1 << 20);
    FAIL("expected SizeError");
  } catch (const Error& e) {
    CHECK(e.code() == Status::SizeError);
  }
}

TEST_CASE("sparsify(densify(t)) is a bit-exact round trip") {
  SplitMix64 rng(404);
  for (int round = 0; round < 30; ++round) {
    SparseVoxelTensor t = oracle::random_sparse(rng, {6, 6, 6}, 4, 60);
    SparseVoxelTensor back = sparsify(densify(t), t.spatial_shape, t.channels);
    CHECK(back == t);
  }
}

TEST_CASE("canonical equality is map equality: same voxel map, different order") {
  SparseVoxelTensor a;
  a.spatial_shape = {2, 2, 2};
  a.channels = 2;
  a.coords = {{1, 0, 0}, {0, 1, 1}};
  a.features = {1.f, 2.f, 3.f, 4.f};
  SparseVoxelTensor b;
  b.spatial_shape = a.spatial_shape;
  b.channels = 2;
  b.coords = {{0, 1, 1}, {1, 0, 0}};
  b.features = {3.f, 4.f, 1.f, 2.f};
  CHECK(to_canonical(a) == to_canonical(b));
}

TEST_CASE("config: profiles, grid shapes, stride ladder") {
  ArchConfig tiny = ArchConfig::tiny();
  CHECK(tiny.grid_shape() == Coord3{12, 48, 48});
  CHECK(tiny.stage_shape(1) == Coord3{12, 48, 48});
  CHECK(tiny.stage_shape(2) == Coord3{6, 24, 24});
  CHECK(tiny.stage_shape(3) == Coord3{3, 12, 12});
  CHECK(tiny.stage_shape(4) == Coord3{2, 6, 6});

  ArchConfig kitti = ArchConfig::kitti();
  CHECK(kitti.grid_shape() == Coord3{40, 1600, 1408});

  // Odd extents round up per stage.
  ArchConfig odd = tiny;
  odd.range.max_z = 1.0f;  // 10 cells
  CHECK(odd.grid_shape()[0] == 10);
  CHECK(odd.stage_shape(4)[0] == 2);  // 10 -> 5 -> 3 -> 2
}

TEST_CASE("config: serialize/apply round trip and unknown keys") {
  ArchConfig cfg = ArchConfig::tiny();
  cfg.conv_channels = {8, 12, 20, 24};
  cfg.anchor_z = -0.75f;
  ArchConfig parsed;
  parsed.apply_text(cfg.serialize());
  CHECK(parsed == cfg);

  ArchConfig bad;
  CHECK_THROWS_AS(bad.apply_text("no_such_key=1\n"), Error);
  CHECK_THROWS_AS(bad.apply_text("top_k\n"), Error);
  ArchConfig comment;
  comment.apply_text("# comment only\n\ntop_k = 32\n");
  CHECK(comment.top_k == 32);
}

TEST_CASE("config: validation catches degenerate geometry") {
  ArchConfig cfg = ArchConfig::tiny();
  cfg.voxel_size[0] = 0.f;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = ArchConfig::tiny();
  cfg.range.max_x = cfg.range.min_x;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("arch_hash changes with config and seed") {
  ArchConfig a = ArchConfig::tiny();
  ArchConfig b = a;
  CHECK(a.arch_hash(1) == b.arch_hash(1));
  CHECK(a.arch_hash(1) != a.arch_hash(2));
  b.top_k += 1;
  CHECK(a.arch_hash(1) != b.arch_hash(1));
}

TEST_CASE("init_weights: deterministic, seed-sensitive, PRNG matches reference") {
  ArchConfig cfg = ArchConfig::tiny();
  ModelWeights a = init_weights(42, cfg);
  ModelWeights b = init_weights(42, cfg);
  CHECK(a == b);
  CHECK(weights_to_blob(a) == weights_to_blob(b));

  ModelWeights c = init_weights(43, cfg);
  CHECK(weights_to_blob(a) != weights_to_blob(c));

  // First generated value comes straight off the reference SplitMix64.
  uint64_t state = 7;
  const float expected_first = oracle::ref_weight_draw(state);
  ModelWeights s7 = init_weights(7, cfg);
  CHECK(s7.conv3d[0].w[0] == expected_first);

  // Every draw stays in [-0.1, 0.1).
  for (float v : s7.conv3d[0].w) {
    CHECK(v >= -0.1f);
    CHECK(v < 0.1f);
  }
}

TEST_CASE("weights blob round trip is bit-exact") {
  ArchConfig cfg = ArchConfig::tiny();
  cfg.conv_channels = {6, 10, 14, 18};
  cfg.backbone2d_channels = 12;
  ModelWeights w = init_weights(99, cfg);
  auto blob = weights_to_blob(w);
  ModelWeights back = weights_from_blob(blob, 99, cfg);
  CHECK(back == w);

  // Truncated blob must be rejected.
  blob.pop_back();
  CHECK_THROWS_AS(weights_from_blob(blob, 99, cfg), Error);
}

TEST_CASE("SplitMix64 library stream matches the reference constants") {
  SplitMix64 rng(12345);
  uint64_t state = 12345;
  for (int i = 0; i < 100; ++i) {
    CHECK(rng.next_u64() == oracle::ref_splitmix64_next(state));
  }
}
