// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "spc/detector.hpp"
#include "spc/engine.hpp"

using namespace spc;

namespace {

ConvWeights identity_kernel3d(int32_t channels) {
  ConvWeights w;
  w.out_c = channels;
  w.in_c = channels;
  w.kernel = 3;
  w.dims = 3;
  w.w.assign(static_cast<size_t>(channels) * channels * 27, 0.f);
  w.b.assign(static_cast<size_t>(channels), 0.f);
  const size_t center = 13;  // (kd, kh, kw) = (0, 0, 0)
  for (int32_t c = 0; c < channels; ++c) {
    w.w[(static_cast<size_t>(c) * channels + c) * 27 + center] = 1.f;
  }
  return w;
}

ConvWeights random_kernel3d(SplitMix64& rng, int32_t out_c, int32_t in_c) {
  ConvWeights w;
  w.out_c = out_c;
  w.in_c = in_c;
  w.kernel = 3;
  w.dims = 3;
  w.w.resize(static_cast<size_t>(out_c) * in_c * 27);
  w.b.resize(static_cast<size_t>(out_c));
  for (float& v : w.w) v = static_cast<float>(rng.next_range(-0.1, 0.1));
  for (float& v : w.b) v = static_cast<float>(rng.next_range(-0.1, 0.1));
  return w;
}

ArchConfig unit_cfg() {
  // 8 m cube with 1 m voxels: strides land on 8 -> 4 -> 2 -> 1.
  ArchConfig cfg = ArchConfig::tiny();
  cfg.range = Range3D{0.f, 0.f, 0.f, 8.f, 8.f, 8.f};
  cfg.voxel_size = {1.f, 1.f, 1.f};
  return cfg;
}

}  // namespace

TEST_CASE("voxelize_mean: one point occupies one cell with its own values") {
  ArchConfig cfg;
  cfg.range = Range3D{0.f, 0.f, 0.f, 4.f, 4.f, 4.f};
  cfg.voxel_size = {1.f, 1.f, 1.f};
  PointCloud cloud;
  cloud.points = {Point{0.2f, 0.3f, 0.4f, 1.0f}};
  SparseVoxelTensor t = voxelize_mean(cloud, cfg);
  REQUIRE(t.nnz() == 1);
  CHECK(t.coords[0] == Coord3{0, 0, 0});
  CHECK(t.channels == 4);
  CHECK(t.features == std::vector<float>{0.2f, 0.3f, 0.4f, 1.0f});
  CHECK(t.spatial_shape == Coord3{4, 4, 4});
}

TEST_CASE("voxelize_mean: two points average, hand-computed") {
  ArchConfig cfg;
  cfg.range = Range3D{0.f, 0.f, 0.f, 4.f, 4.f, 4.f};
  cfg.voxel_size = {1.f, 1.f, 1.f};
  PointCloud cloud;
  cloud.points = {Point{0.2f, 0.3f, 0.4f, 1.0f}, Point{0.4f, 0.1f, 0.2f, 3.0f}};
  SparseVoxelTensor t = voxelize_mean(cloud, cfg);
  REQUIRE(t.nnz() == 1);
  CHECK(t.features[0] == doctest::Approx(0.3).epsilon(1e-7));
  CHECK(t.features[1] == doctest::Approx(0.2).epsilon(1e-7));
  CHECK(t.features[2] == doctest::Approx(0.3).epsilon(1e-7));
  CHECK(t.features[3] == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(t == oracle::voxelize_oracle(cloud, cfg));
}

TEST_CASE("voxelize_mean matches the brute-force grouping oracle exactly") {
  SplitMix64 rng(777);
  ArchConfig cfg = ArchConfig::tiny();
  PointCloud cloud = oracle::random_cloud(rng, 10000, cfg.range, "rand");
  SparseVoxelTensor t = voxelize_mean(cloud, cfg);
  SparseVoxelTensor expected = oracle::voxelize_oracle(cloud, cfg);
  CHECK(t == expected);
  CHECK(is_canonical(t));
}

TEST_CASE("voxelize_mean: truncation keeps the first points in input order") {
  ArchConfig cfg;
  cfg.range = Range3D{0.f, 0.f, 0.f, 2.f, 2.f, 2.f};
  cfg.voxel_size = {1.f, 1.f, 1.f};
  cfg.max_points_per_voxel = 2;
  PointCloud cloud;
  cloud.points = {Point{0.1f, 0.1f, 0.1f, 1.f}, Point{0.2f, 0.2f, 0.2f, 2.f},
                  Point{0.3f, 0.3f, 0.3f, 100.f}};  // third point ignored
  SparseVoxelTensor t = voxelize_mean(cloud, cfg);
  REQUIRE(t.nnz() == 1);
  CHECK(t.features[3] == 1.5f);
  CHECK(t == oracle::voxelize_oracle(cloud, cfg));
}

TEST_CASE("voxelize_mean: empty cloud is an EmptyCloud error") {
  ArchConfig cfg = ArchConfig::tiny();
  PointCloud empty;
  try {
    voxelize_mean(empty, cfg);
    FAIL("expected EmptyCloud");
  } catch (const Error& e) {
    CHECK(e.code() == Status::EmptyCloud);
  }
}

TEST_CASE("sparse_conv3d: empty input propagates with halved shapes") {
  SparseVoxelTensor empty;
  empty.spatial_shape = {5, 6, 7};
  empty.channels = 4;
  ModelWeights w = init_weights(3, ArchConfig::tiny());
  MultiScaleFeatures ms = backbone3d(empty, w);
  CHECK(ms.conv1.nnz() == 0);
  CHECK(ms.conv1.spatial_shape == Coord3{5, 6, 7});
  CHECK(ms.conv2.spatial_shape == Coord3{3, 3, 4});
  CHECK(ms.conv3.spatial_shape == Coord3{2, 2, 2});
  CHECK(ms.conv4.spatial_shape == Coord3{1, 1, 1});
  CHECK(ms.conv4.channels == w.conv3d[3].out_c);
}

TEST_CASE("sparse_conv3d: identity center tap with zero bias is ReLU(input)") {
  SplitMix64 rng(11);
  SparseVoxelTensor in = oracle::random_sparse(rng, {6, 6, 6}, 4, 40);
  ConvWeights id = identity_kernel3d(4);
  SparseVoxelTensor out = sparse_conv3d(in, id, 1);
  REQUIRE(out.coords == in.coords);
  for (size_t i = 0; i < in.features.size(); ++i) {
    CHECK(out.features[i] == std::max(0.f, in.features[i]));
  }
}

TEST_CASE("sparse_conv3d: channel mismatch is a ShapeError") {
  SparseVoxelTensor in;
  in.spatial_shape = {2, 2, 2};
  in.channels = 3;
  SplitMix64 rng(5);
  ConvWeights w = random_kernel3d(rng, 8, 4);
  try {
    sparse_conv3d(in, w, 1);
    FAIL("expected ShapeError");
  } catch (const Error& e) {
    CHECK(e.code() == Status::ShapeError);
  }
}

TEST_CASE("sparse conv matches the dense convolution oracle, both strides") {
  SplitMix64 rng(2024);
  for (int round = 0; round < 40; ++round) {
    const int32_t in_c = 1 + static_cast<int32_t>(rng.next_below(6));
    const int32_t out_c = 1 + static_cast<int32_t>(rng.next_below(8));
    SparseVoxelTensor in = oracle::random_sparse(rng, {10, 10, 10}, in_c, 80);
    ConvWeights w = random_kernel3d(rng, out_c, in_c);
    const int stride = 1 + static_cast<int>(rng.next_below(2));

    SparseVoxelTensor out = sparse_conv3d(in, w, stride);
    auto expect = oracle::dense_conv3d_oracle(densify(in), in.spatial_shape,
                                              in.coords, w, stride);
    REQUIRE(out.spatial_shape == expect.shape);
    REQUIRE(out.coords == expect.active);
    std::vector<float> got = densify(out);
    REQUIRE(got.size() == expect.data.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(std::abs(got[i] - expect.data[i]) <= 1e-5f);
    }
  }
}

TEST_CASE("backbone3d stride geometry follows the 1x/2x/4x/8x ladder") {
  SplitMix64 rng(31);
  ArchConfig cfg = ArchConfig::tiny();
  ModelWeights w = init_weights(8, cfg);
  SparseVoxelTensor in = oracle::random_sparse(rng, {12, 12, 12}, 4, 100);
  MultiScaleFeatures ms = backbone3d(in, w);
  auto ceil_half = [](const Coord3& c) {
    return Coord3{(c[0] + 1) / 2, (c[1] + 1) / 2, (c[2] + 1) / 2};
  };
  CHECK(ms.conv1.spatial_shape == in.spatial_shape);
  CHECK(ms.conv2.spatial_shape == ceil_half(ms.conv1.spatial_shape));
  CHECK(ms.conv3.spatial_shape == ceil_half(ms.conv2.spatial_shape));
  CHECK(ms.conv4.spatial_shape == ceil_half(ms.conv3.spatial_shape));
  CHECK(is_canonical(ms.conv1));
  CHECK(is_canonical(ms.conv2));
  CHECK(is_canonical(ms.conv3));
  CHECK(is_canonical(ms.conv4));
}

TEST_CASE("map_to_bev: empty tensor gives an all-zero BEV with stacked channels") {
  SparseVoxelTensor t;
  t.spatial_shape = {2, 4, 4};
  t.channels = 8;
  DenseBEVTensor bev = map_to_bev(t);
  CHECK(bev.channels == 16);
  CHECK(bev.height == 4);
  CHECK(bev.width == 4);
  CHECK(bev.data == std::vector<float>(16 * 4 * 4, 0.f));
}

TEST_CASE("map_to_bev: single voxel lands in depth-stacked channels") {
  SparseVoxelTensor t;
  t.spatial_shape = {2, 4, 4};
  t.channels = 2;
  t.coords = {{1, 2, 3}};
  t.features = {5.f, 6.f};
  DenseBEVTensor bev = map_to_bev(t);
  REQUIRE(bev.channels == 4);
  // d * C + c with d = 1: channels 2 and 3 carry the feature at (row 2, col 3).
  CHECK(bev.at(2, 2, 3) == 5.f);
  CHECK(bev.at(3, 2, 3) == 6.f);
  float sum = 0.f;
  for (float v : bev.data) sum += std::abs(v);
  CHECK(sum == 11.f);
}

TEST_CASE("map_to_bev matches the densify-then-restack oracle exactly") {
  SplitMix64 rng(77);
  for (int round = 0; round < 20; ++round) {
    SparseVoxelTensor t = oracle::random_sparse(rng, {4, 6, 6}, 5, 50);
    DenseBEVTensor bev = map_to_bev(t);
    std::vector<float> dense = densify(t);  // c x d x h x w
    const int32_t D = t.spatial_shape[0], H = t.spatial_shape[1], W = t.spatial_shape[2];
    REQUIRE(bev.channels == D * t.channels);
    for (int32_t d = 0; d < D; ++d) {
      for (int32_t c = 0; c < t.channels; ++c) {
        for (int32_t h = 0; h < H; ++h) {
          for (int32_t x = 0; x < W; ++x) {
            const float expect =
                dense[static_cast<size_t>(((c * D + d) * H + h) * W + x)];
            CHECK(bev.at(d * t.channels + c, h, x) == expect);
          }
        }
      }
    }
  }
}

TEST_CASE("map_to_bev respects the densify cap") {
  SparseVoxelTensor t;
  t.spatial_shape = {64, 64, 64};
  t.channels = 64;
  try {
    map_to_bev(t, /*cap=*/1 << 20);
    FAIL("expected SizeError");
  } catch (const Error& e) {
    CHECK(e.code() == Status::SizeError);
  }
}

TEST_CASE("conv2d_3x3: zero propagation and identity center tap") {
  DenseBEVTensor zeros;
  zeros.channels = 3;
  zeros.height = 4;
  zeros.width = 5;
  zeros.data.assign(3 * 4 * 5, 0.f);

  ConvWeights w;
  w.out_c = 3;
  w.in_c = 3;
  w.kernel = 3;
  w.dims = 2;
  w.w.assign(3 * 3 * 9, 0.f);
  w.b.assign(3, 0.f);
  CHECK(conv2d_3x3(zeros, w).data == zeros.data);

  // Identity center tap reproduces ReLU(input).
  for (int32_t c = 0; c < 3; ++c) w.w[(static_cast<size_t>(c) * 3 + c) * 9 + 4] = 1.f;
  SplitMix64 rng(13);
  DenseBEVTensor in = zeros;
  for (float& v : in.data) v = static_cast<float>(rng.next_range(-1.0, 1.0));
  DenseBEVTensor out = conv2d_3x3(in, w);
  for (size_t i = 0; i < in.data.size(); ++i) {
    CHECK(out.data[i] == std::max(0.f, in.data[i]));
  }
}

TEST_CASE("backbone2d matches the nested-loop oracle within 1e-5") {
  SplitMix64 rng(2525);
  ArchConfig cfg = ArchConfig::tiny();
  cfg.conv_channels = {4, 6, 8, 8};
  cfg.backbone2d_channels = 8;
  ModelWeights w = init_weights(4, cfg);

  DenseBEVTensor in;
  in.channels = bev_input_channels(cfg);
  in.height = 32;
  in.width = 32;
  in.data.resize(static_cast<size_t>(in.channels) * 32 * 32);
  for (float& v : in.data) v = static_cast<float>(rng.next_range(-1.0, 1.0));

  DenseBEVTensor out = backbone2d(in, w);
  DenseBEVTensor mid = in;
  mid.channels = w.bev_conv1.out_c;
  mid.data = oracle::dense_conv2d_oracle(in, w.bev_conv1);
  std::vector<float> expect = oracle::dense_conv2d_oracle(mid, w.bev_conv2);
  REQUIRE(out.data.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i) {
    CHECK(std::abs(out.data[i] - expect[i]) <= 1e-5f);
  }
}

TEST_CASE("dense_head: degenerate tie-break starts at cell (0, 0)") {
  ArchConfig cfg = unit_cfg();
  cfg.top_k = 5;
  ModelWeights w = init_weights(1, cfg);
  std::fill(w.head_conv.w.begin(), w.head_conv.w.end(), 0.f);
  std::fill(w.head_conv.b.begin(), w.head_conv.b.end(), 0.f);

  DenseBEVTensor feat;
  feat.channels = cfg.backbone2d_channels;
  feat.height = 3;
  feat.width = 3;
  feat.data.assign(static_cast<size_t>(feat.channels) * 9, 1.f);

  Proposals p = dense_head(feat, w, cfg);
  REQUIRE(p.size() == 5);
  for (float obj : p.objectness) CHECK(obj == 0.5f);
  // Anchor centers of cells (0,0), (0,1), (0,2), (1,0), (1,1) in tie order.
  const float cell = 8.f;  // voxel 1 m * stride 8
  CHECK(p.boxes[0][0] == doctest::Approx(0.5 * cell));
  CHECK(p.boxes[0][1] == doctest::Approx(0.5 * cell));
  CHECK(p.boxes[1][0] == doctest::Approx(1.5 * cell));
  CHECK(p.boxes[1][1] == doctest::Approx(0.5 * cell));
  CHECK(p.boxes[3][0] == doctest::Approx(0.5 * cell));
  CHECK(p.boxes[3][1] == doctest::Approx(1.5 * cell));
  // Zero deltas decode to the anchor box itself.
  CHECK(p.boxes[0][3] == cfg.anchor_size[0]);
  CHECK(p.boxes[0][4] == cfg.anchor_size[1]);
  CHECK(p.boxes[0][5] == cfg.anchor_size[2]);
  CHECK(p.boxes[0][2] == cfg.anchor_z);
}

TEST_CASE("dense_head: top_k larger than the cell count returns every cell") {
  ArchConfig cfg = unit_cfg();
  cfg.top_k = 1000;
  ModelWeights w = init_weights(2, cfg);
  DenseBEVTensor feat;
  feat.channels = cfg.backbone2d_channels;
  feat.height = 2;
  feat.width = 3;
  feat.data.resize(static_cast<size_t>(feat.channels) * 6);
  SplitMix64 rng(21);
  for (float& v : feat.data) v = static_cast<float>(rng.next_range(-1.0, 1.0));
  CHECK(dense_head(feat, w, cfg).size() == 6);
}

TEST_CASE("dense_head equals the exhaustive score-sort oracle") {
  SplitMix64 rng(909);
  ArchConfig cfg = unit_cfg();
  cfg.top_k = 7;
  ModelWeights w = init_weights(33, cfg);

  DenseBEVTensor feat;
  feat.channels = cfg.backbone2d_channels;
  feat.height = 6;
  feat.width = 5;
  feat.data.resize(static_cast<size_t>(feat.channels) * 30);
  for (float& v : feat.data) v = static_cast<float>(rng.next_range(-2.0, 2.0));

  Proposals got = dense_head(feat, w, cfg);

  // Exhaustive recomputation + full sort.
  struct Cell {
    float obj;
    int32_t h, x;
  };
  std::vector<Cell> cells;
  for (int32_t h = 0; h < feat.height; ++h) {
    for (int32_t x = 0; x < feat.width; ++x) {
      double acc = w.head_conv.b[0];
      for (int32_t ci = 0; ci < feat.channels; ++ci) {
        acc += static_cast<double>(w.head_conv.w[static_cast<size_t>(ci)]) *
               feat.at(ci, h, x);
      }
      cells.push_back({static_cast<float>(1.0 / (1.0 + std::exp(-acc))), h, x});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.obj != b.obj) return a.obj > b.obj;
    if (a.h != b.h) return a.h < b.h;
    return a.x < b.x;
  });
  REQUIRE(got.size() == 7);
  for (size_t i = 0; i < got.size(); ++i) {
    CHECK(got.objectness[i] == cells[i].obj);
  }
  // Scores sorted descending.
  for (size_t i = 1; i < got.size(); ++i) {
    CHECK(got.objectness[i - 1] >= got.objectness[i]);
  }
}

TEST_CASE("roi_head: zero proposals give zero detections") {
  ArchConfig cfg = unit_cfg();
  ModelWeights w = init_weights(5, cfg);
  SparseVoxelTensor c2, c3, c4;
  c2.spatial_shape = {4, 4, 4};
  c2.channels = cfg.conv_channels[1];
  c3.spatial_shape = {2, 2, 2};
  c3.channels = cfg.conv_channels[2];
  c4.spatial_shape = {1, 1, 1};
  c4.channels = cfg.conv_channels[3];
  Detections d = roi_head(Proposals{}, c2, c3, c4, w, cfg);
  CHECK(d.size() == 0);
}

TEST_CASE("roi_head: whole-grid proposal pools the single voxel at each scale") {
  ArchConfig cfg = unit_cfg();
  cfg.conv_channels = {4, 2, 3, 4};  // conv2=2ch, conv3=3ch, conv4=4ch

  SparseVoxelTensor c2, c3, c4;
  c2.spatial_shape = {4, 4, 4};
  c2.channels = 2;
  c2.coords = {{1, 2, 3}};
  c2.features = {0.5f, -1.5f};
  c3.spatial_shape = {2, 2, 2};
  c3.channels = 3;
  c3.coords = {{0, 1, 0}};
  c3.features = {2.f, 3.f, 4.f};
  c4.spatial_shape = {1, 1, 1};
  c4.channels = 4;
  c4.coords = {{0, 0, 0}};
  c4.features = {1.f, 2.f, 3.f, 4.f};

  ModelWeights w;
  w.roi_w = {1.f, 1.f, 0.5f, 0.5f, 0.5f, 0.25f, 0.25f, 0.25f, 0.25f};
  w.roi_b = 0.125f;

  Proposals props;
  props.boxes = {Box7{4.f, 4.f, 4.f, 20.f, 20.f, 20.f, 0.f}};
  props.objectness = {0.9f};

  Detections d = roi_head(props, c2, c3, c4, w, cfg);
  REQUIRE(d.size() == 1);

  // Expected: b + sum(w . concat(f2, f3, f4)) through the same pooling math.
  double acc = 0.125;
  auto p2 = oracle::pool_oracle(c2, 2, props.boxes[0], cfg);
  auto p3 = oracle::pool_oracle(c3, 4, props.boxes[0], cfg);
  auto p4 = oracle::pool_oracle(c4, 8, props.boxes[0], cfg);
  CHECK(p2 == std::vector<double>{0.5, -1.5});
  CHECK(p3 == std::vector<double>{2.0, 3.0, 4.0});
  CHECK(p4 == std::vector<double>{1.0, 2.0, 3.0, 4.0});
  size_t wi = 0;
  for (double v : p2) acc += w.roi_w[wi++] * v;
  for (double v : p3) acc += w.roi_w[wi++] * v;
  for (double v : p4) acc += w.roi_w[wi++] * v;
  CHECK(d.scores[0] == static_cast<float>(1.0 / (1.0 + std::exp(-acc))));
  CHECK(d.boxes[0] == props.boxes[0]);
  CHECK(d.labels[0] == 0);
}

TEST_CASE("roi_head matches the brute-force containment oracle on random scenes") {
  SplitMix64 rng(606);
  ArchConfig cfg = unit_cfg();
  cfg.conv_channels = {4, 3, 4, 5};
  ModelWeights w = init_weights(17, cfg);

  for (int round = 0; round < 20; ++round) {
    SparseVoxelTensor c2 = oracle::random_sparse(rng, {4, 4, 4}, 3, 30);
    c2.spatial_shape = {4, 4, 4};
    SparseVoxelTensor c3 = oracle::random_sparse(rng, {2, 2, 2}, 4, 6);
    c3.spatial_shape = {2, 2, 2};
    SparseVoxelTensor c4 = oracle::random_sparse(rng, {1, 1, 1}, 5, 1);
    c4.spatial_shape = {1, 1, 1};

    Proposals props;
    const size_t n_props = 1 + rng.next_below(6);
    for (size_t i = 0; i < n_props; ++i) {
      props.boxes.push_back(Box7{static_cast<float>(rng.next_range(0, 8)),
                                 static_cast<float>(rng.next_range(0, 8)),
                                 static_cast<float>(rng.next_range(0, 8)),
                                 static_cast<float>(rng.next_range(1, 10)),
                                 static_cast<float>(rng.next_range(1, 10)),
                                 static_cast<float>(rng.next_range(1, 10)), 0.f});
      props.objectness.push_back(static_cast<float>(rng.next_unit()));
    }

    Detections got = roi_head(props, c2, c3, c4, w, cfg);

    std::vector<float> expected_scores;
    for (const Box7& box : props.boxes) {
      double acc = w.roi_b;
      size_t wi = 0;
      for (double v : oracle::pool_oracle(c2, 2, box, cfg)) acc += w.roi_w[wi++] * v;
      for (double v : oracle::pool_oracle(c3, 4, box, cfg)) acc += w.roi_w[wi++] * v;
      for (double v : oracle::pool_oracle(c4, 8, box, cfg)) acc += w.roi_w[wi++] * v;
      expected_scores.push_back(static_cast<float>(1.0 / (1.0 + std::exp(-acc))));
    }
    std::vector<size_t> order(props.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return expected_scores[a] > expected_scores[b];
    });
    REQUIRE(got.size() == props.size());
    for (size_t i = 0; i < order.size(); ++i) {
      CHECK(got.scores[i] == expected_scores[order[i]]);
      CHECK(got.boxes[i] == props.boxes[order[i]]);
    }
  }
}

TEST_CASE("roi_head output reacts to perturbing each multi-scale input") {
  SplitMix64 rng(808);
  ArchConfig cfg = unit_cfg();
  cfg.conv_channels = {4, 3, 4, 5};
  ModelWeights w = init_weights(23, cfg);

  auto nonempty = [&](Coord3 shape, int32_t channels, size_t max_nnz) {
    SparseVoxelTensor t;
    do {
      t = oracle::random_sparse(rng, shape, channels, max_nnz);
    } while (t.nnz() == 0);
    t.spatial_shape = shape;
    return t;
  };
  SparseVoxelTensor c2 = nonempty({4, 4, 4}, 3, 20);
  SparseVoxelTensor c3 = nonempty({2, 2, 2}, 4, 6);
  SparseVoxelTensor c4 = nonempty({1, 1, 1}, 5, 1);

  Proposals props;
  props.boxes = {Box7{4.f, 4.f, 4.f, 30.f, 30.f, 30.f, 0.f}};  // covers everything
  props.objectness = {0.5f};

  Detections base = roi_head(props, c2, c3, c4, w, cfg);
  auto perturbed = [&](SparseVoxelTensor t) {
    t.features[0] += 1.0f;
    return t;
  };
  CHECK(roi_head(props, perturbed(c2), c3, c4, w, cfg).scores != base.scores);
  CHECK(roi_head(props, c2, perturbed(c3), c4, w, cfg).scores != base.scores);
  CHECK(roi_head(props, c2, c3, perturbed(c4), w, cfg).scores != base.scores);
}

TEST_CASE("run_pipeline: bit-identical across repeated runs") {
  ArchConfig cfg = ArchConfig::tiny();
  Engine engine(cfg, 42);
  SplitMix64 rng(5150);
  PointCloud cloud = oracle::random_cloud(rng, 3000, cfg.range, "twice");

  PipelineResult a = engine.run_pipeline(cloud);
  PipelineResult b = engine.run_pipeline(cloud);
  CHECK(a.detections == b.detections);
  CHECK(a.detections.size() > 0);
  for (size_t i = 1; i < a.detections.size(); ++i) {
    CHECK(a.detections.scores[i - 1] >= a.detections.scores[i]);
  }
}

TEST_CASE("run_pipeline: module timing ratios sum to 100%") {
  ArchConfig cfg = ArchConfig::tiny();
  Engine engine(cfg, 42);
  SplitMix64 rng(616);
  PointCloud cloud = oracle::random_cloud(rng, 2000, cfg.range, "ratios");
  PipelineResult r = engine.run_pipeline(cloud);

  auto modules = aggregate_module_times(r.step_ms);
  CHECK(modules.size() == 6);
  double total = 0.0;
  for (const auto& [name, ms] : modules) total += ms;
  REQUIRE(total > 0.0);
  double pct_sum = 0.0;
  for (const auto& [name, ms] : modules) pct_sum += ms / total * 100.0;
  CHECK(pct_sum == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("run_pipeline: a single-point scene completes") {
  ArchConfig cfg = ArchConfig::tiny();
  Engine engine(cfg, 42);
  PointCloud cloud;
  cloud.scene_id = "single";
  cloud.points = {Point{1.f, 0.f, 0.f, 0.5f}};
  PipelineResult r = engine.run_pipeline(cloud);
  CHECK(r.detections.size() >= 0);
  CHECK(r.step_ms.size() == 10);
}
