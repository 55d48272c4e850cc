// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference implementations used by the tests. Everything here
// recomputes results with plain loops over dense arrays or std::map
// grouping, independent of the hash-map/sparse code paths under test.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "spc/config.hpp"
#include "spc/detector.hpp"
#include "spc/ingest.hpp"
#include "spc/rng.hpp"
#include "spc/tensor.hpp"
#include "spc/weights.hpp"

namespace oracle {

// Reference SplitMix64 from the published constants, kept separate from the
// library's implementation on purpose.
inline uint64_t ref_splitmix64_next(uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline float ref_weight_draw(uint64_t& state) {
  const double unit = static_cast<double>(ref_splitmix64_next(state) >> 11) * 0x1.0p-53;
  return static_cast<float>(unit * 0.2 - 0.1);
}

// ---------------------------------------------------------------------------
// Dense 3D convolution over a densified tensor, with the output-coordinate
// rule applied from the input active set (submanifold at stride 1, halved
// coords at stride 2).

struct DenseConvResult {
  spc::Coord3 shape{0, 0, 0};
  std::vector<float> data;  // out_c x D x H x W
  std::vector<spc::Coord3> active;
};

inline DenseConvResult dense_conv3d_oracle(const std::vector<float>& in,
                                           spc::Coord3 in_shape,
                                           const std::vector<spc::Coord3>& in_active,
                                           const spc::ConvWeights& w, int stride) {
  DenseConvResult res;
  if (stride == 1) {
    res.shape = in_shape;
    res.active = in_active;
  } else {
    for (int a = 0; a < 3; ++a) res.shape[a] = (in_shape[a] + 1) / 2;
    for (const spc::Coord3& c : in_active) {
      res.active.push_back({c[0] / 2, c[1] / 2, c[2] / 2});
    }
    std::sort(res.active.begin(), res.active.end());
    res.active.erase(std::unique(res.active.begin(), res.active.end()),
                     res.active.end());
  }
  const int64_t od = res.shape[0], oh = res.shape[1], ow = res.shape[2];
  const int64_t id = in_shape[0], ih = in_shape[1], iw = in_shape[2];
  res.data.assign(static_cast<size_t>(w.out_c) * od * oh * ow, 0.f);

  auto in_at = [&](int32_t c, int64_t z, int64_t y, int64_t x) -> double {
    return in[static_cast<size_t>(((c * id + z) * ih + y) * iw + x)];
  };

  for (const spc::Coord3& o : res.active) {
    for (int32_t co = 0; co < w.out_c; ++co) {
      double acc = w.b[static_cast<size_t>(co)];
      for (int kd = -1; kd <= 1; ++kd) {
        for (int kh = -1; kh <= 1; ++kh) {
          for (int kw = -1; kw <= 1; ++kw) {
            const int64_t z = static_cast<int64_t>(o[0]) * stride + kd;
            const int64_t y = static_cast<int64_t>(o[1]) * stride + kh;
            const int64_t x = static_cast<int64_t>(o[2]) * stride + kw;
            if (z < 0 || z >= id || y < 0 || y >= ih || x < 0 || x >= iw) continue;
            const size_t tap =
                static_cast<size_t>((kd + 1) * 9 + (kh + 1) * 3 + (kw + 1));
            for (int32_t ci = 0; ci < w.in_c; ++ci) {
              acc += static_cast<double>(
                         w.w[(static_cast<size_t>(co) * w.in_c + ci) * 27 + tap]) *
                     in_at(ci, z, y, x);
            }
          }
        }
      }
      res.data[static_cast<size_t>(((co * od + o[0]) * oh + o[1]) * ow + o[2])] =
          std::max(0.f, static_cast<float>(acc));
    }
  }
  return res;
}

// Plain nested-loop 2D convolution (stride 1, zero padding, ReLU).
inline std::vector<float> dense_conv2d_oracle(const spc::DenseBEVTensor& in,
                                              const spc::ConvWeights& w) {
  const int32_t half = w.kernel / 2;
  std::vector<float> out(static_cast<size_t>(w.out_c) * in.height * in.width, 0.f);
  for (int32_t co = 0; co < w.out_c; ++co) {
    for (int32_t y = 0; y < in.height; ++y) {
      for (int32_t x = 0; x < in.width; ++x) {
        double acc = w.b[static_cast<size_t>(co)];
        for (int32_t ky = -half; ky <= half; ++ky) {
          for (int32_t kx = -half; kx <= half; ++kx) {
            const int32_t yy = y + ky, xx = x + kx;
            if (yy < 0 || yy >= in.height || xx < 0 || xx >= in.width) continue;
            const size_t tap =
                static_cast<size_t>(ky + half) * w.kernel + static_cast<size_t>(kx + half);
            for (int32_t ci = 0; ci < w.in_c; ++ci) {
              acc += static_cast<double>(
                         w.w[(static_cast<size_t>(co) * w.in_c + ci) * w.tap_count() + tap]) *
                     in.at(ci, yy, xx);
            }
          }
        }
        out[(static_cast<size_t>(co) * in.height + y) * in.width + x] =
            std::max(0.f, static_cast<float>(acc));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force voxelization: std::map grouping by explicitly computed cell,
// mean over the first max_points_per_voxel points in input order.

inline spc::SparseVoxelTensor voxelize_oracle(const spc::PointCloud& cloud,
                                              const spc::ArchConfig& cfg) {
  const spc::Coord3 shape = cfg.grid_shape();
  auto cell = [](double v, double lo, double voxel, int32_t dim) {
    int32_t i = static_cast<int32_t>(std::floor((v - lo) / voxel));
    return std::min(i, dim - 1);
  };
  std::map<std::array<int32_t, 3>, std::vector<spc::Point>> groups;
  for (const spc::Point& p : cloud.points) {
    std::array<int32_t, 3> key{
        cell(p.z, cfg.range.min_z, cfg.voxel_size[2], shape[0]),
        cell(p.y, cfg.range.min_y, cfg.voxel_size[1], shape[1]),
        cell(p.x, cfg.range.min_x, cfg.voxel_size[0], shape[2])};
    auto& bucket = groups[key];
    if (static_cast<int32_t>(bucket.size()) < cfg.max_points_per_voxel) {
      bucket.push_back(p);
    }
  }
  spc::SparseVoxelTensor t;
  t.spatial_shape = shape;
  t.channels = 4;
  for (const auto& [key, pts] : groups) {
    t.coords.push_back(key);
    double sum[4] = {0, 0, 0, 0};
    for (const spc::Point& p : pts) {
      sum[0] += p.x;
      sum[1] += p.y;
      sum[2] += p.z;
      sum[3] += p.intensity;
    }
    for (double s : sum) {
      t.features.push_back(static_cast<float>(s / static_cast<double>(pts.size())));
    }
  }
  return t;
}

// Brute-force point-in-box mean pooling at one backbone scale.
inline std::vector<double> pool_oracle(const spc::SparseVoxelTensor& t, int stride,
                                       const spc::Box7& box, const spc::ArchConfig& cfg) {
  std::vector<double> mean(static_cast<size_t>(t.channels), 0.0);
  int64_t count = 0;
  for (size_t i = 0; i < t.nnz(); ++i) {
    const spc::Coord3& c = t.coords[i];
    const double x = cfg.range.min_x + (c[2] + 0.5) * cfg.voxel_size[0] * stride;
    const double y = cfg.range.min_y + (c[1] + 0.5) * cfg.voxel_size[1] * stride;
    const double z = cfg.range.min_z + (c[0] + 0.5) * cfg.voxel_size[2] * stride;
    if (std::abs(x - box[0]) <= box[3] * 0.5 && std::abs(y - box[1]) <= box[4] * 0.5 &&
        std::abs(z - box[2]) <= box[5] * 0.5) {
      for (int32_t ch = 0; ch < t.channels; ++ch) mean[static_cast<size_t>(ch)] += t.feature(i)[ch];
      ++count;
    }
  }
  if (count > 0) {
    for (double& m : mean) m /= static_cast<double>(count);
  }
  return mean;
}

// ---------------------------------------------------------------------------
// Random test-data generators (generation may reuse the library RNG; only
// the expected values must come from independent code).

inline spc::SparseVoxelTensor random_sparse(spc::SplitMix64& rng, spc::Coord3 max_shape,
                                            int32_t channels, size_t max_nnz,
                                            float lo = -1.f, float hi = 1.f) {
  spc::SparseVoxelTensor t;
  for (int a = 0; a < 3; ++a) {
    t.spatial_shape[a] = 1 + static_cast<int32_t>(rng.next_below(
                                 static_cast<uint64_t>(max_shape[a])));
  }
  t.channels = channels;
  const size_t want = rng.next_below(max_nnz + 1);
  std::map<std::array<int32_t, 3>, bool> used;
  for (size_t i = 0; i < want; ++i) {
    spc::Coord3 c{
        static_cast<int32_t>(rng.next_below(static_cast<uint64_t>(t.spatial_shape[0]))),
        static_cast<int32_t>(rng.next_below(static_cast<uint64_t>(t.spatial_shape[1]))),
        static_cast<int32_t>(rng.next_below(static_cast<uint64_t>(t.spatial_shape[2])))};
    if (used[c]) continue;
    used[c] = true;
    t.coords.push_back(c);
  }
  std::sort(t.coords.begin(), t.coords.end());
  t.features.resize(t.nnz() * static_cast<size_t>(channels));
  for (float& f : t.features) {
    // Never exactly zero, so sparsify round-trips are exact.
    do {
      f = static_cast<float>(rng.next_range(lo, hi));
    } while (f == 0.f);
  }
  return t;
}

inline spc::PointCloud random_cloud(spc::SplitMix64& rng, size_t n,
                                    const spc::Range3D& within,
                                    const std::string& scene_id) {
  spc::PointCloud cloud;
  cloud.scene_id = scene_id;
  for (size_t i = 0; i < n; ++i) {
    spc::Point p;
    p.x = static_cast<float>(rng.next_range(within.min_x, within.max_x));
    p.y = static_cast<float>(rng.next_range(within.min_y, within.max_y));
    p.z = static_cast<float>(rng.next_range(within.min_z, within.max_z));
    p.intensity = static_cast<float>(rng.next_unit());
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace oracle
