// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace spc {

namespace {

int64_t linear_index(const Coord3& c, const Coord3& shape) {
  return (static_cast<int64_t>(c[0]) * shape[1] + c[1]) * shape[2] + c[2];
}

float sigmoid(double x) { return static_cast<float>(1.0 / (1.0 + std::exp(-x))); }

// Keeps box dimensions finite no matter how large the regressed delta gets.
double clamp_delta(double t) { return std::clamp(t, -10.0, 10.0); }

}  // namespace

SparseVoxelTensor voxelize_mean(const PointCloud& cloud, const ArchConfig& cfg) {
  const Coord3 shape = cfg.grid_shape();

  struct Cell {
    double sum[4] = {0, 0, 0, 0};
    int32_t used = 0;
  };
  std::unordered_map<int64_t, Cell> cells;
  cells.reserve(cloud.points.size());

  auto cell_of = [&](float v, float lo, float voxel, int32_t dim) {
    int32_t i = static_cast<int32_t>(std::floor((static_cast<double>(v) - lo) / voxel));
    return std::min(i, dim - 1);
  };

  for (const Point& p : cloud.points) {
    Coord3 c{cell_of(p.z, cfg.range.min_z, cfg.voxel_size[2], shape[0]),
             cell_of(p.y, cfg.range.min_y, cfg.voxel_size[1], shape[1]),
             cell_of(p.x, cfg.range.min_x, cfg.voxel_size[0], shape[2])};
    Cell& cell = cells[linear_index(c, shape)];
    if (cell.used >= cfg.max_points_per_voxel) continue;
    cell.sum[0] += p.x;
    cell.sum[1] += p.y;
    cell.sum[2] += p.z;
    cell.sum[3] += p.intensity;
    ++cell.used;
  }

  if (cells.empty()) {
    fail(Status::EmptyCloud, "no voxels produced for scene '" + cloud.scene_id + "'");
  }

  std::vector<int64_t> keys;
  keys.reserve(cells.size());
  for (const auto& [k, v] : cells) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  SparseVoxelTensor t;
  t.spatial_shape = shape;
  t.channels = 4;
  t.coords.reserve(keys.size());
  t.features.reserve(keys.size() * 4);
  const int64_t plane = static_cast<int64_t>(shape[1]) * shape[2];
  for (int64_t k : keys) {
    const Cell& cell = cells.at(k);
    t.coords.push_back({static_cast<int32_t>(k / plane),
                        static_cast<int32_t>((k / shape[2]) % shape[1]),
                        static_cast<int32_t>(k % shape[2])});
    for (int ch = 0; ch < 4; ++ch) {
      t.features.push_back(static_cast<float>(cell.sum[ch] / cell.used));
    }
  }
  return t;
}

SparseVoxelTensor sparse_conv3d(const SparseVoxelTensor& in, const ConvWeights& w,
                                int stride) {
  if (w.dims != 3 || w.kernel != 3) {
    fail(Status::ShapeError, "sparse_conv3d expects a 3x3x3 kernel");
  }
  if (in.channels != w.in_c) {
    fail(Status::ShapeError, "input has " + std::to_string(in.channels) +
                                 " channels, kernel expects " + std::to_string(w.in_c));
  }
  if (stride != 1 && stride != 2) {
    fail(Status::InvalidArgument, "stride must be 1 or 2");
  }

  SparseVoxelTensor out;
  out.channels = w.out_c;
  if (stride == 1) {
    out.spatial_shape = in.spatial_shape;
    out.coords = in.coords;
  } else {
    for (int a = 0; a < 3; ++a) out.spatial_shape[a] = (in.spatial_shape[a] + 1) / 2;
    out.coords.reserve(in.coords.size());
    for (const Coord3& c : in.coords) {
      out.coords.push_back({c[0] >> 1, c[1] >> 1, c[2] >> 1});
    }
    std::sort(out.coords.begin(), out.coords.end());
    out.coords.erase(std::unique(out.coords.begin(), out.coords.end()),
                     out.coords.end());
  }

  std::unordered_map<int64_t, int32_t> index;
  index.reserve(in.coords.size());
  for (size_t i = 0; i < in.coords.size(); ++i) {
    index.emplace(linear_index(in.coords[i], in.spatial_shape), static_cast<int32_t>(i));
  }

  out.features.assign(out.coords.size() * static_cast<size_t>(w.out_c), 0.f);
  const size_t in_stride = static_cast<size_t>(w.in_c);
  std::vector<double> acc(static_cast<size_t>(w.out_c));

  // Contributing taps for one output, gathered in fixed (kd, kh, kw) order so
  // the accumulation order is reproducible.
  std::vector<std::pair<int32_t, int32_t>> taps;  // (tap index, input voxel)
  taps.reserve(27);

  for (size_t oi = 0; oi < out.coords.size(); ++oi) {
    const Coord3& o = out.coords[oi];
    taps.clear();
    int32_t tap = 0;
    for (int kd = -1; kd <= 1; ++kd) {
      for (int kh = -1; kh <= 1; ++kh) {
        for (int kw = -1; kw <= 1; ++kw, ++tap) {
          Coord3 q{o[0] * stride + kd, o[1] * stride + kh, o[2] * stride + kw};
          if (q[0] < 0 || q[0] >= in.spatial_shape[0] || q[1] < 0 ||
              q[1] >= in.spatial_shape[1] || q[2] < 0 || q[2] >= in.spatial_shape[2]) {
            continue;
          }
          auto it = index.find(linear_index(q, in.spatial_shape));
          if (it != index.end()) taps.emplace_back(tap, it->second);
        }
      }
    }
    for (int32_t co = 0; co < w.out_c; ++co) acc[co] = w.b[co];
    for (const auto& [t, vi] : taps) {
      const float* f = in.features.data() + static_cast<size_t>(vi) * in_stride;
      for (int32_t co = 0; co < w.out_c; ++co) {
        const float* ker = w.w.data() +
                           (static_cast<size_t>(co) * w.in_c) * 27 + t;
        double s = acc[co];
        for (int32_t ci = 0; ci < w.in_c; ++ci) {
          s += static_cast<double>(ker[static_cast<size_t>(ci) * 27]) * f[ci];
        }
        acc[co] = s;
      }
    }
    float* dst = out.features.data() + oi * static_cast<size_t>(w.out_c);
    for (int32_t co = 0; co < w.out_c; ++co) {
      dst[co] = std::max(0.f, static_cast<float>(acc[co]));
    }
  }
  return out;
}

MultiScaleFeatures backbone3d(const SparseVoxelTensor& input, const ModelWeights& w) {
  MultiScaleFeatures ms;
  ms.conv1 = sparse_conv3d(input, w.conv3d[0], 1);
  ms.conv2 = sparse_conv3d(ms.conv1, w.conv3d[1], 2);
  ms.conv3 = sparse_conv3d(ms.conv2, w.conv3d[2], 2);
  ms.conv4 = sparse_conv3d(ms.conv3, w.conv3d[3], 2);
  return ms;
}

DenseBEVTensor map_to_bev(const SparseVoxelTensor& conv4, int64_t cap) {
  if (!is_canonical(conv4)) fail(Status::NonCanonical, "map_to_bev requires canonical input");
  const int64_t d = conv4.spatial_shape[0];
  const int64_t h = conv4.spatial_shape[1];
  const int64_t wd = conv4.spatial_shape[2];
  const int64_t total = d * h * wd * conv4.channels;
  if (total > cap) {
    fail(Status::SizeError, "BEV expansion of " + std::to_string(total) +
                                " elements exceeds cap " + std::to_string(cap));
  }
  DenseBEVTensor bev;
  bev.channels = static_cast<int32_t>(d) * conv4.channels;
  bev.height = static_cast<int32_t>(h);
  bev.width = static_cast<int32_t>(wd);
  bev.data.assign(static_cast<size_t>(total), 0.f);
  for (size_t i = 0; i < conv4.nnz(); ++i) {
    const Coord3& c = conv4.coords[i];
    const float* f = conv4.feature(i);
    for (int32_t ch = 0; ch < conv4.channels; ++ch) {
      const int32_t bev_ch = c[0] * conv4.channels + ch;
      bev.data[(static_cast<size_t>(bev_ch) * h + c[1]) * wd + c[2]] = f[ch];
    }
  }
  return bev;
}

DenseBEVTensor conv2d_3x3(const DenseBEVTensor& in, const ConvWeights& w) {
  if (w.dims != 2) fail(Status::ShapeError, "conv2d expects a planar kernel");
  if (in.channels != w.in_c) {
    fail(Status::ShapeError, "BEV input has " + std::to_string(in.channels) +
                                 " channels, kernel expects " + std::to_string(w.in_c));
  }
  const int32_t half = w.kernel / 2;
  DenseBEVTensor out;
  out.channels = w.out_c;
  out.height = in.height;
  out.width = in.width;
  out.data.assign(static_cast<size_t>(w.out_c) * in.height * in.width, 0.f);
  const size_t taps = w.tap_count();
  for (int32_t co = 0; co < w.out_c; ++co) {
    for (int32_t h = 0; h < in.height; ++h) {
      for (int32_t x = 0; x < in.width; ++x) {
        double acc = w.b[co];
        for (int32_t kh = -half; kh <= half; ++kh) {
          const int32_t hh = h + kh;
          if (hh < 0 || hh >= in.height) continue;
          for (int32_t kw = -half; kw <= half; ++kw) {
            const int32_t ww = x + kw;
            if (ww < 0 || ww >= in.width) continue;
            const size_t tap = static_cast<size_t>(kh + half) * w.kernel + (kw + half);
            for (int32_t ci = 0; ci < w.in_c; ++ci) {
              acc += static_cast<double>(
                         w.w[(static_cast<size_t>(co) * w.in_c + ci) * taps + tap]) *
                     in.at(ci, hh, ww);
            }
          }
        }
        out.data[(static_cast<size_t>(co) * in.height + h) * in.width + x] =
            std::max(0.f, static_cast<float>(acc));
      }
    }
  }
  return out;
}

DenseBEVTensor backbone2d(const DenseBEVTensor& bev, const ModelWeights& w) {
  return conv2d_3x3(conv2d_3x3(bev, w.bev_conv1), w.bev_conv2);
}

Proposals dense_head(const DenseBEVTensor& feat, const ModelWeights& w,
                     const ArchConfig& cfg) {
  if (feat.channels != w.head_conv.in_c) {
    fail(Status::ShapeError, "dense head channel mismatch");
  }
  struct Scored {
    float obj;
    int32_t h, x;
    std::array<double, 7> deltas;
  };
  std::vector<Scored> cells;
  cells.reserve(static_cast<size_t>(feat.height) * feat.width);
  for (int32_t h = 0; h < feat.height; ++h) {
    for (int32_t x = 0; x < feat.width; ++x) {
      std::array<double, 8> logits{};
      for (int32_t o = 0; o < 8; ++o) {
        double acc = w.head_conv.b[o];
        for (int32_t ci = 0; ci < feat.channels; ++ci) {
          acc += static_cast<double>(w.head_conv.w[static_cast<size_t>(o) * feat.channels + ci]) *
                 feat.at(ci, h, x);
        }
        logits[o] = acc;
      }
      Scored s;
      s.obj = sigmoid(logits[0]);
      s.h = h;
      s.x = x;
      for (int i = 0; i < 7; ++i) s.deltas[i] = logits[i + 1];
      cells.push_back(s);
    }
  }

  std::sort(cells.begin(), cells.end(), [](const Scored& a, const Scored& b) {
    if (a.obj != b.obj) return a.obj > b.obj;
    if (a.h != b.h) return a.h < b.h;
    return a.x < b.x;
  });
  const size_t keep = std::min<size_t>(static_cast<size_t>(cfg.top_k), cells.size());

  // Anchors sit at BEV cell centers; one BEV cell spans 8 base voxels (the
  // three strided stages).
  const double cell_x = static_cast<double>(cfg.voxel_size[0]) * 8.0;
  const double cell_y = static_cast<double>(cfg.voxel_size[1]) * 8.0;

  Proposals props;
  props.boxes.reserve(keep);
  props.objectness.reserve(keep);
  for (size_t i = 0; i < keep; ++i) {
    const Scored& s = cells[i];
    const double ax = cfg.range.min_x + (s.x + 0.5) * cell_x;
    const double ay = cfg.range.min_y + (s.h + 0.5) * cell_y;
    Box7 box;
    box[0] = static_cast<float>(ax + s.deltas[0]);
    box[1] = static_cast<float>(ay + s.deltas[1]);
    box[2] = static_cast<float>(cfg.anchor_z + s.deltas[2]);
    box[3] = static_cast<float>(cfg.anchor_size[0] * std::exp(clamp_delta(s.deltas[3])));
    box[4] = static_cast<float>(cfg.anchor_size[1] * std::exp(clamp_delta(s.deltas[4])));
    box[5] = static_cast<float>(cfg.anchor_size[2] * std::exp(clamp_delta(s.deltas[5])));
    box[6] = static_cast<float>(s.deltas[6]);
    props.boxes.push_back(box);
    props.objectness.push_back(s.obj);
  }
  return props;
}

Detections roi_head(const Proposals& props, const SparseVoxelTensor& conv2,
                    const SparseVoxelTensor& conv3, const SparseVoxelTensor& conv4,
                    const ModelWeights& w, const ArchConfig& cfg) {
  const SparseVoxelTensor* scales[3] = {&conv2, &conv3, &conv4};
  const int strides[3] = {2, 4, 8};

  std::vector<float> refined(props.size());
  for (size_t pi = 0; pi < props.size(); ++pi) {
    const Box7& b = props.boxes[pi];
    double score_acc = w.roi_b;
    size_t woff = 0;
    for (int s = 0; s < 3; ++s) {
      const SparseVoxelTensor& t = *scales[s];
      const double sx = static_cast<double>(cfg.voxel_size[0]) * strides[s];
      const double sy = static_cast<double>(cfg.voxel_size[1]) * strides[s];
      const double sz = static_cast<double>(cfg.voxel_size[2]) * strides[s];
      std::vector<double> pooled(static_cast<size_t>(t.channels), 0.0);
      int64_t count = 0;
      for (size_t vi = 0; vi < t.nnz(); ++vi) {
        const Coord3& c = t.coords[vi];
        const double cx = cfg.range.min_x + (c[2] + 0.5) * sx;
        const double cy = cfg.range.min_y + (c[1] + 0.5) * sy;
        const double cz = cfg.range.min_z + (c[0] + 0.5) * sz;
        if (std::abs(cx - b[0]) <= b[3] * 0.5 && std::abs(cy - b[1]) <= b[4] * 0.5 &&
            std::abs(cz - b[2]) <= b[5] * 0.5) {
          const float* f = t.feature(vi);
          for (int32_t ch = 0; ch < t.channels; ++ch) pooled[ch] += f[ch];
          ++count;
        }
      }
      for (int32_t ch = 0; ch < t.channels; ++ch) {
        const double mean = count > 0 ? pooled[ch] / count : 0.0;
        score_acc += static_cast<double>(w.roi_w[woff + ch]) * mean;
      }
      woff += static_cast<size_t>(t.channels);
    }
    refined[pi] = sigmoid(score_acc);
  }

  std::vector<size_t> order(props.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return refined[a] > refined[b]; });

  Detections det;
  det.boxes.reserve(props.size());
  det.scores.reserve(props.size());
  det.labels.assign(props.size(), 0);
  for (size_t i : order) {
    det.boxes.push_back(props.boxes[i]);
    det.scores.push_back(refined[i]);
  }
  return det;
}

}  // namespace spc
