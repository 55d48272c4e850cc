// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/tensor.hpp"

#include <algorithm>
#include <numeric>

namespace spc {

namespace {

bool in_bounds(const Coord3& c, const Coord3& shape) {
  for (int a = 0; a < 3; ++a) {
    if (c[a] < 0 || c[a] >= shape[a]) return false;
  }
  return true;
}

void check_bounds(const SparseVoxelTensor& t) {
  for (const Coord3& c : t.coords) {
    if (!in_bounds(c, t.spatial_shape)) {
      fail(Status::OutOfBounds,
           "voxel (" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," +
               std::to_string(c[2]) + ") outside grid");
    }
  }
}

}  // namespace

bool is_canonical(const SparseVoxelTensor& t) {
  if (t.features.size() != t.nnz() * static_cast<size_t>(t.channels)) return false;
  for (size_t i = 0; i < t.coords.size(); ++i) {
    if (!in_bounds(t.coords[i], t.spatial_shape)) return false;
    if (i > 0 && !(t.coords[i - 1] < t.coords[i])) return false;
  }
  return true;
}

SparseVoxelTensor to_canonical(const SparseVoxelTensor& t) {
  if (t.features.size() != t.nnz() * static_cast<size_t>(t.channels)) {
    fail(Status::ShapeError, "features length does not match nnz * channels");
  }
  check_bounds(t);

  std::vector<size_t> order(t.nnz());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return t.coords[a] < t.coords[b]; });

  SparseVoxelTensor out;
  out.spatial_shape = t.spatial_shape;
  out.channels = t.channels;
  out.coords.reserve(t.nnz());
  out.features.reserve(t.features.size());
  for (size_t i = 0; i < order.size(); ++i) {
    const Coord3& c = t.coords[order[i]];
    if (i > 0 && c == out.coords.back()) {
      fail(Status::DuplicateCoord,
           "duplicate voxel (" + std::to_string(c[0]) + "," +
               std::to_string(c[1]) + "," + std::to_string(c[2]) + ")");
    }
    out.coords.push_back(c);
    const float* f = t.feature(order[i]);
    out.features.insert(out.features.end(), f, f + t.channels);
  }
  return out;
}

std::vector<float> densify(const SparseVoxelTensor& t, int64_t cap) {
  if (!is_canonical(t)) fail(Status::NonCanonical, "densify requires canonical input");
  const int64_t d = t.spatial_shape[0], h = t.spatial_shape[1], w = t.spatial_shape[2];
  const int64_t total = d * h * w * t.channels;
  if (total > cap) {
    fail(Status::SizeError, "dense expansion of " + std::to_string(total) +
                                " elements exceeds cap " + std::to_string(cap));
  }
  std::vector<float> dense(static_cast<size_t>(total), 0.f);
  for (size_t i = 0; i < t.nnz(); ++i) {
    const Coord3& c = t.coords[i];
    const float* f = t.feature(i);
    for (int32_t ch = 0; ch < t.channels; ++ch) {
      dense[static_cast<size_t>(((ch * d + c[0]) * h + c[1]) * w + c[2])] = f[ch];
    }
  }
  return dense;
}

SparseVoxelTensor sparsify(const std::vector<float>& dense, Coord3 spatial_shape,
                           int32_t channels) {
  const int64_t d = spatial_shape[0], h = spatial_shape[1], w = spatial_shape[2];
  if (static_cast<int64_t>(dense.size()) != d * h * w * channels) {
    fail(Status::ShapeError, "dense buffer does not match shape");
  }
  SparseVoxelTensor out;
  out.spatial_shape = spatial_shape;
  out.channels = channels;
  for (int32_t zd = 0; zd < d; ++zd) {
    for (int32_t yh = 0; yh < h; ++yh) {
      for (int32_t xw = 0; xw < w; ++xw) {
        bool occupied = false;
        for (int32_t ch = 0; ch < channels && !occupied; ++ch) {
          occupied = dense[static_cast<size_t>(((ch * d + zd) * h + yh) * w + xw)] != 0.f;
        }
        if (!occupied) continue;
        out.coords.push_back({zd, yh, xw});
        for (int32_t ch = 0; ch < channels; ++ch) {
          out.features.push_back(
              dense[static_cast<size_t>(((ch * d + zd) * h + yh) * w + xw)]);
        }
      }
    }
  }
  return out;
}

}  // namespace spc
