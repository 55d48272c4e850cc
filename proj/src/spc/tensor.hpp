// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "spc/error.hpp"

namespace spc {

/// Default element cap for densification (2^26 floats = 256 MiB).
inline constexpr int64_t kDensifyCapDefault = int64_t{1} << 26;

using Coord3 = std::array<int32_t, 3>;  // (d, h, w) = (z, y, x) cell indices

/// Coordinate-indexed voxel features. Canonical form means: coords unique,
/// in-bounds, and sorted lexicographically by (d, h, w) with `features`
/// permuted in lockstep. Canonical form is what makes bit-exact tensor
/// comparison meaningful, so everything downstream of the voxelizer both
/// consumes and produces it.
struct SparseVoxelTensor {
  Coord3 spatial_shape{0, 0, 0};  // (D, H, W)
  int32_t channels = 0;
  std::vector<Coord3> coords;
  std::vector<float> features;  // nnz * channels, voxel-major

  size_t nnz() const { return coords.size(); }
  const float* feature(size_t i) const { return features.data() + i * channels; }

  friend bool operator==(const SparseVoxelTensor&, const SparseVoxelTensor&) = default;
};

/// Dense 2D feature map (channels x height x width, row-major).
struct DenseBEVTensor {
  int32_t channels = 0;
  int32_t height = 0;
  int32_t width = 0;
  std::vector<float> data;

  float at(int32_t c, int32_t h, int32_t w) const {
    return data[(static_cast<size_t>(c) * height + h) * width + w];
  }

  friend bool operator==(const DenseBEVTensor&, const DenseBEVTensor&) = default;
};

using Box7 = std::array<float, 7>;  // cx, cy, cz, dx, dy, dz, yaw

/// Pre-refinement proposals from the dense head, ordered by objectness
/// (descending, ties broken by cell position).
struct Proposals {
  std::vector<Box7> boxes;
  std::vector<float> objectness;

  size_t size() const { return boxes.size(); }
  friend bool operator==(const Proposals&, const Proposals&) = default;
};

/// Final detections, scores sorted descending.
struct Detections {
  std::vector<Box7> boxes;
  std::vector<float> scores;
  std::vector<int32_t> labels;

  size_t size() const { return boxes.size(); }
  friend bool operator==(const Detections&, const Detections&) = default;
};

using TensorPayload = std::variant<SparseVoxelTensor, DenseBEVTensor>;

struct BundleEntry {
  std::string id;
  TensorPayload payload;

  friend bool operator==(const BundleEntry&, const BundleEntry&) = default;
};

/// Ordered set of intermediate tensors crossing the device-server link.
/// Entry order is pipeline production order.
struct TensorBundle {
  std::vector<BundleEntry> entries;

  const BundleEntry* find(const std::string& id) const {
    for (const auto& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }

  friend bool operator==(const TensorBundle&, const TensorBundle&) = default;
};

bool is_canonical(const SparseVoxelTensor& t);

/// Sort coords lexicographically, permuting features in lockstep. Throws
/// DuplicateCoord / OutOfBounds when the input violates the preconditions.
/// Idempotent.
SparseVoxelTensor to_canonical(const SparseVoxelTensor& t);

/// Expand to a dense channels x D x H x W array (zeros where unoccupied).
/// Requires canonical input; throws SizeError above `cap` elements.
std::vector<float> densify(const SparseVoxelTensor& t,
                           int64_t cap = kDensifyCapDefault);

/// Inverse of densify: collect every cell with a nonzero feature vector.
/// Output is canonical by construction.
SparseVoxelTensor sparsify(const std::vector<float>& dense, Coord3 spatial_shape,
                           int32_t channels);

}  // namespace spc
