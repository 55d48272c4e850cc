// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "spc/ingest.hpp"
#include "spc/tensor.hpp"

namespace spc {

/// Detector architecture + voxelization parameters. Everything the two ends
/// of a split must agree on lives here; `arch_hash(seed)` is what the
/// handshake compares.
struct ArchConfig {
  Range3D range{0.f, -40.f, -3.f, 70.4f, 40.f, 1.f};
  std::array<float, 3> voxel_size{0.05f, 0.05f, 0.1f};  // (vx, vy, vz)
  int32_t max_points_per_voxel = 5;
  std::array<int32_t, 4> conv_channels{16, 32, 48, 64};
  int32_t backbone2d_channels = 64;
  int32_t top_k = 64;
  std::array<float, 3> anchor_size{3.9f, 1.6f, 1.56f};  // (dx, dy, dz)
  float anchor_z = -1.0f;
  int64_t densify_cap = kDensifyCapDefault;

  /// KITTI-scale geometry (the defaults above).
  static ArchConfig kitti();

  /// Coarse 0.4 m voxels over a short range; small enough that dense
  /// reference checks stay cheap.
  static ArchConfig tiny();

  static ArchConfig named_profile(const std::string& name);

  /// Base voxel grid (D, H, W) from range extent / voxel size, rounded up.
  Coord3 grid_shape() const;

  /// Grid shape of backbone stage `k` in 1..4 (stride 1, 2, 4, 8).
  Coord3 stage_shape(int k) const;

  /// Throws ConfigError if any invariant is violated.
  void validate() const;

  /// Canonical key=value serialization (fixed key order, shortest
  /// round-trip float formatting). Equal configs serialize identically.
  std::string serialize() const;

  /// Apply key=value lines ('#' comments allowed) on top of *this.
  /// Unknown keys are a ConfigError.
  void apply_text(const std::string& text);

  static ArchConfig from_file(const std::filesystem::path& path);
  static ArchConfig from_file(const std::filesystem::path& path,
                              const ArchConfig& base);

  /// FNV-1a over the canonical serialization plus the weight seed.
  uint64_t arch_hash(uint64_t seed) const;

  friend bool operator==(const ArchConfig&, const ArchConfig&) = default;
};

}  // namespace spc
