// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spc/error.hpp"

namespace spc {

struct Point {
  float x = 0.f;
  float y = 0.f;
  float z = 0.f;
  float intensity = 0.f;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Raw LiDAR sweep. Point order is preserved from the source file; several
/// downstream guarantees (voxel truncation, bit-exact replays) depend on it.
struct PointCloud {
  std::vector<Point> points;
  std::string scene_id;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Axis-aligned crop bounds, half-open: min <= v < max on every axis.
struct Range3D {
  float min_x, min_y, min_z;
  float max_x, max_y, max_z;

  bool valid() const {
    return min_x < max_x && min_y < max_y && min_z < max_z;
  }

  bool contains(const Point& p) const {
    return p.x >= min_x && p.x < max_x && p.y >= min_y && p.y < max_y &&
           p.z >= min_z && p.z < max_z;
  }

  friend bool operator==(const Range3D&, const Range3D&) = default;
};

/// Parse a KITTI velodyne buffer: flat little-endian float32 quadruples
/// (x, y, z, intensity), no header. Throws LengthError if the byte count is
/// not a multiple of 16, ValueError on any non-finite component.
PointCloud load_kitti_bin(std::span<const std::byte> raw, std::string scene_id);

/// Inverse of load_kitti_bin; load-then-serialize is byte-identical.
std::vector<std::byte> to_kitti_bin(const PointCloud& cloud);

PointCloud load_kitti_file(const std::filesystem::path& path);
void write_kitti_file(const std::filesystem::path& path, const PointCloud& cloud);

/// All `.bin` files directly under dir, sorted by filename.
std::vector<std::filesystem::path> list_scene_files(const std::filesystem::path& dir);

/// Keep exactly the points inside `range`, preserving input order.
PointCloud filter_range(const PointCloud& cloud, const Range3D& range);

}  // namespace spc
