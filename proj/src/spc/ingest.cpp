// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/ingest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace spc {

namespace {

float read_f32_le(const std::byte* p) {
  uint32_t u = static_cast<uint32_t>(std::to_integer<uint8_t>(p[0])) |
               static_cast<uint32_t>(std::to_integer<uint8_t>(p[1])) << 8 |
               static_cast<uint32_t>(std::to_integer<uint8_t>(p[2])) << 16 |
               static_cast<uint32_t>(std::to_integer<uint8_t>(p[3])) << 24;
  return std::bit_cast<float>(u);
}

void write_f32_le(std::vector<std::byte>& out, float v) {
  uint32_t u = std::bit_cast<uint32_t>(v);
  out.push_back(std::byte(u & 0xff));
  out.push_back(std::byte((u >> 8) & 0xff));
  out.push_back(std::byte((u >> 16) & 0xff));
  out.push_back(std::byte((u >> 24) & 0xff));
}

}  // namespace

PointCloud load_kitti_bin(std::span<const std::byte> raw, std::string scene_id) {
  if (raw.size() % 16 != 0) {
    fail(Status::LengthError,
         "point record misaligned: " + std::to_string(raw.size()) +
             " bytes is not a multiple of 16");
  }
  PointCloud cloud;
  cloud.scene_id = std::move(scene_id);
  cloud.points.reserve(raw.size() / 16);
  for (size_t off = 0; off < raw.size(); off += 16) {
    Point p;
    p.x = read_f32_le(raw.data() + off);
    p.y = read_f32_le(raw.data() + off + 4);
    p.z = read_f32_le(raw.data() + off + 8);
    p.intensity = read_f32_le(raw.data() + off + 12);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity)) {
      fail(Status::ValueError,
           "non-finite component in point record " + std::to_string(off / 16));
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

std::vector<std::byte> to_kitti_bin(const PointCloud& cloud) {
  std::vector<std::byte> out;
  out.reserve(cloud.points.size() * 16);
  for (const Point& p : cloud.points) {
    write_f32_le(out, p.x);
    write_f32_le(out, p.y);
    write_f32_le(out, p.z);
    write_f32_le(out, p.intensity);
  }
  return out;
}

PointCloud load_kitti_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Status::IoError, "cannot open " + path.string());
  std::vector<char> buf((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  return load_kitti_bin(
      std::span<const std::byte>(reinterpret_cast<const std::byte*>(buf.data()),
                                 buf.size()),
      path.stem().string());
}

void write_kitti_file(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Status::IoError, "cannot open " + path.string() + " for write");
  auto bytes = to_kitti_bin(cloud);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Status::IoError, "short write to " + path.string());
}

std::vector<std::filesystem::path> list_scene_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    fail(Status::IoError, "not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

PointCloud filter_range(const PointCloud& cloud, const Range3D& range) {
  if (!range.valid()) fail(Status::InvalidArgument, "degenerate crop range");
  PointCloud out;
  out.scene_id = cloud.scene_id;
  out.points.reserve(cloud.points.size());
  for (const Point& p : cloud.points) {
    if (range.contains(p)) out.points.push_back(p);
  }
  return out;
}

}  // namespace spc
