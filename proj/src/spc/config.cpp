// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spc {

namespace {

std::string fmt_float(float v) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

float parse_float(const std::string& key, const std::string& v) {
  float out = 0.f;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    fail(Status::ConfigError, "bad float for " + key + ": '" + v + "'");
  }
  return out;
}

int64_t parse_int(const std::string& key, const std::string& v) {
  int64_t out = 0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    fail(Status::ConfigError, "bad integer for " + key + ": '" + v + "'");
  }
  return out;
}

int32_t grid_dim(float lo, float hi, float voxel) {
  const double q = (static_cast<double>(hi) - static_cast<double>(lo)) /
                   static_cast<double>(voxel);
  const double r = std::round(q);
  // Tolerate float32 noise when the extent is an exact multiple of the
  // voxel size (e.g. 19.2f / 0.4f lands at 48.0000016).
  const double dim = (std::abs(q - r) < 1e-4) ? r : std::ceil(q);
  return static_cast<int32_t>(dim);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ArchConfig ArchConfig::kitti() { return ArchConfig{}; }

ArchConfig ArchConfig::tiny() {
  ArchConfig c;
  c.range = Range3D{0.f, -9.6f, -3.f, 19.2f, 9.6f, 1.8f};
  c.voxel_size = {0.4f, 0.4f, 0.4f};
  return c;
}

ArchConfig ArchConfig::named_profile(const std::string& name) {
  if (name == "default" || name == "kitti") return kitti();
  if (name == "tiny") return tiny();
  fail(Status::ConfigError, "unknown profile '" + name + "'");
}

Coord3 ArchConfig::grid_shape() const {
  return {grid_dim(range.min_z, range.max_z, voxel_size[2]),
          grid_dim(range.min_y, range.max_y, voxel_size[1]),
          grid_dim(range.min_x, range.max_x, voxel_size[0])};
}

Coord3 ArchConfig::stage_shape(int k) const {
  Coord3 s = grid_shape();
  for (int i = 1; i < k; ++i) {
    for (int a = 0; a < 3; ++a) s[a] = (s[a] + 1) / 2;
  }
  return s;
}

void ArchConfig::validate() const {
  if (!range.valid()) fail(Status::ConfigError, "range min must be < max per axis");
  for (float v : voxel_size) {
    if (!(v > 0.f)) fail(Status::ConfigError, "voxel sizes must be positive");
  }
  Coord3 g = grid_shape();
  for (int32_t d : g) {
    if (d <= 0) fail(Status::ConfigError, "voxel grid has a non-positive extent");
  }
  if (max_points_per_voxel <= 0) {
    fail(Status::ConfigError, "max_points_per_voxel must be positive");
  }
  for (int32_t c : conv_channels) {
    if (c <= 0) fail(Status::ConfigError, "conv channels must be positive");
  }
  if (backbone2d_channels <= 0) {
    fail(Status::ConfigError, "backbone2d_channels must be positive");
  }
  if (top_k <= 0) fail(Status::ConfigError, "top_k must be positive");
  for (float v : anchor_size) {
    if (!(v > 0.f)) fail(Status::ConfigError, "anchor dimensions must be positive");
  }
  if (densify_cap <= 0) fail(Status::ConfigError, "densify_cap must be positive");
}

std::string ArchConfig::serialize() const {
  std::ostringstream out;
  out << "range_min_x=" << fmt_float(range.min_x) << "\n"
      << "range_min_y=" << fmt_float(range.min_y) << "\n"
      << "range_min_z=" << fmt_float(range.min_z) << "\n"
      << "range_max_x=" << fmt_float(range.max_x) << "\n"
      << "range_max_y=" << fmt_float(range.max_y) << "\n"
      << "range_max_z=" << fmt_float(range.max_z) << "\n"
      << "voxel_size_x=" << fmt_float(voxel_size[0]) << "\n"
      << "voxel_size_y=" << fmt_float(voxel_size[1]) << "\n"
      << "voxel_size_z=" << fmt_float(voxel_size[2]) << "\n"
      << "max_points_per_voxel=" << max_points_per_voxel << "\n"
      << "conv1_channels=" << conv_channels[0] << "\n"
      << "conv2_channels=" << conv_channels[1] << "\n"
      << "conv3_channels=" << conv_channels[2] << "\n"
      << "conv4_channels=" << conv_channels[3] << "\n"
      << "backbone2d_channels=" << backbone2d_channels << "\n"
      << "top_k=" << top_k << "\n"
      << "anchor_dx=" << fmt_float(anchor_size[0]) << "\n"
      << "anchor_dy=" << fmt_float(anchor_size[1]) << "\n"
      << "anchor_dz=" << fmt_float(anchor_size[2]) << "\n"
      << "anchor_z=" << fmt_float(anchor_z) << "\n"
      << "densify_cap=" << densify_cap << "\n";
  return out.str();
}

void ArchConfig::apply_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos) {
      fail(Status::ConfigError,
           "line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));
    if (key == "range_min_x") range.min_x = parse_float(key, val);
    else if (key == "range_min_y") range.min_y = parse_float(key, val);
    else if (key == "range_min_z") range.min_z = parse_float(key, val);
    else if (key == "range_max_x") range.max_x = parse_float(key, val);
    else if (key == "range_max_y") range.max_y = parse_float(key, val);
    else if (key == "range_max_z") range.max_z = parse_float(key, val);
    else if (key == "voxel_size_x") voxel_size[0] = parse_float(key, val);
    else if (key == "voxel_size_y") voxel_size[1] = parse_float(key, val);
    else if (key == "voxel_size_z") voxel_size[2] = parse_float(key, val);
    else if (key == "max_points_per_voxel") max_points_per_voxel = static_cast<int32_t>(parse_int(key, val));
    else if (key == "conv1_channels") conv_channels[0] = static_cast<int32_t>(parse_int(key, val));
    else if (key == "conv2_channels") conv_channels[1] = static_cast<int32_t>(parse_int(key, val));
    else if (key == "conv3_channels") conv_channels[2] = static_cast<int32_t>(parse_int(key, val));
    else if (key == "conv4_channels") conv_channels[3] = static_cast<int32_t>(parse_int(key, val));
    else if (key == "backbone2d_channels") backbone2d_channels = static_cast<int32_t>(parse_int(key, val));
    else if (key == "top_k") top_k = static_cast<int32_t>(parse_int(key, val));
    else if (key == "anchor_dx") anchor_size[0] = parse_float(key, val);
    else if (key == "anchor_dy") anchor_size[1] = parse_float(key, val);
    else if (key == "anchor_dz") anchor_size[2] = parse_float(key, val);
    else if (key == "anchor_z") anchor_z = parse_float(key, val);
    else if (key == "densify_cap") densify_cap = parse_int(key, val);
    else fail(Status::ConfigError, "unknown config key '" + key + "'");
  }
  validate();
}

ArchConfig ArchConfig::from_file(const std::filesystem::path& path) {
  return from_file(path, ArchConfig{});
}

ArchConfig ArchConfig::from_file(const std::filesystem::path& path,
                                 const ArchConfig& base) {
  std::ifstream in(path);
  if (!in) fail(Status::IoError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  ArchConfig cfg = base;
  cfg.apply_text(buf.str());
  return cfg;
}

uint64_t ArchConfig::arch_hash(uint64_t seed) const {
  std::string text = serialize() + "seed=" + std::to_string(seed) + "\n";
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace spc
