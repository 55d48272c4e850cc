// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spc/latency.hpp"
#include "spc/runtime.hpp"

namespace spc {

/// Per-module share of the pipeline, plus the raw per-step profile that the
/// planner consumes.
struct ProfileReport {
  Profile profile;
  std::vector<std::pair<std::string, double>> module_ratio_pct;  // six modules
  std::vector<std::pair<std::string, double>> stage_ratio_pct;   // conv1..conv4
  double pre_ms_mean = 0.0;
  double module_total_ms = 0.0;
  uint64_t input_bytes_raw_mean = 0;      // scene bytes as loaded
  uint64_t input_bytes_cropped_mean = 0;  // after range filtering
  size_t scene_count = 0;
  int runs = 0;
};

/// Render "name pct%" rows with five decimals.
std::string render_ratio_table(
    const std::vector<std::pair<std::string, double>>& rows);

/// Measure per-step mean times and per-split payload sizes over a dataset.
/// Throws EmptyDataset when the directory has no scenes. Server-side step
/// times are recorded equal to device times (single-host measurement).
ProfileReport bench_profile(const Engine& engine,
                            const std::filesystem::path& dataset_dir, int runs,
                            int warmup);

std::string profile_report_to_json(const ProfileReport& r);
void write_profile_report(const std::filesystem::path& out_dir,
                          const ProfileReport& r);

struct SweepRow {
  std::string split_label;
  uint64_t payload_bytes_mean = 0;
  double transfer_ms_mean = 0.0;
  double transfer_ms_median = 0.0;
  double edge_ms_mean = 0.0;
  double edge_ms_median = 0.0;
  double total_ms_mean = 0.0;
  double total_ms_median = 0.0;
  double inference_reduction_pct = 0.0;  // vs the monolithic baseline, 1 decimal
  double edge_reduction_pct = 0.0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// The four measurement families (total time, edge time, transfer time,
/// transfer size) per split pattern plus a monolithic baseline row.
struct SweepReport {
  std::vector<SweepRow> rows;  // rows[0] is the baseline
  size_t scene_count = 0;
  int runs = 0;
  int warmup = 0;
  uint64_t config_hash = 0;
  uint64_t input_bytes_raw_mean = 0;
  uint64_t input_bytes_cropped_mean = 0;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

/// Run the monolithic baseline plus each requested split against a server.
/// With no server address, both roles run in-process over loopback. On a
/// mid-sweep failure, partial results are flushed with a failure marker
/// before the error propagates.
SweepReport bench_sweep(const Engine& engine,
                        const std::filesystem::path& dataset_dir,
                        const std::vector<std::string>& split_labels,
                        const std::optional<std::pair<std::string, uint16_t>>& server,
                        const LinkEmulation& link, int runs, int warmup,
                        const std::optional<std::filesystem::path>& out_dir);

std::string sweep_to_csv(const SweepReport& r);
SweepReport sweep_from_csv(const std::string& text);
std::string sweep_to_json(const SweepReport& r);
SweepReport sweep_from_json(const std::string& text);
std::string sweep_to_markdown(const SweepReport& r);
void write_sweep_report(const std::filesystem::path& out_dir, const SweepReport& r);

struct ReplayCheck {
  std::string name;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ReplayReport {
  std::vector<ReplayCheck> checks;
  bool all_pass = false;
};

/// Feed the published reference measurements (edge-only baseline vs three
/// split patterns on the original hardware) through the reduction and
/// timing-decomposition arithmetic and verify the stated numbers.
ReplayReport replay_reference();

std::string replay_to_text(const ReplayReport& r);
std::string replay_to_json(const ReplayReport& r);

/// Per-step profile synthesized from the same reference measurements:
/// device totals 322 ms with the measured head times at each split, payload
/// sizes from the reported transfer data, and a 3x-faster server. Used to
/// sanity-check the planner against the published choice.
Profile reference_profile();
LinkModel reference_link();

/// Deterministic synthetic scenes: clustered boxes plus ground-plane noise,
/// emitted in short same-voxel bursts the way dense close-range returns
/// cluster. Files are KITTI-layout `.bin`, byte-identical for a given seed.
void gen_scenes(const std::filesystem::path& out_dir, int count,
                int points_per_scene, uint64_t seed, const Range3D& range);

/// Single generated scene without touching the filesystem.
PointCloud gen_scene(int points, uint64_t seed, const Range3D& range,
                     const std::string& scene_id);

}  // namespace spc
