// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "spc/graph.hpp"

namespace spc {

/// Measured (or synthesized) per-step costs plus per-split payload sizes.
struct Profile {
  std::map<std::string, double> device_ms;       // step id -> mean duration
  std::map<std::string, double> server_ms;       // step id -> mean duration
  std::map<std::string, uint64_t> payload_bytes;  // split label -> bundle size

  friend bool operator==(const Profile&, const Profile&) = default;
};

/// Planning link: constant bandwidth plus fixed per-transmission latency.
struct LinkModel {
  double bandwidth_bps = 0.0;   // must be > 0
  double base_latency_ms = 0.0;
};

struct LatencyEstimate {
  double head_ms = 0.0;
  double transfer_ms = 0.0;
  double tail_ms = 0.0;
  double result_return_ms = 0.0;
  double edge_execution_ms = 0.0;  // head + transfer
  double total_ms = 0.0;
};

/// Result payload size assumed for the return leg of every networked split.
inline constexpr double kResultReturnBytes = 1024.0;

/// Additive latency model: head compute on the device, uplink transfer,
/// tail compute on the server, result return. The monolithic split
/// (k = step_count) is exactly the device-side total with no link terms.
/// Throws MissingProfile when a step or split is not covered.
LatencyEstimate estimate_latency(const Profile& p, const ModuleGraph& g,
                                 const SplitPoint& s, const LinkModel& link);

/// Argmin of estimate_latency over every split point; ties go to the
/// earliest split.
SplitPoint plan_best_split(const Profile& p, const ModuleGraph& g,
                           const LinkModel& link);

/// 100 * (baseline - value) / baseline. Throws DomainError if baseline <= 0.
double reduction_percent(double baseline_ms, double split_ms);

/// Round to one decimal, the precision reductions are reported at.
double round1(double v);

/// Two-section CSV: "step,device_ms,server_ms" rows then
/// "split,payload_bytes" rows.
std::string profile_to_csv(const Profile& p);
Profile profile_from_csv(const std::string& text);
void write_profile_csv(const std::filesystem::path& path, const Profile& p);
Profile read_profile_csv(const std::filesystem::path& path);

}  // namespace spc
