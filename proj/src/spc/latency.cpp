// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/latency.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace spc {

namespace {

double step_cost(const std::map<std::string, double>& table, const std::string& step) {
  auto it = table.find(step);
  if (it == table.end()) {
    fail(Status::MissingProfile, "profile has no duration for step '" + step + "'");
  }
  return it->second;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

double parse_double_field(const std::string& v) {
  double out = 0.0;
  auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    fail(Status::ValueError, "bad numeric field '" + v + "'");
  }
  return out;
}

}  // namespace

LatencyEstimate estimate_latency(const Profile& p, const ModuleGraph& g,
                                 const SplitPoint& s, const LinkModel& link) {
  if (s.index < 0 || s.index > static_cast<int>(g.step_count())) {
    fail(Status::IndexError, "split index " + std::to_string(s.index) + " out of range");
  }
  if (!(link.bandwidth_bps > 0.0)) {
    fail(Status::InvalidArgument, "link bandwidth must be positive");
  }
  if (link.base_latency_ms < 0.0) {
    fail(Status::InvalidArgument, "link latency must be non-negative");
  }

  const SplitPlan plan = partition(g, s);
  LatencyEstimate est;
  for (const std::string& step : plan.head_steps) {
    est.head_ms += step_cost(p.device_ms, step);
  }

  if (plan.tail_steps.empty()) {
    // Fully on-device: no link involved at all.
    est.edge_execution_ms = est.head_ms;
    est.total_ms = est.head_ms;
    return est;
  }

  auto payload_it = p.payload_bytes.find(plan.label);
  if (payload_it == p.payload_bytes.end()) {
    fail(Status::MissingProfile, "profile has no payload size for split '" + plan.label + "'");
  }
  est.transfer_ms = static_cast<double>(payload_it->second) / link.bandwidth_bps * 1000.0 +
                    link.base_latency_ms;
  for (const std::string& step : plan.tail_steps) {
    est.tail_ms += step_cost(p.server_ms, step);
  }
  est.result_return_ms =
      kResultReturnBytes / link.bandwidth_bps * 1000.0 + link.base_latency_ms;
  est.edge_execution_ms = est.head_ms + est.transfer_ms;
  est.total_ms = est.head_ms + est.transfer_ms + est.tail_ms + est.result_return_ms;
  return est;
}

SplitPoint plan_best_split(const Profile& p, const ModuleGraph& g,
                           const LinkModel& link) {
  SplitPoint best;
  double best_total = 0.0;
  bool first = true;
  for (const SplitPoint& s : all_split_points(g)) {
    const double total = estimate_latency(p, g, s, link).total_ms;
    if (first || total < best_total) {
      best = s;
      best_total = total;
      first = false;
    }
  }
  return best;
}

double reduction_percent(double baseline_ms, double split_ms) {
  if (!(baseline_ms > 0.0)) {
    fail(Status::DomainError, "baseline must be positive");
  }
  return 100.0 * (baseline_ms - split_ms) / baseline_ms;
}

double round1(double v) { return std::round(v * 10.0) / 10.0; }

std::string profile_to_csv(const Profile& p) {
  std::ostringstream out;
  out.precision(17);
  out << "step,device_ms,server_ms\n";
  for (const auto& [step, dev] : p.device_ms) {
    auto it = p.server_ms.find(step);
    const double srv = it != p.server_ms.end() ? it->second : dev;
    out << step << "," << dev << "," << srv << "\n";
  }
  out << "split,payload_bytes\n";
  for (const auto& [label, bytes] : p.payload_bytes) {
    out << label << "," << bytes << "\n";
  }
  return out.str();
}

Profile profile_from_csv(const std::string& text) {
  Profile p;
  std::istringstream in(text);
  std::string line;
  int section = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.back() == '\r') {
      while (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
    }
    if (line == "step,device_ms,server_ms") {
      section = 1;
      continue;
    }
    if (line == "split,payload_bytes") {
      section = 2;
      continue;
    }
    auto fields = split_csv_line(line);
    if (section == 1 && fields.size() == 3) {
      p.device_ms[fields[0]] = parse_double_field(fields[1]);
      p.server_ms[fields[0]] = parse_double_field(fields[2]);
    } else if (section == 2 && fields.size() == 2) {
      p.payload_bytes[fields[0]] =
          static_cast<uint64_t>(parse_double_field(fields[1]));
    } else {
      fail(Status::ValueError, "unexpected profile CSV line: '" + line + "'");
    }
  }
  return p;
}

void write_profile_csv(const std::filesystem::path& path, const Profile& p) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(Status::IoError, "cannot open " + path.string() + " for write");
  out << profile_to_csv(p);
}

Profile read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Status::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return profile_from_csv(buf.str());
}

}  // namespace spc
