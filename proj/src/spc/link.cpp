// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/link.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "spc/error.hpp"

namespace spc {

namespace {
constexpr size_t kChunkBytes = 64 * 1024;
}

ShapedChannel::ShapedChannel(WriteSink sink, LinkEmulation link)
    : sink_(std::move(sink)), link_(link) {
  if (link_.bandwidth_bytes_per_s < 0.0 || link_.added_latency_ms < 0.0) {
    fail(Status::InvalidArgument, "link parameters must be non-negative");
  }
}

void ShapedChannel::transmit(std::span<const std::byte> data) {
  if (link_.passthrough()) {
    sink_(data);
    return;
  }
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  if (link_.added_latency_ms > 0.0) {
    std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(link_.added_latency_ms));
  }
  size_t sent = 0;
  while (sent < data.size()) {
    const size_t n = std::min(kChunkBytes, data.size() - sent);
    sink_(data.subspan(sent, n));
    sent += n;
    if (link_.bandwidth_bytes_per_s > 0.0) {
      const double budget_ms = link_.added_latency_ms +
                               static_cast<double>(sent) /
                                   link_.bandwidth_bytes_per_s * 1000.0;
      std::this_thread::sleep_until(
          start + std::chrono::duration_cast<Clock::duration>(
                      std::chrono::duration<double, std::milli>(budget_ms)));
    }
  }
  // A zero-length transmission still costs the latency, charged above.
}

}  // namespace spc
