// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace spc {

/// Emulated link shaping. bandwidth 0 means unlimited; latency is charged
/// once per transmission.
struct LinkEmulation {
  double bandwidth_bytes_per_s = 0.0;
  double added_latency_ms = 0.0;

  bool passthrough() const {
    return bandwidth_bytes_per_s <= 0.0 && added_latency_ms <= 0.0;
  }
};

using WriteSink = std::function<void(std::span<const std::byte>)>;

/// Paces writes through `sink` so one transmission takes at least
/// latency + bytes / bandwidth. Shaping state is owned by the instance, so
/// concurrent connections each shape independently.
class ShapedChannel {
 public:
  ShapedChannel(WriteSink sink, LinkEmulation link);

  /// One transmission: the added latency applies once, then chunks are
  /// released no faster than the configured bandwidth.
  void transmit(std::span<const std::byte> data);

 private:
  WriteSink sink_;
  LinkEmulation link_;
};

}  // namespace spc
