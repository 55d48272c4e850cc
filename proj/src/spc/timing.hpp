// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

namespace spc {

/// Per-inference measurement record. Invariants kept by construction:
/// edge_execution_ms = head_compute_ms + transfer_ms, and the four phase
/// fields sum to total_inference_ms (result_return_ms absorbs the protocol
/// wait). payload_bytes is the encoded bundle size, not the framed size.
struct TimingReport {
  double head_compute_ms = 0.0;
  double transfer_ms = 0.0;
  double tail_compute_ms = 0.0;
  double result_return_ms = 0.0;
  double total_inference_ms = 0.0;
  double edge_execution_ms = 0.0;
  uint64_t payload_bytes = 0;
  std::string split_label;
  std::string scene_id;

  friend bool operator==(const TimingReport&, const TimingReport&) = default;
};

}  // namespace spc
