// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spc/config.hpp"

namespace spc {

/// Convolution kernel + bias. `w` is row-major [out_c][in_c][taps...] with
/// taps in (kd, kh, kw) order for 3D kernels and (kh, kw) for 2D.
struct ConvWeights {
  int32_t out_c = 0;
  int32_t in_c = 0;
  int32_t kernel = 1;  // taps per axis
  int32_t dims = 3;    // 3 for volumetric kernels, 2 for planar
  std::vector<float> w;
  std::vector<float> b;

  size_t tap_count() const {
    size_t t = 1;
    for (int i = 0; i < dims; ++i) t *= static_cast<size_t>(kernel);
    return t;
  }

  friend bool operator==(const ConvWeights&, const ConvWeights&) = default;
};

/// All learned parameters, fully determined by (seed, config). Both ends of
/// a split regenerate these independently; the HELLO hash guards agreement.
struct ModelWeights {
  uint64_t seed = 0;
  std::array<ConvWeights, 4> conv3d;  // backbone stages 1..4
  ConvWeights bev_conv1, bev_conv2;   // 2D backbone, 3x3
  ConvWeights head_conv;              // 1x1, out = 8 (objectness + 7 deltas)
  std::vector<float> roi_w;           // linear scorer over pooled multi-scale features
  float roi_b = 0.f;

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

/// Deterministic init: a single SplitMix64 stream seeded with `seed`,
/// uniform in [-0.1, 0.1), drawn in documented stage order
/// (conv1.w, conv1.b, ..., conv4.b, bev1.w, bev1.b, bev2.w, bev2.b,
///  head.w, head.b, roi.w, roi.b).
ModelWeights init_weights(uint64_t seed, const ArchConfig& cfg);

/// Flat little-endian float32 blob in the same stage order.
std::vector<std::byte> weights_to_blob(const ModelWeights& w);

/// Rebuild from a blob; sizes must match the config exactly.
ModelWeights weights_from_blob(std::span<const std::byte> blob, uint64_t seed,
                               const ArchConfig& cfg);

/// Number of channels entering the 2D backbone (conv4 channels x conv4 depth).
int32_t bev_input_channels(const ArchConfig& cfg);

}  // namespace spc
