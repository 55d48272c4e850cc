// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/weights.hpp"

#include <bit>

#include "spc/rng.hpp"

namespace spc {

namespace {

float draw(SplitMix64& rng) {
  return static_cast<float>(rng.next_unit() * 0.2 - 0.1);
}

void fill(SplitMix64& rng, std::vector<float>& v, size_t n) {
  v.resize(n);
  for (float& x : v) x = draw(rng);
}

ConvWeights make_conv(SplitMix64& rng, int32_t out_c, int32_t in_c, int32_t kernel,
                      int32_t dims) {
  ConvWeights cw;
  cw.out_c = out_c;
  cw.in_c = in_c;
  cw.kernel = kernel;
  cw.dims = dims;
  fill(rng, cw.w, static_cast<size_t>(out_c) * in_c * cw.tap_count());
  fill(rng, cw.b, static_cast<size_t>(out_c));
  return cw;
}

void append_floats(std::vector<std::byte>& out, std::span<const float> v) {
  for (float f : v) {
    uint32_t u = std::bit_cast<uint32_t>(f);
    out.push_back(std::byte(u & 0xff));
    out.push_back(std::byte((u >> 8) & 0xff));
    out.push_back(std::byte((u >> 16) & 0xff));
    out.push_back(std::byte((u >> 24) & 0xff));
  }
}

class BlobReader {
 public:
  explicit BlobReader(std::span<const std::byte> blob) : blob_(blob) {}

  void take(std::vector<float>& out, size_t n) {
    if (pos_ + n * 4 > blob_.size()) {
      fail(Status::ShapeError, "weight blob too short for configured architecture");
    }
    out.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = 0;
      for (int b = 3; b >= 0; --b) {
        u = (u << 8) | std::to_integer<uint32_t>(blob_[pos_ + i * 4 + b]);
      }
      out[i] = std::bit_cast<float>(u);
    }
    pos_ += n * 4;
  }

  float take_one() {
    std::vector<float> tmp;
    take(tmp, 1);
    return tmp[0];
  }

  void expect_end() const {
    if (pos_ != blob_.size()) {
      fail(Status::ShapeError, "weight blob longer than configured architecture");
    }
  }

 private:
  std::span<const std::byte> blob_;
  size_t pos_ = 0;
};

}  // namespace

int32_t bev_input_channels(const ArchConfig& cfg) {
  return cfg.conv_channels[3] * cfg.stage_shape(4)[0];
}

ModelWeights init_weights(uint64_t seed, const ArchConfig& cfg) {
  cfg.validate();
  SplitMix64 rng(seed);
  ModelWeights mw;
  mw.seed = seed;
  int32_t in_c = 4;
  for (int k = 0; k < 4; ++k) {
    mw.conv3d[k] = make_conv(rng, cfg.conv_channels[k], in_c, 3, 3);
    in_c = cfg.conv_channels[k];
  }
  mw.bev_conv1 = make_conv(rng, cfg.backbone2d_channels, bev_input_channels(cfg), 3, 2);
  mw.bev_conv2 = make_conv(rng, cfg.backbone2d_channels, cfg.backbone2d_channels, 3, 2);
  mw.head_conv = make_conv(rng, 8, cfg.backbone2d_channels, 1, 2);
  const size_t pooled = static_cast<size_t>(cfg.conv_channels[1]) +
                        cfg.conv_channels[2] + cfg.conv_channels[3];
  fill(rng, mw.roi_w, pooled);
  mw.roi_b = draw(rng);
  return mw;
}

std::vector<std::byte> weights_to_blob(const ModelWeights& w) {
  std::vector<std::byte> blob;
  for (const ConvWeights& c : w.conv3d) {
    append_floats(blob, c.w);
    append_floats(blob, c.b);
  }
  for (const ConvWeights* c : {&w.bev_conv1, &w.bev_conv2, &w.head_conv}) {
    append_floats(blob, c->w);
    append_floats(blob, c->b);
  }
  append_floats(blob, w.roi_w);
  append_floats(blob, std::span<const float>(&w.roi_b, 1));
  return blob;
}

ModelWeights weights_from_blob(std::span<const std::byte> blob, uint64_t seed,
                               const ArchConfig& cfg) {
  cfg.validate();
  // Shapes come from the config; the blob carries values only.
  ModelWeights mw;
  mw.seed = seed;
  BlobReader r(blob);
  int32_t in_c = 4;
  for (int k = 0; k < 4; ++k) {
    ConvWeights& c = mw.conv3d[k];
    c.out_c = cfg.conv_channels[k];
    c.in_c = in_c;
    c.kernel = 3;
    c.dims = 3;
    r.take(c.w, static_cast<size_t>(c.out_c) * c.in_c * c.tap_count());
    r.take(c.b, static_cast<size_t>(c.out_c));
    in_c = c.out_c;
  }
  auto take_2d = [&](ConvWeights& c, int32_t out_c, int32_t cin, int32_t kernel) {
    c.out_c = out_c;
    c.in_c = cin;
    c.kernel = kernel;
    c.dims = 2;
    r.take(c.w, static_cast<size_t>(out_c) * cin * c.tap_count());
    r.take(c.b, static_cast<size_t>(out_c));
  };
  take_2d(mw.bev_conv1, cfg.backbone2d_channels, bev_input_channels(cfg), 3);
  take_2d(mw.bev_conv2, cfg.backbone2d_channels, cfg.backbone2d_channels, 3);
  take_2d(mw.head_conv, 8, cfg.backbone2d_channels, 1);
  const size_t pooled = static_cast<size_t>(cfg.conv_channels[1]) +
                        cfg.conv_channels[2] + cfg.conv_channels[3];
  r.take(mw.roi_w, pooled);
  mw.roi_b = r.take_one();
  r.expect_end();
  return mw;
}

}  // namespace spc
