// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/wire.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>

namespace spc {

namespace {

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::byte>& out) : out_(out) {}

  void u8(uint8_t v) { out_.push_back(std::byte(v)); }
  void u16(uint16_t v) {
    for (int i = 0; i < 2; ++i) out_.push_back(std::byte((v >> (8 * i)) & 0xff));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(std::byte((v >> (8 * i)) & 0xff));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(std::byte((v >> (8 * i)) & 0xff));
  }
  void i32(int32_t v) { u32(std::bit_cast<uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void bytes(const void* p, size_t n) {
    const auto* b = static_cast<const std::byte*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void short_string(const std::string& s) {
    if (s.size() > 255) fail(Status::Oversize, "string field exceeds 255 bytes");
    u8(static_cast<uint8_t>(s.size()));
    bytes(s.data(), s.size());
  }

 private:
  std::vector<std::byte>& out_;
};

/// Bounds-checked little-endian reader; every take() reports success so the
/// decoder can stay total.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> data) : data_(data) {}

  bool u8(uint8_t& v) {
    if (pos_ + 1 > data_.size()) return false;
    v = std::to_integer<uint8_t>(data_[pos_++]);
    return true;
  }
  bool u16(uint16_t& v) {
    uint64_t tmp;
    if (!uint_n(2, tmp)) return false;
    v = static_cast<uint16_t>(tmp);
    return true;
  }
  bool u32(uint32_t& v) {
    uint64_t tmp;
    if (!uint_n(4, tmp)) return false;
    v = static_cast<uint32_t>(tmp);
    return true;
  }
  bool u64(uint64_t& v) { return uint_n(8, v); }
  bool i32(int32_t& v) {
    uint32_t u;
    if (!u32(u)) return false;
    v = std::bit_cast<int32_t>(u);
    return true;
  }
  bool f32(float& v) {
    uint32_t u;
    if (!u32(u)) return false;
    v = std::bit_cast<float>(u);
    return true;
  }
  bool f64(double& v) {
    uint64_t u;
    if (!u64(u)) return false;
    v = std::bit_cast<double>(u);
    return true;
  }
  bool short_string(std::string& s) {
    uint8_t n;
    if (!u8(n)) return false;
    if (pos_ + n > data_.size()) return false;
    s.assign(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return true;
  }
  bool f32_array(std::vector<float>& out, size_t count) {
    if (count > (data_.size() - pos_) / 4) return false;
    out.resize(count);
    for (size_t i = 0; i < count; ++i) {
      if (!f32(out[i])) return false;
    }
    return true;
  }
  bool done() const { return pos_ == data_.size(); }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  bool uint_n(int n, uint64_t& v) {
    if (pos_ + static_cast<size_t>(n) > data_.size()) return false;
    v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<uint64_t>(std::to_integer<uint8_t>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += static_cast<size_t>(n);
    return true;
  }

  std::span<const std::byte> data_;
  size_t pos_ = 0;
};

void encode_bundle_into(ByteWriter& w, const TensorBundle& b) {
  if (b.entries.size() > 0xffff) fail(Status::Oversize, "bundle entry count exceeds u16");
  w.u16(static_cast<uint16_t>(b.entries.size()));
  for (const BundleEntry& e : b.entries) {
    w.short_string(e.id);
    if (const auto* sp = std::get_if<SparseVoxelTensor>(&e.payload)) {
      if (!is_canonical(*sp)) {
        fail(Status::NonCanonical, "bundle tensor '" + e.id + "' is not canonical");
      }
      if (sp->channels > 0xffff) fail(Status::Oversize, "channel count exceeds u16");
      w.u8(0);
      w.u16(static_cast<uint16_t>(sp->channels));
      for (int a = 0; a < 3; ++a) w.u32(static_cast<uint32_t>(sp->spatial_shape[a]));
      w.u32(static_cast<uint32_t>(sp->nnz()));
      for (const Coord3& c : sp->coords) {
        for (int a = 0; a < 3; ++a) w.i32(c[a]);
      }
      for (float f : sp->features) w.f32(f);
    } else {
      const auto& dn = std::get<DenseBEVTensor>(e.payload);
      if (dn.channels > 0xffff) fail(Status::Oversize, "channel count exceeds u16");
      w.u8(1);
      w.u16(static_cast<uint16_t>(dn.channels));
      w.u32(static_cast<uint32_t>(dn.height));
      w.u32(static_cast<uint32_t>(dn.width));
      for (float f : dn.data) w.f32(f);
    }
  }
}

bool decode_bundle_from(ByteReader& r, TensorBundle& b) {
  uint16_t count;
  if (!r.u16(count)) return false;
  b.entries.clear();
  b.entries.reserve(count);
  for (uint16_t i = 0; i < count; ++i) {
    BundleEntry e;
    if (!r.short_string(e.id)) return false;
    uint8_t kind;
    if (!r.u8(kind)) return false;
    if (kind == 0) {
      SparseVoxelTensor t;
      uint16_t channels;
      uint32_t nnz;
      if (!r.u16(channels)) return false;
      t.channels = channels;
      for (int a = 0; a < 3; ++a) {
        uint32_t v;
        if (!r.u32(v)) return false;
        t.spatial_shape[a] = static_cast<int32_t>(v);
      }
      if (!r.u32(nnz)) return false;
      // 12 coord bytes per voxel must still be in the buffer.
      if (nnz > r.remaining() / 12) return false;
      t.coords.resize(nnz);
      for (uint32_t v = 0; v < nnz; ++v) {
        for (int a = 0; a < 3; ++a) {
          if (!r.i32(t.coords[v][a])) return false;
        }
      }
      if (!r.f32_array(t.features, static_cast<size_t>(nnz) * channels)) return false;
      e.payload = std::move(t);
    } else if (kind == 1) {
      DenseBEVTensor t;
      uint16_t channels;
      uint32_t h, wdt;
      if (!r.u16(channels) || !r.u32(h) || !r.u32(wdt)) return false;
      t.channels = channels;
      t.height = static_cast<int32_t>(h);
      t.width = static_cast<int32_t>(wdt);
      const uint64_t n = static_cast<uint64_t>(channels) * h * wdt;
      if (n > r.remaining() / 4) return false;
      if (!r.f32_array(t.data, static_cast<size_t>(n))) return false;
      e.payload = std::move(t);
    } else {
      return false;
    }
    b.entries.push_back(std::move(e));
  }
  return true;
}

void encode_payload(ByteWriter& w, const Message& m) {
  std::visit(
      [&](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, HelloMsg>) {
          w.u64(msg.seed);
          w.u64(msg.arch_hash);
        } else if constexpr (std::is_same_v<T, InferRequestMsg>) {
          w.short_string(msg.split_label);
          encode_bundle_into(w, msg.bundle);
        } else if constexpr (std::is_same_v<T, ResultMsg>) {
          const Detections& d = msg.detections;
          w.u32(static_cast<uint32_t>(d.size()));
          for (size_t i = 0; i < d.size(); ++i) {
            for (float v : d.boxes[i]) w.f32(v);
            w.f32(d.scores[i]);
            w.i32(d.labels[i]);
          }
        } else if constexpr (std::is_same_v<T, TimingMsg>) {
          const TimingReport& t = msg.report;
          w.short_string(t.split_label);
          w.short_string(t.scene_id);
          w.f64(t.head_compute_ms);
          w.f64(t.transfer_ms);
          w.f64(t.tail_compute_ms);
          w.f64(t.result_return_ms);
          w.f64(t.total_inference_ms);
          w.f64(t.edge_execution_ms);
          w.u64(t.payload_bytes);
        } else if constexpr (std::is_same_v<T, ErrorMsg>) {
          w.u32(msg.code);
          w.u32(static_cast<uint32_t>(msg.text.size()));
          w.bytes(msg.text.data(), msg.text.size());
        }
      },
      m);
}

bool decode_payload(MsgType type, std::span<const std::byte> payload, Message& out) {
  ByteReader r(payload);
  switch (type) {
    case MsgType::Hello: {
      HelloMsg m;
      if (!r.u64(m.seed) || !r.u64(m.arch_hash) || !r.done()) return false;
      out = m;
      return true;
    }
    case MsgType::InferRequest: {
      InferRequestMsg m;
      if (!r.short_string(m.split_label)) return false;
      if (!decode_bundle_from(r, m.bundle) || !r.done()) return false;
      out = std::move(m);
      return true;
    }
    case MsgType::Result: {
      ResultMsg m;
      uint32_t count;
      if (!r.u32(count)) return false;
      if (count > payload.size() / 36) return false;  // 9 fields * 4 bytes
      m.detections.boxes.resize(count);
      m.detections.scores.resize(count);
      m.detections.labels.resize(count);
      for (uint32_t i = 0; i < count; ++i) {
        for (int j = 0; j < 7; ++j) {
          if (!r.f32(m.detections.boxes[i][static_cast<size_t>(j)])) return false;
        }
        if (!r.f32(m.detections.scores[i])) return false;
        if (!r.i32(m.detections.labels[i])) return false;
      }
      if (!r.done()) return false;
      out = std::move(m);
      return true;
    }
    case MsgType::Timing: {
      TimingMsg m;
      TimingReport& t = m.report;
      if (!r.short_string(t.split_label) || !r.short_string(t.scene_id)) return false;
      if (!r.f64(t.head_compute_ms) || !r.f64(t.transfer_ms) ||
          !r.f64(t.tail_compute_ms) || !r.f64(t.result_return_ms) ||
          !r.f64(t.total_inference_ms) || !r.f64(t.edge_execution_ms) ||
          !r.u64(t.payload_bytes) || !r.done()) {
        return false;
      }
      out = std::move(m);
      return true;
    }
    case MsgType::Error: {
      ErrorMsg m;
      uint32_t len;
      if (!r.u32(m.code) || !r.u32(len)) return false;
      if (len != r.remaining()) return false;
      m.text.assign(reinterpret_cast<const char*>(payload.data() + 8), len);
      out = std::move(m);
      return true;
    }
  }
  return false;
}

MsgType type_of(const Message& m) {
  switch (m.index()) {
    case 0: return MsgType::Hello;
    case 1: return MsgType::InferRequest;
    case 2: return MsgType::Result;
    case 3: return MsgType::Timing;
    default: return MsgType::Error;
  }
}

}  // namespace

uint32_t crc32_of(std::span<const std::byte> data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc = ::crc32(crc, reinterpret_cast<const Bytef*>(data.data()),
                static_cast<uInt>(data.size()));
  return static_cast<uint32_t>(crc);
}

std::vector<std::byte> encode_frame(const Message& m) {
  std::vector<std::byte> payload;
  ByteWriter pw(payload);
  encode_payload(pw, m);
  if (payload.size() > kMaxPayload) {
    fail(Status::Oversize, "payload of " + std::to_string(payload.size()) + " bytes");
  }

  std::vector<std::byte> frame;
  frame.reserve(payload.size() + kFrameOverhead);
  ByteWriter fw(frame);
  fw.bytes(kWireMagic, 4);
  fw.u8(kWireVersion);
  fw.u8(static_cast<uint8_t>(type_of(m)));
  fw.u32(static_cast<uint32_t>(payload.size()));
  fw.bytes(payload.data(), payload.size());
  fw.u32(crc32_of(payload));
  return frame;
}

DecodeResult decode_frame(std::span<const std::byte> raw) {
  // Magic is checked on whatever prefix is available so corrupt streams are
  // rejected without waiting for more bytes.
  const size_t magic_avail = std::min<size_t>(raw.size(), 4);
  for (size_t i = 0; i < magic_avail; ++i) {
    if (std::to_integer<char>(raw[i]) != kWireMagic[i]) {
      return {DecodeStatus::BadMagic, 0, std::nullopt};
    }
  }
  if (raw.size() < 10) return {DecodeStatus::Truncated, 0, std::nullopt};

  const uint8_t version = std::to_integer<uint8_t>(raw[4]);
  if (version != kWireVersion) return {DecodeStatus::BadVersion, 0, std::nullopt};

  const uint8_t type_raw = std::to_integer<uint8_t>(raw[5]);
  if (type_raw < 1 || type_raw > 5) return {DecodeStatus::UnknownType, 0, std::nullopt};

  uint32_t payload_len = 0;
  for (int i = 0; i < 4; ++i) {
    payload_len |= static_cast<uint32_t>(std::to_integer<uint8_t>(raw[6 + i])) << (8 * i);
  }
  if (payload_len > kMaxPayload) return {DecodeStatus::Oversize, 0, std::nullopt};

  const size_t total = kFrameOverhead + payload_len;
  if (raw.size() < total) return {DecodeStatus::Truncated, 0, std::nullopt};

  const auto payload = raw.subspan(10, payload_len);
  uint32_t stored_crc = 0;
  for (int i = 0; i < 4; ++i) {
    stored_crc |= static_cast<uint32_t>(std::to_integer<uint8_t>(raw[10 + payload_len + i]))
                  << (8 * i);
  }
  if (crc32_of(payload) != stored_crc) return {DecodeStatus::BadCrc, 0, std::nullopt};

  Message msg;
  if (!decode_payload(static_cast<MsgType>(type_raw), payload, msg)) {
    return {DecodeStatus::BadPayload, 0, std::nullopt};
  }
  return {DecodeStatus::Ok, total, std::move(msg)};
}

std::vector<std::byte> encode_tensor_bundle(const TensorBundle& b) {
  std::vector<std::byte> out;
  ByteWriter w(out);
  encode_bundle_into(w, b);
  return out;
}

uint64_t bundle_encoded_size(const TensorBundle& b) {
  uint64_t size = 2;
  for (const BundleEntry& e : b.entries) {
    size += 1 + e.id.size() + 1;  // id, kind tag
    if (const auto* sp = std::get_if<SparseVoxelTensor>(&e.payload)) {
      size += 2 + 12 + 4;  // channels, shape, nnz
      size += sp->nnz() * 12;
      size += sp->nnz() * static_cast<uint64_t>(sp->channels) * 4;
    } else {
      const auto& dn = std::get<DenseBEVTensor>(e.payload);
      size += 2 + 8;
      size += static_cast<uint64_t>(dn.channels) * dn.height * dn.width * 4;
    }
  }
  return size;
}

TensorBundle decode_tensor_bundle(std::span<const std::byte> raw) {
  ByteReader r(raw);
  TensorBundle b;
  if (!decode_bundle_from(r, b) || !r.done()) {
    fail(Status::ProtocolError, "malformed tensor bundle");
  }
  return b;
}

}  // namespace spc
