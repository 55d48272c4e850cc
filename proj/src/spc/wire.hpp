// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "spc/tensor.hpp"
#include "spc/timing.hpp"

namespace spc {

// Frame layout (all integers little-endian; see docs/wire.md):
//   magic "SPC1" | version u8 (=1) | msg_type u8 | payload_len u32 |
//   payload | crc32 u32 over the payload bytes.
inline constexpr char kWireMagic[4] = {'S', 'P', 'C', '1'};
inline constexpr uint8_t kWireVersion = 1;
inline constexpr size_t kFrameOverhead = 4 + 1 + 1 + 4 + 4;
inline constexpr uint64_t kMaxPayload = uint64_t{1} << 31;

enum class MsgType : uint8_t {
  Hello = 1,
  InferRequest = 2,
  Result = 3,
  Timing = 4,
  Error = 5,
};

struct HelloMsg {
  uint64_t seed = 0;
  uint64_t arch_hash = 0;
  friend bool operator==(const HelloMsg&, const HelloMsg&) = default;
};

struct InferRequestMsg {
  std::string split_label;
  TensorBundle bundle;
  friend bool operator==(const InferRequestMsg&, const InferRequestMsg&) = default;
};

struct ResultMsg {
  Detections detections;
  friend bool operator==(const ResultMsg&, const ResultMsg&) = default;
};

struct TimingMsg {
  TimingReport report;
  friend bool operator==(const TimingMsg&, const TimingMsg&) = default;
};

// Error codes carried on the wire.
inline constexpr uint32_t kWireErrArchMismatch = 1;
inline constexpr uint32_t kWireErrProtocol = 2;
inline constexpr uint32_t kWireErrMalformed = 3;
inline constexpr uint32_t kWireErrExecution = 4;
inline constexpr uint32_t kWireErrUnknownSplit = 5;

struct ErrorMsg {
  uint32_t code = 0;
  std::string text;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using Message = std::variant<HelloMsg, InferRequestMsg, ResultMsg, TimingMsg, ErrorMsg>;

/// Canonical frame encoding; encode-decode is a bit-exact round trip.
/// Throws Oversize when the payload exceeds kMaxPayload.
std::vector<std::byte> encode_frame(const Message& m);

enum class DecodeStatus {
  Ok,
  Truncated,  // retryable: feed more bytes
  BadMagic,
  BadVersion,
  UnknownType,
  Oversize,
  BadCrc,
  BadPayload,
};

inline const char* decode_status_name(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::Ok: return "ok";
    case DecodeStatus::Truncated: return "truncated";
    case DecodeStatus::BadMagic: return "bad_magic";
    case DecodeStatus::BadVersion: return "bad_version";
    case DecodeStatus::UnknownType: return "unknown_type";
    case DecodeStatus::Oversize: return "oversize";
    case DecodeStatus::BadCrc: return "bad_crc";
    case DecodeStatus::BadPayload: return "bad_payload";
  }
  return "unknown";
}

struct DecodeResult {
  DecodeStatus status = DecodeStatus::Truncated;
  size_t consumed = 0;  // bytes to drop from the stream on Ok
  std::optional<Message> message;
};

/// Total decoder: any byte string yields Ok + message or a typed status;
/// never throws, never reads past the span.
DecodeResult decode_frame(std::span<const std::byte> raw);

/// Bundle encoding (the "transfer data size" benchmarks report is the size
/// of this buffer). Sparse entries must be canonical (NonCanonical
/// otherwise).
std::vector<std::byte> encode_tensor_bundle(const TensorBundle& b);

/// Size of encode_tensor_bundle's output without building it.
uint64_t bundle_encoded_size(const TensorBundle& b);

/// Strict bundle decode used by tests; throws ProtocolError on malformed
/// input (message-level decoding goes through decode_frame instead).
TensorBundle decode_tensor_bundle(std::span<const std::byte> raw);

uint32_t crc32_of(std::span<const std::byte> data);

}  // namespace spc
