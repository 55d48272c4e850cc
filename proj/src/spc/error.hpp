// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace spc {

enum class Status : int {
  Ok = 0,
  InvalidArgument,
  LengthError,
  ValueError,
  ConfigError,
  IoError,
  EmptyDataset,
  EmptyCloud,
  ShapeError,
  SizeError,
  IndexError,
  DomainError,
  DuplicateCoord,
  OutOfBounds,
  MissingScale,
  MissingProfile,
  NonCanonical,
  Oversize,
  ProtocolError,
  ConnectError,
  HandshakeError,
  ServerError,
  AssertionFailure,
  Internal,
};

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::InvalidArgument: return "invalid_argument";
    case Status::LengthError: return "length_error";
    case Status::ValueError: return "value_error";
    case Status::ConfigError: return "config_error";
    case Status::IoError: return "io_error";
    case Status::EmptyDataset: return "empty_dataset";
    case Status::EmptyCloud: return "empty_cloud";
    case Status::ShapeError: return "shape_error";
    case Status::SizeError: return "size_error";
    case Status::IndexError: return "index_error";
    case Status::DomainError: return "domain_error";
    case Status::DuplicateCoord: return "duplicate_coord";
    case Status::OutOfBounds: return "out_of_bounds";
    case Status::MissingScale: return "missing_scale";
    case Status::MissingProfile: return "missing_profile";
    case Status::NonCanonical: return "non_canonical";
    case Status::Oversize: return "oversize";
    case Status::ProtocolError: return "protocol_error";
    case Status::ConnectError: return "connect_error";
    case Status::HandshakeError: return "handshake_error";
    case Status::ServerError: return "server_error";
    case Status::AssertionFailure: return "assertion_failure";
    case Status::Internal: return "internal";
  }
  return "unknown";
}

/// Exception carrying a Status code; the C API maps these to spc_status.
class Error : public std::runtime_error {
 public:
  Error(Status code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Status code() const noexcept { return code_; }

 private:
  Status code_;
};

[[noreturn]] inline void fail(Status code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace spc
