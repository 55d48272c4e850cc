// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spc/wire.hpp"

namespace spc {

/// Thin RAII wrapper over a connected stream socket.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();

  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  static Socket connect_to(const std::string& host, uint16_t port);

  bool valid() const { return fd_ >= 0; }
  void close();

  /// Writes the whole buffer; throws ConnectError on a broken peer.
  void write_all(std::span<const std::byte> data);

  /// Reads up to `max` bytes; returns 0 on orderly shutdown.
  size_t read_some(std::byte* buf, size_t max);

 private:
  int fd_ = -1;
};

/// Listening socket; port 0 picks a free port (see port()).
class Listener {
 public:
  Listener(const std::string& bind_addr, uint16_t port);
  ~Listener();

  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  uint16_t port() const { return port_; }

  /// Blocks for the next connection; returns an invalid socket once closed.
  Socket accept_next();
  void close();

 private:
  int fd_ = -1;
  uint16_t port_ = 0;
};

/// Accumulates stream bytes and yields whole protocol messages.
class MessageStream {
 public:
  explicit MessageStream(Socket& socket) : socket_(&socket) {}

  /// Next message, blocking. Throws ConnectError on EOF mid-frame or when
  /// the peer closed before any frame, ProtocolError on non-retryable
  /// decode failures.
  Message next();

  /// Like next(), but an orderly EOF before any bytes yields nullopt.
  std::optional<Message> next_or_eof();

 private:
  Socket* socket_;
  std::vector<std::byte> buffer_;
};

void send_message(Socket& socket, const Message& m);

}  // namespace spc
