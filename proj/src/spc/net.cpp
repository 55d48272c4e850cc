// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "spc/error.hpp"

namespace spc {

namespace {

[[noreturn]] void fail_errno(Status code, const std::string& what) {
  fail(code, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const std::string& host, uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (host.empty() || host == "localhost") {
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    return addr;
  }
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    fail(Status::ConnectError, "cannot resolve host '" + host + "'");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return addr;
}

}  // namespace

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Socket Socket::connect_to(const std::string& host, uint16_t port) {
  sockaddr_in addr = resolve(host, port);
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail_errno(Status::ConnectError, "socket");
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    int err = errno;
    ::close(fd);
    errno = err;
    fail_errno(Status::ConnectError,
               "connect to " + host + ":" + std::to_string(port));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Socket(fd);
}

void Socket::write_all(std::span<const std::byte> data) {
  size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail_errno(Status::ConnectError, "send");
    }
    off += static_cast<size_t>(n);
  }
}

size_t Socket::read_some(std::byte* buf, size_t max) {
  while (true) {
    ssize_t n = ::recv(fd_, buf, max, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail_errno(Status::ConnectError, "recv");
    }
    return static_cast<size_t>(n);
  }
}

Listener::Listener(const std::string& bind_addr, uint16_t port) {
  sockaddr_in addr = resolve(bind_addr, port);
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) fail_errno(Status::ConnectError, "socket");
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    int err = errno;
    ::close(fd_);
    fd_ = -1;
    errno = err;
    fail_errno(Status::ConnectError,
               "bind " + bind_addr + ":" + std::to_string(port));
  }
  if (::listen(fd_, 16) != 0) fail_errno(Status::ConnectError, "listen");
  sockaddr_in actual{};
  socklen_t len = sizeof actual;
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&actual), &len) == 0) {
    port_ = ntohs(actual.sin_port);
  }
}

Listener::~Listener() { close(); }

void Listener::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

Socket Listener::accept_next() {
  if (fd_ < 0) return Socket();
  int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) return Socket();  // listener closed or transient failure
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Socket(fd);
}

Message MessageStream::next() {
  auto m = next_or_eof();
  if (!m) fail(Status::ConnectError, "peer closed the connection");
  return std::move(*m);
}

std::optional<Message> MessageStream::next_or_eof() {
  while (true) {
    DecodeResult res = decode_frame(buffer_);
    if (res.status == DecodeStatus::Ok) {
      buffer_.erase(buffer_.begin(),
                    buffer_.begin() + static_cast<ptrdiff_t>(res.consumed));
      return std::move(*res.message);
    }
    if (res.status != DecodeStatus::Truncated) {
      fail(Status::ProtocolError,
           std::string("frame decode failed: ") + decode_status_name(res.status));
    }
    std::byte chunk[64 * 1024];
    size_t n = socket_->read_some(chunk, sizeof chunk);
    if (n == 0) {
      if (buffer_.empty()) return std::nullopt;
      fail(Status::ConnectError, "peer closed mid-frame");
    }
    buffer_.insert(buffer_.end(), chunk, chunk + n);
  }
}

void send_message(Socket& socket, const Message& m) {
  socket.write_all(encode_frame(m));
}

}  // namespace spc
