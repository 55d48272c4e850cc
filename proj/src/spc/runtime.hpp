// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <mutex>
#include <thread>

#include "spc/engine.hpp"
#include "spc/link.hpp"
#include "spc/net.hpp"
#include "spc/timing.hpp"

namespace spc {

struct InferOutcome {
  Detections detections;
  TimingReport report;
};

/// Edge-server role: accepts connections, validates the HELLO handshake,
/// executes tail plans for named splits, replies RESULT then TIMING.
/// Handlers keep connection-scoped state only; the engine is shared
/// read-only across connections.
class Server {
 public:
  explicit Server(std::shared_ptr<const Engine> engine);
  ~Server();

  /// Bind + start the accept loop. Port 0 picks a free port.
  void start(const std::string& bind_addr, uint16_t port);
  uint16_t port() const;
  void stop();

 private:
  void accept_loop();
  void handle_connection(Socket conn);

  std::shared_ptr<const Engine> engine_;
  std::unique_ptr<Listener> listener_;
  std::thread accept_thread_;
  std::mutex mu_;
  std::vector<std::thread> handlers_;
  bool stopping_ = false;
};

/// Full pipeline on the device; transfer fields zero, edge time equals
/// total by definition.
InferOutcome run_monolithic(const Engine& engine, const PointCloud& cloud);

/// Device role for one inference: run the head plan, ship the transfer set
/// through the (possibly shaped) link, await the result. Detections are
/// bit-identical to run_monolithic for every split. Bundle serialization is
/// counted inside head_compute_ms; result_return_ms is the residual of the
/// measured total.
InferOutcome client_infer(const Engine& engine, const std::string& host,
                          uint16_t port, const SplitPoint& split,
                          const PointCloud& cloud, const LinkEmulation& link);

}  // namespace spc
