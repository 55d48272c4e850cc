// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/runtime.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>

namespace spc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

bool log_enabled() {
  static const bool enabled = [] {
    const char* level = std::getenv("SPC_LOG");
    return level == nullptr || std::string(level) != "quiet";
  }();
  return enabled;
}

void log_request(const std::string& split, uint64_t bytes, double tail_ms) {
  if (!log_enabled()) return;
  std::fprintf(stderr, "[spc-serve] split=%s payload_bytes=%llu tail_ms=%.3f\n",
               split.c_str(), static_cast<unsigned long long>(bytes), tail_ms);
}

}  // namespace

Server::Server(std::shared_ptr<const Engine> engine) : engine_(std::move(engine)) {}

Server::~Server() { stop(); }

void Server::start(const std::string& bind_addr, uint16_t port) {
  listener_ = std::make_unique<Listener>(bind_addr, port);
  accept_thread_ = std::thread([this] { accept_loop(); });
}

uint16_t Server::port() const {
  return listener_ ? listener_->port() : 0;
}

void Server::stop() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_) return;
    stopping_ = true;
  }
  if (listener_) listener_->close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> handlers;
  {
    std::lock_guard<std::mutex> lock(mu_);
    handlers.swap(handlers_);
  }
  for (std::thread& t : handlers) {
    if (t.joinable()) t.join();
  }
}

void Server::accept_loop() {
  while (true) {
    Socket conn = listener_->accept_next();
    if (!conn.valid()) return;  // listener closed
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_) return;
    handlers_.emplace_back(
        [this](Socket s) { handle_connection(std::move(s)); }, std::move(conn));
  }
}

void Server::handle_connection(Socket conn) {
  MessageStream stream(conn);
  bool hello_ok = false;
  try {
    while (true) {
      std::optional<Message> msg = stream.next_or_eof();
      if (!msg) return;  // orderly close

      if (const auto* hello = std::get_if<HelloMsg>(&*msg)) {
        if (hello->seed != engine_->seed() || hello->arch_hash != engine_->arch_hash()) {
          send_message(conn, ErrorMsg{kWireErrArchMismatch,
                                      "architecture/seed mismatch"});
          return;
        }
        hello_ok = true;
        continue;
      }

      const auto* req = std::get_if<InferRequestMsg>(&*msg);
      if (req == nullptr) {
        send_message(conn, ErrorMsg{kWireErrProtocol, "unexpected message type"});
        return;
      }
      if (!hello_ok) {
        send_message(conn, ErrorMsg{kWireErrProtocol, "INFER_REQUEST before HELLO"});
        return;
      }

      SplitPoint split;
      try {
        split = split_point_from_label(engine_->graph(), req->split_label);
      } catch (const Error&) {
        send_message(conn, ErrorMsg{kWireErrUnknownSplit,
                                    "unknown split '" + req->split_label + "'"});
        return;
      }

      const SplitPlan plan = partition(engine_->graph(), split);
      Env env;
      engine_->merge_bundle(req->bundle, env);

      const auto t0 = Clock::now();
      Detections dets;
      try {
        engine_->run_steps(plan.tail_steps, env);
        if (!plan.tail_steps.empty()) {
          dets = std::get<Detections>(env.at("detections"));
        }
      } catch (const Error& e) {
        send_message(conn, ErrorMsg{kWireErrExecution, e.what()});
        return;
      }
      const double tail_ms = ms_between(t0, Clock::now());

      TimingReport server_timing;
      server_timing.split_label = plan.label;
      server_timing.tail_compute_ms = tail_ms;
      server_timing.payload_bytes = bundle_encoded_size(req->bundle);

      send_message(conn, ResultMsg{std::move(dets)});
      send_message(conn, TimingMsg{server_timing});
      log_request(plan.label, server_timing.payload_bytes, tail_ms);
    }
  } catch (const Error&) {
    // Malformed frame or broken pipe: try to tell the peer, then drop.
    try {
      send_message(conn, ErrorMsg{kWireErrMalformed, "malformed frame"});
    } catch (...) {
    }
  }
}

InferOutcome run_monolithic(const Engine& engine, const PointCloud& cloud) {
  const auto t0 = Clock::now();
  PipelineResult result = engine.run_pipeline(cloud);
  const double total = ms_between(t0, Clock::now());

  InferOutcome out;
  out.detections = std::move(result.detections);
  out.report.head_compute_ms = total;
  out.report.total_inference_ms = total;
  out.report.edge_execution_ms = total;
  out.report.split_label = "monolithic";
  out.report.scene_id = cloud.scene_id;
  return out;
}

InferOutcome client_infer(const Engine& engine, const std::string& host,
                          uint16_t port, const SplitPoint& split,
                          const PointCloud& cloud, const LinkEmulation& link) {
  const SplitPlan plan = partition(engine.graph(), split);

  Socket socket = Socket::connect_to(host, port);
  ShapedChannel channel([&socket](std::span<const std::byte> d) { socket.write_all(d); },
                        link);
  MessageStream stream(socket);

  // Handshake is connection setup, not part of the measured inference.
  channel.transmit(encode_frame(HelloMsg{engine.seed(), engine.arch_hash()}));

  const auto t_start = Clock::now();
  Env env;
  env["points"] = cloud;
  engine.run_steps(plan.head_steps, env);
  TensorBundle bundle = engine.make_bundle(plan.transfer_set, env);
  std::vector<std::byte> frame = encode_frame(InferRequestMsg{plan.label, bundle});
  const auto t_head_done = Clock::now();

  channel.transmit(frame);
  const auto t_sent = Clock::now();

  Message reply = stream.next();
  if (const auto* err = std::get_if<ErrorMsg>(&reply)) {
    fail(err->code == kWireErrArchMismatch ? Status::HandshakeError : Status::ServerError,
         "server error " + std::to_string(err->code) + ": " + err->text);
  }
  const auto* result = std::get_if<ResultMsg>(&reply);
  if (result == nullptr) {
    fail(Status::ProtocolError, "expected RESULT frame");
  }
  const auto t_result = Clock::now();

  Message timing_reply = stream.next();
  const auto* timing = std::get_if<TimingMsg>(&timing_reply);
  if (timing == nullptr) {
    fail(Status::ProtocolError, "expected TIMING frame");
  }

  InferOutcome out;
  if (plan.tail_steps.empty()) {
    // Fully on-device split: the round trip exists for timing symmetry only.
    out.detections = std::get<Detections>(env.at("detections"));
  } else {
    out.detections = result->detections;
  }

  TimingReport& r = out.report;
  r.split_label = plan.label;
  r.scene_id = cloud.scene_id;
  r.payload_bytes = bundle_encoded_size(bundle);
  r.head_compute_ms = ms_between(t_start, t_head_done);
  r.transfer_ms = ms_between(t_head_done, t_sent);
  r.tail_compute_ms = timing->report.tail_compute_ms;
  r.total_inference_ms = ms_between(t_start, t_result);
  r.edge_execution_ms = r.head_compute_ms + r.transfer_ms;
  r.result_return_ms =
      std::max(0.0, r.total_inference_ms - r.head_compute_ms - r.transfer_ms -
                        r.tail_compute_ms);
  return out;
}

}  // namespace spc
