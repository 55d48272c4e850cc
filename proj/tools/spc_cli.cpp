// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end over the libspc C API.

#include <csignal>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "spc/spc.h"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { spc_string_free(s); }
};

[[noreturn]] void die(const char* what, spc_status rc) {
  std::fprintf(stderr, "error: %s: %s (%s)\n", what, spc_last_error_message(),
               spc_status_name(rc));
  std::exit(1);
}

void check(spc_status rc, const char* what) {
  if (rc != SPC_OK) die(what, rc);
}

struct ContextHandle {
  spc_context* ctx = nullptr;
  ~ContextHandle() { spc_context_destroy(ctx); }
};

struct CommonOpts {
  std::string profile = "default";
  std::string config_path;
  uint64_t seed = 42;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--profile", opts.profile, "architecture profile: default|tiny")
      ->capture_default_str();
  cmd->add_option("--config", opts.config_path, "key=value config file overriding the profile");
  cmd->add_option("--seed", opts.seed, "weight seed")->capture_default_str();
}

spc_context* make_context(const CommonOpts& opts, ContextHandle& holder) {
  check(spc_context_create(opts.profile.c_str(),
                           opts.config_path.empty() ? nullptr : opts.config_path.c_str(),
                           opts.seed, &holder.ctx),
        "create context");
  return holder.ctx;
}

std::pair<std::string, uint16_t> parse_host_port(const std::string& addr) {
  const size_t colon = addr.rfind(':');
  if (colon == std::string::npos) {
    std::fprintf(stderr, "error: expected HOST:PORT, got '%s'\n", addr.c_str());
    std::exit(1);
  }
  return {addr.substr(0, colon),
          static_cast<uint16_t>(std::stoi(addr.substr(colon + 1)))};
}

void print_detections(spc_result* result, size_t limit) {
  uint64_t count = 0;
  check(spc_result_detection_count(result, &count), "detection count");
  std::printf("detections: %llu\n", static_cast<unsigned long long>(count));
  for (uint64_t i = 0; i < count && i < limit; ++i) {
    float box[7];
    float score;
    int32_t label;
    check(spc_result_detection(result, i, box, &score, &label), "detection");
    std::printf("  #%llu label=%d score=%.4f box=(%.2f %.2f %.2f | %.2f %.2f %.2f | %.2f)\n",
                static_cast<unsigned long long>(i), label, score, box[0], box[1],
                box[2], box[3], box[4], box[5], box[6]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"split-computing benchmark runtime for point-cloud detection"};
  app.require_subcommand(1);

  // gen-scenes
  auto* gen = app.add_subcommand("gen-scenes", "write deterministic synthetic scenes");
  CommonOpts gen_opts;
  add_common(gen, gen_opts);
  std::string gen_out = "scenes";
  uint32_t gen_count = 100;
  uint32_t gen_points = 100000;
  gen->add_option("--out", gen_out, "output directory")->capture_default_str();
  gen->add_option("--count", gen_count, "number of scenes")->capture_default_str();
  gen->add_option("--points", gen_points, "points per scene")->capture_default_str();

  // profile
  auto* profile = app.add_subcommand("profile", "per-module timing ratios over a dataset");
  CommonOpts profile_opts;
  add_common(profile, profile_opts);
  std::string profile_data;
  std::string profile_out = "reports";
  uint32_t profile_runs = 10, profile_warmup = 3;
  profile->add_option("--data", profile_data, "directory of .bin scenes")->required();
  profile->add_option("--out", profile_out, "report directory")->capture_default_str();
  profile->add_option("--runs", profile_runs, "measured runs per scene")->capture_default_str();
  profile->add_option("--warmup", profile_warmup, "warm-up runs per scene")->capture_default_str();

  // serve
  auto* serve = app.add_subcommand("serve", "run the edge-server role");
  CommonOpts serve_opts;
  add_common(serve, serve_opts);
  std::string serve_bind;
  uint16_t serve_port = 7061;
  serve->add_option("--bind", serve_bind, "bind address (default 127.0.0.1 or $SPC_BIND)");
  serve->add_option("--port", serve_port, "port, 0 picks a free one")->capture_default_str();

  // infer
  auto* infer = app.add_subcommand("infer", "one split inference against a server");
  CommonOpts infer_opts;
  add_common(infer, infer_opts);
  std::string infer_server = "127.0.0.1:7061";
  std::string infer_split = "after_vfe";
  std::string infer_scene;
  double infer_bw = 0.0, infer_lat = 0.0;
  uint32_t infer_top = 5;
  infer->add_option("--server", infer_server, "HOST:PORT")->capture_default_str();
  infer->add_option("--split", infer_split, "split label")->capture_default_str();
  infer->add_option("--scene", infer_scene, ".bin scene file")->required();
  infer->add_option("--bandwidth", infer_bw, "emulated link bytes/s (0 = unshaped)");
  infer->add_option("--latency", infer_lat, "emulated link latency ms");
  infer->add_option("--top", infer_top, "detections to print")->capture_default_str();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "benchmark splits against the monolithic baseline");
  CommonOpts sweep_opts;
  add_common(sweep, sweep_opts);
  std::string sweep_data;
  std::string sweep_splits = "raw_points,after_vfe,after_conv1,after_conv2";
  std::string sweep_server;
  bool sweep_local = false;
  std::string sweep_out = "reports";
  double sweep_bw = 0.0, sweep_lat = 0.0;
  uint32_t sweep_runs = 5, sweep_warmup = 3;
  sweep->add_option("--data", sweep_data, "directory of .bin scenes")->required();
  sweep->add_option("--splits", sweep_splits, "comma-separated split labels")->capture_default_str();
  sweep->add_option("--server", sweep_server, "HOST:PORT of a running server");
  sweep->add_flag("--local", sweep_local, "run both roles in-process over loopback");
  sweep->add_option("--out", sweep_out, "report directory")->capture_default_str();
  sweep->add_option("--bandwidth", sweep_bw, "emulated link bytes/s (0 = unshaped)");
  sweep->add_option("--latency", sweep_lat, "emulated link latency ms");
  sweep->add_option("--runs", sweep_runs, "measured runs per scene")->capture_default_str();
  sweep->add_option("--warmup", sweep_warmup, "warm-up runs per scene")->capture_default_str();

  // replay-paper
  auto* replay = app.add_subcommand(
      "replay-paper", "verify the published reference measurements' arithmetic");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    ContextHandle ctx;
    make_context(gen_opts, ctx);
    check(spc_gen_scenes(ctx.ctx, gen_out.c_str(), gen_count, gen_points, gen_opts.seed),
          "gen-scenes");
    std::printf("wrote %u scenes (%u points each) to %s\n", gen_count, gen_points,
                gen_out.c_str());
    return 0;
  }

  if (profile->parsed()) {
    ContextHandle ctx;
    make_context(profile_opts, ctx);
    OwnedString summary;
    check(spc_bench_profile(ctx.ctx, profile_data.c_str(), profile_runs, profile_warmup,
                            profile_out.c_str(), &summary.s),
          "profile");
    const auto j = nlohmann::json::parse(summary.s);
    std::printf("scenes: %zu  runs/scene: %d  module total: %.3f ms\n",
                j.at("scene_count").get<size_t>(), j.at("runs").get<int>(),
                j.at("module_total_ms").get<double>());
    std::printf("input bytes: raw %llu, cropped %llu (mean per scene)\n",
                j.at("input_bytes_raw_mean").get<unsigned long long>(),
                j.at("input_bytes_cropped_mean").get<unsigned long long>());
    std::printf("%s", j.at("table").get<std::string>().c_str());
    std::printf("reports written to %s\n", profile_out.c_str());
    return 0;
  }

  if (serve->parsed()) {
    ContextHandle ctx;
    make_context(serve_opts, ctx);
    if (serve_bind.empty()) {
      const char* env_bind = std::getenv("SPC_BIND");
      serve_bind = env_bind != nullptr ? env_bind : "127.0.0.1";
    }
    spc_server* server = nullptr;
    check(spc_server_start(ctx.ctx, serve_bind.c_str(), serve_port, &server), "serve");
    uint16_t actual = 0;
    spc_server_port(server, &actual);
    uint64_t hash = 0;
    spc_context_arch_hash(ctx.ctx, &hash);
    std::printf("listening on %s:%u (arch_hash=%llu)\n", serve_bind.c_str(), actual,
                static_cast<unsigned long long>(hash));
    std::fflush(stdout);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) {
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    check(spc_server_stop(server), "stop server");
    return 0;
  }

  if (infer->parsed()) {
    ContextHandle ctx;
    make_context(infer_opts, ctx);
    auto [host, port] = parse_host_port(infer_server);
    spc_cloud* cloud = nullptr;
    check(spc_cloud_load(infer_scene.c_str(), &cloud), "load scene");
    spc_result* result = nullptr;
    spc_status rc = spc_infer_remote(ctx.ctx, host.c_str(), port, infer_split.c_str(),
                                     cloud, infer_bw, infer_lat, &result);
    if (rc != SPC_OK) {
      spc_cloud_destroy(cloud);
      die("infer", rc);
    }
    print_detections(result, infer_top);
    OwnedString timing;
    check(spc_result_timing_json(result, &timing.s), "timing");
    std::printf("%s", timing.s);
    spc_result_destroy(result);
    spc_cloud_destroy(cloud);
    return 0;
  }

  if (sweep->parsed()) {
    ContextHandle ctx;
    make_context(sweep_opts, ctx);
    std::string host;
    uint16_t port = 0;
    if (!sweep_server.empty() && !sweep_local) {
      std::tie(host, port) = parse_host_port(sweep_server);
    }
    OwnedString summary;
    check(spc_bench_sweep(ctx.ctx, sweep_data.c_str(), sweep_splits.c_str(),
                          host.empty() ? nullptr : host.c_str(), port, sweep_bw,
                          sweep_lat, sweep_runs, sweep_warmup, sweep_out.c_str(),
                          &summary.s),
          "sweep");
    std::printf("%s", summary.s);
    std::printf("reports written to %s\n", sweep_out.c_str());
    return 0;
  }

  if (replay->parsed()) {
    OwnedString report;
    spc_status rc = spc_replay_reference(&report.s);
    if (report.s != nullptr) {
      const auto j = nlohmann::json::parse(report.s);
      for (const auto& c : j.at("checks")) {
        std::printf("[%s] %s: expected %.3f got %.3f (tol %.3f)\n",
                    c.at("pass").get<bool>() ? "PASS" : "FAIL",
                    c.at("name").get<std::string>().c_str(),
                    c.at("expected").get<double>(), c.at("actual").get<double>(),
                    c.at("tolerance").get<double>());
      }
      std::printf("%s\n", j.at("all_pass").get<bool>() ? "all checks passed"
                                                       : "some checks FAILED");
    }
    return rc == SPC_OK ? 0 : 1;
  }

  return 0;
}
