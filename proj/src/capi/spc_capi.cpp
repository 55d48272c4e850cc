// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/spc.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "spc/bench.hpp"

namespace {

thread_local std::string g_last_error;

spc_status map_status(spc::Status s) {
  using spc::Status;
  switch (s) {
    case Status::Ok: return SPC_OK;
    case Status::InvalidArgument: return SPC_ERR_INVALID_ARGUMENT;
    case Status::LengthError: return SPC_ERR_LENGTH;
    case Status::ValueError: return SPC_ERR_VALUE;
    case Status::ConfigError: return SPC_ERR_CONFIG;
    case Status::IoError: return SPC_ERR_IO;
    case Status::EmptyDataset: return SPC_ERR_EMPTY_DATASET;
    case Status::EmptyCloud: return SPC_ERR_EMPTY_CLOUD;
    case Status::ShapeError: return SPC_ERR_SHAPE;
    case Status::SizeError: return SPC_ERR_SIZE;
    case Status::IndexError: return SPC_ERR_INDEX;
    case Status::DomainError: return SPC_ERR_DOMAIN;
    case Status::DuplicateCoord: return SPC_ERR_DUPLICATE_COORD;
    case Status::OutOfBounds: return SPC_ERR_OUT_OF_BOUNDS;
    case Status::MissingScale: return SPC_ERR_MISSING_SCALE;
    case Status::MissingProfile: return SPC_ERR_MISSING_PROFILE;
    case Status::NonCanonical: return SPC_ERR_NON_CANONICAL;
    case Status::Oversize: return SPC_ERR_OVERSIZE;
    case Status::ProtocolError: return SPC_ERR_PROTOCOL;
    case Status::ConnectError: return SPC_ERR_CONNECT;
    case Status::HandshakeError: return SPC_ERR_HANDSHAKE;
    case Status::ServerError: return SPC_ERR_SERVER;
    case Status::AssertionFailure: return SPC_ERR_ASSERTION;
    case Status::Internal: return SPC_ERR_INTERNAL;
  }
  return SPC_ERR_INTERNAL;
}

template <typename Fn>
spc_status guarded(Fn&& fn) {
  try {
    fn();
    return SPC_OK;
  } catch (const spc::Error& e) {
    g_last_error = e.what();
    return map_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SPC_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

spc_status invalid_arg(const char* what) {
  g_last_error = what;
  return SPC_ERR_INVALID_ARGUMENT;
}

std::string timing_json(const spc::TimingReport& t) {
  nlohmann::json j;
  j["head_compute_ms"] = t.head_compute_ms;
  j["transfer_ms"] = t.transfer_ms;
  j["tail_compute_ms"] = t.tail_compute_ms;
  j["result_return_ms"] = t.result_return_ms;
  j["total_inference_ms"] = t.total_inference_ms;
  j["edge_execution_ms"] = t.edge_execution_ms;
  j["payload_bytes"] = t.payload_bytes;
  j["split"] = t.split_label;
  j["scene"] = t.scene_id;
  return j.dump(2) + "\n";
}

std::vector<std::string> split_labels_arg(const char* splits) {
  std::vector<std::string> out;
  std::string s(splits);
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    std::string label = s.substr(pos, comma - pos);
    size_t b = label.find_first_not_of(' ');
    size_t e = label.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(label.substr(b, e - b + 1));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

struct spc_context {
  spc::ArchConfig cfg;
  uint64_t seed = 0;
  std::shared_ptr<const spc::Engine> engine;
};

struct spc_cloud {
  spc::PointCloud cloud;
};

struct spc_result {
  spc::InferOutcome outcome;
};

struct spc_server {
  std::unique_ptr<spc::Server> server;
};

extern "C" {

const char* spc_status_name(spc_status status) {
  switch (status) {
    case SPC_OK: return "ok";
    case SPC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SPC_ERR_LENGTH: return "length_error";
    case SPC_ERR_VALUE: return "value_error";
    case SPC_ERR_CONFIG: return "config_error";
    case SPC_ERR_IO: return "io_error";
    case SPC_ERR_EMPTY_DATASET: return "empty_dataset";
    case SPC_ERR_EMPTY_CLOUD: return "empty_cloud";
    case SPC_ERR_SHAPE: return "shape_error";
    case SPC_ERR_SIZE: return "size_error";
    case SPC_ERR_INDEX: return "index_error";
    case SPC_ERR_DOMAIN: return "domain_error";
    case SPC_ERR_DUPLICATE_COORD: return "duplicate_coord";
    case SPC_ERR_OUT_OF_BOUNDS: return "out_of_bounds";
    case SPC_ERR_MISSING_SCALE: return "missing_scale";
    case SPC_ERR_MISSING_PROFILE: return "missing_profile";
    case SPC_ERR_NON_CANONICAL: return "non_canonical";
    case SPC_ERR_OVERSIZE: return "oversize";
    case SPC_ERR_PROTOCOL: return "protocol_error";
    case SPC_ERR_CONNECT: return "connect_error";
    case SPC_ERR_HANDSHAKE: return "handshake_error";
    case SPC_ERR_SERVER: return "server_error";
    case SPC_ERR_ASSERTION: return "assertion_failure";
    case SPC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* spc_last_error_message(void) { return g_last_error.c_str(); }

void spc_string_free(char* s) { std::free(s); }

spc_status spc_context_create(const char* profile, const char* config_path,
                              uint64_t seed, spc_context** out) {
  if (out == nullptr) return invalid_arg("out must not be NULL");
  return guarded([&] {
    spc::ArchConfig cfg =
        spc::ArchConfig::named_profile(profile != nullptr ? profile : "default");
    if (config_path != nullptr) {
      cfg = spc::ArchConfig::from_file(config_path, cfg);
    }
    cfg.validate();
    auto ctx = std::make_unique<spc_context>();
    ctx->cfg = cfg;
    ctx->seed = seed;
    ctx->engine = std::make_shared<const spc::Engine>(cfg, seed);
    *out = ctx.release();
  });
}

void spc_context_destroy(spc_context* ctx) { delete ctx; }

spc_status spc_context_arch_hash(const spc_context* ctx, uint64_t* out) {
  if (ctx == nullptr || out == nullptr) return invalid_arg("NULL argument");
  *out = ctx->engine->arch_hash();
  return SPC_OK;
}

spc_status spc_context_config_text(const spc_context* ctx, char** out) {
  if (ctx == nullptr || out == nullptr) return invalid_arg("NULL argument");
  return guarded([&] { *out = dup_string(ctx->cfg.serialize()); });
}

spc_status spc_context_save_weights(const spc_context* ctx, const char* path) {
  if (ctx == nullptr || path == nullptr) return invalid_arg("NULL argument");
  return guarded([&] {
    auto blob = spc::weights_to_blob(ctx->engine->weights());
    std::ofstream outf(path, std::ios::binary | std::ios::trunc);
    if (!outf) spc::fail(spc::Status::IoError, std::string("cannot open ") + path);
    outf.write(reinterpret_cast<const char*>(blob.data()),
               static_cast<std::streamsize>(blob.size()));
    if (!outf) spc::fail(spc::Status::IoError, std::string("short write to ") + path);
  });
}

spc_status spc_context_split_labels(const spc_context* ctx, char** out) {
  if (ctx == nullptr || out == nullptr) return invalid_arg("NULL argument");
  return guarded([&] {
    std::string joined;
    for (const spc::SplitPoint& s : spc::all_split_points(ctx->engine->graph())) {
      if (!joined.empty()) joined += ",";
      joined += s.label;
    }
    *out = dup_string(joined);
  });
}

spc_status spc_cloud_load(const char* bin_path, spc_cloud** out) {
  if (bin_path == nullptr || out == nullptr) return invalid_arg("NULL argument");
  return guarded([&] {
    auto cloud = std::make_unique<spc_cloud>();
    cloud->cloud = spc::load_kitti_file(bin_path);
    *out = cloud.release();
  });
}

spc_status spc_cloud_point_count(const spc_cloud* cloud, uint64_t* out) {
  if (cloud == nullptr || out == nullptr) return invalid_arg("NULL argument");
  *out = cloud->cloud.size();
  return SPC_OK;
}

void spc_cloud_destroy(spc_cloud* cloud) { delete cloud; }

spc_status spc_gen_scenes(const spc_context* ctx, const char* out_dir,
                          uint32_t count, uint32_t points_per_scene, uint64_t seed) {
  if (ctx == nullptr || out_dir == nullptr) return invalid_arg("NULL argument");
  return guarded([&] {
    spc::gen_scenes(out_dir, static_cast<int>(count),
                    static_cast<int>(points_per_scene), seed, ctx->cfg.range);
  });
}

spc_status spc_run_monolithic(const spc_context* ctx, const spc_cloud* cloud,
                              spc_result** out) {
  if (ctx == nullptr || cloud == nullptr || out == nullptr) {
    return invalid_arg("NULL argument");
  }
  return guarded([&] {
    auto r = std::make_unique<spc_result>();
    r->outcome = spc::run_monolithic(*ctx->engine, cloud->cloud);
    *out = r.release();
  });
}

spc_status spc_infer_remote(const spc_context* ctx, const char* host, uint16_t port,
                            const char* split_label, const spc_cloud* cloud,
                            double link_bandwidth_bytes_per_s, double link_latency_ms,
                            spc_result** out) {
  if (ctx == nullptr || host == nullptr || split_label == nullptr ||
      cloud == nullptr || out == nullptr) {
    return invalid_arg("NULL argument");
  }
  return guarded([&] {
    spc::SplitPoint split =
        spc::split_point_from_label(ctx->engine->graph(), split_label);
    spc::LinkEmulation link{link_bandwidth_bytes_per_s, link_latency_ms};
    auto r = std::make_unique<spc_result>();
    r->outcome =
        spc::client_infer(*ctx->engine, host, port, split, cloud->cloud, link);
    *out = r.release();
  });
}

spc_status spc_result_detection_count(const spc_result* r, uint64_t* out) {
  if (r == nullptr || out == nullptr) return invalid_arg("NULL argument");
  *out = r->outcome.detections.size();
  return SPC_OK;
}

spc_status spc_result_detection(const spc_result* r, uint64_t index, float box[7],
                                float* score, int32_t* label) {
  if (r == nullptr || box == nullptr || score == nullptr || label == nullptr) {
    return invalid_arg("NULL argument");
  }
  if (index >= r->outcome.detections.size()) {
    g_last_error = "detection index out of range";
    return SPC_ERR_INDEX;
  }
  for (size_t i = 0; i < 7; ++i) box[i] = r->outcome.detections.boxes[index][i];
  *score = r->outcome.detections.scores[index];
  *label = r->outcome.detections.labels[index];
  return SPC_OK;
}

spc_status spc_result_timing_json(const spc_result* r, char** out) {
  if (r == nullptr || out == nullptr) return invalid_arg("NULL argument");
  return guarded([&] { *out = dup_string(timing_json(r->outcome.report)); });
}

void spc_result_destroy(spc_result* r) { delete r; }

spc_status spc_server_start(const spc_context* ctx, const char* bind_addr,
                            uint16_t port, spc_server** out) {
  if (ctx == nullptr || out == nullptr) return invalid_arg("NULL argument");
  return guarded([&] {
    auto server = std::make_unique<spc_server>();
    server->server = std::make_unique<spc::Server>(ctx->engine);
    server->server->start(bind_addr != nullptr ? bind_addr : "127.0.0.1", port);
    *out = server.release();
  });
}

spc_status spc_server_port(const spc_server* server, uint16_t* out) {
  if (server == nullptr || out == nullptr) return invalid_arg("NULL argument");
  *out = server->server->port();
  return SPC_OK;
}

spc_status spc_server_stop(spc_server* server) {
  if (server == nullptr) return invalid_arg("NULL argument");
  return guarded([&] {
    server->server->stop();
    delete server;
  });
}

spc_status spc_bench_profile(const spc_context* ctx, const char* dataset_dir,
                             uint32_t runs, uint32_t warmup, const char* out_dir,
                             char** summary_json) {
  if (ctx == nullptr || dataset_dir == nullptr || summary_json == nullptr) {
    return invalid_arg("NULL argument");
  }
  return guarded([&] {
    spc::ProfileReport report = spc::bench_profile(
        *ctx->engine, dataset_dir, static_cast<int>(runs), static_cast<int>(warmup));
    if (out_dir != nullptr) spc::write_profile_report(out_dir, report);
    *summary_json = dup_string(spc::profile_report_to_json(report));
  });
}

spc_status spc_bench_sweep(const spc_context* ctx, const char* dataset_dir,
                           const char* splits, const char* server_host,
                           uint16_t server_port, double link_bandwidth_bytes_per_s,
                           double link_latency_ms, uint32_t runs, uint32_t warmup,
                           const char* out_dir, char** summary_json) {
  if (ctx == nullptr || dataset_dir == nullptr || splits == nullptr ||
      summary_json == nullptr) {
    return invalid_arg("NULL argument");
  }
  return guarded([&] {
    std::optional<std::pair<std::string, uint16_t>> server;
    if (server_host != nullptr) server = {std::string(server_host), server_port};
    std::optional<std::filesystem::path> out;
    if (out_dir != nullptr) out = std::filesystem::path(out_dir);
    spc::SweepReport report = spc::bench_sweep(
        *ctx->engine, dataset_dir, split_labels_arg(splits), server,
        spc::LinkEmulation{link_bandwidth_bytes_per_s, link_latency_ms},
        static_cast<int>(runs), static_cast<int>(warmup), out);
    *summary_json = dup_string(spc::sweep_to_json(report));
  });
}

spc_status spc_replay_reference(char** report_json) {
  if (report_json == nullptr) return invalid_arg("NULL argument");
  spc::ReplayReport report = spc::replay_reference();
  spc_status rc = guarded([&] { *report_json = dup_string(spc::replay_to_json(report)); });
  if (rc != SPC_OK) return rc;
  if (!report.all_pass) {
    g_last_error = "reference replay checks failed";
    return SPC_ERR_ASSERTION;
  }
  return SPC_OK;
}

}  // extern "C"
