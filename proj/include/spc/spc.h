/* Copyright 2026 The splitpoint Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Public C API of libspc, the split-computing runtime for voxel-based
 * 3D point-cloud object detection.
 *
 * Conventions:
 *   - Every function returns spc_status; SPC_OK (0) means success.
 *   - Out-parameters are written only on success.
 *   - Objects are opaque handles released with the matching _destroy/_stop.
 *   - Strings returned through char** out-parameters are heap-allocated;
 *     release them with spc_string_free.
 *   - spc_last_error_message() describes the most recent failure on the
 *     calling thread.
 */

#ifndef SPC_SPC_H_
#define SPC_SPC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define SPC_API __attribute__((visibility("default")))
#else
#define SPC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spc_status {
  SPC_OK = 0,
  SPC_ERR_INVALID_ARGUMENT,
  SPC_ERR_LENGTH,
  SPC_ERR_VALUE,
  SPC_ERR_CONFIG,
  SPC_ERR_IO,
  SPC_ERR_EMPTY_DATASET,
  SPC_ERR_EMPTY_CLOUD,
  SPC_ERR_SHAPE,
  SPC_ERR_SIZE,
  SPC_ERR_INDEX,
  SPC_ERR_DOMAIN,
  SPC_ERR_DUPLICATE_COORD,
  SPC_ERR_OUT_OF_BOUNDS,
  SPC_ERR_MISSING_SCALE,
  SPC_ERR_MISSING_PROFILE,
  SPC_ERR_NON_CANONICAL,
  SPC_ERR_OVERSIZE,
  SPC_ERR_PROTOCOL,
  SPC_ERR_CONNECT,
  SPC_ERR_HANDSHAKE,
  SPC_ERR_SERVER,
  SPC_ERR_ASSERTION,
  SPC_ERR_INTERNAL
} spc_status;

SPC_API const char* spc_status_name(spc_status status);

/* Thread-local detail for the most recent error. Never NULL. */
SPC_API const char* spc_last_error_message(void);

SPC_API void spc_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Context: architecture profile + config file overrides + weight seed. */

typedef struct spc_context spc_context;

/* profile: "default" (KITTI-scale) or "tiny"; NULL means "default".
 * config_path: optional key=value file applied on top; NULL to skip. */
SPC_API spc_status spc_context_create(const char* profile,
                                      const char* config_path, uint64_t seed,
                                      spc_context** out);
SPC_API void spc_context_destroy(spc_context* ctx);

SPC_API spc_status spc_context_arch_hash(const spc_context* ctx, uint64_t* out);

/* Canonical key=value serialization of the active configuration. */
SPC_API spc_status spc_context_config_text(const spc_context* ctx, char** out);

/* Flat little-endian float32 weight blob (documented stage order). */
SPC_API spc_status spc_context_save_weights(const spc_context* ctx,
                                            const char* path);

/* Split labels, comma-separated: raw_points, after_pre, after_vfe,
 * after_conv1..after_conv4, after_map_to_bev, after_backbone2d,
 * after_dense_head, monolithic. */
SPC_API spc_status spc_context_split_labels(const spc_context* ctx, char** out);

/* ------------------------------------------------------------------ */
/* Scenes. */

typedef struct spc_cloud spc_cloud;

SPC_API spc_status spc_cloud_load(const char* bin_path, spc_cloud** out);
SPC_API spc_status spc_cloud_point_count(const spc_cloud* cloud, uint64_t* out);
SPC_API void spc_cloud_destroy(spc_cloud* cloud);

/* Write `count` deterministic synthetic scenes (KITTI .bin layout) covering
 * the context's crop range. */
SPC_API spc_status spc_gen_scenes(const spc_context* ctx, const char* out_dir,
                                  uint32_t count, uint32_t points_per_scene,
                                  uint64_t seed);

/* ------------------------------------------------------------------ */
/* Inference. */

typedef struct spc_result spc_result;

SPC_API spc_status spc_run_monolithic(const spc_context* ctx,
                                      const spc_cloud* cloud, spc_result** out);

/* Run the head locally, ship the transfer set to `host:port` through an
 * emulated link (bandwidth 0 = unshaped), and await the result.
 * Detections are bit-identical to spc_run_monolithic for every split. */
SPC_API spc_status spc_infer_remote(const spc_context* ctx, const char* host,
                                    uint16_t port, const char* split_label,
                                    const spc_cloud* cloud,
                                    double link_bandwidth_bytes_per_s,
                                    double link_latency_ms, spc_result** out);

SPC_API spc_status spc_result_detection_count(const spc_result* r, uint64_t* out);

/* box: cx, cy, cz, dx, dy, dz, yaw (meters / radians). */
SPC_API spc_status spc_result_detection(const spc_result* r, uint64_t index,
                                        float box[7], float* score,
                                        int32_t* label);

/* Timing report as JSON: head_compute_ms, transfer_ms, tail_compute_ms,
 * result_return_ms, total_inference_ms, edge_execution_ms, payload_bytes,
 * split, scene. */
SPC_API spc_status spc_result_timing_json(const spc_result* r, char** out);

SPC_API void spc_result_destroy(spc_result* r);

/* ------------------------------------------------------------------ */
/* Server role. */

typedef struct spc_server spc_server;

SPC_API spc_status spc_server_start(const spc_context* ctx, const char* bind_addr,
                                    uint16_t port, spc_server** out);
SPC_API spc_status spc_server_port(const spc_server* server, uint16_t* out);
/* Stops and releases the server. */
SPC_API spc_status spc_server_stop(spc_server* server);

/* ------------------------------------------------------------------ */
/* Benchmarks. Each call writes report files under out_dir (when given)
 * and returns a JSON summary. */

SPC_API spc_status spc_bench_profile(const spc_context* ctx,
                                     const char* dataset_dir, uint32_t runs,
                                     uint32_t warmup, const char* out_dir,
                                     char** summary_json);

/* splits: comma-separated labels. server_host NULL runs both roles
 * in-process over loopback. */
SPC_API spc_status spc_bench_sweep(const spc_context* ctx, const char* dataset_dir,
                                   const char* splits, const char* server_host,
                                   uint16_t server_port,
                                   double link_bandwidth_bytes_per_s,
                                   double link_latency_ms, uint32_t runs,
                                   uint32_t warmup, const char* out_dir,
                                   char** summary_json);

/* Replay the published reference measurements through the reduction and
 * timing arithmetic. Returns SPC_ERR_ASSERTION if any check fails;
 * the JSON report is produced either way. */
SPC_API spc_status spc_replay_reference(char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* SPC_SPC_H_ */
