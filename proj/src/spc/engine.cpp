// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/engine.hpp"

#include <chrono>

namespace spc {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

DenseBEVTensor cloud_to_dense(const PointCloud& cloud) {
  // Interleaved (x, y, z, intensity) rows; matches the .bin byte layout.
  DenseBEVTensor t;
  t.channels = 1;
  t.height = static_cast<int32_t>(cloud.points.size());
  t.width = 4;
  t.data.reserve(cloud.points.size() * 4);
  for (const Point& p : cloud.points) {
    t.data.push_back(p.x);
    t.data.push_back(p.y);
    t.data.push_back(p.z);
    t.data.push_back(p.intensity);
  }
  return t;
}

PointCloud dense_to_cloud(const DenseBEVTensor& t, const std::string& id) {
  if (t.channels != 1 || t.width != 4) {
    fail(Status::ProtocolError, "tensor '" + id + "' does not decode to a point cloud");
  }
  PointCloud cloud;
  cloud.points.resize(static_cast<size_t>(t.height));
  for (int32_t i = 0; i < t.height; ++i) {
    const size_t off = static_cast<size_t>(i) * 4;
    cloud.points[static_cast<size_t>(i)] =
        Point{t.data[off], t.data[off + 1], t.data[off + 2], t.data[off + 3]};
  }
  return cloud;
}

DenseBEVTensor proposals_to_dense(const Proposals& p) {
  DenseBEVTensor t;
  t.channels = 1;
  t.height = static_cast<int32_t>(p.size());
  t.width = 8;
  t.data.reserve(p.size() * 8);
  for (size_t i = 0; i < p.size(); ++i) {
    for (float v : p.boxes[i]) t.data.push_back(v);
    t.data.push_back(p.objectness[i]);
  }
  return t;
}

Proposals dense_to_proposals(const DenseBEVTensor& t, const std::string& id) {
  if (t.channels != 1 || t.width != 8) {
    fail(Status::ProtocolError, "tensor '" + id + "' does not decode to proposals");
  }
  Proposals p;
  p.boxes.resize(static_cast<size_t>(t.height));
  p.objectness.resize(static_cast<size_t>(t.height));
  for (int32_t i = 0; i < t.height; ++i) {
    const size_t off = static_cast<size_t>(i) * 8;
    for (int j = 0; j < 7; ++j) p.boxes[static_cast<size_t>(i)][static_cast<size_t>(j)] = t.data[off + static_cast<size_t>(j)];
    p.objectness[static_cast<size_t>(i)] = t.data[off + 7];
  }
  return p;
}

}  // namespace

Engine::Engine(ArchConfig cfg, uint64_t seed)
    : cfg_(std::move(cfg)),
      seed_(seed),
      weights_(init_weights(seed, cfg_)),
      graph_(build_module_graph(cfg_)) {}

const StageValue& Engine::lookup(const Env& env, const std::string& id,
                                 const std::string& step) const {
  auto it = env.find(id);
  if (it == env.end()) {
    if (step == "roi_head" && (id == "conv2" || id == "conv3" || id == "conv4")) {
      fail(Status::MissingScale, "roi_head requires '" + id + "' which is absent");
    }
    fail(Status::IndexError, "step '" + step + "' is missing input '" + id + "'");
  }
  return it->second;
}

void Engine::run_one(const std::string& step_id, Env& env) const {
  if (step_id == "pre") {
    const auto& cloud = std::get<PointCloud>(lookup(env, "points", step_id));
    env["pre_out"] = filter_range(cloud, cfg_.range);
  } else if (step_id == "vfe") {
    const auto& cloud = std::get<PointCloud>(lookup(env, "pre_out", step_id));
    env["vfe_out"] = voxelize_mean(cloud, cfg_);
  } else if (step_id == "conv1") {
    const auto& in = std::get<SparseVoxelTensor>(lookup(env, "vfe_out", step_id));
    env["conv1"] = sparse_conv3d(in, weights_.conv3d[0], 1);
  } else if (step_id == "conv2") {
    const auto& in = std::get<SparseVoxelTensor>(lookup(env, "conv1", step_id));
    env["conv2"] = sparse_conv3d(in, weights_.conv3d[1], 2);
  } else if (step_id == "conv3") {
    const auto& in = std::get<SparseVoxelTensor>(lookup(env, "conv2", step_id));
    env["conv3"] = sparse_conv3d(in, weights_.conv3d[2], 2);
  } else if (step_id == "conv4") {
    const auto& in = std::get<SparseVoxelTensor>(lookup(env, "conv3", step_id));
    env["conv4"] = sparse_conv3d(in, weights_.conv3d[3], 2);
  } else if (step_id == "map_to_bev") {
    const auto& in = std::get<SparseVoxelTensor>(lookup(env, "conv4", step_id));
    env["bev"] = map_to_bev(in, cfg_.densify_cap);
  } else if (step_id == "backbone2d") {
    const auto& in = std::get<DenseBEVTensor>(lookup(env, "bev", step_id));
    env["bev2d"] = backbone2d(in, weights_);
  } else if (step_id == "dense_head") {
    const auto& in = std::get<DenseBEVTensor>(lookup(env, "bev2d", step_id));
    env["proposals"] = dense_head(in, weights_, cfg_);
  } else if (step_id == "roi_head") {
    const auto& props = std::get<Proposals>(lookup(env, "proposals", step_id));
    const auto& c2 = std::get<SparseVoxelTensor>(lookup(env, "conv2", step_id));
    const auto& c3 = std::get<SparseVoxelTensor>(lookup(env, "conv3", step_id));
    const auto& c4 = std::get<SparseVoxelTensor>(lookup(env, "conv4", step_id));
    env["detections"] = roi_head(props, c2, c3, c4, weights_, cfg_);
  } else {
    fail(Status::IndexError, "unknown step '" + step_id + "'");
  }
}

std::vector<StepTiming> Engine::run_steps(const std::vector<std::string>& steps,
                                          Env& env) const {
  std::vector<StepTiming> times;
  times.reserve(steps.size());
  for (const std::string& id : steps) {
    const auto t0 = Clock::now();
    run_one(id, env);
    times.push_back({id, ms_since(t0)});
  }
  return times;
}

PipelineResult Engine::run_pipeline(const PointCloud& cloud) const {
  Env env;
  env["points"] = cloud;
  std::vector<std::string> steps;
  for (const ModuleNode& n : graph_.nodes) steps.push_back(n.id);
  PipelineResult result;
  result.step_ms = run_steps(steps, env);
  result.detections = std::get<Detections>(env.at("detections"));
  return result;
}

TensorBundle Engine::make_bundle(const std::vector<std::string>& tensor_ids,
                                 const Env& env) const {
  TensorBundle bundle;
  for (const std::string& id : tensor_ids) {
    auto it = env.find(id);
    if (it == env.end()) {
      fail(Status::Internal, "bundle tensor '" + id + "' missing from environment");
    }
    BundleEntry entry;
    entry.id = id;
    switch (graph_.kind_of(id)) {
      case ValueKind::Points:
        entry.payload = cloud_to_dense(std::get<PointCloud>(it->second));
        break;
      case ValueKind::Sparse:
        entry.payload = std::get<SparseVoxelTensor>(it->second);
        break;
      case ValueKind::Dense:
        entry.payload = std::get<DenseBEVTensor>(it->second);
        break;
      case ValueKind::Proposals:
        entry.payload = proposals_to_dense(std::get<Proposals>(it->second));
        break;
      case ValueKind::Detections:
        fail(Status::Internal, "detections never cross the link as a bundle");
    }
    bundle.entries.push_back(std::move(entry));
  }
  return bundle;
}

void Engine::merge_bundle(const TensorBundle& bundle, Env& env) const {
  for (const BundleEntry& e : bundle.entries) {
    switch (graph_.kind_of(e.id)) {
      case ValueKind::Points:
        env[e.id] = dense_to_cloud(std::get<DenseBEVTensor>(e.payload), e.id);
        break;
      case ValueKind::Sparse:
        env[e.id] = std::get<SparseVoxelTensor>(e.payload);
        break;
      case ValueKind::Dense:
        env[e.id] = std::get<DenseBEVTensor>(e.payload);
        break;
      case ValueKind::Proposals:
        env[e.id] = dense_to_proposals(std::get<DenseBEVTensor>(e.payload), e.id);
        break;
      case ValueKind::Detections:
        fail(Status::ProtocolError, "bundle may not carry detections");
    }
  }
}

std::vector<std::pair<std::string, double>> aggregate_module_times(
    const std::vector<StepTiming>& steps) {
  const std::vector<std::pair<std::string, std::string>> mapping = {
      {"vfe", "VFE"},
      {"conv1", "Backbone 3D"},
      {"conv2", "Backbone 3D"},
      {"conv3", "Backbone 3D"},
      {"conv4", "Backbone 3D"},
      {"map_to_bev", "Map to BEV"},
      {"backbone2d", "Backbone 2D"},
      {"dense_head", "Dense Head"},
      {"roi_head", "RoI Head"},
  };
  std::vector<std::pair<std::string, double>> out = {
      {"VFE", 0.0},        {"Backbone 3D", 0.0}, {"Map to BEV", 0.0},
      {"Backbone 2D", 0.0}, {"Dense Head", 0.0},  {"RoI Head", 0.0},
  };
  for (const StepTiming& st : steps) {
    for (const auto& [step, module] : mapping) {
      if (st.step == step) {
        for (auto& [name, total] : out) {
          if (name == module) total += st.ms;
        }
      }
    }
  }
  return out;
}

}  // namespace spc
