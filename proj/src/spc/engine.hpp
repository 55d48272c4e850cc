// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <variant>

#include "spc/detector.hpp"
#include "spc/graph.hpp"

namespace spc {

using StageValue =
    std::variant<PointCloud, SparseVoxelTensor, DenseBEVTensor, Proposals, Detections>;

/// Tensor id -> value. std::map keeps iteration deterministic.
using Env = std::map<std::string, StageValue>;

struct StepTiming {
  std::string step;
  double ms = 0.0;
};

struct PipelineResult {
  Detections detections;
  std::vector<StepTiming> step_ms;  // pipeline order
};

/// One configured model instance: config + seeded weights + module graph.
/// Every execution path (monolithic, head, tail) funnels through run_steps,
/// which is what makes split and monolithic runs bit-identical.
class Engine {
 public:
  Engine(ArchConfig cfg, uint64_t seed);

  const ArchConfig& config() const { return cfg_; }
  const ModelWeights& weights() const { return weights_; }
  const ModuleGraph& graph() const { return graph_; }
  uint64_t seed() const { return seed_; }
  uint64_t arch_hash() const { return cfg_.arch_hash(seed_); }

  /// Execute the named steps in order against `env`, recording wall-clock
  /// duration per step. Missing consumed tensors raise MissingScale for the
  /// RoI head's multi-scale inputs, IndexError otherwise.
  std::vector<StepTiming> run_steps(const std::vector<std::string>& steps,
                                    Env& env) const;

  /// Full pipeline on one cloud.
  PipelineResult run_pipeline(const PointCloud& cloud) const;

  /// Collect `tensor_ids` from env into a wire bundle (production order).
  TensorBundle make_bundle(const std::vector<std::string>& tensor_ids,
                           const Env& env) const;

  /// Decode bundle entries back into env values, using the graph's kind map.
  void merge_bundle(const TensorBundle& bundle, Env& env) const;

 private:
  void run_one(const std::string& step_id, Env& env) const;
  const StageValue& lookup(const Env& env, const std::string& id,
                           const std::string& step) const;

  ArchConfig cfg_;
  uint64_t seed_;
  ModelWeights weights_;
  ModuleGraph graph_;
};

/// Pipeline-order module timings aggregated to the six detector modules
/// (conv1..conv4 folded into backbone3d, "pre" excluded).
std::vector<std::pair<std::string, double>> aggregate_module_times(
    const std::vector<StepTiming>& steps);

}  // namespace spc
