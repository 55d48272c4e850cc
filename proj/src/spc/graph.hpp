// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "spc/config.hpp"

namespace spc {

/// What kind of value a pipeline tensor id names; the wire layer uses this
/// to pick a bundle encoding.
enum class ValueKind { Points, Sparse, Dense, Proposals, Detections };

struct ModuleNode {
  std::string id;                     // step id, e.g. "conv2"
  std::vector<std::string> consumes;  // tensor ids read
  std::string produces;               // tensor id written
  ValueKind kind;                     // kind of the produced tensor
};

/// The ordered pipeline with tensor dependencies. The source tensor id is
/// "points"; every consumed id must be produced earlier (or be the source).
struct ModuleGraph {
  static constexpr const char* kSourceTensor = "points";

  std::vector<ModuleNode> nodes;

  size_t step_count() const { return nodes.size(); }
  const ModuleNode* find_step(const std::string& id) const;
  const ModuleNode* find_producer(const std::string& tensor_id) const;
  ValueKind kind_of(const std::string& tensor_id) const;

  /// Throws ConfigError if the order is not a valid topological order.
  void validate() const;
};

/// Position k means "split after the k-th producing step": k = 0 transfers
/// the raw input (server-only), k = step_count() runs everything on the
/// device.
struct SplitPoint {
  int index = 0;
  std::string label;
};

struct SplitPlan {
  std::vector<std::string> head_steps;
  std::vector<std::string> tail_steps;
  std::vector<std::string> transfer_set;  // in production order
  int split_index = 0;
  std::string label;
};

/// The fixed ten-step detector graph: pre, vfe, conv1..conv4, map_to_bev,
/// backbone2d, dense_head, roi_head.
ModuleGraph build_module_graph(const ArchConfig& cfg);

/// All split positions with their labels ("raw_points", "after_pre",
/// "after_vfe", "after_conv1".."after_conv4", "after_map_to_bev",
/// "after_backbone2d", "after_dense_head", "monolithic").
std::vector<SplitPoint> all_split_points(const ModuleGraph& g);

std::string split_label_for(const ModuleGraph& g, int index);
SplitPoint split_point_from_label(const ModuleGraph& g, const std::string& label);

/// Tensors produced at-or-before the split and consumed after it, by
/// dependency scan (the raw input itself at k = 0). Throws IndexError for an
/// out-of-range split.
std::vector<std::string> transfer_set(const ModuleGraph& g, const SplitPoint& s);

/// Head/tail partition with its transfer set.
SplitPlan partition(const ModuleGraph& g, const SplitPoint& s);

}  // namespace spc
