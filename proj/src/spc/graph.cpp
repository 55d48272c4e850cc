// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#include "spc/graph.hpp"

#include <algorithm>
#include <set>

namespace spc {

const ModuleNode* ModuleGraph::find_step(const std::string& id) const {
  for (const ModuleNode& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const ModuleNode* ModuleGraph::find_producer(const std::string& tensor_id) const {
  for (const ModuleNode& n : nodes) {
    if (n.produces == tensor_id) return &n;
  }
  return nullptr;
}

ValueKind ModuleGraph::kind_of(const std::string& tensor_id) const {
  if (tensor_id == kSourceTensor) return ValueKind::Points;
  const ModuleNode* n = find_producer(tensor_id);
  if (n == nullptr) fail(Status::IndexError, "unknown tensor id '" + tensor_id + "'");
  return n->kind;
}

void ModuleGraph::validate() const {
  std::set<std::string> available{kSourceTensor};
  std::set<std::string> produced;
  for (const ModuleNode& n : nodes) {
    for (const std::string& c : n.consumes) {
      if (!available.count(c)) {
        fail(Status::ConfigError,
             "step '" + n.id + "' consumes '" + c + "' before it is produced");
      }
    }
    if (!produced.insert(n.produces).second) {
      fail(Status::ConfigError, "tensor '" + n.produces + "' produced twice");
    }
    available.insert(n.produces);
  }
}

ModuleGraph build_module_graph(const ArchConfig& cfg) {
  cfg.validate();
  ModuleGraph g;
  g.nodes = {
      {"pre", {"points"}, "pre_out", ValueKind::Points},
      {"vfe", {"pre_out"}, "vfe_out", ValueKind::Sparse},
      {"conv1", {"vfe_out"}, "conv1", ValueKind::Sparse},
      {"conv2", {"conv1"}, "conv2", ValueKind::Sparse},
      {"conv3", {"conv2"}, "conv3", ValueKind::Sparse},
      {"conv4", {"conv3"}, "conv4", ValueKind::Sparse},
      {"map_to_bev", {"conv4"}, "bev", ValueKind::Dense},
      {"backbone2d", {"bev"}, "bev2d", ValueKind::Dense},
      {"dense_head", {"bev2d"}, "proposals", ValueKind::Proposals},
      {"roi_head", {"proposals", "conv2", "conv3", "conv4"}, "detections",
       ValueKind::Detections},
  };
  g.validate();
  return g;
}

std::string split_label_for(const ModuleGraph& g, int index) {
  if (index < 0 || index > static_cast<int>(g.step_count())) {
    fail(Status::IndexError, "split index " + std::to_string(index) + " out of range");
  }
  if (index == 0) return "raw_points";
  if (index == static_cast<int>(g.step_count())) return "monolithic";
  return "after_" + g.nodes[static_cast<size_t>(index) - 1].id;
}

std::vector<SplitPoint> all_split_points(const ModuleGraph& g) {
  std::vector<SplitPoint> out;
  for (int k = 0; k <= static_cast<int>(g.step_count()); ++k) {
    out.push_back({k, split_label_for(g, k)});
  }
  return out;
}

SplitPoint split_point_from_label(const ModuleGraph& g, const std::string& label) {
  for (int k = 0; k <= static_cast<int>(g.step_count()); ++k) {
    if (split_label_for(g, k) == label) return {k, label};
  }
  fail(Status::IndexError, "unknown split label '" + label + "'");
}

std::vector<std::string> transfer_set(const ModuleGraph& g, const SplitPoint& s) {
  if (s.index < 0 || s.index > static_cast<int>(g.step_count())) {
    fail(Status::IndexError, "split index " + std::to_string(s.index) + " out of range");
  }
  const size_t k = static_cast<size_t>(s.index);

  // Tensors available to the head, in production order.
  std::vector<std::string> available{ModuleGraph::kSourceTensor};
  for (size_t i = 0; i < k; ++i) available.push_back(g.nodes[i].produces);

  std::set<std::string> wanted;
  for (size_t i = k; i < g.step_count(); ++i) {
    for (const std::string& c : g.nodes[i].consumes) wanted.insert(c);
  }

  std::vector<std::string> out;
  for (const std::string& t : available) {
    if (wanted.count(t)) out.push_back(t);
  }
  return out;
}

SplitPlan partition(const ModuleGraph& g, const SplitPoint& s) {
  SplitPlan plan;
  plan.transfer_set = transfer_set(g, s);  // validates the index
  plan.split_index = s.index;
  plan.label = s.label.empty() ? split_label_for(g, s.index) : s.label;
  for (size_t i = 0; i < g.step_count(); ++i) {
    if (i < static_cast<size_t>(s.index)) {
      plan.head_steps.push_back(g.nodes[i].id);
    } else {
      plan.tail_steps.push_back(g.nodes[i].id);
    }
  }
  return plan;
}

}  // namespace spc
