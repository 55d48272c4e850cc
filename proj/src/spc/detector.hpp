// Copyright 2026 The splitpoint Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "spc/config.hpp"
#include "spc/ingest.hpp"
#include "spc/tensor.hpp"
#include "spc/weights.hpp"

namespace spc {

/// Backbone outputs at strides 1x, 2x, 4x, 8x. The RoI head consumes
/// conv2..conv4, which is why those tensors cross the link for late splits.
struct MultiScaleFeatures {
  SparseVoxelTensor conv1, conv2, conv3, conv4;
};

/// Mean-feature voxelization. Cell index per axis: floor((p - min) / voxel),
/// clamped to the last cell to absorb float noise at the crop boundary.
/// The feature is the mean of (x, y, z, intensity) over the first
/// `max_points_per_voxel` points that land in the cell, in input order,
/// accumulated in double. Output is canonical. Throws EmptyCloud when no
/// voxel results.
SparseVoxelTensor voxelize_mean(const PointCloud& cloud, const ArchConfig& cfg);

/// One sparse 3x3x3 convolution + ReLU, accumulated in double per output
/// channel over a fixed tap order.
///   stride 1: submanifold -- output coords equal input coords.
///   stride 2: output coords are the unique halved input coords; the value
///   at output o sums taps over inputs at 2o + k, k in [-1,1]^3.
SparseVoxelTensor sparse_conv3d(const SparseVoxelTensor& in, const ConvWeights& w,
                                int stride);

/// The four-stage sparse backbone (stage 1 submanifold, stages 2-4 strided).
MultiScaleFeatures backbone3d(const SparseVoxelTensor& input, const ModelWeights& w);

/// Stack the z axis of conv4 into channels: BEV channel d * C + c holds
/// channel c of depth slice d. Zero where unoccupied.
DenseBEVTensor map_to_bev(const SparseVoxelTensor& conv4, int64_t cap = kDensifyCapDefault);

/// Dense 3x3 convolution, stride 1, zero padding, ReLU.
DenseBEVTensor conv2d_3x3(const DenseBEVTensor& in, const ConvWeights& w);

/// Two 3x3 convolutions over the BEV map.
DenseBEVTensor backbone2d(const DenseBEVTensor& bev, const ModelWeights& w);

/// Per-cell 1x1 head: (objectness, 7 box deltas) against one axis-aligned
/// anchor per BEV cell. Keeps the top_k cells by objectness, ties broken by
/// (row, col) ascending.
Proposals dense_head(const DenseBEVTensor& feat, const ModelWeights& w,
                     const ArchConfig& cfg);

/// Pool the mean voxel feature inside each proposal's axis-aligned bounds at
/// conv2/conv3/conv4, concatenate, score with the linear layer, and re-sort
/// by refined score (stable in proposal order).
Detections roi_head(const Proposals& props, const SparseVoxelTensor& conv2,
                    const SparseVoxelTensor& conv3, const SparseVoxelTensor& conv4,
                    const ModelWeights& w, const ArchConfig& cfg);

}  // namespace spc
