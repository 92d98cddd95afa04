// Copyright 2026 The actseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "actseg/kernels.hpp"
#include "actseg/video_io.hpp"

#include <vector>

namespace actseg {

/// Slots of the 14-D per-pixel descriptor, in storage order.
enum FeatureSlot : std::size_t {
    kX = 0,
    kY,
    kAbsJx,
    kAbsJy,
    kAbsJyy,
    kAbsJxx,
    kMagnitude,
    kOrientation,
    kFlowU,
    kFlowV,
    kFlowDuDt,
    kFlowDvDt,
    kDivergence,
    kVorticity,
};

struct GradientField {
    Raster jx, jy, jxx, jyy;
};

/// Dense flow in pixels per frame.
struct FlowField {
    Raster u, v;

    static FlowField zeros(std::size_t rows, std::size_t cols) { return {Raster(rows, cols), Raster(rows, cols)}; }
};

struct FlowSpatialTerms {
    Raster divergence, vorticity;
};

struct FrameFeatures {
    std::size_t frame_index = 0; ///< 1-based
    std::vector<FeatureVector> vectors;
};

/// Central differences with replicated borders: Jx = (I(x+1) - I(x-1)) / 2,
/// Jxx = I(x+1) - 2 I(x) + I(x-1). Requires at least 3x3.
GradientField spatial_gradients(const Frame& frame);

/// Options for the dense flow solver. Intensities are multiplied by
/// intensity_scale before solving so that alpha is in 8-bit units.
struct FlowOptions {
    kernels::HornSchunckOptions solver{};
    double intensity_scale = 255.0;
    bool parallel = true;
};

/// Horn-Schunck flow from `prev` to `next`.
FlowField optical_flow(const Frame& prev, const Frame& next, const FlowOptions& opt = {});

/// Backward difference flow_cur - flow_prev.
FlowField flow_temporal_derivative(const FlowField& flow_prev, const FlowField& flow_cur);

FlowSpatialTerms flow_spatial_terms(const FlowField& flow);

/// Emits one descriptor per pixel whose gradient magnitude exceeds tau/255.
/// tau is given in 8-bit intensity units.
FrameFeatures extract_frame_features(const Frame& frame, const GradientField& grads, const FlowField& flow,
                                     const FlowField& dflow, double tau, std::size_t frame_index = 0);

/// Per-video extraction. Entry t-1 holds the features of frame t; only
/// frames 1, 1+stride, 1+2*stride, ... are populated, the rest stay empty.
///
/// Flow at frame t is estimated from frame t-1 to frame t; frame 1 uses the
/// pair (1, 2) and a single-frame video has zero flow. The temporal flow
/// derivative at frame 1 is taken against a zero field.
std::vector<FrameFeatures> extract_video_features(const FrameSequence& seq, double tau, std::size_t stride = 2,
                                                  const FlowOptions& flow_opt = {});

} // namespace actseg
