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

#include "actseg/features.hpp"

#include "actseg/error.hpp"

#include <cmath>
#include <numbers>

namespace actseg {

namespace {

void require_min_shape(const Raster& r, const char* what)
{
    if (r.rows() < 3 || r.cols() < 3)
        throw ArgumentError(std::string(what) + " must be at least 3x3");
}

// d/dx and d/dy by central differences, replicated borders.
void central_xy(const Raster& f, Raster& dx, Raster& dy)
{
    const std::size_t R = f.rows(), C = f.cols();
    dx = Raster(R, C);
    dy = Raster(R, C);
    for (std::size_t y = 0; y < R; ++y) {
        const std::size_t ym = y == 0 ? 0 : y - 1;
        const std::size_t yp = y + 1 == R ? y : y + 1;
        for (std::size_t x = 0; x < C; ++x) {
            const std::size_t xm = x == 0 ? 0 : x - 1;
            const std::size_t xp = x + 1 == C ? x : x + 1;
            dx(y, x) = (f(y, xp) - f(y, xm)) / 2.0;
            dy(y, x) = (f(yp, x) - f(ym, x)) / 2.0;
        }
    }
}

} // namespace

GradientField spatial_gradients(const Frame& frame)
{
    require_min_shape(frame, "frame");
    GradientField g;
    central_xy(frame, g.jx, g.jy);
    const std::size_t R = frame.rows(), C = frame.cols();
    g.jxx = Raster(R, C);
    g.jyy = Raster(R, C);
    for (std::size_t y = 0; y < R; ++y) {
        const std::size_t ym = y == 0 ? 0 : y - 1;
        const std::size_t yp = y + 1 == R ? y : y + 1;
        for (std::size_t x = 0; x < C; ++x) {
            const std::size_t xm = x == 0 ? 0 : x - 1;
            const std::size_t xp = x + 1 == C ? x : x + 1;
            g.jxx(y, x) = frame(y, xp) - 2.0 * frame(y, x) + frame(y, xm);
            g.jyy(y, x) = frame(yp, x) - 2.0 * frame(y, x) + frame(ym, x);
        }
    }
    return g;
}

FlowField optical_flow(const Frame& prev, const Frame& next, const FlowOptions& opt)
{
    if (!prev.same_shape(next))
        throw ArgumentError("optical_flow: frames differ in shape");
    require_min_shape(prev, "frame");

    const std::size_t R = prev.rows(), C = prev.cols();
    const double s = opt.intensity_scale;
    Raster mean(R, C);
    kernels::FlowDerivatives d;
    d.it = Raster(R, C);
    for (std::size_t i = 0; i < prev.size(); ++i) {
        mean.data()[i] = 0.5 * s * (prev.data()[i] + next.data()[i]);
        d.it.data()[i] = s * (next.data()[i] - prev.data()[i]);
    }
    central_xy(mean, d.ix, d.iy);

    FlowField flow = FlowField::zeros(R, C);
    if (opt.parallel)
        kernels::omp::horn_schunck(d, opt.solver, flow.u, flow.v);
    else
        kernels::serial::horn_schunck(d, opt.solver, flow.u, flow.v);
    return flow;
}

FlowField flow_temporal_derivative(const FlowField& flow_prev, const FlowField& flow_cur)
{
    if (!flow_prev.u.same_shape(flow_cur.u) || !flow_prev.v.same_shape(flow_cur.v))
        throw ArgumentError("flow_temporal_derivative: shape mismatch");
    FlowField out = flow_cur;
    for (std::size_t i = 0; i < out.u.size(); ++i) {
        out.u.data()[i] -= flow_prev.u.data()[i];
        out.v.data()[i] -= flow_prev.v.data()[i];
    }
    return out;
}

FlowSpatialTerms flow_spatial_terms(const FlowField& flow)
{
    require_min_shape(flow.u, "flow field");
    if (!flow.u.same_shape(flow.v))
        throw ArgumentError("flow_spatial_terms: u and v differ in shape");
    Raster ux, uy, vx, vy;
    central_xy(flow.u, ux, uy);
    central_xy(flow.v, vx, vy);
    FlowSpatialTerms t{Raster(flow.u.rows(), flow.u.cols()), Raster(flow.u.rows(), flow.u.cols())};
    for (std::size_t i = 0; i < ux.size(); ++i) {
        t.divergence.data()[i] = ux.data()[i] + vy.data()[i];
        t.vorticity.data()[i] = vx.data()[i] - uy.data()[i];
    }
    return t;
}

FrameFeatures extract_frame_features(const Frame& frame, const GradientField& grads, const FlowField& flow,
                                     const FlowField& dflow, double tau, std::size_t frame_index)
{
    if (!(tau >= 0.0))
        throw ArgumentError("tau must be non-negative");
    for (const Raster* r : {&grads.jx, &grads.jy, &grads.jxx, &grads.jyy, &flow.u, &flow.v, &dflow.u, &dflow.v})
        if (!r->same_shape(frame))
            throw ArgumentError("extract_frame_features: input shapes differ from the frame");

    const double tau_eff = tau / 255.0;
    const FlowSpatialTerms terms = flow_spatial_terms(flow);

    FrameFeatures out;
    out.frame_index = frame_index;
    for (std::size_t y = 0; y < frame.rows(); ++y) {
        for (std::size_t x = 0; x < frame.cols(); ++x) {
            const double jx = grads.jx(y, x), jy = grads.jy(y, x);
            const double mag = std::sqrt(jx * jx + jy * jy);
            if (!(mag > tau_eff))
                continue;
            const double ax = std::abs(jx), ay = std::abs(jy);
            double orient;
            if (ax == 0.0)
                orient = ay == 0.0 ? 0.0 : std::numbers::pi / 2.0;
            else
                orient = std::atan(ay / ax);

            FeatureVector& f = out.vectors.emplace_back();
            f[kX] = static_cast<double>(x + 1);
            f[kY] = static_cast<double>(y + 1);
            f[kAbsJx] = ax;
            f[kAbsJy] = ay;
            f[kAbsJyy] = std::abs(grads.jyy(y, x));
            f[kAbsJxx] = std::abs(grads.jxx(y, x));
            f[kMagnitude] = mag;
            f[kOrientation] = orient;
            f[kFlowU] = flow.u(y, x);
            f[kFlowV] = flow.v(y, x);
            f[kFlowDuDt] = dflow.u(y, x);
            f[kFlowDvDt] = dflow.v(y, x);
            f[kDivergence] = terms.divergence(y, x);
            f[kVorticity] = terms.vorticity(y, x);
        }
    }
    return out;
}

std::vector<FrameFeatures> extract_video_features(const FrameSequence& seq, double tau, std::size_t stride,
                                                  const FlowOptions& flow_opt)
{
    if (stride == 0)
        throw ArgumentError("frame sampling stride must be positive");
    const std::size_t T = seq.length();
    if (T == 0)
        throw ArgumentError("empty frame sequence");
    const std::size_t R = seq.rows(), C = seq.cols();

    // Flow is needed at every sampled frame t and at t-1.
    std::vector<char> need(T, 0);
    for (std::size_t t = 0; t < T; t += stride) {
        need[t] = 1;
        if (t > 0)
            need[t - 1] = 1;
    }

    FlowOptions inner = flow_opt;
    inner.parallel = false;
    std::vector<FlowField> flows(T);
#pragma omp parallel for schedule(dynamic, 1)
    for (long ti = 0; ti < static_cast<long>(T); ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        if (!need[t])
            continue;
        if (T == 1)
            flows[t] = FlowField::zeros(R, C);
        else if (t == 0)
            flows[t] = optical_flow(seq.frames[0], seq.frames[1], inner);
        else
            flows[t] = optical_flow(seq.frames[t - 1], seq.frames[t], inner);
    }

    std::vector<FrameFeatures> out(T);
    const FlowField zero = FlowField::zeros(R, C);
#pragma omp parallel for schedule(dynamic, 1)
    for (long ti = 0; ti < static_cast<long>(T); ti += static_cast<long>(stride)) {
        const auto t = static_cast<std::size_t>(ti);
        const FlowField dflow = flow_temporal_derivative(t == 0 ? zero : flows[t - 1], flows[t]);
        out[t] = extract_frame_features(seq.frames[t], spatial_gradients(seq.frames[t]), flows[t], dflow, tau, t + 1);
    }
    for (std::size_t t = 0; t < T; ++t)
        out[t].frame_index = t + 1;
    return out;
}

} // namespace actseg
