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

#include "actseg/error.hpp"
#include "actseg/features.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace actseg;
using actseg::testutil::random_raster;

namespace {

// Pixel access with replicated borders, written independently of the library.
double at(const Raster& r, long y, long x)
{
    y = std::clamp<long>(y, 0, static_cast<long>(r.rows()) - 1);
    x = std::clamp<long>(x, 0, static_cast<long>(r.cols()) - 1);
    return r(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
}

double dx(const Raster& r, long y, long x) { return (at(r, y, x + 1) - at(r, y, x - 1)) / 2.0; }
double dy(const Raster& r, long y, long x) { return (at(r, y + 1, x) - at(r, y - 1, x)) / 2.0; }

FlowField random_flow(std::size_t R, std::size_t C, std::mt19937_64& rng)
{
    return {random_raster(R, C, rng, -2.0, 2.0), random_raster(R, C, rng, -2.0, 2.0)};
}

} // namespace

TEST(Features, GradientsOfConstantFrameVanish)
{
    const GradientField g = spatial_gradients(Frame(6, 7, 0.3));
    for (const Raster* r : {&g.jx, &g.jy, &g.jxx, &g.jyy})
        for (double v : r->data())
            EXPECT_EQ(v, 0.0);
}

TEST(Features, GradientsOfRamp)
{
    const double a = 0.03;
    Frame f(8, 9);
    for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 9; ++x)
            f(y, x) = a * static_cast<double>(x);
    const GradientField g = spatial_gradients(f);
    for (std::size_t y = 1; y + 1 < 8; ++y)
        for (std::size_t x = 1; x + 1 < 9; ++x) {
            EXPECT_NEAR(g.jx(y, x), a, 1e-15);
            EXPECT_EQ(g.jy(y, x), 0.0);
            EXPECT_NEAR(g.jxx(y, x), 0.0, 1e-15);
            EXPECT_EQ(g.jyy(y, x), 0.0);
        }
}

TEST(Features, GradientsMatchFiniteDifferenceOracle)
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> dim(5, 16);
    for (int trial = 0; trial < 40; ++trial) {
        const Frame f = random_raster(dim(rng), dim(rng), rng);
        const GradientField g = spatial_gradients(f);
        for (long y = 0; y < static_cast<long>(f.rows()); ++y)
            for (long x = 0; x < static_cast<long>(f.cols()); ++x) {
                const auto uy = static_cast<std::size_t>(y), ux = static_cast<std::size_t>(x);
                EXPECT_EQ(g.jx(uy, ux), dx(f, y, x));
                EXPECT_EQ(g.jy(uy, ux), dy(f, y, x));
                EXPECT_EQ(g.jxx(uy, ux), at(f, y, x + 1) - 2.0 * at(f, y, x) + at(f, y, x - 1));
                EXPECT_EQ(g.jyy(uy, ux), at(f, y + 1, x) - 2.0 * at(f, y, x) + at(f, y - 1, x));
            }
    }
}

TEST(Features, GradientsRejectTinyFrames)
{
    EXPECT_THROW(spatial_gradients(Frame(2, 5)), ArgumentError);
    EXPECT_THROW(spatial_gradients(Frame(5, 2)), ArgumentError);
}

TEST(Features, FlowOfIdenticalFramesIsZero)
{
    std::mt19937_64 rng(1);
    const Frame f = random_raster(20, 24, rng);
    const FlowField flow = optical_flow(f, f);
    for (double v : flow.u.data())
        EXPECT_EQ(v, 0.0);
    for (double v : flow.v.data())
        EXPECT_EQ(v, 0.0);
}

TEST(Features, FlowRecoversHorizontalTranslation)
{
    const std::size_t R = 48, C = 64;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Frame a = actseg::testutil::periodic_texture(R, C, seed, 0.0);
        const Frame b = actseg::testutil::periodic_texture(R, C, seed, 1.0);
        const FlowField flow = optical_flow(a, b);
        std::vector<double> us, vs;
        for (std::size_t y = 4; y + 4 < R; ++y)
            for (std::size_t x = 4; x + 4 < C; ++x) {
                us.push_back(flow.u(y, x));
                vs.push_back(flow.v(y, x));
            }
        const double mu = actseg::testutil::median(us), mv = actseg::testutil::median(vs);
        EXPECT_GE(mu, 0.7) << "seed " << seed;
        EXPECT_LE(mu, 1.3) << "seed " << seed;
        EXPECT_GE(mv, -0.3) << "seed " << seed;
        EXPECT_LE(mv, 0.3) << "seed " << seed;
    }
}

TEST(Features, FlowOfBrightnessChangeIsFinite)
{
    const FlowField flow = optical_flow(Frame(10, 10, 0.2), Frame(10, 10, 0.8));
    for (const Raster* r : {&flow.u, &flow.v})
        for (double v : r->data()) {
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_LE(std::abs(v), 1e3);
        }
}

TEST(Features, FlowIsDeterministicAndSchedulingFree)
{
    std::mt19937_64 rng(8);
    const Frame a = random_raster(30, 40, rng);
    const Frame b = random_raster(30, 40, rng);
    FlowOptions serial;
    serial.parallel = false;
    const FlowField f1 = optical_flow(a, b);
    const FlowField f2 = optical_flow(a, b);
    const FlowField f3 = optical_flow(a, b, serial);
    EXPECT_EQ(f1.u, f2.u);
    EXPECT_EQ(f1.v, f2.v);
    EXPECT_EQ(f1.u, f3.u);
    EXPECT_EQ(f1.v, f3.v);
}

TEST(Features, FlowRejectsShapeMismatch)
{
    EXPECT_THROW(optical_flow(Frame(5, 5), Frame(5, 6)), ArgumentError);
}

TEST(Features, TemporalDerivative)
{
    std::mt19937_64 rng(4);
    const FlowField a = random_flow(7, 9, rng), b = random_flow(7, 9, rng);
    const FlowField same = flow_temporal_derivative(a, a);
    for (double v : same.u.data())
        EXPECT_EQ(v, 0.0);

    const FlowField id = flow_temporal_derivative(FlowField::zeros(7, 9), b);
    EXPECT_EQ(id.u, b.u);
    EXPECT_EQ(id.v, b.v);

    const FlowField d = flow_temporal_derivative(a, b);
    for (std::size_t i = 0; i < d.u.size(); ++i) {
        EXPECT_EQ(d.u.data()[i], b.u.data()[i] - a.u.data()[i]);
        EXPECT_EQ(d.v.data()[i], b.v.data()[i] - a.v.data()[i]);
    }
    EXPECT_THROW(flow_temporal_derivative(a, FlowField::zeros(7, 8)), ArgumentError);
}

TEST(Features, DivergenceAndVorticityOfSimpleFields)
{
    const FlowField uniform{Raster(6, 6, 3.0), Raster(6, 6, -2.0)};
    const FlowSpatialTerms t0 = flow_spatial_terms(uniform);
    for (std::size_t i = 0; i < t0.divergence.size(); ++i) {
        EXPECT_EQ(t0.divergence.data()[i], 0.0);
        EXPECT_EQ(t0.vorticity.data()[i], 0.0);
    }

    FlowField radial = FlowField::zeros(7, 8);
    for (std::size_t y = 0; y < 7; ++y)
        for (std::size_t x = 0; x < 8; ++x) {
            radial.u(y, x) = static_cast<double>(x);
            radial.v(y, x) = static_cast<double>(y);
        }
    const FlowSpatialTerms t1 = flow_spatial_terms(radial);
    for (std::size_t y = 1; y + 1 < 7; ++y)
        for (std::size_t x = 1; x + 1 < 8; ++x) {
            EXPECT_EQ(t1.divergence(y, x), 2.0);
            EXPECT_EQ(t1.vorticity(y, x), 0.0);
        }
}

TEST(Features, DivergenceAndVorticityMatchOracle)
{
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> dim(5, 16);
    for (int trial = 0; trial < 40; ++trial) {
        const FlowField f = random_flow(dim(rng), dim(rng), rng);
        const FlowSpatialTerms t = flow_spatial_terms(f);
        for (long y = 0; y < static_cast<long>(f.u.rows()); ++y)
            for (long x = 0; x < static_cast<long>(f.u.cols()); ++x) {
                const auto uy = static_cast<std::size_t>(y), ux = static_cast<std::size_t>(x);
                EXPECT_EQ(t.divergence(uy, ux), dx(f.u, y, x) + dy(f.v, y, x));
                EXPECT_EQ(t.vorticity(uy, ux), dx(f.v, y, x) - dy(f.u, y, x));
            }
    }
    EXPECT_THROW(flow_spatial_terms(FlowField::zeros(2, 9)), ArgumentError);
}

TEST(Features, ConstantFrameSelectsNothing)
{
    const Frame f(12, 12, 0.4);
    const FlowField z = FlowField::zeros(12, 12);
    EXPECT_TRUE(extract_frame_features(f, spatial_gradients(f), z, z, 40.0).vectors.empty());
}

TEST(Features, BrightPixelSelectsItsNeighbourhood)
{
    Frame f(9, 9, 0.0);
    f(4, 4) = 1.0;
    const FlowField z = FlowField::zeros(9, 9);
    const FrameFeatures ff = extract_frame_features(f, spatial_gradients(f), z, z, 40.0, 1);
    ASSERT_FALSE(ff.vectors.empty());
    for (const auto& v : ff.vectors) {
        EXPECT_GT(v[kMagnitude], 40.0 / 255.0);
        EXPECT_LE(std::abs(v[kX] - 5.0), 1.0);
        EXPECT_LE(std::abs(v[kY] - 5.0), 1.0);
    }
}

TEST(Features, SelectionCountMatchesThresholdScan)
{
    // A bright square shifted by one pixel between frames.
    const std::size_t R = 32, C = 40;
    Frame prev(R, C, 0.2), cur(R, C, 0.2);
    for (std::size_t y = 10; y < 20; ++y)
        for (std::size_t x = 12; x < 22; ++x) {
            prev(y, x) = 0.9;
            cur(y, x + 1) = 0.9;
        }
    const GradientField g = spatial_gradients(cur);
    const FlowField flow = optical_flow(prev, cur);
    const FlowField dflow = flow_temporal_derivative(FlowField::zeros(R, C), flow);
    for (double tau : {0.0, 10.0, 40.0, 100.0}) {
        const FrameFeatures ff = extract_frame_features(cur, g, flow, dflow, tau, 2);
        std::size_t expected = 0;
        for (long y = 0; y < static_cast<long>(R); ++y)
            for (long x = 0; x < static_cast<long>(C); ++x) {
                const double gx = dx(cur, y, x), gy = dy(cur, y, x);
                if (std::sqrt(gx * gx + gy * gy) > tau / 255.0)
                    ++expected;
            }
        EXPECT_EQ(ff.vectors.size(), expected) << "tau " << tau;
        EXPECT_LT(ff.vectors.size(), R * C);
    }
}

TEST(Features, VectorLayoutAndInvariants)
{
    std::mt19937_64 rng(9);
    const std::size_t R = 14, C = 17;
    Frame f = random_raster(R, C, rng);
    f(3, 5) = f(3, 4); // Jx = 0 at (3, 4) with Jy probably non-zero
    f(3, 3) = f(3, 5);
    const GradientField g = spatial_gradients(f);
    const FlowField flow = random_flow(R, C, rng), dflow = random_flow(R, C, rng);
    const FlowSpatialTerms terms = flow_spatial_terms(flow);
    const FrameFeatures ff = extract_frame_features(f, g, flow, dflow, 5.0, 7);
    EXPECT_EQ(ff.frame_index, 7u);
    ASSERT_FALSE(ff.vectors.empty());
    for (const auto& v : ff.vectors) {
        ASSERT_EQ(v.size(), 14u);
        const auto x = static_cast<std::size_t>(v[kX]) - 1, y = static_cast<std::size_t>(v[kY]) - 1;
        ASSERT_LT(x, C);
        ASSERT_LT(y, R);
        EXPECT_EQ(v[kAbsJx], std::abs(g.jx(y, x)));
        EXPECT_EQ(v[kAbsJy], std::abs(g.jy(y, x)));
        EXPECT_EQ(v[kAbsJyy], std::abs(g.jyy(y, x)));
        EXPECT_EQ(v[kAbsJxx], std::abs(g.jxx(y, x)));
        EXPECT_NEAR(v[kMagnitude], std::hypot(g.jx(y, x), g.jy(y, x)), 1e-12);
        EXPECT_GE(v[kOrientation], 0.0);
        EXPECT_LE(v[kOrientation], std::numbers::pi / 2.0);
        if (g.jx(y, x) == 0.0)
            EXPECT_EQ(v[kOrientation], std::numbers::pi / 2.0);
        else
            EXPECT_EQ(v[kOrientation], std::atan(std::abs(g.jy(y, x)) / std::abs(g.jx(y, x))));
        EXPECT_EQ(v[kFlowU], flow.u(y, x));
        EXPECT_EQ(v[kFlowV], flow.v(y, x));
        EXPECT_EQ(v[kFlowDuDt], dflow.u(y, x));
        EXPECT_EQ(v[kFlowDvDt], dflow.v(y, x));
        EXPECT_EQ(v[kDivergence], terms.divergence(y, x));
        EXPECT_EQ(v[kVorticity], terms.vorticity(y, x));
    }
}

TEST(Features, ExtractRejectsMismatchedInputs)
{
    const Frame f(8, 8, 0.1);
    const FlowField z = FlowField::zeros(8, 8);
    EXPECT_THROW(extract_frame_features(f, spatial_gradients(Frame(8, 9)), z, z, 40.0), ArgumentError);
    EXPECT_THROW(extract_frame_features(f, spatial_gradients(f), FlowField::zeros(9, 8), z, 40.0), ArgumentError);
}

TEST(Features, VideoFeaturesUseOddFramesOnly)
{
    std::mt19937_64 rng(12);
    FrameSequence seq;
    for (int t = 0; t < 7; ++t)
        seq.frames.push_back(random_raster(12, 12, rng));
    const auto per_frame = extract_video_features(seq, 10.0, 2);
    ASSERT_EQ(per_frame.size(), 7u);
    for (std::size_t t = 0; t < 7; ++t) {
        EXPECT_EQ(per_frame[t].frame_index, t + 1);
        if (t % 2 == 0)
            EXPECT_FALSE(per_frame[t].vectors.empty()) << "frame " << t + 1;
        else
            EXPECT_TRUE(per_frame[t].vectors.empty()) << "frame " << t + 1;
    }
}

TEST(Features, VideoFeaturesMatchPerFrameComposition)
{
    std::mt19937_64 rng(13);
    FrameSequence seq;
    for (int t = 0; t < 5; ++t)
        seq.frames.push_back(random_raster(10, 11, rng));
    const auto per_frame = extract_video_features(seq, 20.0, 2);

    // Frame 1 takes the flow of (1, 2) against a zero previous flow; every
    // later frame t takes (t-1, t) against the flow of frame t-1.
    const FlowField f12 = optical_flow(seq.frames[0], seq.frames[1]);
    const FlowField f23 = optical_flow(seq.frames[1], seq.frames[2]);
    const FlowField f34 = optical_flow(seq.frames[2], seq.frames[3]);
    const FlowField f45 = optical_flow(seq.frames[3], seq.frames[4]);
    const FlowField zero = FlowField::zeros(10, 11);

    auto expect_same = [](const FrameFeatures& a, const FrameFeatures& b) {
        ASSERT_EQ(a.vectors.size(), b.vectors.size());
        for (std::size_t i = 0; i < a.vectors.size(); ++i)
            EXPECT_EQ(a.vectors[i], b.vectors[i]);
    };
    expect_same(per_frame[0], extract_frame_features(seq.frames[0], spatial_gradients(seq.frames[0]), f12,
                                                     flow_temporal_derivative(zero, f12), 20.0, 1));
    expect_same(per_frame[2], extract_frame_features(seq.frames[2], spatial_gradients(seq.frames[2]), f23,
                                                     flow_temporal_derivative(f12, f23), 20.0, 3));
    expect_same(per_frame[4], extract_frame_features(seq.frames[4], spatial_gradients(seq.frames[4]), f45,
                                                     flow_temporal_derivative(f34, f45), 20.0, 5));
}

TEST(Features, SingleFrameVideoHasZeroFlow)
{
    std::mt19937_64 rng(14);
    FrameSequence seq;
    seq.frames.push_back(random_raster(9, 9, rng));
    const auto per_frame = extract_video_features(seq, 5.0, 2);
    ASSERT_EQ(per_frame.size(), 1u);
    for (const auto& v : per_frame[0].vectors) {
        EXPECT_EQ(v[kFlowU], 0.0);
        EXPECT_EQ(v[kFlowDvDt], 0.0);
    }
}
