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
#include "actseg/segment.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace actseg;

namespace {

std::vector<std::optional<ProbVector>> random_q(std::size_t S, std::size_t A, std::mt19937_64& rng,
                                                double empty_rate = 0.0)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::optional<ProbVector>> q(S);
    for (auto& v : q) {
        if (u(rng) < empty_rate)
            continue;
        ProbVector p(A);
        double s = 0.0;
        for (auto& x : p) {
            x = u(rng);
            s += x;
        }
        for (auto& x : p)
            x /= s;
        v = std::move(p);
    }
    return q;
}

// Indicator-sum over every (t, s) pair, then argmax with a strict comparison.
void brute_force(const std::vector<std::optional<ProbVector>>& q, const WindowPlan& plan, std::size_t T,
                 std::size_t A, std::vector<std::vector<double>>& Q, std::vector<int>& labels)
{
    Q.assign(T, std::vector<double>(A, 0.0));
    for (std::size_t t = 1; t <= T; ++t)
        for (std::size_t s = 0; s < plan.size(); ++s)
            if (q[s] && t >= plan.windows[s].t_start && t < plan.windows[s].t_start + plan.windows[s].length)
                for (std::size_t l = 0; l < A; ++l)
                    Q[t - 1][l] += (*q[s])[l];
    labels.assign(T, 0);
    for (std::size_t t = 0; t < T; ++t) {
        std::size_t best = 0;
        for (std::size_t l = 1; l < A; ++l)
            if (Q[t][l] > Q[t][best])
                best = l;
        labels[t] = static_cast<int>(best) + 1;
    }
}

Codebook line_codebook(std::vector<double> centers)
{
    Codebook cb;
    cb.K = centers.size();
    cb.dim = kFeatureDim;
    for (double c : centers)
        for (std::size_t d = 0; d < kFeatureDim; ++d)
            cb.centers.push_back(d == 0 ? c : 0.0);
    cb.standardizer = Standardizer::identity(kFeatureDim);
    return cb;
}

FeatureVector at_x(double x)
{
    FeatureVector f{};
    f[0] = x;
    return f;
}

} // namespace

TEST(Segment, PlanBasic)
{
    const WindowPlan p = plan_windows_frames(5, 3);
    ASSERT_EQ(p.size(), 3u);
    EXPECT_EQ(p.windows[0], (TemporalWindow{1, 3}));
    EXPECT_EQ(p.windows[1], (TemporalWindow{2, 3}));
    EXPECT_EQ(p.windows[2], (TemporalWindow{3, 3}));
    EXPECT_EQ(coverage_counts(p, 5), (std::vector<std::size_t>{1, 2, 3, 2, 1}));
}

TEST(Segment, PlanClampsToVideo)
{
    const WindowPlan p = plan_windows_frames(2, 10);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.windows[0], (TemporalWindow{1, 2}));
    EXPECT_EQ(p.L_frames, 2u);
}

TEST(Segment, PlanInSeconds)
{
    const WindowPlan p = plan_windows(100, 25.0, 1.0);
    EXPECT_EQ(p.L_frames, 25u);
    EXPECT_EQ(p.size(), 76u);
    EXPECT_EQ(plan_windows(100, 25.0, 0.5).L_frames, 13u); // 12.5 rounds away from zero
    EXPECT_EQ(plan_windows(100, 25.0, 0.01).L_frames, 1u);
    EXPECT_THROW(plan_windows(0, 25.0, 1.0), ArgumentError);
    EXPECT_THROW(plan_windows(10, 25.0, 0.0), ArgumentError);
    EXPECT_THROW(plan_windows(10, -1.0, 1.0), ArgumentError);
}

TEST(Segment, PlanProperties)
{
    for (std::size_t T = 1; T <= 40; ++T)
        for (std::size_t L = 1; L <= 45; L += 4) {
            const WindowPlan p = plan_windows_frames(T, L);
            EXPECT_EQ(p.size(), std::max<std::size_t>(1, T - std::min(L, T) + 1));
            for (std::size_t s = 0; s < p.size(); ++s) {
                EXPECT_EQ(p.windows[s].length, p.L_frames);
                EXPECT_LE(p.windows[s].t_end(), T);
                if (s > 0) {
                    EXPECT_EQ(p.windows[s].t_start, p.windows[s - 1].t_start + 1);
                }
            }
            for (std::size_t c : coverage_counts(p, T))
                EXPECT_GE(c, 1u);
        }
}

TEST(Segment, SampledFrames)
{
    EXPECT_TRUE(is_sampled_frame(1, 2));
    EXPECT_FALSE(is_sampled_frame(2, 2));
    EXPECT_TRUE(is_sampled_frame(3, 2));
    EXPECT_TRUE(is_sampled_frame(4, 3));
    EXPECT_TRUE(is_sampled_frame(2, 1));
}

TEST(Segment, WindowPoolsSampledFrames)
{
    // Frames 1, 3, 5 carry 5, 0 and 7 vectors; even frames carry decoys that
    // must be ignored.
    std::vector<FrameFeatures> per_frame(5);
    for (std::size_t t = 0; t < 5; ++t)
        per_frame[t].frame_index = t + 1;
    per_frame[0].vectors.assign(5, at_x(0.0));
    per_frame[4].vectors.assign(7, at_x(10.0));
    per_frame[1].vectors.assign(100, at_x(0.0));
    per_frame[3].vectors.assign(100, at_x(0.0));
    const Encoder enc = Encoder::bow(line_codebook({0.0, 10.0}));
    const auto h = encode_window({1, 5}, per_frame, enc, 2);
    ASSERT_TRUE(h);
    EXPECT_DOUBLE_EQ((*h)[0], 5.0 / 12.0);
    EXPECT_DOUBLE_EQ((*h)[1], 7.0 / 12.0);
}

TEST(Segment, EmptyWindowGivesMarker)
{
    std::vector<FrameFeatures> per_frame(4);
    per_frame[1].vectors.assign(3, at_x(1.0)); // unsampled frame only
    const Encoder enc = Encoder::bow(line_codebook({0.0}));
    EXPECT_FALSE(encode_window({1, 4}, per_frame, enc, 2).has_value());
    const auto all = encode_windows(plan_windows_frames(4, 2), frame_stats(per_frame, enc, 2), enc, 2);
    for (const auto& w : all)
        EXPECT_FALSE(w.has_value());
}

TEST(Segment, WindowEncodingEqualsConcatenation)
{
    std::mt19937_64 rng(3);
    const GmmVocabulary base = testutil::random_gmm(4, kFeatureDim, rng, 1.0);
    Standardizer s;
    for (std::size_t d = 0; d < kFeatureDim; ++d) {
        s.mean.push_back(0.1 * static_cast<double>(d));
        s.std.push_back(0.5 + 0.05 * static_cast<double>(d));
    }
    const GmmVocabulary gmm(base.weights(), base.means(), base.vars(), s);
    Codebook cb = line_codebook({0.0, 0.5, 1.0});
    cb.standardizer = s;

    std::normal_distribution<double> g(0.5, 1.0);
    std::uniform_int_distribution<int> count(0, 6);
    const std::size_t T = 30;
    std::vector<FrameFeatures> per_frame(T);
    for (std::size_t t = 0; t < T; ++t) {
        per_frame[t].frame_index = t + 1;
        per_frame[t].vectors.resize(static_cast<std::size_t>(count(rng)));
        for (auto& f : per_frame[t].vectors)
            for (double& v : f)
                v = g(rng);
    }
    const WindowPlan plan = plan_windows_frames(T, 7);
    for (const Encoder& enc : {Encoder::fisher(gmm, true), Encoder::fisher(gmm, false), Encoder::bow(cb)}) {
        const auto fast = encode_windows(plan, frame_stats(per_frame, enc, 2), enc, 2);
        for (std::size_t si = 0; si < plan.size(); ++si) {
            const auto& w = plan.windows[si];
            std::vector<FeatureVector> pooled;
            for (std::size_t t = w.t_start; t <= w.t_end(); t += 1)
                if ((t - 1) % 2 == 0)
                    pooled.insert(pooled.end(), per_frame[t - 1].vectors.begin(), per_frame[t - 1].vectors.end());
            const auto direct = encode_window(w, per_frame, enc, 2);
            ASSERT_EQ(direct.has_value(), !pooled.empty());
            ASSERT_EQ(fast[si].has_value(), !pooled.empty());
            if (pooled.empty())
                continue;
            const auto want = enc.encode(pooled);
            for (std::size_t i = 0; i < want.size(); ++i) {
                EXPECT_EQ((*direct)[i], want[i]);
                EXPECT_NEAR((*fast[si])[i], want[i], 1e-12);
            }
        }
    }
}

TEST(Segment, IntegrateConstant)
{
    const WindowPlan plan = plan_windows_frames(9, 4);
    const ProbVector p{0.2, 0.5, 0.3};
    const ProbTrack tr = integrate(std::vector<std::optional<ProbVector>>(plan.size(), p), plan, 9, 3);
    for (int l : tr.labels)
        EXPECT_EQ(l, 2);
    for (double m : tr.max_prob)
        EXPECT_NEAR(m, 0.5, 1e-15);
}

TEST(Segment, IntegrateHandCase)
{
    const WindowPlan plan = plan_windows_frames(5, 3);
    const ProbTrack tr = integrate({ProbVector{1, 0}, ProbVector{0, 1}, ProbVector{0, 1}}, plan, 5, 2);
    EXPECT_EQ(tr.Q[2], (std::vector<double>{1, 2}));
    EXPECT_EQ(tr.Q[0], (std::vector<double>{1, 0}));
    EXPECT_EQ(tr.labels[2], 2);
    EXPECT_EQ(tr.labels[0], 1);
    EXPECT_EQ(tr.labels, (std::vector<int>{1, 1, 2, 2, 2})); // frame 2 ties, lowest class wins
}

TEST(Segment, IntegrateMatchesBruteForce)
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> tdist(1, 200), adist(1, 6);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t T = tdist(rng), A = adist(rng);
        const std::size_t L = std::uniform_int_distribution<std::size_t>(1, T + 5)(rng);
        const WindowPlan plan = plan_windows_frames(T, L);
        const auto q = random_q(plan.size(), A, rng);
        const ProbTrack tr = integrate(q, plan, T, A);
        std::vector<std::vector<double>> Q;
        std::vector<int> labels;
        brute_force(q, plan, T, A, Q, labels);
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t l = 0; l < A; ++l)
                EXPECT_NEAR(tr.Q[t][l], Q[t][l], 1e-12);
        EXPECT_EQ(tr.labels, labels) << "trial " << trial;
    }
}

TEST(Segment, IntegrateIgnoresComputeOrder)
{
    // Q depends on the canonical window order only, so building q in any
    // order and placing it by index gives identical output.
    std::mt19937_64 rng(6);
    const std::size_t T = 120, A = 4;
    const WindowPlan plan = plan_windows_frames(T, 17);
    const auto q = random_q(plan.size(), A, rng, 0.1);
    std::vector<std::size_t> order(plan.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::optional<ProbVector>> rebuilt(plan.size());
    for (std::size_t s : order)
        rebuilt[s] = q[s];
    const ProbTrack a = integrate(q, plan, T, A), b = integrate(rebuilt, plan, T, A);
    EXPECT_EQ(a.Q, b.Q);
    EXPECT_EQ(a.labels, b.labels);
}

TEST(Segment, IntegrateScaleInvariance)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t T = 60, A = 5;
        const WindowPlan plan = plan_windows_frames(T, 9);
        auto q = random_q(plan.size(), A, rng);
        const ProbTrack a = integrate(q, plan, T, A);
        for (auto& v : q)
            for (auto& x : *v)
                x *= 4.0; // exact in binary
        const ProbTrack b = integrate(q, plan, T, A);
        EXPECT_EQ(a.labels, b.labels);
        for (int l : b.labels) {
            EXPECT_GE(l, 1);
            EXPECT_LE(l, 5);
        }
    }
}

TEST(Segment, UncoveredFramesTakeNearestLabel)
{
    const WindowPlan plan = plan_windows_frames(7, 1);
    std::vector<std::optional<ProbVector>> q(7);
    q[1] = ProbVector{0.9, 0.1};
    q[5] = ProbVector{0.2, 0.8};
    const ProbTrack tr = integrate(q, plan, 7, 2);
    // Frame 4 is equidistant from frames 2 and 6; the earlier one wins.
    EXPECT_EQ(tr.labels, (std::vector<int>{1, 1, 1, 1, 2, 2, 2}));
    EXPECT_EQ(tr.max_prob[0], 0.0);

    const ProbTrack none = integrate(std::vector<std::optional<ProbVector>>(7), plan, 7, 2);
    EXPECT_EQ(none.labels, std::vector<int>(7, 1));
}

TEST(Segment, IntegrateErrors)
{
    const WindowPlan plan = plan_windows_frames(5, 3);
    EXPECT_THROW(integrate({ProbVector{1, 0}}, plan, 5, 2), ArgumentError);
    EXPECT_THROW(integrate({ProbVector{1, 0}, ProbVector{1, 0}, ProbVector{1}}, plan, 5, 2), ArgumentError);
}

TEST(Segment, EvaluatePerfect)
{
    const LabelTrack t{{1, 2, 2, 3, 1}, {"a", "b", "c"}};
    const EvalReport r = evaluate(t, t);
    EXPECT_EQ(r.frame_accuracy, 1.0);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_EQ(r.confusion[i][j], i == j ? 1.0 : 0.0);
}

TEST(Segment, EvaluateHalfFlipped)
{
    const LabelTrack truth{{1, 1, 2, 2}, {"a", "b"}};
    const LabelTrack pred{{1, 2, 2, 1}, {"a", "b"}};
    const EvalReport r = evaluate(pred, truth);
    EXPECT_EQ(r.frame_accuracy, 0.5);
    EXPECT_EQ(r.confusion[0], (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(r.per_class_accuracy, (std::vector<double>{0.5, 0.5}));
}

TEST(Segment, EvaluateAlignsByName)
{
    const LabelTrack truth{{1, 2, 1}, {"a", "b"}};
    const LabelTrack pred{{2, 1, 2}, {"b", "a"}};
    EXPECT_EQ(evaluate(pred, truth).frame_accuracy, 1.0);
    const LabelTrack other{{1, 1, 1}, {"z"}};
    const EvalReport r = evaluate(other, truth);
    EXPECT_EQ(r.frame_accuracy, 0.0);
    EXPECT_EQ(r.class_names.size(), 3u);
    EXPECT_EQ(r.confusion[2], (std::vector<double>{0, 0, 0})); // absent class row
}

TEST(Segment, EvaluateMatchesCountingOracle)
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t T = 1 + trial * 7, A = 1 + trial % 6;
        std::uniform_int_distribution<int> lab(1, static_cast<int>(A));
        LabelTrack truth, pred;
        for (std::size_t a = 1; a <= A; ++a)
            truth.class_names.push_back("c" + std::to_string(a));
        pred.class_names = truth.class_names;
        for (std::size_t t = 0; t < T; ++t) {
            truth.labels.push_back(lab(rng));
            pred.labels.push_back(lab(rng));
        }
        const EvalReport r = evaluate(pred, truth);
        std::size_t hit = 0;
        std::vector<std::vector<std::size_t>> cm(A, std::vector<std::size_t>(A, 0));
        for (std::size_t t = 0; t < T; ++t) {
            hit += truth.labels[t] == pred.labels[t];
            ++cm[truth.labels[t] - 1][pred.labels[t] - 1];
        }
        EXPECT_EQ(r.frame_accuracy, static_cast<double>(hit) / static_cast<double>(T));
        for (std::size_t i = 0; i < A; ++i) {
            std::size_t row = 0;
            for (auto c : cm[i])
                row += c;
            double rs = 0.0;
            for (std::size_t j = 0; j < A; ++j) {
                const double want = row ? static_cast<double>(cm[i][j]) / static_cast<double>(row) : 0.0;
                EXPECT_EQ(r.confusion[i][j], want);
                rs += r.confusion[i][j];
            }
            if (row) {
                EXPECT_NEAR(rs, 1.0, 1e-9);
            }
        }
    }
}

TEST(Segment, EvaluateLengthMismatch)
{
    EXPECT_THROW(evaluate(LabelTrack{{1, 1}, {"a"}}, LabelTrack{{1}, {"a"}}), LengthMismatchError);
}

TEST(Segment, SegmentationCsv)
{
    testutil::TempDir dir("csv");
    ProbTrack tr;
    tr.labels = {1, 2};
    tr.max_prob = {0.75, 0.5};
    write_segmentation_csv(dir / "s.csv", tr, {"walk", "run"});
    std::ifstream in(dir / "s.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "frame,label,maxprob\n1,walk,0.750000\n2,run,0.500000\n");
    EXPECT_EQ(load_labels(dir / "s.csv").labels, (std::vector<int>{1, 2}));
}
