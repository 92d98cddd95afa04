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

#include "actseg/segment.hpp"

#include "actseg/error.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

using json = nlohmann::ordered_json;

namespace actseg {

WindowPlan plan_windows_frames(std::size_t T, std::size_t L_frames)
{
    if (T == 0 || L_frames == 0)
        throw ArgumentError("plan_windows: T and L must be positive");
    WindowPlan plan;
    plan.L_frames = std::min(L_frames, T);
    const std::size_t S = T - plan.L_frames + 1;
    plan.windows.reserve(S);
    for (std::size_t s = 0; s < S; ++s)
        plan.windows.push_back({s + 1, plan.L_frames});
    return plan;
}

WindowPlan plan_windows(std::size_t T, double frame_rate, double L_seconds)
{
    if (!(frame_rate > 0.0) || !(L_seconds > 0.0))
        throw ArgumentError("plan_windows: frame rate and window length must be positive");
    const double rounded = std::round(L_seconds * frame_rate);
    const auto L = static_cast<std::size_t>(std::max(rounded, 1.0));
    WindowPlan plan = plan_windows_frames(T, L);
    plan.L_seconds = L_seconds;
    return plan;
}

std::vector<std::size_t> coverage_counts(const WindowPlan& plan, std::size_t T)
{
    std::vector<std::size_t> c(T, 0);
    for (const auto& w : plan.windows)
        for (std::size_t t = w.t_start; t <= w.t_end() && t <= T; ++t)
            ++c[t - 1];
    return c;
}

std::optional<std::vector<double>> encode_window(const TemporalWindow& window,
                                                 const std::vector<FrameFeatures>& per_frame,
                                                 const Encoder& encoder, std::size_t stride)
{
    if (stride == 0)
        throw ArgumentError("stride must be positive");
    std::vector<FeatureVector> pooled;
    for (std::size_t t = window.t_start; t <= window.t_end() && t <= per_frame.size(); ++t) {
        if (!is_sampled_frame(t, stride))
            continue;
        const auto& v = per_frame[t - 1].vectors;
        pooled.insert(pooled.end(), v.begin(), v.end());
    }
    if (pooled.empty())
        return std::nullopt;
    return encoder.encode(pooled);
}

std::vector<EncodingStats> frame_stats(const std::vector<FrameFeatures>& per_frame, const Encoder& encoder,
                                       std::size_t stride)
{
    if (stride == 0)
        throw ArgumentError("stride must be positive");
    std::vector<EncodingStats> out(per_frame.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long ti = 0; ti < static_cast<long>(per_frame.size()); ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        out[t] = is_sampled_frame(t + 1, stride) ? encoder.stats(per_frame[t].vectors) : encoder.empty_stats();
    }
    return out;
}

std::vector<std::optional<std::vector<double>>> encode_windows(const WindowPlan& plan,
                                                               const std::vector<EncodingStats>& per_frame_stats,
                                                               const Encoder& encoder, std::size_t stride)
{
    if (stride == 0)
        throw ArgumentError("stride must be positive");
    std::vector<std::optional<std::vector<double>>> out(plan.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (long si = 0; si < static_cast<long>(plan.size()); ++si) {
        const auto& w = plan.windows[static_cast<std::size_t>(si)];
        EncodingStats acc = encoder.empty_stats();
        for (std::size_t t = w.t_start; t <= w.t_end() && t <= per_frame_stats.size(); ++t)
            if (is_sampled_frame(t, stride))
                acc.add(per_frame_stats[t - 1]);
        if (acc.count > 0)
            out[static_cast<std::size_t>(si)] = encoder.finalize(acc);
    }
    return out;
}

ProbTrack integrate(const std::vector<std::optional<ProbVector>>& q, const WindowPlan& plan, std::size_t T,
                    std::size_t A)
{
    if (q.size() != plan.size())
        throw ArgumentError("integrate: " + std::to_string(q.size()) + " probability vectors for " +
                            std::to_string(plan.size()) + " windows");
    if (A == 0 || T == 0)
        throw ArgumentError("integrate: T and A must be positive");

    ProbTrack out;
    out.q = q;
    out.Q.assign(T, std::vector<double>(A, 0.0));
    std::vector<std::vector<double>> comp(T, std::vector<double>(A, 0.0));
    std::vector<char> covered(T, 0);

    // Neumaier summation in window order.
    for (std::size_t s = 0; s < plan.size(); ++s) {
        if (!q[s])
            continue;
        if (q[s]->size() != A)
            throw ArgumentError("integrate: probability vector length differs from A");
        const auto& w = plan.windows[s];
        for (std::size_t t = w.t_start; t <= w.t_end() && t <= T; ++t) {
            covered[t - 1] = 1;
            auto& acc = out.Q[t - 1];
            auto& c = comp[t - 1];
            for (std::size_t l = 0; l < A; ++l) {
                const double x = (*q[s])[l];
                const double sum = acc[l] + x;
                if (std::abs(acc[l]) >= std::abs(x))
                    c[l] += (acc[l] - sum) + x;
                else
                    c[l] += (x - sum) + acc[l];
                acc[l] = sum;
            }
        }
    }
    for (std::size_t t = 0; t < T; ++t)
        for (std::size_t l = 0; l < A; ++l)
            out.Q[t][l] += comp[t][l];

    out.labels.assign(T, 0);
    out.max_prob.assign(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        if (!covered[t])
            continue;
        const auto& Qt = out.Q[t];
        const auto best = static_cast<std::size_t>(std::max_element(Qt.begin(), Qt.end()) - Qt.begin());
        out.labels[t] = static_cast<int>(best) + 1;
        double sum = 0.0;
        for (double v : Qt)
            sum += v;
        out.max_prob[t] = sum > 0.0 ? Qt[best] / sum : 0.0;
    }

    if (std::none_of(covered.begin(), covered.end(), [](char c) { return c != 0; })) {
        std::fill(out.labels.begin(), out.labels.end(), 1);
        return out;
    }
    // Nearest labeled frame for uncovered ones; the earlier side wins ties.
    for (std::size_t t = 0; t < T; ++t) {
        if (covered[t])
            continue;
        std::size_t best = T;
        for (std::size_t d = 1; d < T && best == T; ++d) {
            if (t >= d && covered[t - d])
                best = t - d;
            else if (t + d < T && covered[t + d])
                best = t + d;
        }
        out.labels[t] = out.labels[best];
    }
    return out;
}

EvalReport evaluate(const LabelTrack& pred, const LabelTrack& truth)
{
    if (pred.length() != truth.length())
        throw LengthMismatchError("evaluate: prediction has " + std::to_string(pred.length()) + " frames, truth has " +
                                  std::to_string(truth.length()));
    if (truth.length() == 0)
        throw ArgumentError("evaluate: empty tracks");

    EvalReport r;
    r.class_names = truth.class_names;
    const LabelTrack p = remap_labels(pred, r.class_names);
    const std::size_t A = r.class_names.size();
    const std::size_t T = truth.length();

    std::vector<std::vector<double>> counts(A, std::vector<double>(A, 0.0));
    std::size_t matched = 0;
    for (std::size_t t = 0; t < T; ++t) {
        const int a = truth.labels[t], b = p.labels[t];
        if (a < 1 || static_cast<std::size_t>(a) > truth.class_names.size())
            throw ArgumentError("evaluate: truth label out of range");
        counts[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] += 1.0;
        matched += a == b;
    }
    r.frame_accuracy = static_cast<double>(matched) / static_cast<double>(T);
    r.confusion = counts;
    r.per_class_accuracy.assign(A, 0.0);
    for (std::size_t i = 0; i < A; ++i) {
        double row = 0.0;
        for (double v : counts[i])
            row += v;
        if (row > 0.0)
            for (auto& v : r.confusion[i])
                v /= row;
        r.per_class_accuracy[i] = r.confusion[i][i];
    }
    return r;
}

std::string to_json(const EvalReport& r)
{
    json j;
    j["frame_accuracy"] = r.frame_accuracy;
    j["per_class_accuracy"] = r.per_class_accuracy;
    j["confusion"] = r.confusion;
    j["class_names"] = r.class_names;
    return j.dump(1);
}

void write_segmentation_csv(const std::filesystem::path& path, const ProbTrack& track,
                            const std::vector<std::string>& class_names)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "frame,label,maxprob\n";
    char buf[32];
    for (std::size_t t = 0; t < track.labels.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%.6f", track.max_prob[t]);
        out << (t + 1) << ',' << class_names.at(static_cast<std::size_t>(track.labels[t] - 1)) << ',' << buf << '\n';
    }
    if (!out)
        throw IoError("write failed: " + path.string());
}

} // namespace actseg
