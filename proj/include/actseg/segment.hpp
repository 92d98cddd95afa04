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

#include "actseg/classify.hpp"
#include "actseg/encode.hpp"
#include "actseg/features.hpp"
#include "actseg/video_io.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace actseg {

/// Frames t_start .. t_start + length - 1 (1-based, inclusive).
struct TemporalWindow {
    std::size_t t_start = 1;
    std::size_t length = 1;

    std::size_t t_end() const noexcept { return t_start + length - 1; }
    bool contains(std::size_t t) const noexcept { return t >= t_start && t <= t_end(); }

    friend bool operator==(const TemporalWindow&, const TemporalWindow&) = default;
};

struct WindowPlan {
    std::vector<TemporalWindow> windows;
    double L_seconds = 0.0;
    std::size_t L_frames = 0;

    std::size_t size() const noexcept { return windows.size(); }
};

/// Windows of round(L_seconds * frame_rate) frames, clamped to [1, T], starting
/// one frame apart.
WindowPlan plan_windows(std::size_t T, double frame_rate, double L_seconds);
WindowPlan plan_windows_frames(std::size_t T, std::size_t L_frames);

/// How many windows contain each frame.
std::vector<std::size_t> coverage_counts(const WindowPlan& plan, std::size_t T);

/// True when frame t (1-based) contributes features under sampling `stride`.
inline bool is_sampled_frame(std::size_t t, std::size_t stride) noexcept { return (t - 1) % stride == 0; }

/// Pools the features of the sampled frames inside the window and encodes
/// them. Returns nullopt (the empty marker) when no features were pooled.
std::optional<std::vector<double>> encode_window(const TemporalWindow& window,
                                                 const std::vector<FrameFeatures>& per_frame,
                                                 const Encoder& encoder, std::size_t stride = 2);

/// Same result for every window of a plan, computed from per-frame statistics.
std::vector<std::optional<std::vector<double>>> encode_windows(const WindowPlan& plan,
                                                               const std::vector<EncodingStats>& per_frame_stats,
                                                               const Encoder& encoder, std::size_t stride = 2);

/// Encoder statistics of every sampled frame of a video (empty for the rest).
std::vector<EncodingStats> frame_stats(const std::vector<FrameFeatures>& per_frame, const Encoder& encoder,
                                       std::size_t stride = 2);

struct ProbTrack {
    std::vector<std::optional<ProbVector>> q; ///< per window; nullopt for empty windows
    std::vector<std::vector<double>> Q;       ///< per frame accumulated probabilities
    std::vector<int> labels;                  ///< per frame, 1-based
    std::vector<double> max_prob;             ///< max_l Q_t[l] / sum_l Q_t[l]; 0 if uncovered
};

/// Sums window probabilities into the frames they cover (compensated, in
/// window order) and labels each frame by argmax with ties to the lowest class.
/// Frames covered only by empty windows take the nearest labeled frame's
/// label, preferring the earlier one.
ProbTrack integrate(const std::vector<std::optional<ProbVector>>& q, const WindowPlan& plan, std::size_t T,
                    std::size_t A);

struct EvalReport {
    double frame_accuracy = 0.0;
    std::vector<std::vector<double>> confusion; ///< row-normalized, [true][pred]
    std::vector<double> per_class_accuracy;
    std::vector<std::string> class_names;
};

/// Compares tracks by class name; pred classes unknown to truth are appended.
EvalReport evaluate(const LabelTrack& pred, const LabelTrack& truth);

std::string to_json(const EvalReport& r);

/// Writes `frame,label,maxprob` rows.
void write_segmentation_csv(const std::filesystem::path& path, const ProbTrack& track,
                            const std::vector<std::string>& class_names);

} // namespace actseg
