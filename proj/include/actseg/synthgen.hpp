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

#include "actseg/video_io.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace actseg::synth {

/// Six motion patterns in two families: periodic in-place motion
/// (first three) and the rest (two translations and a brightness flicker).
enum class ActionKind {
    oscillate_horizontal,
    oscillate_vertical,
    expand_contract,
    drift_right,
    drift_left,
    flicker,
};

inline constexpr std::array<ActionKind, 6> kAllKinds = {
    ActionKind::oscillate_horizontal, ActionKind::oscillate_vertical, ActionKind::expand_contract,
    ActionKind::drift_right,          ActionKind::drift_left,         ActionKind::flicker,
};

std::string to_string(ActionKind k);
ActionKind kind_from_string(const std::string& s);
/// 0 for the periodic in-place family, 1 for the other.
int family_of(ActionKind k) noexcept;

struct ActionSpec {
    ActionKind kind = ActionKind::oscillate_horizontal;
    std::size_t duration_frames = 50;
    double noise_sigma = 0.01;
};

struct StitchSpec {
    std::vector<ActionSpec> segments;
    std::uint64_t seed = 0;
};

inline constexpr double kFrameRate = 25.0;
/// Oscillation period of the periodic kinds, in frames.
inline constexpr std::size_t kPeriod = 20;

/// A textured blob moving over a faint static texture, plus clipped noise.
FrameSequence generate_clip(const ActionSpec& spec, std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Concatenates one clip per segment. Class names are the kind names in
/// order of first appearance.
std::pair<FrameSequence, LabelTrack> stitch(const StitchSpec& spec, std::size_t rows, std::size_t cols);

/// Blob center (x, y) in pixels at frame t of a clip; exposed for tests.
std::pair<double, double> blob_center(const ActionSpec& spec, std::size_t rows, std::size_t cols, std::size_t t,
                                      std::uint64_t seed);

struct StitchPlanOptions {
    std::size_t segments = 6;
    std::size_t min_frames = 50;
    std::size_t max_frames = 90;
    double noise_sigma = 0.01;
};

/// Random stitch plan that alternates between the two families. With six
/// segments every kind appears exactly once.
StitchSpec random_stitch_spec(std::uint64_t seed, const StitchPlanOptions& opt = {});

} // namespace actseg::synth
