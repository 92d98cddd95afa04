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

#include "actseg/synthgen.hpp"

#include "actseg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace actseg::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Wave {
    double kx, ky, phase, amp;
};

// Sum of plane waves; smooth so that small translations stay within the
// linear range of the flow solver.
struct Texture {
    std::vector<Wave> waves;

    double operator()(double x, double y) const
    {
        double s = 0.0;
        for (const auto& w : waves)
            s += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
        return s;
    }

    static Texture random(std::mt19937_64& rng, int n, double min_wavelength, double max_wavelength, double amp)
    {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        Texture t;
        for (int i = 0; i < n; ++i) {
            const double lambda = min_wavelength + (max_wavelength - min_wavelength) * u01(rng);
            const double theta = kTwoPi * u01(rng);
            const double k = kTwoPi / lambda;
            t.waves.push_back({k * std::cos(theta), k * std::sin(theta), kTwoPi * u01(rng), amp / n});
        }
        return t;
    }
};

// Per-clip randomness drawn once from the clip seed.
struct ClipParams {
    double jitter_x, jitter_y, phase;
    Texture background, blob;
};

ClipParams clip_params(std::uint64_t seed, std::size_t rows, std::size_t cols)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ClipParams p;
    p.jitter_x = 0.04 * static_cast<double>(cols) * u(rng);
    p.jitter_y = 0.04 * static_cast<double>(rows) * u(rng);
    p.phase = std::numbers::pi * u(rng);
    p.background = Texture::random(rng, 3, 12.0, 28.0, 0.08);
    p.blob = Texture::random(rng, 4, 6.0, 11.0, 0.9);
    return p;
}

double base_radius(std::size_t rows, std::size_t cols)
{
    return 0.14 * static_cast<double>(std::min(rows, cols));
}

std::pair<double, double> center_at(const ActionSpec& spec, const ClipParams& p, std::size_t rows, std::size_t cols,
                                    std::size_t t)
{
    const double R = static_cast<double>(rows), C = static_cast<double>(cols);
    const double ph = kTwoPi * static_cast<double>(t) / static_cast<double>(kPeriod) + p.phase;
    const double progress =
        spec.duration_frames > 1 ? static_cast<double>(t) / static_cast<double>(spec.duration_frames - 1) : 0.0;
    switch (spec.kind) {
    case ActionKind::oscillate_horizontal:
        return {0.5 * C + p.jitter_x + 0.08 * C * std::sin(ph), 0.4 * R + p.jitter_y};
    case ActionKind::oscillate_vertical:
        return {0.22 * C + p.jitter_x, 0.5 * R + p.jitter_y + 0.1 * R * std::sin(ph)};
    case ActionKind::expand_contract:
        return {0.76 * C + p.jitter_x, 0.62 * R + p.jitter_y};
    case ActionKind::drift_right:
        return {(0.2 + 0.6 * progress) * C, 0.18 * R + p.jitter_y};
    case ActionKind::drift_left:
        return {(0.8 - 0.6 * progress) * C, 0.78 * R + p.jitter_y};
    case ActionKind::flicker:
        return {0.45 * C + p.jitter_x, 0.7 * R + p.jitter_y};
    }
    return {0.5 * C, 0.5 * R};
}

} // namespace

std::string to_string(ActionKind k)
{
    switch (k) {
    case ActionKind::oscillate_horizontal: return "oscillate_horizontal";
    case ActionKind::oscillate_vertical: return "oscillate_vertical";
    case ActionKind::expand_contract: return "expand_contract";
    case ActionKind::drift_right: return "drift_right";
    case ActionKind::drift_left: return "drift_left";
    case ActionKind::flicker: return "flicker";
    }
    return "unknown";
}

ActionKind kind_from_string(const std::string& s)
{
    for (ActionKind k : kAllKinds)
        if (to_string(k) == s)
            return k;
    throw ArgumentError("unknown action kind '" + s + "'");
}

int family_of(ActionKind k) noexcept
{
    switch (k) {
    case ActionKind::oscillate_horizontal:
    case ActionKind::oscillate_vertical:
    case ActionKind::expand_contract:
        return 0;
    default:
        return 1;
    }
}

std::pair<double, double> blob_center(const ActionSpec& spec, std::size_t rows, std::size_t cols, std::size_t t,
                                      std::uint64_t seed)
{
    return center_at(spec, clip_params(seed, rows, cols), rows, cols, t);
}

FrameSequence generate_clip(const ActionSpec& spec, std::size_t rows, std::size_t cols, std::uint64_t seed)
{
    if (rows < 32 || cols < 32)
        throw ArgumentError("synthetic frames must be at least 32x32");
    if (spec.duration_frames < 8)
        throw ArgumentError("synthetic clips need at least 8 frames");
    if (!(spec.noise_sigma >= 0.0 && spec.noise_sigma <= 0.1))
        throw ArgumentError("noise sigma must lie in [0, 0.1]");

    const ClipParams p = clip_params(seed, rows, cols);
    std::mt19937_64 noise_rng(seed ^ 0x5851f42d4c957f2dULL);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);

    Raster bg(rows, cols);
    for (std::size_t y = 0; y < rows; ++y)
        for (std::size_t x = 0; x < cols; ++x)
            bg(y, x) = 0.25 + p.background(static_cast<double>(x), static_cast<double>(y));

    const double r0 = base_radius(rows, cols);
    FrameSequence seq;
    seq.frame_rate = kFrameRate;
    seq.frames.reserve(spec.duration_frames);
    for (std::size_t t = 0; t < spec.duration_frames; ++t) {
        const auto [cx, cy] = center_at(spec, p, rows, cols, t);
        const double ph = kTwoPi * static_cast<double>(t) / static_cast<double>(kPeriod) + p.phase;
        double radius = r0;
        if (spec.kind == ActionKind::expand_contract)
            radius = r0 * (1.0 + 0.35 * std::sin(ph));
        double contrast = 1.0;
        if (spec.kind == ActionKind::flicker)
            contrast = 0.55 + 0.45 * std::sin(kTwoPi * static_cast<double>(t) / 6.0 + p.phase);
        const double tex_scale = r0 / radius;

        Frame f(rows, cols);
        for (std::size_t y = 0; y < rows; ++y) {
            for (std::size_t x = 0; x < cols; ++x) {
                const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
                const double mask = std::clamp(radius + 0.5 - std::hypot(dx, dy), 0.0, 1.0);
                double v = bg(y, x);
                if (mask > 0.0) {
                    const double blob = 0.7 + 0.22 * p.blob(dx * tex_scale, dy * tex_scale);
                    v += mask * contrast * (blob - v);
                }
                if (spec.noise_sigma > 0.0)
                    v += noise(noise_rng);
                f(y, x) = std::clamp(v, 0.0, 1.0);
            }
        }
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

std::pair<FrameSequence, LabelTrack> stitch(const StitchSpec& spec, std::size_t rows, std::size_t cols)
{
    if (spec.segments.size() < 2)
        throw ArgumentError("a stitched sequence needs at least two segments");
    std::mt19937_64 rng(spec.seed);
    FrameSequence seq;
    seq.frame_rate = kFrameRate;
    LabelTrack track;
    for (const auto& seg : spec.segments) {
        const std::uint64_t clip_seed = rng();
        FrameSequence clip = generate_clip(seg, rows, cols, clip_seed);
        const std::string name = to_string(seg.kind);
        auto it = std::find(track.class_names.begin(), track.class_names.end(), name);
        if (it == track.class_names.end()) {
            track.class_names.push_back(name);
            it = track.class_names.end() - 1;
        }
        const int id = static_cast<int>(it - track.class_names.begin()) + 1;
        for (auto& f : clip.frames) {
            seq.frames.push_back(std::move(f));
            track.labels.push_back(id);
        }
    }
    return {std::move(seq), std::move(track)};
}

StitchSpec random_stitch_spec(std::uint64_t seed, const StitchPlanOptions& opt)
{
    if (opt.segments < 2 || opt.min_frames < 8 || opt.max_frames < opt.min_frames)
        throw ArgumentError("invalid stitch plan options");
    std::mt19937_64 rng(seed);
    auto draw = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

    std::array<std::vector<ActionKind>, 2> bags;
    auto refill = [&](int fam) {
        bags[fam].clear();
        for (ActionKind k : kAllKinds)
            if (family_of(k) == fam)
                bags[fam].push_back(k);
        for (std::size_t i = 0; i + 1 < bags[fam].size(); ++i)
            std::swap(bags[fam][i], bags[fam][i + draw(bags[fam].size() - i)]);
    };
    refill(0);
    refill(1);

    StitchSpec spec;
    spec.seed = rng();
    int fam = static_cast<int>(draw(2));
    for (std::size_t s = 0; s < opt.segments; ++s) {
        if (bags[fam].empty())
            refill(fam);
        const ActionKind k = bags[fam].back();
        bags[fam].pop_back();
        const std::size_t dur = opt.min_frames + draw(opt.max_frames - opt.min_frames + 1);
        spec.segments.push_back({k, dur, opt.noise_sigma});
        fam = 1 - fam;
    }
    return spec;
}

} // namespace actseg::synth
