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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace actseg {

/// Dense row-major raster of doubles. Pixel (x, y) lives at data[y * cols + x].
class Raster {
public:
    Raster() = default;
    Raster(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Raster(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool same_shape(const Raster& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    double& operator()(std::size_t y, std::size_t x) noexcept { return data_[y * cols_ + x]; }
    double operator()(std::size_t y, std::size_t x) const noexcept { return data_[y * cols_ + x]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// A grayscale frame: a raster whose intensities lie in [0, 1].
using Frame = Raster;

struct FrameSequence {
    std::vector<Frame> frames;
    double frame_rate = 25.0;

    std::size_t length() const noexcept { return frames.size(); }
    std::size_t rows() const noexcept { return frames.empty() ? 0 : frames.front().rows(); }
    std::size_t cols() const noexcept { return frames.empty() ? 0 : frames.front().cols(); }
};

/// Frame-level labels. Ids are 1-based indices into class_names.
struct LabelTrack {
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::size_t length() const noexcept { return labels.size(); }
    std::size_t num_classes() const noexcept { return class_names.size(); }
    const std::string& name_of(int id) const { return class_names.at(static_cast<std::size_t>(id - 1)); }

    friend bool operator==(const LabelTrack&, const LabelTrack&) = default;
};

/// Reads a binary (P5) PGM with maxval <= 255, scaled to [0, 1].
Frame read_pgm(const std::filesystem::path& path);
/// Writes a frame as 8-bit P5, rounding to the nearest level.
void write_pgm(const Frame& frame, const std::filesystem::path& path);

/// Loads `frame_%06d.pgm` files numbered consecutively from 000001.
FrameSequence load_sequence(const std::filesystem::path& dir, double frame_rate);
void write_sequence(const FrameSequence& seq, const std::filesystem::path& dir);

/// Bilinear resampling with pixel-center alignment and clamped borders.
Frame rescale(const Frame& frame, std::size_t new_rows, std::size_t new_cols);

/// Reads a `frame,label` CSV. Extra trailing columns are ignored. When
/// expected_length is given the row count must match it.
LabelTrack load_labels(const std::filesystem::path& csv_path,
                       std::optional<std::size_t> expected_length = std::nullopt);
void write_labels(const LabelTrack& track, const std::filesystem::path& csv_path);

/// Rewrites `track` so its ids index into `names`; unknown names are appended.
LabelTrack remap_labels(const LabelTrack& track, std::vector<std::string>& names);

} // namespace actseg
