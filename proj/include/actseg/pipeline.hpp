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

// End-to-end training and segmentation built from the library modules.

#pragma once

#include "actseg/classify.hpp"
#include "actseg/encode.hpp"
#include "actseg/features.hpp"
#include "actseg/segment.hpp"
#include "actseg/synthgen.hpp"
#include "actseg/video_io.hpp"
#include "actseg/vocab.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace actseg {

struct PipelineConfig {
    double tau = 40.0;
    std::size_t K = 64;
    double L_seconds = 1.0;
    std::size_t frame_sample_stride = 2;
    EncoderKind encoder = EncoderKind::fisher;
    bool fv_norm = true;
    double svm_C = 1.0;
    std::uint64_t seed = 42;
    std::optional<std::pair<std::size_t, std::size_t>> rescale; ///< (rows, cols)
    std::size_t pool_cap = 100000;                               ///< vectors sampled per action
    double frame_rate = 25.0;                                    ///< used when a video carries none

    void validate() const;
};

/// Parses "RxC", e.g. "96x128".
std::pair<std::size_t, std::size_t> parse_rescale(const std::string& s);

/// Overlays the keys present in a JSON config document onto `cfg`.
void apply_config_json(PipelineConfig& cfg, const std::string& text);

struct ManifestEntry {
    std::filesystem::path frames; ///< directory of frame_%06d.pgm
    std::filesystem::path labels; ///< frame,label CSV
};

struct Manifest {
    std::vector<ManifestEntry> train;
    std::vector<ManifestEntry> test;
    std::vector<std::string> class_names;
    double frame_rate = 25.0;
};

/// Relative paths inside the manifest are resolved against its directory.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& m, const std::filesystem::path& path);

struct SynthDatasetOptions {
    std::size_t n_train = 8;
    std::size_t n_test = 4;
    std::uint64_t seed = 42;
    std::size_t rows = 60;
    std::size_t cols = 80;
    synth::StitchPlanOptions plan{};
};

/// Writes videos/<split>_NNN/, labels/<split>_NNN.csv and manifest.json.
Manifest write_synthetic_dataset(const std::filesystem::path& out_dir, const SynthDatasetOptions& opt);

/// A decoded video with its extracted per-frame features.
struct VideoData {
    FrameSequence frames;
    std::vector<FrameFeatures> features;
    std::optional<LabelTrack> truth; ///< ids index the dataset's class names
};

VideoData prepare_video(const FrameSequence& seq, const PipelineConfig& cfg);
VideoData load_video(const ManifestEntry& entry, double frame_rate, std::vector<std::string>& class_names,
                     const PipelineConfig& cfg);

/// Trained artifacts: the window encoder and the calibrated classifier.
struct TrainedModel {
    Encoder encoder;
    Classifier classifier;
    std::string vocab_json;
};

/// Fits the vocabulary and classifier on labeled videos.
TrainedModel train_model(const std::vector<VideoData>& videos, const std::vector<std::string>& class_names,
                         const PipelineConfig& cfg);

/// Stable hex fingerprint of a vocabulary document.
std::string vocab_fingerprint(const std::string& vocab_json);

/// Rebuilds the encoder from a vocabulary document and checks the model and
/// config against it; throws CompatibilityError on mismatch.
Encoder encoder_for(const std::string& vocab_json, const Classifier& classifier, const PipelineConfig& cfg);

/// Frame labels of one video.
ProbTrack segment_video(const VideoData& video, const Encoder& encoder, const Classifier& classifier,
                        const PipelineConfig& cfg);

} // namespace actseg
