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

#include "actseg/pipeline.hpp"

#include "actseg/error.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace actseg {

void PipelineConfig::validate() const
{
    if (!(tau > 0.0))
        throw ArgumentError("tau must be positive");
    if (K == 0)
        throw ArgumentError("K must be positive");
    if (!(L_seconds > 0.0))
        throw ArgumentError("window length must be positive");
    if (frame_sample_stride == 0)
        throw ArgumentError("frame sampling stride must be positive");
    if (!(svm_C > 0.0))
        throw ArgumentError("SVM C must be positive");
    if (pool_cap == 0)
        throw ArgumentError("pool cap must be positive");
    if (!(frame_rate > 0.0))
        throw ArgumentError("frame rate must be positive");
    if (rescale && (rescale->first < 3 || rescale->second < 3))
        throw ArgumentError("rescale target must be at least 3x3");
}

std::pair<std::size_t, std::size_t> parse_rescale(const std::string& s)
{
    std::size_t r = 0, c = 0;
    char sep = 0;
    std::istringstream in(s);
    if (!(in >> r >> sep >> c) || (sep != 'x' && sep != 'X') || !in.eof())
        throw ArgumentError("rescale must look like ROWSxCOLS, got '" + s + "'");
    return {r, c};
}

void apply_config_json(PipelineConfig& cfg, const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    }
    catch (const json::exception& e) {
        throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        if (j.contains("tau")) cfg.tau = j["tau"].get<double>();
        if (j.contains("k")) cfg.K = j["k"].get<std::size_t>();
        if (j.contains("window_seconds")) cfg.L_seconds = j["window_seconds"].get<double>();
        if (j.contains("frame_sample_stride")) cfg.frame_sample_stride = j["frame_sample_stride"].get<std::size_t>();
        if (j.contains("encoder")) cfg.encoder = encoder_kind_from_string(j["encoder"].get<std::string>());
        if (j.contains("fv_norm")) cfg.fv_norm = j["fv_norm"].get<bool>();
        if (j.contains("svm_c")) cfg.svm_C = j["svm_c"].get<double>();
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("rescale")) cfg.rescale = parse_rescale(j["rescale"].get<std::string>());
        if (j.contains("pool_cap")) cfg.pool_cap = j["pool_cap"].get<std::size_t>();
        if (j.contains("fps")) cfg.frame_rate = j["fps"].get<double>();
    }
    catch (const json::exception& e) {
        throw ArgumentError(std::string("bad config value: ") + e.what());
    }
}

Manifest load_manifest(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open manifest " + path.string());
    const fs::path base = path.parent_path();
    try {
        const json j = json::parse(in);
        Manifest m;
        m.class_names = j.value("class_names", std::vector<std::string>{});
        m.frame_rate = j.value("frame_rate", 25.0);
        auto entries = [&](const char* key) {
            std::vector<ManifestEntry> out;
            for (const auto& e : j.at(key)) {
                ManifestEntry me{e.at("frames").get<std::string>(), e.at("labels").get<std::string>()};
                if (me.frames.is_relative())
                    me.frames = base / me.frames;
                if (me.labels.is_relative())
                    me.labels = base / me.labels;
                out.push_back(std::move(me));
            }
            return out;
        };
        m.train = entries("train");
        m.test = j.contains("test") ? entries("test") : std::vector<ManifestEntry>{};
        return m;
    }
    catch (const json::exception& e) {
        throw FormatError(path.string() + ": malformed manifest: " + e.what());
    }
}

void save_manifest(const Manifest& m, const fs::path& path)
{
    const fs::path base = path.parent_path();
    auto entries = [&](const std::vector<ManifestEntry>& v) {
        json out = json::array();
        for (const auto& e : v)
            out.push_back({{"frames", e.frames.lexically_relative(base).generic_string()},
                           {"labels", e.labels.lexically_relative(base).generic_string()}});
        return out;
    };
    json j;
    j["frame_rate"] = m.frame_rate;
    j["class_names"] = m.class_names;
    j["train"] = entries(m.train);
    j["test"] = entries(m.test);
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(1) << '\n';
    if (!out)
        throw IoError("write failed: " + path.string());
}

Manifest write_synthetic_dataset(const fs::path& out_dir, const SynthDatasetOptions& opt)
{
    if (opt.n_train == 0 || opt.n_test == 0)
        throw ArgumentError("synthetic dataset needs at least one training and one test video");
    std::error_code ec;
    fs::create_directories(out_dir / "videos", ec);
    if (!ec)
        fs::create_directories(out_dir / "labels", ec);
    if (ec)
        throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    Manifest m;
    m.frame_rate = synth::kFrameRate;
    for (auto k : synth::kAllKinds)
        m.class_names.push_back(synth::to_string(k));

    std::mt19937_64 rng(opt.seed);
    char name[32];
    for (std::size_t i = 0; i < opt.n_train + opt.n_test; ++i) {
        const bool train = i < opt.n_train;
        std::snprintf(name, sizeof name, "%s_%03zu", train ? "train" : "test", train ? i : i - opt.n_train);
        const synth::StitchSpec spec = synth::random_stitch_spec(rng(), opt.plan);
        auto [seq, track] = synth::stitch(spec, opt.rows, opt.cols);
        ManifestEntry e{out_dir / "videos" / name, out_dir / "labels" / (std::string(name) + ".csv")};
        write_sequence(seq, e.frames);
        write_labels(track, e.labels);
        (train ? m.train : m.test).push_back(std::move(e));
    }
    save_manifest(m, out_dir / "manifest.json");
    return m;
}

VideoData prepare_video(const FrameSequence& seq, const PipelineConfig& cfg)
{
    VideoData v;
    v.frames = seq;
    if (cfg.rescale)
        for (auto& f : v.frames.frames)
            f = rescale(f, cfg.rescale->first, cfg.rescale->second);
    v.features = extract_video_features(v.frames, cfg.tau, cfg.frame_sample_stride);
    return v;
}

VideoData load_video(const ManifestEntry& entry, double frame_rate, std::vector<std::string>& class_names,
                     const PipelineConfig& cfg)
{
    const FrameSequence seq = load_sequence(entry.frames, frame_rate);
    VideoData v = prepare_video(seq, cfg);
    v.truth = remap_labels(load_labels(entry.labels, seq.length()), class_names);
    return v;
}

std::string vocab_fingerprint(const std::string& vocab_json)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : vocab_json) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

struct Segment {
    std::size_t first, last; // 1-based inclusive
    int label;
};

std::vector<Segment> contiguous_segments(const std::vector<int>& labels)
{
    std::vector<Segment> out;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        if (out.empty() || out.back().label != labels[t])
            out.push_back({t + 1, t + 1, labels[t]});
        else
            out.back().last = t + 1;
    }
    return out;
}

} // namespace

TrainedModel train_model(const std::vector<VideoData>& videos, const std::vector<std::string>& class_names,
                         const PipelineConfig& cfg)
{
    cfg.validate();
    if (videos.empty())
        throw ArgumentError("no training videos");

    // Vocabulary from per-action pooled features of the sampled frames.
    std::map<int, std::vector<FeatureVector>> by_action;
    for (const auto& v : videos) {
        if (!v.truth)
            throw ArgumentError("training video without labels");
        for (std::size_t t = 0; t < v.features.size(); ++t) {
            auto& dst = by_action[v.truth->labels[t]];
            dst.insert(dst.end(), v.features[t].vectors.begin(), v.features[t].vectors.end());
        }
    }
    std::size_t present = 0;
    for (const auto& [label, vecs] : by_action)
        present += vecs.empty() ? 0 : 1;
    if (present < 2)
        throw ArgumentError("training data contains fewer than two classes with features");

    const TrainingPool pool = build_pool(by_action, cfg.pool_cap, cfg.seed);
    TrainedModel tm;
    if (cfg.encoder == EncoderKind::fisher) {
        GmmVocabulary gmm = gmm_fit(pool, cfg.K, cfg.seed);
        tm.vocab_json = to_json(gmm);
        tm.encoder = Encoder::fisher(std::move(gmm), cfg.fv_norm);
    }
    else {
        Codebook cb = kmeans_fit(pool, cfg.K, cfg.seed);
        tm.vocab_json = to_json(cb);
        tm.encoder = Encoder::bow(std::move(cb));
    }

    // One vector per contiguous single-action segment, plus window-length
    // crops of it at half-window steps.
    std::vector<std::vector<double>> samples;
    std::vector<int> labels, groups;
    const std::size_t stride = cfg.frame_sample_stride;
    for (std::size_t vi = 0; vi < videos.size(); ++vi) {
        const auto& v = videos[vi];
        const auto stats = frame_stats(v.features, tm.encoder, stride);
        const std::size_t L = plan_windows(v.frames.length(), v.frames.frame_rate, cfg.L_seconds).L_frames;
        auto add = [&](std::size_t a, std::size_t b, int label) {
            EncodingStats acc = tm.encoder.empty_stats();
            for (std::size_t t = a; t <= b; ++t)
                if (is_sampled_frame(t, stride))
                    acc.add(stats[t - 1]);
            if (acc.count == 0)
                return;
            samples.push_back(tm.encoder.finalize(acc));
            labels.push_back(label);
            groups.push_back(static_cast<int>(vi));
        };
        for (const auto& seg : contiguous_segments(v.truth->labels)) {
            add(seg.first, seg.last, seg.label);
            const std::size_t len = seg.last - seg.first + 1;
            if (len <= L)
                continue;
            const std::size_t step = std::max<std::size_t>(1, L / 2);
            for (std::size_t a = seg.first; a + L - 1 <= seg.last; a += step)
                add(a, a + L - 1, seg.label);
        }
    }

    SvmOptions svm;
    svm.C = cfg.svm_C;
    svm.seed = cfg.seed;
    const std::size_t distinct_groups = std::set<int>(groups.begin(), groups.end()).size();
    tm.classifier = train_classifier(samples, labels, class_names, svm,
                                     distinct_groups >= 3 ? std::span<const int>(groups) : std::span<const int>());
    tm.classifier.vocab_ref = vocab_fingerprint(tm.vocab_json);
    tm.classifier.fv_norm = cfg.encoder == EncoderKind::fisher && cfg.fv_norm;
    return tm;
}

Encoder encoder_for(const std::string& vocab_json, const Classifier& classifier, const PipelineConfig& cfg)
{
    if (classifier.vocab_ref != vocab_fingerprint(vocab_json))
        throw CompatibilityError("model was trained with a different vocabulary (vocab_ref mismatch)");
    const std::string kind = vocabulary_kind(vocab_json);
    Encoder enc = [&] {
        if (kind == "gmm") {
            if (cfg.encoder != EncoderKind::fisher)
                throw CompatibilityError("vocabulary is a GMM but the bow encoder was requested");
            return Encoder::fisher(gmm_from_json(vocab_json), cfg.fv_norm);
        }
        if (cfg.encoder != EncoderKind::bow)
            throw CompatibilityError("vocabulary is a codebook but the fv encoder was requested");
        return Encoder::bow(codebook_from_json(vocab_json));
    }();
    if (enc.K() != cfg.K)
        throw CompatibilityError("vocabulary has K=" + std::to_string(enc.K()) + " but config requests K=" +
                                 std::to_string(cfg.K));
    if (enc.output_dim() != classifier.model.dim)
        throw CompatibilityError("model dimension " + std::to_string(classifier.model.dim) +
                                 " does not match encoder output " + std::to_string(enc.output_dim()));
    if (cfg.encoder == EncoderKind::fisher && classifier.fv_norm != cfg.fv_norm)
        throw CompatibilityError("Fisher vector normalization differs between model and config");
    return enc;
}

ProbTrack segment_video(const VideoData& video, const Encoder& encoder, const Classifier& classifier,
                        const PipelineConfig& cfg)
{
    const std::size_t T = video.frames.length();
    const WindowPlan plan = plan_windows(T, video.frames.frame_rate, cfg.L_seconds);
    const auto stats = frame_stats(video.features, encoder, cfg.frame_sample_stride);
    const auto encoded = encode_windows(plan, stats, encoder, cfg.frame_sample_stride);
    std::vector<std::optional<ProbVector>> q(encoded.size());
    for (std::size_t s = 0; s < encoded.size(); ++s)
        if (encoded[s])
            q[s] = predict_proba(classifier.model, classifier.platt, *encoded[s]);
    return integrate(q, plan, T, classifier.model.A);
}

} // namespace actseg
