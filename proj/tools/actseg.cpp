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

// actseg: synthesize data, train, segment and evaluate from the command line.
//
//   actseg synth   --out DIR [--n-train 8] [--n-test 4] [--seed 42]
//   actseg train   --manifest FILE --out-dir DIR [pipeline flags]
//   actseg segment --video DIR --vocab FILE --model FILE --out CSV [pipeline flags]
//   actseg eval    --pred CSV --truth CSV [--out FILE]
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.

#include "CLI11.hpp"

#include "actseg/error.hpp"
#include "actseg/pipeline.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace actseg;

namespace {

std::string read_text(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + p.string());
    out << text << '\n';
    if (!out)
        throw IoError("write failed: " + p.string());
}

// Pipeline flags shared by train and segment. Values land in `raw`; the
// effective config is built afterwards so that flags override --config.
struct ConfigFlags {
    PipelineConfig raw;
    std::string encoder = "fv";
    std::string rescale;
    std::string config_path;
    bool no_fv_norm = false;
    std::vector<std::pair<const char*, CLI::Option*>> opts;

    void attach(CLI::App* app)
    {
        auto add = [&](const char* key, CLI::Option* o) { opts.emplace_back(key, o); };
        add("tau", app->add_option("--tau", raw.tau, "gradient magnitude threshold (8-bit units)"));
        add("k", app->add_option("--k", raw.K, "vocabulary size"));
        add("window_seconds", app->add_option("--window-seconds", raw.L_seconds, "temporal window length"));
        add("encoder", app->add_option("--encoder", encoder, "window encoding")->check(CLI::IsMember({"fv", "bow"})));
        add("fv_norm", app->add_flag("--no-fv-norm", no_fv_norm, "disable signed-sqrt + L2 Fisher normalization"));
        add("svm_c", app->add_option("--svm-c", raw.svm_C, "SVM regularization constant"));
        add("seed", app->add_option("--seed", raw.seed, "random seed"));
        add("rescale", app->add_option("--rescale", rescale, "resize frames to ROWSxCOLS before processing"));
        add("pool_cap", app->add_option("--pool-cap", raw.pool_cap, "feature vectors sampled per action"));
        add("frame_sample_stride", app->add_option("--stride", raw.frame_sample_stride, "use every n-th frame"));
        add("fps", app->add_option("--fps", raw.frame_rate, "frame rate of videos without one"));
        app->add_option("--config", config_path, "JSON config file; explicit flags take precedence");
    }

    bool given(const char* key) const
    {
        for (const auto& [k, o] : opts)
            if (std::string_view(k) == key)
                return o->count() > 0;
        return false;
    }

    // Set by a flag or by the config file.
    bool explicit_key(const char* key) const
    {
        if (given(key))
            return true;
        if (config_path.empty())
            return false;
        const auto doc = nlohmann::json::parse(read_text(config_path), nullptr, false);
        return doc.is_object() && doc.contains(key);
    }

    PipelineConfig resolve() const
    {
        PipelineConfig cfg;
        if (!config_path.empty())
            apply_config_json(cfg, read_text(config_path));
        if (given("tau")) cfg.tau = raw.tau;
        if (given("k")) cfg.K = raw.K;
        if (given("window_seconds")) cfg.L_seconds = raw.L_seconds;
        if (given("encoder")) cfg.encoder = encoder_kind_from_string(encoder);
        if (given("fv_norm")) cfg.fv_norm = !no_fv_norm;
        if (given("svm_c")) cfg.svm_C = raw.svm_C;
        if (given("seed")) cfg.seed = raw.seed;
        if (given("rescale")) cfg.rescale = parse_rescale(rescale);
        if (given("pool_cap")) cfg.pool_cap = raw.pool_cap;
        if (given("frame_sample_stride")) cfg.frame_sample_stride = raw.frame_sample_stride;
        if (given("fps")) cfg.frame_rate = raw.frame_rate;
        cfg.validate();
        return cfg;
    }
};

int run_synth(const fs::path& out, const SynthDatasetOptions& opt)
{
    const Manifest m = write_synthetic_dataset(out, opt);
    std::cout << "wrote " << m.train.size() << " training and " << m.test.size() << " test videos to " << out
              << '\n';
    return 0;
}

int run_train(const fs::path& manifest_path, const fs::path& out_dir, const PipelineConfig& cfg)
{
    const Manifest m = load_manifest(manifest_path);
    std::vector<std::string> names = m.class_names;
    std::vector<VideoData> videos;
    for (const auto& e : m.train) {
        videos.push_back(load_video(e, m.frame_rate, names, cfg));
        std::cerr << "features: " << e.frames.filename().string() << '\n';
    }
    const TrainedModel tm = train_model(videos, names, cfg);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    write_text(out_dir / "vocab.json", tm.vocab_json);
    write_text(out_dir / "model.json", to_json(tm.classifier));
    std::cout << "wrote " << (out_dir / "vocab.json").string() << " and " << (out_dir / "model.json").string()
              << " (A=" << tm.classifier.model.A << ", dim=" << tm.classifier.model.dim << ")\n";
    return 0;
}

int run_segment(const fs::path& video_dir, const fs::path& vocab_path, const fs::path& model_path,
                const fs::path& out_csv, const ConfigFlags& flags)
{
    std::string vocab_text = read_text(vocab_path);
    if (!vocab_text.empty() && vocab_text.back() == '\n')
        vocab_text.pop_back();
    const Classifier clf = classifier_from_json(read_text(model_path));

    // Settings fixed at training time follow the artifacts unless the user
    // asked for something specific, in which case encoder_for checks them.
    PipelineConfig cfg = flags.resolve();
    const bool is_gmm = vocabulary_kind(vocab_text) == "gmm";
    if (!flags.explicit_key("encoder"))
        cfg.encoder = is_gmm ? EncoderKind::fisher : EncoderKind::bow;
    if (!flags.explicit_key("k"))
        cfg.K = is_gmm ? gmm_from_json(vocab_text).K() : codebook_from_json(vocab_text).K;
    if (!flags.explicit_key("fv_norm"))
        cfg.fv_norm = clf.fv_norm;
    const Encoder enc = encoder_for(vocab_text, clf, cfg);
    const VideoData v = prepare_video(load_sequence(video_dir, cfg.frame_rate), cfg);
    const ProbTrack track = segment_video(v, enc, clf, cfg);
    write_segmentation_csv(out_csv, track, clf.class_names);
    std::cout << "wrote " << track.labels.size() << " frame labels to " << out_csv.string() << '\n';
    return 0;
}

int run_eval(const fs::path& pred_csv, const fs::path& truth_csv, fs::path out)
{
    const LabelTrack pred = load_labels(pred_csv);
    const LabelTrack truth = load_labels(truth_csv, pred.length());
    const EvalReport r = evaluate(pred, truth);
    const std::string text = to_json(r);
    if (out.empty())
        out = fs::path(pred_csv).replace_extension(".eval.json");
    write_text(out, text);
    std::cout << text << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Joint action segmentation and recognition of videos"};
    app.require_subcommand(1);

    SynthDatasetOptions synth_opt;
    fs::path synth_out;
    auto* synth = app.add_subcommand("synth", "generate a stitched synthetic dataset");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--n-train", synth_opt.n_train, "training videos");
    synth->add_option("--n-test", synth_opt.n_test, "test videos");
    synth->add_option("--seed", synth_opt.seed, "random seed");
    synth->add_option("--rows", synth_opt.rows, "frame height")->check(CLI::Range(32, 4096));
    synth->add_option("--cols", synth_opt.cols, "frame width")->check(CLI::Range(32, 4096));
    synth->add_option("--segments", synth_opt.plan.segments, "actions per video");

    fs::path manifest, out_dir;
    ConfigFlags train_flags;
    auto* train = app.add_subcommand("train", "fit vocabulary and classifier");
    train->add_option("--manifest", manifest, "dataset manifest")->required();
    train->add_option("--out-dir", out_dir, "where vocab.json and model.json go")->required();
    train_flags.attach(train);

    fs::path video_dir, vocab_path, model_path, seg_out;
    ConfigFlags seg_flags;
    auto* segment = app.add_subcommand("segment", "label every frame of a video");
    segment->add_option("--video", video_dir, "directory of frame_%06d.pgm")->required();
    segment->add_option("--vocab", vocab_path, "vocab.json")->required();
    segment->add_option("--model", model_path, "model.json")->required();
    segment->add_option("--out", seg_out, "output CSV (frame,label,maxprob)")->required();
    seg_flags.attach(segment);

    fs::path pred_csv, truth_csv, eval_out;
    auto* eval = app.add_subcommand("eval", "frame accuracy and confusion matrix");
    eval->add_option("--pred", pred_csv, "predicted labels CSV")->required();
    eval->add_option("--truth", truth_csv, "ground-truth labels CSV")->required();
    eval->add_option("--out", eval_out, "report path (default: <pred>.eval.json)");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*synth) {
            if (synth_opt.n_train == 0 || synth_opt.n_test == 0)
                throw ArgumentError("--n-train and --n-test must be positive");
            return run_synth(synth_out, synth_opt);
        }
        if (*train)
            return run_train(manifest, out_dir, train_flags.resolve());
        if (*segment)
            return run_segment(video_dir, vocab_path, model_path, seg_out, seg_flags);
        if (*eval)
            return run_eval(pred_csv, truth_csv, eval_out);
    }
    catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
