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

#include "actseg/video_io.hpp"

#include "actseg/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

namespace fs = std::filesystem;

namespace actseg {

Raster::Raster(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (data_.size() != rows_ * cols_)
        throw ArgumentError("raster data length does not match " + std::to_string(rows) + "x" + std::to_string(cols));
}

namespace {

// Next header token of a PNM file, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in, const fs::path& path)
{
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty())
                return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty())
        throw FormatError(path.string() + ": truncated PGM header");
    return tok;
}

std::size_t pnm_number(std::istream& in, const fs::path& path)
{
    const std::string tok = pnm_token(in, path);
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw FormatError(path.string() + ": bad PGM header field '" + tok + "'");
    return v;
}

} // namespace

Frame read_pgm(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw FormatError(path.string() + ": not a binary P5 PGM");

    const std::size_t cols = pnm_number(in, path);
    const std::size_t rows = pnm_number(in, path);
    const std::size_t maxval = pnm_number(in, path);
    if (rows == 0 || cols == 0)
        throw FormatError(path.string() + ": empty image");
    if (maxval == 0 || maxval > 255)
        throw FormatError(path.string() + ": unsupported maxval " + std::to_string(maxval));

    std::vector<unsigned char> bytes(rows * cols);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<std::size_t>(in.gcount()) != bytes.size())
        throw FormatError(path.string() + ": truncated pixel data");

    std::vector<double> px(bytes.size());
    const double scale = static_cast<double>(maxval);
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (bytes[i] > maxval)
            throw FormatError(path.string() + ": pixel exceeds maxval");
        px[i] = bytes[i] / scale;
    }
    return Frame(rows, cols, std::move(px));
}

void write_pgm(const Frame& frame, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << "P5\n" << frame.cols() << ' ' << frame.rows() << "\n255\n";
    std::vector<unsigned char> bytes(frame.size());
    auto px = frame.data();
    for (std::size_t i = 0; i < px.size(); ++i)
        bytes[i] = static_cast<unsigned char>(std::lround(std::clamp(px[i], 0.0, 1.0) * 255.0));
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IoError("write failed: " + path.string());
}

FrameSequence load_sequence(const fs::path& dir, double frame_rate)
{
    if (!(frame_rate > 0.0))
        throw ArgumentError("frame rate must be positive");
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw IoError("not a directory: " + dir.string());

    static const std::regex pattern(R"(frame_(\d{6})\.pgm)");
    std::map<long, fs::path> numbered;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern))
            numbered.emplace(std::stol(m[1].str()), entry.path());
    }

    long expect = 1;
    for (const auto& [idx, p] : numbered) {
        if (idx != expect)
            throw SequenceGapError(dir.string() + ": expected frame " + std::to_string(expect) + ", found " +
                                   std::to_string(idx));
        ++expect;
    }
    if (numbered.empty())
        throw SequenceGapError(dir.string() + ": no frame_000001.pgm");

    FrameSequence seq;
    seq.frame_rate = frame_rate;
    seq.frames.reserve(numbered.size());
    for (const auto& [idx, p] : numbered) {
        Frame f = read_pgm(p);
        if (!seq.frames.empty() && !f.same_shape(seq.frames.front()))
            throw FormatError(p.string() + ": frame dimensions differ from frame 1");
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

void write_sequence(const FrameSequence& seq, const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    char name[32];
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        std::snprintf(name, sizeof name, "frame_%06zu.pgm", i + 1);
        write_pgm(seq.frames[i], dir / name);
    }
}

Frame rescale(const Frame& frame, std::size_t new_rows, std::size_t new_cols)
{
    if (new_rows < 2 || new_cols < 2)
        throw ArgumentError("rescale target must be at least 2x2");
    if (frame.size() == 0)
        throw ArgumentError("cannot rescale an empty frame");

    const double sy = static_cast<double>(frame.rows()) / static_cast<double>(new_rows);
    const double sx = static_cast<double>(frame.cols()) / static_cast<double>(new_cols);
    const double ymax = static_cast<double>(frame.rows() - 1);
    const double xmax = static_cast<double>(frame.cols() - 1);

    Frame out(new_rows, new_cols);
    for (std::size_t y = 0; y < new_rows; ++y) {
        const double fy = std::clamp((static_cast<double>(y) + 0.5) * sy - 0.5, 0.0, ymax);
        const auto y0 = static_cast<std::size_t>(fy);
        const std::size_t y1 = std::min(y0 + 1, frame.rows() - 1);
        const double wy = fy - static_cast<double>(y0);
        for (std::size_t x = 0; x < new_cols; ++x) {
            const double fx = std::clamp((static_cast<double>(x) + 0.5) * sx - 0.5, 0.0, xmax);
            const auto x0 = static_cast<std::size_t>(fx);
            const std::size_t x1 = std::min(x0 + 1, frame.cols() - 1);
            const double wx = fx - static_cast<double>(x0);
            const double top = frame(y0, x0) + wx * (frame(y0, x1) - frame(y0, x0));
            const double bot = frame(y1, x0) + wx * (frame(y1, x1) - frame(y1, x0));
            out(y, x) = top + wy * (bot - top);
        }
    }
    return out;
}

LabelTrack load_labels(const fs::path& csv_path, std::optional<std::size_t> expected_length)
{
    std::ifstream in(csv_path);
    if (!in)
        throw IoError("cannot open " + csv_path.string());

    auto chomp = [](std::string& s) {
        if (!s.empty() && s.back() == '\r')
            s.pop_back();
    };

    std::string line;
    if (!std::getline(in, line))
        throw FormatError(csv_path.string() + ": missing header");
    chomp(line);
    if (line != "frame,label" && line.rfind("frame,label,", 0) != 0)
        throw FormatError(csv_path.string() + ": header must start with 'frame,label'");

    LabelTrack track;
    std::map<std::string, int> ids;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        chomp(line);
        if (line.empty())
            continue;
        ++row;
        const auto c1 = line.find(',');
        if (c1 == std::string::npos)
            throw FormatError(csv_path.string() + ": row " + std::to_string(row) + " has no label column");
        const auto c2 = line.find(',', c1 + 1);
        const std::string idx = line.substr(0, c1);
        const std::string label = line.substr(c1 + 1, c2 == std::string::npos ? std::string::npos : c2 - c1 - 1);

        std::size_t frame = 0;
        auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), frame);
        if (ec != std::errc() || ptr != idx.data() + idx.size() || frame != row)
            throw FormatError(csv_path.string() + ": row " + std::to_string(row) + " has frame index '" + idx + "'");
        if (label.empty())
            throw FormatError(csv_path.string() + ": empty label at frame " + std::to_string(row));

        auto [it, inserted] = ids.try_emplace(label, static_cast<int>(track.class_names.size()) + 1);
        if (inserted)
            track.class_names.push_back(label);
        track.labels.push_back(it->second);
    }

    if (expected_length && track.labels.size() != *expected_length)
        throw LengthMismatchError(csv_path.string() + ": " + std::to_string(track.labels.size()) +
                                  " rows, expected " + std::to_string(*expected_length));
    if (track.labels.empty())
        throw FormatError(csv_path.string() + ": no rows");
    return track;
}

void write_labels(const LabelTrack& track, const fs::path& csv_path)
{
    if (track.labels.empty())
        throw FormatError("refusing to write an empty label track");
    const auto A = static_cast<int>(track.class_names.size());
    for (int l : track.labels)
        if (l < 1 || l > A)
            throw FormatError("label id " + std::to_string(l) + " outside [1, " + std::to_string(A) + "]");
    for (const auto& n : track.class_names)
        if (n.empty() || n.find_first_of(",\n\r") != std::string::npos)
            throw FormatError("class name '" + n + "' cannot be written to CSV");

    std::ofstream out(csv_path);
    if (!out)
        throw IoError("cannot write " + csv_path.string());
    out << "frame,label\n";
    for (std::size_t t = 0; t < track.labels.size(); ++t)
        out << (t + 1) << ',' << track.name_of(track.labels[t]) << '\n';
    if (!out)
        throw IoError("write failed: " + csv_path.string());
}

LabelTrack remap_labels(const LabelTrack& track, std::vector<std::string>& names)
{
    std::vector<int> to_global(track.class_names.size());
    for (std::size_t i = 0; i < track.class_names.size(); ++i) {
        auto it = std::find(names.begin(), names.end(), track.class_names[i]);
        if (it == names.end()) {
            names.push_back(track.class_names[i]);
            it = names.end() - 1;
        }
        to_global[i] = static_cast<int>(it - names.begin()) + 1;
    }
    LabelTrack out;
    out.class_names = names;
    out.labels.reserve(track.labels.size());
    for (int l : track.labels)
        out.labels.push_back(to_global.at(static_cast<std::size_t>(l - 1)));
    return out;
}

} // namespace actseg
