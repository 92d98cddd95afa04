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
#include "actseg/vocab.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace actseg::testutil {

inline Raster random_raster(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Raster r(rows, cols);
    for (double& v : r.data())
        v = u(rng);
    return r;
}

// Smooth periodic texture; shifting it by whole pixels wraps exactly.
inline Raster periodic_texture(std::size_t rows, std::size_t cols, std::uint64_t seed, double shift_x = 0.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    struct W {
        int fx, fy;
        double ph;
    };
    std::vector<W> waves;
    for (int fx = 1; fx <= 3; ++fx)
        for (int fy = 1; fy <= 3; ++fy)
            waves.push_back({fx, fy, phase(rng)});
    Raster r(rows, cols);
    const double R = static_cast<double>(rows), C = static_cast<double>(cols);
    for (std::size_t y = 0; y < rows; ++y)
        for (std::size_t x = 0; x < cols; ++x) {
            double s = 0.0;
            for (const auto& w : waves)
                s += std::sin(2.0 * std::numbers::pi * (w.fx * (static_cast<double>(x) - shift_x) / C +
                                                        w.fy * static_cast<double>(y) / R) +
                              w.ph);
            r(y, x) = 0.5 + 0.4 * s / static_cast<double>(waves.size());
        }
    return r;
}

inline double median(std::vector<double> v)
{
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("actseg_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

// A random diagonal GMM with well-conditioned parameters.
inline GmmVocabulary random_gmm(std::size_t K, std::size_t D, std::mt19937_64& rng, double spread = 2.0)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(K), mu(K * D), var(K * D);
    double total = 0.0;
    for (auto& x : w) {
        x = 0.2 + u(rng);
        total += x;
    }
    for (auto& x : w)
        x /= total;
    for (auto& x : mu)
        x = spread * (2.0 * u(rng) - 1.0);
    for (auto& x : var)
        x = 0.3 + u(rng);
    return GmmVocabulary(std::move(w), std::move(mu), std::move(var), Standardizer::identity(D));
}

} // namespace actseg::testutil
