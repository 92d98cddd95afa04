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

// Hot loops of the pipeline. Each kernel has a plain serial reference in
// kernels::serial and an OpenMP version in kernels::omp. The OpenMP versions
// split work into fixed-size chunks and reduce partial results in chunk
// order, so their output does not depend on the thread count. The serial
// versions are kept for testing and benchmarking.

#pragma once

#include "actseg/video_io.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace actseg {

inline constexpr std::size_t kFeatureDim = 14;
using FeatureVector = std::array<double, kFeatureDim>;

namespace kernels {

/// Inputs of one Horn-Schunck solve: image derivatives on a common grid.
struct FlowDerivatives {
    Raster ix, iy, it;
};

struct HornSchunckOptions {
    double alpha = 1.0;
    int max_iter = 100;
    double tol = 1e-4;
};

/// Diagonal Gaussian mixture in a form ready for log-density evaluation.
/// Component k occupies means[k*dim .. k*dim+dim) and likewise for the
/// other per-dimension arrays.
struct MixtureView {
    std::size_t K = 0;
    std::size_t dim = 0;
    std::span<const double> log_weights; // K
    std::span<const double> means;       // K*dim
    std::span<const double> inv_sd;      // K*dim, 1/sigma
    std::span<const double> log_norm;    // K, log of the Gaussian normalizer
};

/// Posterior-weighted moments of a point set, centered and whitened per
/// component: s0[k] = sum_n g_nk, s1[k,d] = sum_n g_nk z_nkd,
/// s2[k,d] = sum_n g_nk z_nkd^2 where z = (f - mu_k) / sigma_k.
struct MixtureMoments {
    std::size_t K = 0;
    std::size_t dim = 0;
    std::vector<double> s0;
    std::vector<double> s1;
    std::vector<double> s2;
    double log_likelihood = 0.0; ///< sum_n log p(f_n)
    std::size_t count = 0;

    MixtureMoments() = default;
    MixtureMoments(std::size_t K, std::size_t dim)
        : K(K), dim(dim), s0(K, 0.0), s1(K * dim, 0.0), s2(K * dim, 0.0) {}

    void merge(const MixtureMoments& o);
};

/// Row-major point set: point n is data[n*dim .. n*dim+dim).
struct PointsView {
    std::span<const double> data;
    std::size_t dim = 0;

    std::size_t size() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> operator[](std::size_t n) const noexcept { return data.subspan(n * dim, dim); }
    PointsView slice(std::size_t first, std::size_t count) const noexcept
    {
        return {data.subspan(first * dim, count * dim), dim};
    }
};

static_assert(sizeof(FeatureVector) == kFeatureDim * sizeof(double));

inline PointsView view_of(std::span<const FeatureVector> v) noexcept
{
    return {std::span<const double>(v.empty() ? nullptr : v.front().data(), v.size() * kFeatureDim), kFeatureDim};
}

/// Posteriors of one point; writes K values to `gamma` and returns log p(f).
double posterior_into(const MixtureView& gmm, std::span<const double> f, std::span<double> gamma);

namespace serial {

/// Runs Jacobi sweeps in place on (u, v); returns the number of sweeps done.
int horn_schunck(const FlowDerivatives& d, const HornSchunckOptions& opt, Raster& u, Raster& v);

MixtureMoments mixture_moments(const MixtureView& gmm, PointsView points);

/// Index of the nearest center (squared Euclidean, ties to lowest index).
void nearest_centers(PointsView points, PointsView centers, std::span<std::size_t> assignment);

} // namespace serial

namespace omp {

int horn_schunck(const FlowDerivatives& d, const HornSchunckOptions& opt, Raster& u, Raster& v);

MixtureMoments mixture_moments(const MixtureView& gmm, PointsView points);

void nearest_centers(PointsView points, PointsView centers, std::span<std::size_t> assignment);

} // namespace omp

/// Number of points per work chunk in the OpenMP reductions.
inline constexpr std::size_t kChunk = 2048;

} // namespace kernels
} // namespace actseg
