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

// Serial reference kernels against their OpenMP counterparts. Thread count
// follows OMP_NUM_THREADS.

#include "actseg/kernels.hpp"
#include "actseg/vocab.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace actseg;
using namespace actseg::kernels;

namespace {

Raster smooth_raster(std::size_t rows, std::size_t cols, double phase)
{
    Raster r(rows, cols);
    for (std::size_t y = 0; y < rows; ++y)
        for (std::size_t x = 0; x < cols; ++x)
            r(y, x) = 100.0 * std::sin(0.21 * static_cast<double>(x) + phase) * std::cos(0.17 * static_cast<double>(y));
    return r;
}

FlowDerivatives flow_inputs(std::size_t side)
{
    FlowDerivatives d{smooth_raster(side, side, 0.0), smooth_raster(side, side, 1.0), smooth_raster(side, side, 2.0)};
    return d;
}

std::vector<double> points(std::size_t n, std::size_t dim, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> p(n * dim);
    for (double& v : p)
        v = g(rng);
    return p;
}

GmmVocabulary mixture(std::size_t K)
{
    const auto mu = points(K, kFeatureDim, 7);
    return GmmVocabulary(std::vector<double>(K, 1.0 / static_cast<double>(K)), mu,
                         std::vector<double>(K * kFeatureDim, 1.0), Standardizer::identity(kFeatureDim));
}

template <int (*Solve)(const FlowDerivatives&, const HornSchunckOptions&, Raster&, Raster&)>
void BM_HornSchunck(benchmark::State& state)
{
    const auto side = static_cast<std::size_t>(state.range(0));
    const FlowDerivatives d = flow_inputs(side);
    HornSchunckOptions opt;
    opt.tol = 0.0; // always run max_iter sweeps
    for (auto _ : state) {
        Raster u(side, side), v(side, side);
        benchmark::DoNotOptimize(Solve(d, opt, u, v));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side) * opt.max_iter);
}

template <MixtureMoments (*Moments)(const MixtureView&, PointsView)>
void BM_MixtureMoments(benchmark::State& state)
{
    const auto N = static_cast<std::size_t>(state.range(0));
    const auto K = static_cast<std::size_t>(state.range(1));
    const GmmVocabulary gmm = mixture(K);
    const auto pts = points(N, kFeatureDim, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(Moments(gmm.view(), PointsView{pts, kFeatureDim}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(N));
}

template <void (*Nearest)(PointsView, PointsView, std::span<std::size_t>)>
void BM_NearestCenters(benchmark::State& state)
{
    const auto N = static_cast<std::size_t>(state.range(0));
    const auto K = static_cast<std::size_t>(state.range(1));
    const auto pts = points(N, kFeatureDim, 4);
    const auto centers = points(K, kFeatureDim, 5);
    std::vector<std::size_t> out(N);
    for (auto _ : state) {
        Nearest(PointsView{pts, kFeatureDim}, PointsView{centers, kFeatureDim}, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(N));
}

} // namespace

BENCHMARK(BM_HornSchunck<serial::horn_schunck>)->Name("horn_schunck/serial")->Arg(64)->Arg(128);
BENCHMARK(BM_HornSchunck<omp::horn_schunck>)->Name("horn_schunck/omp")->Arg(64)->Arg(128);
BENCHMARK(BM_MixtureMoments<serial::mixture_moments>)->Name("mixture_moments/serial")->Args({20000, 64});
BENCHMARK(BM_MixtureMoments<omp::mixture_moments>)->Name("mixture_moments/omp")->Args({20000, 64});
BENCHMARK(BM_NearestCenters<serial::nearest_centers>)->Name("nearest_centers/serial")->Args({20000, 64});
BENCHMARK(BM_NearestCenters<omp::nearest_centers>)->Name("nearest_centers/omp")->Args({20000, 64});

BENCHMARK_MAIN();
