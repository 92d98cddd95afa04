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

#include "actseg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace actseg::kernels {

void MixtureMoments::merge(const MixtureMoments& o)
{
    for (std::size_t i = 0; i < s0.size(); ++i)
        s0[i] += o.s0[i];
    for (std::size_t i = 0; i < s1.size(); ++i) {
        s1[i] += o.s1[i];
        s2[i] += o.s2[i];
    }
    log_likelihood += o.log_likelihood;
    count += o.count;
}

double posterior_into(const MixtureView& gmm, std::span<const double> f, std::span<double> gamma)
{
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < gmm.K; ++k) {
        const double* mu = gmm.means.data() + k * gmm.dim;
        const double* is = gmm.inv_sd.data() + k * gmm.dim;
        double q = 0.0;
        for (std::size_t d = 0; d < gmm.dim; ++d) {
            const double z = (f[d] - mu[d]) * is[d];
            q += z * z;
        }
        gamma[k] = gmm.log_weights[k] + gmm.log_norm[k] - 0.5 * q;
        best = std::max(best, gamma[k]);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < gmm.K; ++k) {
        gamma[k] = std::exp(gamma[k] - best);
        sum += gamma[k];
    }
    const double inv = 1.0 / sum;
    for (std::size_t k = 0; k < gmm.K; ++k)
        gamma[k] *= inv;
    return best + std::log(sum);
}

namespace {

// One Jacobi sweep over rows [y0, y1). Neighbor average uses the classic
// Horn-Schunck 3x3 weights (1/6 edge, 1/12 corner) with replicated borders.
// Returns the largest absolute update.
double hs_sweep_rows(const FlowDerivatives& d, double alpha2, const Raster& u, const Raster& v, Raster& un,
                     Raster& vn, std::size_t y0, std::size_t y1)
{
    const std::size_t R = u.rows(), C = u.cols();
    double max_delta = 0.0;
    for (std::size_t y = y0; y < y1; ++y) {
        const std::size_t ym = y == 0 ? 0 : y - 1;
        const std::size_t yp = y + 1 == R ? y : y + 1;
        for (std::size_t x = 0; x < C; ++x) {
            const std::size_t xm = x == 0 ? 0 : x - 1;
            const std::size_t xp = x + 1 == C ? x : x + 1;
            const double ubar = (u(ym, x) + u(yp, x) + u(y, xm) + u(y, xp)) / 6.0 +
                                (u(ym, xm) + u(ym, xp) + u(yp, xm) + u(yp, xp)) / 12.0;
            const double vbar = (v(ym, x) + v(yp, x) + v(y, xm) + v(y, xp)) / 6.0 +
                                (v(ym, xm) + v(ym, xp) + v(yp, xm) + v(yp, xp)) / 12.0;
            const double ix = d.ix(y, x), iy = d.iy(y, x), it = d.it(y, x);
            const double t = (ix * ubar + iy * vbar + it) / (alpha2 + ix * ix + iy * iy);
            const double nu = ubar - ix * t;
            const double nv = vbar - iy * t;
            max_delta = std::max({max_delta, std::abs(nu - u(y, x)), std::abs(nv - v(y, x))});
            un(y, x) = nu;
            vn(y, x) = nv;
        }
    }
    return max_delta;
}

} // namespace

namespace serial {

int horn_schunck(const FlowDerivatives& d, const HornSchunckOptions& opt, Raster& u, Raster& v)
{
    const double alpha2 = opt.alpha * opt.alpha;
    Raster un(u.rows(), u.cols()), vn(u.rows(), u.cols());
    int iter = 0;
    while (iter < opt.max_iter) {
        const double delta = hs_sweep_rows(d, alpha2, u, v, un, vn, 0, u.rows());
        std::swap(u, un);
        std::swap(v, vn);
        ++iter;
        if (delta < opt.tol)
            break;
    }
    return iter;
}

MixtureMoments mixture_moments(const MixtureView& gmm, PointsView points)
{
    MixtureMoments m(gmm.K, gmm.dim);
    std::vector<double> gamma(gmm.K);
    const std::size_t N = points.size();
    for (std::size_t n = 0; n < N; ++n) {
        const auto f = points[n];
        m.log_likelihood += posterior_into(gmm, f, gamma);
        for (std::size_t k = 0; k < gmm.K; ++k) {
            const double g = gamma[k];
            m.s0[k] += g;
            const double* mu = gmm.means.data() + k * gmm.dim;
            const double* is = gmm.inv_sd.data() + k * gmm.dim;
            double* s1 = m.s1.data() + k * gmm.dim;
            double* s2 = m.s2.data() + k * gmm.dim;
            for (std::size_t d = 0; d < gmm.dim; ++d) {
                const double z = (f[d] - mu[d]) * is[d];
                s1[d] += g * z;
                s2[d] += g * z * z;
            }
        }
    }
    m.count = N;
    return m;
}

void nearest_centers(PointsView points, PointsView centers, std::span<std::size_t> assignment)
{
    const std::size_t K = centers.size();
    for (std::size_t n = 0; n < points.size(); ++n) {
        const auto f = points[n];
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t k = 0; k < K; ++k) {
            const auto c = centers[k];
            double dist = 0.0;
            for (std::size_t d = 0; d < points.dim; ++d) {
                const double e = f[d] - c[d];
                dist += e * e;
            }
            if (dist < best) {
                best = dist;
                arg = k;
            }
        }
        assignment[n] = arg;
    }
}

} // namespace serial

namespace omp {

int horn_schunck(const FlowDerivatives& d, const HornSchunckOptions& opt, Raster& u, Raster& v)
{
    const double alpha2 = opt.alpha * opt.alpha;
    const auto R = static_cast<long>(u.rows());
    Raster un(u.rows(), u.cols()), vn(u.rows(), u.cols());
    int iter = 0;
    while (iter < opt.max_iter) {
        double delta = 0.0;
#pragma omp parallel for reduction(max : delta) schedule(static)
        for (long y = 0; y < R; ++y) {
            const double row = hs_sweep_rows(d, alpha2, u, v, un, vn, static_cast<std::size_t>(y),
                                             static_cast<std::size_t>(y) + 1);
            delta = std::max(delta, row);
        }
        std::swap(u, un);
        std::swap(v, vn);
        ++iter;
        if (delta < opt.tol)
            break;
    }
    return iter;
}

MixtureMoments mixture_moments(const MixtureView& gmm, PointsView points)
{
    const std::size_t N = points.size();
    const std::size_t chunks = (N + kChunk - 1) / kChunk;
    if (chunks <= 1)
        return serial::mixture_moments(gmm, points);

    std::vector<MixtureMoments> partial(chunks);
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < static_cast<long>(chunks); ++c) {
        const std::size_t first = static_cast<std::size_t>(c) * kChunk;
        partial[static_cast<std::size_t>(c)] =
            serial::mixture_moments(gmm, points.slice(first, std::min(kChunk, N - first)));
    }
    MixtureMoments total = std::move(partial.front());
    for (std::size_t c = 1; c < chunks; ++c)
        total.merge(partial[c]);
    return total;
}

void nearest_centers(PointsView points, PointsView centers, std::span<std::size_t> assignment)
{
    const std::size_t N = points.size();
    const std::size_t chunks = (N + kChunk - 1) / kChunk;
#pragma omp parallel for schedule(dynamic, 1)
    for (long c = 0; c < static_cast<long>(chunks); ++c) {
        const std::size_t first = static_cast<std::size_t>(c) * kChunk;
        const std::size_t count = std::min(kChunk, N - first);
        serial::nearest_centers(points.slice(first, count), centers, assignment.subspan(first, count));
    }
}

} // namespace omp
} // namespace actseg::kernels
