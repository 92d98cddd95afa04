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

#include "actseg/vocab.hpp"

#include "actseg/error.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

using json = nlohmann::ordered_json;

namespace actseg {

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::identity(std::size_t dim)
{
    return {std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

Standardizer Standardizer::fit(kernels::PointsView points)
{
    const std::size_t N = points.size(), D = points.dim;
    if (N == 0)
        throw ArgumentError("cannot fit a standardizer on zero points");
    Standardizer s{std::vector<double>(D, 0.0), std::vector<double>(D, 0.0)};
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t d = 0; d < D; ++d)
            s.mean[d] += points[n][d];
    for (auto& m : s.mean)
        m /= static_cast<double>(N);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t d = 0; d < D; ++d) {
            const double e = points[n][d] - s.mean[d];
            s.std[d] += e * e;
        }
    for (auto& v : s.std)
        v = std::max(std::sqrt(v / static_cast<double>(N)), kMinStd);
    return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const
{
    for (std::size_t d = 0; d < mean.size(); ++d)
        out[d] = (in[d] - mean[d]) / std[d];
}

FeatureVector Standardizer::apply(const FeatureVector& f) const
{
    if (dim() != kFeatureDim)
        throw ArgumentError("standardizer dimension " + std::to_string(dim()) + " does not match feature dimension");
    FeatureVector out;
    apply(f, out);
    return out;
}

std::vector<FeatureVector> Standardizer::apply(std::span<const FeatureVector> fs) const
{
    std::vector<FeatureVector> out;
    out.reserve(fs.size());
    for (const auto& f : fs)
        out.push_back(apply(f));
    return out;
}

// ---------------------------------------------------------------------------
// Pool

TrainingPool TrainingPool::from_points(std::vector<double> points, std::size_t dim)
{
    if (dim == 0 || points.size() % dim != 0)
        throw ArgumentError("point buffer is not a whole number of points");
    TrainingPool p;
    p.dim = dim;
    p.data = std::move(points);
    p.per_action_counts[1] = p.size();
    p.standardizer = Standardizer::identity(dim);
    return p;
}

TrainingPool build_pool(const std::map<int, std::vector<FeatureVector>>& features_by_action, std::size_t cap,
                        std::uint64_t seed)
{
    if (cap == 0)
        throw ArgumentError("pool cap must be at least 1");
    std::mt19937_64 rng(seed);

    TrainingPool pool;
    pool.dim = kFeatureDim;
    for (const auto& [label, vecs] : features_by_action) {
        std::vector<std::size_t> idx(vecs.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::size_t take = vecs.size();
        if (take > cap) {
            // Partial Fisher-Yates: the first `cap` slots become a uniform sample.
            for (std::size_t i = 0; i < cap; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
                std::swap(idx[i], idx[j]);
            }
            idx.resize(cap);
            std::sort(idx.begin(), idx.end());
            take = cap;
        }
        for (std::size_t i : idx)
            pool.data.insert(pool.data.end(), vecs[i].begin(), vecs[i].end());
        pool.per_action_counts[label] = take;
    }
    if (pool.data.empty())
        throw ArgumentError("no feature vectors to pool");

    pool.standardizer = Standardizer::fit(pool.view());
    const std::size_t N = pool.size();
    for (std::size_t n = 0; n < N; ++n) {
        std::span<double> row(pool.data.data() + n * kFeatureDim, kFeatureDim);
        pool.standardizer.apply(row, row);
    }
    return pool;
}

// ---------------------------------------------------------------------------
// k-means

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double e = a[d] - b[d];
        s += e * e;
    }
    return s;
}

std::vector<double> kmeanspp_seed(kernels::PointsView pts, std::size_t K, std::mt19937_64& rng)
{
    const std::size_t N = pts.size(), D = pts.dim;
    std::vector<double> centers;
    centers.reserve(K * D);
    std::vector<char> chosen(N, 0);

    std::size_t first = static_cast<std::size_t>(rng() % N);
    chosen[first] = 1;
    centers.insert(centers.end(), pts[first].begin(), pts[first].end());

    std::vector<double> d2(N);
    for (std::size_t n = 0; n < N; ++n)
        d2[n] = sq_dist(pts[n], pts[first]);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t k = 1; k < K; ++k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = N;
        if (total > 0.0) {
            const double r = unif(rng) * total;
            double acc = 0.0;
            for (std::size_t n = 0; n < N; ++n) {
                acc += d2[n];
                if (acc > r && d2[n] > 0.0) {
                    pick = n;
                    break;
                }
            }
            if (pick == N) // rounding at the tail
                for (std::size_t n = N; n-- > 0;)
                    if (d2[n] > 0.0) {
                        pick = n;
                        break;
                    }
        }
        else {
            for (std::size_t n = 0; n < N; ++n)
                if (!chosen[n]) {
                    pick = n;
                    break;
                }
        }
        chosen[pick] = 1;
        centers.insert(centers.end(), pts[pick].begin(), pts[pick].end());
        for (std::size_t n = 0; n < N; ++n)
            d2[n] = std::min(d2[n], sq_dist(pts[n], pts[pick]));
    }
    return centers;
}

} // namespace

Codebook kmeans_fit(const TrainingPool& pool, std::size_t K, std::uint64_t seed)
{
    const std::size_t N = pool.size(), D = pool.dim;
    if (K == 0)
        throw ArgumentError("K must be at least 1");
    if (N < K)
        throw ArgumentError("k-means needs at least K=" + std::to_string(K) + " points, got " + std::to_string(N));

    std::mt19937_64 rng(seed);
    const auto pts = pool.view();

    Codebook cb;
    cb.K = K;
    cb.dim = D;
    cb.standardizer = pool.standardizer;
    cb.centers = kmeanspp_seed(pts, K, rng);

    constexpr int kMaxIter = 50;
    std::vector<std::size_t> assign(N), prev(N, K);
    std::vector<double> dist(N);
    for (int iter = 0; iter < kMaxIter; ++iter) {
        kernels::omp::nearest_centers(pts, cb.view(), assign);
        double inertia = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            dist[n] = sq_dist(pts[n], cb.view()[assign[n]]);
            inertia += dist[n];
        }
        cb.inertia_trace.push_back(inertia);
        if (assign == prev)
            break;

        std::vector<double> sums(K * D, 0.0);
        std::vector<std::size_t> counts(K, 0);
        for (std::size_t n = 0; n < N; ++n) {
            const std::size_t k = assign[n];
            ++counts[k];
            for (std::size_t d = 0; d < D; ++d)
                sums[k * D + d] += pts[n][d];
        }
        for (std::size_t k = 0; k < K; ++k) {
            if (counts[k] > 0) {
                for (std::size_t d = 0; d < D; ++d)
                    cb.centers[k * D + d] = sums[k * D + d] / static_cast<double>(counts[k]);
                continue;
            }
            const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
            std::copy(pts[far].begin(), pts[far].end(), cb.centers.begin() + static_cast<long>(k * D));
            dist[far] = 0.0;
        }
        prev.swap(assign);
    }
    return cb;
}

// ---------------------------------------------------------------------------
// GMM

GmmVocabulary::GmmVocabulary(std::vector<double> weights, std::vector<double> means, std::vector<double> vars,
                             Standardizer standardizer)
    : weights_(std::move(weights)), means_(std::move(means)), vars_(std::move(vars)),
      standardizer_(std::move(standardizer))
{
    const std::size_t K = weights_.size(), D = standardizer_.dim();
    if (K == 0 || D == 0)
        throw ArgumentError("GMM needs at least one component and one dimension");
    if (means_.size() != K * D || vars_.size() != K * D || standardizer_.std.size() != D)
        throw ArgumentError("GMM parameter arrays have inconsistent sizes");
    double wsum = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw ArgumentError("GMM weights must be positive and finite");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
        throw ArgumentError("GMM weights do not sum to 1");
    for (double v : vars_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ArgumentError("GMM variances must be positive and finite");
    for (double m : means_)
        if (!std::isfinite(m))
            throw ArgumentError("GMM means must be finite");

    const double log2pi = std::log(2.0 * std::numbers::pi);
    log_weights_.resize(K);
    inv_sd_.resize(K * D);
    log_norm_.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        log_weights_[k] = std::log(weights_[k]);
        double ln = -0.5 * static_cast<double>(D) * log2pi;
        for (std::size_t d = 0; d < D; ++d) {
            inv_sd_[k * D + d] = 1.0 / std::sqrt(vars_[k * D + d]);
            ln -= 0.5 * std::log(vars_[k * D + d]);
        }
        log_norm_[k] = ln;
    }
}

kernels::MixtureView GmmVocabulary::view() const noexcept
{
    return {K(), dim(), log_weights_, means_, inv_sd_, log_norm_};
}

GmmVocabulary gmm_fit(const TrainingPool& pool, std::size_t K, std::uint64_t seed, const GmmFitOptions& opt)
{
    const std::size_t N = pool.size(), D = pool.dim;
    if (K == 0)
        throw ArgumentError("K must be at least 1");
    if (N < 10 * K)
        throw ArgumentError("GMM fit needs at least 10*K=" + std::to_string(10 * K) + " points, got " +
                            std::to_string(N));
    const auto pts = pool.view();

    // Variance floor relative to the pooled per-dimension variance.
    std::vector<double> floor(D, 0.0), gmean(D, 0.0);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t d = 0; d < D; ++d)
            gmean[d] += pts[n][d];
    for (auto& m : gmean)
        m /= static_cast<double>(N);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t d = 0; d < D; ++d) {
            const double e = pts[n][d] - gmean[d];
            floor[d] += e * e;
        }
    for (auto& f : floor)
        f = std::max(opt.var_floor_ratio * f / static_cast<double>(N), 1e-12);

    // Initialization from hard k-means clusters.
    const Codebook cb = kmeans_fit(pool, K, seed);
    std::vector<std::size_t> assign(N);
    kernels::omp::nearest_centers(pts, cb.view(), assign);
    std::vector<double> weights(K, 0.0), means = cb.centers, vars(K * D, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const std::size_t k = assign[n];
        weights[k] += 1.0;
        for (std::size_t d = 0; d < D; ++d) {
            const double e = pts[n][d] - means[k * D + d];
            vars[k * D + d] += e * e;
        }
    }
    for (std::size_t k = 0; k < K; ++k) {
        const double cnt = std::max(weights[k], 1.0);
        for (std::size_t d = 0; d < D; ++d)
            vars[k * D + d] = std::max(vars[k * D + d] / cnt, floor[d]);
        weights[k] = std::max(weights[k], 1.0);
    }
    auto normalize = [](std::vector<double>& w) {
        const double s = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& x : w)
            x /= s;
    };
    normalize(weights);

    GmmVocabulary gmm(weights, means, vars, pool.standardizer);
    std::vector<double> trace;
    for (int iter = 0; iter <= opt.max_iter; ++iter) {
        const kernels::MixtureMoments m = opt.parallel ? kernels::omp::mixture_moments(gmm.view(), pts)
                                                       : kernels::serial::mixture_moments(gmm.view(), pts);
        const double ll = m.log_likelihood / static_cast<double>(N);
        if (!std::isfinite(ll))
            throw NumericalError("non-finite GMM log-likelihood at EM iteration " + std::to_string(iter));
        trace.push_back(ll);
        if (trace.size() >= 2) {
            const double prev = trace[trace.size() - 2];
            if ((ll - prev) / std::abs(prev) < opt.rel_tol)
                break;
        }
        if (iter == opt.max_iter)
            break;

        // M-step expressed through the whitened moments of the current model.
        for (std::size_t k = 0; k < K; ++k) {
            const double s0 = m.s0[k];
            weights[k] = std::max(s0 / static_cast<double>(N), std::numeric_limits<double>::min());
            if (!(s0 > 0.0))
                continue;
            for (std::size_t d = 0; d < D; ++d) {
                const std::size_t i = k * D + d;
                const double sd = std::sqrt(gmm.vars()[i]);
                const double e1 = m.s1[i] / s0;
                const double e2 = m.s2[i] / s0;
                means[i] = gmm.means()[i] + sd * e1;
                vars[i] = std::max(gmm.vars()[i] * std::max(e2 - e1 * e1, 0.0), floor[d]);
            }
        }
        normalize(weights);
        for (double v : means)
            if (!std::isfinite(v))
                throw NumericalError("non-finite GMM mean after M-step");
        gmm = GmmVocabulary(weights, means, vars, pool.standardizer);
    }
    gmm.log_likelihood_trace = std::move(trace);
    return gmm;
}

std::vector<double> posterior(const GmmVocabulary& gmm, std::span<const double> f)
{
    if (f.size() != gmm.dim())
        throw ArgumentError("posterior: point dimension " + std::to_string(f.size()) + " != " +
                            std::to_string(gmm.dim()));
    for (double x : f)
        if (!std::isfinite(x))
            throw ArgumentError("posterior: non-finite input");
    std::vector<double> gamma(gmm.K());
    kernels::posterior_into(gmm.view(), f, gamma);
    return gamma;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

constexpr int kVersion = 1;

json rows_of(const std::vector<double>& flat, std::size_t K, std::size_t D)
{
    json out = json::array();
    for (std::size_t k = 0; k < K; ++k)
        out.push_back(std::vector<double>(flat.begin() + static_cast<long>(k * D),
                                          flat.begin() + static_cast<long>((k + 1) * D)));
    return out;
}

std::vector<double> flat_of(const json& rows, std::size_t K, std::size_t D, const char* what)
{
    if (!rows.is_array() || rows.size() != K)
        throw FormatError(std::string(what) + ": expected " + std::to_string(K) + " rows");
    std::vector<double> out;
    out.reserve(K * D);
    for (const auto& r : rows) {
        const auto v = r.get<std::vector<double>>();
        if (v.size() != D)
            throw FormatError(std::string(what) + ": row length != D");
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

json standardizer_json(const Standardizer& s)
{
    return json{{"mean", s.mean}, {"std", s.std}};
}

Standardizer standardizer_from(const json& j, std::size_t D)
{
    Standardizer s{j.at("mean").get<std::vector<double>>(), j.at("std").get<std::vector<double>>()};
    if (s.mean.size() != D || s.std.size() != D)
        throw FormatError("standardizer dimension mismatch");
    return s;
}

json parse(std::string_view text)
{
    try {
        return json::parse(text);
    }
    catch (const json::exception& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
}

template <class F>
auto guarded(F&& f)
{
    try {
        return f();
    }
    catch (const json::exception& e) {
        throw FormatError(std::string("malformed vocabulary: ") + e.what());
    }
}

} // namespace

std::string to_json(const GmmVocabulary& gmm)
{
    json j;
    j["version"] = kVersion;
    j["kind"] = "gmm";
    j["K"] = gmm.K();
    j["D"] = gmm.dim();
    j["weights"] = gmm.weights();
    j["means"] = rows_of(gmm.means(), gmm.K(), gmm.dim());
    j["vars"] = rows_of(gmm.vars(), gmm.K(), gmm.dim());
    j["standardizer"] = standardizer_json(gmm.standardizer());
    return j.dump(1);
}

std::string to_json(const Codebook& cb)
{
    json j;
    j["version"] = kVersion;
    j["kind"] = "codebook";
    j["K"] = cb.K;
    j["D"] = cb.dim;
    j["centers"] = rows_of(cb.centers, cb.K, cb.dim);
    j["standardizer"] = standardizer_json(cb.standardizer);
    return j.dump(1);
}

std::string vocabulary_kind(std::string_view text)
{
    const json j = parse(text);
    return guarded([&] { return j.at("kind").get<std::string>(); });
}

GmmVocabulary gmm_from_json(std::string_view text)
{
    const json j = parse(text);
    return guarded([&] {
        if (j.at("kind") != "gmm")
            throw FormatError("vocabulary is not a GMM");
        const auto K = j.at("K").get<std::size_t>();
        const auto D = j.at("D").get<std::size_t>();
        return GmmVocabulary(j.at("weights").get<std::vector<double>>(), flat_of(j.at("means"), K, D, "means"),
                             flat_of(j.at("vars"), K, D, "vars"), standardizer_from(j.at("standardizer"), D));
    });
}

Codebook codebook_from_json(std::string_view text)
{
    const json j = parse(text);
    return guarded([&] {
        if (j.at("kind") != "codebook")
            throw FormatError("vocabulary is not a codebook");
        Codebook cb;
        cb.K = j.at("K").get<std::size_t>();
        cb.dim = j.at("D").get<std::size_t>();
        cb.centers = flat_of(j.at("centers"), cb.K, cb.dim, "centers");
        cb.standardizer = standardizer_from(j.at("standardizer"), cb.dim);
        return cb;
    });
}

} // namespace actseg
