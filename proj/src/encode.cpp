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

#include "actseg/encode.hpp"

#include "actseg/error.hpp"

#include <cmath>

namespace actseg {

FisherVector fisher_from_moments(const GmmVocabulary& gmm, const kernels::MixtureMoments& m)
{
    if (m.count == 0)
        throw EmptyWindowError("cannot Fisher-encode an empty feature set");
    const std::size_t K = gmm.K(), D = gmm.dim();
    const double N = static_cast<double>(m.count);
    FisherVector fv;
    fv.values.resize(2 * K * D);
    for (std::size_t k = 0; k < K; ++k) {
        const double w = gmm.weights()[k];
        const double cmu = 1.0 / (N * std::sqrt(w));
        const double csig = 1.0 / (N * std::sqrt(2.0 * w));
        for (std::size_t d = 0; d < D; ++d) {
            const std::size_t i = k * D + d;
            fv.values[i] = cmu * m.s1[i];
            fv.values[K * D + i] = csig * (m.s2[i] - m.s0[k]);
        }
    }
    return fv;
}

FisherVector fisher_encode(const GmmVocabulary& gmm, kernels::PointsView standardized)
{
    if (standardized.size() == 0)
        throw EmptyWindowError("cannot Fisher-encode an empty feature set");
    if (standardized.dim != gmm.dim())
        throw ArgumentError("fisher_encode: feature dimension does not match the vocabulary");
    return fisher_from_moments(gmm, kernels::omp::mixture_moments(gmm.view(), standardized));
}

FisherVector fisher_encode(const GmmVocabulary& gmm, std::span<const FeatureVector> standardized)
{
    return fisher_encode(gmm, kernels::view_of(standardized));
}

FisherVector normalize_fv(const FisherVector& fv, double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ArgumentError("power normalization exponent must be in (0, 1]");
    FisherVector out;
    out.normalized = true;
    out.values.resize(fv.values.size());
    double ss = 0.0;
    for (std::size_t i = 0; i < fv.values.size(); ++i) {
        const double z = fv.values[i];
        const double p = std::pow(std::abs(z), alpha);
        out.values[i] = z < 0.0 ? -p : p;
        ss += out.values[i] * out.values[i];
    }
    if (ss > 0.0) {
        const double inv = 1.0 / std::sqrt(ss);
        for (auto& v : out.values)
            v *= inv;
    }
    return out;
}

BowHistogram bow_encode(const Codebook& codebook, kernels::PointsView standardized)
{
    const std::size_t N = standardized.size();
    if (N == 0)
        throw EmptyWindowError("cannot BoW-encode an empty feature set");
    if (standardized.dim != codebook.dim)
        throw ArgumentError("bow_encode: feature dimension does not match the codebook");
    std::vector<std::size_t> assign(N);
    kernels::omp::nearest_centers(standardized, codebook.view(), assign);
    BowHistogram h;
    h.values.assign(codebook.K, 0.0);
    for (std::size_t a : assign)
        h.values[a] += 1.0;
    for (auto& v : h.values)
        v /= static_cast<double>(N);
    return h;
}

BowHistogram bow_encode(const Codebook& codebook, std::span<const FeatureVector> standardized)
{
    return bow_encode(codebook, kernels::view_of(standardized));
}

std::string to_string(EncoderKind k)
{
    return k == EncoderKind::fisher ? "fv" : "bow";
}

EncoderKind encoder_kind_from_string(const std::string& s)
{
    if (s == "fv")
        return EncoderKind::fisher;
    if (s == "bow")
        return EncoderKind::bow;
    throw ArgumentError("unknown encoder '" + s + "' (expected fv or bow)");
}

void EncodingStats::add(const EncodingStats& o)
{
    if (o.count == 0)
        return;
    if (sums.size() != o.sums.size())
        throw ArgumentError("encoding statistics have different layouts");
    count += o.count;
    for (std::size_t i = 0; i < sums.size(); ++i)
        sums[i] += o.sums[i];
}

Encoder Encoder::fisher(GmmVocabulary gmm, bool normalize, double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ArgumentError("power normalization exponent must be in (0, 1]");
    Encoder e;
    e.kind_ = EncoderKind::fisher;
    e.normalize_ = normalize;
    e.alpha_ = alpha;
    e.vocab_ = std::move(gmm);
    return e;
}

Encoder Encoder::bow(Codebook codebook)
{
    Encoder e;
    e.kind_ = EncoderKind::bow;
    e.normalize_ = false;
    e.vocab_ = std::move(codebook);
    return e;
}

std::size_t Encoder::K() const noexcept
{
    return kind_ == EncoderKind::fisher ? std::get<GmmVocabulary>(vocab_).K() : std::get<Codebook>(vocab_).K;
}

std::size_t Encoder::output_dim() const noexcept
{
    if (kind_ == EncoderKind::fisher) {
        const auto& g = std::get<GmmVocabulary>(vocab_);
        return 2 * g.K() * g.dim();
    }
    return std::get<Codebook>(vocab_).K;
}

EncodingStats Encoder::empty_stats() const
{
    EncodingStats s;
    if (kind_ == EncoderKind::fisher) {
        const auto& g = gmm();
        s.sums.assign(g.K() * (1 + 2 * g.dim()), 0.0);
    }
    else {
        s.sums.assign(codebook().K, 0.0);
    }
    return s;
}

EncodingStats Encoder::stats(std::span<const FeatureVector> raw) const
{
    EncodingStats s = empty_stats();
    if (raw.empty())
        return s;
    if (kind_ == EncoderKind::fisher) {
        const auto& g = gmm();
        const auto std_feats = g.standardizer().apply(raw);
        const auto m = kernels::omp::mixture_moments(g.view(), kernels::view_of(std_feats));
        const std::size_t K = g.K(), KD = K * g.dim();
        std::copy(m.s0.begin(), m.s0.end(), s.sums.begin());
        std::copy(m.s1.begin(), m.s1.end(), s.sums.begin() + static_cast<long>(K));
        std::copy(m.s2.begin(), m.s2.end(), s.sums.begin() + static_cast<long>(K + KD));
        s.count = m.count;
    }
    else {
        const auto& cb = codebook();
        const auto std_feats = cb.standardizer.apply(raw);
        std::vector<std::size_t> assign(std_feats.size());
        kernels::omp::nearest_centers(kernels::view_of(std_feats), cb.view(), assign);
        for (std::size_t a : assign)
            s.sums[a] += 1.0;
        s.count = std_feats.size();
    }
    return s;
}

std::vector<double> Encoder::finalize(const EncodingStats& stats) const
{
    if (stats.count == 0)
        throw EmptyWindowError("window has no interesting pixels");
    if (kind_ == EncoderKind::fisher) {
        const auto& g = gmm();
        const std::size_t K = g.K(), KD = K * g.dim();
        kernels::MixtureMoments m(K, g.dim());
        std::copy(stats.sums.begin(), stats.sums.begin() + static_cast<long>(K), m.s0.begin());
        std::copy(stats.sums.begin() + static_cast<long>(K), stats.sums.begin() + static_cast<long>(K + KD),
                  m.s1.begin());
        std::copy(stats.sums.begin() + static_cast<long>(K + KD), stats.sums.end(), m.s2.begin());
        m.count = stats.count;
        FisherVector fv = fisher_from_moments(g, m);
        return normalize_ ? normalize_fv(fv, alpha_).values : std::move(fv.values);
    }
    std::vector<double> h = stats.sums;
    for (auto& v : h)
        v /= static_cast<double>(stats.count);
    return h;
}

} // namespace actseg
