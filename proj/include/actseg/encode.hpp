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

#include "actseg/kernels.hpp"
#include "actseg/vocab.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace actseg {

/// Fisher vector laid out as [G_mu_1 .. G_mu_K, G_sigma_1 .. G_sigma_K],
/// each block D wide, 2*D*K values in total.
struct FisherVector {
    std::vector<double> values;
    bool normalized = false;
};

struct BowHistogram {
    std::vector<double> values;
};

/// Fisher vector of standardized points (no normalization).
FisherVector fisher_encode(const GmmVocabulary& gmm, kernels::PointsView standardized);
FisherVector fisher_encode(const GmmVocabulary& gmm, std::span<const FeatureVector> standardized);

/// Fisher vector from posterior moments accumulated over N points.
FisherVector fisher_from_moments(const GmmVocabulary& gmm, const kernels::MixtureMoments& m);

/// Signed power normalization followed by L2 normalization. alpha in (0, 1].
FisherVector normalize_fv(const FisherVector& fv, double alpha = 0.5);

/// Hard-assignment histogram divided by N. Ties go to the lowest center index.
BowHistogram bow_encode(const Codebook& codebook, kernels::PointsView standardized);
BowHistogram bow_encode(const Codebook& codebook, std::span<const FeatureVector> standardized);

enum class EncoderKind { fisher, bow };

std::string to_string(EncoderKind k);
EncoderKind encoder_kind_from_string(const std::string& s);

/// Additive sufficient statistics of a feature set under an encoder. Window
/// statistics are the sum of the statistics of its frames.
struct EncodingStats {
    std::size_t count = 0;
    std::vector<double> sums;

    void add(const EncodingStats& o);
};

/// Window encoder over raw (unstandardized) features: a GMM with optional
/// normalization, or a BoW codebook.
class Encoder {
public:
    static Encoder fisher(GmmVocabulary gmm, bool normalize = true, double alpha = 0.5);
    static Encoder bow(Codebook codebook);

    EncoderKind kind() const noexcept { return kind_; }
    std::size_t K() const noexcept;
    std::size_t output_dim() const noexcept;
    bool normalizes() const noexcept { return normalize_; }

    const GmmVocabulary& gmm() const { return std::get<GmmVocabulary>(vocab_); }
    const Codebook& codebook() const { return std::get<Codebook>(vocab_); }

    EncodingStats stats(std::span<const FeatureVector> raw) const;
    EncodingStats empty_stats() const;
    /// Throws EmptyWindowError when stats.count == 0.
    std::vector<double> finalize(const EncodingStats& stats) const;
    std::vector<double> encode(std::span<const FeatureVector> raw) const { return finalize(stats(raw)); }

private:
    EncoderKind kind_ = EncoderKind::fisher;
    bool normalize_ = true;
    double alpha_ = 0.5;
    std::variant<GmmVocabulary, Codebook> vocab_;
};

} // namespace actseg
