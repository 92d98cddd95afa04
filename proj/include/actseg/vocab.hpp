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

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace actseg {

/// Per-dimension affine map to zero mean and unit variance.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std;

    static constexpr double kMinStd = 1e-6;

    std::size_t dim() const noexcept { return mean.size(); }
    static Standardizer identity(std::size_t dim);
    static Standardizer fit(kernels::PointsView points);

    void apply(std::span<const double> in, std::span<double> out) const;
    FeatureVector apply(const FeatureVector& f) const;
    std::vector<FeatureVector> apply(std::span<const FeatureVector> fs) const;

    friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

/// Standardized vectors pooled from all actions for vocabulary training.
struct TrainingPool {
    std::size_t dim = 0;
    std::vector<double> data; ///< row-major, standardized
    std::map<int, std::size_t> per_action_counts;
    Standardizer standardizer;

    std::size_t size() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
    kernels::PointsView view() const noexcept { return {data, dim}; }

    /// Wraps already-conditioned points with an identity standardizer.
    static TrainingPool from_points(std::vector<double> points, std::size_t dim);
};

/// Samples up to `cap` vectors per action without replacement, pools them and
/// standardizes the pool. Actions are visited in ascending label order.
TrainingPool build_pool(const std::map<int, std::vector<FeatureVector>>& features_by_action, std::size_t cap,
                        std::uint64_t seed);

struct Codebook {
    std::size_t K = 0;
    std::size_t dim = 0;
    std::vector<double> centers; ///< K*dim
    Standardizer standardizer;
    std::vector<double> inertia_trace; ///< per Lloyd iteration; not serialized

    kernels::PointsView view() const noexcept { return {centers, dim}; }
};

/// k-means++ seeding then Lloyd iterations until the assignment is stable or
/// 50 iterations. Empty clusters are moved to the point farthest from its center.
Codebook kmeans_fit(const TrainingPool& pool, std::size_t K, std::uint64_t seed);

/// Diagonal-covariance GMM over standardized features.
class GmmVocabulary {
public:
    GmmVocabulary() = default;
    GmmVocabulary(std::vector<double> weights, std::vector<double> means, std::vector<double> vars,
                  Standardizer standardizer);

    std::size_t K() const noexcept { return weights_.size(); }
    std::size_t dim() const noexcept { return standardizer_.dim(); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<double>& means() const noexcept { return means_; }
    const std::vector<double>& vars() const noexcept { return vars_; }
    const Standardizer& standardizer() const noexcept { return standardizer_; }

    std::span<const double> mean(std::size_t k) const { return std::span(means_).subspan(k * dim(), dim()); }
    std::span<const double> var(std::size_t k) const { return std::span(vars_).subspan(k * dim(), dim()); }

    kernels::MixtureView view() const noexcept;

    /// Average log-likelihood of the pool at each EM iteration, starting
    /// from the k-means initialization. Empty for loaded models.
    std::vector<double> log_likelihood_trace;

    friend bool operator==(const GmmVocabulary& a, const GmmVocabulary& b)
    {
        return a.weights_ == b.weights_ && a.means_ == b.means_ && a.vars_ == b.vars_ &&
               a.standardizer_ == b.standardizer_;
    }

private:
    std::vector<double> weights_, means_, vars_;
    Standardizer standardizer_;
    std::vector<double> log_weights_, inv_sd_, log_norm_;
};

struct GmmFitOptions {
    int max_iter = 100;
    double rel_tol = 1e-5;
    double var_floor_ratio = 1e-3;
    bool parallel = true;
};

/// EM fit initialized from kmeans_fit. Requires at least 10*K pooled points.
GmmVocabulary gmm_fit(const TrainingPool& pool, std::size_t K, std::uint64_t seed, const GmmFitOptions& opt = {});

/// Component posteriors of a standardized point.
std::vector<double> posterior(const GmmVocabulary& gmm, std::span<const double> f);

std::string to_json(const GmmVocabulary& gmm);
std::string to_json(const Codebook& codebook);
GmmVocabulary gmm_from_json(std::string_view text);
Codebook codebook_from_json(std::string_view text);
/// "gmm" or "codebook".
std::string vocabulary_kind(std::string_view text);

} // namespace actseg
