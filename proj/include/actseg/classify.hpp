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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace actseg {

/// A one-vs-rest family of linear classifiers, score_l = <w_l, x> + b_l.
struct LinearSvmModel {
    std::size_t A = 0;
    std::size_t dim = 0;
    std::vector<double> weights; ///< A*dim, row l is class l+1
    std::vector<double> biases;  ///< A

    std::span<const double> weight(std::size_t l) const { return std::span(weights).subspan(l * dim, dim); }

    friend bool operator==(const LinearSvmModel&, const LinearSvmModel&) = default;
};

/// Per-class sigmoid P(class l | s) = 1 / (1 + exp(a_l * s + b_l)).
struct PlattParams {
    std::vector<double> a;
    std::vector<double> b;

    friend bool operator==(const PlattParams&, const PlattParams&) = default;
};

using ProbVector = std::vector<double>;

struct SvmOptions {
    double C = 1.0;
    int epochs = 50;
    double tol = 1e-4; ///< stop when the projected-gradient spread falls below this
    std::uint64_t seed = 42;
};

/// Dual objective 0.5*|w|^2 - sum(alpha) of each binary problem after each
/// epoch; index [l][epoch].
struct SvmTrainTrace {
    std::vector<std::vector<double>> dual_objective;
};

/// One-vs-rest L2-regularized hinge-loss classifiers by dual coordinate
/// descent. The bias is learned as the weight of a constant-1 feature.
/// Labels are 1-based class ids in [1, A].
LinearSvmModel svm_train(std::span<const std::vector<double>> samples, std::span<const int> labels, std::size_t A,
                         const SvmOptions& opt = {}, SvmTrainTrace* trace = nullptr);

std::vector<double> svm_scores(const LinearSvmModel& model, std::span<const double> x);

/// Scores of each sample from a model trained on the other folds. When
/// `groups` is given, samples sharing a group id are kept in the same fold.
std::vector<std::vector<double>> cross_scores(std::span<const std::vector<double>> samples,
                                              std::span<const int> labels, std::size_t A, const SvmOptions& opt,
                                              std::size_t folds = 3, std::span<const int> groups = {});

/// Fits one sigmoid per class on (score_l, label == l) with Platt's
/// prior-corrected targets and a Newton method with backtracking.
PlattParams platt_fit(std::span<const std::vector<double>> scores, std::span<const int> labels, std::size_t A,
                      int max_iter = 100);

/// Per-class sigmoid probabilities renormalized to sum to one.
ProbVector predict_proba(const LinearSvmModel& model, const PlattParams& platt, std::span<const double> x);
/// Same, from precomputed raw scores.
ProbVector proba_from_scores(const PlattParams& platt, std::span<const double> scores);

/// A trained classifier with its class names and the vocabulary it expects.
struct Classifier {
    LinearSvmModel model;
    PlattParams platt;
    std::vector<std::string> class_names;
    std::string vocab_ref;
    bool fv_norm = true;

    friend bool operator==(const Classifier&, const Classifier&) = default;
};

/// Cross-scored Platt calibration followed by a final fit on all samples.
Classifier train_classifier(std::span<const std::vector<double>> samples, std::span<const int> labels,
                            std::vector<std::string> class_names, const SvmOptions& opt,
                            std::span<const int> groups = {});

std::string to_json(const Classifier& c);
Classifier classifier_from_json(std::string_view text);

} // namespace actseg
