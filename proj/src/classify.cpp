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

#include "actseg/classify.hpp"

#include "actseg/error.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

using json = nlohmann::ordered_json;

namespace actseg {

namespace {

void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng)
{
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
        std::swap(idx[i], idx[j]);
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

// Binary L1-loss SVM dual:  min 0.5 a'Qa - e'a,  0 <= a_i <= C,
// Q_ij = y_i y_j (x_i'x_j + 1). Writes w (dim) and bias.
void solve_binary(std::span<const std::vector<double>> x, std::span<const signed char> y, const SvmOptions& opt,
                  std::uint64_t seed, std::span<double> w, double& bias, std::vector<double>* objective)
{
    const std::size_t n = x.size();
    std::vector<double> alpha(n, 0.0), qd(n);
    for (std::size_t i = 0; i < n; ++i)
        qd[i] = dot(x[i], x[i]) + 1.0;
    std::fill(w.begin(), w.end(), 0.0);
    bias = 0.0;

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < opt.epochs; ++epoch) {
        shuffle_indices(order, rng);
        double pg_max = -std::numeric_limits<double>::infinity();
        double pg_min = std::numeric_limits<double>::infinity();
        for (std::size_t i : order) {
            const double yi = y[i];
            const double g = yi * (dot(w, x[i]) + bias) - 1.0;
            double pg = g;
            if (alpha[i] == 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[i] == opt.C)
                pg = std::max(g, 0.0);
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);
            if (std::abs(pg) > 1e-12) {
                const double old = alpha[i];
                alpha[i] = std::clamp(old - g / qd[i], 0.0, opt.C);
                const double delta = (alpha[i] - old) * yi;
                for (std::size_t d = 0; d < w.size(); ++d)
                    w[d] += delta * x[i][d];
                bias += delta;
            }
        }
        if (objective) {
            const double asum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
            objective->push_back(0.5 * (dot(w, w) + bias * bias) - asum);
        }
        if (pg_max - pg_min <= opt.tol)
            break;
    }
}

double log_sigmoid_neg(double f)
{
    // log(1 / (1 + exp(f))) without overflow
    return f >= 0.0 ? -f - std::log1p(std::exp(-f)) : -std::log1p(std::exp(f));
}

// Platt's method in the form of Lin, Lin and Weng (2007).
void sigmoid_train(std::span<const double> dec, std::span<const char> positive, double& A, double& B, int max_iter)
{
    const std::size_t l = dec.size();
    double prior1 = 0, prior0 = 0;
    for (std::size_t i = 0; i < l; ++i)
        (positive[i] ? prior1 : prior0) += 1.0;

    constexpr double kMinStep = 1e-10;
    constexpr double kSigma = 1e-12;
    constexpr double kEps = 1e-5;
    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    std::vector<double> t(l);
    for (std::size_t i = 0; i < l; ++i)
        t[i] = positive[i] ? hi : lo;

    auto objective = [&](double a, double b) {
        double f = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            const double z = dec[i] * a + b;
            f += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
        }
        return f;
    };

    A = 0.0;
    B = std::log((prior0 + 1.0) / (prior1 + 1.0));
    double fval = objective(A, B);
    for (int iter = 0; iter < max_iter; ++iter) {
        double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            const double z = dec[i] * A + B;
            double p, q;
            if (z >= 0.0) {
                p = std::exp(-z) / (1.0 + std::exp(-z));
                q = 1.0 / (1.0 + std::exp(-z));
            }
            else {
                p = 1.0 / (1.0 + std::exp(z));
                q = std::exp(z) / (1.0 + std::exp(z));
            }
            const double d2 = p * q;
            h11 += dec[i] * dec[i] * d2;
            h22 += d2;
            h21 += dec[i] * d2;
            const double d1 = t[i] - p;
            g1 += dec[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < kEps && std::abs(g2) < kEps)
            break;

        const double det = h11 * h22 - h21 * h21;
        const double dA = -(h22 * g1 - h21 * g2) / det;
        const double dB = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * dA + g2 * dB;

        double step = 1.0;
        while (step >= kMinStep) {
            const double na = A + step * dA, nb = B + step * dB;
            const double nf = objective(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                A = na;
                B = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if (step < kMinStep)
            break;
    }
}

void check_samples(std::span<const std::vector<double>> samples, std::span<const int> labels, std::size_t A)
{
    if (samples.empty())
        throw ArgumentError("no training samples");
    if (samples.size() != labels.size())
        throw ArgumentError("sample and label counts differ");
    const std::size_t dim = samples.front().size();
    std::set<int> present;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].size() != dim)
            throw ArgumentError("training vectors differ in dimension");
        if (labels[i] < 1 || static_cast<std::size_t>(labels[i]) > A)
            throw ArgumentError("label " + std::to_string(labels[i]) + " outside [1, A]");
        present.insert(labels[i]);
    }
    if (present.size() < 2)
        throw ArgumentError("SVM training needs at least two classes");
}

} // namespace

LinearSvmModel svm_train(std::span<const std::vector<double>> samples, std::span<const int> labels, std::size_t A,
                         const SvmOptions& opt, SvmTrainTrace* trace)
{
    check_samples(samples, labels, A);
    if (!(opt.C > 0.0) || opt.epochs < 1)
        throw ArgumentError("SVM needs C > 0 and at least one epoch");

    LinearSvmModel m;
    m.A = A;
    m.dim = samples.front().size();
    m.weights.assign(A * m.dim, 0.0);
    m.biases.assign(A, 0.0);
    std::vector<std::vector<double>> objectives(A);

#pragma omp parallel for schedule(dynamic, 1)
    for (long li = 0; li < static_cast<long>(A); ++li) {
        const auto l = static_cast<std::size_t>(li);
        std::vector<signed char> y(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
            y[i] = labels[i] == static_cast<int>(l + 1) ? 1 : -1;
        solve_binary(samples, y, opt, opt.seed * 1000003ULL + l,
                     std::span(m.weights).subspan(l * m.dim, m.dim), m.biases[l],
                     trace ? &objectives[l] : nullptr);
    }
    if (trace)
        trace->dual_objective = std::move(objectives);
    return m;
}

std::vector<double> svm_scores(const LinearSvmModel& model, std::span<const double> x)
{
    if (x.size() != model.dim)
        throw ArgumentError("svm_scores: input dimension " + std::to_string(x.size()) + " != model dimension " +
                            std::to_string(model.dim));
    std::vector<double> s(model.A);
    for (std::size_t l = 0; l < model.A; ++l)
        s[l] = dot(model.weight(l), x) + model.biases[l];
    return s;
}

std::vector<std::vector<double>> cross_scores(std::span<const std::vector<double>> samples,
                                              std::span<const int> labels, std::size_t A, const SvmOptions& opt,
                                              std::size_t folds, std::span<const int> groups)
{
    check_samples(samples, labels, A);
    if (folds < 2)
        throw ArgumentError("cross-scoring needs at least two folds");
    const std::size_t n = samples.size();
    std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> fold(n);

    if (!groups.empty()) {
        if (groups.size() != n)
            throw ArgumentError("group ids must match the samples");
        std::vector<int> ids(groups.begin(), groups.end());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        std::vector<std::size_t> order(ids.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        shuffle_indices(order, rng);
        std::map<int, std::size_t> fold_of;
        for (std::size_t r = 0; r < order.size(); ++r)
            fold_of[ids[order[r]]] = r % folds;
        for (std::size_t i = 0; i < n; ++i)
            fold[i] = fold_of[groups[i]];
    }
    else {
        // Stratified: deal each class's shuffled samples round-robin.
        for (std::size_t l = 1; l <= A; ++l) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i)
                if (labels[i] == static_cast<int>(l))
                    members.push_back(i);
            shuffle_indices(members, rng);
            for (std::size_t r = 0; r < members.size(); ++r)
                fold[members[r]] = r % folds;
        }
    }

    std::vector<std::vector<double>> out(n);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::vector<double>> train_x;
        std::vector<int> train_y;
        std::vector<std::size_t> held;
        for (std::size_t i = 0; i < n; ++i) {
            if (fold[i] == f) {
                held.push_back(i);
            }
            else {
                train_x.push_back(samples[i]);
                train_y.push_back(labels[i]);
            }
        }
        if (held.empty())
            continue;
        const LinearSvmModel m = svm_train(train_x, train_y, A, opt);
        for (std::size_t i : held)
            out[i] = svm_scores(m, samples[i]);
    }
    return out;
}

PlattParams platt_fit(std::span<const std::vector<double>> scores, std::span<const int> labels, std::size_t A,
                      int max_iter)
{
    if (scores.size() != labels.size())
        throw ArgumentError("platt_fit: score and label counts differ");
    for (std::size_t l = 1; l <= A; ++l) {
        const auto cnt = std::count(labels.begin(), labels.end(), static_cast<int>(l));
        if (cnt < 10)
            throw InsufficientDataError("Platt scaling needs at least 10 samples of class " + std::to_string(l) +
                                        ", got " + std::to_string(cnt));
    }
    PlattParams p;
    p.a.resize(A);
    p.b.resize(A);
    std::vector<double> dec(scores.size());
    std::vector<char> pos(scores.size());
    for (std::size_t l = 0; l < A; ++l) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (scores[i].size() != A)
                throw ArgumentError("platt_fit: score vector has wrong length");
            dec[i] = scores[i][l];
            pos[i] = labels[i] == static_cast<int>(l + 1);
        }
        sigmoid_train(dec, pos, p.a[l], p.b[l], max_iter);
    }
    return p;
}

ProbVector proba_from_scores(const PlattParams& platt, std::span<const double> scores)
{
    const std::size_t A = scores.size();
    if (platt.a.size() != A || platt.b.size() != A)
        throw ArgumentError("Platt parameters do not match the class count");
    ProbVector logp(A);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < A; ++l) {
        logp[l] = log_sigmoid_neg(platt.a[l] * scores[l] + platt.b[l]);
        best = std::max(best, logp[l]);
    }
    double sum = 0.0;
    for (auto& v : logp) {
        v = std::exp(v - best);
        sum += v;
    }
    for (auto& v : logp)
        v /= sum;
    return logp;
}

ProbVector predict_proba(const LinearSvmModel& model, const PlattParams& platt, std::span<const double> x)
{
    return proba_from_scores(platt, svm_scores(model, x));
}

Classifier train_classifier(std::span<const std::vector<double>> samples, std::span<const int> labels,
                            std::vector<std::string> class_names, const SvmOptions& opt, std::span<const int> groups)
{
    const std::size_t A = class_names.size();
    const auto held_out = cross_scores(samples, labels, A, opt, 3, groups);
    Classifier c;
    c.platt = platt_fit(held_out, labels, A);
    c.model = svm_train(samples, labels, A, opt);
    c.class_names = std::move(class_names);
    return c;
}

std::string to_json(const Classifier& c)
{
    json j;
    j["version"] = 1;
    j["A"] = c.model.A;
    j["dim"] = c.model.dim;
    j["class_names"] = c.class_names;
    json w = json::array();
    for (std::size_t l = 0; l < c.model.A; ++l) {
        const auto row = c.model.weight(l);
        w.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["weights"] = std::move(w);
    j["biases"] = c.model.biases;
    j["platt_a"] = c.platt.a;
    j["platt_b"] = c.platt.b;
    j["vocab_ref"] = c.vocab_ref;
    j["fv_norm"] = c.fv_norm;
    return j.dump(1);
}

Classifier classifier_from_json(std::string_view text)
{
    try {
        const json j = json::parse(text);
        Classifier c;
        c.model.A = j.at("A").get<std::size_t>();
        c.model.dim = j.at("dim").get<std::size_t>();
        c.class_names = j.at("class_names").get<std::vector<std::string>>();
        for (const auto& row : j.at("weights")) {
            const auto r = row.get<std::vector<double>>();
            if (r.size() != c.model.dim)
                throw FormatError("model weight row has wrong length");
            c.model.weights.insert(c.model.weights.end(), r.begin(), r.end());
        }
        c.model.biases = j.at("biases").get<std::vector<double>>();
        c.platt.a = j.at("platt_a").get<std::vector<double>>();
        c.platt.b = j.at("platt_b").get<std::vector<double>>();
        c.vocab_ref = j.at("vocab_ref").get<std::string>();
        c.fv_norm = j.value("fv_norm", true);
        const std::size_t A = c.model.A;
        if (c.model.weights.size() != A * c.model.dim || c.model.biases.size() != A || c.platt.a.size() != A ||
            c.platt.b.size() != A || c.class_names.size() != A)
            throw FormatError("model arrays disagree with A");
        return c;
    }
    catch (const json::exception& e) {
        throw FormatError(std::string("malformed model: ") + e.what());
    }
}

} // namespace actseg
