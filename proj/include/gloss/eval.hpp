#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gloss/linalg.hpp"
#include "gloss/trainer.hpp"

namespace gloss {

inline double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero-norm input");
    return dot(a, b) / (na * nb);
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson: constant sequence");
    return sxy / std::sqrt(sxx * syy);
}

struct StsPair {
    std::string sent_a;
    std::string sent_b;
    double gold = 0.0;
};

/// TSV with three fields per line: sent_a, sent_b, gold score.
inline std::vector<StsPair> parse_sts_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pairs file: " + path);
    std::vector<StsPair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos)
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": expected 3 tab-separated fields");
        StsPair p;
        p.sent_a = line.substr(0, t1);
        p.sent_b = line.substr(t1 + 1, t2 - t1 - 1);
        const std::string score = line.substr(t2 + 1);
        try {
            std::size_t consumed = 0;
            p.gold = std::stod(score, &consumed);
            if (consumed != score.size()) throw std::invalid_argument(score);
        } catch (const std::exception&) {
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": unparseable score '" + score + "'");
        }
        if (p.sent_a.empty() || p.sent_b.empty())
            throw std::runtime_error("line " + std::to_string(lineno) + ": empty sentence");
        pairs.push_back(std::move(p));
    }
    return pairs;
}

/// Embeds both sides of each pair by inference-by-optimization, scores
/// with cosine, and returns Pearson correlation against gold, x100.
inline double eval_sts(const Model& m, const std::vector<StsPair>& pairs,
                       const InferOptions& opts = {}) {
    if (pairs.size() < 2) throw std::invalid_argument("need at least 2 pairs");
    std::vector<double> scores, golds;
    scores.reserve(pairs.size());
    golds.reserve(pairs.size());
    for (const auto& p : pairs) {
        Vector za = infer_latent(m, p.sent_a, opts);
        Vector zb = infer_latent(m, p.sent_b, opts);
        scores.push_back(cosine(za, zb));
        golds.push_back(p.gold);
    }
    return 100.0 * pearson(scores, golds);
}

struct ProbeDataset {
    Matrix embeddings;                // N x d
    std::vector<std::uint32_t> labels;  // values in 0..classes-1
    std::size_t classes = 0;
};

struct ProbeWeights {
    Matrix W;  // C x d
    Vector b;  // C
};

inline Vector probe_logits(const ProbeWeights& w, std::span<const double> x) {
    Vector logits = matvec(w.W, x);
    for (std::size_t c = 0; c < logits.size(); ++c) logits[c] += w.b[c];
    return logits;
}

namespace detail {

// Mean cross-entropy + (l2/2)*||W||^2, with analytic gradients.
inline double probe_loss_grads(const ProbeWeights& w, const ProbeDataset& data, double l2,
                               Matrix* dW, Vector* db) {
    const std::size_t n = data.embeddings.rows;
    if (dW) dW->fill(0.0);
    if (db) db->assign(db->size(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto x = data.embeddings.row(i);
        Vector q = probe_logits(w, x);
        const double mx = *std::max_element(q.begin(), q.end());
        double sum = 0.0;
        for (double& v : q) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (double& v : q) v /= sum;
        loss -= std::log(std::max(q[data.labels[i]], kProbFloor));
        if (dW || db) {
            q[data.labels[i]] -= 1.0;
            if (dW) outer_add(*dW, q, x, 1.0 / static_cast<double>(n));
            if (db)
                for (std::size_t c = 0; c < q.size(); ++c)
                    (*db)[c] += q[c] / static_cast<double>(n);
        }
    }
    loss /= static_cast<double>(n);
    loss += 0.5 * l2 * squared_norm(w.W.data);
    if (dW) axpy(l2, w.W.data, dW->data);
    return loss;
}

}  // namespace detail

/// Multinomial logistic regression, full-batch gradient descent from
/// zero init. Deterministic.
inline ProbeWeights probe_train(const ProbeDataset& data, double l2 = 1e-3,
                                std::size_t steps = 1000, double lr = 0.1) {
    if (data.classes < 2) throw std::invalid_argument("probe needs at least 2 classes");
    if (data.embeddings.rows != data.labels.size())
        throw std::invalid_argument("probe: embeddings/labels length mismatch");
    if (l2 < 0.0) throw std::invalid_argument("probe: l2 must be non-negative");
    std::vector<bool> seen(data.classes, false);
    for (std::uint32_t y : data.labels) {
        if (y >= data.classes) throw std::invalid_argument("probe: label out of range");
        seen[y] = true;
    }
    if (std::count(seen.begin(), seen.end(), true) < 2)
        throw std::invalid_argument("probe: training data covers a single class");

    const std::size_t d = data.embeddings.cols;
    ProbeWeights w{Matrix(data.classes, d), Vector(data.classes, 0.0)};
    Matrix dW(data.classes, d);
    Vector db(data.classes, 0.0);
    for (std::size_t s = 0; s < steps; ++s) {
        detail::probe_loss_grads(w, data, l2, &dW, &db);
        axpy(-lr, dW.data, w.W.data);
        axpy(-lr, db, w.b);
    }
    return w;
}

/// Argmax accuracy; ties break toward the lowest class index.
inline double probe_eval(const ProbeWeights& w, const ProbeDataset& data) {
    if (w.W.cols != data.embeddings.cols)
        throw std::invalid_argument("probe_eval: dimension mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.embeddings.rows; ++i) {
        Vector logits = probe_logits(w, data.embeddings.row(i));
        std::size_t best = 0;
        for (std::size_t c = 1; c < logits.size(); ++c)
            if (logits[c] > logits[best]) best = c;
        if (best == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.embeddings.rows);
}

/// TSV with two fields per line: integer label, sentence.
inline std::pair<std::vector<std::uint32_t>, std::vector<std::string>> parse_probe_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open probe file: " + path);
    std::vector<std::uint32_t> labels;
    std::vector<std::string> sentences;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": expected label<TAB>sentence");
        const std::string label = line.substr(0, tab);
        try {
            labels.push_back(static_cast<std::uint32_t>(std::stoul(label)));
        } catch (const std::exception&) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": bad label '" +
                                     label + "'");
        }
        sentences.push_back(line.substr(tab + 1));
    }
    return {std::move(labels), std::move(sentences)};
}

}  // namespace gloss
