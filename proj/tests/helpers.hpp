#pragma once

// Shared test utilities: finite-difference gradient checks and
// deterministic toy corpora.

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gloss/linalg.hpp"

namespace testutil {

// Central finite differences over a flat parameter block. Returns the
// worst relative error between numeric and analytic gradients.
inline double fd_max_rel_err(const std::function<double()>& loss_fn,
                             std::span<double> params,
                             std::span<const double> analytic,
                             double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double orig = params[i];
        params[i] = orig + h;
        const double lp = loss_fn();
        params[i] = orig - h;
        const double lm = loss_fn();
        params[i] = orig;
        const double numeric = (lp - lm) / (2.0 * h);
        const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
        worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
    }
    return worst;
}

inline gloss::Vector random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    gloss::Vector v(n);
    for (double& x : v) x = normal(rng);
    return v;
}

inline gloss::Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                   double scale = 1.0) {
    gloss::Matrix m(rows, cols);
    for (double& x : m.data) x = std::normal_distribution<double>(0.0, scale)(rng);
    return m;
}

// Random sentences over a synthetic vocabulary w000..w(n_words-1).
// Tokenization round-trips these exactly.
inline std::vector<std::string> toy_corpus(std::size_t n_sentences, std::size_t n_words,
                                           std::size_t len_min, std::size_t len_max,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len_dist(len_min, len_max);
    std::uniform_int_distribution<std::size_t> word_dist(0, n_words - 1);
    std::vector<std::string> corpus;
    corpus.reserve(n_sentences);
    for (std::size_t i = 0; i < n_sentences; ++i) {
        const std::size_t len = len_dist(rng);
        std::string s;
        for (std::size_t j = 0; j < len; ++j) {
            if (j) s += ' ';
            char buf[8];
            std::snprintf(buf, sizeof(buf), "w%03zu", word_dist(rng));
            s += buf;
        }
        corpus.push_back(std::move(s));
    }
    return corpus;
}

// Sentences with positional word classes: the vocabulary is split into
// n_classes groups and position l draws from group l, the way function
// words, subjects, and verbs occupy consistent slots in template text.
// A shared-decoder positional model can memorize such a corpus; fully
// random word order provably cannot be memorized by any additive
// sentence-plus-position logit model (order conflicts form cycles).
inline std::vector<std::string> positional_corpus(std::size_t n_sentences, std::size_t n_words,
                                                  std::size_t len_min, std::size_t len_max,
                                                  std::uint64_t seed) {
    const std::size_t n_classes = len_max;
    std::vector<std::vector<std::string>> classes(n_classes);
    for (std::size_t id = 0; id < n_words; ++id) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "w%03zu", id);
        classes[id % n_classes].push_back(buf);
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len_dist(len_min, len_max);
    std::vector<std::string> corpus;
    corpus.reserve(n_sentences);
    for (std::size_t i = 0; i < n_sentences; ++i) {
        const std::size_t len = len_dist(rng);
        std::string s;
        for (std::size_t l = 0; l < len; ++l) {
            if (l) s += ' ';
            s += classes[l][rng() % classes[l].size()];
        }
        corpus.push_back(std::move(s));
    }
    return corpus;
}

}  // namespace testutil
