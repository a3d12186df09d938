#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gloss/linalg.hpp"

namespace gloss {

inline constexpr double kProbFloor = 1e-12;

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Word-presence decoder: o = sigmoid(W z + b).
struct BowDecoder {
    Matrix W;  // V x d
    Vector b;  // V

    std::size_t vocab_size() const { return W.rows; }
    std::size_t dim() const { return W.cols; }
};

// Order-aware decoder: per position l, softmax(W (z + p^l) + b).
// W and b are shared across positions; only P is position-specific.
struct PosDecoder {
    Matrix W;  // V x d
    Vector b;  // V
    Matrix P;  // L_max x d, row l = position embedding p^l

    std::size_t vocab_size() const { return W.rows; }
    std::size_t dim() const { return W.cols; }
    std::size_t max_len() const { return P.rows; }
};

struct Gradients {
    Matrix dW;  // V x d
    Vector db;  // V
    Matrix dP;  // L_max x d (positional only; empty for BoW)
    Vector dz;  // d

    void add(const Gradients& other) {
        for (std::size_t i = 0; i < dW.data.size(); ++i) dW.data[i] += other.dW.data[i];
        for (std::size_t i = 0; i < db.size(); ++i) db[i] += other.db[i];
        for (std::size_t i = 0; i < dP.data.size(); ++i) dP.data[i] += other.dP.data[i];
    }

    void scale_decoder_blocks(double s) {
        for (double& x : dW.data) x *= s;
        for (double& x : db) x *= s;
        for (double& x : dP.data) x *= s;
    }
};

inline Gradients make_gradients(std::size_t v, std::size_t d, std::size_t l_max = 0) {
    Gradients g;
    g.dW = Matrix(v, d);
    g.db.assign(v, 0.0);
    if (l_max > 0) g.dP = Matrix(l_max, d);
    g.dz.assign(d, 0.0);
    return g;
}

inline Vector bow_forward(const BowDecoder& dec, std::span<const double> z) {
    if (dec.W.cols != z.size() || dec.b.size() != dec.W.rows)
        throw std::invalid_argument("bow_forward: shape mismatch");
    Vector o = matvec(dec.W, z);
    for (std::size_t j = 0; j < o.size(); ++j) o[j] = sigmoid(o[j] + dec.b[j]);
    return o;
}

/// Summed binary cross-entropy against a multi-hot target given as a
/// sorted id set. Probabilities are floored at 1e-12 inside the logs.
inline double bow_loss(std::span<const double> o, std::span<const std::uint32_t> word_set) {
    double loss = 0.0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < o.size(); ++j) {
        const bool target = k < word_set.size() && word_set[k] == j;
        if (target) {
            loss -= std::log(std::max(o[j], kProbFloor));
            ++k;
        } else {
            loss -= std::log(std::max(1.0 - o[j], kProbFloor));
        }
    }
    return loss;
}

// e = o - t; dW = e z^T, db = e, dz = W^T e.
inline std::pair<double, Gradients> bow_grads(const BowDecoder& dec,
                                              std::span<const double> z,
                                              std::span<const std::uint32_t> word_set) {
    Vector o = bow_forward(dec, z);
    const double loss = bow_loss(o, word_set);

    Vector e = o;
    for (std::uint32_t j : word_set) {
        if (j >= e.size()) throw std::invalid_argument("bow_grads: target id out of range");
        e[j] -= 1.0;
    }

    Gradients g = make_gradients(dec.vocab_size(), dec.dim());
    outer_add(g.dW, e, z);
    g.db = e;
    matvec_transpose_add(dec.W, e, g.dz);
    return {loss, std::move(g)};
}

/// Loss and latent gradient only; used by inference where the decoder is frozen.
inline std::pair<double, Vector> bow_latent_grad(const BowDecoder& dec,
                                                 std::span<const double> z,
                                                 std::span<const std::uint32_t> word_set) {
    Vector o = bow_forward(dec, z);
    const double loss = bow_loss(o, word_set);
    Vector e = std::move(o);
    for (std::uint32_t j : word_set) e[j] -= 1.0;
    Vector dz(z.size(), 0.0);
    matvec_transpose_add(dec.W, e, dz);
    return {loss, std::move(dz)};
}

inline Vector pos_forward(const PosDecoder& dec, std::span<const double> z, std::size_t l) {
    if (l >= dec.max_len()) throw std::invalid_argument("pos_forward: position out of range");
    if (dec.W.cols != z.size()) throw std::invalid_argument("pos_forward: shape mismatch");
    Vector shifted(z.begin(), z.end());
    axpy(1.0, dec.P.row(l), shifted);
    Vector logits = matvec(dec.W, shifted);
    for (std::size_t j = 0; j < logits.size(); ++j) logits[j] += dec.b[j];

    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& x : logits) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : logits) x /= sum;
    return logits;
}

/// Summed per-position cross-entropy over `ids` with analytic gradients.
/// Positions beyond ids.size() leave their dP rows at zero.
inline std::pair<double, Gradients> pos_grads(const PosDecoder& dec,
                                              std::span<const double> z,
                                              std::span<const std::uint32_t> ids) {
    if (ids.size() > dec.max_len()) throw std::invalid_argument("pos_grads: sentence too long");
    Gradients g = make_gradients(dec.vocab_size(), dec.dim(), dec.max_len());
    double loss = 0.0;
    Vector shifted(dec.dim());
    for (std::size_t l = 0; l < ids.size(); ++l) {
        if (ids[l] >= dec.vocab_size())
            throw std::invalid_argument("pos_grads: token id out of range");
        Vector e = pos_forward(dec, z, l);
        loss -= std::log(std::max(e[ids[l]], kProbFloor));
        e[ids[l]] -= 1.0;  // softmax - onehot

        std::copy(z.begin(), z.end(), shifted.begin());
        axpy(1.0, dec.P.row(l), shifted);
        outer_add(g.dW, e, shifted);
        for (std::size_t j = 0; j < e.size(); ++j) g.db[j] += e[j];

        Vector wte(dec.dim(), 0.0);
        matvec_transpose_add(dec.W, e, wte);
        std::copy(wte.begin(), wte.end(), g.dP.row(l).begin());
        axpy(1.0, wte, g.dz);
    }
    return {loss, std::move(g)};
}

inline std::pair<double, Vector> pos_latent_grad(const PosDecoder& dec,
                                                 std::span<const double> z,
                                                 std::span<const std::uint32_t> ids) {
    if (ids.size() > dec.max_len()) throw std::invalid_argument("pos_latent_grad: sentence too long");
    double loss = 0.0;
    Vector dz(z.size(), 0.0);
    for (std::size_t l = 0; l < ids.size(); ++l) {
        Vector e = pos_forward(dec, z, l);
        loss -= std::log(std::max(e[ids[l]], kProbFloor));
        e[ids[l]] -= 1.0;
        matvec_transpose_add(dec.W, e, dz);
    }
    return {loss, std::move(dz)};
}

}  // namespace gloss
