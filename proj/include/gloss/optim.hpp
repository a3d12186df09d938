#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "gloss/decoder.hpp"
#include "gloss/linalg.hpp"

namespace gloss {

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

// Per-parameter-block Adam accumulators (flattened).
struct AdamState {
    Vector m;
    Vector v;
    std::uint64_t t = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update on a flat parameter block.
inline void adam_step(AdamState& state, std::span<double> param,
                      std::span<const double> grad, double lr) {
    if (param.size() != grad.size() || param.size() != state.m.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    if (lr <= 0.0) throw std::invalid_argument("adam_step: lr must be positive");
    ++state.t;
    const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        state.m[i] = kAdamBeta1 * state.m[i] + (1.0 - kAdamBeta1) * g;
        state.v[i] = kAdamBeta2 * state.v[i] + (1.0 - kAdamBeta2) * g * g;
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        param[i] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
    }
}

/// Global-norm clipping over a set of gradient blocks: if the joint L2
/// norm exceeds max_norm, every block is scaled by max_norm / norm.
inline void clip_global_norm(std::span<std::span<double>> blocks, double max_norm) {
    if (max_norm <= 0.0) throw std::invalid_argument("clip_global_norm: max_norm must be positive");
    double sq = 0.0;
    for (auto b : blocks) sq += squared_norm(b);
    const double norm = std::sqrt(sq);
    if (norm <= max_norm) return;
    const double s = max_norm / norm;
    for (auto b : blocks)
        for (double& x : b) x *= s;
}

inline void clip_vector_norm(std::span<double> v, double max_norm) {
    std::span<double> blocks[] = {v};
    clip_global_norm(blocks, max_norm);
}

/// Clips the decoder blocks (dW, db, dP) of a Gradients jointly.
/// dz is clipped separately, per latent row, by the trainer.
inline void clip_decoder_grads(Gradients& g, double max_norm) {
    std::vector<std::span<double>> blocks;
    blocks.emplace_back(g.dW.data);
    blocks.emplace_back(g.db);
    if (!g.dP.data.empty()) blocks.emplace_back(g.dP.data);
    clip_global_norm(blocks, max_norm);
}

}  // namespace gloss
