#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

#include "gloss/linalg.hpp"

namespace gloss {

/// Euclidean-ball projection: rescale to norm r if outside B(r).
/// The inside-check carries a 1-ulp-scale relative slack so that
/// re-projecting an already-projected vector is an exact no-op.
inline void project_ball_inplace(std::span<double> z, double r) {
    if (r <= 0.0) throw std::invalid_argument("radius must be positive");
    const double n = l2_norm(z);
    if (n <= r * (1.0 + 1e-12)) return;
    const double s = r / n;
    for (double& x : z) x *= s;
}

inline Vector project_ball(Vector z, double r) {
    project_ball_inplace(z, r);
    return z;
}

// One d-dimensional free vector per training sentence, all inside B(r).
struct LatentStore {
    Matrix z;       // N x d
    double radius = 2.0;

    std::size_t count() const { return z.rows; }
    std::size_t dim() const { return z.cols; }
};

/// Draws a single latent: i.i.d. N(0, 1/d) per coordinate, then projected.
inline Vector sample_latent(std::size_t d, double r, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
    Vector z(d);
    for (double& x : z) x = normal(rng);
    project_ball_inplace(z, r);
    return z;
}

inline LatentStore init_latents(std::size_t n, std::size_t d, double r,
                                std::uint64_t seed) {
    if (n < 1 || d < 1) throw std::invalid_argument("latent store needs N >= 1, d >= 1");
    if (r <= 0.0) throw std::invalid_argument("radius must be positive");
    LatentStore store;
    store.radius = r;
    store.z = Matrix(n, d);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        Vector zi = sample_latent(d, r, rng);
        std::copy(zi.begin(), zi.end(), store.z.row(i).begin());
    }
    return store;
}

}  // namespace gloss
