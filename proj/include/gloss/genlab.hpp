#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gloss/eval.hpp"
#include "gloss/latent.hpp"
#include "gloss/trainer.hpp"

namespace gloss {

/// Greedy per-position argmax decode from a latent. Positional models
/// only; ties break toward the lowest token id.
inline std::vector<std::string> greedy_decode(const Model& m, std::span<const double> z,
                                              std::size_t length) {
    if (m.kind() != ModelKind::pos)
        throw std::invalid_argument("generation requires positional model");
    if (length < 1 || length > m.pos().max_len())
        throw std::invalid_argument("greedy_decode: length out of range");
    std::vector<std::string> out;
    out.reserve(length);
    for (std::size_t l = 0; l < length; ++l) {
        Vector q = pos_forward(m.pos(), z, l);
        std::size_t best = 0;
        for (std::size_t j = 1; j < q.size(); ++j)
            if (q[j] > q[best]) best = j;
        out.push_back(m.vocab.tokens[best]);
    }
    return out;
}

/// Linear blend between two ball points, projected back for safety
/// (a convex combination of ball points is already inside the ball).
inline Vector interpolate(std::span<const double> z_src, std::span<const double> z_tgt,
                          double t, double r) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("interpolate: t must be in [0,1]");
    if (z_src.size() != z_tgt.size())
        throw std::invalid_argument("interpolate: dimension mismatch");
    if (t == 0.0) return Vector(z_src.begin(), z_src.end());
    if (t == 1.0) return Vector(z_tgt.begin(), z_tgt.end());
    Vector z(z_src.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = (1.0 - t) * z_src[i] + t * z_tgt[i];
    project_ball_inplace(z, r);
    return z;
}

struct Neighbor {
    std::size_t index = 0;
    double cosine = 0.0;
};

/// Training-set latents ranked by descending cosine to the query;
/// ties break toward the lower index.
inline std::vector<Neighbor> nearest_neighbors(const Model& m, std::span<const double> z,
                                               std::size_t k) {
    const std::size_t n = m.latents.count();
    if (k < 1 || k > n) throw std::invalid_argument("nearest_neighbors: k out of range");
    std::vector<Neighbor> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = {i, cosine(m.latents.z.row(i), z)};
    std::stable_sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.cosine != b.cosine) return a.cosine > b.cosine;
        return a.index < b.index;
    });
    all.resize(k);
    return all;
}

}  // namespace gloss
