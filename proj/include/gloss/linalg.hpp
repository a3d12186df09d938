#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace gloss {

using Vector = std::vector<double>;

// Dense row-major matrix. Small enough on purpose: everything in this
// project is matrix-vector products and outer-product accumulations.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

    void fill(double v) { data.assign(data.size(), v); }

    bool same_shape(const Matrix& other) const {
        return rows == other.rows && cols == other.cols;
    }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double squared_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double l2_norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

// y = M x
inline Vector matvec(const Matrix& m, std::span<const double> x) {
    if (m.cols != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    Vector y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) y[i] = dot(m.row(i), x);
    return y;
}

// y = M^T x, accumulated into out (out must have size m.cols)
inline void matvec_transpose_add(const Matrix& m, std::span<const double> x,
                                 std::span<double> out) {
    if (m.rows != x.size() || m.cols != out.size())
        throw std::invalid_argument("matvec_transpose_add: shape mismatch");
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) out[j] += xi * r[j];
    }
}

// M += alpha * u v^T
inline void outer_add(Matrix& m, std::span<const double> u, std::span<const double> v,
                      double alpha = 1.0) {
    if (m.rows != u.size() || m.cols != v.size())
        throw std::invalid_argument("outer_add: shape mismatch");
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double ui = alpha * u[i];
        if (ui == 0.0) continue;
        auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols; ++j) r[j] += ui * v[j];
    }
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// FNV-1a, used wherever we need a stable hash of a sentence string.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace gloss
