#pragma once

#include <cmath>
#include <vector>

#include "msl/core/types.hpp"

namespace msl {

/// Trapezoid weights on the grid: h/2 at both ends, h inside.
inline std::vector<double> trapezoid_weights(const GridSpec& spec) {
    std::vector<double> w(spec.size(), spec.h());
    w.front() = w.back() = 0.5 * spec.h();
    return w;
}

/// Trapezoid weights for the sub-grid x_0..x_i (used by row-wise Volterra solves).
inline double row_weight(const GridSpec& spec, int i, int k) {
    if (i == 0) return 0.0;
    return (k == 0 || k == i) ? 0.5 * spec.h() : spec.h();
}

/// Trapezoid integral of grid samples over [0,1].
inline Mat integrate(const MatrixGrid& f) {
    const auto w = trapezoid_weights(f.spec());
    Mat s = Mat::Zero(f.r(), f.r());
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i];
    return s;
}

/// Running trapezoid integral F(x_i) = int_0^{x_i} f.
inline std::vector<Mat> cumulative_trapezoid(const std::vector<Mat>& f, double h) {
    std::vector<Mat> out(f.size());
    if (f.empty()) return out;
    out[0] = Mat::Zero(f[0].rows(), f[0].cols());
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

/// Frobenius-based L2(0,1) norm of grid samples.
inline double l2_norm(const MatrixGrid& f) {
    const auto w = trapezoid_weights(f.spec());
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * f[i].squaredNorm();
    return std::sqrt(s);
}

/// Largest Frobenius-norm sample.
inline double linf_norm(const MatrixGrid& f) {
    double s = 0.0;
    for (const auto& a : f.values()) s = std::max(s, a.norm());
    return s;
}

/// Discrete G_2 norm: the larger of the worst row slice and worst column slice L2 norms,
/// using trapezoid quadrature over the populated part of each slice.
inline double g2_norm(const TriangularKernel& k) {
    const auto& spec = k.spec();
    const int m = spec.m();
    const double h = spec.h();
    double best = 0.0;
    for (int i = 1; i <= m; ++i) {
        double s = 0.0;
        for (int j = 0; j <= i; ++j) s += row_weight(spec, i, j) * k(i, j).squaredNorm();
        best = std::max(best, s);
    }
    for (int j = 0; j < m; ++j) {
        double s = 0.0;
        for (int i = j; i <= m; ++i) s += ((i == j || i == m) ? 0.5 * h : h) * k(i, j).squaredNorm();
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

}  // namespace msl
