#pragma once

#include <algorithm>
#include <vector>

#include "msl/core/error.hpp"
#include "msl/core/quadrature.hpp"
#include "msl/core/types.hpp"

namespace msl {

/// The Miura potential q = tau' + tau^2, held through its primitive
/// sigma(x) = tau(x) + int_0^x tau(s)^2 ds so that q = sigma' distributionally.
struct PotentialPrimitive {
    MatrixGrid sigma;
    MatrixGrid tau_ref;
};

inline PotentialPrimitive miura(const MatrixGrid& tau) {
    std::vector<Mat> sq(tau.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = tau[i] * tau[i];
    const std::vector<Mat> acc = cumulative_trapezoid(sq, tau.spec().h());
    std::vector<Mat> s(tau.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = tau[i] + acc[i];
    // tau^2 is Hermitian whenever tau is, so the flag carries over.
    if (tau.hermitian())
        for (auto& a : s) a = hermitize(a);
    return {MatrixGrid(tau.r(), tau.spec(), std::move(s), tau.hermitian()), tau};
}

/// sup-norm of (sigma_a - sigma_b) after removing its mean over the nodes.
inline double miura_distance(const PotentialPrimitive& a, const PotentialPrimitive& b) {
    if (a.sigma.r() != b.sigma.r() || !(a.sigma.spec() == b.sigma.spec()))
        throw ShapeError("primitives live on different grids or have different r");
    const std::size_t n = a.sigma.size();
    std::vector<Mat> d(n);
    Mat mean = Mat::Zero(a.sigma.r(), a.sigma.r());
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = a.sigma[i] - b.sigma[i];
        mean += d[i];
    }
    mean /= static_cast<double>(n);
    double dist = 0.0;
    for (const auto& v : d) dist = std::max(dist, opnorm(v - mean));
    return dist;
}

/// True iff the two primitives differ by a constant matrix within tol, i.e. define the same q.
inline bool miura_equals(const PotentialPrimitive& a, const PotentialPrimitive& b, double tol) {
    return miura_distance(a, b) <= tol;
}

}  // namespace msl
