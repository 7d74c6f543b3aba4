#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "msl/core/error.hpp"
#include "msl/core/quadrature.hpp"
#include "msl/core/types.hpp"

namespace msl {

struct KreinSolution {
    TriangularKernel R;
    /// max over rows of the discrete defect of the Krein equation
    double residual = 0.0;
    /// smallest singular value over all pivot blocks (row systems and bordered leading blocks)
    double min_pivot = 1.0;
};

/// Pivot blocks below this smallest singular value mean I + H^a is singular for some a.
inline constexpr double kKreinPivotTol = 1e-10;

namespace krein_detail {

using MatX = Eigen::MatrixXcd;

/// Block Toeplitz matrix T(k, j) = H(|k - j| h), k, j = 0..n-1, from hv[d] = H(d h).
inline MatX block_toeplitz(const std::vector<Mat>& hv, int n, int r) {
    MatX t(n * r, n * r);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) t.block(k * r, j * r, r, r) = hv[std::abs(k - j)];
    return t;
}

inline double min_sv(const MatX& a) {
    Eigen::JacobiSVD<MatX> svd(a);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

inline double min_herm_eig(const MatX& a) {
    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// Solves R(x_i, t_j) + H(x_i - t_j) + sum_k w^{(i)}_k R(x_i, x_k) H(x_k - t_j) = 0 row by row.
///
/// Row i is the trapezoid system R_i M_i = -g_i with M_i = I + W^{(i)} T_{i+1}. With
/// B = (I + W~ T_i)^{-1}, W~ = diag(h/2, h, ..., h), the last block is eliminated through the
/// Schur complement S_M = I + (h/2) H(0) - (h/2) g B b, and B is then bordered to the next
/// size using S_A = I + h H(0) - h g B b. Each row costs O(i^2 r^3).
inline KreinSolution solve(const std::vector<Mat>& hv, const GridSpec& spec, bool hermitian) {
    const int m = spec.m();
    const int r = static_cast<int>(hv[0].rows());
    const double h = spec.h();
    const MatX id = MatX::Identity(r, r);
    const MatX h0 = hv[0];
    const MatX t = block_toeplitz(hv, m + 1, r);

    KreinSolution sol{TriangularKernel(r, spec)};
    sol.R(0, 0) = -hv[0];
    double min_pivot = 1e300;

    auto check = [&](const MatX& piv, double x, const char* what) {
        const double s = min_sv(piv);
        min_pivot = std::min(min_pivot, s);
        const bool indefinite = hermitian && min_herm_eig(piv) <= 0.0;
        if (s < kKreinPivotTol || indefinite)
            throw NotAnAccelerantError("Krein equation not uniquely solvable near x = " + fmt_num(x) +
                                           " (" + what + " pivot sigma_min = " + fmt_num(s) +
                                           (indefinite ? ", sign change" : "") + "): H is not an accelerant",
                                       x);
    };

    MatX big_b((m + 1) * r, (m + 1) * r);
    {
        const MatX a1 = id + 0.5 * h * h0;
        check(a1, 0.5 * h, "leading");
        big_b.topLeftCorner(r, r) = a1.inverse();
    }

    std::vector<double> w(m + 1);
    for (int i = 1; i <= m; ++i) {
        const int nr = i * r;
        auto bmat = big_b.topLeftCorner(nr, nr);
        const auto g = t.block(i * r, 0, r, nr);  // H((i - k) h), k < i
        MatX bcol = h * t.block(0, i * r, nr, r);  // W~ T(:, i)
        bcol.topRows(r) *= 0.5;

        const MatX gb = g * bmat;           // G1 = g B
        const MatX u = bmat * bcol;         // B b
        const MatX gbb = gb * bcol;         // g B b

        // Row i.
        const MatX sm = id + 0.5 * h * h0 - 0.5 * h * gbb;
        check(sm, spec.x(i), "row");
        const MatX sm_inv = sm.inverse();
        const MatX r_last = (gbb - h0) * sm_inv;
        const MatX r_first = -(id + 0.5 * h * r_last) * gb;
        for (int k = 0; k < i; ++k) sol.R(i, k) = r_first.middleCols(k * r, r);
        sol.R(i, i) = r_last;

        // Residual of row i against the full trapezoid sum.
        for (int k = 0; k <= i; ++k) w[k] = row_weight(spec, i, k);
        MatX rrow(r, nr + r);
        rrow << r_first, r_last;
        MatX rw = rrow;
        for (int k = 0; k <= i; ++k) rw.middleCols(k * r, r) *= w[k];
        const MatX def = rrow + t.block(i * r, 0, r, nr + r) + rw * t.topLeftCorner(nr + r, nr + r);
        for (int k = 0; k <= i; ++k) sol.residual = std::max(sol.residual, def.middleCols(k * r, r).norm());

        // Border B to size i + 1.
        if (i < m) {
            const MatX sa = id + h * h0 - h * gbb;
            check(sa, spec.x(i) + 0.5 * h, "leading");
            const MatX sa_inv = sa.inverse();
            const MatX v = h * gb;  // c B with c = h g
            const MatX usi = u * sa_inv;
            bmat.noalias() += usi * v;
            big_b.block(0, nr, nr, r) = -usi;
            big_b.block(nr, 0, r, nr) = -sa_inv * v;
            big_b.block(nr, nr, r, r) = sa_inv;
        }
    }
    sol.min_pivot = min_pivot;
    return sol;
}

template <class Accelerant>
std::vector<Mat> sample_offsets(const Accelerant& h, const GridSpec& spec) {
    std::vector<Mat> hv(spec.size());
    for (int k = 0; k <= spec.m(); ++k) hv[k] = h(spec.x(k));
    return hv;
}

inline bool all_hermitian(const std::vector<Mat>& v) {
    return std::all_of(v.begin(), v.end(), [](const Mat& a) { return is_hermitian(a); });
}

}  // namespace krein_detail

/// Solves the Krein equation on the grid `spec`. If H lives on a different grid it is
/// resampled by linear interpolation.
inline KreinSolution solve_krein(const MatrixGrid& h, const GridSpec& spec) {
    std::vector<Mat> hv = h.spec() == spec ? h.values()
                                           : krein_detail::sample_offsets([&](double x) { return h.at(x); }, spec);
    return krein_detail::solve(hv, spec, krein_detail::all_hermitian(hv));
}

/// Same, from an exactly evaluable accelerant.
template <class Accelerant>
    requires std::is_invocable_r_v<Mat, const Accelerant&, double>
KreinSolution solve_krein(const Accelerant& h, const GridSpec& spec) {
    auto hv = krein_detail::sample_offsets(h, spec);
    return krein_detail::solve(hv, spec, krein_detail::all_hermitian(hv));
}

/// Discrete defect of the Krein equation for a given R.
inline double krein_residual(const MatrixGrid& h, const TriangularKernel& rk) {
    const GridSpec& spec = rk.spec();
    if (!(h.spec() == spec) || h.r() != rk.r()) throw ShapeError("H and R live on different grids");
    const int m = spec.m();
    double res = 0.0;
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= i; ++j) {
            Mat d = rk(i, j) + h[i - j];
            for (int k = 0; k <= i; ++k) d += row_weight(spec, i, k) * rk(i, k) * h[std::abs(k - j)];
            res = std::max(res, d.norm());
        }
    }
    return res;
}

struct Reconstruction {
    KreinSolution krein;
    MatrixGrid tau;
    /// max_i ||tau_i - tau_i*|| before symmetrization (Hermitian H only; 0 otherwise)
    double tau_hermitian_defect = 0.0;
};

namespace krein_detail {

inline Reconstruction finish(KreinSolution sol, bool hermitian) {
    const GridSpec spec = sol.R.spec();
    const int r = sol.R.r();
    std::vector<Mat> tau(spec.size());
    double defect = 0.0;
    for (int i = 0; i <= spec.m(); ++i) {
        tau[i] = -sol.R(i, 0);
        if (hermitian) {
            defect = std::max(defect, hermitian_defect(tau[i]));
            tau[i] = hermitize(tau[i]);
        }
    }
    MatrixGrid g(r, spec, std::move(tau), hermitian);
    return {std::move(sol), std::move(g), defect};
}

}  // namespace krein_detail

/// tau = Theta(H), tau(x_i) = -R(x_i, 0), with the Krein solution kept for diagnostics.
inline Reconstruction reconstruct(const MatrixGrid& h, const GridSpec& spec) {
    std::vector<Mat> hv = h.spec() == spec ? h.values()
                                           : krein_detail::sample_offsets([&](double x) { return h.at(x); }, spec);
    const bool herm = krein_detail::all_hermitian(hv);
    return krein_detail::finish(krein_detail::solve(hv, spec, herm), herm);
}

template <class Accelerant>
    requires std::is_invocable_r_v<Mat, const Accelerant&, double>
Reconstruction reconstruct(const Accelerant& h, const GridSpec& spec) {
    auto hv = krein_detail::sample_offsets(h, spec);
    const bool herm = krein_detail::all_hermitian(hv);
    return krein_detail::finish(krein_detail::solve(hv, spec, herm), herm);
}

inline MatrixGrid theta(const MatrixGrid& h, const GridSpec& spec) { return reconstruct(h, spec).tau; }

/// K_{tau,D} and K_{tau,N} on the triangle.
struct TransformationKernels {
    TriangularKernel dirichlet;
    TriangularKernel neumann;
};

namespace krein_detail {

/// Fills K_D/K_N from R at the points (x_i -+ t_j)/2 = (i -+ j) h / 2; half(i, q) must return
/// R(x_i, (q + 1/2) h) for the odd cases.
template <class Half>
TransformationKernels kernels_from(const TriangularKernel& rk, Half&& half) {
    const GridSpec& spec = rk.spec();
    const int m = spec.m(), r = rk.r();
    TransformationKernels out{TriangularKernel(r, spec), TriangularKernel(r, spec)};
    std::vector<Mat> row;
    for (int i = 0; i <= m; ++i) {
        row.resize(i);
        for (int q = 0; q < i; ++q) row[q] = half(i, q);
        for (int j = 0; j <= i; ++j) {
            const int p = i + j, q = i - j;  // same parity
            const Mat& rp = p % 2 == 0 ? rk(i, p / 2) : row[p / 2];
            const Mat& rq = p % 2 == 0 ? rk(i, q / 2) : row[q / 2];
            out.dirichlet(i, j) = 0.5 * (rp - rq);
            out.neumann(i, j) = 0.5 * (rp + rq);
        }
    }
    return out;
}

}  // namespace krein_detail

/// Midpoint values of R by linear interpolation in the second argument.
inline TransformationKernels transformation_kernels(const TriangularKernel& rk) {
    return krein_detail::kernels_from(rk, [&](int i, int q) -> Mat { return 0.5 * (rk(i, q) + rk(i, q + 1)); });
}

/// Midpoint values of R from the Krein equation itself (Nystrom interpolation):
///   R(x_i, s) = -H(x_i - s) - sum_k w_k R(x_i, x_k) H(x_k - s).
/// Second-order accurate in the midpoints, unlike linear interpolation of an oscillatory R.
template <class Accelerant>
    requires std::is_invocable_r_v<Mat, const Accelerant&, double>
TransformationKernels transformation_kernels(const TriangularKernel& rk, const Accelerant& h) {
    const GridSpec& spec = rk.spec();
    const int m = spec.m();
    std::vector<Mat> hhalf(m + 1);  // H((d + 1/2) h)
    for (int d = 0; d <= m; ++d) hhalf[d] = h((d + 0.5) * spec.h());
    auto hs = [&](int d2) -> const Mat& { return hhalf[(std::abs(d2) - 1) / 2]; };  // H(d2 h / 2), d2 odd
    return krein_detail::kernels_from(rk, [&](int i, int q) -> Mat {
        const int s2 = 2 * q + 1;  // s = s2 h / 2
        Mat v = -hs(2 * i - s2);
        for (int k = 0; k <= i; ++k) v -= row_weight(spec, i, k) * rk(i, k) * hs(2 * k - s2);
        return v;
    });
}

}  // namespace msl
