#pragma once

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "msl/core/error.hpp"
#include "msl/core/types.hpp"

namespace msl {

namespace propagate_detail {

/// Largest |lambda| * (sub)step admitted before a grid cell is split. The fourth-order
/// Magnus error grows with the oscillation per step; 0.4 rad keeps eigenvalue errors near
/// 1e-10 at desk-scale grids.
inline constexpr double kMaxPhasePerStep = 0.4;

inline Mat2 generator(const Mat& t, cplx lambda) {
    const int r = static_cast<int>(t.rows());
    Mat2 a = Mat2::Zero(2 * r, 2 * r);
    a.topLeftCorner(r, r) = -t;
    a.bottomRightCorner(r, r) = t;
    a.topRightCorner(r, r).diagonal().setConstant(lambda);
    a.bottomLeftCorner(r, r).diagonal().setConstant(-lambda);
    return a;
}

inline int substeps_for(cplx lambda, double h) {
    return std::max(1, static_cast<int>(std::ceil(std::abs(lambda) * h / kMaxPhasePerStep)));
}

}  // namespace propagate_detail

/// W(1) for W' = Q(x, lambda, tau) W, W(0) = I, with
///   W = [[psi(tau), phi(-tau)], [-phi(tau), psi(-tau)]],  Q = [[-tau, lambda I], [-lambda I, tau]].
/// Fourth-order Magnus with two Gauss points per (sub)step; tau is piecewise linear.
/// `sign` = -1 propagates with -tau, `adjoint` uses tau* (for the conjugate system).
inline Mat2 fundamental_matrix(const MatrixGrid& tau, cplx lambda, double sign = 1.0, bool adjoint = false) {
    using namespace propagate_detail;
    const int r = tau.r();
    const int m = tau.spec().m();
    const double h = tau.spec().h();
    const int sub = substeps_for(lambda, h);
    const double dt = h / sub;
    static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const double ck = std::sqrt(3.0) * dt * dt / 12.0;

    Mat2 w = Mat2::Identity(2 * r, 2 * r);
    for (int i = 0; i < m; ++i) {
        Mat t0 = sign * tau[i];
        Mat t1 = sign * tau[i + 1];
        if (adjoint) {
            t0.adjointInPlace();
            t1.adjointInPlace();
        }
        for (int s = 0; s < sub; ++s) {
            const double u1 = (s + c1) / sub, u2 = (s + c2) / sub;
            const Mat2 a1 = generator((1.0 - u1) * t0 + u1 * t1, lambda);
            const Mat2 a2 = generator((1.0 - u2) * t0 + u2 * t1, lambda);
            const Mat2 omega = (0.5 * dt) * (a1 + a2) + ck * (a2 * a1 - a1 * a2);
            w = omega.exp() * w;
        }
    }
    return w;
}

/// Boundary matrices at x = 1, with the residual of W*(1, conj(lambda), -tau*) W(1, lambda, tau) = I.
inline BoundaryValues propagate(const MatrixGrid& tau, cplx lambda, bool with_identity = true) {
    const int r = tau.r();
    const Mat2 w = fundamental_matrix(tau, lambda);
    BoundaryValues bv;
    bv.lambda = lambda;
    bv.psi_tau = w.topLeftCorner(r, r);
    bv.phi_mtau = w.topRightCorner(r, r);
    bv.phi_tau = -w.bottomLeftCorner(r, r);
    bv.psi_mtau = w.bottomRightCorner(r, r);
    if (with_identity) {
        const Mat2 wt = fundamental_matrix(tau, std::conj(lambda), -1.0, true);
        bv.identity_residual = (wt.adjoint() * w - Mat2::Identity(2 * r, 2 * r)).norm();
    }
    return bv;
}

/// Relative threshold on sigma_min(phi(1, lambda)) below which m_tau is treated as a pole.
inline constexpr double kPoleThreshold = 1e-10;

/// m_tau(lambda) = -phi(1, lambda, tau)^{-1} psi(1, lambda, -tau).
inline Mat weyl_m_from(const BoundaryValues& bv) {
    Eigen::JacobiSVD<Mat> svd(bv.phi_tau);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= kPoleThreshold * std::max(1.0, sv(0)))
        throw PoleProximityError("phi(1, lambda) numerically singular near lambda = (" +
                                     fmt_num(bv.lambda.real()) + ", " + fmt_num(bv.lambda.imag()) +
                                     "), sigma_min = " + fmt_num(smin),
                                 smin);
    return -bv.phi_tau.partialPivLu().solve(bv.psi_mtau);
}

inline Mat weyl_m(const MatrixGrid& tau, cplx lambda) { return weyl_m_from(propagate(tau, lambda, false)); }

}  // namespace msl
