#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "msl/core/error.hpp"
#include "msl/core/parallel.hpp"
#include "msl/core/types.hpp"
#include "msl/direct/propagate.hpp"

namespace msl {

/// One eigenvalue lambda > 0 of S_tau (as a square root) with ker phi(1, lambda, tau).
struct EigenvalueRoot {
    double lambda = 0.0;
    int multiplicity = 0;
    /// r x multiplicity, orthonormal columns; empty (r x 0) for lambda = 0.
    Mat kernel_basis;
    /// Largest singular value of phi(1, lambda) among those assigned to the kernel.
    double kernel_sigma = 0.0;
};

struct EigenScan {
    std::vector<EigenvalueRoot> roots;  ///< lambda_0 = 0 first, then ascending
    std::vector<std::string> warnings;
    int evaluations = 0;
};

struct EigenRecord {
    double lambda = 0.0;
    Mat alpha;
    int multiplicity = 0;
    Mat kernel_basis;
};

namespace eigen_detail {

inline constexpr double kBracketWidth = 2e-10;
inline constexpr double kClusterGap = 1e-8;
inline constexpr double kKernelTol = 1e-7;
inline constexpr double kMaxPhaseJump = 2.5;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Phase data of U = (Z + iY)(Z - iY)^{-1}, Y = phi(1), Z = psi(1). For Hermitian tau and
/// real lambda, U is unitary and its eigenphases increase with lambda; lambda is a root of
/// det phi(1, lambda) exactly when U has eigenvalue 1.
struct PhasePoint {
    double lambda = 0.0;
    double principal_sum = 0.0;  ///< sum of eigenphases taken in [0, 2 pi)
    cplx det = 1.0;              ///< det U (unit modulus)
};

inline PhasePoint phase_at(const MatrixGrid& tau, double lambda) {
    const int r = tau.r();
    if (lambda == 0.0) return {0.0, 0.0, 1.0};
    const Mat2 w = fundamental_matrix(tau, lambda);
    const Mat y = -w.bottomLeftCorner(r, r);
    const Mat z = w.topLeftCorner(r, r);
    const cplx i1(0.0, 1.0);
    const Mat u = (z - i1 * y).partialPivLu().solve(z + i1 * y);
    Eigen::ComplexEigenSolver<Mat> es(u, false);
    PhasePoint p{lambda, 0.0, 1.0};
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const cplx e = es.eigenvalues()(k);
        double th = std::arg(e);
        if (th < 0.0) th += kTwoPi;
        if (th >= kTwoPi) th -= kTwoPi;
        p.principal_sum += th;
        p.det *= e / std::abs(e);
    }
    return p;
}

/// Phase advance from a to b (principal value; valid when the true advance is < pi).
inline double advance(const PhasePoint& a, const PhasePoint& b) { return std::arg(b.det / a.det); }

/// Number of roots in (a, b].
inline double raw_count(const PhasePoint& a, const PhasePoint& b) {
    return (a.principal_sum + advance(a, b) - b.principal_sum) / kTwoPi;
}

struct Bracket {
    PhasePoint lo, hi;
    int count;
};

class Scanner {
public:
    Scanner(const MatrixGrid& tau, std::vector<std::string>& warnings, int& evals)
        : tau_(tau), warnings_(warnings), evals_(evals) {}

    PhasePoint eval(double lambda) {
        ++evals_;
        return phase_at(tau_, lambda);
    }

    /// Appends brackets with a positive root count covering (a, b], subdividing whenever the
    /// phase advance is too large to be resolved unambiguously.
    void cover(const PhasePoint& a, const PhasePoint& b, std::vector<Bracket>& out, int depth = 0) {
        const double d = advance(a, b);
        if ((d > kMaxPhaseJump || d < -1e-9) && depth < 40) {
            const PhasePoint mid = eval(0.5 * (a.lambda + b.lambda));
            cover(a, mid, out, depth + 1);
            cover(mid, b, out, depth + 1);
            return;
        }
        const double c = raw_count(a, b);
        const long n = std::lround(c);
        if (std::abs(c - static_cast<double>(n)) > 0.1)
            warnings_.push_back("root count in (" + fmt_num(a.lambda) + ", " + fmt_num(b.lambda) +
                                "] is not near an integer (" + fmt_num(c) + ")");
        if (n > 0) out.push_back({a, b, static_cast<int>(n)});
    }

    /// Bisects a bracket until each piece is narrower than kBracketWidth; returns
    /// (midpoint, multiplicity) pairs.
    void refine(const Bracket& br, std::vector<std::pair<double, int>>& roots) {
        if (br.hi.lambda - br.lo.lambda <= kBracketWidth) {
            roots.emplace_back(0.5 * (br.lo.lambda + br.hi.lambda), br.count);
            return;
        }
        const PhasePoint mid = eval(0.5 * (br.lo.lambda + br.hi.lambda));
        const long left = std::max(0L, std::min<long>(br.count, std::lround(raw_count(br.lo, mid))));
        if (left > 0) refine({br.lo, mid, static_cast<int>(left)}, roots);
        if (br.count - left > 0) refine({mid, br.hi, static_cast<int>(br.count - left)}, roots);
    }

private:
    const MatrixGrid& tau_;
    std::vector<std::string>& warnings_;
    int& evals_;
};

inline void require_hermitian(const MatrixGrid& tau) {
    for (std::size_t i = 0; i < tau.size(); ++i)
        if (!is_hermitian(tau[i]))
            throw ValidationError("tau must be Hermitian for the spectral scan (sample " + fmt_num(i) + ")");
}

}  // namespace eigen_detail

/// Roots of det phi(1, lambda, tau) in (0, lambda_max], plus lambda_0 = 0. Roots are
/// counted by the winding of the unitary phase matrix, then isolated by bisection on the
/// counts, so multiple and tightly clustered roots are never skipped.
inline EigenScan find_eigenvalues(const MatrixGrid& tau, double lambda_max, double scan_step = 0.1) {
    using namespace eigen_detail;
    if (!(scan_step > 0.0) || scan_step >= kPi / 4.0)
        throw ConfigurationError("scan_step must be in (0, pi/4), got " + fmt_num(scan_step));
    if (!(lambda_max > 0.0)) throw ConfigurationError("lambda_max must be positive");
    require_hermitian(tau);

    EigenScan scan;
    const int r = tau.r();
    scan.roots.push_back({0.0, r, Mat::Zero(r, 0), 0.0});

    const int n_steps = static_cast<int>(std::ceil(lambda_max / scan_step));
    std::vector<PhasePoint> grid(static_cast<std::size_t>(n_steps) + 1);
    parallel_for(n_steps + 1, [&](int k) {
        grid[k] = phase_at(tau, k == n_steps ? lambda_max : k * scan_step);
    });
    scan.evaluations += n_steps;

    std::vector<Bracket> brackets;
    {
        Scanner sc(tau, scan.warnings, scan.evaluations);
        for (int k = 0; k < n_steps; ++k) sc.cover(grid[k], grid[k + 1], brackets);
    }

    std::vector<std::vector<std::pair<double, int>>> found(brackets.size());
    std::vector<std::vector<std::string>> warn(brackets.size());
    std::vector<int> evals(brackets.size(), 0);
    parallel_for(static_cast<int>(brackets.size()), [&](int b) {
        Scanner sc(tau, warn[b], evals[b]);
        sc.refine(brackets[b], found[b]);
    });
    std::vector<std::pair<double, int>> roots;
    for (std::size_t b = 0; b < brackets.size(); ++b) {
        roots.insert(roots.end(), found[b].begin(), found[b].end());
        scan.warnings.insert(scan.warnings.end(), warn[b].begin(), warn[b].end());
        scan.evaluations += evals[b];
    }
    std::sort(roots.begin(), roots.end());

    // Merge clusters.
    std::vector<std::pair<double, int>> merged;
    for (const auto& [lam, mult] : roots) {
        if (!merged.empty() && lam - merged.back().first < kClusterGap) {
            auto& prev = merged.back();
            scan.warnings.push_back("roots " + fmt_num(prev.first) + " and " + fmt_num(lam) +
                                    " closer than 1e-8; merged");
            prev.first = (prev.first * prev.second + lam * mult) / (prev.second + mult);
            prev.second += mult;
        } else {
            merged.emplace_back(lam, mult);
        }
    }

    std::vector<EigenvalueRoot> out(merged.size());
    std::vector<std::string> kernel_warn(merged.size());
    parallel_for(static_cast<int>(merged.size()), [&](int k) {
        const auto [lam, mult] = merged[k];
        const int mm = std::min(mult, r);
        const Mat phi = propagate(tau, lam, false).phi_tau;
        Eigen::JacobiSVD<Mat> svd(phi, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        out[k].lambda = lam;
        out[k].multiplicity = mm;
        out[k].kernel_basis = svd.matrixV().rightCols(mm);
        out[k].kernel_sigma = sv(r - mm);
        if (mult > r)
            kernel_warn[k] = "root at " + fmt_num(lam) + " has multiplicity above r; clipped";
        else if (out[k].kernel_sigma > kKernelTol * std::max(1.0, sv(0)))
            kernel_warn[k] = "kernel at " + fmt_num(lam) + " has singular value " +
                             fmt_num(out[k].kernel_sigma) + " above the rank threshold";
    });
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (!kernel_warn[k].empty()) scan.warnings.push_back(kernel_warn[k]);
        scan.roots.push_back(std::move(out[k]));
    }
    return scan;
}

/// Output of the contour extraction; `hermitian_defect[j]` is ||alpha - alpha*|| before
/// symmetrization.
struct NormingResult {
    std::vector<Mat> alphas;
    std::vector<double> hermitian_defect;
    std::vector<std::string> warnings;
};

inline constexpr int kContourNodes = 64;

/// alpha_j = -(1/2 pi i) \oint m_tau over a circle around lambda_j (half of that at lambda = 0).
/// `eigenvalues` must start with 0; `next_above` is the first root beyond the list, if known,
/// and limits the radius of the last circle.
inline NormingResult norming_constants(const MatrixGrid& tau, const std::vector<double>& eigenvalues,
                                       std::optional<double> next_above = std::nullopt,
                                       int nodes = kContourNodes) {
    const int n = static_cast<int>(eigenvalues.size());
    const int r = tau.r();
    if (n == 0 || eigenvalues.front() != 0.0)
        throw ConfigurationError("eigenvalue list must start with lambda_0 = 0");
    NormingResult res;
    res.alphas.resize(n);
    res.hermitian_defect.resize(n);

    parallel_for(n, [&](int j) {
        const double lam = eigenvalues[j];
        double gap = 1e300;
        if (j > 0) gap = std::min(gap, lam - eigenvalues[j - 1]);
        if (j + 1 < n) gap = std::min(gap, eigenvalues[j + 1] - lam);
        else if (next_above) gap = std::min(gap, *next_above - lam);
        if (j == 0 && n == 1 && !next_above) gap = 1.0;
        const double rho = std::min(0.4 * gap, 0.5);
        Mat acc = Mat::Zero(r, r);
        for (int k = 0; k < nodes; ++k) {
            const double th = 2.0 * kPi * (k + 0.5) / nodes;
            const cplx e = std::polar(1.0, th);
            Mat mk;
            try {
                mk = weyl_m(tau, lam + rho * e);
            } catch (const PoleProximityError& err) {
                throw ContourError("contour around lambda = " + fmt_num(lam) + " (radius " +
                                   fmt_num(rho) + ") passes a pole; use a smaller radius: " + err.what());
            }
            acc += mk * (rho * e);
        }
        Mat alpha = -acc / static_cast<double>(nodes);
        if (j == 0) alpha *= 0.5;
        res.hermitian_defect[j] = hermitian_defect(alpha);
        alpha = hermitize(alpha);
        Eigen::SelfAdjointEigenSolver<Mat> es(alpha);
        const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        const double lo = es.eigenvalues()(0);
        if (lo < -1e-6 * scale)
            throw ExtractionError("norming constant at lambda = " + fmt_num(lam) +
                                  " has eigenvalue " + fmt_num(lo));
        if (lo < 0.0) {
            Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
            alpha = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
            alpha = hermitize(alpha);
        }
        res.alphas[j] = alpha;
    });
    return res;
}

}  // namespace msl
