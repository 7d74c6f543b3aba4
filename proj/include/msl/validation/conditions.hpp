#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msl/accelerant/accelerant.hpp"
#include "msl/core/error.hpp"
#include "msl/core/parallel.hpp"
#include "msl/core/quadrature.hpp"
#include "msl/core/types.hpp"
#include "msl/krein/krein.hpp"

namespace msl {

enum class Verdict { pass, fail, inconclusive, not_applicable };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::inconclusive: return "inconclusive";
        case Verdict::not_applicable: return "not_applicable";
    }
    return "?";
}

/// Cut between "zero" and "positive" smallest eigenvalues of the positivity matrices.
inline constexpr double kPositivityCut = 1e-6;
/// Width of the inconclusive band above the cut, in units of h^2.
inline constexpr double kPositivityBandPerH2 = 10.0;
/// (A1) flattening: share of the last quarter of bins in a partial sum.
inline constexpr double kFlatPass = 0.10;
inline constexpr double kFlatFail = 0.20;

struct A1Report {
    int n_bins = 0;
    double tilde_sum = 0.0;            ///< sum over bins of |lambda_j - pi n|^2
    int max_bin_count = 0;             ///< largest number of lambda_j in one bin
    double beta_sum = 0.0;             ///< sum over bins of ||I - sum alpha_j||^2
    std::vector<double> tilde_trend;   ///< cumulative tilde_sum after each bin
    std::vector<double> beta_trend;    ///< cumulative beta_sum after each bin
    double tilde_tail_share = 0.0;     ///< share of the last quarter of bins in tilde_sum
    double beta_tail_share = 0.0;
    Verdict verdict = Verdict::inconclusive;
    std::string note;
};

struct A2Report {
    int n_bins = 0;
    std::vector<int> ranks;            ///< numerical rank of each alpha_j with lambda_j > 0
    std::vector<int> counts;           ///< cumulative rank sum over bins 1..N, N = 1..n_bins
    std::optional<int> n0;
    Verdict verdict = Verdict::inconclusive;
    std::string note;
};

struct PositivityReport {
    double min_eig = 0.0;
    std::vector<double> near_null;     ///< eigenvector of min_eig in the unweighted frame, unit L2 norm
    Verdict verdict = Verdict::inconclusive;
};

struct A34Report {
    int n_bins = 0;
    int m = 0;
    double band = 0.0;
    std::optional<PositivityReport> a3;  ///< empty for data without the zero entry
    PositivityReport a4;
};

struct ConditionReport {
    A1Report a1;
    A2Report a2;
    A34Report a34;
    int requested_bins = 0;
    int evaluated_bins = 0;  ///< truncation level actually used
    bool covered = true;
    Verdict overall = Verdict::inconclusive;
};

namespace validation_detail {

using MatX = Eigen::MatrixXcd;

/// Share of bins n > 3N/4 in the cumulative sums.
inline double tail_share(const std::vector<double>& cum) {
    if (cum.empty() || cum.back() <= 0.0) return 0.0;
    const int n = static_cast<int>(cum.size());
    const int q = (3 * n) / 4;  // bins 1..q form the head
    const double head = q > 0 ? cum[q - 1] : 0.0;
    return (cum.back() - head) / cum.back();
}

inline Verdict flatten_verdict(double share) {
    if (share < kFlatPass) return Verdict::pass;
    if (share >= kFlatFail) return Verdict::fail;
    return Verdict::inconclusive;
}

/// Symmetrized Nystrom matrix I + W^{1/2} K W^{1/2} of a kernel on the grid square.
inline MatX nystrom(const SquareKernel& k) {
    const GridSpec& spec = k.spec();
    const int n = static_cast<int>(spec.size()), r = k.r();
    const auto w = trapezoid_weights(spec);
    MatX a = MatX::Identity(n * r, n * r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.block(i * r, j * r, r, r) += std::sqrt(w[i] * w[j]) * k(i, j);
    return 0.5 * (a + a.adjoint());
}

inline PositivityReport positivity(const MatX& a, const GridSpec& spec, int r, double band) {
    Eigen::SelfAdjointEigenSolver<MatX> es(a);
    PositivityReport rep;
    rep.min_eig = es.eigenvalues()(0);
    const auto w = trapezoid_weights(spec);
    Eigen::VectorXcd v = es.eigenvectors().col(0);
    for (int i = 0; i < static_cast<int>(spec.size()); ++i) v.segment(i * r, r) /= std::sqrt(w[i]);
    // Back in the unweighted frame, normalize to unit discrete L2 norm.
    double nrm = 0.0;
    for (int i = 0; i < static_cast<int>(spec.size()); ++i) nrm += w[i] * v.segment(i * r, r).squaredNorm();
    v /= std::sqrt(nrm);
    // Fix the global phase by the largest entry.
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v *= std::polar(1.0, -std::arg(v(big)));
    rep.near_null.resize(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) rep.near_null[i] = v(i).real();
    if (rep.min_eig <= kPositivityCut)
        rep.verdict = Verdict::fail;
    else if (rep.min_eig >= kPositivityCut + band)
        rep.verdict = Verdict::pass;
    else
        rep.verdict = Verdict::inconclusive;
    return rep;
}

inline Verdict combine(std::initializer_list<Verdict> vs) {
    bool any_inc = false;
    for (Verdict v : vs) {
        if (v == Verdict::fail) return Verdict::fail;
        if (v == Verdict::inconclusive) any_inc = true;
    }
    return any_inc ? Verdict::inconclusive : Verdict::pass;
}

}  // namespace validation_detail

/// Partial sums of the three (A1) series over bins 1..n_bins.
inline A1Report check_a1(const SpectralData& data, int n_bins) {
    const BinDecomposition bd = bin_decompose(data, n_bins);
    A1Report rep;
    rep.n_bins = n_bins;
    double ts = 0.0, bs = 0.0;
    for (const Bin& b : bd.bins) {
        for (double tl : b.tilde_lambdas) ts += tl * tl;
        const double bn = opnorm(b.beta);
        bs += bn * bn;
        rep.max_bin_count = std::max(rep.max_bin_count, static_cast<int>(b.members.size()));
        rep.tilde_trend.push_back(ts);
        rep.beta_trend.push_back(bs);
    }
    rep.tilde_sum = ts;
    rep.beta_sum = bs;
    rep.tilde_tail_share = validation_detail::tail_share(rep.tilde_trend);
    rep.beta_tail_share = validation_detail::tail_share(rep.beta_trend);
    const Verdict flat = validation_detail::combine({validation_detail::flatten_verdict(rep.tilde_tail_share),
                                                     validation_detail::flatten_verdict(rep.beta_tail_share)});
    // A bin holding more than 2r points cannot stay bounded under (A2)-type counting.
    const Verdict count = rep.max_bin_count <= 2 * data.r() ? Verdict::pass : Verdict::inconclusive;
    rep.verdict = validation_detail::combine({flat, count});
    if (!bd.covered()) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "data end in bin " + fmt_num(bd.highest_bin) + " of " + fmt_num(n_bins);
    } else if (rep.verdict == Verdict::pass) {
        rep.note = "partial sums flatten; finite data cannot certify the infinite tails";
    }
    return rep;
}

/// Cumulative rank identity sum_{n <= N} sum_{lambda_j in Delta_n} rank alpha_j = N r.
inline A2Report check_a2(const SpectralData& data, int n_bins) {
    const BinDecomposition bd = bin_decompose(data, n_bins);
    const int r = data.r();
    A2Report rep;
    rep.n_bins = n_bins;
    for (std::size_t j = 0; j < data.size(); ++j)
        if (data[j].lambda > 0.0) rep.ranks.push_back(numerical_rank(data[j].alpha));
    int cum = 0;
    for (const Bin& b : bd.bins) {
        for (std::size_t q : b.members) cum += numerical_rank(data[q].alpha);
        rep.counts.push_back(cum);
    }
    for (int n0 = n_bins; n0 >= 1 && rep.counts[n0 - 1] == n0 * r; --n0) rep.n0 = n0;
    rep.verdict = rep.n0 ? Verdict::pass : Verdict::fail;
    if (!bd.covered()) {
        rep.verdict = Verdict::inconclusive;
        rep.note = "data end in bin " + fmt_num(bd.highest_bin) + " of " + fmt_num(n_bins);
    }
    return rep;
}

/// Nystrom matrices I + W^{1/2} H_e W^{1/2} and I + W^{1/2} H_o W^{1/2} of the truncated accelerant.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> completeness_matrices(const SpectralData& data,
                                                                         const GridSpec& spec, int n_bins) {
    const HeoKernels k = build_heo(SpectralAccelerant(data, n_bins), spec);
    return {validation_detail::nystrom(k.even), validation_detail::nystrom(k.odd)};
}

/// Positivity band at a given grid.
inline double positivity_band(const GridSpec& spec) { return kPositivityBandPerH2 * spec.h() * spec.h(); }

/// (A3)/(A4) through positivity of I + H_e and I + H_o. (A3) applies to data with the zero entry only.
inline A34Report check_a3_a4(const SpectralData& data, const GridSpec& spec, int n_bins) {
    A34Report rep;
    rep.n_bins = n_bins;
    rep.m = spec.m();
    rep.band = positivity_band(spec);
    const auto [e, o] = completeness_matrices(data, spec, n_bins);
    if (data.includes_zero()) rep.a3 = validation_detail::positivity(e, spec, data.r(), rep.band);
    rep.a4 = validation_detail::positivity(o, spec, data.r(), rep.band);
    return rep;
}

/// Smallest eigenvalue of the symmetrized Nystrom matrix of I + H on [0, 1], (H f)(x) = int H(x - t) f(t) dt.
inline double accelerant_positivity(const MatrixGrid& h, const GridSpec& spec) {
    const int n = static_cast<int>(spec.size()), r = h.r();
    const auto w = trapezoid_weights(spec);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n * r, n * r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double s = std::abs(spec.x(i) - spec.x(j));
            const Mat hv = h.spec() == spec ? Mat(h[std::abs(i - j)]) : h.at(s);
            a.block(i * r, j * r, r, r) += std::sqrt(w[i] * w[j]) * hv;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// All conditions at truncation n_bins; uncovered data are evaluated at the bins they reach.
inline ConditionReport check_conditions(const SpectralData& data, const GridSpec& spec, int n_bins) {
    ConditionReport rep;
    rep.requested_bins = n_bins;
    const BinDecomposition bd = bin_decompose(data, n_bins);
    rep.covered = bd.covered();
    rep.evaluated_bins = rep.covered ? n_bins : std::max(1, bd.highest_bin);
    rep.a1 = check_a1(data, n_bins);
    rep.a2 = check_a2(data, n_bins);
    rep.a34 = check_a3_a4(data, spec, rep.evaluated_bins);
    const Verdict a3 = rep.a34.a3 ? rep.a34.a3->verdict : Verdict::pass;
    rep.overall = validation_detail::combine({rep.a1.verdict, rep.a2.verdict, a3, rep.a34.a4.verdict});
    return rep;
}

/// Operator-norm defects of the discrete factorization identities
///   (I + K_N)(I + H_e)(I + K_N*) = I = (I + K_D)(I + H_o)(I + K_D*)
/// for Hermitian H and tau = Theta(H).
///
/// The operators are discretized on the m cell centres y_i = (i + 1/2) h with equal weights h,
/// which keeps boundary half-cells out of the comparison. The Krein equation is solved on the
/// grid with 2m intervals: y_i is its node 2i + 1, and (y_i -+ y_k)/2 are its nodes i -+ k (+1),
/// so K_N, K_D and H_e, H_o need no interpolation. The Volterra factors weight their diagonal
/// by h/2 (the half cell [x_i, y_i]).
struct FactorizationDefect {
    double neumann = 0.0;
    double dirichlet = 0.0;
};

template <class Accelerant>
    requires std::is_invocable_r_v<Mat, const Accelerant&, double>
FactorizationDefect factorization_defect(const Accelerant& h, const GridSpec& spec) {
    using MatX = Eigen::MatrixXcd;
    const int m = spec.m();
    const double hc = spec.h();
    const KreinSolution sol = solve_krein(h, GridSpec(2 * m));
    const TriangularKernel& rk = sol.R;
    const int r = rk.r(), n = m * r;

    auto volterra = [&](double sign) {
        MatX a = MatX::Identity(n, n);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k <= i; ++k) {
                const int p = 2 * i + 1, q = 2 * k + 1;
                const Mat kern = 0.5 * (rk(p, (p + q) / 2) + sign * rk(p, (p - q) / 2));
                a.block(i * r, k * r, r, r) += (i == k ? 0.5 * hc : hc) * kern;
            }
        return a;
    };
    // H at the half-cell offsets d h / 2, d = 0..2m.
    std::vector<Mat> hh(2 * m + 1);
    parallel_for(2 * m + 1, [&](int d) { hh[d] = h(0.5 * hc * d); });
    auto positivity_matrix = [&](double sign) {
        MatX a = MatX::Identity(n, n);
        for (int i = 0; i < m; ++i)
            for (int k = 0; k < m; ++k)
                a.block(i * r, k * r, r, r) += (0.5 * hc) * (hh[std::abs(i - k)] + sign * hh[i + k + 1]);
        return a;
    };
    // V P V* is Hermitian, so the operator norm is the largest |eigenvalue|.
    auto defect = [&](double sign) {
        const MatX v = volterra(sign);
        const MatX d = v * positivity_matrix(sign) * v.adjoint() - MatX::Identity(n, n);
        Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    };
    return {defect(1.0), defect(-1.0)};
}

}  // namespace msl
