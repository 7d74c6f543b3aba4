#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "msl/core/error.hpp"
#include "msl/core/parallel.hpp"
#include "msl/core/quadrature.hpp"
#include "msl/core/types.hpp"

namespace msl {

/// Bin index n >= 1 of lambda > 0, with Delta_1 = (0, 3pi/2] and Delta_n = (pi n - pi/2, pi n + pi/2].
/// Values within 1e-12 (relative) of a boundary pi n + pi/2 go to the lower bin n.
inline int bin_of(double lambda, bool* tie = nullptr) {
    const double s = (lambda - 0.5 * kPi) / kPi;
    int n = std::max(1, static_cast<int>(std::ceil(s)));
    const double tol = 1e-12 * std::max(1.0, lambda);
    const bool at_lower = n > 1 && std::abs(lambda - (kPi * n - 0.5 * kPi)) <= tol;
    const bool at_upper = std::abs(lambda - (kPi * n + 0.5 * kPi)) <= tol;
    const bool is_tie = at_lower || at_upper;
    if (at_lower) --n;
    if (tie) *tie = is_tie;
    return n;
}

struct Bin {
    int n = 0;
    std::vector<std::size_t> members;   ///< indices into the dataset
    std::vector<double> tilde_lambdas;  ///< lambda_j - pi n
    Mat beta;                           ///< I - sum alpha_j
    Mat gamma;                          ///< sum (lambda_j - pi n) alpha_j
};

struct BinDecomposition {
    int r = 0;
    int n_bins = 0;
    std::vector<Bin> bins;                   ///< bins[n - 1] is Delta_n
    std::vector<std::size_t> beyond;         ///< entries with bin index > n_bins
    std::vector<std::size_t> boundary_ties;  ///< entries resolved by the lower-bin tie rule
    int highest_bin = 0;                     ///< largest bin index present in the data
    std::vector<std::string> warnings;

    /// True when the data reach the last requested bin.
    bool covered() const { return highest_bin >= n_bins; }
};

/// Groups the lambda_j > 0 into Delta_1..Delta_{n_bins} and forms beta_n, gamma_n.
inline BinDecomposition bin_decompose(const SpectralData& data, int n_bins) {
    if (n_bins < 1) throw ConfigurationError("n_bins must be positive");
    const int r = data.r();
    BinDecomposition bd;
    bd.r = r;
    bd.n_bins = n_bins;
    bd.bins.resize(n_bins);
    for (int n = 1; n <= n_bins; ++n) {
        bd.bins[n - 1].n = n;
        bd.bins[n - 1].beta = Mat::Identity(r, r);
        bd.bins[n - 1].gamma = Mat::Zero(r, r);
    }
    for (std::size_t j = 0; j < data.size(); ++j) {
        const double lam = data[j].lambda;
        if (lam == 0.0) continue;
        bool tie = false;
        const int n = bin_of(lam, &tie);
        if (tie) bd.boundary_ties.push_back(j);
        bd.highest_bin = std::max(bd.highest_bin, n);
        if (n > n_bins) {
            bd.beyond.push_back(j);
            continue;
        }
        Bin& b = bd.bins[n - 1];
        const double tl = lam - kPi * n;
        b.members.push_back(j);
        b.tilde_lambdas.push_back(tl);
        b.beta -= data[j].alpha;
        b.gamma += tl * data[j].alpha;
    }
    for (const auto& b : bd.bins)
        if (b.members.empty()) bd.warnings.push_back("bin " + fmt_num(b.n) + " is empty");
    if (!bd.covered())
        bd.warnings.push_back("data end in bin " + fmt_num(bd.highest_bin) + ", below the requested " +
                              fmt_num(n_bins) + " bins; the accelerant is truncated early");
    return bd;
}

/// Adds the zero entry (0, I) to a T_q-type dataset; S_tau-type data are returned unchanged.
inline SpectralData with_zero_entry(const SpectralData& data) {
    if (data.includes_zero()) return data;
    std::vector<SpectralEntry> e;
    e.reserve(data.size() + 1);
    e.push_back({0.0, Mat::Identity(data.r(), data.r())});
    e.insert(e.end(), data.entries().begin(), data.entries().end());
    return SpectralData(data.r(), true, std::move(e));
}

/// H_N(s) = 2 sum_{lambda_j <= pi(N+1/2)} cos(2 lambda_j s) alpha_j - I - 2 sum_{n<=N} cos(2 pi n s) I,
/// evaluated exactly at any s in [-1, 1]. Each bin is accumulated as
///   -2 cos(2 pi n s) beta_n - 4 sum_j sin((lambda_j + pi n) s) sin(lambda~_j s) alpha_j,
/// which is the same quantity written without cancellation between the two cosine sums.
class SpectralAccelerant {
public:
    SpectralAccelerant(const SpectralData& data, int n_bins)
        : r_(data.r()), data_(with_zero_entry(data)), bins_(bin_decompose(data_, n_bins)) {
        zero_term_ = 2.0 * data_[0].alpha - Mat::Identity(r_, r_);
    }

    int r() const noexcept { return r_; }
    int n_bins() const noexcept { return bins_.n_bins; }
    const BinDecomposition& bins() const noexcept { return bins_; }
    const SpectralData& data() const noexcept { return data_; }

    Mat operator()(double s) const { return partial(std::abs(s), bins_.n_bins); }

    /// H_n for n <= n_bins.
    Mat partial(double s, int n) const {
        s = std::abs(s);
        Mat h = zero_term_;
        for (int k = 0; k < n; ++k) {
            const Bin& b = bins_.bins[k];
            const double pn = kPi * b.n;
            h -= (2.0 * std::cos(2.0 * pn * s)) * b.beta;
            for (std::size_t q = 0; q < b.members.size(); ++q) {
                const double lam = data_[b.members[q]].lambda;
                h -= (4.0 * std::sin((lam + pn) * s) * std::sin(b.tilde_lambdas[q] * s)) * data_[b.members[q]].alpha;
            }
        }
        return hermitize(h);
    }

    MatrixGrid sample(const GridSpec& spec) const { return sample_partial(spec, bins_.n_bins); }

    MatrixGrid sample_partial(const GridSpec& spec, int n) const {
        std::vector<Mat> v(spec.size());
        parallel_for(static_cast<int>(spec.size()), [&](int i) { v[i] = partial(spec.x(i), n); });
        return MatrixGrid(r_, spec, std::move(v), true);
    }

private:
    int r_;
    SpectralData data_;
    BinDecomposition bins_;
    Mat zero_term_;
};

/// H_N on the grid (even extension implicit). T_q-type data get (0, I) prepended.
inline MatrixGrid build_accelerant(const SpectralData& data, const GridSpec& spec, int n_bins) {
    return SpectralAccelerant(data, n_bins).sample(spec);
}

/// ||H_N - H_{N/2}|| in L2(-1, 1).
inline double accelerant_tail(const SpectralAccelerant& h, const GridSpec& spec) {
    const int n = h.n_bins(), half = std::max(1, n / 2);
    if (half == n) return 0.0;
    const auto full = h.sample(spec), part = h.sample_partial(spec, half);
    std::vector<Mat> d(spec.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = full[i] - part[i];
    return std::sqrt(2.0) * l2_norm(MatrixGrid(h.r(), spec, std::move(d)));
}

/// Kernels H_e(x,t) = [H((x-t)/2) + H((x+t)/2)] / 2 and H_o(x,t) = [H((x-t)/2) - H((x+t)/2)] / 2
/// on the full grid square.
struct HeoKernels {
    SquareKernel even;
    SquareKernel odd;
};

namespace accelerant_detail {

/// Fills both kernels from H at half-grid points: hh(k) = H(k h / 2), k = 0..2m.
template <class HalfGrid>
HeoKernels heo_from_half(int r, const GridSpec& spec, HalfGrid&& hh) {
    HeoKernels k{SquareKernel(r, spec), SquareKernel(r, spec)};
    const int m = spec.m();
    parallel_for(m + 1, [&](int i) {
        for (int j = 0; j <= m; ++j) {
            const Mat& a = hh(std::abs(i - j));
            const Mat& b = hh(i + j);
            k.even(i, j) = 0.5 * (a + b);
            k.odd(i, j) = 0.5 * (a - b);
        }
    });
    return k;
}

}  // namespace accelerant_detail

/// From grid samples of H; half-grid values are linearly interpolated.
inline HeoKernels build_heo(const MatrixGrid& h) {
    const GridSpec& spec = h.spec();
    const int m = spec.m();
    std::vector<Mat> half(2 * m + 1);
    for (int k = 0; k <= 2 * m; ++k)
        half[k] = (k % 2 == 0) ? h[k / 2] : Mat(0.5 * (h[k / 2] + h[k / 2 + 1]));
    return accelerant_detail::heo_from_half(h.r(), spec, [&](int k) -> const Mat& { return half[k]; });
}

/// From an exactly evaluable accelerant; no interpolation.
template <class Accelerant>
    requires std::is_invocable_r_v<Mat, const Accelerant&, double>
HeoKernels build_heo(const Accelerant& h, const GridSpec& spec) {
    const int m = spec.m();
    std::vector<Mat> half(2 * m + 1);
    parallel_for(2 * m + 1, [&](int k) { half[k] = h(0.5 * k / m); });
    const int r = static_cast<int>(half[0].rows());
    return accelerant_detail::heo_from_half(r, spec, [&](int k) -> const Mat& { return half[k]; });
}

}  // namespace msl
