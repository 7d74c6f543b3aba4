#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "msl/core/error.hpp"

namespace msl {

using cplx = std::complex<double>;

/// Largest supported matrix dimension r.
inline constexpr int kMaxDim = 8;

/// r x r complex matrix. Storage is dense row-major; the fixed upper bound keeps
/// small-matrix arithmetic off the heap.
using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor, kMaxDim, kMaxDim>;

/// 2r x 2r complex matrix (fundamental-system blocks).
using Mat2 = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 2 * kMaxDim, 2 * kMaxDim>;

using Vec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline constexpr double kPi = std::numbers::pi;

/// Relative tolerance for hermiticity checks.
inline constexpr double kHermitianTol = 1e-12;
/// Relative tolerance below zero admitted for PSD checks.
inline constexpr double kPsdTol = 1e-10;

inline Mat identity(int r) { return Mat::Identity(r, r); }

/// Spectral (operator 2-) norm.
inline double opnorm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

/// Smallest singular value.
inline double sigma_min(const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

/// ||a - a*||, the anti-Hermitian defect (twice the norm of the anti-Hermitian part).
inline double hermitian_defect(const Mat& a) { return opnorm(a - a.adjoint()); }

inline bool is_hermitian(const Mat& a, double rel_tol = kHermitianTol) {
    return hermitian_defect(a) <= rel_tol * (1.0 + opnorm(a));
}

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

/// Eigenvalues of the Hermitian part, ascending.
inline Eigen::VectorXd hermitian_eigenvalues(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Number of eigenvalues of the Hermitian matrix a exceeding rel_tol * ||a||.
inline int numerical_rank(const Mat& a, double rel_tol = 1e-9) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(a);
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (scale == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index k = 0; k < ev.size(); ++k)
        if (ev(k) > rel_tol * scale) ++rank;
    return rank;
}

// ---------------------------------------------------------------------------

/// Uniform grid x_i = i / m on [0, 1].
class GridSpec {
public:
    static constexpr int kMinIntervals = 8;

    explicit GridSpec(int m) : m_(m) {
        if (m < kMinIntervals)
            throw ConfigurationError("grid needs m >= " + fmt_num(kMinIntervals) +
                                     " subintervals, got " + fmt_num(m));
    }

    int m() const noexcept { return m_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(m_) + 1; }
    double h() const noexcept { return 1.0 / m_; }
    double x(int i) const noexcept { return static_cast<double>(i) / m_; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int m_;
};

/// r x r matrix function sampled at the nodes of a GridSpec. Between nodes the
/// function is taken to be piecewise linear.
class MatrixGrid {
public:
    MatrixGrid(int r, GridSpec spec, std::vector<Mat> values, bool hermitian = false)
        : r_(r), spec_(spec), values_(std::move(values)), hermitian_(hermitian) {
        if (r < 1 || r > kMaxDim)
            throw ValidationError("matrix dimension r must be in [1, " + fmt_num(kMaxDim) +
                                  "], got " + fmt_num(r));
        if (values_.size() != spec_.size())
            throw ValidationError("matrix grid needs " + fmt_num(spec_.size()) +
                                  " samples, got " + fmt_num(values_.size()));
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (values_[i].rows() != r || values_[i].cols() != r)
                throw ValidationError("sample " + fmt_num(i) + " is not " + fmt_num(r) +
                                      "x" + fmt_num(r));
            if (hermitian_ && !is_hermitian(values_[i]))
                throw ValidationError("sample " + fmt_num(i) +
                                      " flagged hermitian but is not (defect " +
                                      fmt_num(hermitian_defect(values_[i])) + ")");
        }
    }

    /// Samples f(x_i) of a callable on the grid.
    template <class F>
    static MatrixGrid sample(int r, GridSpec spec, F&& f, bool hermitian = false) {
        std::vector<Mat> v;
        v.reserve(spec.size());
        for (int i = 0; i <= spec.m(); ++i) v.push_back(f(spec.x(i)));
        return MatrixGrid(r, spec, std::move(v), hermitian);
    }

    static MatrixGrid zeros(int r, GridSpec spec) {
        return MatrixGrid(r, spec, std::vector<Mat>(spec.size(), Mat::Zero(r, r)), true);
    }

    int r() const noexcept { return r_; }
    const GridSpec& spec() const noexcept { return spec_; }
    bool hermitian() const noexcept { return hermitian_; }
    const std::vector<Mat>& values() const noexcept { return values_; }
    const Mat& operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Piecewise-linear value at x in [0, 1].
    Mat at(double x) const {
        const int m = spec_.m();
        const double s = std::clamp(x, 0.0, 1.0) * m;
        int i = static_cast<int>(std::floor(s));
        if (i >= m) return values_[m];
        const double t = s - i;
        return (1.0 - t) * values_[i] + t * values_[i + 1];
    }

    /// Elementwise adjoint; hermitian grids are returned unchanged.
    MatrixGrid adjoint() const {
        std::vector<Mat> v;
        v.reserve(values_.size());
        for (const auto& a : values_) v.push_back(a.adjoint());
        return MatrixGrid(r_, spec_, std::move(v), hermitian_);
    }

    /// Largest sample norm.
    double sup_norm() const {
        double s = 0.0;
        for (const auto& a : values_) s = std::max(s, opnorm(a));
        return s;
    }

private:
    int r_;
    GridSpec spec_;
    std::vector<Mat> values_;
    bool hermitian_;
};

/// Matrix function on the triangle {0 <= t <= x <= 1}; K(x_i, t_j) stored for j <= i.
/// Entries above the diagonal are implicitly zero.
class TriangularKernel {
public:
    TriangularKernel(int r, GridSpec spec)
        : r_(r), spec_(spec), values_(count(spec.m()), Mat::Zero(r, r)) {}

    int r() const noexcept { return r_; }
    const GridSpec& spec() const noexcept { return spec_; }

    const Mat& operator()(int i, int j) const { return values_[index(i, j)]; }
    Mat& operator()(int i, int j) { return values_[index(i, j)]; }

    /// Value with the zero extension above the diagonal.
    Mat extended(int i, int j) const { return j <= i ? values_[index(i, j)] : Mat::Zero(r_, r_); }

private:
    static std::size_t count(int m) {
        const auto n = static_cast<std::size_t>(m) + 1;
        return n * (n + 1) / 2;
    }
    static std::size_t index(int i, int j) {
        return static_cast<std::size_t>(i) * (static_cast<std::size_t>(i) + 1) / 2 +
               static_cast<std::size_t>(j);
    }

    int r_;
    GridSpec spec_;
    std::vector<Mat> values_;
};

/// Matrix function on the full square [0,1]^2.
class SquareKernel {
public:
    SquareKernel(int r, GridSpec spec)
        : r_(r), spec_(spec), values_(spec.size() * spec.size(), Mat::Zero(r, r)) {}

    int r() const noexcept { return r_; }
    const GridSpec& spec() const noexcept { return spec_; }

    const Mat& operator()(int i, int j) const { return values_[i * spec_.size() + j]; }
    Mat& operator()(int i, int j) { return values_[i * spec_.size() + j]; }

private:
    int r_;
    GridSpec spec_;
    std::vector<Mat> values_;
};

// ---------------------------------------------------------------------------

struct SpectralEntry {
    double lambda;
    Mat alpha;
};

/// Finite list of (lambda_j, alpha_j) pairs. `includes_zero` marks an S_tau-type dataset
/// whose first entry is the (0, alpha_0) pair; otherwise it is a T_q-type dataset.
class SpectralData {
public:
    SpectralData(int r, bool includes_zero, std::vector<SpectralEntry> entries)
        : r_(r), includes_zero_(includes_zero), entries_(std::move(entries)) {
        validate();
    }

    int r() const noexcept { return r_; }
    bool includes_zero() const noexcept { return includes_zero_; }
    const std::vector<SpectralEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const SpectralEntry& operator[](std::size_t i) const { return entries_[i]; }

    double max_lambda() const { return entries_.empty() ? 0.0 : entries_.back().lambda; }

private:
    void validate() const {
        if (r_ < 1 || r_ > kMaxDim)
            throw ValidationError("matrix dimension r must be in [1, " + fmt_num(kMaxDim) + "]");
        if (includes_zero_) {
            if (entries_.empty() || entries_.front().lambda != 0.0)
                throw ValidationError("dataset marked includes_zero must start with lambda = 0");
        }
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            const auto& e = entries_[k];
            const std::string at = " at index " + fmt_num(k);
            if (!std::isfinite(e.lambda) || e.lambda < 0.0)
                throw ValidationError("negative or non-finite lambda" + at);
            if (!includes_zero_ && e.lambda == 0.0)
                throw ValidationError("zero lambda in a dataset without includes_zero" + at);
            if (k > 0 && !(e.lambda > entries_[k - 1].lambda))
                throw ValidationError("non-increasing lambda" + at);
            if (e.alpha.rows() != r_ || e.alpha.cols() != r_)
                throw ValidationError("alpha has wrong shape" + at);
            const double nrm = opnorm(e.alpha);
            if (!std::isfinite(nrm)) throw ValidationError("non-finite alpha" + at);
            if (nrm == 0.0) throw ValidationError("zero alpha" + at);
            if (hermitian_defect(e.alpha) > kHermitianTol * (1.0 + nrm))
                throw ValidationError("non-Hermitian alpha" + at + " (defect " +
                                      fmt_num(hermitian_defect(e.alpha)) + ")");
            const Eigen::VectorXd ev = hermitian_eigenvalues(e.alpha);
            if (ev(0) < -kPsdTol * nrm)
                throw ValidationError("alpha not positive semidefinite" + at + " (eigenvalue " +
                                      fmt_num(ev(0)) + ")");
            if (includes_zero_ && k == 0 && ev(0) <= kPsdTol * nrm)
                throw ValidationError("alpha_0 must be positive definite");
        }
    }

    int r_;
    bool includes_zero_;
    std::vector<SpectralEntry> entries_;
};

/// phi(1,l,tau), psi(1,l,tau), phi(1,l,-tau), psi(1,l,-tau) at one spectral parameter.
struct BoundaryValues {
    cplx lambda;
    Mat phi_tau;
    Mat psi_tau;
    Mat phi_mtau;
    Mat psi_mtau;
    /// ||phi phi~* + psi(-tau) psi~* - I|| with ~ denoting (conj lambda, -tau*); negative if not computed.
    double identity_residual = -1.0;
};

}  // namespace msl
