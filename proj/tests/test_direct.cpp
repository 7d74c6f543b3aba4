#include <cmath>

#include <gtest/gtest.h>

#include "msl/msl.hpp"
#include "oracles.hpp"

using namespace msl;

namespace {

MatrixGrid constant_tau(int r, int m, const Mat& c) {
    return MatrixGrid::sample(r, GridSpec(m), [&](double) { return c; }, true);
}

MatrixGrid scalar_tau(int m, double c) { return constant_tau(1, m, Mat::Constant(1, 1, c)); }

/// Smooth Hermitian r = 2 potential.
MatrixGrid smooth_tau(int m) {
    return MatrixGrid::sample(2, GridSpec(m), [](double x) {
        Mat a(2, 2);
        a << 0.4 * std::cos(2 * kPi * x), cplx(0.2 * x, 0.3 * std::sin(kPi * x)),
            cplx(0.2 * x, -0.3 * std::sin(kPi * x)), -0.25 + 0.5 * x * x;
        return a;
    }, true);
}

}  // namespace

TEST(Propagate, ZeroPotentialTrig) {
    const auto bv = propagate(MatrixGrid::zeros(1, GridSpec(256)), kPi / 2);
    EXPECT_NEAR(std::abs(bv.phi_tau(0, 0) - 1.0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(bv.psi_tau(0, 0)), 0.0, 1e-10);
}

TEST(Propagate, ZeroLambda) {
    const auto bv = propagate(smooth_tau(64), 0.0);
    EXPECT_LE(opnorm(bv.phi_tau), 1e-12);
}

TEST(Propagate, ConstantCoefficientClosedForm) {
    const double c = 0.5, lam = 4.0, k = std::sqrt(lam * lam - c * c);
    const auto bv = propagate(scalar_tau(512, c), lam);
    EXPECT_NEAR(bv.phi_tau(0, 0).real(), lam * std::sin(k) / k, 1e-8);
    EXPECT_NEAR(bv.phi_tau(0, 0).imag(), 0.0, 1e-12);
}

TEST(Propagate, IdentityResidualSecondOrder) {
    for (cplx lam : {cplx(1.0, 0.0), cplx(7.0, 2.0), cplx(19.0, -1.0)}) {
        const auto bv = propagate(smooth_tau(128), lam);
        EXPECT_LE(bv.identity_residual, 1e-8) << "lambda = " << lam;
    }
}

TEST(WeylM, ZeroPotentialCotangent) {
    const Mat mm = weyl_m(MatrixGrid::zeros(2, GridSpec(256)), kPi / 4);
    EXPECT_LE(opnorm(mm + identity(2)), 1e-9);
}

TEST(WeylM, PoleProximity) {
    try {
        weyl_m(MatrixGrid::zeros(1, GridSpec(256)), kPi);
        FAIL();
    } catch (const PoleProximityError& e) {
        EXPECT_LT(e.sigma_min(), 1e-10);
    }
}

TEST(WeylM, Herglotz) {
    const Mat mm = weyl_m(smooth_tau(256), cplx(2.0, 1.0));
    const Mat im = (mm - mm.adjoint()) / cplx(0.0, 2.0);
    EXPECT_GE(hermitian_eigenvalues(im)(0), -1e-8);
}

TEST(Eigen, ZeroPotential) {
    const auto scan = find_eigenvalues(MatrixGrid::zeros(2, GridSpec(64)), 10.0);
    ASSERT_EQ(scan.roots.size(), 4u);
    for (int n = 0; n < 4; ++n) {
        EXPECT_NEAR(scan.roots[n].lambda, kPi * n, 1e-9);
        EXPECT_EQ(scan.roots[n].multiplicity, 2);
    }
}

TEST(Eigen, ConstantPotential) {
    const auto scan = find_eigenvalues(scalar_tau(256, 0.5), 10.0);
    ASSERT_EQ(scan.roots.size(), 4u);
    for (int n = 1; n <= 3; ++n) EXPECT_NEAR(scan.roots[n].lambda, std::sqrt(kPi * kPi * n * n + 0.25), 1e-8);
}

TEST(Eigen, CoarseScanRejected) {
    EXPECT_THROW(find_eigenvalues(scalar_tau(64, 0.5), 10.0, 1.0), ConfigurationError);
}

TEST(Eigen, BlockDiagonalIsUnionOfScalarSpectra) {
    Mat d = Mat::Zero(2, 2);
    d(1, 1) = 0.5;
    const auto both = find_eigenvalues(constant_tau(2, 256, d), 10.0);
    const auto a = find_eigenvalues(scalar_tau(256, 0.0), 10.0);
    const auto b = find_eigenvalues(scalar_tau(256, 0.5), 10.0);
    ASSERT_EQ(both.roots.size(), a.roots.size() + b.roots.size() - 1);  // lambda_0 shared
    std::vector<double> merged;
    for (std::size_t j = 1; j < a.roots.size(); ++j) merged.push_back(a.roots[j].lambda);
    for (std::size_t j = 1; j < b.roots.size(); ++j) merged.push_back(b.roots[j].lambda);
    std::sort(merged.begin(), merged.end());
    for (std::size_t j = 0; j < merged.size(); ++j) {
        EXPECT_NEAR(both.roots[j + 1].lambda, merged[j], 1e-9);
        EXPECT_EQ(both.roots[j + 1].multiplicity, 1);
    }
}

TEST(Norming, ZeroPotential) {
    const auto res = norming_constants(MatrixGrid::zeros(2, GridSpec(64)), {0.0, kPi, 2 * kPi}, 3 * kPi);
    EXPECT_LE(opnorm(res.alphas[0] - 0.5 * identity(2)), 1e-10);
    EXPECT_LE(opnorm(res.alphas[1] - identity(2)), 1e-10);
    EXPECT_LE(opnorm(res.alphas[2] - identity(2)), 1e-10);
}

TEST(Norming, MatchesFiniteDifferenceOracle) {
    const double c = 0.5;
    const auto fd = oracle::fd_constant_extrapolated(c, 200, 6);
    std::vector<double> lams{0.0};
    for (int n = 1; n <= 5; ++n) lams.push_back(std::sqrt(fd.mu[n]));
    const auto res = norming_constants(scalar_tau(512, c), lams);
    for (int n = 0; n <= 4; ++n) EXPECT_NEAR(res.alphas[n](0, 0).real(), fd.alpha[n], 1e-6) << "n = " << n;
}

TEST(Norming, HermitianBeforeSymmetrization) {
    const auto tau = smooth_tau(256);
    const auto scan = find_eigenvalues(tau, 12.0);
    std::vector<double> lams;
    for (const auto& r : scan.roots) lams.push_back(r.lambda);
    const auto res = norming_constants(tau, lams);
    for (double d : res.hermitian_defect) EXPECT_LE(d, 1e-8);
}

TEST(SpectralData, ZeroPotentialFourBins) {
    const auto res = spectral_data(MatrixGrid::zeros(2, GridSpec(64)), 4);
    ASSERT_EQ(res.data.size(), 5u);
    EXPECT_TRUE(res.data.includes_zero());
    EXPECT_LE(opnorm(res.data[0].alpha - 0.5 * identity(2)), 1e-10);
    for (int n = 1; n <= 4; ++n) {
        EXPECT_NEAR(res.data[n].lambda, kPi * n, 1e-9);
        EXPECT_LE(opnorm(res.data[n].alpha - identity(2)), 1e-9);
    }
}

TEST(SpectralData, ScalarTimesIdentity) {
    const auto res = spectral_data(constant_tau(2, 256, 0.3 * identity(2)), 4);
    ASSERT_EQ(res.data.size(), 5u);
    for (int n = 1; n <= 4; ++n) {
        EXPECT_NEAR(res.data[n].lambda, std::sqrt(kPi * kPi * n * n + 0.09), 1e-8);
        EXPECT_EQ(numerical_rank(res.data[n].alpha), 2);
    }
}

TEST(SpectralData, CountIdentityForSmoothPotential) {
    const auto res = spectral_data(smooth_tau(128), 6);
    int total = 0;
    for (std::size_t j = 1; j < res.data.size(); ++j) {
        EXPECT_GT(res.data[j].lambda, res.data[j - 1].lambda);
        if (bin_of(res.data[j].lambda) <= 6) total += numerical_rank(res.data[j].alpha, 1e-6);
    }
    EXPECT_EQ(total, 6 * 2);
}

TEST(SpectralData, HerglotzPartialSumsConverge) {
    const auto tau = smooth_tau(256);
    const auto res = spectral_data(tau, 32);
    const cplx lam(1.0, 1.0);
    const Mat exact = weyl_m(tau, lam);
    double prev = 1e300;
    for (int level : {4, 8, 16, 32}) {
        Mat s = Mat::Zero(2, 2);
        for (const auto& e : res.data.entries())
            if (e.lambda <= kPi * (level + 0.5)) s += e.alpha / (e.lambda * e.lambda - lam * lam);
        const double err = opnorm(exact - 2.0 * lam * s);
        EXPECT_LT(err, prev) << "level " << level;
        prev = err;
    }
}
