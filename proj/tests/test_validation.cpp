#include <cmath>

#include <gtest/gtest.h>

#include "msl/msl.hpp"

using namespace msl;

namespace {

SpectralData lines(int r, int n, double (*shift)(int), int skip = 0) {
    std::vector<SpectralEntry> e{{0.0, 0.5 * identity(r)}};
    for (int k = 1; k <= n; ++k)
        if (k != skip) e.push_back({kPi * k + shift(k), identity(r)});
    return SpectralData(r, true, std::move(e));
}

double none(int) { return 0.0; }

SpectralData nu0(int r, int n) { return lines(r, n, none); }

/// Correlation of grid samples with cos(pi x) or sin(pi x).
double correlation(const std::vector<double>& v, const GridSpec& spec, bool cosine) {
    double vc = 0.0, vv = 0.0, cc = 0.0;
    for (int i = 0; i <= spec.m(); ++i) {
        const double c = cosine ? std::cos(kPi * spec.x(i)) : std::sin(kPi * spec.x(i));
        vc += v[i] * c;
        vv += v[i] * v[i];
        cc += c * c;
    }
    return std::abs(vc) / std::sqrt(vv * cc);
}

}  // namespace

TEST(A1, Nu0) {
    const auto rep = check_a1(nu0(1, 16), 16);
    EXPECT_EQ(rep.tilde_sum, 0.0);
    EXPECT_EQ(rep.beta_sum, 0.0);
    EXPECT_EQ(rep.max_bin_count, 1);
    EXPECT_EQ(rep.verdict, Verdict::pass);
}

TEST(A1, SummableShiftsFlatten) {
    const auto d = lines(1, 64, [](int k) { return 1.0 / k; });
    const auto rep = check_a1(d, 64);
    double direct = 0.0;
    for (int k = 1; k <= 64; ++k) direct += 1.0 / (k * k);
    EXPECT_NEAR(rep.tilde_sum, direct, 1e-12);
    EXPECT_EQ(rep.verdict, Verdict::pass);
}

TEST(A1, ConstantShiftFails) {
    const auto rep = check_a1(lines(1, 64, [](int) { return 0.4; }), 64);
    EXPECT_NEAR(rep.tilde_sum, 64 * 0.16, 1e-10);
    EXPECT_EQ(rep.verdict, Verdict::fail);
}

TEST(A1, ShortDataInconclusive) {
    EXPECT_EQ(check_a1(nu0(1, 8), 16).verdict, Verdict::inconclusive);
}

TEST(A2, Nu0) {
    const auto rep = check_a2(nu0(2, 10), 10);
    ASSERT_TRUE(rep.n0.has_value());
    EXPECT_EQ(*rep.n0, 1);
    EXPECT_EQ(rep.verdict, Verdict::pass);
}

TEST(A2, CompensatedDeficit) {
    // r = 2: a rank-one alpha in bin 3 and an extra rank-one entry in bin 4.
    Mat p = Mat::Zero(2, 2);
    p(0, 0) = 1.0;
    std::vector<SpectralEntry> e{{0.0, 0.5 * identity(2)}};
    for (int k = 1; k <= 8; ++k) {
        if (k == 3) {
            e.push_back({kPi * 3, p});
        } else if (k == 4) {
            e.push_back({kPi * 4, identity(2)});
            e.push_back({kPi * 4 + 0.2, p});
        } else {
            e.push_back({kPi * k, identity(2)});
        }
    }
    const auto rep = check_a2(SpectralData(2, true, e), 8);
    ASSERT_TRUE(rep.n0.has_value());
    EXPECT_EQ(*rep.n0, 4);
    EXPECT_EQ(rep.counts[2], 5);
}

TEST(A2, DeletedEntryFails) {
    const auto rep = check_a2(lines(1, 10, none, 3), 10);
    EXPECT_FALSE(rep.n0.has_value());
    EXPECT_EQ(rep.verdict, Verdict::fail);
}

TEST(Completeness, Nu0IsIdentity) {
    const auto [e, o] = completeness_matrices(nu0(1, 8), GridSpec(32), 8);
    EXPECT_LE((e - Eigen::MatrixXcd::Identity(e.rows(), e.cols())).norm(), 1e-12);
    EXPECT_LE((o - Eigen::MatrixXcd::Identity(o.rows(), o.cols())).norm(), 1e-12);
}

TEST(Completeness, DeletedLineHasNullDirections) {
    const GridSpec spec(128);
    const auto d = lines(1, 10, none, 1);
    const auto rep = check_a3_a4(d, spec, 10);
    ASSERT_TRUE(rep.a3.has_value());
    EXPECT_LE(rep.a3->min_eig, 1e-4);
    EXPECT_EQ(rep.a3->verdict, Verdict::fail);
    EXPECT_GE(correlation(rep.a3->near_null, spec, true), 0.99);
    EXPECT_LE(rep.a4.min_eig, 1e-4);
    EXPECT_GE(correlation(rep.a4.near_null, spec, false), 0.99);
}

TEST(A34, Nu0Passes) {
    const auto rep = check_a3_a4(nu0(2, 8), GridSpec(32), 8);
    EXPECT_NEAR(rep.a3->min_eig, 1.0, 1e-10);
    EXPECT_NEAR(rep.a4.min_eig, 1.0, 1e-10);
    EXPECT_EQ(rep.a3->verdict, Verdict::pass);
    EXPECT_EQ(rep.a4.verdict, Verdict::pass);
}

TEST(A34, GenuinePotentialPasses) {
    const auto tau = MatrixGrid::sample(2, GridSpec(128), [](double x) {
        Mat a(2, 2);
        a << 0.3 * std::cos(2 * kPi * x), cplx(0.1, 0.2 * x), cplx(0.1, -0.2 * x), 0.2 - 0.4 * x;
        return a;
    }, true);
    const auto data = spectral_data(tau, 16).data;
    const auto rep = check_conditions(data, GridSpec(64), 16);
    EXPECT_GT(rep.a34.a3->min_eig, 0.05);
    EXPECT_GT(rep.a34.a4.min_eig, 0.05);
    EXPECT_EQ(rep.a2.verdict, Verdict::pass);
}

TEST(A34, DataWithoutZeroEntrySkipsA3) {
    std::vector<SpectralEntry> e;
    for (int k = 1; k <= 8; ++k) e.push_back({kPi * k, identity(1)});
    const auto rep = check_conditions(SpectralData(1, false, e), GridSpec(32), 8);
    EXPECT_FALSE(rep.a34.a3.has_value());
    EXPECT_EQ(to_json(rep)["a3"]["verdict"], "not_applicable");
}

TEST(AccelerantPositivity, Examples) {
    const GridSpec spec(64);
    auto constant = [&](double c) {
        return MatrixGrid::sample(1, spec, [&](double) { return Mat::Constant(1, 1, cplx(c, 0)); }, true);
    };
    EXPECT_NEAR(accelerant_positivity(constant(0.0), spec), 1.0, 1e-14);
    EXPECT_LE(accelerant_positivity(constant(-2.0), spec), 0.0);
    EXPECT_GT(accelerant_positivity(constant(0.8), spec), 0.0);
}

TEST(Conditions, ShortDataAreInconclusive) {
    const auto rep = check_conditions(nu0(1, 8), GridSpec(32), 12);
    EXPECT_FALSE(rep.covered);
    EXPECT_EQ(rep.evaluated_bins, 8);
    EXPECT_EQ(rep.overall, Verdict::inconclusive);
}

TEST(Conditions, ReportJson) {
    const auto j = to_json(check_conditions(nu0(1, 8), GridSpec(32), 8));
    EXPECT_EQ(j["kind"], "condition_report");
    EXPECT_EQ(j["overall"], "pass");
    EXPECT_EQ(j["a2"]["n0"], 1);
    EXPECT_EQ(j["a3"]["near_null"].size(), 33u);
}

TEST(Factorization, ZeroAccelerantIsExact) {
    const auto d = factorization_defect([](double) { return Mat::Zero(1, 1).eval(); }, GridSpec(16));
    EXPECT_LE(d.neumann, 1e-14);
    EXPECT_LE(d.dirichlet, 1e-14);
}

TEST(Factorization, SecondOrderForSmoothAccelerant) {
    auto hf = [](double s) { return Mat::Constant(1, 1, cplx(0.5 * std::cos(3 * s) + 0.2, 0)); };
    const auto a = factorization_defect(hf, GridSpec(32)), b = factorization_defect(hf, GridSpec(64));
    EXPECT_LE(b.neumann, 1e-3);
    EXPECT_GT(a.neumann / b.neumann, 3.0);
    EXPECT_GT(a.dirichlet / b.dirichlet, 3.0);
}
