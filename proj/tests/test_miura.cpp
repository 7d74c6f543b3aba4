#include <cmath>

#include <gtest/gtest.h>

#include "msl/msl.hpp"

using namespace msl;

namespace {

MatrixGrid scalar(int m, double (*f)(double)) {
    return MatrixGrid::sample(1, GridSpec(m), [&](double x) { return Mat::Constant(1, 1, cplx(f(x), 0)); }, true);
}

}  // namespace

TEST(Miura, ZeroRootsShareQ) {
    // tau = 0 and tau = 1/(1+x) both give q = tau' + tau^2 = 0.
    const auto a = miura(MatrixGrid::zeros(1, GridSpec(512)));
    const auto b = miura(scalar(512, [](double x) { return 1.0 / (1.0 + x); }));
    EXPECT_TRUE(miura_equals(a, b, 1e-6));
    EXPECT_LE(miura_distance(a, b), 1e-6);
}

TEST(Miura, PrimitiveOfConstant) {
    const auto p = miura(scalar(64, [](double) { return 0.5; }));
    for (int i = 0; i <= 64; ++i) EXPECT_NEAR(p.sigma[i](0, 0).real(), 0.5 + 0.25 * i / 64.0, 1e-14);
    EXPECT_TRUE(p.sigma.hermitian());
}

TEST(Miura, DistinguishesDifferentQ) {
    const auto a = miura(MatrixGrid::zeros(1, GridSpec(64)));
    const auto b = miura(scalar(64, [](double x) { return 0.1 * x; }));
    EXPECT_FALSE(miura_equals(a, b, 1e-6));
}

TEST(Miura, ShapeMismatch) {
    EXPECT_THROW(miura_distance(miura(MatrixGrid::zeros(1, GridSpec(32))), miura(MatrixGrid::zeros(1, GridSpec(64)))),
                 ShapeError);
    EXPECT_THROW(miura_distance(miura(MatrixGrid::zeros(1, GridSpec(32))), miura(MatrixGrid::zeros(2, GridSpec(32)))),
                 ShapeError);
}

TEST(Miura, MatrixGaugeWithCommutingRoot) {
    // tau = (1+x)^{-1} P for a projection P solves tau' + tau^2 = 0 as well.
    Mat p(2, 2);
    p << 0.5, 0.5, 0.5, 0.5;
    const auto t = MatrixGrid::sample(2, GridSpec(512), [&](double x) { return Mat(p / (1.0 + x)); }, true);
    EXPECT_TRUE(miura_equals(miura(t), miura(MatrixGrid::zeros(2, GridSpec(512))), 1e-6));
}

TEST(Miura, ConstantAccelerantOutputHasConstantPrimitive) {
    const double c = 0.8;
    const auto t = MatrixGrid::sample(1, GridSpec(512), [&](double x) { return Mat::Constant(1, 1, cplx(c / (1 + c * x), 0)); }, true);
    const auto p = miura(t);
    for (int i = 0; i <= 512; i += 64) EXPECT_NEAR(p.sigma[i](0, 0).real(), c, 1e-6);
    EXPECT_TRUE(miura_equals(p, miura(MatrixGrid::zeros(1, GridSpec(512))), 1e-6));
}

TEST(Miura, ConstantOffsetIsSameQ) {
    const auto t = scalar(64, [](double x) { return std::sin(3 * x); });
    auto p = miura(t);
    auto q = p;
    std::vector<Mat> shifted(p.sigma.values());
    for (auto& a : shifted) a.array() += 2.5;
    q.sigma = MatrixGrid(1, p.sigma.spec(), shifted, true);
    EXPECT_TRUE(miura_equals(p, p, 0.0));
    EXPECT_TRUE(miura_equals(p, q, 1e-12));
}
