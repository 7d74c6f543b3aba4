#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "msl/msl.hpp"

using namespace msl;

namespace {

const std::string kSamples = MSL_SAMPLES_DIR;

SpectralData nu0(int r, int n) {
    std::vector<SpectralEntry> e{{0.0, 0.5 * identity(r)}};
    for (int k = 1; k <= n; ++k) e.push_back({kPi * k, identity(r)});
    return SpectralData(r, true, std::move(e));
}

RunConfig small(int m, int n) {
    RunConfig c;
    c.grid_m = m;
    c.n_bins = n;
    return c;
}

}  // namespace

TEST(Config, Defaults) {
    const RunConfig c = parse_config("");
    EXPECT_EQ(c.grid_m, 256);
    EXPECT_EQ(c.n_bins, 64);
    EXPECT_DOUBLE_EQ(c.effective_lambda_max(), kPi * 64.5);
    EXPECT_DOUBLE_EQ(c.tolerance("roundtrip_lambda"), 1e-6);
    EXPECT_THROW(c.tolerance("nonsense"), ConfigurationError);
}

TEST(Config, SampleFilesParse) {
    const RunConfig d = load_config(kSamples + "/default.toml");
    EXPECT_EQ(d.synthetic_r, 2);
    EXPECT_EQ(d.synthetic_order, 3);
    const RunConfig s = load_config(kSamples + "/roundtrip_small.toml");
    EXPECT_EQ(s.grid_m, 64);
    EXPECT_EQ(s.seed, 7u);
    EXPECT_DOUBLE_EQ(s.tolerance("roundtrip_lambda"), 1e-2);
    EXPECT_DOUBLE_EQ(s.tolerance("miura"), 1e-6);
}

TEST(Config, WrongTypeNamesFieldAndLine) {
    try {
        parse_config("n_bins = 8\n\ngrid_m = \"many\"\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "grid_m");
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(parse_config("gridm = 8\n"), ParseError);
    EXPECT_THROW(parse_config("[tolerances]\nroundtrip = 1e-3\n"), ParseError);
    EXPECT_THROW(parse_config("[synthetic]\ncolour = 1\n"), ParseError);
}

TEST(Config, SyntaxErrorReportsLine) {
    try {
        parse_config("grid_m = 64\nn_bins = = 3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Config, RangeChecks) {
    EXPECT_THROW(parse_config("grid_m = 4\n"), ConfigurationError);
    EXPECT_THROW(parse_config("scan_step = 1.0\n"), ConfigurationError);
    EXPECT_THROW(parse_config("lambda_max = 2.0\n"), ConfigurationError);
    EXPECT_THROW(parse_config("[tolerances]\nmiura = -1\n"), ConfigurationError);
}

TEST(Synthetic, DeterministicAndHermitian) {
    const SyntheticTau a(2, 3, 0.3, 42), b(2, 3, 0.3, 42), c(2, 3, 0.3, 43);
    for (double x : {0.0, 0.21, 0.5, 1.0}) {
        EXPECT_EQ((a(x) - b(x)).norm(), 0.0);
        EXPECT_GT((a(x) - c(x)).norm(), 0.0);
        EXPECT_LE(hermitian_defect(a(x)), 1e-15);
    }
    EXPECT_TRUE(a.sample(GridSpec(32)).hermitian());
}

TEST(Pipeline, ResampleAndGridError) {
    const auto t = MatrixGrid::sample(1, GridSpec(16), [](double x) { return Mat::Constant(1, 1, cplx(2 * x, 0)); }, true);
    const auto r = resample(t, 64);
    EXPECT_EQ(r.spec().m(), 64);
    EXPECT_NEAR(r[8](0, 0).real(), 0.25, 1e-15);
    EXPECT_EQ(grid_error(r, r).rel_l2, 0.0);
    const auto z = MatrixGrid::zeros(1, GridSpec(64));
    EXPECT_NEAR(grid_error(r, z).linf, 2.0, 1e-15);  // absolute error against zero
}

TEST(Pipeline, DirectZeroPotential) {
    const auto out = run_direct(MatrixGrid::zeros(2, GridSpec(64)), small(64, 4));
    ASSERT_EQ(out.result.data.size(), 5u);
    EXPECT_EQ(out.diagnostics["kind"], "direct_diagnostics");
    EXPECT_EQ(out.diagnostics["eigenvalues"].size(), 5u);
}

TEST(Pipeline, InverseNu0GivesZero) {
    const auto out = run_inverse(nu0(1, 8), small(64, 8));
    EXPECT_LE(out.reconstruction.tau.sup_norm(), 1e-14);
    EXPECT_LE(out.primitive.sigma.sup_norm(), 1e-14);
    EXPECT_EQ(out.diagnostics["prepended_zero"], false);
}

TEST(Pipeline, InverseMu0IsMiuraRootOfZero) {
    std::vector<SpectralEntry> e;
    for (int k = 1; k <= 64; ++k) e.push_back({kPi * k, identity(1)});
    const auto out = run_inverse(SpectralData(1, false, e), small(512, 64));
    EXPECT_EQ(out.diagnostics["prepended_zero"], true);
    // H = I, so tau = 1/(1+x) and q = 0.
    EXPECT_NEAR(out.reconstruction.tau[512](0, 0).real(), 0.5, 1e-10);
    EXPECT_TRUE(miura_equals(out.primitive, miura(MatrixGrid::zeros(1, GridSpec(512))), 1e-6));
}

TEST(Pipeline, InverseRejectsNonAccelerant) {
    // nu_0 without the line at pi: H = -2 cos(2 pi s) makes I + H singular on [0, 1].
    const SpectralData bad = load_spectral_data(kSamples + "/bad_accelerant.json");
    try {
        run_inverse(bad, small(64, 3));
        FAIL();
    } catch (const NotAnAccelerantError& e) {
        EXPECT_GT(e.x(), 0.9);
    }
}

TEST(Pipeline, ValidateNu0Passes) {
    EXPECT_EQ(run_validate(nu0(1, 8), small(64, 8)).overall, Verdict::pass);
}

TEST(Pipeline, RoundtripZero) {
    const RoundtripReport rep = run_roundtrip(MatrixGrid::zeros(2, GridSpec(64)), small(64, 4));
    ASSERT_EQ(rep.table.size(), 4u);
    for (const auto& c : rep.table) EXPECT_LE(c.error.linf, 1e-8);
    EXPECT_LE(rep.lambda_dev, 1e-8);
    EXPECT_TRUE(rep.miura_consistent);
    EXPECT_EQ(rep.overall, Verdict::pass);
}

TEST(Pipeline, RoundtripConstantHalf) {
    const auto tau = MatrixGrid::sample(1, GridSpec(64), [](double) { return Mat::Constant(1, 1, cplx(0.5, 0)); }, true);
    RunConfig cfg = small(64, 16);
    const RoundtripReport rep = run_roundtrip(tau, cfg);
    EXPECT_LE(rep.table[0].error.rel_l2, 5e-2);
    EXPECT_LT(rep.table[3].error.rel_l2, rep.table[0].error.rel_l2);
    EXPECT_EQ(rep.rederive_error, "");
}

TEST(Pipeline, RoundtripReportIsDeterministic) {
    const RunConfig cfg = load_config(kSamples + "/roundtrip_small.toml");
    const SyntheticTau syn(cfg.synthetic_r, cfg.synthetic_order, cfg.synthetic_scale, cfg.seed);
    const TauSource src = [&](int m) { return syn.sample(GridSpec(m)); };
    const std::string a = run_roundtrip(src, cfg).to_json(cfg).dump();
    const std::string b = run_roundtrip(src, cfg).to_json(cfg).dump();
    EXPECT_EQ(a, b);
    EXPECT_NE(a.find("\"roundtrip_report\""), std::string::npos);
}

TEST(Pipeline, ThreadCountDoesNotChangeResults) {
    const SyntheticTau syn(2, 2, 0.3, 5);
    const auto tau = syn.sample(GridSpec(64));
    const int saved = thread_limit();
    thread_limit() = 1;
    const auto a = run_direct(tau, small(64, 6));
    const auto ia = run_inverse(a.result.data, small(64, 6));
    thread_limit() = 3;
    const auto b = run_direct(tau, small(64, 6));
    const auto ib = run_inverse(b.result.data, small(64, 6));
    thread_limit() = saved;
    EXPECT_EQ(to_json(a.result.data).dump(), to_json(b.result.data).dump());
    EXPECT_EQ(to_json(ia.reconstruction.tau).dump(), to_json(ib.reconstruction.tau).dump());
}
