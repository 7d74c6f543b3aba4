#pragma once

#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "msl/accelerant/accelerant.hpp"
#include "msl/core/io.hpp"
#include "msl/core/quadrature.hpp"
#include "msl/core/types.hpp"
#include "msl/direct/propagate.hpp"
#include "msl/direct/spectral.hpp"
#include "msl/krein/krein.hpp"
#include "msl/miura/miura.hpp"
#include "msl/pipeline/config.hpp"
#include "msl/validation/conditions.hpp"
#include "msl/validation/report.hpp"

namespace msl {

/// Progress messages from long runs; may be empty.
using Progress = std::function<void(const std::string&)>;

namespace pipeline_detail {

inline void say(const Progress& p, const std::string& s) {
    if (p) p(s);
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace pipeline_detail

/// tau on the grid with m intervals; piecewise-linear resampling when the grids differ.
inline MatrixGrid resample(const MatrixGrid& tau, int m) {
    if (tau.spec().m() == m) return tau;
    return MatrixGrid::sample(tau.r(), GridSpec(m), [&](double x) { return tau.at(x); }, tau.hermitian());
}

/// ||a - b||_2 / ||b||_2 on the grid (absolute when b = 0), and the sup-norm difference.
struct GridError {
    double rel_l2 = 0.0;
    double linf = 0.0;
};

inline GridError grid_error(const MatrixGrid& a, const MatrixGrid& b) {
    if (!(a.spec() == b.spec()) || a.r() != b.r()) throw ShapeError("grids differ");
    std::vector<Mat> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    const MatrixGrid diff(a.r(), a.spec(), std::move(d));
    const double nb = l2_norm(b);
    return {l2_norm(diff) / (nb > 0.0 ? nb : 1.0), diff.sup_norm()};
}

// --------------------------------------------------------------------------- direct

struct DirectOutput {
    DirectResult result;
    json diagnostics;
};

inline DirectOutput run_direct(const MatrixGrid& tau_in, const RunConfig& cfg, const Progress& progress = {}) {
    using namespace pipeline_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const MatrixGrid tau = resample(tau_in, cfg.grid_m);
    say(progress, "direct: scanning (0, " + fmt_num(cfg.effective_lambda_max()) + "] on m = " + fmt_num(cfg.grid_m));
    DirectResult res = spectral_data(tau, cfg.n_bins, cfg.scan_step, cfg.lambda_max);

    json eig = json::array();
    for (std::size_t j = 0; j < res.records.size(); ++j) {
        const auto& rec = res.records[j];
        const BoundaryValues bv = propagate(tau, rec.lambda, true);
        eig.push_back({{"lambda", rec.lambda},
                       {"multiplicity", rec.multiplicity},
                       {"identity_residual", bv.identity_residual},
                       {"alpha_hermitian_defect", res.alpha_hermitian_defect[j]}});
    }
    const A1Report a1 = check_a1(res.data, cfg.n_bins);
    json diag = {{"kind", "direct_diagnostics"},
                 {"config", cfg.to_json()},
                 {"evaluations", res.evaluations},
                 {"warnings", res.warnings},
                 {"eigenvalues", std::move(eig)},
                 {"a1", {{"tilde_trend", a1.tilde_trend},
                         {"beta_trend", a1.beta_trend},
                         {"max_bin_count", a1.max_bin_count}}}};
    say(progress, "direct: " + fmt_num(res.data.size()) + " entries in " + fmt_num(seconds_since(t0)) + " s");
    return {std::move(res), std::move(diag)};
}

// --------------------------------------------------------------------------- inverse

struct InverseOutput {
    Reconstruction reconstruction;
    PotentialPrimitive primitive;
    json diagnostics;
};

/// s1..s4: measure -> truncated accelerant (with (0, I) prepended for data without the zero
/// entry) -> Krein solve -> tau = Theta(H); plus sigma = miura(tau).
inline InverseOutput run_inverse(const SpectralData& data, const RunConfig& cfg, const Progress& progress = {}) {
    using namespace pipeline_detail;
    const auto t0 = std::chrono::steady_clock::now();
    const GridSpec spec(cfg.grid_m);
    const SpectralAccelerant h(data, cfg.n_bins);
    say(progress, "inverse: Krein solve on m = " + fmt_num(cfg.grid_m) + " with " + fmt_num(cfg.n_bins) + " bins");
    Reconstruction rec = reconstruct(h, spec);
    PotentialPrimitive prim = miura(rec.tau);
    const BinDecomposition& bd = h.bins();
    json diag = {{"kind", "inverse_diagnostics"},
                 {"config", cfg.to_json()},
                 {"prepended_zero", !data.includes_zero()},
                 {"krein_residual", rec.krein.residual},
                 {"min_pivot", rec.krein.min_pivot},
                 {"accelerant_tail", accelerant_tail(h, spec)},
                 {"tau_hermitian_defect", rec.tau_hermitian_defect},
                 {"beyond_truncation", bd.beyond.size()},
                 {"boundary_ties", bd.boundary_ties.size()},
                 {"warnings", bd.warnings}};
    say(progress, "inverse: done in " + fmt_num(seconds_since(t0)) + " s");
    return {std::move(rec), std::move(prim), std::move(diag)};
}

// --------------------------------------------------------------------------- validate

inline ConditionReport run_validate(const SpectralData& data, const RunConfig& cfg) {
    return check_conditions(data, GridSpec(cfg.grid_m), cfg.n_bins);
}

// --------------------------------------------------------------------------- roundtrip

/// Relative L2 error below which the refinement check counts as converged.
inline constexpr double kRefinementFloor = 1e-8;

struct RoundtripCell {
    int n_bins = 0;
    int m = 0;
    GridError error;
    double seconds = 0.0;
};

struct RoundtripReport {
    std::vector<RoundtripCell> table;  ///< (N, m), (2N, m), (N, 2m), (2N, 2m)
    MatrixGrid tau_hat = MatrixGrid::zeros(1, GridSpec(GridSpec::kMinIntervals));  ///< reconstruction at (N, m)
    std::size_t compared = 0;          ///< spectral entries compared in the re-derivation
    double lambda_dev = std::numeric_limits<double>::infinity();
    double alpha_dev = std::numeric_limits<double>::infinity();
    std::string rederive_error;        ///< non-empty if the re-derivation failed
    bool miura_consistent = false;     ///< sigma(tau_hat) vs sigma(tau) within the miura tolerance
    double miura_distance = 0.0;
    Verdict rel_l2_verdict = Verdict::fail;
    Verdict refinement_verdict = Verdict::fail;
    Verdict lambda_verdict = Verdict::fail;
    Verdict alpha_verdict = Verdict::fail;
    Verdict overall = Verdict::fail;
    json to_json(const RunConfig& cfg) const;
};

/// Source of the potential on a grid with the given number of intervals.
using TauSource = std::function<MatrixGrid(int m)>;

/// direct -> inverse at (N, m) and the refinements 2N, 2m; the spectral data of the (N, m)
/// reconstruction are re-derived on its own grid and compared with the input data.
inline RoundtripReport run_roundtrip(const TauSource& tau_on, const RunConfig& cfg, const Progress& progress = {}) {
    using namespace pipeline_detail;
    const int n = cfg.n_bins, m = cfg.grid_m;
    std::optional<SpectralData> base_data;
    std::optional<MatrixGrid> base_hat, base_tau;
    RoundtripReport rep;

    for (const auto& [nn, mm] : {std::pair{n, m}, std::pair{2 * n, m}, std::pair{n, 2 * m}, std::pair{2 * n, 2 * m}}) {
        const auto t0 = std::chrono::steady_clock::now();
        RunConfig c = cfg;
        c.n_bins = nn;
        c.grid_m = mm;
        if (cfg.lambda_max) c.lambda_max = *cfg.lambda_max * nn / n;
        say(progress, "roundtrip: n_bins = " + fmt_num(nn) + ", m = " + fmt_num(mm));
        const MatrixGrid tm = tau_on(mm);
        const DirectResult d = spectral_data(tm, nn, c.scan_step, c.lambda_max);
        const Reconstruction rec = reconstruct(SpectralAccelerant(d.data, nn), GridSpec(mm));
        rep.table.push_back({nn, mm, grid_error(rec.tau, tm), seconds_since(t0)});
        say(progress, "roundtrip: relative L2 error " + fmt_num(rep.table.back().error.rel_l2) + " (" +
                          fmt_num(rep.table.back().seconds) + " s)");
        if (nn == n && mm == m) {
            base_data = d.data;
            base_hat = rec.tau;
            base_tau = tm;
        }
    }
    rep.tau_hat = *base_hat;

    say(progress, "roundtrip: re-deriving spectral data of the reconstruction");
    try {
        const DirectResult d2 = spectral_data(*base_hat, n, cfg.scan_step, cfg.lambda_max);
        rep.compared = std::min(d2.data.size(), base_data->size());
        if (d2.data.size() != base_data->size()) {
            rep.rederive_error = "entry count " + fmt_num(d2.data.size()) + " differs from input " +
                                 fmt_num(base_data->size());
        } else {
            rep.lambda_dev = rep.alpha_dev = 0.0;
            for (std::size_t j = 0; j < rep.compared; ++j) {
                rep.lambda_dev = std::max(rep.lambda_dev, std::abs(d2.data[j].lambda - (*base_data)[j].lambda));
                rep.alpha_dev = std::max(rep.alpha_dev, opnorm(d2.data[j].alpha - (*base_data)[j].alpha));
            }
        }
    } catch (const Error& e) {
        rep.rederive_error = e.what();
    }
    rep.miura_distance = miura_distance(miura(*base_hat), miura(*base_tau));
    rep.miura_consistent = rep.miura_distance <= cfg.tolerance("miura");

    auto pf = [](bool ok) { return ok ? Verdict::pass : Verdict::fail; };
    rep.rel_l2_verdict = pf(rep.table[0].error.rel_l2 <= cfg.tolerance("roundtrip_rel_l2"));
    // At the solver's own precision further refinement cannot show a decrease.
    rep.refinement_verdict = pf(rep.table[3].error.rel_l2 < rep.table[0].error.rel_l2 ||
                                rep.table[0].error.rel_l2 <= kRefinementFloor);
    rep.lambda_verdict = pf(rep.rederive_error.empty() && rep.lambda_dev <= cfg.tolerance("roundtrip_lambda"));
    rep.alpha_verdict = pf(rep.rederive_error.empty() && rep.alpha_dev <= cfg.tolerance("roundtrip_alpha"));
    rep.overall = validation_detail::combine(
        {rep.rel_l2_verdict, rep.refinement_verdict, rep.lambda_verdict, rep.alpha_verdict});
    return rep;
}

/// Grid input; refinements use its piecewise-linear interpolant.
inline RoundtripReport run_roundtrip(const MatrixGrid& tau, const RunConfig& cfg, const Progress& progress = {}) {
    return run_roundtrip([&](int m) { return resample(tau, m); }, cfg, progress);
}

inline json RoundtripReport::to_json(const RunConfig& cfg) const {
    json rows = json::array();
    for (const auto& c : table)
        rows.push_back({{"n_bins", c.n_bins}, {"m", c.m}, {"rel_l2", c.error.rel_l2}, {"linf", c.error.linf}});
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"kind", "roundtrip_report"},
            {"config", cfg.to_json()},
            {"table", std::move(rows)},
            {"rederived", {{"compared", compared},
                           {"lambda_dev", num(lambda_dev)},
                           {"alpha_dev", num(alpha_dev)},
                           {"error", rederive_error}}},
            {"miura", {{"distance", miura_distance}, {"consistent", miura_consistent}}},
            {"verdicts", {{"rel_l2", msl::to_string(rel_l2_verdict)},
                          {"refinement", msl::to_string(refinement_verdict)},
                          {"lambda", msl::to_string(lambda_verdict)},
                          {"alpha", msl::to_string(alpha_verdict)}}},
            {"overall", msl::to_string(overall)}};
}

}  // namespace msl
