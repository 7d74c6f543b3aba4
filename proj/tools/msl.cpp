// msl: direct, inverse, validate and roundtrip workflows for matrix Sturm-Liouville operators.

#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "msl/msl.hpp"

namespace {

/// Process exit codes.
enum Exit : int {
    kOk = 0,
    kNumerical = 1,     ///< direct-solver failure (pole proximity, contour, extraction, root consistency)
    kIo = 2,
    kAccelerant = 3,
    kInput = 4,
    kConditionFail = 5,
    kInconclusive = 6,
};

struct Common {
    std::optional<int> grid_m;
    std::optional<int> n_bins;
    std::string out;
    std::string config;
    std::optional<int> threads;
    std::string log_level = "info";
};

msl::RunConfig resolve(const Common& c) {
    msl::RunConfig cfg = c.config.empty() ? msl::RunConfig{} : msl::load_config(c.config);
    if (c.grid_m) cfg.grid_m = *c.grid_m;
    if (c.n_bins) cfg.n_bins = *c.n_bins;
    if (c.threads) cfg.threads = *c.threads;
    cfg.validate();
    msl::thread_limit() = cfg.threads;
    return cfg;
}

/// "out.json" -> "out.<tag>.json".
std::string sibling(const std::string& out, const std::string& tag) {
    std::filesystem::path p(out);
    const std::string ext = p.has_extension() ? p.extension().string() : ".json";
    p.replace_extension();
    return p.string() + "." + tag + ext;
}

msl::Progress logger() {
    return [](const std::string& s) { spdlog::info("{}", s); };
}

int cmd_direct(const std::string& input, const Common& c) {
    const msl::RunConfig cfg = resolve(c);
    const msl::MatrixGrid tau = msl::load_matrix_grid(input);
    const auto out = msl::run_direct(tau, cfg, logger());
    for (const auto& w : out.result.warnings) spdlog::warn("{}", w);
    msl::save_spectral_data(c.out, out.result.data, {{"kind", "spectral_data"}, {"config", cfg.to_json()}});
    msl::write_json(sibling(c.out, "diagnostics"), out.diagnostics);
    spdlog::info("wrote {} and {}", c.out, sibling(c.out, "diagnostics"));
    return kOk;
}

int cmd_inverse(const std::string& input, const Common& c) {
    const msl::RunConfig cfg = resolve(c);
    const msl::SpectralData data = msl::load_spectral_data(input);
    const auto out = msl::run_inverse(data, cfg, logger());
    for (const auto& w : out.diagnostics["warnings"]) spdlog::warn("{}", w.get<std::string>());
    const msl::json meta = {{"config", cfg.to_json()}};
    msl::json tau_extra = meta, sigma_extra = meta;
    tau_extra["kind"] = "tau";
    sigma_extra["kind"] = "potential_primitive";
    msl::save_matrix_grid(c.out, out.reconstruction.tau, tau_extra);
    msl::save_matrix_grid(sibling(c.out, "sigma"), out.primitive.sigma, sigma_extra);
    msl::write_json(sibling(c.out, "diagnostics"), out.diagnostics);
    spdlog::info("Krein residual {:.3e}, min pivot {:.3e}", out.reconstruction.krein.residual,
                 out.reconstruction.krein.min_pivot);
    return kOk;
}

int cmd_validate(const std::string& input, const Common& c) {
    const msl::RunConfig cfg = resolve(c);
    const msl::SpectralData data = msl::load_spectral_data(input);
    const msl::ConditionReport rep = msl::run_validate(data, cfg);
    msl::json j = msl::to_json(rep);
    j["config"] = cfg.to_json();
    msl::write_json(c.out, j);
    spdlog::info("A1 {}, A2 {}, A3 {}, A4 {} -> {}", msl::to_string(rep.a1.verdict), msl::to_string(rep.a2.verdict),
                 rep.a34.a3 ? msl::to_string(rep.a34.a3->verdict) : "not_applicable",
                 msl::to_string(rep.a34.a4.verdict), msl::to_string(rep.overall));
    switch (rep.overall) {
        case msl::Verdict::fail: return kConditionFail;
        case msl::Verdict::inconclusive: return kInconclusive;
        default: return kOk;
    }
}

int cmd_roundtrip(const std::string& input, const Common& c) {
    const msl::RunConfig cfg = resolve(c);
    msl::TauSource source;
    if (input.empty()) {
        const msl::SyntheticTau syn(cfg.synthetic_r, cfg.synthetic_order, cfg.synthetic_scale, cfg.seed);
        spdlog::info("synthetic tau: r = {}, order = {}, scale = {}, seed = {}", cfg.synthetic_r, cfg.synthetic_order,
                     cfg.synthetic_scale, cfg.seed);
        source = [syn](int m) { return syn.sample(msl::GridSpec(m)); };
    } else {
        const msl::MatrixGrid tau = msl::load_matrix_grid(input);
        source = [tau](int m) { return msl::resample(tau, m); };
    }
    const msl::RoundtripReport rep = msl::run_roundtrip(source, cfg, logger());
    msl::write_json(c.out, rep.to_json(cfg));
    if (!rep.rederive_error.empty()) spdlog::warn("re-derivation: {}", rep.rederive_error);
    spdlog::info("relative L2 {:.3e}; lambda deviation {:.3e}; alpha deviation {:.3e} -> {}",
                 rep.table[0].error.rel_l2, rep.lambda_dev, rep.alpha_dev, msl::to_string(rep.overall));
    return rep.overall == msl::Verdict::pass ? kOk : kConditionFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Direct and inverse spectral problems for matrix Sturm-Liouville operators"};
    app.require_subcommand(1);
    Common common;
    std::string input;

    auto add_common = [&](CLI::App* sub, const std::string& default_out) {
        sub->footer("Default output: " + default_out);
        sub->add_option("--grid-m", common.grid_m, "grid intervals m (default 256)")->check(CLI::PositiveNumber);
        sub->add_option("--n-bins", common.n_bins, "truncation level N (default 64)")->check(CLI::PositiveNumber);
        sub->add_option("--out", common.out, "output JSON path");
        sub->add_option("--config", common.config, "TOML run configuration");
        sub->add_option("--threads", common.threads, "worker threads (default 1)")->check(CLI::PositiveNumber);
        sub->add_option("--log-level", common.log_level, "trace|debug|info|warn|error|off")
            ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
            ->capture_default_str();
    };

    auto* direct = app.add_subcommand("direct", "potential tau -> spectral data");
    direct->add_option("tau", input, "tau JSON file")->required();
    add_common(direct, "spectral_data.json");

    auto* inverse = app.add_subcommand("inverse", "spectral data -> tau and sigma");
    inverse->add_option("data", input, "spectral data JSON file")->required();
    add_common(inverse, "tau.json");

    auto* validate = app.add_subcommand("validate", "check conditions (A1)-(A4)");
    validate->add_option("data", input, "spectral data JSON file")->required();
    add_common(validate, "conditions.json");

    auto* roundtrip = app.add_subcommand("roundtrip", "tau -> data -> tau with convergence table");
    roundtrip->add_option("tau", input, "tau JSON file (synthetic tau from the config when omitted)");
    add_common(roundtrip, "roundtrip.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInput;
    }

    if (common.out.empty())
        common.out = *direct     ? "spectral_data.json"
                     : *inverse  ? "tau.json"
                     : *validate ? "conditions.json"
                                 : "roundtrip.json";

    auto log = spdlog::stderr_color_mt("msl");
    spdlog::set_default_logger(log);
    spdlog::set_level(spdlog::level::from_str(common.log_level));
    spdlog::set_pattern("[%l] %v");

    try {
        if (*direct) return cmd_direct(input, common);
        if (*inverse) return cmd_inverse(input, common);
        if (*validate) return cmd_validate(input, common);
        return cmd_roundtrip(input, common);
    } catch (const msl::IoError& e) {
        spdlog::error("{}", e.what());
        return kIo;
    } catch (const msl::NotAnAccelerantError& e) {
        spdlog::error("{} (x = {})", e.what(), e.x());
        return kAccelerant;
    } catch (const msl::ParseError& e) {
        if (!e.field().empty())
            spdlog::error("{} (field {}, line {})", e.what(), e.field(), e.line());
        else
            spdlog::error("{} (line {})", e.what(), e.line());
        return kInput;
    } catch (const msl::ValidationError& e) {
        spdlog::error("{}", e.what());
        return kInput;
    } catch (const msl::ShapeError& e) {
        spdlog::error("{}", e.what());
        return kInput;
    } catch (const msl::ConfigurationError& e) {
        spdlog::error("{}", e.what());
        return kInput;
    } catch (const msl::Error& e) {
        spdlog::error("{}", e.what());
        return kNumerical;
    } catch (const std::exception& e) {
        spdlog::error("unexpected: {}", e.what());
        return kNumerical;
    }
}
