#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <tomlplusplus/toml.hpp>

#include "msl/core/error.hpp"
#include "msl/core/io.hpp"
#include "msl/core/types.hpp"
#include "msl/direct/spectral.hpp"

namespace msl {

/// Settings of one run. Loaded from TOML, then overridden by command-line flags.
struct RunConfig {
    int grid_m = 256;
    int n_bins = 64;
    std::optional<double> lambda_max;  ///< default pi (n_bins + 1/2)
    double scan_step = 0.1;
    std::uint64_t seed = 42;
    int threads = 1;
    /// Named thresholds used by roundtrip and inverse verdicts.
    std::map<std::string, double> tolerances = default_tolerances();
    /// Synthetic potential used when roundtrip gets no input file.
    int synthetic_r = 2;
    int synthetic_order = 3;
    double synthetic_scale = 0.3;

    static std::map<std::string, double> default_tolerances() {
        return {{"roundtrip_rel_l2", 5e-2}, {"roundtrip_lambda", 1e-6}, {"roundtrip_alpha", 1e-3},
                {"miura", 1e-6}};
    }

    double effective_lambda_max() const { return lambda_max.value_or(bins_lambda_max(n_bins)); }

    double tolerance(const std::string& name) const {
        const auto it = tolerances.find(name);
        if (it == tolerances.end()) throw ConfigurationError("unknown tolerance '" + name + "'");
        return it->second;
    }

    void validate() const {
        if (grid_m < GridSpec::kMinIntervals)
            throw ConfigurationError("grid_m must be >= " + fmt_num(GridSpec::kMinIntervals));
        if (n_bins < 1) throw ConfigurationError("n_bins must be positive");
        if (lambda_max && !(*lambda_max >= kPi)) throw ConfigurationError("lambda_max must be >= pi");
        if (!(scan_step > 0.0 && scan_step < 0.25 * kPi)) throw ConfigurationError("scan_step must be in (0, pi/4)");
        if (seed == 0) throw ConfigurationError("seed must be positive");
        if (threads < 1) throw ConfigurationError("threads must be positive");
        for (const auto& [k, v] : tolerances)
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigurationError("tolerance '" + k + "' must be positive");
        if (synthetic_r < 1 || synthetic_r > kMaxDim) throw ConfigurationError("synthetic.r out of range");
        if (synthetic_order < 0) throw ConfigurationError("synthetic.order must be >= 0");
        if (!(synthetic_scale > 0.0)) throw ConfigurationError("synthetic.scale must be positive");
    }

    json to_json() const {
        return {{"grid_m", grid_m},
                {"n_bins", n_bins},
                {"lambda_max", effective_lambda_max()},
                {"scan_step", scan_step},
                {"seed", seed},
                {"threads", threads},
                {"tolerances", tolerances},
                {"synthetic", {{"r", synthetic_r}, {"order", synthetic_order}, {"scale", synthetic_scale}}}};
    }
};

namespace config_detail {

[[noreturn]] inline void bad(const toml::node& n, const std::string& field, const std::string& what) {
    throw ParseError("config field '" + field + "': " + what, n.source().begin.line, field);
}

inline long long get_int(const toml::node& n, const std::string& field) {
    if (auto v = n.value_exact<std::int64_t>()) return *v;
    bad(n, field, "expected an integer");
}

inline double get_real(const toml::node& n, const std::string& field) {
    if (auto v = n.value<double>()) return *v;  // integers are accepted as reals
    bad(n, field, "expected a number");
}

}  // namespace config_detail

/// Parses TOML text. Unknown keys are rejected so typos do not pass silently.
inline RunConfig parse_config(const std::string& text, const std::string& source = "config") {
    using namespace config_detail;
    toml::table tbl;
    try {
        tbl = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        throw ParseError("malformed TOML in " + source + ": " + std::string(e.description()),
                         e.source().begin.line, "");
    }
    RunConfig c;
    for (auto&& [key, node] : tbl) {
        const std::string k(key.str());
        if (k == "grid_m") c.grid_m = static_cast<int>(get_int(node, k));
        else if (k == "n_bins") c.n_bins = static_cast<int>(get_int(node, k));
        else if (k == "lambda_max") c.lambda_max = get_real(node, k);
        else if (k == "scan_step") c.scan_step = get_real(node, k);
        else if (k == "seed") {
            const long long s = get_int(node, k);
            if (s <= 0) bad(node, k, "must be positive");
            c.seed = static_cast<std::uint64_t>(s);
        } else if (k == "threads") c.threads = static_cast<int>(get_int(node, k));
        else if (k == "tolerances") {
            const toml::table* t = node.as_table();
            if (!t) bad(node, k, "expected a table");
            for (auto&& [tk, tv] : *t) {
                const std::string name(tk.str());
                if (!c.tolerances.count(name)) bad(tv, k + "." + name, "unknown tolerance");
                c.tolerances[name] = get_real(tv, k + "." + name);
            }
        } else if (k == "synthetic") {
            const toml::table* t = node.as_table();
            if (!t) bad(node, k, "expected a table");
            for (auto&& [sk, sv] : *t) {
                const std::string name(sk.str()), f = k + "." + name;
                if (name == "r") c.synthetic_r = static_cast<int>(get_int(sv, f));
                else if (name == "order") c.synthetic_order = static_cast<int>(get_int(sv, f));
                else if (name == "scale") c.synthetic_scale = get_real(sv, f);
                else bad(sv, f, "unknown key");
            }
        } else {
            bad(node, k, "unknown key");
        }
    }
    c.validate();
    return c;
}

inline RunConfig load_config(const std::string& path) { return parse_config(io_detail::read_file(path), path); }

}  // namespace msl
