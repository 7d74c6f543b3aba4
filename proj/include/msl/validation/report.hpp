#pragma once

#include "msl/core/io.hpp"
#include "msl/validation/conditions.hpp"

namespace msl {

inline json to_json(const PositivityReport& p) {
    return {{"min_eig", p.min_eig}, {"verdict", to_string(p.verdict)}, {"near_null", p.near_null}};
}

inline json to_json(const ConditionReport& rep) {
    json a1 = {{"n_bins", rep.a1.n_bins},
               {"tilde_sum", rep.a1.tilde_sum},
               {"max_bin_count", rep.a1.max_bin_count},
               {"beta_sum", rep.a1.beta_sum},
               {"tilde_trend", rep.a1.tilde_trend},
               {"beta_trend", rep.a1.beta_trend},
               {"tilde_tail_share", rep.a1.tilde_tail_share},
               {"beta_tail_share", rep.a1.beta_tail_share},
               {"verdict", to_string(rep.a1.verdict)},
               {"note", rep.a1.note}};
    json a2 = {{"n_bins", rep.a2.n_bins},
               {"ranks", rep.a2.ranks},
               {"counts", rep.a2.counts},
               {"n0", rep.a2.n0 ? json(*rep.a2.n0) : json(nullptr)},
               {"verdict", to_string(rep.a2.verdict)},
               {"note", rep.a2.note}};
    json a3 = rep.a34.a3 ? to_json(*rep.a34.a3)
                         : json{{"min_eig", nullptr}, {"verdict", to_string(Verdict::not_applicable)}};
    return {{"kind", "condition_report"},
            {"requested_bins", rep.requested_bins},
            {"evaluated_bins", rep.evaluated_bins},
            {"covered", rep.covered},
            {"grid_m", rep.a34.m},
            {"positivity_band", rep.a34.band},
            {"a1", std::move(a1)},
            {"a2", std::move(a2)},
            {"a3", std::move(a3)},
            {"a4", to_json(rep.a34.a4)},
            {"overall", to_string(rep.overall)}};
}

}  // namespace msl
