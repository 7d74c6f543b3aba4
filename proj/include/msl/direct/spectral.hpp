#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "msl/core/error.hpp"
#include "msl/core/types.hpp"
#include "msl/direct/eigen.hpp"

namespace msl {

struct DirectResult {
    SpectralData data;
    std::vector<EigenRecord> records;
    std::vector<double> alpha_hermitian_defect;  ///< before symmetrization, per entry
    std::vector<std::string> warnings;
    int evaluations = 0;
};

/// lambda_max used for n_bins bins: pi (n_bins + 1/2).
inline double bins_lambda_max(int n_bins) { return kPi * (n_bins + 0.5); }

/// Eigenvalues in (0, lambda_max] and their norming constants, as an S_tau-type dataset;
/// lambda_max defaults to pi (n_bins + 1/2). Throws ConsistencyError if the rank count over the
/// bins lying entirely below lambda_max is not (bins) * r, which signals a missed or spurious root.
inline DirectResult spectral_data(const MatrixGrid& tau, int n_bins, double scan_step = 0.1,
                                  std::optional<double> lambda_max_override = std::nullopt) {
    if (n_bins < 1) throw ConfigurationError("n_bins must be positive");
    const int r = tau.r();
    const double lambda_max = lambda_max_override.value_or(bins_lambda_max(n_bins));
    if (!(lambda_max >= kPi)) throw ConfigurationError("lambda_max must be at least pi");
    const int full_bins = static_cast<int>(std::floor(lambda_max / kPi - 0.5 + 1e-12));
    // Scan one bin further so the last contour knows its right-hand neighbour.
    EigenScan scan = find_eigenvalues(tau, lambda_max + kPi, scan_step);

    std::vector<double> lambdas;
    std::optional<double> next_above;
    std::vector<EigenvalueRoot> kept;
    for (auto& root : scan.roots) {
        if (root.lambda <= lambda_max) {
            lambdas.push_back(root.lambda);
            kept.push_back(std::move(root));
        } else if (!next_above) {
            next_above = root.lambda;
        }
    }
    NormingResult nc = norming_constants(tau, lambdas, next_above);

    DirectResult res{SpectralData(r, true, {{0.0, Mat::Identity(r, r)}}), {}, nc.hermitian_defect,
                     std::move(scan.warnings), scan.evaluations};
    res.warnings.insert(res.warnings.end(), nc.warnings.begin(), nc.warnings.end());

    std::vector<SpectralEntry> entries;
    int rank_total = 0;
    for (std::size_t j = 0; j < kept.size(); ++j) {
        const int rank = numerical_rank(nc.alphas[j]);
        if (j > 0) {
            if (kept[j].lambda <= bins_lambda_max(full_bins)) rank_total += rank;
            if (rank != kept[j].multiplicity)
                res.warnings.push_back("rank of alpha at lambda = " + fmt_num(kept[j].lambda) + " is " +
                                       fmt_num(rank) + " but the kernel dimension is " +
                                       fmt_num(kept[j].multiplicity));
        }
        entries.push_back({kept[j].lambda, nc.alphas[j]});
        res.records.push_back({kept[j].lambda, nc.alphas[j], j == 0 ? r : rank, kept[j].kernel_basis});
    }
    if (rank_total != full_bins * r)
        throw ConsistencyError("rank count " + fmt_num(rank_total) + " over " + fmt_num(full_bins) +
                               " bins differs from bins * r = " + fmt_num(full_bins * r) +
                               " (a root was missed or is spurious)");
    res.data = SpectralData(r, true, std::move(entries));
    return res;
}

}  // namespace msl
