#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "msl/core/error.hpp"
#include "msl/core/types.hpp"

namespace msl {

/// Smooth Hermitian potential tau(x) = Herm(sum_{k=0}^{order} A_k cos(2 pi k x) + B_k sin(2 pi k x)).
///
/// Coefficients are drawn from std::mt19937_64(seed): each draw u = (g() >> 11) * 2^-53 in [0, 1)
/// gives scale * (2u - 1). For k = 0..order, A_k then B_k are filled row-major, real part then
/// imaginary part per entry. Herm(M) = (M + M*)/2.
class SyntheticTau {
public:
    SyntheticTau(int r, int order, double scale, std::uint64_t seed) : r_(r) {
        if (r < 1 || r > kMaxDim) throw ConfigurationError("synthetic r out of range");
        if (order < 0) throw ConfigurationError("synthetic order must be >= 0");
        std::mt19937_64 g(seed);
        auto draw = [&] { return scale * (2.0 * (static_cast<double>(g() >> 11) * 0x1.0p-53) - 1.0); };
        auto fill = [&] {
            Mat a(r, r);
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) {
                    const double re = draw();
                    const double im = draw();
                    a(i, j) = cplx(re, im);
                }
            return a;
        };
        for (int k = 0; k <= order; ++k) {
            a_.push_back(fill());
            b_.push_back(fill());
        }
    }

    int r() const noexcept { return r_; }

    Mat operator()(double x) const {
        Mat s = Mat::Zero(r_, r_);
        for (std::size_t k = 0; k < a_.size(); ++k) {
            const double w = 2.0 * kPi * static_cast<double>(k) * x;
            s += std::cos(w) * a_[k] + std::sin(w) * b_[k];
        }
        return hermitize(s);
    }

    MatrixGrid sample(const GridSpec& spec) const { return MatrixGrid::sample(r_, spec, *this, true); }

private:
    int r_;
    std::vector<Mat> a_, b_;
};

}  // namespace msl
