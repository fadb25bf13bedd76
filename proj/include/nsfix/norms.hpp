#pragma once

#include "nsfix/spectral.hpp"

namespace nsfix {

enum class NormFamily {
    U, ///< every mode, derivative orders 0..m
    V, ///< zero mode through its derivatives 1..m with unit weights
};

/// sum_{l=0}^m sup_n sup_r (1+r)^{alpha+l} (1+|n|)^{kappa-l} |d^l f_n|.
struct WeightedNormSpec {
    NormFamily family = NormFamily::U;
    double alpha = 0.1;
    double kappa = 2.0;
    int m = 1;

    /// alpha > 0, kappa > 1, 0 <= m <= 2, m < kappa.
    void validate() const;
};

/// (1+r)^{alpha+l} (1+|n|)^{kappa-l} |d^l f| sup over nodes. Order l >= 1
/// needs derivative samples.
double weighted_sup(const RadialProfile& f, int n, double alpha, double kappa, int l);

/// Band-limited norm: the sup over n runs over |n| <= N only.
double norm_weighted(const FourierVector& f, const WeightedNormSpec& spec);

} // namespace nsfix
