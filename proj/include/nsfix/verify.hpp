#pragma once

#include <vector>

#include "nsfix/solver.hpp"

namespace nsfix {

/// Weighted sup residuals of the coupled system
///   Delta_n gamma_n + w_n = 0,   Delta_n w_n - G*_n - Delta_n phi_n = 0,
/// with the second read as Delta_zeta w - G0 - Delta_n phi for n = 2 beyond R*.
/// Derivatives are numeric, one-sided at R*.
struct ResidualReport {
    double vorticity = 0.0;          ///< sup_n sup_r (1+r)^{alpha+2} (1+|n|)^{kappa+2} |res_1|
    double source = 0.0;             ///< sup_n sup_r (1+r)^{alpha+4} (1+|n|)^{kappa} |res_2|
    double vorticity_scale = 0.0;    ///< same weights applied to w
    double source_scale = 0.0;       ///< same weights applied to Delta_n w
    std::vector<double> per_mode_vorticity, per_mode_source;

    double vorticity_relative() const;
    double source_relative() const;
};

ResidualReport residual_system(const FourierVector& gamma, const FourierVector& w,
                               const FourierVector& phi, const BackgroundFlow& bg,
                               const SolverSettings& settings);

struct ConsistencyReport {
    double relative = 0.0; ///< max |G* - H| / (1 + |H|)
    double raw = 0.0;      ///< max |G* - H|
};

/// Divergence form against advection form over r >= r_min, every mode.
ConsistencyReport consistency_Gstar_H(const FourierVector& gamma, const FourierVector& w,
                                      const StreamBackground& stream, double r_min = 0.1);

struct MatchingGap {
    double value = 0.0; ///< |y(R*-) - y(R*+)| / sup |y|
    double slope = 0.0; ///< |y'(R*-) - y'(R*+)| / sup |y'|
};

/// Gap of the n = 2 mode across R*; zero when the mode carries no seam or
/// vanishes identically.
MatchingGap matching_gap(const FourierVector& y);

struct DecayMetric {
    double alpha_used = 0.0;
    double sup_value = 0.0;    ///< sup (1+r)^{1+alpha} |u - u_bar e_theta|
    double fitted_slope = 0.0; ///< log-log slope of sup_theta |u - u_bar e_theta|
    double window_lo = 0.0, window_hi = 0.0;
    int window_points = 0;
};

/// u_bar(r) = (1/r) int_0^r s (phi* + phi_0) ds. Requires
/// 0 < alpha < min(1/2, rho*). The slope is a least-squares fit over
/// [2 R*, R_max / 2]; nodes where the deviation vanishes are skipped.
DecayMetric decay_metric(const SolutionFields& fields, const FourierVector& phi,
                         const BackgroundFlow& bg, double alpha, Index angles = 64);

} // namespace nsfix
