#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nsfix/nonlinear.hpp"
#include "nsfix/norms.hpp"

namespace nsfix {

/// A real radial function with its first derivative.
struct RadialFunction {
    std::function<double(double)> value;
    std::function<double(double)> slope;
};

/// c (1 - (r/R)^2)^p on [0, R], zero beyond.
RadialFunction bump_profile(double amplitude, double radius, int power);
/// sum_k a_k r^k on [0, R], zero beyond.
RadialFunction polynomial_profile(std::vector<double> coefficients, double radius);

/// sqrt(2) [ (1 + (mu/2)^2)^{1/2} + 1 ]^{1/2} - 2.
double rho_from_mu(double mu);
/// (n^2 + i n mu)^{1/2}, principal branch.
Complex zeta_index(int n, double mu);

/// Radial background: vorticity phi* supported in [0, R*] and the derived
/// streamfunction derivatives.
struct BackgroundFlow {
    GridPtr grid;
    RadialProfile phi_star;
    RealArray moment; ///< int_0^r s phi* ds, exactly mu* on [R*, R_max]
    double r_star = 1.0;
    double mu_star = 0.0;
    double rho_star = 0.0;
    double nu_star = 0.0;
    StreamBackground stream;
    double smallness = 0.0; ///< R*^rho* nu*
    double delta_config = 0.1;
    std::vector<std::string> warnings;

    Complex zeta(int n) const { return zeta_index(n, mu_star); }
};

/// Requires mu* != 0 and rho* < 1. Warns when R*^rho* nu* >= delta or when
/// phi* is not C^2 across R*.
BackgroundFlow background_from_phi(const RadialFunction& phi, GridPtr grid, double delta = 0.1);

struct SolverSettings {
    double alpha = 0.0;
    double kappa = 2.0;
    double tol = 1e-10;
    int max_iter = 30;
    double epsilon_config = 1.0;
    /// Below this radius G* is taken from the advection form; <= 0 picks the default.
    double r_switch = 0.0;

    WeightedNormSpec iterate_norm() const { return {NormFamily::U, alpha + 2.0, kappa + 2.0, 1}; }
};

/// Phi_n = phi_n, except n = +-2 which use the boundary-corrected
/// representation glued C^1 at R*. Requires phi' data.
FourierVector map_Phi(const FourierVector& phi, const BackgroundFlow& bg,
                      const SolverSettings& settings);

/// The solution map y = S(w, sigma) with analytic first derivatives; mode 2
/// carries the two-sided seam at R*.
FourierVector map_S(const FourierVector& w, const FourierVector& sigma, const BackgroundFlow& bg,
                    const SolverSettings& settings);

struct IterationStep {
    int index = 0;
    double norm = 0.0;      ///< ||w^(j)||
    double increment = 0.0; ///< ||w^(j) - w^(j-1)||, with w^(0) = 0
    double ratio = 0.0;     ///< increment_j / increment_{j-1}; 0 on the first row
};

/// Empirical stand-ins for the unknown smallness constants.
struct ContractionBudget {
    double delta_config = 0.1;
    double epsilon_config = 1.0;
    double data_norm = 0.0;
    double max_ratio = 0.0; ///< over rows j >= 2
    double max_norm = 0.0;  ///< sup of the iterate norms
};

struct IterationReport {
    std::vector<IterationStep> steps;
    bool converged = false;
    bool diverged = false;
    int divergence_step = 0;
    std::string status;
    ContractionBudget budget;
};

struct PicardResult {
    FourierVector w;
    IterationReport report;
};

/// w^(1) = Phi(phi), w^(j) = S(w^(j-1), phi) until the relative U^1 increment
/// drops below tol. Three consecutive ratios >= 1, or a non-finite norm, stop
/// the loop as diverged.
using IterateObserver = std::function<void(int index, const FourierVector& iterate)>;

PicardResult picard_solve(const FourierVector& phi, const BackgroundFlow& bg,
                          const SolverSettings& settings, const IterateObserver& observer = {});

/// Streamfunction, vorticity and velocity modes of the full flow.
struct SolutionFields {
    FourierVector gamma;   ///< perturbation streamfunction
    FourierVector omega;   ///< phi* + w
    FourierVector u_r;     ///< (i n / r) psi_n
    FourierVector u_theta; ///< -psi_n'
};

SolutionFields reconstruct_solution(const FourierVector& w, const BackgroundFlow& bg,
                                    const SolverSettings& settings);

} // namespace nsfix
