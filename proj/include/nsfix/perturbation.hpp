#pragma once

#include <string>
#include <vector>

#include "nsfix/spectral.hpp"

namespace nsfix {

enum class PerturbationFamily {
    Algebraic, ///< r^n (1 + r)^{-(alpha + 2 + n)}
    Rational,  ///< r^n (1 + r^2)^{-(alpha + 2 + n)/2}, smooth at the origin
    Gaussian,  ///< r^n exp(-r^2)
};

PerturbationFamily parse_family(const std::string& name);
std::string family_name(PerturbationFamily family);

/// One conjugate pair (f_n, f_{-n} = conj f_n), n >= 0; for n = 0 the
/// amplitude must be real.
struct PerturbationTerm {
    int n = 1;
    PerturbationFamily family = PerturbationFamily::Rational;
    Complex amplitude{0.0, 0.0};
};

/// Sum of the terms as a Fourier vector with exact first and second
/// derivatives and a tail of exponent alpha + 2 (zero for Gaussian terms).
FourierVector build_perturbation(const std::vector<PerturbationTerm>& terms, GridPtr grid,
                                 int cutoff, double alpha);

} // namespace nsfix
