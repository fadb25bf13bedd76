#include "nsfix/norms.hpp"

#include <algorithm>
#include <cmath>

namespace nsfix {

void WeightedNormSpec::validate() const
{
    require(alpha > 0.0, "norm weight alpha must be positive");
    require(kappa > 1.0, "norm weight kappa must exceed 1");
    require(m >= 0 && m <= 2, "norm derivative order must be 0, 1 or 2");
    require(m < kappa, "norm derivative order must be below kappa");
}

double weighted_sup(const RadialProfile& f, int n, double alpha, double kappa, int l)
{
    const ComplexArray& v = l == 0 ? f.values() : f.derivative(l);
    const RealArray& r = f.grid()->nodes();
    const double mode_weight = std::pow(1.0 + std::abs(n), kappa - l);
    double sup = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
        sup = std::max(sup, std::pow(1.0 + r[i], alpha + l) * std::abs(v[i]));
    }
    return mode_weight * sup;
}

double norm_weighted(const FourierVector& f, const WeightedNormSpec& spec)
{
    spec.validate();
    const bool split = spec.family == NormFamily::V;
    double total = 0.0;
    for (int l = 0; l <= spec.m; ++l) {
        // V: ||f_0||_{V_0} + ||f~||, the zero mode weighted by M^l_{0,0} from l = 1.
        double sup = 0.0;
        for (int n = split ? 1 : 0; n <= f.cutoff(); ++n) {
            sup = std::max(sup, weighted_sup(f.mode(n), n, spec.alpha, spec.kappa, l));
        }
        total += sup;
        if (split && l >= 1) {
            total += weighted_sup(f.mode(0), 0, 0.0, 0.0, l);
        }
    }
    return total;
}

} // namespace nsfix
