#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "nsfix/nonlinear.hpp"
#include "nsfix/operators.hpp"

namespace fixtures {

using namespace nsfix;

/// phi(r) = c (1 - r^2/R^2)^p on [0, R], with psi', psi'', psi''' and omega'
/// from the closed-form moment m(r) = int_0^r s phi ds.
struct BumpBackground {
    double c, radius;
    int p;

    double phi(double r) const
    {
        return r >= radius ? 0.0 : c * std::pow(1.0 - r * r / (radius * radius), p);
    }
    double phi1(double r) const
    {
        if (r >= radius) {
            return 0.0;
        }
        const double u = 1.0 - r * r / (radius * radius);
        return -2.0 * p * c * r / (radius * radius) * std::pow(u, p - 1);
    }
    double moment(double r) const
    {
        const double u = r >= radius ? 0.0 : 1.0 - r * r / (radius * radius);
        return c * radius * radius / (2.0 * (p + 1)) * (1.0 - std::pow(u, p + 1));
    }
    double mu() const { return moment(radius); }

    StreamBackground samples(const RadialGrid& g) const
    {
        StreamBackground bg = StreamBackground::zero(g);
        for (Index i = 1; i < g.size(); ++i) {
            const double r = g.node(i);
            const double m = moment(r);
            bg.psi1[i] = -m / r;
            bg.psi2[i] = m / (r * r) - phi(r);
            bg.psi3[i] = -2.0 * m / (r * r * r) + phi(r) / r - phi1(r);
            bg.omega1[i] = phi1(r);
        }
        // m = c r^2 / 2 - ... near 0: psi' ~ -c r / 2, psi'' ~ -c / 2, psi''' ~ 0
        bg.psi2[0] = -0.5 * c;
        return bg;
    }
};

/// a_n r^n (1 + r^2)^{-(beta + n)/2} per mode with seeded random coefficients,
/// carrying the exact first derivative and a tail of exponent beta.
inline FourierVector rational_modes(GridPtr g, int cutoff, double beta, double amplitude,
                                    unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<RadialProfile> modes;
    for (int n = 0; n <= cutoff; ++n) {
        const Complex a = amplitude * Complex{u(rng), n == 0 ? 0.0 : u(rng)} / (1.0 + n);
        ComplexArray v(g->size()), d1(g->size());
        for (Index i = 0; i < g->size(); ++i) {
            const double r = g->node(i);
            const double q = std::pow(1.0 + r * r, -(beta + n) / 2.0 - 1.0);
            const double lead = n == 0 ? 0.0 : n * std::pow(r, n - 1) * (1.0 + r * r);
            v[i] = a * std::pow(r, n) * q * (1.0 + r * r);
            d1[i] = a * q * (lead - (beta + n) * std::pow(r, n + 1));
        }
        RadialProfile p(g, v);
        p.set_derivative(1, d1);
        p.set_tail(fit_tail(*g, v, beta));
        modes.push_back(p);
    }
    return FourierVector(modes);
}

} // namespace fixtures
