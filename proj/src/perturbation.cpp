#include "nsfix/perturbation.hpp"

#include <array>
#include <cmath>

namespace nsfix {

PerturbationFamily parse_family(const std::string& name)
{
    if (name == "algebraic") {
        return PerturbationFamily::Algebraic;
    }
    if (name == "rational") {
        return PerturbationFamily::Rational;
    }
    if (name == "gaussian") {
        return PerturbationFamily::Gaussian;
    }
    throw Error("unknown perturbation family '" + name +
                "' (expected algebraic, rational or gaussian)");
}

std::string family_name(PerturbationFamily family)
{
    switch (family) {
    case PerturbationFamily::Algebraic:
        return "algebraic";
    case PerturbationFamily::Rational:
        return "rational";
    case PerturbationFamily::Gaussian:
        return "gaussian";
    }
    return "unknown";
}

namespace {

// r^k, with r^k := 0 for k < 0 (such terms always carry a zero coefficient).
double rpow(double r, int k)
{
    return k < 0 ? 0.0 : std::pow(r, k);
}

// Value, first and second derivative of the unit-amplitude profile at r.
std::array<double, 3> evaluate(PerturbationFamily family, int n, double alpha, double r)
{
    const double nn = n;
    switch (family) {
    case PerturbationFamily::Algebraic: {
        const double q = alpha + 2.0 + nn;
        const double p = std::pow(1.0 + r, -q);
        const double v = rpow(r, n) * p;
        const double d1 = nn * rpow(r, n - 1) * p - q * rpow(r, n) * p / (1.0 + r);
        const double d2 = nn * (nn - 1.0) * rpow(r, n - 2) * p -
                          2.0 * nn * q * rpow(r, n - 1) * p / (1.0 + r) +
                          q * (q + 1.0) * rpow(r, n) * p / ((1.0 + r) * (1.0 + r));
        return {v, d1, d2};
    }
    case PerturbationFamily::Rational: {
        const double q = alpha + 2.0 + nn;
        const double s = 1.0 + r * r;
        const double p = std::pow(s, -0.5 * q);
        const double v = rpow(r, n) * p;
        const double d1 = nn * rpow(r, n - 1) * p - q * rpow(r, n + 1) * p / s;
        const double d2 = p * (nn * (nn - 1.0) * rpow(r, n - 2) -
                               q * (2.0 * nn + 1.0) * rpow(r, n) / s +
                               q * (q + 2.0) * rpow(r, n + 2) / (s * s));
        return {v, d1, d2};
    }
    case PerturbationFamily::Gaussian: {
        const double e = std::exp(-r * r);
        const double v = rpow(r, n) * e;
        const double d1 = (nn * rpow(r, n - 1) - 2.0 * rpow(r, n + 1)) * e;
        const double d2 = (nn * (nn - 1.0) * rpow(r, n - 2) - 2.0 * (2.0 * nn + 1.0) * rpow(r, n) +
                           4.0 * rpow(r, n + 2)) *
                          e;
        return {v, d1, d2};
    }
    }
    return {0.0, 0.0, 0.0};
}

} // namespace

FourierVector build_perturbation(const std::vector<PerturbationTerm>& terms, GridPtr grid,
                                 int cutoff, double alpha)
{
    require(cutoff >= 0, "mode cutoff must be non-negative");
    const Index size = grid->size();
    std::vector<ComplexArray> v(static_cast<std::size_t>(cutoff) + 1, ComplexArray::Zero(size));
    auto d1 = v, d2 = v;
    std::vector<Complex> tail(static_cast<std::size_t>(cutoff) + 1, Complex{});
    for (const auto& t : terms) {
        require(t.n >= 0, "perturbation terms are given for n >= 0 (the conjugate is implied)");
        require(t.n <= cutoff, "perturbation mode " + std::to_string(t.n) + " exceeds the cutoff");
        require(t.n != 0 || t.amplitude.imag() == 0.0, "the zero-mode amplitude must be real");
        const auto k = static_cast<std::size_t>(t.n);
        for (Index i = 0; i < size; ++i) {
            const auto f = evaluate(t.family, t.n, alpha, grid->node(i));
            v[k][i] += t.amplitude * f[0];
            d1[k][i] += t.amplitude * f[1];
            d2[k][i] += t.amplitude * f[2];
        }
        if (t.family != PerturbationFamily::Gaussian) {
            // Both algebraic families behave like r^{-(alpha+2)} at infinity; the
            // coefficient is fitted so the tail continues the samples.
            ComplexArray unit(size);
            for (Index i = 0; i < size; ++i) {
                unit[i] = evaluate(t.family, t.n, alpha, grid->node(i))[0];
            }
            tail[k] += t.amplitude * fit_tail(*grid, unit, alpha + 2.0).coefficient;
        }
    }
    std::vector<RadialProfile> modes;
    for (int n = 0; n <= cutoff; ++n) {
        const auto k = static_cast<std::size_t>(n);
        RadialProfile p(grid, std::move(v[k]), TailModel{tail[k], alpha + 2.0});
        p.set_derivative(1, std::move(d1[k]));
        p.set_derivative(2, std::move(d2[k]));
        modes.push_back(std::move(p));
    }
    return FourierVector(std::move(modes));
}

} // namespace nsfix
