#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nsfix/operators.hpp"

using namespace nsfix;

namespace {

GridPtr fine()
{
    static const GridPtr g = build_grid(1.0, 32.0, 1024, Grading::Quadratic);
    return g;
}

RadialProfile power(GridPtr g, double p, bool with_tail = true)
{
    auto f = RadialProfile::sample(
        g, [&](double s) { return s == 0.0 ? Complex{} : Complex{std::pow(s, p), 0.0}; });
    if (with_tail) {
        f.set_tail(TailModel{{1.0, 0.0}, -p});
    }
    return f;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

// h = r^n (1 - r^2/b^2)^5 on [0, b], zero beyond; C^4 with h(0) = 0.
struct Bump {
    int n;
    double b;
    double value(double r) const
    {
        return r >= b ? 0.0 : std::pow(r, n) * std::pow(1.0 - r * r / (b * b), 5);
    }
    // Delta_n (r^n g) = r^n (g'' + (2n + 1) g'/r)
    double laplacian(double r) const
    {
        if (r >= b) {
            return 0.0;
        }
        const double x = 1.0 - r * r / (b * b);
        const double g1_over_r = -10.0 / (b * b) * std::pow(x, 4);
        const double g2 = g1_over_r + 80.0 * r * r / std::pow(b, 4) * std::pow(x, 3);
        return std::pow(r, n) * (g2 + (2.0 * n + 1.0) * g1_over_r);
    }
};

} // namespace

TEST_CASE("complex index requires a positive real part")
{
    CHECK_THROWS_AS(ComplexIndex(0.0), Error);
    CHECK_THROWS_AS(ComplexIndex(Complex{-1.0, 2.0}), Error);
    CHECK(ComplexIndex(Complex{0.5, -3.0}).value() == Complex{0.5, -3.0});
}

TEST_CASE("op_I analytic oracles")
{
    // (r/2) int_r^inf s^0 s^-3 ds = 1/(4r)
    CHECK(rel(op_I(kInfinity, 1.0, power(fine(), -3.0), 2.0), 0.125) < 1e-10);
    // (r^2/4) int_r^inf s^-1 s^-4 ds = r^-2/16
    const auto f = power(fine(), -4.0);
    for (double r : {1.0, 1.7, 5.0, 31.0, 40.0}) {
        CHECK(rel(op_I(kInfinity, 2.0, f, r), std::pow(r, -2.0) / 16.0) < 1e-10);
    }
    const auto nodes = op_I_nodes(f, 2.0, 0, fine()->last(), true);
    for (Index i = fine()->r_star_index(); i < fine()->size(); ++i) {
        CHECK(rel(nodes[i], std::pow(fine()->node(i), -2.0) / 16.0) < 1e-10);
    }
    CHECK(op_I(kInfinity, 1.0, RadialProfile::zero(fine()), 3.0) == Complex{});
    CHECK(op_I(kInfinity, 1.0, f, 0.0) == Complex{});
}

TEST_CASE("op_I errors")
{
    const auto f = power(fine(), -3.0);
    CHECK_THROWS_AS(op_I(2.0, 1.0, f, 3.0), Error);
    const auto slow = power(fine(), -1.5);
    CHECK_THROWS_AS(op_I(kInfinity, 0.5, slow, 3.0), Error);
    CHECK_THROWS_AS(op_I_nodes(slow, 0.5, 0, fine()->last(), true), Error);
    CHECK_NOTHROW(op_I(kInfinity, 1.0, slow, 3.0));
}

TEST_CASE("op_J analytic oracles")
{
    // (1/2r) int_0^r s^2 * s ds = r^3/8 and (1/2r) int_0^r s^2 ds = r^2/6
    const auto lin = power(fine(), 1.0, false);
    const auto one = RadialProfile::sample(fine(), [](double) { return Complex{1.0, 0.0}; });
    for (double r : {0.3, 1.0, 4.5, 32.0}) {
        CHECK(rel(op_J(0.0, 1.0, lin, r), r * r * r / 8.0) < 1e-12);
        CHECK(rel(op_J(0.0, 1.0, one, r), r * r / 6.0) < 1e-12);
    }
    const auto nodes = op_J_nodes(lin, 1.0, 0, fine()->last());
    for (Index i = 1; i < fine()->size(); ++i) {
        const double r = fine()->node(i);
        CHECK(rel(nodes[i], r * r * r / 8.0) < 1e-12);
    }
    CHECK(op_J(0.0, 1.0, RadialProfile::zero(fine()), 3.0) == Complex{});
    CHECK_THROWS_AS(op_J(2.0, 1.0, lin, 1.0), Error);
}

TEST_CASE("op_J with complex index from R*")
{
    const Complex zeta = std::sqrt(Complex{4.0, 0.2});
    REQUIRE(zeta.real() > 2.0);
    const auto f = power(fine(), -4.0);
    const double rs = fine()->r_star();
    const auto oracle = [&](double r) {
        return (std::pow(r, -2.0) - cpow(rs, zeta - 2.0) * cpow(r, -zeta)) /
               (2.0 * zeta * (zeta - 2.0));
    };
    for (double r : {1.5, 3.0, 20.0, 50.0}) {
        CHECK(rel(op_J(rs, zeta, f, r), oracle(r)) < 1e-9);
    }
    const auto nodes = op_J_nodes(f, zeta, fine()->r_star_index(), fine()->last());
    for (Index i = fine()->r_star_index() + 1; i < fine()->size(); ++i) {
        CHECK(rel(nodes[i], oracle(fine()->node(i))) < 1e-9);
    }
}

TEST_CASE("laplacian_mode examples")
{
    const auto g = fine();
    for (int n : {1, 2, 3}) {
        auto f = RadialProfile::sample(g, [&](double r) { return Complex{std::pow(r, n), 0.0}; });
        f.set_derivative(1, f.values() * 0.0);
        ComplexArray d1(g->size()), d2(g->size());
        for (Index i = 0; i < g->size(); ++i) {
            const double r = g->node(i);
            d1[i] = n * std::pow(r, n - 1);
            d2[i] = n * (n - 1) * std::pow(r, n - 2);
        }
        f.set_derivative(1, d1);
        f.set_derivative(2, d2);
        const auto lap = laplacian_mode(f, static_cast<double>(n));
        CHECK(lap.values().abs().maxCoeff() < 1e-10);
    }
    const auto sq = RadialProfile::sample(g, [](double r) { return Complex{r * r, 0.0}; });
    const auto lap0 = laplacian_mode(sq, 0.0);
    CHECK((lap0.values() - 4.0).abs().maxCoeff() < 1e-6);

    // r^zeta solves the indicial equation; numerical derivatives on the outer block.
    const Complex zeta = std::sqrt(Complex{4.0, 0.2});
    const auto rz = RadialProfile::sample(g, [&](double r) {
        return r == 0.0 ? Complex{} : cpow(r, zeta);
    });
    const auto lapz = laplacian_mode(rz, zeta);
    for (Index i = g->r_star_index() + 1; i < g->size(); ++i) {
        const double r = g->node(i);
        CHECK(std::abs(lapz[i]) < 1e-8 * std::abs(cpow(r, zeta)) / (r * r) * 10.0);
    }
}

TEST_CASE("Green inversion with integer index")
{
    const auto g = fine();
    for (int n : {1, 2, 3}) {
        const Bump h{n, 6.0};
        const auto lap = RadialProfile::sample(
            g, [&](double r) { return Complex{h.laplacian(r), 0.0}; }, TailModel{});
        const auto I = op_I_nodes(lap, static_cast<double>(n), 0, g->last(), true);
        const auto J = op_J_nodes(lap, static_cast<double>(n), 0, g->last());
        double scale = 0.0, err = 0.0;
        for (Index i = 0; i < g->size(); ++i) {
            const double v = h.value(g->node(i));
            scale = std::max(scale, std::abs(v));
            err = std::max(err, std::abs(-I[i] - J[i] - v));
        }
        CHECK(err < 1e-6 * scale);
    }
}

TEST_CASE("Green inversion with complex index on the outer region")
{
    const auto g = fine();
    const double rs = g->r_star();
    const Complex zeta = std::sqrt(Complex{4.0, 0.6});
    const Complex z2 = zeta * zeta;
    // h = r^2 exp(-(r - 3)^2), negligible at R_max.
    const auto h = [](double r) { return r * r * std::exp(-(r - 3) * (r - 3)); };
    const auto dh = [](double r) {
        return (2.0 * r - 2.0 * r * r * (r - 3)) * std::exp(-(r - 3) * (r - 3));
    };
    const auto d2h = [](double r) {
        const double e = std::exp(-(r - 3) * (r - 3));
        const double p = 2.0 * r - 2.0 * r * r * (r - 3);
        const double dp = 2.0 - 4.0 * r * (r - 3) - 2.0 * r * r;
        return (dp - 2.0 * (r - 3) * p) * e;
    };
    const auto lap = RadialProfile::sample(
        g,
        [&](double r) {
            return r == 0.0 ? Complex{} : d2h(r) + dh(r) / r - z2 * h(r) / (r * r);
        },
        TailModel{});
    const Index s = g->r_star_index();
    const auto I = op_I_nodes(lap, zeta, s, g->last(), true);
    const auto J = op_J_nodes(lap, zeta, s, g->last());
    const Complex boundary = (rs * dh(rs) - zeta * h(rs)) / (2.0 * zeta);
    double err = 0.0;
    for (Index i = s; i < g->size(); ++i) {
        const double r = g->node(i);
        const Complex rec = -I[i] - J[i] - cpow(rs / r, zeta) * boundary;
        err = std::max(err, std::abs(rec - h(r)));
    }
    CHECK(err < 1e-6 * h(3.0));
}

TEST_CASE("operators are linear")
{
    const auto g = fine();
    const auto a = RadialProfile::sample(
        g, [](double r) { return Complex{r * std::exp(-r), 0.3 * r * r / (1 + r * r * r * r)}; },
        TailModel{{0.0, 0.3}, 2.0});
    const auto b = RadialProfile::sample(
        g, [](double r) { return Complex{std::pow(1 + r, -3.5) * r, 0.0}; },
        TailModel{{1.0, 0.0}, 2.5});
    const Complex ca{2.0, -1.0}, cb{-0.5, 0.0};
    RadialProfile sum(g, ca * a.values() + cb * b.values(),
                      TailModel{ca * a.tail()->coefficient, 2.0});
    // The sum's tail keeps the slower class; b's faster tail is negligible at R_max for this check.
    const auto Ia = op_I_nodes(a, 2.0, 0, g->last(), false);
    const auto Ib = op_I_nodes(b, 2.0, 0, g->last(), false);
    const auto Is = op_I_nodes(sum, 2.0, 0, g->last(), false);
    CHECK((Is - ca * Ia - cb * Ib).abs().maxCoeff() < 1e-13 * Is.abs().maxCoeff());
    const auto Ja = op_J_nodes(a, 2.0, 0, g->last());
    const auto Jb = op_J_nodes(b, 2.0, 0, g->last());
    const auto Js = op_J_nodes(sum, 2.0, 0, g->last());
    CHECK((Js - ca * Ja - cb * Jb).abs().maxCoeff() < 1e-13 * Js.abs().maxCoeff());
}

namespace {

FourierVector sample_vorticity(GridPtr g, double alpha)
{
    const double beta = alpha + 2.0;
    std::vector<RadialProfile> modes;
    for (int n = 0; n <= 3; ++n) {
        const Complex c = n == 0 ? Complex{1.0, 0.0} : Complex{0.5 / n, 0.25 * n};
        // r^n (1 + r^2)^{-(beta + n)/2}, with its exact derivative.
        auto p = RadialProfile::sample(g, [&](double r) {
            return c * std::pow(r, n) * std::pow(1.0 + r * r, -(beta + n) / 2.0);
        });
        ComplexArray d1(g->size());
        for (Index i = 0; i < g->size(); ++i) {
            const double r = g->node(i);
            const double q = std::pow(1.0 + r * r, -(beta + n) / 2.0 - 1.0);
            const double lead = n == 0 ? 0.0 : n * std::pow(r, n - 1) * (1.0 + r * r);
            d1[i] = c * q * (lead - (beta + n) * std::pow(r, n + 1));
        }
        p.set_derivative(1, d1);
        p.set_tail(fit_tail(*g, p.values(), beta));
        modes.push_back(p);
    }
    return FourierVector(modes);
}

} // namespace

TEST_CASE("map_L of zero is zero")
{
    const auto gamma = map_L(FourierVector::zero(fine(), 3));
    for (int n = 0; n <= 3; ++n) {
        CHECK(gamma.mode(n).values().abs().maxCoeff() == 0.0);
        CHECK(gamma.mode(n).derivative(1).abs().maxCoeff() == 0.0);
        CHECK(gamma.mode(n).derivative(2).abs().maxCoeff() == 0.0);
    }
    CHECK(gamma.derivative_only_zero_mode());
}

TEST_CASE("map_L inverts the mode Laplacian")
{
    const double alpha = 0.3;
    const auto w = sample_vorticity(fine(), alpha);
    const auto gamma = map_L(w, alpha);
    for (int n = 0; n <= 3; ++n) {
        // Numerical derivatives of the samples, not the analytic ones.
        RadialProfile bare(fine(), gamma.mode(n).values());
        const auto lap = laplacian_mode(bare, static_cast<double>(n));
        const auto& wn = w.mode(n).values();
        const double scale = wn.abs().maxCoeff();
        double err = 0.0;
        for (Index i = 1; i < fine()->size(); ++i) {
            err = std::max(err, std::abs(lap[i] + wn[i]));
        }
        CHECK(err < 1e-6 * scale);
        // Analytic second derivative agrees with the definition too.
        double err2 = 0.0;
        for (Index i = 1; i < fine()->size(); ++i) {
            const double r = fine()->node(i);
            const auto& m = gamma.mode(n);
            const Complex l = m.derivative(2)[i] + m.derivative(1)[i] / r -
                              static_cast<double>(n * n) * m[i] / (r * r);
            err2 = std::max(err2, std::abs(l + wn[i]));
        }
        CHECK(err2 < 1e-9 * scale);
        // Third derivative against differentiation of the second.
        const auto d3 = differentiate(RadialProfile(fine(), gamma.mode(n).derivative(2)), 1);
        double err3 = 0.0, s3 = 0.0;
        for (Index i = 1; i < fine()->size(); ++i) {
            err3 = std::max(err3, std::abs(d3[i] - gamma.mode(n).derivative(3)[i]));
            s3 = std::max(s3, std::abs(gamma.mode(n).derivative(3)[i]));
        }
        CHECK(err3 < 1e-5 * s3);
    }
}

TEST_CASE("map_L zero mode slope against closed form")
{
    const auto g = fine();
    std::vector<RadialProfile> modes{RadialProfile::sample(
        g, [](double r) { return Complex{std::pow(1.0 + r, -4.0), 0.0}; },
        TailModel{{1.0, 0.0}, 4.0})};
    const auto gamma = map_L(FourierVector(modes));
    // int_0^r s (1+s)^-4 ds = [-u^-2/2 + u^-3/3]_1^{1+r}; the closed form cancels near 0,
    // so the comparison is absolute.
    const auto moment = [](double r) {
        const double u = 1.0 + r;
        return -0.5 / (u * u) + 1.0 / (3.0 * u * u * u) + 0.5 - 1.0 / 3.0;
    };
    for (Index i = 1; i < g->size(); ++i) {
        const double r = g->node(i);
        const double expect = -moment(r) / r;
        CHECK(std::abs(gamma.mode(0).derivative(1)[i] - expect) < 1e-12);
    }
}

TEST_CASE("map_L preserves conjugate symmetry and decay class")
{
    const double alpha = 0.3;
    // The r^-|n| homogeneous part competes with r^-alpha over a short range, so
    // the decay class is read off a long outer range.
    const auto g = build_grid(1.0, 256.0, 2048, Grading::Quadratic);
    const auto w = sample_vorticity(g, alpha);
    const auto gamma = map_L(w, alpha);
    for (int n = 1; n <= 3; ++n) {
        CHECK((gamma.mode_at(-n).values() - gamma.mode(n).values().conjugate()).abs().maxCoeff() ==
              0.0);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int count = 0;
        for (Index i = g->r_star_index() + (g->last() - g->r_star_index()) / 2; i < g->size(); ++i) {
            const double x = std::log(g->node(i));
            const double y = std::log(std::abs(gamma.mode(n)[i]));
            sx += x, sy += y, sxx += x * x, sxy += x * y;
            ++count;
        }
        const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        CHECK(-slope >= alpha - 0.1);
    }
}

TEST_CASE("map_L is linear")
{
    const double alpha = 0.3;
    const auto w = sample_vorticity(fine(), alpha);
    const auto a = map_L(w.scaled(3.0), alpha);
    const auto b = map_L(w, alpha);
    for (int n = 0; n <= 3; ++n) {
        CHECK((a.mode(n).derivative(1) - 3.0 * b.mode(n).derivative(1)).abs().maxCoeff() <
              1e-13 * a.mode(n).derivative(1).abs().maxCoeff());
    }
}
