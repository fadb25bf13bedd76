#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "nsfix/perturbation.hpp"
#include "nsfix/solver.hpp"

using namespace nsfix;

namespace {

GridPtr grid()
{
    static const GridPtr g = build_grid(1.0, 32.0, 1024, Grading::Quadratic);
    return g;
}

const BackgroundFlow& background()
{
    static const BackgroundFlow bg = background_from_phi(bump_profile(0.8, 1.0, 3), grid());
    return bg;
}

SolverSettings settings()
{
    SolverSettings s;
    s.alpha = 0.9 * std::min(0.5, background().rho_star);
    return s;
}

FourierVector small_data(int cutoff, double amplitude)
{
    return build_perturbation({{1, PerturbationFamily::Rational, {amplitude, 0.0}},
                               {3, PerturbationFamily::Rational, {0.0, amplitude}}},
                              grid(), cutoff, settings().alpha);
}

double relative_seam(const RadialProfile& p)
{
    REQUIRE(p.seam().has_value());
    const Seam& s = *p.seam();
    const double scale = std::max(p.values().abs().maxCoeff(), 1e-300);
    const double slope_scale = std::max(p.derivative(1).abs().maxCoeff(), 1e-300);
    return std::max(std::abs(s.value_left - s.value_right) / scale,
                    std::abs(s.slope_left - s.slope_right) / slope_scale);
}

double max_gap(const FourierVector& a, const FourierVector& b, int order)
{
    double gap = 0.0;
    for (int n = 0; n <= a.cutoff(); ++n) {
        gap = std::max(gap, (a.samples(n, order) - b.samples(n, order)).abs().maxCoeff());
    }
    return gap;
}

} // namespace

TEST_CASE("background circulation and derived constants")
{
    const BackgroundFlow bg = background_from_phi(bump_profile(0.7, 1.0, 2), grid());
    CHECK(bg.mu_star == doctest::Approx(0.7 / 6.0).epsilon(1e-12));
    const RadialGrid& g = *grid();
    for (Index i = g.r_star_index(); i < g.size(); ++i) {
        CHECK(bg.stream.psi1[i] == -bg.mu_star / g.node(i));
    }
    CHECK(rho_from_mu(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    for (double mu = -2.0; mu <= 2.0; mu += 0.125) {
        if (mu == 0.0) {
            continue;
        }
        const double alt = std::sqrt(Complex{4.0, 2.0 * mu}).real() - 2.0;
        CHECK(std::abs(rho_from_mu(mu) - alt) < 1e-12);
        CHECK(std::abs(std::abs(zeta_index(2, mu)) - 2.0 * std::pow(1.0 + mu * mu / 4.0, 0.25)) <
              1e-12);
        CHECK(zeta_index(-2, mu).real() > 0.0);
    }
}

TEST_CASE("background preconditions")
{
    // int_0^1 s (1 - 2 s^2) ds = 0
    CHECK_THROWS_AS(background_from_phi(polynomial_profile({1.0, 0.0, -2.0}, 1.0), grid()), Error);
    // c = 60 gives mu = 7.5 and rho > 1
    CHECK_THROWS_AS(background_from_phi(bump_profile(60.0, 1.0, 3), grid()), Error);
    const BackgroundFlow rough = background_from_phi(bump_profile(0.8, 1.0, 1), grid());
    CHECK_FALSE(rough.warnings.empty());
    for (const auto& w : background().warnings) {
        CHECK(w.find("C^2") == std::string::npos);
    }
    const BackgroundFlow negative = background_from_phi(bump_profile(-0.8, 1.0, 3), grid());
    CHECK(negative.rho_star == doctest::Approx(background().rho_star).epsilon(1e-14));
}

TEST_CASE("map_Phi")
{
    const FourierVector zero = FourierVector::zero(grid(), 4);
    std::vector<RadialProfile> modes;
    for (int n = 0; n <= 4; ++n) {
        RadialProfile p = RadialProfile::zero(grid());
        p.set_derivative(1, ComplexArray::Zero(grid()->size()));
        modes.push_back(p);
    }
    const FourierVector z(modes);
    CHECK(max_gap(map_Phi(z, background(), settings()), zero, 0) == 0.0);

    const FourierVector phi = fixtures::rational_modes(grid(), 4, 2.5, 1e-2, 3);
    const FourierVector out = map_Phi(phi, background(), settings());
    CHECK((out.mode(1).values() - phi.mode(1).values()).abs().maxCoeff() == 0.0);
    CHECK((out.mode(3).derivative(1) - phi.mode(3).derivative(1)).abs().maxCoeff() == 0.0);
    CHECK(relative_seam(out.mode(2)) < 1e-8);

    // linear
    const FourierVector twice = map_Phi(phi.scaled(2.0), background(), settings());
    CHECK(max_gap(twice, out.scaled(2.0), 0) <= 1e-15 * out.samples(2).abs().maxCoeff());
}

TEST_CASE("map_S")
{
    const FourierVector sigma = fixtures::rational_modes(grid(), 4, 2.5, 1e-2, 5);
    const FourierVector w0 = fixtures::rational_modes(grid(), 4, 2.5, 0.0, 5);
    const FourierVector none = map_S(w0, w0, background(), settings());
    CHECK(max_gap(none, w0, 0) == 0.0);
    const FourierVector s = map_S(w0, sigma, background(), settings());
    const FourierVector p = map_Phi(sigma, background(), settings());
    CHECK(max_gap(s, p, 0) == 0.0);
    CHECK(max_gap(s, p, 1) == 0.0);

    for (unsigned seed : {11u, 12u, 13u}) {
        const FourierVector w = fixtures::rational_modes(grid(), 4, 2.5, 1e-2, seed);
        const FourierVector y = map_S(w, sigma, background(), settings());
        CHECK(relative_seam(y.mode(2)) < 1e-6);
    }
}

TEST_CASE("picard on zero data")
{
    const FourierVector phi = small_data(4, 0.0);
    const PicardResult res = picard_solve(phi, background(), settings());
    CHECK(res.report.converged);
    CHECK(res.report.steps.size() == 1);
    CHECK(norm_weighted(res.w, settings().iterate_norm()) == 0.0);
}

TEST_CASE("picard on small data")
{
    const SolverSettings cfg = settings();
    const FourierVector phi = small_data(8, 1e-3);
    const PicardResult res = picard_solve(phi, background(), cfg);
    REQUIRE(res.report.converged);
    CHECK(res.report.steps.size() <= 30);
    for (std::size_t j = 1; j < res.report.steps.size(); ++j) {
        CHECK(res.report.steps[j].ratio < 0.9);
    }
    const WeightedNormSpec u1 = cfg.iterate_norm();
    const FourierVector again = map_S(res.w, phi, background(), cfg);
    CHECK(norm_weighted(res.w - again, u1) <= 2.0 * cfg.tol * norm_weighted(res.w, u1));
    CHECK(relative_seam(res.w.mode(2)) < 1e-6);
}

TEST_CASE("scaling ladder")
{
    const SolverSettings cfg = settings();
    const WeightedNormSpec u1 = cfg.iterate_norm();
    const FourierVector phi = small_data(6, 4e-3);
    const FourierVector first = map_Phi(phi, background(), cfg);
    double previous = 0.0;
    for (double c : {0.25, 0.5, 1.0}) {
        const FourierVector scaled = phi.scaled(c);
        CHECK(max_gap(map_Phi(scaled, background(), cfg), first.scaled(c), 0) == 0.0);
        const PicardResult res = picard_solve(scaled, background(), cfg);
        REQUIRE(res.report.converged);
        const double norm = norm_weighted(res.w, u1);
        CHECK(norm > previous);
        previous = norm;
    }
}

TEST_CASE("reconstruction")
{
    const SolverSettings cfg = settings();
    const RadialGrid& g = *grid();
    SUBCASE("background only")
    {
        const FourierVector w = small_data(4, 0.0);
        const SolutionFields f = reconstruct_solution(w, background(), cfg);
        for (int n = 0; n <= 4; ++n) {
            CHECK(f.u_r.mode(n).values().abs().maxCoeff() == 0.0);
        }
        for (Index i = 1; i < g.size(); ++i) {
            CHECK(f.u_theta.mode(0)[i].real() == doctest::Approx(background().moment[i] / g.node(i)));
        }
    }
    SUBCASE("divergence free")
    {
        const FourierVector phi = small_data(6, 1e-3);
        const PicardResult res = picard_solve(phi, background(), cfg);
        REQUIRE(res.report.converged);
        const SolutionFields f = reconstruct_solution(res.w, background(), cfg);
        for (int n = 1; n <= 6; ++n) {
            ComplexArray flux(g.size());
            for (Index i = 0; i < g.size(); ++i) {
                flux[i] = g.node(i) * f.u_r.mode(n)[i];
            }
            const RadialProfile dflux = differentiate(RadialProfile(grid(), flux), 1);
            const Complex in{0.0, static_cast<double>(n)};
            double worst = 0.0;
            const double scale = 1e-300 + f.u_theta.mode(n).values().abs().maxCoeff();
            for (Index i = 1; i < g.size(); ++i) {
                const double r = g.node(i);
                const Complex div = dflux[i] / r + in * f.u_theta.mode(n)[i] / r;
                worst = std::max(worst, std::abs(div) * r / (1.0 + r) / scale);
            }
            CHECK(worst < 1e-6);
        }
    }
}
