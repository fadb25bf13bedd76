#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nsfix/spectral.hpp"

using namespace nsfix;

namespace {

GridPtr grid()
{
    static const GridPtr g = build_grid(1.0, 16.0, 128, Grading::Quadratic);
    return g;
}

double g_of(double r) { return r * std::exp(-r); }

} // namespace

TEST_CASE("cos theta lands in modes +-1")
{
    const auto fv = decompose_angular([](double r, double t) { return g_of(r) * std::cos(t); },
                                      grid(), 4, 17);
    for (Index i = 0; i < grid()->size(); ++i) {
        const double half = 0.5 * g_of(grid()->node(i));
        CHECK(std::abs(fv.mode(1)[i] - half) < 1e-15);
        CHECK(std::abs(fv.mode_at(-1)[i] - half) < 1e-15);
        for (int n : {0, 2, 3, 4}) {
            CHECK(std::abs(fv.mode(n)[i]) < 1e-15);
        }
    }
}

TEST_CASE("radial field has only the zero mode")
{
    const auto fv = decompose_angular([](double r, double) { return std::exp(-r); }, grid(), 3, 13);
    for (Index i = 0; i < grid()->size(); ++i) {
        CHECK(std::abs(fv.mode(0)[i] - std::exp(-grid()->node(i))) < 1e-15);
        for (int n = 1; n <= 3; ++n) {
            CHECK(std::abs(fv.mode(n)[i]) < 1e-15);
        }
    }
}

TEST_CASE("sin 2 theta lands in modes +-2 as -+ i g / 2")
{
    const auto fv = decompose_angular(
        [](double r, double t) { return g_of(r) * std::sin(2.0 * t); }, grid(), 4, 17);
    for (Index i = 0; i < grid()->size(); ++i) {
        // Oracle: (1/2pi) int sin(2t) e^{-2it} dt = -i/2.
        const Complex expect = Complex{0.0, -0.5} * g_of(grid()->node(i));
        CHECK(std::abs(fv.mode(2)[i] - expect) < 1e-15);
        CHECK(std::abs(fv.mode_at(-2)[i] - std::conj(expect)) < 1e-15);
    }
}

TEST_CASE("angular resolution below 4N+1 is rejected")
{
    CHECK_THROWS_AS(decompose_angular([](double, double) { return 0.0; }, grid(), 4, 16), Error);
}

TEST_CASE("synthesis of a single mode pair matches direct summation")
{
    std::vector<RadialProfile> modes{RadialProfile::zero(grid()),
                                     RadialProfile::sample(grid(), [](double r) {
                                         return Complex{0.0, 0.5} * g_of(r);
                                     })};
    const FourierVector fv(modes);
    const RealArray thetas = theta_grid(9);
    const auto field = synthesize_angular(fv, thetas);
    for (Index i = 0; i < grid()->size(); ++i) {
        for (Index j = 0; j < thetas.size(); ++j) {
            // i g/2 e^{it} + conj = -g sin t
            CHECK(std::abs(field(i, j) + g_of(grid()->node(i)) * std::sin(thetas[j])) < 1e-15);
        }
    }
    const auto zero = synthesize_angular(FourierVector::zero(grid(), 3), thetas);
    CHECK(zero.abs().maxCoeff() == 0.0);
}

TEST_CASE("round trips on band-limited data")
{
    const int n_cut = 5;
    const Index angles = 4 * n_cut + 1;
    const auto field = [](double r, double t) {
        return std::exp(-r) + g_of(r) * std::cos(t) - 0.3 * r * r * std::exp(-r) * std::sin(3 * t) +
               0.1 * g_of(r) * std::cos(5 * t + 0.4);
    };
    const auto fv = decompose_angular(field, grid(), n_cut, angles);
    const RealArray thetas = theta_grid(angles);
    const auto back = synthesize_angular(fv, thetas);
    for (Index i = 0; i < grid()->size(); ++i) {
        for (Index j = 0; j < angles; ++j) {
            CHECK(std::abs(back(i, j) - field(grid()->node(i), thetas[j])) < 1e-12);
        }
    }
    const auto again = decompose_angular(back, grid(), n_cut);
    for (int n = 0; n <= n_cut; ++n) {
        CHECK((again.mode(n).values() - fv.mode(n).values()).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("Parseval at fixed radius")
{
    const int n_cut = 4;
    const Index angles = 64;
    const auto field = [](double r, double t) {
        return 1.0 + r * std::cos(t) + 0.5 * r * std::sin(4 * t);
    };
    const auto fv = decompose_angular(field, grid(), n_cut, angles);
    const Index i = grid()->r_star_index() + 3;
    const double r = grid()->node(i);
    double modes = std::norm(fv.mode(0)[i]);
    for (int n = 1; n <= n_cut; ++n) {
        modes += 2.0 * std::norm(fv.mode(n)[i]);
    }
    double direct = 0.0;
    for (Index j = 0; j < angles; ++j) {
        const double v = field(r, 2.0 * kPi * static_cast<double>(j) / angles);
        direct += v * v / static_cast<double>(angles);
    }
    CHECK(modes == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("non-real synthesis is rejected")
{
    std::vector<RadialProfile> modes{RadialProfile::zero(grid())};
    FourierVector fv(modes);
    // The constructor projects the zero mode to real, so inject through samples.
    const auto bad = [&](int) {
        return ComplexArray::Constant(grid()->size(), Complex{1.0, 1.0});
    };
    CHECK_THROWS_AS(synthesize_modes(bad, 0, grid()->size(), theta_grid(3)), Error);
    CHECK(fv.origin_defect() == 0.0);
}

TEST_CASE("sum and scaling keep conjugate symmetry")
{
    const auto a = decompose_angular([](double r, double t) { return g_of(r) * std::sin(t); },
                                     grid(), 2, 9);
    const auto b = decompose_angular([](double r, double t) { return r * std::cos(2 * t); },
                                     grid(), 2, 9);
    const auto c = (a + b.scaled(2.0)) - a;
    for (int n = -2; n <= 2; ++n) {
        const ComplexArray lhs = c.mode_at(n).values();
        const ComplexArray rhs = b.mode_at(n).values() * 2.0;
        CHECK((lhs - rhs).abs().maxCoeff() < 1e-14);
        CHECK((c.mode_at(-n).values() - lhs.conjugate()).abs().maxCoeff() == 0.0);
    }
}
