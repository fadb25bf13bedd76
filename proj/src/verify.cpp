#include "nsfix/verify.hpp"

#include <algorithm>
#include <cmath>

#include "nsfix/operators.hpp"

namespace nsfix {

namespace {

double ratio_or_zero(double num, double den)
{
    return num == 0.0 ? 0.0 : num / den;
}

// Delta_{r,z} f at interior nodes from numeric derivatives, one-sided at R*.
ComplexArray numeric_laplacian(const RadialGrid& g, const ComplexArray& f, Complex z2, bool right)
{
    ComplexArray out = ComplexArray::Zero(g.size());
    for (Index i = 1; i < g.size(); ++i) {
        const double r = g.node(i);
        const bool side = right && i == g.r_star_index();
        out[i] = derivative_at(g, f, i, 2, side) + derivative_at(g, f, i, 1, side) / r -
                 z2 * f[i] / (r * r);
    }
    return out;
}

} // namespace

double ResidualReport::vorticity_relative() const
{
    return ratio_or_zero(vorticity, vorticity_scale);
}

double ResidualReport::source_relative() const
{
    return ratio_or_zero(source, source_scale);
}

ResidualReport residual_system(const FourierVector& gamma, const FourierVector& w,
                               const FourierVector& phi, const BackgroundFlow& bg,
                               const SolverSettings& settings)
{
    require(gamma.cutoff() == w.cutoff() && w.cutoff() == phi.cutoff(),
            "residual inputs must share the mode cutoff");
    const RadialGrid& g = *bg.grid;
    const Index size = g.size();
    const Index rs = g.r_star_index();
    const int cutoff = w.cutoff();
    const double alpha = settings.alpha;
    const double kappa = settings.kappa;
    const double r_switch =
        settings.r_switch > 0.0 ? settings.r_switch : default_switch_radius(g);
    const SourceBundle full = compute_sources(bg.stream, gamma, w, r_switch);
    const FourierVector g0 = source_G0(gamma, w, r_switch);

    ResidualReport rep;
    rep.per_mode_vorticity.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
    rep.per_mode_source.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
    for (int n = 0; n <= cutoff; ++n) {
        const double n2 = static_cast<double>(n) * n;
        const ComplexArray lg = numeric_laplacian(g, gamma.mode(n).values(), n2, false);
        const ComplexArray lw = numeric_laplacian(g, w.mode(n).values(), n2, false);
        const ComplexArray lp = numeric_laplacian(g, phi.mode(n).values(), n2, false);
        ComplexArray lw_outer, lp_outer;
        const Complex zeta2 = bg.zeta(n) * bg.zeta(n);
        if (n == 2) {
            lw_outer = numeric_laplacian(g, w.mode(n).values(), zeta2, true);
            lp_outer = numeric_laplacian(g, phi.mode(n).values(), n2, true);
        }
        const double mode1 = std::pow(1.0 + n, kappa + 2.0);
        const double mode2 = std::pow(1.0 + n, kappa);
        double r1 = 0.0, r2 = 0.0, s1 = 0.0, s2 = 0.0;
        for (Index i = 1; i < size; ++i) {
            const double r = g.node(i);
            const double w1 = mode1 * std::pow(1.0 + r, alpha + 2.0);
            const double w2 = mode2 * std::pow(1.0 + r, alpha + 4.0);
            r1 = std::max(r1, w1 * std::abs(lg[i] + w.mode(n)[i]));
            s1 = std::max(s1, w1 * std::abs(w.mode(n)[i]));
            Complex res2 = lw[i] - full.Gstar.mode(n)[i] - lp[i];
            if (n == 2 && i >= rs) {
                const Complex outer = lw_outer[i] - g0.mode(n)[i] - lp_outer[i];
                r2 = std::max(r2, w2 * std::abs(outer));
                if (i > rs) {
                    res2 = outer;
                }
            }
            r2 = std::max(r2, w2 * std::abs(res2));
            s2 = std::max(s2, w2 * std::abs(lw[i]));
        }
        rep.per_mode_vorticity[static_cast<std::size_t>(n)] = r1;
        rep.per_mode_source[static_cast<std::size_t>(n)] = r2;
        rep.vorticity = std::max(rep.vorticity, r1);
        rep.source = std::max(rep.source, r2);
        rep.vorticity_scale = std::max(rep.vorticity_scale, s1);
        rep.source_scale = std::max(rep.source_scale, s2);
    }
    return rep;
}

ConsistencyReport consistency_Gstar_H(const FourierVector& gamma, const FourierVector& w,
                                      const StreamBackground& stream, double r_min)
{
    const FourierVector D = bilinear_D(stream, gamma);
    const FourierVector E = bilinear_E(stream, gamma);
    const FourierVector H = advection_H(stream, gamma, w);
    const FourierVector G = divergence_form(D, E);
    const RadialGrid& g = *gamma.grid();
    ConsistencyReport rep;
    for (int n = 0; n <= G.cutoff(); ++n) {
        for (Index i = 1; i < g.size(); ++i) {
            if (g.node(i) < r_min) {
                continue;
            }
            const double gap = std::abs(G.mode(n)[i] - H.mode(n)[i]);
            rep.raw = std::max(rep.raw, gap);
            rep.relative = std::max(rep.relative, gap / (1.0 + std::abs(H.mode(n)[i])));
        }
    }
    return rep;
}

MatchingGap matching_gap(const FourierVector& y)
{
    MatchingGap gap;
    if (y.cutoff() < 2 || !y.mode(2).seam()) {
        return gap;
    }
    const RadialProfile& m = y.mode(2);
    const Seam& s = *m.seam();
    gap.value = ratio_or_zero(std::abs(s.value_left - s.value_right), m.values().abs().maxCoeff());
    if (m.has_derivative(1)) {
        gap.slope =
            ratio_or_zero(std::abs(s.slope_left - s.slope_right), m.derivative(1).abs().maxCoeff());
    }
    return gap;
}

DecayMetric decay_metric(const SolutionFields& fields, const FourierVector& phi,
                         const BackgroundFlow& bg, double alpha, Index angles)
{
    const double ceiling = std::min(0.5, bg.rho_star);
    require(alpha > 0.0 && alpha < ceiling,
            "decay exponent alpha must lie in (0, min(1/2, rho*)) = (0, " +
                std::to_string(ceiling) + ")");
    const RadialGrid& g = *bg.grid;
    const Index size = g.size();
    const int cutoff = fields.u_theta.cutoff();

    // u_bar = (1/r) int_0^r s (phi* + phi_0)
    const ComplexArray& phi0 = phi.mode(0).values();
    ComplexArray ubar = ComplexArray::Zero(size);
    Complex moment0{0.0, 0.0};
    for (Index i = 1; i < size; ++i) {
        moment0 += segment_integral(g, phi0, i - 1, g.node(i - 1), g.node(i),
                                    [](double s) { return Complex{s, 0.0}; });
        ubar[i] = (bg.moment[i] + moment0) / g.node(i);
    }

    const RealArray thetas = theta_grid(angles);
    const auto ur = synthesize_modes([&](int n) { return fields.u_r.mode(n).values(); }, cutoff,
                                     size, thetas);
    const auto ut = synthesize_modes(
        [&](int n) {
            ComplexArray v = fields.u_theta.mode(n).values();
            if (n == 0) {
                v -= ubar;
            }
            return v;
        },
        cutoff, size, thetas);

    DecayMetric out;
    out.alpha_used = alpha;
    out.window_lo = 2.0 * bg.r_star;
    out.window_hi = 0.5 * g.r_max();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (Index i = 0; i < size; ++i) {
        const double r = g.node(i);
        const double dev = (ur.row(i).square() + ut.row(i).square()).sqrt().maxCoeff();
        out.sup_value = std::max(out.sup_value, std::pow(1.0 + r, 1.0 + alpha) * dev);
        if (r >= out.window_lo && r <= out.window_hi && dev > 0.0) {
            const double x = std::log(r), y = std::log(dev);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++out.window_points;
        }
    }
    if (out.window_points >= 2) {
        const double k = out.window_points;
        out.fitted_slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    }
    return out;
}

} // namespace nsfix
