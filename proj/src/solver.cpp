#include "nsfix/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsfix/operators.hpp"
#include "nsfix/parallel.hpp"
#include "nsfix/quadrature.hpp"

namespace nsfix {

RadialFunction bump_profile(double amplitude, double radius, int power)
{
    require(radius > 0.0, "bump radius must be positive");
    require(power >= 1, "bump power must be at least 1");
    RadialFunction f;
    f.value = [=](double r) {
        return r >= radius ? 0.0 : amplitude * std::pow(1.0 - r * r / (radius * radius), power);
    };
    f.slope = [=](double r) {
        if (r >= radius) {
            return 0.0;
        }
        const double u = 1.0 - r * r / (radius * radius);
        return -2.0 * power * amplitude * r / (radius * radius) * std::pow(u, power - 1);
    };
    return f;
}

RadialFunction polynomial_profile(std::vector<double> coefficients, double radius)
{
    require(radius > 0.0, "polynomial support radius must be positive");
    require(!coefficients.empty(), "polynomial background needs coefficients");
    RadialFunction f;
    f.value = [=](double r) {
        if (r >= radius) {
            return 0.0;
        }
        double sum = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
            sum = sum * r + *it;
        }
        return sum;
    };
    f.slope = [=](double r) {
        if (r >= radius) {
            return 0.0;
        }
        double sum = 0.0;
        for (std::size_t k = coefficients.size() - 1; k >= 1; --k) {
            sum = sum * r + static_cast<double>(k) * coefficients[k];
        }
        return sum;
    };
    return f;
}

double rho_from_mu(double mu)
{
    // sqrt(2) sqrt(sqrt(1 + mu^2/4) + 1) - 2 rewritten without cancellation:
    // a = sqrt(1 + mu^2/4) - 1, rho = a / (sqrt(1 + a/2) + 1).
    const double q = 0.25 * mu * mu;
    const double a = q / (std::sqrt(1.0 + q) + 1.0);
    return a / (std::sqrt(1.0 + 0.5 * a) + 1.0);
}

Complex zeta_index(int n, double mu)
{
    const double nn = n;
    return std::sqrt(Complex{nn * nn, nn * mu});
}

BackgroundFlow background_from_phi(const RadialFunction& phi, GridPtr grid, double delta)
{
    const RadialGrid& g = *grid;
    const Index size = g.size();
    const Index rs = g.r_star_index();
    BackgroundFlow bg;
    bg.grid = grid;
    bg.r_star = g.r_star();
    bg.delta_config = delta;

    RealArray values(size), slopes(size);
    for (Index i = 0; i < size; ++i) {
        values[i] = phi.value(g.node(i));
        slopes[i] = phi.slope(g.node(i));
    }
    require((values.segment(rs + 1, size - rs - 1) == 0.0).all(),
            "background vorticity must vanish beyond R*");
    bg.phi_star = RadialProfile(grid, values.cast<Complex>(), TailModel{});

    bg.moment = RealArray::Zero(size);
    double total_variation = 0.0;
    for (Index i = 1; i < size; ++i) {
        const double a = g.node(i - 1), b = g.node(i);
        if (i <= rs) {
            bg.moment[i] = bg.moment[i - 1] +
                           quad::adaptive_gk15([&](double s) { return s * phi.value(s); }, a, b);
            total_variation +=
                quad::adaptive_gk15([&](double s) { return s * std::abs(phi.value(s)); }, a, b);
        } else {
            bg.moment[i] = bg.moment[i - 1];
        }
    }
    bg.mu_star = bg.moment[rs];
    // mu* at quadrature roundoff relative to int s |phi*| counts as zero.
    require(std::abs(bg.mu_star) > 1e-12 * total_variation,
            "background circulation mu* must be non-zero");
    bg.rho_star = rho_from_mu(bg.mu_star);
    require(bg.rho_star < 1.0, "background gives rho* >= 1; the decay gain must lie in (0, 1)");

    double sup_moment = 0.0, sup_phi = 0.0, sup_slope = 0.0;
    for (Index i = 0; i < size; ++i) {
        const double w = (1.0 + g.node(i)) * (1.0 + g.node(i));
        sup_moment = std::max(sup_moment, std::abs(bg.moment[i]));
        sup_phi = std::max(sup_phi, w * std::abs(values[i]));
        sup_slope = std::max(sup_slope, w * std::abs(slopes[i]));
    }
    bg.nu_star = sup_moment + sup_phi + sup_slope;
    bg.smallness = std::pow(bg.r_star, bg.rho_star) * bg.nu_star;
    if (!(bg.smallness < delta)) {
        std::ostringstream msg;
        msg << "smallness condition R*^rho* nu* < delta fails: " << bg.smallness
            << " >= " << delta;
        bg.warnings.push_back(msg.str());
    }
    // C^2 across R*: phi, phi' and phi'' vanish from the left.
    const double h = 1e-5 * bg.r_star;
    const double left2 = (phi.slope(bg.r_star - h) - phi.slope(bg.r_star - 2.0 * h)) / h;
    const double scale = std::max(sup_phi, 1e-300);
    if (std::abs(phi.value(bg.r_star * (1.0 - 1e-12))) > 1e-8 * scale ||
        std::abs(phi.slope(bg.r_star * (1.0 - 1e-12))) > 1e-6 * scale ||
        std::abs(left2) > 1e-2 * scale / (bg.r_star * bg.r_star)) {
        bg.warnings.push_back("background vorticity is not C^2 across R*");
    }

    bg.stream = StreamBackground::zero(g);
    for (Index i = 1; i < size; ++i) {
        const double r = g.node(i);
        const double m = i >= rs ? bg.mu_star : bg.moment[i];
        bg.stream.psi1[i] = -m / r;
        bg.stream.psi2[i] = m / (r * r) - values[i];
        bg.stream.psi3[i] = -2.0 * m / (r * r * r) + values[i] / r - slopes[i];
        bg.stream.omega1[i] = slopes[i];
    }
    bg.stream.psi2[0] = -0.5 * values[0];
    const ComplexArray psi3 = bg.stream.psi3.cast<Complex>();
    bg.stream.psi3[0] = extrapolate_to_zero(g, psi3).real();
    bg.stream.omega1[0] = slopes[0];
    return bg;
}

namespace {

// Decay exponents of the fitted tails, relative to alpha.
constexpr double kSourceTail = 4.0;
constexpr double kVorticityTail = 2.0;
constexpr double kMeanFluxTail = 3.0;

struct ModeData {
    ComplexArray value, slope;
    std::optional<Seam> seam;
};

double settings_switch(const SolverSettings& s, const RadialGrid& g)
{
    return s.r_switch > 0.0 ? s.r_switch : default_switch_radius(g);
}

RadialProfile with_tail(RadialProfile p, double exponent)
{
    p.set_tail(fit_tail(*p.grid(), p.values(), exponent));
    return p;
}

// y = -I^inf_n[G] - J^0_n[G] + sigma for n != 0, +-2.
ModeData generic_mode(int n, const RadialProfile* G, const RadialProfile& sigma)
{
    const RadialGrid& g = *sigma.grid();
    const Index size = g.size();
    ModeData out{sigma.values(), sigma.derivative(1), std::nullopt};
    if (G == nullptr) {
        return out;
    }
    const double z = n;
    const ComplexArray I = op_I_nodes(*G, z, 0, g.last(), true);
    const ComplexArray J = op_J_nodes(*G, z, 0, g.last());
    out.value = -I - J + sigma.values();
    for (Index i = 1; i < size; ++i) {
        out.slope[i] = -z / g.node(i) * (I[i] - J[i]) + sigma.derivative(1)[i];
    }
    ComplexArray correction(size);
    for (Index i = 1; i < size; ++i) {
        correction[i] = out.slope[i] - sigma.derivative(1)[i];
    }
    out.slope[0] = extrapolate_to_zero(g, correction) + sigma.derivative(1)[0];
    return out;
}

// y_0 = -D_0/r + 2 int_r^inf D_0/s^2 ds + sigma_0.
ModeData zero_mode(const RadialProfile* D, const RadialProfile& sigma, double alpha)
{
    const RadialGrid& g = *sigma.grid();
    const Index size = g.size();
    ModeData out{sigma.values(), sigma.derivative(1), std::nullopt};
    if (D == nullptr) {
        return out;
    }
    ComplexArray flux(size);
    for (Index i = 1; i < size; ++i) {
        flux[i] = (*D)[i] / (g.node(i) * g.node(i));
    }
    flux[0] = extrapolate_to_zero(g, flux);
    const TailModel tail = fit_tail(g, flux, alpha + kMeanFluxTail);
    ComplexArray upper(size);
    upper[g.last()] = tail_integral(tail, g.r_max());
    for (Index i = g.last() - 1; i >= 0; --i) {
        upper[i] = upper[i + 1] + segment_integral(g, flux, i, g.node(i), g.node(i + 1),
                                                   [](double) { return Complex{1.0, 0.0}; });
    }
    const ComplexArray& d1 = D->derivative(1);
    ComplexArray extra(size);
    for (Index i = 1; i < size; ++i) {
        const double r = g.node(i);
        out.value[i] += -(*D)[i] / r + 2.0 * upper[i];
        extra[i] = -d1[i] / r - (*D)[i] / (r * r);
    }
    out.value[0] += 2.0 * upper[0];
    extra[0] = extrapolate_to_zero(g, extra);
    out.slope += extra;
    return out;
}

// Boundary-integrated pieces of the sigma part on the outer block:
// I^inf_zeta[Delta_n sigma] and J^R*_zeta[Delta_n sigma].
struct SigmaIntegrals {
    ComplexArray I, J;
};

SigmaIntegrals sigma_integrals(const RadialProfile& sigma, Complex zeta, int n)
{
    const RadialGrid& g = *sigma.grid();
    const Index size = g.size();
    const Index rs = g.r_star_index();
    const double r_star = g.r_star();
    ComplexArray over_r2(size);
    over_r2[0] = 0.0;
    for (Index i = 1; i < size; ++i) {
        over_r2[i] = sigma[i] / (g.node(i) * g.node(i));
    }
    std::optional<TailModel> tail;
    if (sigma.tail()) {
        tail = TailModel{sigma.tail()->coefficient, sigma.tail()->exponent + 2.0};
    } else {
        tail = TailModel{};
    }
    const RadialProfile q(sigma.grid(), over_r2, tail);
    const ComplexArray Iq = op_I_nodes(q, zeta, rs, g.last(), true);
    const ComplexArray Jq = op_J_nodes(q, zeta, rs, g.last());
    const Complex c = zeta * zeta - static_cast<double>(n * n);
    const Complex s_star = sigma[rs];
    const Complex ds_star = sigma.derivative(1)[rs];
    SigmaIntegrals out{ComplexArray::Zero(size), ComplexArray::Zero(size)};
    for (Index i = rs; i < size; ++i) {
        const double r = g.node(i);
        const Complex rs_over_r = cpow(r_star / r, zeta);
        const Complex ds = sigma.derivative(1)[i];
        out.I[i] = -r * ds / (2.0 * zeta) - 0.5 * sigma[i] + c * Iq[i];
        out.J[i] = r * ds / (2.0 * zeta) - 0.5 * sigma[i] + c * Jq[i] -
                   rs_over_r * r_star * ds_star / (2.0 * zeta) + 0.5 * rs_over_r * s_star;
    }
    return out;
}

// n = 2: inner representation on [0, R*], outer on [R*, inf) with index zeta.
ModeData blended_mode(const RadialProfile* Gstar, const RadialProfile* G0,
                      const RadialProfile& sigma, Complex zeta)
{
    constexpr int n = 2;
    const double m = n;
    const RadialGrid& g = *sigma.grid();
    const Index size = g.size();
    const Index rs = g.r_star_index();
    const double r_star = g.r_star();
    const ComplexArray& ds = sigma.derivative(1);

    ComplexArray Ii = ComplexArray::Zero(size), Ji = Ii, Io = Ii, Jo = Ii;
    if (Gstar != nullptr) {
        Ii = op_I_nodes(*Gstar, m, 0, rs, false);
        Ji = op_J_nodes(*Gstar, m, 0, rs);
        Io = op_I_nodes(*G0, zeta, rs, g.last(), true);
        Jo = op_J_nodes(*G0, zeta, rs, g.last());
    }
    const Complex B = Ji[rs];
    const Complex C = Io[rs];
    const Complex p1 = ((zeta - m) * B - 2.0 * zeta * C) / (m + zeta);
    const Complex p2 = (-(zeta - m) * C - 2.0 * m * B) / (m + zeta);

    const SigmaIntegrals sq = sigma_integrals(sigma, zeta, n);
    const Complex q1 = (-2.0 * zeta * sq.I[rs] - zeta * sigma[rs] - r_star * ds[rs]) / (m + zeta);
    const Complex q2 = (-(zeta - m) * sq.I[rs] + m * sigma[rs] - r_star * ds[rs]) / (m + zeta);

    ModeData out{ComplexArray(size), ComplexArray(size), std::nullopt};
    const auto inner = [&](Index i, Complex& value, Complex& slope) {
        const double r = g.node(i);
        const double t = r / r_star;
        value = -Ii[i] - Ji[i] + t * t * (p1 + q1) + sigma[i];
        slope = 2.0 * r / (r_star * r_star) * (p1 + q1) + ds[i];
        if (r > 0.0) {
            slope += -m / r * (Ii[i] - Ji[i]);
        }
    };
    const auto outer = [&](Index i, Complex& value, Complex& slope) {
        const double r = g.node(i);
        const Complex decay = cpow(r_star / r, zeta);
        value = -Io[i] - Jo[i] - sq.I[i] - sq.J[i] + decay * (p2 + q2);
        slope = -zeta / r * (Io[i] - Jo[i] + sq.I[i] - sq.J[i] + decay * (p2 + q2));
    };
    for (Index i = 0; i <= rs; ++i) {
        inner(i, out.value[i], out.slope[i]);
    }
    for (Index i = rs + 1; i < size; ++i) {
        outer(i, out.value[i], out.slope[i]);
    }
    if (Gstar != nullptr) {
        // -(2/r)(I - J) -> 0 at the origin with I, J = O(r^3).
        ComplexArray lead(size);
        for (Index i = 1; i <= rs; ++i) {
            lead[i] = -m / g.node(i) * (Ii[i] - Ji[i]);
        }
        out.slope[0] = extrapolate_to_zero(g, lead) + ds[0];
    }
    Seam seam;
    inner(rs, seam.value_left, seam.slope_left);
    outer(rs, seam.value_right, seam.slope_right);
    out.seam = seam;
    return out;
}

void require_slopes(const FourierVector& f, const char* what)
{
    for (int n = 0; n <= f.cutoff(); ++n) {
        require(f.mode(n).has_derivative(1),
                std::string(what) + " needs first-derivative data in every mode");
    }
}

FourierVector assemble(const FourierVector* w, const FourierVector& sigma,
                       const BackgroundFlow& bg, const SolverSettings& settings)
{
    require_slopes(sigma, "forcing");
    require(sigma.grid() == bg.grid, "forcing and background must share the grid");
    const RadialGrid& g = *bg.grid;
    const int cutoff = sigma.cutoff();
    const double alpha = settings.alpha;

    std::optional<SourceBundle> full;
    std::optional<FourierVector> g0;
    if (w != nullptr) {
        require_slopes(*w, "vorticity");
        require(w->cutoff() == cutoff, "vorticity and forcing must share the mode cutoff");
        const double r_switch = settings_switch(settings, g);
        const FourierVector gamma = map_L(*w, alpha);
        full = compute_sources(bg.stream, gamma, *w, r_switch);
        if (cutoff >= 2) {
            g0 = source_G0(gamma, *w, r_switch);
        }
    }

    std::vector<RadialProfile> modes(static_cast<std::size_t>(cutoff) + 1);
    parallel_for(0, cutoff + 1, [&](int n) {
        const RadialProfile& s = sigma.mode(n);
        ModeData data;
        if (n == 0) {
            data = zero_mode(full ? &full->D.mode(0) : nullptr, s, alpha);
        } else if (n == 2) {
            std::optional<RadialProfile> gs, gz;
            if (full) {
                gs = with_tail(full->Gstar.mode(2), alpha + kSourceTail);
                gz = with_tail(g0->mode(2), alpha + kSourceTail);
            }
            data = blended_mode(gs ? &*gs : nullptr, gz ? &*gz : nullptr, s, bg.zeta(2));
        } else {
            std::optional<RadialProfile> gs;
            if (full) {
                gs = with_tail(full->Gstar.mode(n), alpha + kSourceTail);
            }
            data = generic_mode(n, gs ? &*gs : nullptr, s);
        }
        RadialProfile out(bg.grid, std::move(data.value));
        out.set_derivative(1, std::move(data.slope));
        out.set_seam(data.seam);
        if (w == nullptr && n != 2) {
            out.set_tail(s.tail());
        } else {
            out.set_tail(fit_tail(g, out.values(), alpha + kVorticityTail));
        }
        modes[static_cast<std::size_t>(n)] = std::move(out);
    });
    return FourierVector(std::move(modes));
}

} // namespace

FourierVector map_Phi(const FourierVector& phi, const BackgroundFlow& bg,
                      const SolverSettings& settings)
{
    return assemble(nullptr, phi, bg, settings);
}

FourierVector map_S(const FourierVector& w, const FourierVector& sigma, const BackgroundFlow& bg,
                    const SolverSettings& settings)
{
    return assemble(&w, sigma, bg, settings);
}

PicardResult picard_solve(const FourierVector& phi, const BackgroundFlow& bg,
                          const SolverSettings& settings, const IterateObserver& observer)
{
    require(settings.tol > 0.0, "tolerance must be positive");
    require(settings.max_iter >= 1, "at least one iteration is required");
    const WeightedNormSpec norm = settings.iterate_norm();
    PicardResult result;
    IterationReport& report = result.report;
    report.budget.delta_config = bg.delta_config;
    report.budget.epsilon_config = settings.epsilon_config;
    report.budget.data_norm = norm_weighted(phi, norm);

    FourierVector previous = FourierVector::zero(bg.grid, phi.cutoff());
    double previous_increment = 0.0;
    int rising = 0;
    for (int j = 1; j <= settings.max_iter; ++j) {
        FourierVector current = j == 1 ? map_Phi(phi, bg, settings)
                                       : map_S(previous, phi, bg, settings);
        if (observer) {
            observer(j, current);
        }
        IterationStep step;
        step.index = j;
        step.norm = norm_weighted(current, norm);
        step.increment = norm_weighted(current - previous, norm);
        step.ratio = j == 1 || previous_increment == 0.0 ? 0.0 : step.increment / previous_increment;
        report.steps.push_back(step);
        report.budget.max_norm = std::max(report.budget.max_norm, step.norm);
        if (j >= 2) {
            report.budget.max_ratio = std::max(report.budget.max_ratio, step.ratio);
        }
        result.w = std::move(current);

        if (!std::isfinite(step.norm) || !std::isfinite(step.increment)) {
            report.diverged = true;
            report.divergence_step = j;
            report.status = "diverged: non-finite iterate";
            return result;
        }
        if (step.increment <= settings.tol * step.norm || step.norm == 0.0) {
            report.converged = true;
            report.status = "converged";
            return result;
        }
        rising = j >= 2 && step.ratio >= 1.0 ? rising + 1 : 0;
        if (rising >= 3) {
            report.diverged = true;
            report.divergence_step = j;
            report.status = "diverged: contraction ratio >= 1 for 3 consecutive steps";
            return result;
        }
        previous_increment = step.increment;
        previous = result.w;
    }
    report.status = "not converged within max_iter";
    return result;
}

SolutionFields reconstruct_solution(const FourierVector& w, const BackgroundFlow& bg,
                                    const SolverSettings& settings)
{
    const RadialGrid& g = *bg.grid;
    const Index size = g.size();
    SolutionFields out;
    out.gamma = map_L(w, settings.alpha);

    std::vector<RadialProfile> omega, ur, ut;
    for (int n = 0; n <= w.cutoff(); ++n) {
        const RadialProfile& gm = out.gamma.mode(n);
        ComplexArray o = w.mode(n).values();
        ComplexArray radial(size), angular(size);
        if (n == 0) {
            o += bg.phi_star.values();
            radial.setZero();
            for (Index i = 0; i < size; ++i) {
                angular[i] = -bg.stream.psi1[i] - gm.derivative(1)[i];
            }
        } else {
            const Complex in{0.0, static_cast<double>(n)};
            for (Index i = 1; i < size; ++i) {
                radial[i] = in * gm[i] / g.node(i);
            }
            radial[0] = in * gm.derivative(1)[0];
            angular = -gm.derivative(1);
        }
        omega.emplace_back(bg.grid, std::move(o));
        ur.emplace_back(bg.grid, std::move(radial));
        ut.emplace_back(bg.grid, std::move(angular));
    }
    out.omega = FourierVector(std::move(omega));
    out.u_r = FourierVector(std::move(ur));
    out.u_theta = FourierVector(std::move(ut));
    return out;
}

} // namespace nsfix
