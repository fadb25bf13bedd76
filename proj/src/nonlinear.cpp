#include "nsfix/nonlinear.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "nsfix/parallel.hpp"

namespace nsfix {

StreamBackground StreamBackground::zero(const RadialGrid& grid)
{
    const Index n = grid.size();
    return {RealArray::Zero(n), RealArray::Zero(n), RealArray::Zero(n), RealArray::Zero(n)};
}

double default_switch_radius(const RadialGrid& grid)
{
    return std::min(1.0, 0.5 * grid.r_star());
}

namespace {

constexpr Complex kI{0.0, 1.0};

// Samples of orders 0..max_order for every mode -N..N, negative modes conjugated.
class ModeTable {
public:
    ModeTable(const FourierVector& fv, int max_order) : cutoff_(fv.cutoff())
    {
        for (int order = 0; order <= max_order; ++order) {
            std::vector<ComplexArray>& row = data_[static_cast<std::size_t>(order)];
            for (int k = -cutoff_; k <= cutoff_; ++k) {
                const RadialProfile& m = fv.mode(std::abs(k));
                require(order == 0 || m.has_derivative(order),
                        "source terms need derivative data of order " + std::to_string(order));
                const ComplexArray& v = order == 0 ? m.values() : m.derivative(order);
                row.push_back(k >= 0 ? ComplexArray(v) : ComplexArray(v.conjugate()));
            }
        }
    }

    int cutoff() const { return cutoff_; }
    const ComplexArray& operator()(int k, int order) const
    {
        return data_[static_cast<std::size_t>(order)][static_cast<std::size_t>(k + cutoff_)];
    }

private:
    int cutoff_;
    std::array<std::vector<ComplexArray>, 4> data_;
};

bool has_order(const FourierVector& fv, int order)
{
    for (int n = 0; n <= fv.cutoff(); ++n) {
        if (!fv.mode(n).has_derivative(order)) {
            return false;
        }
    }
    return true;
}

// Calls term(k, l) for k ascending with k + l = n and |k|, |l| <= N.
template <typename Term>
void convolve(int n, int cutoff, const Term& term)
{
    for (int k = -cutoff; k <= cutoff; ++k) {
        const int l = n - k;
        if (l >= -cutoff && l <= cutoff) {
            term(k, l);
        }
    }
}

const RealArray& radii(const FourierVector& fv) { return fv.grid()->nodes(); }

} // namespace

FourierVector bilinear_D(const StreamBackground& bg, const FourierVector& gamma)
{
    const bool second = has_order(gamma, 3);
    const ModeTable g(gamma, second ? 3 : 2);
    const int cutoff = g.cutoff();
    const Index size = gamma.grid()->size();
    std::vector<RadialProfile> modes(static_cast<std::size_t>(cutoff) + 1);
    parallel_for(0, cutoff + 1, [&](int n) {
        ComplexArray d = ComplexArray::Zero(size), d1 = d, d2 = d;
        convolve(n, cutoff, [&](int k, int l) {
            if (k == 0) {
                return;
            }
            const double kk = k;
            d += kk * g(k, 0) * g(l, 1);
            d1 += kk * (g(k, 1) * g(l, 1) + g(k, 0) * g(l, 2));
            if (second) {
                d2 += kk * (g(k, 2) * g(l, 1) + 2.0 * g(k, 1) * g(l, 2) + g(k, 0) * g(l, 3));
            }
        });
        const double nn = n;
        d = kI * (d + nn * g(n, 0) * bg.psi1);
        d1 = kI * (d1 + nn * (g(n, 1) * bg.psi1 + g(n, 0) * bg.psi2));
        RadialProfile out(gamma.grid(), std::move(d));
        out.set_derivative(1, std::move(d1));
        if (second) {
            d2 = kI * (d2 + nn * (g(n, 2) * bg.psi1 + 2.0 * g(n, 1) * bg.psi2 + g(n, 0) * bg.psi3));
            out.set_derivative(2, std::move(d2));
        }
        modes[static_cast<std::size_t>(n)] = std::move(out);
    });
    return FourierVector(std::move(modes));
}

FourierVector bilinear_E(const StreamBackground& bg, const FourierVector& gamma)
{
    const ModeTable g(gamma, 2);
    const int cutoff = g.cutoff();
    const auto& grid = *gamma.grid();
    const Index size = grid.size();
    const RealArray& r = radii(gamma);
    std::vector<RadialProfile> modes(static_cast<std::size_t>(cutoff) + 1);
    modes[0] = RadialProfile::zero(gamma.grid());
    parallel_for(1, cutoff + 1, [&](int n) {
        // klg = sum k l g_k g_l, klg1 = sum k l (g_k' g_l + g_k g_l'),
        // gg = sum g_k' g_l', gg1 = sum (g_k'' g_l' + g_k' g_l'')
        ComplexArray klg = ComplexArray::Zero(size), klg1 = klg, gg = klg, gg1 = klg;
        convolve(n, cutoff, [&](int k, int l) {
            const double kl = static_cast<double>(k) * l;
            if (kl != 0.0) {
                klg += kl * g(k, 0) * g(l, 0);
                klg1 += kl * (g(k, 1) * g(l, 0) + g(k, 0) * g(l, 1));
            }
            gg += g(k, 1) * g(l, 1);
            gg1 += g(k, 2) * g(l, 1) + g(k, 1) * g(l, 2);
        });
        ComplexArray e(size), e1(size);
        for (Index i = 1; i < size; ++i) {
            const double ri = r[i];
            e[i] = -klg[i] / ri - ri * gg[i] - 2.0 * ri * g(n, 1)[i] * bg.psi1[i];
            e1[i] = klg[i] / (ri * ri) - klg1[i] / ri - gg[i] - ri * gg1[i] -
                    2.0 * g(n, 1)[i] * bg.psi1[i] -
                    2.0 * ri * (g(n, 2)[i] * bg.psi1[i] + g(n, 1)[i] * bg.psi2[i]);
        }
        e[0] = 0.0;
        e1[0] = extrapolate_to_zero(grid, e1);
        RadialProfile out(gamma.grid(), std::move(e));
        out.set_derivative(1, std::move(e1));
        modes[static_cast<std::size_t>(n)] = std::move(out);
    });
    return FourierVector(std::move(modes));
}

FourierVector advection_H(const StreamBackground& bg, const FourierVector& gamma,
                          const FourierVector& w)
{
    require(gamma.cutoff() == w.cutoff(), "gamma and w must share the mode cutoff");
    const ModeTable g(gamma, 1);
    const ModeTable v(w, 1);
    const int cutoff = g.cutoff();
    const auto& grid = *gamma.grid();
    const Index size = grid.size();
    const RealArray& r = radii(gamma);
    std::vector<RadialProfile> modes(static_cast<std::size_t>(cutoff) + 1);
    parallel_for(0, cutoff + 1, [&](int n) {
        ComplexArray s = ComplexArray::Zero(size);
        convolve(n, cutoff, [&](int k, int l) {
            if (k != 0) {
                s += static_cast<double>(k) * g(k, 0) * v(l, 1);
            }
            if (l != 0) {
                s -= static_cast<double>(l) * v(l, 0) * g(k, 1);
            }
        });
        const double nn = n;
        s += nn * (bg.omega1 * g(n, 0) - bg.psi1 * v(n, 0));
        ComplexArray h(size);
        for (Index i = 1; i < size; ++i) {
            h[i] = kI * s[i] / r[i];
        }
        h[0] = extrapolate_to_zero(grid, h);
        modes[static_cast<std::size_t>(n)] = RadialProfile(gamma.grid(), std::move(h));
    });
    return FourierVector(std::move(modes));
}

FourierVector divergence_form(const FourierVector& D, const FourierVector& E)
{
    require(D.cutoff() == E.cutoff(), "D and E must share the mode cutoff");
    const RealArray& r = radii(D);
    const Index size = r.size();
    std::vector<RadialProfile> modes;
    for (int n = 0; n <= D.cutoff(); ++n) {
        const RadialProfile& d = D.mode(n);
        const RadialProfile& e = E.mode(n);
        const ComplexArray& d1 = d.derivative(1);
        const ComplexArray& d2 = d.derivative(2);
        const ComplexArray& e1 = e.derivative(1);
        const double nn = n;
        ComplexArray out(size);
        out[0] = 0.0;
        for (Index i = 1; i < size; ++i) {
            const double ri = r[i];
            out[i] = -(d1[i] + ri * d2[i] + kI * nn * e1[i]) / (ri * ri) +
                     (1.0 - nn * nn) * d[i] / (ri * ri * ri);
        }
        modes.emplace_back(D.grid(), std::move(out));
    }
    return FourierVector(std::move(modes));
}

FourierVector source_Gstar(const FourierVector& D, const FourierVector& E, const FourierVector& H,
                           double r_switch)
{
    FourierVector g = divergence_form(D, E);
    const RealArray& r = radii(D);
    for (int n = 0; n <= g.cutoff(); ++n) {
        RadialProfile m = g.mode(n);
        for (Index i = 0; i < r.size() && r[i] < r_switch; ++i) {
            m.values()[i] = H.mode(n)[i];
        }
        g.set_mode(n, std::move(m));
    }
    return g;
}

SourceBundle compute_sources(const StreamBackground& bg, const FourierVector& gamma,
                             const FourierVector& w, double r_switch)
{
    SourceBundle out;
    out.D = bilinear_D(bg, gamma);
    out.E = bilinear_E(bg, gamma);
    out.H = advection_H(bg, gamma, w);
    out.Gstar = source_Gstar(out.D, out.E, out.H, r_switch);
    out.with_background = bg.psi1.abs().maxCoeff() > 0.0 || bg.omega1.abs().maxCoeff() > 0.0;
    return out;
}

FourierVector source_G0(const FourierVector& gamma, const FourierVector& w, double r_switch)
{
    SourceBundle b = compute_sources(StreamBackground::zero(*gamma.grid()), gamma, w, r_switch);
    return b.Gstar;
}

} // namespace nsfix
