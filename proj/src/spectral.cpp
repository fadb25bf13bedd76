#include "nsfix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nsfix {

namespace {

RadialProfile real_part(RadialProfile p)
{
    p.values() = p.values().real().cast<Complex>();
    for (int k = 1; k <= 3; ++k) {
        if (p.has_derivative(k)) {
            p.set_derivative(k, p.derivative(k).real().cast<Complex>());
        }
    }
    if (p.tail()) {
        auto t = *p.tail();
        t.coefficient = {t.coefficient.real(), 0.0};
        p.set_tail(t);
    }
    return p;
}

} // namespace

FourierVector::FourierVector(std::vector<RadialProfile> modes, bool derivative_only_zero_mode)
    : modes_(std::move(modes)), derivative_only_(derivative_only_zero_mode)
{
    require(!modes_.empty(), "a Fourier vector needs at least the zero mode");
    for (const auto& m : modes_) {
        require(m.grid() == modes_.front().grid(), "all modes must share one grid");
    }
    modes_[0] = real_part(std::move(modes_[0]));
}

FourierVector FourierVector::zero(GridPtr grid, int cutoff)
{
    require(cutoff >= 0, "mode cutoff must be non-negative");
    std::vector<RadialProfile> modes(static_cast<std::size_t>(cutoff) + 1,
                                     RadialProfile::zero(grid));
    return FourierVector(std::move(modes));
}

const RadialProfile& FourierVector::mode(int n) const
{
    require(n >= 0 && n <= cutoff(), "mode index out of range: " + std::to_string(n));
    return modes_[static_cast<std::size_t>(n)];
}

RadialProfile FourierVector::mode_at(int n) const
{
    return n >= 0 ? mode(n) : mode(-n).conjugate();
}

void FourierVector::set_mode(int n, RadialProfile profile)
{
    require(n >= 0 && n <= cutoff(), "mode index out of range: " + std::to_string(n));
    require(profile.grid() == grid(), "mode must live on the vector's grid");
    modes_[static_cast<std::size_t>(n)] = n == 0 ? real_part(std::move(profile)) : std::move(profile);
}

ComplexArray FourierVector::samples(int n, int order) const
{
    const RadialProfile& m = mode(std::abs(n));
    const ComplexArray& v = order == 0 ? m.values() : m.derivative(order);
    return n >= 0 ? ComplexArray(v) : ComplexArray(v.conjugate());
}

FourierVector FourierVector::scaled(double c) const
{
    FourierVector out = *this;
    for (auto& m : out.modes_) {
        m = m.scaled(c);
    }
    return out;
}

double FourierVector::origin_defect() const
{
    double defect = modes_[0].values().imag().abs().maxCoeff();
    for (std::size_t n = 1; n < modes_.size(); ++n) {
        defect = std::max(defect, std::abs(modes_[n][0]));
    }
    return defect;
}

namespace {

RadialProfile combine(const RadialProfile& a, const RadialProfile& b, double sign)
{
    RadialProfile out(a.grid(), a.values() + sign * b.values());
    if (a.tail() && b.tail() && a.tail()->exponent == b.tail()->exponent) {
        out.set_tail(TailModel{a.tail()->coefficient + sign * b.tail()->coefficient,
                               a.tail()->exponent});
    } else if (a.tail() && b.tail()) {
        // Mismatched decay classes: keep the slower one, refitted.
        const double beta = std::min(a.tail()->exponent, b.tail()->exponent);
        out.set_tail(fit_tail(*a.grid(), out.values(), beta));
    }
    for (int k = 1; k <= 3; ++k) {
        if (a.has_derivative(k) && b.has_derivative(k)) {
            out.set_derivative(k, a.derivative(k) + sign * b.derivative(k));
        }
    }
    if (a.seam() && b.seam()) {
        const Seam& sa = *a.seam();
        const Seam& sb = *b.seam();
        out.set_seam(Seam{sa.value_left + sign * sb.value_left,
                          sa.value_right + sign * sb.value_right,
                          sa.slope_left + sign * sb.slope_left,
                          sa.slope_right + sign * sb.slope_right});
    }
    return out;
}

FourierVector combine(const FourierVector& a, const FourierVector& b, double sign)
{
    require(a.cutoff() == b.cutoff(), "Fourier vectors must share the mode cutoff");
    std::vector<RadialProfile> modes;
    modes.reserve(static_cast<std::size_t>(a.cutoff()) + 1);
    for (int n = 0; n <= a.cutoff(); ++n) {
        modes.push_back(combine(a.mode(n), b.mode(n), sign));
    }
    return FourierVector(std::move(modes), a.derivative_only_zero_mode());
}

} // namespace

FourierVector operator+(const FourierVector& a, const FourierVector& b)
{
    return combine(a, b, 1.0);
}

FourierVector operator-(const FourierVector& a, const FourierVector& b)
{
    return combine(a, b, -1.0);
}

RealArray theta_grid(Index count)
{
    RealArray t(count);
    for (Index j = 0; j < count; ++j) {
        t[j] = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(count);
    }
    return t;
}

FourierVector decompose_angular(const Eigen::ArrayXXd& samples, GridPtr grid, int cutoff)
{
    const Index angles = samples.cols();
    require(samples.rows() == grid->size(), "sample rows must match the radial nodes");
    require(angles >= 4 * cutoff + 1, "angular resolution must be at least 4N + 1 points");
    const RealArray thetas = theta_grid(angles);
    std::vector<RadialProfile> modes;
    for (int n = 0; n <= cutoff; ++n) {
        ComplexArray basis(angles);
        for (Index j = 0; j < angles; ++j) {
            basis[j] = std::polar(1.0 / static_cast<double>(angles), -n * thetas[j]);
        }
        ComplexArray v(grid->size());
        for (Index i = 0; i < grid->size(); ++i) {
            Complex sum{0.0, 0.0};
            for (Index j = 0; j < angles; ++j) {
                sum += samples(i, j) * basis[j];
            }
            v[i] = sum;
        }
        modes.emplace_back(grid, std::move(v));
    }
    return FourierVector(std::move(modes));
}

FourierVector decompose_angular(const PolarField& field, GridPtr grid, int cutoff, Index angles)
{
    require(angles >= 4 * cutoff + 1, "angular resolution must be at least 4N + 1 points");
    const RealArray thetas = theta_grid(angles);
    Eigen::ArrayXXd samples(grid->size(), angles);
    for (Index i = 0; i < grid->size(); ++i) {
        for (Index j = 0; j < angles; ++j) {
            samples(i, j) = field(grid->node(i), thetas[j]);
        }
    }
    return decompose_angular(samples, std::move(grid), cutoff);
}

Eigen::ArrayXXd synthesize_modes(const std::function<ComplexArray(int)>& mode_values, int cutoff,
                                 Index rows, const RealArray& thetas)
{
    std::vector<ComplexArray> values;
    for (int n = 0; n <= cutoff; ++n) {
        values.push_back(mode_values(n));
        require(values.back().size() == rows, "mode sample count mismatch");
    }
    Eigen::ArrayXXd out(rows, thetas.size());
    for (Index j = 0; j < thetas.size(); ++j) {
        for (Index i = 0; i < rows; ++i) {
            Complex sum = values[0][i];
            double scale = std::abs(values[0][i]);
            for (int n = 1; n <= cutoff; ++n) {
                const Complex e = std::polar(1.0, n * thetas[j]);
                const Complex pos = values[static_cast<std::size_t>(n)][i] * e;
                const Complex neg = std::conj(values[static_cast<std::size_t>(n)][i]) * std::conj(e);
                sum += pos + neg;
                scale += 2.0 * std::abs(pos);
            }
            require(std::abs(sum.imag()) <= 1e-13 * scale + 1e-300,
                    "synthesized field is not real: conjugate symmetry violated");
            out(i, j) = sum.real();
        }
    }
    return out;
}

Eigen::ArrayXXd synthesize_angular(const FourierVector& fv, const RealArray& thetas)
{
    return synthesize_modes([&](int n) { return fv.mode(n).values(); }, fv.cutoff(),
                            fv.grid()->size(), thetas);
}

} // namespace nsfix
