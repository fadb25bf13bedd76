#include "nsfix/operators.hpp"

#include <cmath>
#include <string>

#include "nsfix/parallel.hpp"

namespace nsfix {

ComplexIndex::ComplexIndex(Complex z) : z_(z)
{
    require(std::isfinite(z.real()) && std::isfinite(z.imag()) && z.real() > 0.0,
            "operator index must have positive real part");
}

namespace {

// (a/b)^z for a, b >= 0, b > 0; zero when a = 0.
Complex ratio_pow(double a, double b, Complex z)
{
    return a == 0.0 ? Complex{0.0, 0.0} : cpow(a / b, z);
}

void require_convergent_tail(const RadialProfile& f, Complex z)
{
    require(f.tail().has_value(), "operator on [r, inf) needs a tail model");
    const TailModel& t = *f.tail();
    require(t.coefficient == Complex{0.0, 0.0} || t.exponent + z.real() > 2.0,
            "divergent tail: exponent + Re(z) must exceed 2 (exponent " +
                std::to_string(t.exponent) + ")");
}

// int_a^b s^{1 + p} C s^{-beta} ds for a possibly complex power p.
Complex tail_moment(const TailModel& t, Complex p, double a, double b)
{
    const Complex e = 2.0 + p - t.exponent;
    if (std::abs(e) < 1e-14) {
        return t.coefficient * std::log(b / a);
    }
    const Complex hi = std::isinf(b) ? Complex{0.0, 0.0} : cpow(b, e);
    return t.coefficient * (hi - cpow(a, e)) / e;
}

// Integral of kernel * f over [a, b] within the sampled range, segment by segment.
Complex sampled_integral(const RadialProfile& f, double a, double b,
                         const std::function<Complex(double)>& kernel)
{
    const RadialGrid& grid = *f.grid();
    Complex sum{0.0, 0.0};
    if (a >= b) {
        return sum;
    }
    const Index first = grid.segment_of(a);
    const Index last = grid.segment_of(b);
    for (Index seg = first; seg <= last; ++seg) {
        const double lo = std::max(a, grid.node(seg));
        const double hi = std::min(b, grid.node(seg + 1));
        sum += segment_integral(grid, f.values(), seg, lo, hi, kernel);
    }
    return sum;
}

} // namespace

Complex op_I(double upper, ComplexIndex zi, const RadialProfile& f, double r)
{
    const Complex z = zi.value();
    require(r >= 0.0, "radius must be non-negative");
    require(r <= upper, "I operator needs r <= T");
    if (r == 0.0) {
        return {0.0, 0.0};
    }
    const RadialGrid& grid = *f.grid();
    const double rmax = grid.r_max();
    Complex sum = sampled_integral(f, r, std::min(upper, rmax),
                                   [&](double s) { return s * cpow(r / s, z); });
    if (upper > rmax) {
        if (std::isinf(upper)) {
            require_convergent_tail(f, z);
        }
        require(f.tail().has_value(), "integration beyond R_max needs a tail model");
        sum += cpow(r, z) * tail_moment(*f.tail(), -z, std::max(r, rmax), upper);
    }
    return sum / (2.0 * z);
}

Complex op_J(double lower, ComplexIndex zi, const RadialProfile& f, double r)
{
    const Complex z = zi.value();
    require(lower >= 0.0, "lower limit must be non-negative");
    require(lower <= r, "J operator needs t <= r");
    if (r == 0.0) {
        return {0.0, 0.0};
    }
    const RadialGrid& grid = *f.grid();
    const double rmax = grid.r_max();
    Complex sum = sampled_integral(f, lower, std::min(r, rmax),
                                   [&](double s) { return s * cpow(s / r, z); });
    if (r > rmax) {
        require(f.tail().has_value(), "integration beyond R_max needs a tail model");
        sum += tail_moment(*f.tail(), z, std::max(lower, rmax), r) / cpow(r, z);
    }
    return sum / (2.0 * z);
}

ComplexArray op_I_nodes(const RadialProfile& f, ComplexIndex zi, Index first, Index last,
                        bool to_infinity)
{
    const Complex z = zi.value();
    const RadialGrid& grid = *f.grid();
    require(0 <= first && first <= last && last <= grid.last(), "node range out of bounds");
    require(!to_infinity || last == grid.last(), "the infinite upper limit starts at R_max");
    ComplexArray out = ComplexArray::Zero(grid.size());
    // acc_i = int_{r_i}^T (r_i/s)^z s f ds
    Complex acc{0.0, 0.0};
    if (to_infinity) {
        require_convergent_tail(f, z);
        const TailModel& t = *f.tail();
        acc = t.coefficient * std::pow(grid.r_max(), 2.0 - t.exponent) / (z + t.exponent - 2.0);
    }
    out[last] = acc;
    for (Index i = last - 1; i >= first; --i) {
        const double ri = grid.node(i);
        if (ri == 0.0) {
            out[i] = 0.0;
            continue;
        }
        const double rn = grid.node(i + 1);
        acc = cpow(ri / rn, z) * acc +
              segment_integral(grid, f.values(), i, ri, rn,
                               [&](double s) { return s * cpow(ri / s, z); });
        out[i] = acc;
    }
    return out / (2.0 * z);
}

ComplexArray op_J_nodes(const RadialProfile& f, ComplexIndex zi, Index first, Index last)
{
    const Complex z = zi.value();
    const RadialGrid& grid = *f.grid();
    require(0 <= first && first <= last && last <= grid.last(), "node range out of bounds");
    ComplexArray out = ComplexArray::Zero(grid.size());
    // acc_i = int_t^{r_i} (s/r_i)^z s f ds
    Complex acc{0.0, 0.0};
    for (Index i = first + 1; i <= last; ++i) {
        const double rp = grid.node(i - 1);
        const double ri = grid.node(i);
        acc = ratio_pow(rp, ri, z) * acc +
              segment_integral(grid, f.values(), i - 1, rp, ri,
                               [&](double s) { return s * cpow(s / ri, z); });
        out[i] = acc;
    }
    return out / (2.0 * z);
}

RadialProfile laplacian_mode(const RadialProfile& f, Complex z)
{
    const RadialGrid& grid = *f.grid();
    const ComplexArray d1 =
        f.has_derivative(1) ? f.derivative(1) : differentiate(f, 1).values();
    const ComplexArray d2 =
        f.has_derivative(2) ? f.derivative(2) : differentiate(f, 2).values();
    const Complex z2 = z * z;
    ComplexArray out(grid.size());
    for (Index i = 1; i < grid.size(); ++i) {
        const double r = grid.node(i);
        out[i] = d2[i] + d1[i] / r - z2 * f[i] / (r * r);
    }
    out[0] = extrapolate_to_zero(grid, out);
    std::optional<TailModel> tail;
    if (f.tail()) {
        const double beta = f.tail()->exponent;
        tail = TailModel{f.tail()->coefficient * (beta * beta - z2), beta + 2.0};
    }
    return RadialProfile(f.grid(), std::move(out), tail);
}

namespace {

RadialProfile stream_zero_mode(const RadialProfile& w)
{
    const RadialGrid& grid = *w.grid();
    const Index size = grid.size();
    // m(r) = int_0^r s w_0 ds
    ComplexArray m = ComplexArray::Zero(size);
    for (Index i = 1; i < size; ++i) {
        m[i] = m[i - 1] + segment_integral(grid, w.values(), i - 1, grid.node(i - 1),
                                           grid.node(i), [](double s) { return Complex{s, 0.0}; });
    }
    ComplexArray d1(size), d2(size), d3(size);
    for (Index i = 1; i < size; ++i) {
        const double r = grid.node(i);
        d1[i] = -m[i] / r;
        d2[i] = m[i] / (r * r) - w[i];
        if (w.has_derivative(1)) {
            d3[i] = -2.0 * m[i] / (r * r * r) + w[i] / r - w.derivative(1)[i];
        }
    }
    d1[0] = 0.0;
    d2[0] = -0.5 * w[0];
    d3[0] = w.has_derivative(1) ? extrapolate_to_zero(grid, d3) : Complex{0.0, 0.0};

    const RadialProfile slope(w.grid(), d1);
    ComplexArray g = ComplexArray::Zero(size);
    for (Index i = 1; i < size; ++i) {
        g[i] = g[i - 1] + segment_integral(grid, slope.values(), i - 1, grid.node(i - 1),
                                           grid.node(i), [](double) { return Complex{1.0, 0.0}; });
    }
    RadialProfile out(w.grid(), std::move(g));
    out.set_derivative(1, std::move(d1));
    out.set_derivative(2, std::move(d2));
    if (w.has_derivative(1)) {
        out.set_derivative(3, std::move(d3));
    }
    return out;
}

RadialProfile stream_mode(const RadialProfile& w, int n, double alpha)
{
    const RadialGrid& grid = *w.grid();
    const Index size = grid.size();
    const ComplexArray I = op_I_nodes(w, static_cast<double>(n), 0, grid.last(), true);
    const ComplexArray J = op_J_nodes(w, static_cast<double>(n), 0, grid.last());
    const double m = n;
    ComplexArray g = I + J;
    ComplexArray d1(size), d2(size), d3(size);
    for (Index i = 1; i < size; ++i) {
        const double r = grid.node(i);
        d1[i] = m / r * (I[i] - J[i]);
        d2[i] = (m * (m - 1.0) * I[i] + m * (m + 1.0) * J[i]) / (r * r) - w[i];
        if (w.has_derivative(1)) {
            d3[i] = (m * (m - 1.0) * (m - 2.0) * I[i] - m * (m + 1.0) * (m + 2.0) * J[i]) /
                        (r * r * r) +
                    w[i] / r - w.derivative(1)[i];
        }
    }
    g[0] = 0.0;
    d1[0] = extrapolate_to_zero(grid, d1);
    d2[0] = extrapolate_to_zero(grid, d2);
    if (w.has_derivative(1)) {
        d3[0] = extrapolate_to_zero(grid, d3);
    }
    std::optional<TailModel> tail;
    if (alpha > 0.0) {
        tail = fit_tail(grid, g, alpha);
    }
    RadialProfile out(w.grid(), std::move(g), tail);
    out.set_derivative(1, std::move(d1));
    out.set_derivative(2, std::move(d2));
    if (w.has_derivative(1)) {
        out.set_derivative(3, std::move(d3));
    }
    return out;
}

} // namespace

FourierVector map_L(const FourierVector& w, double alpha)
{
    const int cutoff = w.cutoff();
    std::vector<RadialProfile> modes(static_cast<std::size_t>(cutoff) + 1);
    parallel_for(0, cutoff + 1, [&](int n) {
        modes[static_cast<std::size_t>(n)] =
            n == 0 ? stream_zero_mode(w.mode(0)) : stream_mode(w.mode(n), n, alpha);
    });
    return FourierVector(std::move(modes), true);
}

} // namespace nsfix
