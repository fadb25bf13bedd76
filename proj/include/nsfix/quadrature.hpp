#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>

namespace nsfix::quad {

namespace detail {

// 15-point Kronrod abscissae (positive half, descending) with the embedded
// 7-point Gauss rule on the odd entries.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
double magnitude(const T& v)
{
    return std::abs(v);
}

} // namespace detail

/// One Gauss-Kronrod 7/15 panel on [a, b]. `error` receives |K15 - G7| and
/// `scale` the Kronrod estimate of the integral of |f|.
template <typename F>
auto gk15(const F& f, double a, double b, double& error, double& scale)
{
    using T = std::decay_t<decltype(f(a))>;
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    const T fc = f(centre);
    T kronrod = detail::kWgk[7] * fc;
    T gauss = detail::kWg[3] * fc;
    scale = detail::kWgk[7] * detail::magnitude(fc);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * detail::kXgk[j];
        const T lo = f(centre - dx);
        const T hi = f(centre + dx);
        kronrod += detail::kWgk[j] * (lo + hi);
        scale += detail::kWgk[j] * (detail::magnitude(lo) + detail::magnitude(hi));
        if (j % 2 == 1) {
            gauss += detail::kWg[j / 2] * (lo + hi);
        }
    }
    kronrod *= half;
    gauss *= half;
    scale *= std::abs(half);
    error = detail::magnitude(kronrod - gauss);
    return kronrod;
}

namespace detail {

template <typename F, typename T>
T bisect(const F& f, double a, double b, T whole, double error, double scale, double tol,
         int depth)
{
    // Below ~50 eps of the panel's |f| integral the estimate is roundoff.
    constexpr double kRoundoff = 50.0 * std::numeric_limits<double>::epsilon();
    if (error <= tol || error <= kRoundoff * scale || depth == 0) {
        return whole;
    }
    const double mid = 0.5 * (a + b);
    double e1 = 0.0, e2 = 0.0, s1 = 0.0, s2 = 0.0;
    const T left = gk15(f, a, mid, e1, s1);
    const T right = gk15(f, mid, b, e2, s2);
    return bisect(f, a, mid, left, e1, s1, 0.5 * tol, depth - 1)
           + bisect(f, mid, b, right, e2, s2, 0.5 * tol, depth - 1);
}

} // namespace detail

/// Recursive bisection on GK15 panels. The error budget is rel_tol times the
/// integral of |f| over [a, b] (plus abs_tol), split evenly between halves.
template <typename F>
auto adaptive_gk15(const F& f, double a, double b, double rel_tol = 1e-14,
                   double abs_tol = 0.0, int max_depth = 30)
{
    double error = 0.0, scale = 0.0;
    const auto whole = gk15(f, a, b, error, scale);
    return detail::bisect(f, a, b, whole, error, scale, rel_tol * scale + abs_tol, max_depth);
}

} // namespace nsfix::quad
