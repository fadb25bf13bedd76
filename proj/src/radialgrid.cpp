#include "nsfix/radialgrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nsfix/quadrature.hpp"

namespace nsfix {

RadialGrid::RadialGrid(RealArray nodes, Index r_star_index, Grading grading)
    : nodes_(std::move(nodes)), r_star_index_(r_star_index), grading_(grading)
{
    require(nodes_.size() >= 2 * kStencil, "radial grid needs at least 14 nodes");
    require(nodes_[0] == 0.0, "radial grid must start at r = 0");
    for (Index i = 1; i < nodes_.size(); ++i) {
        require(nodes_[i] > nodes_[i - 1], "radial grid nodes must be strictly increasing");
    }
    require(r_star_index_ >= kStencil - 1 && r_star_index_ <= last() - (kStencil - 1),
            "each grid block needs at least 7 nodes");
}

std::pair<Index, Index> RadialGrid::segment_block(Index seg) const
{
    if (seg < r_star_index_) {
        return {0, r_star_index_};
    }
    return {r_star_index_, last()};
}

std::pair<Index, Index> RadialGrid::node_block(Index i, bool right) const
{
    if (i < r_star_index_ || (i == r_star_index_ && !right)) {
        return {0, r_star_index_};
    }
    return {r_star_index_, last()};
}

Index RadialGrid::segment_of(double r) const
{
    require(r >= 0.0 && r <= r_max(), "radius outside the grid: " + std::to_string(r));
    const auto* begin = nodes_.data();
    const auto* end = begin + nodes_.size();
    auto it = std::upper_bound(begin, end, r);
    Index seg = static_cast<Index>(it - begin) - 1;
    return std::clamp<Index>(seg, 0, last() - 1);
}

GridPtr build_grid(double r_star, double r_max, Index nodes, Grading grading,
                   double inner_fraction)
{
    require(r_star >= 1.0, "R* must be at least 1");
    require(r_max > r_star, "R_max must exceed R*");
    require(r_max >= 4.0 * r_star, "R_max must be at least 4 R*");
    require(nodes >= 64, "grid needs at least 64 nodes");

    RealArray r(nodes);
    Index star = 0;
    if (grading == Grading::Uniform) {
        const double h = r_max / static_cast<double>(nodes - 1);
        for (Index i = 0; i < nodes; ++i) {
            r[i] = h * static_cast<double>(i);
        }
        r[nodes - 1] = r_max;
        star = static_cast<Index>(std::lround(r_star / h));
        r[star] = r_star;
    } else {
        require(inner_fraction > 0.0 && inner_fraction < 1.0, "inner fraction must be in (0, 1)");
        const Index inner = std::max<Index>(
            16, static_cast<Index>(std::lround(inner_fraction * static_cast<double>(nodes))));
        require(nodes - inner >= 16, "too few nodes for the outer block");
        star = inner - 1;
        for (Index i = 0; i <= star; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(star);
            r[i] = r_star * t * t;
        }
        const double span = std::log(r_max / r_star);
        const Index outer = nodes - 1 - star;
        for (Index j = 1; j <= outer; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(outer);
            r[star + j] = r_star * std::exp(span * t);
        }
        r[star] = r_star;
        r[nodes - 1] = r_max;
    }
    auto grid = std::make_shared<const RadialGrid>(std::move(r), star, grading);

    Index near_origin = 0;
    Index near_star = 0;
    for (Index i = 0; i < grid->size(); ++i) {
        const double x = grid->node(i);
        near_origin += x <= std::min(1.0, r_star) ? 1 : 0;
        near_star += (x >= r_star && x <= 2.0 * r_star) ? 1 : 0;
    }
    require(near_origin >= 8 && near_star >= 8,
            "grid must hold at least 8 nodes in [0, min(1, R*)] and in [R*, 2R*]");
    return grid;
}

GridPtr build_grid(const GridParams& params)
{
    return build_grid(params.r_star, params.r_max, params.nodes, params.grading,
                      params.inner_fraction);
}

// ---------------------------------------------------------------- profiles

RadialProfile::RadialProfile(GridPtr grid, ComplexArray values, std::optional<TailModel> tail)
    : grid_(std::move(grid)), values_(std::move(values))
{
    require(grid_ != nullptr, "profile needs a grid");
    require(values_.size() == grid_->size(), "profile length must equal the node count");
    set_tail(tail);
}

RadialProfile RadialProfile::sample(GridPtr grid, const std::function<Complex(double)>& f,
                                    std::optional<TailModel> tail)
{
    ComplexArray v(grid->size());
    for (Index i = 0; i < grid->size(); ++i) {
        v[i] = f(grid->node(i));
    }
    return RadialProfile(std::move(grid), std::move(v), tail);
}

RadialProfile RadialProfile::zero(GridPtr grid)
{
    const Index n = grid->size();
    RadialProfile p(std::move(grid), ComplexArray::Zero(n), TailModel{});
    for (int k = 1; k <= 3; ++k) {
        p.set_derivative(k, ComplexArray::Zero(n));
    }
    return p;
}

void RadialProfile::set_tail(std::optional<TailModel> tail)
{
    if (tail) {
        require(std::isfinite(tail->exponent), "tail exponent must be finite");
    }
    tail_ = tail;
}

bool RadialProfile::has_derivative(int order) const
{
    return order >= 1 && order <= 3 && derivatives_[order - 1].has_value();
}

const ComplexArray& RadialProfile::derivative(int order) const
{
    require(has_derivative(order),
            "derivative data of order " + std::to_string(order) + " is missing");
    return *derivatives_[order - 1];
}

void RadialProfile::set_derivative(int order, ComplexArray values)
{
    require(order >= 1 && order <= 3, "derivative order must be 1, 2 or 3");
    require(values.size() == values_.size(), "derivative length must equal the node count");
    derivatives_[order - 1] = std::move(values);
}

RadialProfile RadialProfile::conjugate() const
{
    RadialProfile out = *this;
    out.values_ = values_.conjugate();
    if (tail_) {
        out.tail_->coefficient = std::conj(tail_->coefficient);
    }
    for (auto& d : out.derivatives_) {
        if (d) {
            *d = d->conjugate();
        }
    }
    if (seam_) {
        out.seam_ = Seam{std::conj(seam_->value_left), std::conj(seam_->value_right),
                         std::conj(seam_->slope_left), std::conj(seam_->slope_right)};
    }
    return out;
}

RadialProfile RadialProfile::scaled(Complex c) const
{
    RadialProfile out = *this;
    out.values_ *= c;
    if (tail_) {
        out.tail_->coefficient *= c;
    }
    for (auto& d : out.derivatives_) {
        if (d) {
            *d *= c;
        }
    }
    if (seam_) {
        out.seam_ = Seam{c * seam_->value_left, c * seam_->value_right, c * seam_->slope_left,
                         c * seam_->slope_right};
    }
    return out;
}

TailModel fit_tail(const RadialGrid& grid, const ComplexArray& values, double exponent,
                   double fraction)
{
    const Index n = grid.size();
    const Index count = std::max<Index>(
        3, static_cast<Index>(std::ceil(fraction * static_cast<double>(n))));
    const Index first = std::max(grid.r_star_index(), n - count);
    Complex num{0.0, 0.0};
    double den = 0.0;
    for (Index i = first; i < n; ++i) {
        const double basis = std::pow(grid.node(i), -exponent);
        num += basis * values[i];
        den += basis * basis;
    }
    return TailModel{num / den, exponent};
}

// ---------------------------------------------------------------- stencils

Eigen::ArrayXXd fornberg_weights(double x0, const double* x, int count, int max_order)
{
    Eigen::ArrayXXd c = Eigen::ArrayXXd::Zero(max_order + 1, count);
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c(0, 0) = 1.0;
    for (int i = 1; i < count; ++i) {
        const int mn = std::min(i, max_order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
                }
                c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
            }
            for (int k = mn; k >= 1; --k) {
                c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
            }
            c(0, j) = c4 * c(0, j) / c3;
        }
        c1 = c2;
    }
    return c;
}

namespace {

Index interpolation_start(const RadialGrid& grid, Index seg)
{
    const auto [lo, hi] = grid.segment_block(seg);
    return std::clamp<Index>(seg - (kInterpolationNodes / 2 - 1), lo, hi - (kInterpolationNodes - 1));
}

// Lagrange interpolant through kInterpolationNodes consecutive nodes.
struct LocalInterpolant {
    std::array<double, kInterpolationNodes> x{};
    std::array<Complex, kInterpolationNodes> scaled{}; // f_j / prod_{k != j}(x_j - x_k)

    LocalInterpolant(const RadialGrid& grid, const ComplexArray& values, Index seg)
    {
        const Index start = interpolation_start(grid, seg);
        for (int j = 0; j < kInterpolationNodes; ++j) {
            x[j] = grid.node(start + j);
        }
        for (int j = 0; j < kInterpolationNodes; ++j) {
            double denom = 1.0;
            for (int k = 0; k < kInterpolationNodes; ++k) {
                if (k != j) {
                    denom *= x[j] - x[k];
                }
            }
            scaled[j] = values[start + j] / denom;
        }
    }

    Complex operator()(double s) const
    {
        Complex sum{0.0, 0.0};
        for (int j = 0; j < kInterpolationNodes; ++j) {
            double prod = 1.0;
            for (int k = 0; k < kInterpolationNodes; ++k) {
                if (k != j) {
                    prod *= s - x[k];
                }
            }
            sum += prod * scaled[j];
        }
        return sum;
    }
};

Index difference_start(const RadialGrid& grid, Index i, bool right)
{
    const auto [lo, hi] = grid.node_block(i, right);
    return std::clamp<Index>(i - kStencil / 2, lo, hi - (kStencil - 1));
}

} // namespace

Complex interpolate(const RadialGrid& grid, const ComplexArray& values, double r)
{
    const Index seg = grid.segment_of(r);
    return LocalInterpolant(grid, values, seg)(r);
}

Complex segment_integral(const RadialGrid& grid, const ComplexArray& values, Index seg,
                         double a, double b, const std::function<Complex(double)>& kernel)
{
    if (b <= a) {
        return {0.0, 0.0};
    }
    const LocalInterpolant f(grid, values, seg);
    // Interpolant roundoff scales with the stencil values, not with |f(s)|.
    double nodal = 0.0;
    const Index start = interpolation_start(grid, seg);
    for (int j = 0; j < kInterpolationNodes; ++j) {
        nodal = std::max(nodal, std::abs(values[start + j]));
    }
    const double kernel_scale = std::max({std::abs(kernel(a)), std::abs(kernel(0.5 * (a + b))),
                                          std::abs(kernel(b))});
    const double floor = 1e-15 * nodal * kernel_scale * (b - a);
    return quad::adaptive_gk15([&](double s) { return kernel(s) * f(s); }, a, b, 1e-14, floor);
}

Complex tail_integral(const TailModel& tail, double a)
{
    require(tail.exponent > 1.0, "tail exponent must exceed 1 for a convergent integral");
    if (tail.coefficient == Complex{0.0, 0.0}) {
        return {0.0, 0.0};
    }
    return tail.coefficient * std::pow(a, 1.0 - tail.exponent) / (tail.exponent - 1.0);
}

Complex integrate(const RadialProfile& f, double a, double b)
{
    const RadialGrid& grid = *f.grid();
    require(a >= 0.0 && a <= b, "integration bounds must satisfy 0 <= a <= b");
    const bool infinite = std::isinf(b);
    const double top = std::min(b, grid.r_max());
    Complex sum{0.0, 0.0};
    if (a < top) {
        const Index first = grid.segment_of(a);
        const Index last = grid.segment_of(top);
        const auto unit = [](double) { return Complex{1.0, 0.0}; };
        for (Index seg = first; seg <= last; ++seg) {
            const double lo = std::max(a, grid.node(seg));
            const double hi = std::min(top, grid.node(seg + 1));
            sum += segment_integral(grid, f.values(), seg, lo, hi, unit);
        }
    }
    if (b > grid.r_max()) {
        require(f.tail().has_value(), "integration beyond R_max needs a tail model");
        const double from = std::max(a, grid.r_max());
        sum += tail_integral(*f.tail(), from);
        if (!infinite) {
            sum -= tail_integral(*f.tail(), b);
        }
    }
    return sum;
}

Complex integrate(const RadialGrid& grid, const std::function<Complex(double)>& f, double a,
                  double b, const std::optional<TailModel>& tail)
{
    require(a >= 0.0 && a <= b, "integration bounds must satisfy 0 <= a <= b");
    const double top = std::min(b, grid.r_max());
    Complex sum{0.0, 0.0};
    if (a < top) {
        const Index first = grid.segment_of(a);
        const Index last = grid.segment_of(top);
        for (Index seg = first; seg <= last; ++seg) {
            const double lo = std::max(a, grid.node(seg));
            const double hi = std::min(top, grid.node(seg + 1));
            if (hi > lo) {
                sum += quad::adaptive_gk15(f, lo, hi);
            }
        }
    }
    if (b > grid.r_max()) {
        require(tail.has_value(), "integration beyond R_max needs a tail model");
        const double from = std::max(a, grid.r_max());
        sum += tail_integral(*tail, from);
        if (!std::isinf(b)) {
            sum -= tail_integral(*tail, b);
        }
    }
    return sum;
}

Complex derivative_at(const RadialGrid& grid, const ComplexArray& values, Index i, int order,
                      bool right)
{
    require(order == 1 || order == 2, "derivative order must be 1 or 2");
    const Index start = difference_start(grid, i, right);
    const auto w = fornberg_weights(grid.node(i), grid.nodes().data() + start, kStencil, order);
    Complex sum{0.0, 0.0};
    for (int j = 0; j < kStencil; ++j) {
        sum += w(order, j) * values[start + j];
    }
    return sum;
}

RadialProfile differentiate(const RadialProfile& f, int order)
{
    require(order == 1 || order == 2, "derivative order must be 1 or 2");
    const RadialGrid& grid = *f.grid();
    ComplexArray d(grid.size());
    for (Index i = 0; i < grid.size(); ++i) {
        d[i] = derivative_at(grid, f.values(), i, order);
    }
    std::optional<TailModel> tail;
    if (f.tail()) {
        const double beta = f.tail()->exponent;
        const Complex c = f.tail()->coefficient;
        tail = order == 1 ? TailModel{-beta * c, beta + 1.0}
                          : TailModel{beta * (beta + 1.0) * c, beta + 2.0};
    }
    return RadialProfile(f.grid(), std::move(d), tail);
}

Complex extrapolate_to_zero(const RadialGrid& grid, const ComplexArray& values)
{
    const auto w = fornberg_weights(0.0, grid.nodes().data() + 1, kStencil, 0);
    Complex sum{0.0, 0.0};
    for (int j = 0; j < kStencil; ++j) {
        sum += w(0, j) * values[1 + j];
    }
    return sum;
}

} // namespace nsfix
