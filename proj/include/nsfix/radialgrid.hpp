#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <utility>

#include "nsfix/core.hpp"

namespace nsfix {

enum class Grading {
    Uniform,   ///< equal spacing; the node nearest R* is moved onto R*
    Quadratic, ///< r = R* t^2 on [0, R*], log-uniform on [R*, R_max]
};

struct GridParams {
    double r_star = 1.0;
    double r_max = 32.0;
    Index nodes = 1024;
    Grading grading = Grading::Quadratic;
    /// Fraction of the nodes placed in [0, R*] under quadratic grading.
    double inner_fraction = 0.25;
};

/// Nodes on [0, R_max] split into an inner block [0, R*] and an outer block
/// [R*, R_max] sharing the node R*. Interpolation and difference stencils
/// never cross R*.
class RadialGrid {
public:
    RadialGrid(RealArray nodes, Index r_star_index, Grading grading);

    const RealArray& nodes() const { return nodes_; }
    double node(Index i) const { return nodes_[i]; }
    Index size() const { return nodes_.size(); }
    Index last() const { return nodes_.size() - 1; }
    Index r_star_index() const { return r_star_index_; }
    double r_star() const { return nodes_[r_star_index_]; }
    double r_max() const { return nodes_[last()]; }
    Grading grading() const { return grading_; }

    /// Index range [first, last] of the block that owns segment `seg`
    /// (segment i spans nodes i..i+1).
    std::pair<Index, Index> segment_block(Index seg) const;
    /// Block of node i; `right` selects the outer block for the node R*.
    std::pair<Index, Index> node_block(Index i, bool right = false) const;
    /// Segment containing r (the last segment for r = R_max).
    Index segment_of(double r) const;

private:
    RealArray nodes_;
    Index r_star_index_;
    Grading grading_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Build a grid; requires R* >= 1, R_max >= 4 R* and at least 64 nodes.
GridPtr build_grid(double r_star, double r_max, Index nodes, Grading grading,
                   double inner_fraction = 0.25);
GridPtr build_grid(const GridParams& params);

/// f(r) ~ coefficient * r^(-exponent) beyond R_max.
struct TailModel {
    Complex coefficient{0.0, 0.0};
    double exponent = 2.0;

    Complex operator()(double r) const { return coefficient * std::pow(r, -exponent); }
};

/// Values (and optionally derivatives) of the boundary-side limits at R* for
/// profiles with two representations glued at R*.
struct Seam {
    Complex value_left{}, value_right{};
    Complex slope_left{}, slope_right{};
};

/// A complex function of r >= 0 sampled on a RadialGrid, with an optional
/// power-law tail beyond R_max and optional derivative samples.
class RadialProfile {
public:
    RadialProfile() = default;
    RadialProfile(GridPtr grid, ComplexArray values, std::optional<TailModel> tail = std::nullopt);

    /// Samples a callable on the grid nodes.
    static RadialProfile sample(GridPtr grid, const std::function<Complex(double)>& f,
                                std::optional<TailModel> tail = std::nullopt);
    static RadialProfile zero(GridPtr grid);

    const GridPtr& grid() const { return grid_; }
    const ComplexArray& values() const { return values_; }
    ComplexArray& values() { return values_; }
    Complex operator[](Index i) const { return values_[i]; }
    Index size() const { return values_.size(); }

    const std::optional<TailModel>& tail() const { return tail_; }
    void set_tail(std::optional<TailModel> tail);

    /// Derivative samples of order 1..3.
    bool has_derivative(int order) const;
    const ComplexArray& derivative(int order) const;
    void set_derivative(int order, ComplexArray values);

    const std::optional<Seam>& seam() const { return seam_; }
    void set_seam(std::optional<Seam> seam) { seam_ = seam; }

    RadialProfile conjugate() const;
    /// Scales values, derivatives, tail and seam by c.
    RadialProfile scaled(Complex c) const;

private:
    GridPtr grid_;
    ComplexArray values_;
    std::optional<TailModel> tail_;
    std::array<std::optional<ComplexArray>, 3> derivatives_;
    std::optional<Seam> seam_;
};

/// Least-squares coefficient for a fixed exponent over the last `fraction`
/// of the nodes.
TailModel fit_tail(const RadialGrid& grid, const ComplexArray& values, double exponent,
                   double fraction = 0.1);

/// Finite-difference weights (Fornberg) for derivatives 0..max_order at x0
/// on arbitrary distinct nodes. Result(k, j) weights node j for order k.
Eigen::ArrayXXd fornberg_weights(double x0, const double* nodes, int count, int max_order);

/// Nodes per difference stencil and per interpolation stencil.
inline constexpr int kStencil = 7;
inline constexpr int kInterpolationNodes = 6;

/// Value of the local polynomial interpolant at r (stencil inside the block
/// that owns the segment containing r).
Complex interpolate(const RadialGrid& grid, const ComplexArray& values, double r);

/// Integral of kernel(s) * interpolant(s) over [a, b] inside segment `seg`,
/// by adaptive Gauss-Kronrod.
Complex segment_integral(const RadialGrid& grid, const ComplexArray& values, Index seg,
                         double a, double b, const std::function<Complex(double)>& kernel);

/// Integral of the sampled profile over [a, b]; b = +inf uses the tail model
/// and requires exponent > 1.
Complex integrate(const RadialProfile& f, double a, double b);

/// Adaptive quadrature of a callable over [a, b] using the grid segments as
/// the initial partition; b = +inf adds the closed-form tail integral.
Complex integrate(const RadialGrid& grid, const std::function<Complex(double)>& f, double a,
                  double b, const std::optional<TailModel>& tail = std::nullopt);

/// Closed-form integral of coefficient * s^-exponent over [a, +inf).
Complex tail_integral(const TailModel& tail, double a);

/// Numerical derivative of order 1 or 2 from the samples (one-sided stencils
/// at block ends). At R* the inner-block (left) value is returned.
RadialProfile differentiate(const RadialProfile& f, int order);

/// Derivative of order 1 or 2 at node i from the chosen side of R*.
Complex derivative_at(const RadialGrid& grid, const ComplexArray& values, Index i, int order,
                      bool right = false);

/// Polynomial extrapolation to r = 0 from the nodes 1..kStencil.
Complex extrapolate_to_zero(const RadialGrid& grid, const ComplexArray& values);

} // namespace nsfix
