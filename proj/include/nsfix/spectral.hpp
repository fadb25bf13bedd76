#pragma once

#include <functional>
#include <vector>

#include "nsfix/radialgrid.hpp"

namespace nsfix {

/// Angular Fourier modes (f_n), |n| <= N, of a real field. Only n >= 0 is
/// stored; f_{-n} is conj(f_n) by construction and f_0 is kept real.
class FourierVector {
public:
    FourierVector() = default;
    /// Modes n = 0..N in order.
    explicit FourierVector(std::vector<RadialProfile> modes, bool derivative_only_zero_mode = false);

    static FourierVector zero(GridPtr grid, int cutoff);

    int cutoff() const { return static_cast<int>(modes_.size()) - 1; }
    const GridPtr& grid() const { return modes_.front().grid(); }

    /// Stored mode, n >= 0.
    const RadialProfile& mode(int n) const;
    /// Any mode -N..N; negative indices are conjugated copies.
    RadialProfile mode_at(int n) const;
    void set_mode(int n, RadialProfile profile);

    /// Samples of f_n (any sign of n) or of its derivative of order `order`.
    ComplexArray samples(int n, int order = 0) const;

    /// Zero mode tracked through its derivatives only (streamfunction spaces).
    bool derivative_only_zero_mode() const { return derivative_only_; }

    FourierVector scaled(double c) const;

    /// Largest |f_n(0)| over n != 0 and the largest imaginary part of f_0.
    double origin_defect() const;

private:
    std::vector<RadialProfile> modes_;
    bool derivative_only_ = false;
};

/// Sum and difference of values, derivatives present in both, tails and seams.
FourierVector operator+(const FourierVector& a, const FourierVector& b);
FourierVector operator-(const FourierVector& a, const FourierVector& b);

using PolarField = std::function<double(double r, double theta)>;

/// Uniform angles 2 pi j / count, j = 0..count-1.
RealArray theta_grid(Index count);

/// f_n(r) = (1/2pi) int f e^{-in theta} by the trapezoidal rule on `angles`
/// equispaced points (at least 4N + 1).
FourierVector decompose_angular(const PolarField& field, GridPtr grid, int cutoff, Index angles);

/// Same from samples: rows are radial nodes, columns uniform angles.
FourierVector decompose_angular(const Eigen::ArrayXXd& samples, GridPtr grid, int cutoff);

/// Real samples of sum_n f_n e^{in theta}: rows radial nodes, columns the
/// given angles. Throws if the imaginary part exceeds 1e-13 relative.
Eigen::ArrayXXd synthesize_angular(const FourierVector& fv, const RealArray& thetas);

/// Same for arbitrary per-node mode samples; `mode_values(n)` for n >= 0.
Eigen::ArrayXXd synthesize_modes(const std::function<ComplexArray(int)>& mode_values, int cutoff,
                                 Index rows, const RealArray& thetas);

} // namespace nsfix
