#pragma once


#include "nsfix/spectral.hpp"

namespace nsfix {

/// Complex operator index with Re(z) > 0.
class ComplexIndex {
public:
    ComplexIndex(Complex z); // NOLINT: implicit from numbers is intended
    ComplexIndex(double z) : ComplexIndex(Complex{z, 0.0}) {} // NOLINT
    Complex value() const { return z_; }

private:
    Complex z_;
};


/// I^T_z[f](r) = r^z / (2z) * int_r^T s^{1-z} f(s) ds, T finite or +inf.
Complex op_I(double upper, ComplexIndex z, const RadialProfile& f, double r);
/// J^t_z[f](r) = 1 / (2z r^z) * int_t^r s^{1+z} f(s) ds.
Complex op_J(double lower, ComplexIndex z, const RadialProfile& f, double r);

/// I^T_z[f] at every node in [first, last], with T = node(last), or T = +inf
/// when `to_infinity` (closing the tail analytically). Entries outside the
/// range are zero. Cumulative from the top, O(K).
ComplexArray op_I_nodes(const RadialProfile& f, ComplexIndex z, Index first, Index last,
                        bool to_infinity);
/// J^t_z[f] at every node in [first, last] with t = node(first).
ComplexArray op_J_nodes(const RadialProfile& f, ComplexIndex z, Index first, Index last);

/// f'' + f'/r - z^2 f / r^2 on the nodes. Uses stored derivative samples when
/// present, otherwise numerical ones; the r = 0 value is the extrapolated
/// limit.
RadialProfile laplacian_mode(const RadialProfile& f, Complex z);

/// Streamfunction modes from vorticity modes: gamma_n = I^inf_|n| + J^0_|n|
/// for n != 0 and gamma_0 = -int_0^r (1/s) int_0^s t w_0 dt ds, with analytic
/// derivatives of order 1, 2 (and 3 when w carries first derivatives).
/// Non-zero modes get tails of exponent `alpha` when alpha > 0.
FourierVector map_L(const FourierVector& w, double alpha = 0.0);

} // namespace nsfix
