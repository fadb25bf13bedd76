#pragma once

#include "nsfix/spectral.hpp"

namespace nsfix {

/// Radial background derivatives on the nodes: psi', psi'', psi''' and omega'.
/// All zero for the zero background.
struct StreamBackground {
    RealArray psi1, psi2, psi3;
    RealArray omega1;

    static StreamBackground zero(const RadialGrid& grid);
};

/// D_n = i sum_{k+l=n} k gamma_k gamma_l' + i n gamma_n psi'. Carries the first
/// derivative, and the second when gamma has third derivatives.
FourierVector bilinear_D(const StreamBackground& bg, const FourierVector& gamma);

/// E_n = -(1/r) sum k l gamma_k gamma_l - r sum gamma_k' gamma_l' - 2 r gamma_n' psi'
/// for n != 0, with its first derivative. The zero mode is identically zero.
FourierVector bilinear_E(const StreamBackground& bg, const FourierVector& gamma);

/// H_n = (i/r) sum (k gamma_k w_l' - l w_l gamma_k') + (i n omega'/r) gamma_n
///       - (i n psi'/r) w_n, with the r = 0 value taken as the limit.
FourierVector advection_H(const StreamBackground& bg, const FourierVector& gamma,
                          const FourierVector& w);

/// -(1/r^2)(D' + r D'' + i n E') + (1 - n^2) D / r^3 on r >= r_switch; below
/// r_switch the values of H are used.
FourierVector source_Gstar(const FourierVector& D, const FourierVector& E, const FourierVector& H,
                           double r_switch);

/// The divergence form alone, evaluated on every node r > 0 (zero at r = 0).
FourierVector divergence_form(const FourierVector& D, const FourierVector& E);

/// Default blend radius min(1, R*/2).
double default_switch_radius(const RadialGrid& grid);

struct SourceBundle {
    FourierVector D, E, H, Gstar;
    bool with_background = true;
};

/// D, E, H and G* for one background. gamma needs derivatives up to order 3
/// (order 3 feeds D''), w needs the first derivative.
SourceBundle compute_sources(const StreamBackground& bg, const FourierVector& gamma,
                             const FourierVector& w, double r_switch);

/// G^0: the same source with the background removed.
FourierVector source_G0(const FourierVector& gamma, const FourierVector& w, double r_switch);

} // namespace nsfix
