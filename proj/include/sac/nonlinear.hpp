#ifndef SAC_NONLINEAR_HPP
#define SAC_NONLINEAR_HPP

#include <algorithm>
#include <cmath>

#include "sac/spectral.hpp"
#include "sac/types.hpp"

namespace sac {

/// The double-well drift f(u) = F'(u) with F(s) = (s^2 - beta^2)^2 / 4.
template <class Scalar>
Scalar cubic_drift(Scalar u, Scalar beta) {
  return u * u * u - beta * beta * u;
}

/// Admissibility envelope for the drift: step sizes up to k_max with
/// 2 k_max beta^2 < 1, which makes t + k f(t) strictly monotone and the
/// resolvent of f single-valued.
template <class Scalar>
struct CubicNonlinearity {
  Scalar beta;
  Scalar k_max;

  CubicNonlinearity(Scalar beta_, Scalar k_max_) : beta(beta_), k_max(k_max_) {
    if (!(beta >= Scalar(0))) throw std::invalid_argument("CubicNonlinearity: beta must be >= 0");
    if (!(k_max >= Scalar(0))) throw std::invalid_argument("CubicNonlinearity: k_max must be >= 0");
    if (!(Scalar(2) * k_max * beta * beta < Scalar(1)))
      throw std::invalid_argument("CubicNonlinearity: requires 2 k_max beta^2 < 1");
  }

  /// Lipschitz constant C(k) = 1/sqrt(1 - 2 k beta^2) of the drift resolvent.
  Scalar lipschitz_constant(Scalar k) const {
    using std::sqrt;
    return Scalar(1) / sqrt(Scalar(1) - Scalar(2) * k * beta * beta);
  }

  /// One-sided constant beta^2 / (1 - 2 k beta^2) shared by f_k and F_k.
  Scalar one_sided_constant(Scalar k) const {
    return beta * beta / (Scalar(1) - Scalar(2) * k * beta * beta);
  }
};

/// Unique real root t of t + k (t^3 - beta^2 t) = s.  Safeguarded Newton:
/// the bracket [min(0,s), max(0,s)] is expanded geometrically until it
/// encloses the root, then Newton steps are clipped into the shrinking
/// bracket with bisection fallback.
template <class Scalar>
Scalar drift_resolvent_scalar(Scalar s, Scalar k, Scalar beta) {
  using std::abs;
  if (!(k >= Scalar(0))) throw std::invalid_argument("drift_resolvent_scalar: k must be >= 0");
  if (!(k * beta * beta < Scalar(1)))
    throw std::invalid_argument("drift_resolvent_scalar: requires k beta^2 < 1");
  if (s == Scalar(0)) return Scalar(0);
  if (k == Scalar(0)) return s;

  const auto g = [&](Scalar t) { return t + k * cubic_drift(t, beta) - s; };
  const auto dg = [&](Scalar t) {
    return Scalar(1) + k * (Scalar(3) * t * t - beta * beta);
  };

  Scalar lo = std::min(Scalar(0), s);
  Scalar hi = std::max(Scalar(0), s);
  Scalar glo = g(lo);
  Scalar ghi = g(hi);
  Scalar width = std::max(hi - lo, Scalar(1));
  for (int i = 0; glo > Scalar(0); ++i) {
    if (i >= 200) throw NumericalError("drift_resolvent_scalar: bracket expansion failed");
    hi = lo;
    ghi = glo;
    lo -= width;
    width *= Scalar(2);
    glo = g(lo);
  }
  for (int i = 0; ghi < Scalar(0); ++i) {
    if (i >= 200) throw NumericalError("drift_resolvent_scalar: bracket expansion failed");
    lo = hi;
    glo = ghi;
    hi += width;
    width *= Scalar(2);
    ghi = g(hi);
  }

  // Relative residual tolerance; the root for tiny s must be resolved far
  // below any fixed absolute floor (the linear regime demands it).
  const Scalar tol = Scalar(1e-12) * abs(s);
  Scalar t = Scalar(0.5) * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const Scalar gt = g(t);
    if (abs(gt) <= tol) return t;
    if (gt > Scalar(0))
      hi = t;
    else
      lo = t;
    const Scalar step = gt / dg(t);
    Scalar next = t - step;
    if (!(next >= lo) || !(next <= hi) || next == t) next = Scalar(0.5) * (lo + hi);
    t = next;
  }
  throw NumericalError("drift_resolvent_scalar: no convergence within 200 iterations");
}

/// Nodal evaluation of the drift resolvent and the Yosida drift from a single
/// spectral -> nodal round trip.  The projected pair satisfies
/// v - resolvent = k * yosida to round-off because both come from the same
/// pointwise solve.
template <class Scalar>
struct DriftResolve {
  Field<Scalar> resolvent;  // J_k(v)
  Field<Scalar> yosida;     // f_k(v) = f(J_k(v))
};

template <class Scalar>
DriftResolve<Scalar> drift_resolve(const CollocationGrid<Scalar>& grid, const Field<Scalar>& v,
                                   Scalar k, Scalar beta) {
  if (!(Scalar(2) * k * beta * beta < Scalar(1)))
    throw std::invalid_argument("drift_resolve: requires 2 k beta^2 < 1");
  const NodalValues<Scalar> s = grid.to_nodal(v);
  NodalValues<Scalar> z(s.size());
  for (Index i = 0; i < s.size(); ++i) z[i] = drift_resolvent_scalar(s[i], k, beta);
  NodalValues<Scalar> fz(s.size());
  for (Index i = 0; i < s.size(); ++i) fz[i] = cubic_drift(z[i], beta);
  return {grid.to_spectral(z), grid.to_spectral(fz)};
}

/// J_k(v) = (I + k f)^{-1} v.
template <class Scalar>
Field<Scalar> drift_resolvent_field(const CollocationGrid<Scalar>& grid, const Field<Scalar>& v,
                                    Scalar k, Scalar beta) {
  return drift_resolve(grid, v, k, beta).resolvent;
}

/// Yosida approximation f_k(v) = f(J_k(v)).
template <class Scalar>
Field<Scalar> yosida_drift_field(const CollocationGrid<Scalar>& grid, const Field<Scalar>& v,
                                 Scalar k, Scalar beta) {
  return drift_resolve(grid, v, k, beta).yosida;
}

/// Smoothed drift F_k(v) = R_{k/2} f_k(R_{k/2} v).
template <class Scalar>
Field<Scalar> smoothed_drift_field(const LaplaceEigenbasis<Scalar>& basis,
                                   const CollocationGrid<Scalar>& grid, const Field<Scalar>& v,
                                   Scalar k, Scalar beta) {
  const ResolventHalf<Scalar> r(k);
  const Field<Scalar> inner = apply_diagonal(basis, v, r);
  return apply_diagonal(basis, yosida_drift_field(grid, inner, k, beta), r);
}

/// Both sides of the composition identity
///   x - J_k(R_{k/2} x) = (k/2) A R_{k/2} x + k f_k(R_{k/2} x),
/// evaluated independently so callers can compare them.
template <class Scalar>
struct YosidaDecomposition {
  Field<Scalar> direct;    // x - J_k(R_{k/2} x)
  Field<Scalar> composed;  // (k/2) A R_{k/2} x + k f_k(R_{k/2} x)
};

template <class Scalar>
YosidaDecomposition<Scalar> yosida_decomposition(const LaplaceEigenbasis<Scalar>& basis,
                                                 const CollocationGrid<Scalar>& grid,
                                                 const Field<Scalar>& x, Scalar k, Scalar beta) {
  const Field<Scalar> rx = apply_diagonal(basis, x, ResolventHalf<Scalar>(k));
  const DriftResolve<Scalar> dr = drift_resolve(grid, rx, k, beta);
  const Field<Scalar> a_rx = apply_diagonal(basis, rx, Generator<Scalar>());
  return {x - dr.resolvent, (k / Scalar(2)) * a_rx + k * dr.yosida};
}

/// Scalar core of the L6 inequality: P_C(t,s) = C (t^2 + t s + s^2)^2 - (t-s)^4,
/// non-negative for all real t, s once C^2 - 17 C - 2 >= 0.
template <class Scalar>
Scalar l6_polynomial(Scalar c, Scalar t, Scalar s) {
  const Scalar q = t * t + t * s + s * s;
  const Scalar d = t - s;
  const Scalar d2 = d * d;
  return c * q * q - d2 * d2;
}

}  // namespace sac

#endif  // SAC_NONLINEAR_HPP
