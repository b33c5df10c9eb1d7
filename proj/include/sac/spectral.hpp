#ifndef SAC_SPECTRAL_HPP
#define SAC_SPECTRAL_HPP

#include <cmath>
#include <string>

#include "sac/types.hpp"

namespace sac {

namespace detail {
template <class Scalar>
constexpr Scalar pi() {
  return static_cast<Scalar>(3.141592653589793238462643383279502884L);
}
}  // namespace detail

/// Eigenbasis of A = -kappa d^2/dxi^2 on (0, L) with Dirichlet conditions:
/// lambda_m = kappa (m pi / L)^2 and e_m(xi) = sqrt(2/L) sin(m pi xi / L).
/// Immutable after construction; safe to share across threads.
template <class Scalar>
class LaplaceEigenbasis {
 public:
  LaplaceEigenbasis(Index n_modes, Scalar length, Scalar kappa)
      : n_modes_(n_modes), length_(length), kappa_(kappa) {
    if (n_modes < 1) throw std::invalid_argument("LaplaceEigenbasis: n_modes must be >= 1");
    if (!(length > Scalar(0))) throw std::invalid_argument("LaplaceEigenbasis: length must be > 0");
    if (!(kappa > Scalar(0))) throw std::invalid_argument("LaplaceEigenbasis: kappa must be > 0");
    eigenvalues_.resize(n_modes);
    const Scalar base = detail::pi<Scalar>() / length;
    for (Index m = 0; m < n_modes; ++m) {
      const Scalar freq = base * static_cast<Scalar>(m + 1);
      eigenvalues_[m] = kappa * freq * freq;
    }
  }

  Index n_modes() const { return n_modes_; }
  Scalar length() const { return length_; }
  Scalar kappa() const { return kappa_; }
  const ArrayX<Scalar>& eigenvalues() const { return eigenvalues_; }

  /// e_m evaluated at xi (m is zero-based).
  Scalar eigenfunction(Index m, Scalar xi) const {
    using std::sin;
    using std::sqrt;
    const Scalar arg = static_cast<Scalar>(m + 1) * detail::pi<Scalar>() * xi / length_;
    return sqrt(Scalar(2) / length_) * sin(arg);
  }

 private:
  Index n_modes_;
  Scalar length_;
  Scalar kappa_;
  ArrayX<Scalar> eigenvalues_;
};

template <class Scalar>
LaplaceEigenbasis<Scalar> make_basis(Index n_modes, Scalar length, Scalar kappa) {
  return LaplaceEigenbasis<Scalar>(n_modes, length, kappa);
}

// --- Spectral symbols -------------------------------------------------------
//
// The whole operator family used by the schemes is diagonal in the eigenbasis,
// so every operator is a scalar function of lambda.  Symbols are tiny callable
// structs; apply_diagonal multiplies coefficient-wise.

/// A itself: lambda.
template <class Scalar>
struct Generator {
  Scalar operator()(Scalar lambda) const { return lambda; }
};

/// A^{s/2}: lambda^{s/2}.
template <class Scalar>
struct FracPower {
  explicit FracPower(Scalar s) : s_(s) {}
  Scalar operator()(Scalar lambda) const {
    using std::pow;
    return pow(lambda, s_ / Scalar(2));
  }

 private:
  Scalar s_;
};

/// (I + (k/2) A)^{-1}: 1 / (1 + k lambda / 2).  A contraction.
template <class Scalar>
struct ResolventHalf {
  explicit ResolventHalf(Scalar k) : k_(k) {
    if (!(k >= Scalar(0))) throw std::invalid_argument("ResolventHalf: k must be >= 0");
  }
  Scalar operator()(Scalar lambda) const { return Scalar(1) / (Scalar(1) + k_ * lambda / Scalar(2)); }
  Scalar k() const { return k_; }

 private:
  Scalar k_;
};

/// I + (k/4) A: 1 + k lambda / 4.
template <class Scalar>
struct Midpoint {
  explicit Midpoint(Scalar k) : k_(k) {
    if (!(k >= Scalar(0))) throw std::invalid_argument("Midpoint: k must be >= 0");
  }
  Scalar operator()(Scalar lambda) const { return Scalar(1) + k_ * lambda / Scalar(4); }

 private:
  Scalar k_;
};

/// The bounded generator of the perturbed equation,
/// A (I + (k/4) A) (I + (k/2) A)^{-2}: lambda (1 + k lambda/4) / (1 + k lambda/2)^2.
template <class Scalar>
struct PerturbedGenerator {
  explicit PerturbedGenerator(Scalar k) : k_(k) {
    if (!(k >= Scalar(0))) throw std::invalid_argument("PerturbedGenerator: k must be >= 0");
  }
  Scalar operator()(Scalar lambda) const {
    const Scalar r = Scalar(1) / (Scalar(1) + k_ * lambda / Scalar(2));
    return lambda * (Scalar(1) + k_ * lambda / Scalar(4)) * r * r;
  }

 private:
  Scalar k_;
};

/// The heat semigroup e^{-t A}: e^{-lambda t}.  A contraction.
template <class Scalar>
struct Semigroup {
  explicit Semigroup(Scalar t) : t_(t) {
    if (!(t >= Scalar(0))) throw std::invalid_argument("Semigroup: t must be >= 0");
  }
  Scalar operator()(Scalar lambda) const {
    using std::exp;
    return exp(-lambda * t_);
  }

 private:
  Scalar t_;
};

/// The semigroup of the perturbed generator, e^{-t A_k}.  Diagnostics only;
/// the schemes never need it.
template <class Scalar>
struct PerturbedSemigroup {
  PerturbedSemigroup(Scalar k, Scalar t) : ak_(k), t_(t) {
    if (!(t >= Scalar(0))) throw std::invalid_argument("PerturbedSemigroup: t must be >= 0");
  }
  Scalar operator()(Scalar lambda) const {
    using std::exp;
    return exp(-t_ * ak_(lambda));
  }

 private:
  PerturbedGenerator<Scalar> ak_;
  Scalar t_;
};

/// Symbol values on the basis eigenvalues.
template <class Scalar, class Symbol>
ArrayX<Scalar> symbol_values(const LaplaceEigenbasis<Scalar>& basis, const Symbol& sym) {
  return basis.eigenvalues().unaryExpr([&](Scalar l) { return sym(l); });
}

/// Coefficient-wise application of a diagonal operator.
template <class Derived, class Symbol>
Field<typename Derived::Scalar> apply_diagonal(
    const LaplaceEigenbasis<typename Derived::Scalar>& basis,
    const Eigen::ArrayBase<Derived>& v, const Symbol& sym) {
  if (v.size() != basis.n_modes())
    throw std::invalid_argument("apply_diagonal: field/basis size mismatch");
  return v.derived() * symbol_values(basis, sym);
}

/// Fractional norm ||v||_s = (sum lambda_m^s <v,e_m>^2)^{1/2}.
template <class Derived>
typename Derived::Scalar norm_s(const LaplaceEigenbasis<typename Derived::Scalar>& basis,
                                const Eigen::ArrayBase<Derived>& v,
                                typename Derived::Scalar s) {
  using Scalar = typename Derived::Scalar;
  using std::sqrt;
  if (v.size() != basis.n_modes())
    throw std::invalid_argument("norm_s: field/basis size mismatch");
  if (s == Scalar(0)) return sqrt(v.derived().square().sum());
  return sqrt((basis.eigenvalues().pow(s) * v.derived().square()).sum());
}

/// Fractional inner product <u,v>_s.
template <class DerivedU, class DerivedV>
typename DerivedU::Scalar inner_s(const LaplaceEigenbasis<typename DerivedU::Scalar>& basis,
                                  const Eigen::ArrayBase<DerivedU>& u,
                                  const Eigen::ArrayBase<DerivedV>& v,
                                  typename DerivedU::Scalar s) {
  using Scalar = typename DerivedU::Scalar;
  if (u.size() != basis.n_modes() || v.size() != basis.n_modes())
    throw std::invalid_argument("inner_s: field/basis size mismatch");
  if (s == Scalar(0)) return (u.derived() * v.derived()).sum();
  return (basis.eigenvalues().pow(s) * u.derived() * v.derived()).sum();
}

// --- Collocation grid -------------------------------------------------------

/// Interior collocation nodes xi_i = i L/(M+1), i = 1..M, with M = padding *
/// n_modes, and the sine-transform pair between spectral coefficients and
/// nodal values (DST-I semantics).  padding >= 2 keeps cubic Nemytskii
/// products alias-controlled: frequencies up to 3n fold back only onto modes
/// above n, so the retained band is clean.
template <class Scalar>
class CollocationGrid {
 public:
  CollocationGrid(const LaplaceEigenbasis<Scalar>& basis, int padding = 2)
      : n_modes_(basis.n_modes()),
        padding_(padding),
        m_nodes_(static_cast<Index>(padding) * basis.n_modes()),
        length_(basis.length()) {
    using std::sin;
    using std::sqrt;
    if (padding < 2) throw std::invalid_argument("CollocationGrid: padding must be >= 2");
    const Scalar h = length_ / static_cast<Scalar>(m_nodes_ + 1);
    nodes_.resize(m_nodes_);
    for (Index i = 0; i < m_nodes_; ++i) nodes_[i] = h * static_cast<Scalar>(i + 1);
    sine_.resize(m_nodes_, n_modes_);
    const Scalar pi = detail::pi<Scalar>();
    for (Index m = 0; m < n_modes_; ++m)
      for (Index i = 0; i < m_nodes_; ++i)
        sine_(i, m) = sin(pi * static_cast<Scalar>((m + 1) * (i + 1)) /
                          static_cast<Scalar>(m_nodes_ + 1));
    to_nodal_scale_ = sqrt(Scalar(2) / length_);
    to_spectral_scale_ = sqrt(Scalar(2) * length_) / static_cast<Scalar>(m_nodes_ + 1);
    weight_ = h;
  }

  Index n_modes() const { return n_modes_; }
  Index nodes() const { return m_nodes_; }
  int padding() const { return padding_; }
  Scalar length() const { return length_; }
  const ArrayX<Scalar>& node_coordinates() const { return nodes_; }
  /// Quadrature weight h = L/(M+1) of the trapezoid rule on the interior nodes.
  Scalar quadrature_weight() const { return weight_; }

  NodalValues<Scalar> to_nodal(const Field<Scalar>& coeffs) const {
    if (coeffs.size() != n_modes_)
      throw std::invalid_argument("to_nodal: field/grid size mismatch");
    return to_nodal_scale_ * (sine_ * coeffs.matrix()).array();
  }

  Field<Scalar> to_spectral(const NodalValues<Scalar>& values) const {
    if (values.size() != m_nodes_)
      throw std::invalid_argument("to_spectral: nodal/grid size mismatch");
    return to_spectral_scale_ * (sine_.transpose() * values.matrix()).array();
  }

  /// Collocation quadrature of <u,v> in L2(0,L).
  Scalar inner(const NodalValues<Scalar>& u, const NodalValues<Scalar>& v) const {
    return weight_ * (u * v).sum();
  }

  Scalar norm(const NodalValues<Scalar>& u) const {
    using std::sqrt;
    return sqrt(inner(u, u));
  }

 private:
  Index n_modes_;
  int padding_;
  Index m_nodes_;
  Scalar length_;
  ArrayX<Scalar> nodes_;
  MatrixX<Scalar> sine_;
  Scalar to_nodal_scale_;
  Scalar to_spectral_scale_;
  Scalar weight_;
};

}  // namespace sac

#endif  // SAC_SPECTRAL_HPP
