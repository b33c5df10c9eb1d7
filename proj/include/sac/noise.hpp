#ifndef SAC_NOISE_HPP
#define SAC_NOISE_HPP

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>

#include "sac/rng.hpp"
#include "sac/spectral.hpp"
#include "sac/types.hpp"

namespace sac {

/// Diagonal trace-class covariance q_m = mu lambda_m^{-gamma} in the
/// eigenbasis.  In d = 1 the continuum admissibility condition
/// sum lambda_m^{1-gamma} < infinity needs gamma > 3/2; the constructor
/// enforces gamma >= 1.6 and mu > 0 unless `allow_inadmissible` is set
/// (which also permits mu = 0 for noise-free experiments).
template <class Scalar>
class DiagonalCovariance {
 public:
  DiagonalCovariance(Scalar gamma, Scalar mu, const LaplaceEigenbasis<Scalar>& basis,
                     bool allow_inadmissible = false)
      : gamma_(gamma), mu_(mu) {
    if (!(mu >= Scalar(0))) throw std::invalid_argument("DiagonalCovariance: mu must be >= 0");
    if (!allow_inadmissible) {
      if (!(mu > Scalar(0)))
        throw std::invalid_argument("DiagonalCovariance: mu must be > 0 (or pass allow_inadmissible)");
      if (!(gamma >= Scalar(1.6)))
        throw std::invalid_argument(
            "DiagonalCovariance: gamma below admissibility threshold 1.6 (or pass allow_inadmissible)");
    }
    q_ = mu * basis.eigenvalues().pow(-gamma);
    hs_a_half_q_sq_ = (basis.eigenvalues() * q_).sum();
    trace_ = q_.sum();
  }

  Scalar gamma() const { return gamma_; }
  Scalar mu() const { return mu_; }
  const ArrayX<Scalar>& q() const { return q_; }
  /// ||A^{1/2} Q^{1/2}||_HS^2 = sum lambda_m q_m (truncated).
  Scalar hs_a_half_q_half_sq() const { return hs_a_half_q_sq_; }
  /// Tr Q = ||Q^{1/2}||_HS^2.
  Scalar trace() const { return trace_; }

 private:
  Scalar gamma_;
  Scalar mu_;
  ArrayX<Scalar> q_;
  Scalar hs_a_half_q_sq_;
  Scalar trace_;
};

template <class Scalar>
DiagonalCovariance<Scalar> make_covariance(Scalar gamma, Scalar mu,
                                           const LaplaceEigenbasis<Scalar>& basis,
                                           bool allow_inadmissible = false) {
  return DiagonalCovariance<Scalar>(gamma, mu, basis, allow_inadmissible);
}

/// ||R_{k/2} Q^{1/2}||_HS^2 = sum q_m / (1 + k lambda_m / 2)^2.
template <class Scalar>
Scalar resolvent_hs_norm_sq(const DiagonalCovariance<Scalar>& cov,
                            const LaplaceEigenbasis<Scalar>& basis, Scalar k) {
  const ArrayX<Scalar> r = symbol_values(basis, ResolventHalf<Scalar>(k));
  return (cov.q() * r.square()).sum();
}

/// Per-mode Brownian increments on a uniform grid: entry (j, m) is
/// sqrt(dt q_m) xi_{j,m} with xi i.i.d. standard normal, drawn from
/// counter-based streams keyed on (seed, mode, step).
template <class Scalar>
struct WienerPath {
  MatrixX<Scalar> increments;  // steps x modes
  Scalar dt = Scalar(0);
  std::uint64_t seed = 0;

  Index steps() const { return increments.rows(); }
  Index modes() const { return increments.cols(); }
};

template <class Scalar>
WienerPath<Scalar> sample_wiener_path(const DiagonalCovariance<Scalar>& cov,
                                      const LaplaceEigenbasis<Scalar>& basis, Scalar T,
                                      Index n_steps, std::uint64_t seed) {
  using std::sqrt;
  if (n_steps < 1) throw std::invalid_argument("sample_wiener_path: n_steps must be >= 1");
  if (!(T > Scalar(0))) throw std::invalid_argument("sample_wiener_path: T must be > 0");
  WienerPath<Scalar> path;
  path.dt = T / static_cast<Scalar>(n_steps);
  path.seed = seed;
  path.increments.resize(n_steps, basis.n_modes());
  for (Index m = 0; m < basis.n_modes(); ++m) {
    const Scalar scale = sqrt(path.dt * cov.q()[m]);
    for (Index j = 0; j < n_steps; ++j) {
      path.increments(j, m) =
          scale * static_cast<Scalar>(normal_sample(seed, static_cast<std::uint64_t>(m),
                                                    static_cast<std::uint64_t>(j)));
    }
  }
  return path;
}

/// Sums blocks of fine increments into coarse ones; dt scales by `factor`.
/// Even factors are reduced by summing adjacent pairs and recursing, so
/// coarsen(p, 4) is bitwise identical to coarsen(coarsen(p, 2), 2); odd
/// block sizes are summed left to right.
template <class Scalar>
WienerPath<Scalar> coarsen(const WienerPath<Scalar>& path, Index factor) {
  if (factor < 1) throw std::invalid_argument("coarsen: factor must be >= 1");
  if (path.steps() % factor != 0)
    throw std::invalid_argument("coarsen: factor must divide the number of steps");
  if (factor == 1) return path;
  if (factor % 2 == 0) {
    WienerPath<Scalar> halved;
    halved.dt = Scalar(2) * path.dt;
    halved.seed = path.seed;
    const Index n = path.steps() / 2;
    halved.increments.resize(n, path.modes());
    for (Index j = 0; j < n; ++j)
      halved.increments.row(j) = path.increments.row(2 * j) + path.increments.row(2 * j + 1);
    return coarsen(halved, factor / 2);
  }
  WienerPath<Scalar> coarse;
  coarse.dt = static_cast<Scalar>(factor) * path.dt;
  coarse.seed = path.seed;
  const Index n = path.steps() / factor;
  coarse.increments.resize(n, path.modes());
  for (Index j = 0; j < n; ++j) {
    auto row = coarse.increments.row(j);
    row = path.increments.row(j * factor);
    for (Index i = 1; i < factor; ++i) row += path.increments.row(j * factor + i);
  }
  return coarse;
}

/// W(t_b) - W(t_a) as a field, summing increment rows [a, b).
template <class Scalar>
Field<Scalar> increment_sum(const WienerPath<Scalar>& path, Index a, Index b) {
  if (a < 0 || b < a || b > path.steps())
    throw std::invalid_argument("increment_sum: row range out of bounds");
  Field<Scalar> acc = Field<Scalar>::Zero(path.modes());
  for (Index j = a; j < b; ++j) acc += path.increments.row(j).transpose().array();
  return acc;
}

/// R_{k/2} applied to one increment.
template <class Scalar>
Field<Scalar> smooth_increment(const LaplaceEigenbasis<Scalar>& basis, const Field<Scalar>& dw,
                               Scalar k) {
  return apply_diagonal(basis, dw, ResolventHalf<Scalar>(k));
}

// --- Binary path replay ------------------------------------------------------
// Layout: header (little-endian u64 n_modes, u64 n_steps, f64 dt, u64 seed)
// followed by steps x modes 64-bit floats, row-major.

inline void write_path(const WienerPath<double>& path, const std::string& filename) {
  std::FILE* f = std::fopen(filename.c_str(), "wb");
  if (!f) throw std::runtime_error("write_path: cannot open " + filename);
  const std::uint64_t n_modes = static_cast<std::uint64_t>(path.modes());
  const std::uint64_t n_steps = static_cast<std::uint64_t>(path.steps());
  const double dt = path.dt;
  const std::uint64_t seed = path.seed;
  bool ok = std::fwrite(&n_modes, sizeof n_modes, 1, f) == 1 &&
            std::fwrite(&n_steps, sizeof n_steps, 1, f) == 1 &&
            std::fwrite(&dt, sizeof dt, 1, f) == 1 && std::fwrite(&seed, sizeof seed, 1, f) == 1;
  for (Index j = 0; ok && j < path.steps(); ++j)
    for (Index m = 0; ok && m < path.modes(); ++m) {
      const double v = path.increments(j, m);
      ok = std::fwrite(&v, sizeof v, 1, f) == 1;
    }
  std::fclose(f);
  if (!ok) throw std::runtime_error("write_path: short write to " + filename);
}

inline WienerPath<double> read_path(const std::string& filename) {
  std::FILE* f = std::fopen(filename.c_str(), "rb");
  if (!f) throw std::runtime_error("read_path: cannot open " + filename);
  std::uint64_t n_modes = 0, n_steps = 0, seed = 0;
  double dt = 0;
  bool ok = std::fread(&n_modes, sizeof n_modes, 1, f) == 1 &&
            std::fread(&n_steps, sizeof n_steps, 1, f) == 1 &&
            std::fread(&dt, sizeof dt, 1, f) == 1 && std::fread(&seed, sizeof seed, 1, f) == 1;
  WienerPath<double> path;
  path.dt = dt;
  path.seed = seed;
  if (ok) {
    path.increments.resize(static_cast<Index>(n_steps), static_cast<Index>(n_modes));
    for (Index j = 0; ok && j < path.steps(); ++j)
      for (Index m = 0; ok && m < path.modes(); ++m) {
        double v;
        ok = std::fread(&v, sizeof v, 1, f) == 1;
        path.increments(j, m) = v;
      }
  }
  std::fclose(f);
  if (!ok) throw std::runtime_error("read_path: truncated file " + filename);
  return path;
}

}  // namespace sac

#endif  // SAC_NOISE_HPP
