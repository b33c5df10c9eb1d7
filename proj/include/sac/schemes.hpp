#ifndef SAC_SCHEMES_HPP
#define SAC_SCHEMES_HPP

#include <string>
#include <vector>

#include "sac/noise.hpp"
#include "sac/nonlinear.hpp"
#include "sac/spectral.hpp"
#include "sac/types.hpp"

namespace sac {

enum class SchemeKind { SplitStep, EulerMaruyama, BackwardEuler };

inline const char* scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::SplitStep: return "split-step";
    case SchemeKind::EulerMaruyama: return "em";
    case SchemeKind::BackwardEuler: return "backward-euler";
  }
  return "?";
}

/// Immutable spatial setup shared by all steppers.
template <class Scalar>
struct Model {
  LaplaceEigenbasis<Scalar> basis;
  CollocationGrid<Scalar> grid;
  Scalar beta;
};

template <class Scalar>
Model<Scalar> make_model(Index n_modes, Scalar length, Scalar kappa, int padding, Scalar beta) {
  LaplaceEigenbasis<Scalar> basis(n_modes, length, kappa);
  CollocationGrid<Scalar> grid(basis, padding);
  return Model<Scalar>{std::move(basis), std::move(grid), beta};
}

namespace detail {
template <class Scalar>
void require_admissible(Scalar k, Scalar beta, const char* where) {
  if (!(Scalar(2) * k * beta * beta < Scalar(1)))
    throw std::invalid_argument(std::string(where) + ": requires 2 k beta^2 < 1");
}
}  // namespace detail

/// One step of the split-step scheme:
///   Y = R_{k/2} X,  Z = J_k Y,  X+ = R_{k/2} (Z + dW).
template <class Scalar>
Field<Scalar> split_step(const Model<Scalar>& model, const Field<Scalar>& x,
                         const Field<Scalar>& dw, Scalar k) {
  detail::require_admissible(k, model.beta, "split_step");
  const ResolventHalf<Scalar> r(k);
  const Field<Scalar> y = apply_diagonal(model.basis, x, r);
  const Field<Scalar> z = drift_resolvent_field(model.grid, y, k, model.beta);
  return apply_diagonal(model.basis, Field<Scalar>(z + dw), r);
}

/// One step of the Euler-Maruyama scheme for the perturbed equation:
///   X+ = X - k A_k X - k F_k(X) + R_{k/2} dW.
/// Agrees with split_step up to the Nemytskii projection tolerance.
template <class Scalar>
Field<Scalar> euler_maruyama_step(const Model<Scalar>& model, const Field<Scalar>& x,
                                  const Field<Scalar>& dw, Scalar k) {
  detail::require_admissible(k, model.beta, "euler_maruyama_step");
  const Field<Scalar> akx = apply_diagonal(model.basis, x, PerturbedGenerator<Scalar>(k));
  const Field<Scalar> fkx = smoothed_drift_field(model.basis, model.grid, x, k, model.beta);
  const Field<Scalar> rdw = apply_diagonal(model.basis, dw, ResolventHalf<Scalar>(k));
  return x - k * akx - k * fkx + rdw;
}

template <class Scalar>
struct BackwardEulerOptions {
  Scalar tolerance = Scalar(1e-10);
  int max_iterations = 200;
};

template <class Scalar>
struct BackwardEulerResult {
  Field<Scalar> state;
  int iterations = 0;
  Scalar residual = Scalar(0);
};

/// Solves X + k A X + k f(X) = X_prev + dW by fixed-point iteration
///   X <- (I + k A)^{-1} (rhs - k f(X)),
/// starting from X_prev, with the exact diagonal linear solve.  If the
/// residual stalls (reduction < 0.9 per sweep) the update switches to
/// under-relaxation omega = 0.5.  The returned residual is the recomputed
/// ||X + k A X + k f(X) - rhs|| and is certified <= tolerance.
template <class Scalar>
BackwardEulerResult<Scalar> backward_euler_step(const Model<Scalar>& model,
                                                const Field<Scalar>& x_prev,
                                                const Field<Scalar>& dw, Scalar k,
                                                const BackwardEulerOptions<Scalar>& opts = {}) {
  using std::sqrt;
  detail::require_admissible(k, model.beta, "backward_euler_step");
  const Field<Scalar> rhs = x_prev + dw;
  const ArrayX<Scalar>& lam = model.basis.eigenvalues();
  const ArrayX<Scalar> resolvent = (Scalar(1) + k * lam).inverse();

  Field<Scalar> x = x_prev;
  Scalar omega = Scalar(1);
  Scalar prev_residual = Scalar(-1);
  for (int iter = 0; iter <= opts.max_iterations; ++iter) {
    const NodalValues<Scalar> x_nodal = model.grid.to_nodal(x);
    NodalValues<Scalar> fx_nodal(x_nodal.size());
    for (Index i = 0; i < x_nodal.size(); ++i)
      fx_nodal[i] = cubic_drift(x_nodal[i], model.beta);
    const Field<Scalar> fx = model.grid.to_spectral(fx_nodal);
    const Field<Scalar> defect = x + k * (lam * x) + k * fx - rhs;
    const Scalar residual = sqrt(defect.square().sum());
    if (residual <= opts.tolerance) return {x, iter, residual};
    if (iter == opts.max_iterations) break;
    if (prev_residual >= Scalar(0) && residual > Scalar(0.9) * prev_residual)
      omega = Scalar(0.5);
    prev_residual = residual;
    const Field<Scalar> proposal = resolvent * (rhs - k * fx);
    x = (Scalar(1) - omega) * x + omega * proposal;
  }
  throw NumericalError("backward_euler_step: no convergence within " +
                       std::to_string(opts.max_iterations) + " iterations (residual " +
                       std::to_string(static_cast<double>(prev_residual)) + ")");
}

template <class Scalar>
struct SchemeConfig {
  Scalar T = Scalar(1);
  Index N = 1;
  SchemeKind kind = SchemeKind::SplitStep;
  BackwardEulerOptions<Scalar> be;

  Scalar step() const { return T / static_cast<Scalar>(N); }
};

/// States X^0..X^N at t_j = j k plus per-step diagnostics.
template <class Scalar>
struct Trajectory {
  std::vector<Field<Scalar>> states;
  Scalar dt = Scalar(0);
  ArrayX<Scalar> h1_norms;             // ||X^j||_1
  ArrayX<Scalar> h2_norms;             // ||X^j||_2
  std::vector<int> be_iterations;      // backward Euler only

  Index steps() const { return static_cast<Index>(states.size()) - 1; }
};

template <class Scalar>
Trajectory<Scalar> run_scheme(const Model<Scalar>& model, const Field<Scalar>& x0,
                              const WienerPath<Scalar>& path, const SchemeConfig<Scalar>& cfg) {
  using std::abs;
  if (path.steps() != cfg.N)
    throw std::invalid_argument("run_scheme: path level does not match config N");
  if (path.modes() != model.basis.n_modes())
    throw std::invalid_argument("run_scheme: path/basis mode count mismatch");
  const Scalar k = cfg.step();
  if (abs(path.dt - k) > Scalar(1e-12) * (Scalar(1) + abs(k)))
    throw std::invalid_argument("run_scheme: path step does not match T/N");
  detail::require_admissible(k, model.beta, "run_scheme");

  Trajectory<Scalar> traj;
  traj.dt = k;
  traj.states.reserve(static_cast<size_t>(cfg.N) + 1);
  traj.states.push_back(x0);
  traj.h1_norms.resize(cfg.N + 1);
  traj.h2_norms.resize(cfg.N + 1);
  traj.h1_norms[0] = norm_s(model.basis, x0, Scalar(1));
  traj.h2_norms[0] = norm_s(model.basis, x0, Scalar(2));
  if (cfg.kind == SchemeKind::BackwardEuler) traj.be_iterations.reserve(cfg.N);

  for (Index j = 0; j < cfg.N; ++j) {
    const Field<Scalar> dw = path.increments.row(j).transpose().array();
    Field<Scalar> next;
    try {
      switch (cfg.kind) {
        case SchemeKind::SplitStep:
          next = split_step(model, traj.states.back(), dw, k);
          break;
        case SchemeKind::EulerMaruyama:
          next = euler_maruyama_step(model, traj.states.back(), dw, k);
          break;
        case SchemeKind::BackwardEuler: {
          auto res = backward_euler_step(model, traj.states.back(), dw, k, cfg.be);
          traj.be_iterations.push_back(res.iterations);
          next = std::move(res.state);
          break;
        }
      }
    } catch (const NumericalError& err) {
      throw NumericalError("step " + std::to_string(j) + ": " + err.what());
    }
    traj.h1_norms[j + 1] = norm_s(model.basis, next, Scalar(1));
    traj.h2_norms[j + 1] = norm_s(model.basis, next, Scalar(2));
    traj.states.push_back(std::move(next));
  }
  return traj;
}

/// Piecewise constant interpolant: X^j on [t_j, t_{j+1}), X^N at t = T.
template <class Scalar>
const Field<Scalar>& piecewise_constant_at(const Trajectory<Scalar>& traj, Scalar t) {
  const Scalar T = traj.dt * static_cast<Scalar>(traj.steps());
  if (!(t >= Scalar(0)) || !(t <= T * (Scalar(1) + Scalar(1e-12))))
    throw std::invalid_argument("piecewise_constant_at: t out of range");
  Index j = static_cast<Index>(t / traj.dt);
  if (j > traj.steps()) j = traj.steps();
  return traj.states[static_cast<size_t>(j)];
}

/// Continuous stochastic interpolant at t = fine_index * fine.dt:
///   X^j - (t - t_j)(A_k X^j + F_k(X^j)) + R_{k/2}(W(t) - W(t_j)),
/// where j = floor(t / k) and the Wiener increment over [t_j, t] is read off
/// the fine path, whose grid must refine the trajectory grid.
template <class Scalar>
Field<Scalar> stochastic_interpolant_at(const Model<Scalar>& model, const Trajectory<Scalar>& traj,
                                        const WienerPath<Scalar>& fine, Index fine_index) {
  if (fine_index < 0 || fine_index > fine.steps())
    throw std::invalid_argument("stochastic_interpolant_at: t out of range");
  const Index total_fine = fine.steps();
  const Index n_coarse = traj.steps();
  if (total_fine % n_coarse != 0)
    throw std::invalid_argument("stochastic_interpolant_at: fine grid does not refine trajectory grid");
  const Index stride = total_fine / n_coarse;
  Index j = fine_index / stride;
  if (j > n_coarse) j = n_coarse;
  const Scalar k = traj.dt;
  const Scalar elapsed = static_cast<Scalar>(fine_index) * fine.dt - static_cast<Scalar>(j) * k;
  const Field<Scalar>& xj = traj.states[static_cast<size_t>(j)];
  if (fine_index == j * stride) return xj;

  const Field<Scalar> akx = apply_diagonal(model.basis, xj, PerturbedGenerator<Scalar>(k));
  const Field<Scalar> fkx = smoothed_drift_field(model.basis, model.grid, xj, k, model.beta);
  const Field<Scalar> dw = increment_sum(fine, j * stride, fine_index);
  const Field<Scalar> rdw = apply_diagonal(model.basis, dw, ResolventHalf<Scalar>(k));
  return xj - elapsed * (akx + fkx) + rdw;
}

}  // namespace sac

#endif  // SAC_SCHEMES_HPP
