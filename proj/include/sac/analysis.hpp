#ifndef SAC_ANALYSIS_HPP
#define SAC_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sac/parallel.hpp"
#include "sac/schemes.hpp"

namespace sac {

/// One sample of the sup error: max_n ||X_coarse^n - X_fine^{n stride}|| in L2.
template <class Scalar>
Scalar sup_grid_error(const Trajectory<Scalar>& coarse, const Trajectory<Scalar>& fine,
                      Index stride) {
  using std::sqrt;
  if (stride < 1 || fine.steps() != stride * coarse.steps())
    throw std::invalid_argument("sup_grid_error: misaligned grids");
  Scalar sup_sq = Scalar(0);
  for (Index n = 0; n <= coarse.steps(); ++n) {
    const Field<Scalar> diff =
        coarse.states[static_cast<size_t>(n)] - fine.states[static_cast<size_t>(n * stride)];
    sup_sq = std::max(sup_sq, diff.square().sum());
  }
  return sqrt(sup_sq);
}

/// Least-squares slope of log(value) against log(k).  NaN when fewer than two
/// usable points (non-positive values are unusable).
template <class Scalar>
Scalar fit_loglog_slope(const std::vector<Scalar>& ks, const std::vector<Scalar>& values) {
  using std::log;
  if (ks.size() != values.size()) throw std::invalid_argument("fit_loglog_slope: size mismatch");
  std::vector<Scalar> xs, ys;
  for (size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] > Scalar(0) && values[i] > Scalar(0)) {
      xs.push_back(log(ks[i]));
      ys.push_back(log(values[i]));
    }
  }
  const size_t n = xs.size();
  if (n < 2) return std::numeric_limits<Scalar>::quiet_NaN();
  Scalar mx = Scalar(0), my = Scalar(0);
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<Scalar>(n);
  my /= static_cast<Scalar>(n);
  Scalar sxy = Scalar(0), sxx = Scalar(0);
  for (size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == Scalar(0)) return std::numeric_limits<Scalar>::quiet_NaN();
  return sxy / sxx;
}

/// Per-run moment diagnostics: sup_j ||X^j||_1^{2p} and sum_j k ||X^j||_2^2.
template <class Scalar>
struct MomentSummary {
  Scalar sup_h1_pow_2p = Scalar(0);
  Scalar sum_k_h2_sq = Scalar(0);
};

template <class Scalar>
MomentSummary<Scalar> moment_report(const Trajectory<Scalar>& traj, int p) {
  using std::pow;
  if (p < 1) throw std::invalid_argument("moment_report: p must be >= 1");
  MomentSummary<Scalar> out;
  const Scalar sup_h1 = traj.h1_norms.maxCoeff();
  out.sup_h1_pow_2p = pow(sup_h1, Scalar(2 * p));
  out.sum_k_h2_sq = traj.dt * traj.h2_norms.square().sum();
  return out;
}

/// Interpolant gap statistics at random probe times: the mean of
/// ||Xhat - Xbar||^2 and a Monte Carlo estimate of int_0^T ||Xhat - Xbar||_1^2 dt.
template <class Scalar>
struct GapStats {
  Scalar mean_sq_gap = Scalar(0);
  Scalar h1_gap_integral = Scalar(0);
};

template <class Scalar>
GapStats<Scalar> interpolant_gap_stats(const Model<Scalar>& model, const Trajectory<Scalar>& traj,
                                       const WienerPath<Scalar>& fine, int probes,
                                       std::uint64_t seed) {
  if (probes < 1) throw std::invalid_argument("interpolant_gap_stats: probes must be >= 1");
  const Index n_fine = fine.steps();
  if (n_fine % traj.steps() != 0)
    throw std::invalid_argument("interpolant_gap_stats: fine grid does not refine trajectory grid");
  const Index stride = n_fine / traj.steps();
  const Scalar T = fine.dt * static_cast<Scalar>(n_fine);
  GapStats<Scalar> out;
  for (int i = 0; i < probes; ++i) {
    const std::uint64_t bits = counter_bits(seed, 0x6a70726f6265ull, static_cast<std::uint64_t>(i));
    const Index idx = 1 + static_cast<Index>(bits % static_cast<std::uint64_t>(n_fine - 1));
    const Field<Scalar> hat = stochastic_interpolant_at(model, traj, fine, idx);
    const Field<Scalar>& bar = traj.states[static_cast<size_t>(idx / stride)];
    const Field<Scalar> gap = hat - bar;
    out.mean_sq_gap += gap.square().sum();
    const Scalar h1 = norm_s(model.basis, gap, Scalar(1));
    out.h1_gap_integral += h1 * h1;
  }
  out.mean_sq_gap /= static_cast<Scalar>(probes);
  out.h1_gap_integral *= T / static_cast<Scalar>(probes);
  return out;
}

// --- Scalar kernel of the semigroup error ------------------------------------

/// F(t) = e^{-lambda t} - (1 + k lambda/2)^{-1} exp(-lambda t (1 + k lambda/4)/(1 + k lambda/2)^2),
/// the spectral kernel of the difference E(t) - E_k(t) R_{k/2}.
template <class Scalar>
Scalar semigroup_defect(Scalar lambda, Scalar k, Scalar t) {
  using std::exp;
  if (!(lambda >= Scalar(0)) || !(k >= Scalar(0)) || !(t >= Scalar(0)))
    throw std::invalid_argument("semigroup_defect: lambda, k, t must be >= 0");
  const Scalar r = Scalar(1) / (Scalar(1) + k * lambda / Scalar(2));
  const Scalar ak = lambda * (Scalar(1) + k * lambda / Scalar(4)) * r * r;
  return exp(-lambda * t) - r * exp(-t * ak);
}

template <class Scalar>
std::vector<Scalar> log_grid(Scalar lo, Scalar hi, int n) {
  using std::exp;
  using std::log;
  if (!(lo > Scalar(0)) || !(hi > lo) || n < 2)
    throw std::invalid_argument("log_grid: requires 0 < lo < hi and n >= 2");
  std::vector<Scalar> out(static_cast<size_t>(n));
  const Scalar llo = log(lo), lhi = log(hi);
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] =
        exp(llo + (lhi - llo) * static_cast<Scalar>(i) / static_cast<Scalar>(n - 1));
  return out;
}

/// Empirical constant sup |F(t)| / (k^{s/2} t^{-r/2} lambda^{(s-r)/2}) over the
/// given grids, for 0 <= r <= s <= 2.
template <class Scalar>
Scalar semigroup_defect_scan(Scalar s, Scalar r, const std::vector<Scalar>& lambdas,
                             const std::vector<Scalar>& ks, const std::vector<Scalar>& ts) {
  using std::abs;
  using std::pow;
  if (r > s) throw std::invalid_argument("semigroup_defect_scan: requires r <= s");
  if (!(r >= Scalar(0)) || !(s <= Scalar(2)))
    throw std::invalid_argument("semigroup_defect_scan: requires 0 <= r <= s <= 2");
  Scalar best = Scalar(0);
  for (const Scalar lambda : lambdas) {
    const Scalar lpow = pow(lambda, (s - r) / Scalar(2));
    for (const Scalar k : ks) {
      const Scalar kpow = pow(k, s / Scalar(2));
      for (const Scalar t : ts) {
        const Scalar weight = pow(t, r / Scalar(2));
        const Scalar ratio = abs(semigroup_defect(lambda, k, t)) * weight / (kpow * lpow);
        best = std::max(best, ratio);
      }
    }
  }
  return best;
}

// --- Monte Carlo rate study ---------------------------------------------------

template <class Scalar>
struct RateStudyConfig {
  Index n_modes = 64;
  Scalar length = Scalar(1);
  Scalar kappa = Scalar(1);
  int padding = 2;
  Scalar beta = Scalar(1);
  Scalar gamma = Scalar(2);
  Scalar mu = Scalar(1);
  bool allow_inadmissible = false;
  Scalar T = Scalar(1);
  std::vector<Index> ladder{16, 32, 64, 128, 256};
  Index n_ref = 2048;
  int samples = 64;
  std::uint64_t seed = 0;
  SchemeKind under_test = SchemeKind::SplitStep;
  BackwardEulerOptions<Scalar> be;
  Field<Scalar> x0;  // empty means zero
  int gap_probes = 32;
  bool check_reference = true;
  int threads = 0;
};

template <class Scalar>
struct LevelStats {
  Scalar k = Scalar(0);
  Index N = 0;
  int samples = 0;
  Scalar mean_sq_sup_err = Scalar(0);        // scheme under test vs reference
  Scalar stderr_sq_sup_err = Scalar(0);
  Scalar mean_sq_sup_err_split = Scalar(0);  // split-step vs reference
  Scalar mean_sq_sup_err_be = Scalar(0);     // backward Euler vs reference
  Scalar mean_sq_sup_diff_be_split = Scalar(0);
  Scalar mean_sup_h1_sq = Scalar(0);
  Scalar mean_sum_k_h2_sq = Scalar(0);
  Scalar mean_gap_sq = Scalar(0);
  Scalar mean_gap_h1_integral = Scalar(0);
  Scalar ref_check_rel_change = std::numeric_limits<Scalar>::quiet_NaN();
};

template <class Scalar>
struct RateStudyReport {
  std::vector<LevelStats<Scalar>> levels;  // sorted by decreasing k
  Scalar slope_under_test = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar slope_split = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar slope_be = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar slope_diff_sq = std::numeric_limits<Scalar>::quiet_NaN();
  bool degenerate = false;
  bool reference_checked = false;
  bool reference_reliable = true;
  SchemeKind under_test = SchemeKind::SplitStep;
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> sample_seeds;
};

namespace detail {

template <class Scalar>
struct SampleLevelAccum {
  Scalar sq_err_ut = 0, sq_err_split = 0, sq_err_be = 0, sq_diff = 0;
  Scalar sup_h1_sq = 0, sum_k_h2_sq = 0;
  Scalar gap_sq = 0, gap_h1 = 0;
  Scalar sq_err_ut_ref2 = 0;
};

}  // namespace detail

/// Coupled-path Monte Carlo strong-error study.  Per sample: one Wiener path
/// at the finest level, a split-step reference at k_ref, coarsened runs of the
/// scheme under test plus split-step and backward Euler on every ladder level,
/// interpolant gap statistics, and (optionally) a second reference at k_ref/2
/// for the self-consistency flag.  Aggregation runs in sample order so results
/// do not depend on scheduling.
template <class Scalar>
RateStudyReport<Scalar> run_rate_study(const RateStudyConfig<Scalar>& cfg) {
  using std::sqrt;
  if (cfg.samples < 1) throw std::invalid_argument("run_rate_study: samples must be >= 1");
  if (cfg.ladder.empty()) throw std::invalid_argument("run_rate_study: empty level ladder");
  std::vector<Index> ladder = cfg.ladder;
  std::sort(ladder.begin(), ladder.end());
  for (size_t i = 0; i + 1 < ladder.size(); ++i)
    if (ladder[i] == ladder[i + 1])
      throw std::invalid_argument("run_rate_study: duplicate ladder entry");
  for (const Index n : ladder) {
    if (n < 1) throw std::invalid_argument("run_rate_study: ladder entries must be >= 1");
    if (cfg.n_ref % n != 0)
      throw std::invalid_argument("run_rate_study: reference level must be divisible by every ladder entry");
  }
  if (ladder.back() > cfg.n_ref)
    throw std::invalid_argument("run_rate_study: ladder exceeds reference level");

  const Model<Scalar> model =
      make_model<Scalar>(cfg.n_modes, cfg.length, cfg.kappa, cfg.padding, cfg.beta);
  const DiagonalCovariance<Scalar> cov(cfg.gamma, cfg.mu, model.basis, cfg.allow_inadmissible);
  const Field<Scalar> x0 =
      cfg.x0.size() == 0 ? Field<Scalar>(Field<Scalar>::Zero(cfg.n_modes)) : cfg.x0;
  if (x0.size() != cfg.n_modes)
    throw std::invalid_argument("run_rate_study: initial value has wrong mode count");
  const Scalar k_min = cfg.T / static_cast<Scalar>(ladder.front());
  sac::detail::require_admissible(k_min, cfg.beta, "run_rate_study");

  const Index n_gen = cfg.check_reference ? 2 * cfg.n_ref : cfg.n_ref;
  const size_t n_levels = ladder.size();
  std::vector<std::vector<detail::SampleLevelAccum<Scalar>>> acc(
      static_cast<size_t>(cfg.samples), std::vector<detail::SampleLevelAccum<Scalar>>(n_levels));

  RateStudyReport<Scalar> report;
  report.under_test = cfg.under_test;
  report.base_seed = cfg.seed;
  report.sample_seeds.resize(static_cast<size_t>(cfg.samples));
  for (int s = 0; s < cfg.samples; ++s)
    report.sample_seeds[static_cast<size_t>(s)] =
        derive_seed(cfg.seed, static_cast<std::uint64_t>(s));

  parallel_for_index(cfg.samples, cfg.threads, [&](int s) {
    const std::uint64_t sample_seed = report.sample_seeds[static_cast<size_t>(s)];
    const WienerPath<Scalar> gen = sample_wiener_path(cov, model.basis, cfg.T, n_gen, sample_seed);
    const WienerPath<Scalar> fine =
        cfg.check_reference ? coarsen(gen, Index(2)) : gen;

    SchemeConfig<Scalar> ref_cfg{cfg.T, cfg.n_ref, SchemeKind::SplitStep, cfg.be};
    const Trajectory<Scalar> reference = run_scheme(model, x0, fine, ref_cfg);

    Trajectory<Scalar> reference2;
    if (cfg.check_reference) {
      SchemeConfig<Scalar> ref2_cfg{cfg.T, n_gen, SchemeKind::SplitStep, cfg.be};
      reference2 = run_scheme(model, x0, gen, ref2_cfg);
    }

    for (size_t l = 0; l < n_levels; ++l) {
      const Index n_level = ladder[l];
      const WienerPath<Scalar> level_path = coarsen(fine, cfg.n_ref / n_level);
      const Index stride = cfg.n_ref / n_level;

      SchemeConfig<Scalar> ss_cfg{cfg.T, n_level, SchemeKind::SplitStep, cfg.be};
      const Trajectory<Scalar> ss = run_scheme(model, x0, level_path, ss_cfg);
      SchemeConfig<Scalar> be_cfg{cfg.T, n_level, SchemeKind::BackwardEuler, cfg.be};
      const Trajectory<Scalar> be = run_scheme(model, x0, level_path, be_cfg);

      const Trajectory<Scalar>* ut = &ss;
      Trajectory<Scalar> em;
      if (cfg.under_test == SchemeKind::EulerMaruyama) {
        SchemeConfig<Scalar> em_cfg{cfg.T, n_level, SchemeKind::EulerMaruyama, cfg.be};
        em = run_scheme(model, x0, level_path, em_cfg);
        ut = &em;
      } else if (cfg.under_test == SchemeKind::BackwardEuler) {
        ut = &be;
      }

      auto& slot = acc[static_cast<size_t>(s)][l];
      const Scalar err_ss = sup_grid_error(ss, reference, stride);
      const Scalar err_be = sup_grid_error(be, reference, stride);
      const Scalar err_ut = (ut == &ss)   ? err_ss
                            : (ut == &be) ? err_be
                                          : sup_grid_error(*ut, reference, stride);
      slot.sq_err_split = err_ss * err_ss;
      slot.sq_err_be = err_be * err_be;
      slot.sq_err_ut = err_ut * err_ut;

      Scalar diff_sup_sq = Scalar(0);
      for (Index n = 0; n <= n_level; ++n) {
        const Field<Scalar> d =
            be.states[static_cast<size_t>(n)] - ss.states[static_cast<size_t>(n)];
        diff_sup_sq = std::max(diff_sup_sq, d.square().sum());
      }
      slot.sq_diff = diff_sup_sq;

      const MomentSummary<Scalar> moments = moment_report(*ut, 1);
      slot.sup_h1_sq = moments.sup_h1_pow_2p;
      slot.sum_k_h2_sq = moments.sum_k_h2_sq;

      const GapStats<Scalar> gap =
          interpolant_gap_stats(model, ss, gen, cfg.gap_probes, sample_seed);
      slot.gap_sq = gap.mean_sq_gap;
      slot.gap_h1 = gap.h1_gap_integral;

      if (cfg.check_reference) {
        const Scalar err2 = sup_grid_error(*ut, reference2, 2 * stride);
        slot.sq_err_ut_ref2 = err2 * err2;
      }
    }
  });

  report.levels.resize(n_levels);
  const Scalar inv_m = Scalar(1) / static_cast<Scalar>(cfg.samples);
  bool any_zero = false;
  for (size_t l = 0; l < n_levels; ++l) {
    // levels sorted by decreasing k = increasing N
    LevelStats<Scalar>& lev = report.levels[l];
    lev.N = ladder[l];
    lev.k = cfg.T / static_cast<Scalar>(lev.N);
    lev.samples = cfg.samples;
    Scalar sum_ut = 0, sum_ut_sq = 0, sum_ss = 0, sum_be = 0, sum_diff = 0;
    Scalar sum_h1 = 0, sum_h2 = 0, sum_gap = 0, sum_gap_h1 = 0, sum_ut2 = 0;
    for (int s = 0; s < cfg.samples; ++s) {
      const auto& slot = acc[static_cast<size_t>(s)][l];
      sum_ut += slot.sq_err_ut;
      sum_ut_sq += slot.sq_err_ut * slot.sq_err_ut;
      sum_ss += slot.sq_err_split;
      sum_be += slot.sq_err_be;
      sum_diff += slot.sq_diff;
      sum_h1 += slot.sup_h1_sq;
      sum_h2 += slot.sum_k_h2_sq;
      sum_gap += slot.gap_sq;
      sum_gap_h1 += slot.gap_h1;
      sum_ut2 += slot.sq_err_ut_ref2;
    }
    lev.mean_sq_sup_err = sum_ut * inv_m;
    lev.mean_sq_sup_err_split = sum_ss * inv_m;
    lev.mean_sq_sup_err_be = sum_be * inv_m;
    lev.mean_sq_sup_diff_be_split = sum_diff * inv_m;
    lev.mean_sup_h1_sq = sum_h1 * inv_m;
    lev.mean_sum_k_h2_sq = sum_h2 * inv_m;
    lev.mean_gap_sq = sum_gap * inv_m;
    lev.mean_gap_h1_integral = sum_gap_h1 * inv_m;
    if (cfg.samples > 1) {
      const Scalar var =
          std::max(Scalar(0), (sum_ut_sq - sum_ut * sum_ut * inv_m) /
                                  static_cast<Scalar>(cfg.samples - 1));
      lev.stderr_sq_sup_err = sqrt(var * inv_m);
    }
    if (cfg.check_reference) {
      const Scalar rms = sqrt(lev.mean_sq_sup_err);
      const Scalar rms2 = sqrt(sum_ut2 * inv_m);
      lev.ref_check_rel_change =
          rms > Scalar(0) ? std::abs(rms - rms2) / rms : Scalar(0);
    }
    if (!(lev.mean_sq_sup_err > Scalar(0))) any_zero = true;
  }

  std::vector<Scalar> ks, rms_ut, rms_ss, rms_be, diff_sq;
  for (const auto& lev : report.levels) {
    ks.push_back(lev.k);
    rms_ut.push_back(sqrt(lev.mean_sq_sup_err));
    rms_ss.push_back(sqrt(lev.mean_sq_sup_err_split));
    rms_be.push_back(sqrt(lev.mean_sq_sup_err_be));
    diff_sq.push_back(lev.mean_sq_sup_diff_be_split);
  }
  report.slope_under_test = fit_loglog_slope(ks, rms_ut);
  report.slope_split = fit_loglog_slope(ks, rms_ss);
  report.slope_be = fit_loglog_slope(ks, rms_be);
  report.slope_diff_sq = fit_loglog_slope(ks, diff_sq);
  report.degenerate = any_zero || n_levels < 2 || !std::isfinite(report.slope_under_test);
  report.reference_checked = cfg.check_reference;
  if (cfg.check_reference) {
    for (const auto& lev : report.levels)
      if (!(lev.ref_check_rel_change < Scalar(0.1))) report.reference_reliable = false;
  }
  return report;
}

}  // namespace sac

#endif  // SAC_ANALYSIS_HPP
