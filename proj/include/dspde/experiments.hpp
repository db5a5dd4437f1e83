#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dspde/solver.hpp"

namespace dspde {

// Runs job(worker, 0..n-1), each index exactly once, on up to `threads`
// workers (worker in [0, threads)). Callers write results into per-index
// slots and reduce in index order afterwards, so aggregates do not depend on
// the schedule; per-worker scratch (steppers, tables) goes into slot
// `worker`.
void parallel_for_indexed(int n, int threads,
                          const std::function<void(int, int)>& job);

// Analytic integrals of the basis functions over (0, length)
std::vector<double> basis_mass_vector(const Basis& basis);

enum class Observable { mode_projection, smoothed_mass, sigmoid_h_norm, barrier_distance };

double evaluate_observable(const Basis& basis, Observable obs, int mode,
                           const SpectralField& x, const std::vector<double>& mass);

// ---------------------------------------------------------------------------
// Ensemble simulation and energy monitors

std::vector<TrajectoryRecord> run_ensemble(const Basis& basis, const ModelParams& model,
                                           const SolverConfig& base, const SpectralField& x0,
                                           int n_traj, int threads);

struct SeriesStats {
  std::vector<double> mean, q05, q50, q95;
};

struct EnsembleStats {
  std::vector<double> t;
  SeriesStats h_norm, v_norm, psi_l1, sup_norm, barrier_gap;
  // running time integrals divided by elapsed time, so bounded paths level off
  SeriesStats grad_flux_avg, cross_avg;
  double psi_budget = 0;        // 1 + || psi_{gamma,eps}(x0) ||_{L^1}
  double psi_budget_ratio = 0;  // sup_t mean psi_l1 / psi_budget
  double grad_budget_ratio = 0; // final mean integral / (psi_budget + T)
  double sup_abs_max = 0;
  double min_gap = 1;
  int ensemble_size = 0;
};

EnsembleStats energy_monitor(const std::vector<TrajectoryRecord>& ensemble,
                             const Basis& basis, const ModelParams& model,
                             const SpectralField& x0);

// log2 of (value at the final time / value at half the final time); the
// boundedness checks ask for < 0.01 per doubling
double doubling_log_slope(const std::vector<double>& t, const std::vector<double>& v);

// ---------------------------------------------------------------------------
// Derivative estimation (probabilistic gradient representation vs. finite
// differences under common random numbers)

struct BelConfig {
  SpectralField x0;
  SpectralField h;
  double eta = 1e-4;       // finite-difference offset
  double t = 0.5;          // horizon
  Observable obs = Observable::mode_projection;
  int obs_mode = 0;
  int n_paths = 1000;
  int threads = 1;
};

struct BelReport {
  double bel = 0, bel_se = 0;
  double fd = 0, fd_se = 0;
  double z = 0;  // |bel - fd| / sqrt(bel_se^2 + fd_se^2)
  std::uint64_t n_used = 0, n_rejected = 0;
  double min_gap = 1;
};

BelReport bel_estimate(const Basis& basis, const ModelParams& model,
                       const SolverConfig& base, const BelConfig& cfg);

// ---------------------------------------------------------------------------
// Steered dynamics: free run on [0, tau], then the drifted equation with
// pull M/(t - tau) toward the smoothed target on [tau, t]

struct IrreducibilityConfig {
  SpectralField start;
  SpectralField target;   // a; the run steers toward its low-mode part
  double tau = 0.5;
  double t = 0.75;
  double gain = 5.0;      // M
  double radius = 0.5;    // r, hit when ||Z(t) - a||_{V_{2 delta}} < r
  int n_traj = 1000;
  int threads = 1;
  // exact scalar contraction toward the target, no operator, no noise;
  // validates the rate-fitting machinery
  bool drift_only = false;
};

struct IrreducibilityResult {
  SpectralField smoothed_target;  // low-mode cutoff of a
  double target_gap = 0;          // ||a - smoothed||_{V_{2 delta}}, must be < r/2
  std::vector<double> s;          // times in [tau, t]
  std::vector<double> mean_sq;    // E || Z(s) - smoothed ||_H^2
  double fitted_rate = 0;         // decay rate of the norm (half the log-slope)
  double expected_rate = 0;       // M / (t - tau)
  std::uint64_t hits = 0, n_traj = 0;
  double hit_prob = 0, wilson_lo = 0;
};

IrreducibilityResult irreducibility_run(const Basis& basis, const ModelParams& model,
                                        const SolverConfig& base,
                                        const IrreducibilityConfig& cfg);

// ---------------------------------------------------------------------------
// Two-chain long-run comparison: pooled empirical laws of bounded
// observables, Kolmogorov-Smirnov distance across doubling horizons

struct ErgodicityConfig {
  SpectralField x1, x2;
  double burn_in = 2.0;
  double horizon = 50.0;
  int n_horizons = 4;          // horizon, horizon/2, ... (doublings)
  double sample_stride = 0.1;  // observable sampling interval
  int n_traj = 100;
  int threads = 1;
  bool common_noise = false;   // same streams for both chains (the zero check)
};

struct ErgodicityResult {
  std::vector<double> horizons;  // increasing
  std::array<std::vector<double>, 3> ks;  // per observable, per horizon
  std::array<std::string, 3> names;
  std::uint64_t samples_per_chain = 0;  // at the final horizon
  double null_band = 0;  // two-sample band at the trajectory-count resolution
  int n_traj = 0;
};

ErgodicityResult ergodicity_run(const Basis& basis, const ModelParams& model,
                                const SolverConfig& base, const ErgodicityConfig& cfg);

// ---------------------------------------------------------------------------
// Barrier-separation statistics of an ensemble

struct SeparationStats {
  std::vector<double> levels;       // layer thresholds
  std::vector<double> exceed_prob;  // P( sup_run |X| > 1 - level )
  std::vector<double> wilson_lo;
  double layer_q05 = 0, layer_q50 = 0, layer_q95 = 0;  // of 1 - sup_run
  double sup_abs_max = 0;
  double sup_budget = 0;  // 1 + 5 epsilon, the regularized excursion cap
  bool within_budget = false;
  int ensemble_size = 0;
};

SeparationStats separation_stats(const std::vector<TrajectoryRecord>& ensemble,
                                 const ModelParams& model,
                                 const std::vector<double>& levels = {0.5, 0.2, 0.1,
                                                                      0.05});

}  // namespace dspde
