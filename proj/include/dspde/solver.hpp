#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dspde/noise.hpp"
#include "dspde/potentials.hpp"
#include "dspde/rng.hpp"
#include "dspde/spectral.hpp"

namespace dspde {

struct ModelParams {
  double alpha = 2.0;    // noise mobility exponent (multiplier m_{alpha/2})
  double beta = 1.0;     // drift potential exponent
  double gamma = 3.0;    // monitored potential exponent
  double delta = 0.45;   // noise smoothing order
  double sigma = 0.0;    // auxiliary regularity index (diagnostics)
  double epsilon = 0.1;  // potential regularization; the stepper needs > 0
  Bc bc = Bc::dirichlet;
  double length = 3.14159265358979323846;

  void validate() const;
  // Conditions under which the continuum theory guarantees wellposedness /
  // irreducibility; violations are advisories, not errors.
  std::vector<std::string> regime_warnings() const;
};

enum class ClampMode { none, report_only };

// Additional linear drift mu * (target - Z) with mu = gain / window,
// switched on for the steered runs.
struct DriftSpec {
  bool enabled = false;
  double gain = 0.0;    // M
  double window = 1.0;  // t - tau
  SpectralField target;
  double rate() const { return gain / window; }
};

struct SolverConfig {
  int n_modes = 32;
  int n_nodes = 0;  // 0 -> ceil(3 n_modes / 2)
  double dt = 1e-3;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  int store_stride = 100;
  bool noise_enabled = true;
  // Frozen-coefficient diagnostic channel: multiplier m == 1, potential off,
  // exact exponential propagator of I+A. Used by the closed-form tests.
  bool linear_test_mode = false;
  bool monitor_integrals = true;
  ClampMode clamp = ClampMode::report_only;
  double sep_floor = 1e-6;
  DriftSpec drift;
};

struct MonitorSample {
  double t = 0;
  double h_norm = 0;        // || X ||_H
  double v_norm = 0;        // || X ||_V (order-1 Sobolev)
  double sup_norm = 0;      // max_j |X(z_j)|
  double barrier_gap = 0;   // 1 - sup_norm
  double psi_l1 = 0;        // || psi_{gamma,eps}(X) ||_{L^1}
  double grad_flux_int = 0; // int_0^t || psi''_{gamma/2,eps}(X) grad X ||_H^2
  double cross_int = 0;     // int_0^t int psi'_{gamma,eps} psi'_{beta,eps}
  double excursion_frac = 0;  // fraction of (step, node) pairs with |X| > 1 so far
};

struct TrajectoryRecord {
  std::vector<MonitorSample> samples;
  SpectralField final_state;
  std::uint64_t final_step = 0;
  double sup_abs_over_run = 0;
  double min_gap_over_run = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t config_hash = 0;
};

std::uint64_t fnv1a64(const std::string& text);
// Canonical key=value serialization of everything that shapes a trajectory
std::string canonical_config_text(const ModelParams& model, const SolverConfig& config);
std::uint64_t config_hash(const ModelParams& model, const SolverConfig& config);

// One Lie-split step: explicit noise increment at the pre-step state, then a
// pointwise implicit monotone solve of r + dt psi'_{beta,eps}(r) = rhs at
// each node, then the implicit diagonal linear solve 1/(1 + dt lambda_k).
// The tangent pair advances the exact Jacobian-vector product of that map.
class Stepper {
public:
  Stepper(const Basis& basis, const ModelParams& model, const SolverConfig& config);

  void step(SpectralField& x, std::uint64_t step_index, const NormalStream& stream);
  void step_with_noise(SpectralField& x, const double* xi);
  // Base + tangent with common noise; optionally accumulates the pairing
  // (G^{-1}(x) y, dW)_H into *bel_acc before the state advances.
  void step_pair(SpectralField& x, SpectralField& y, const double* xi,
                 double* bel_acc = nullptr);

  const Basis& basis() const { return basis_; }
  const ModelParams& model() const { return model_; }
  const SolverConfig& config() const { return config_; }
  const NoiseOp& noise() const { return noise_; }
  const PotentialTable& drift_table() const { return *drift_; }

  // minimum of 1 - |x| over nodes at the entry of the last step call
  double pre_step_gap() const { return pre_step_gap_; }
  // nodes with |x| > 1 seen at the entry of the last step call
  int pre_step_excursions() const { return pre_step_excursions_; }

  // 1/2 || grad X ||^2 + int psi_{beta,eps}(X): decreases along noise-free steps
  double lyapunov_energy(const SpectralField& x) const;

private:
  void nonlinear_node_solve(double rhs, double dt, double& out) const;

  const Basis& basis_;
  ModelParams model_;
  SolverConfig config_;
  std::shared_ptr<const PotentialTable> drift_;
  NoiseOp noise_;
  std::vector<double> lin_div_;     // 1 / (1 + dt (lambda_k + drift rate))
  std::vector<double> lin_exp_;     // exp(-(1 + lambda_k) dt) for the test channel
  std::vector<double> smooth_;      // (1 + lambda_k)^{-delta}
  std::vector<double> sharpen_;     // (1 + lambda_k)^{+delta}
  std::vector<double> drift_term_;  // dt * rate * target_k
  // scratch
  mutable std::vector<double> gx_, gw_, gnoise_, gy_, scratch_a_, scratch_b_;
  mutable std::vector<double> xi_buf_;
  double pre_step_gap_ = 1.0;
  int pre_step_excursions_ = 0;
};

// Monitor quantities of a state (grid formed internally).
struct MonitorTables {
  std::shared_ptr<const PotentialTable> gamma;       // exponent gamma
  std::shared_ptr<const PotentialTable> gamma_half;  // exponent gamma / 2
};
MonitorTables make_monitor_tables(const ModelParams& model);

TrajectoryRecord simulate(const Basis& basis, const ModelParams& model,
                          const SolverConfig& config, const SpectralField& x0);

// Binary checkpoint: magic "DSPD", version, config hash, sizes, step index,
// coefficients, RNG lineage. Loading verifies magic, version, and hash.
struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::uint32_t n_modes = 0;
  std::uint32_t n_nodes = 0;
  std::uint64_t step_index = 0;
  std::vector<double> coeff;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dspde
