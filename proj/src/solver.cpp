#include "dspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "dspde/errors.hpp"

namespace dspde {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ModelParams::validate() const {
  if (!(alpha >= 2.0)) throw ConfigError("alpha must be >= 2");
  if (!(beta >= 1.0)) throw ConfigError("beta must be >= 1");
  if (!(gamma >= 1.0)) throw ConfigError("gamma must be >= 1");
  if (!(delta > 0.25)) throw ConfigError("delta must exceed 1/4");
  if (!(sigma >= 0.0 && sigma < 0.5)) throw ConfigError("sigma must lie in [0, 1/2)");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
  if (!(length > 0.0)) throw ConfigError("length must be positive");
}

std::vector<std::string> ModelParams::regime_warnings() const {
  std::vector<std::string> out;
  if (gamma < beta)
    out.push_back("gamma < beta: the monitored potential does not dominate the drift");
  if (!(delta - sigma > 0.25))
    out.push_back("delta - sigma <= 1/4: smoothed noise is not Hilbert-Schmidt into the "
                  "monitored space");
  if (sigma < 0.25) {
    double cap_a = (alpha - 8.0 * sigma) / (1.0 - 4.0 * sigma);
    double cap_b = std::min(alpha + beta,
                            (alpha - 8.0 * sigma + 4.0 * beta * sigma) / (1.0 - 4.0 * sigma));
    if (gamma > std::max(cap_a, cap_b))
      out.push_back("gamma too large for sigma < 1/4: energy estimates may not close");
  } else if (sigma == 0.25 && gamma > alpha + beta && !(alpha > 2.0)) {
    out.push_back("sigma = 1/4 with gamma > alpha + beta needs alpha > 2");
  }
  double gamma_floor = delta < 0.5 ? std::max(beta, alpha + 2.0)
                                   : std::max(2.0 * beta, alpha + 4.0);
  if (!(delta < 0.5 + sigma) || gamma < gamma_floor)
    out.push_back("parameters outside the steering regime: reachability of arbitrary "
                  "interior targets is not guaranteed");
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string canonical_config_text(const ModelParams& model, const SolverConfig& config) {
  // Only fields that shape the state evolution; seed lineage and output
  // options are tracked separately so a resumed run can extend its horizon.
  int resolved_nodes = config.n_nodes > 0 ? config.n_nodes : (3 * config.n_modes + 1) / 2;
  std::ostringstream os;
  os << "bc=" << (model.bc == Bc::dirichlet ? "dirichlet" : "neumann") << '\n'
     << "length=" << fmt_double(model.length) << '\n'
     << "alpha=" << fmt_double(model.alpha) << '\n'
     << "beta=" << fmt_double(model.beta) << '\n'
     << "gamma=" << fmt_double(model.gamma) << '\n'
     << "delta=" << fmt_double(model.delta) << '\n'
     << "sigma=" << fmt_double(model.sigma) << '\n'
     << "epsilon=" << fmt_double(model.epsilon) << '\n'
     << "n_modes=" << config.n_modes << '\n'
     << "n_nodes=" << resolved_nodes << '\n'
     << "dt=" << fmt_double(config.dt) << '\n'
     << "noise_enabled=" << (config.noise_enabled ? 1 : 0) << '\n'
     << "linear_test_mode=" << (config.linear_test_mode ? 1 : 0) << '\n'
     << "drift_enabled=" << (config.drift.enabled ? 1 : 0) << '\n';
  if (config.drift.enabled) {
    os << "drift_gain=" << fmt_double(config.drift.gain) << '\n'
       << "drift_window=" << fmt_double(config.drift.window) << '\n'
       << "drift_target=";
    for (std::size_t i = 0; i < config.drift.target.coeff.size(); ++i) {
      if (i) os << ',';
      os << fmt_double(config.drift.target.coeff[i]);
    }
    os << '\n';
  }
  return os.str();
}

std::uint64_t config_hash(const ModelParams& model, const SolverConfig& config) {
  return fnv1a64(canonical_config_text(model, config));
}

Stepper::Stepper(const Basis& basis, const ModelParams& model, const SolverConfig& config)
    : basis_(basis),
      model_(model),
      config_(config),
      noise_(basis, NoiseParams{model.alpha, model.delta,
                                config.linear_test_mode ? 0.0 : model.epsilon,
                                config.sep_floor}) {
  model_.validate();
  if (basis.bc() != model.bc || basis.length() != model.length)
    throw ConfigError("basis boundary data does not match the model");
  if (config.n_modes != basis.n_modes())
    throw ConfigError("solver n_modes does not match the basis");
  if (!(config.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!config.linear_test_mode) {
    if (!(model.epsilon > 0.0))
      throw ConfigError("the implicit potential solve needs epsilon > 0");
    drift_ = std::make_shared<const PotentialTable>(
        PotentialParams{model.beta, model.epsilon});
  }
  if (config.drift.enabled) {
    if (!(config.drift.window > 0.0)) throw ConfigError("drift window must be positive");
    if (static_cast<int>(config.drift.target.coeff.size()) != basis.n_modes())
      throw ConfigError("drift target size does not match the basis");
  }

  const int n = basis.n_modes();
  double rate = config.drift.enabled ? config.drift.rate() : 0.0;
  lin_div_.resize(n);
  lin_exp_.resize(n);
  smooth_.resize(n);
  sharpen_.resize(n);
  drift_term_.assign(n, 0.0);
  for (int k = 0; k < n; ++k) {
    lin_div_[k] = 1.0 / (1.0 + config.dt * (basis.eigenvalue(k) + rate));
    lin_exp_[k] = std::exp(-(1.0 + basis.eigenvalue(k)) * config.dt);
    smooth_[k] = std::pow(1.0 + basis.eigenvalue(k), -model.delta);
    sharpen_[k] = std::pow(1.0 + basis.eigenvalue(k), model.delta);
    if (config.drift.enabled)
      drift_term_[k] = config.dt * rate * config.drift.target.coeff[k];
  }
  const std::size_t m = static_cast<std::size_t>(basis.n_nodes());
  gx_.resize(m);
  gw_.resize(m);
  gnoise_.resize(m);
  gy_.resize(m);
  scratch_a_.resize(static_cast<std::size_t>(n));
  scratch_b_.resize(static_cast<std::size_t>(n));
  xi_buf_.resize(static_cast<std::size_t>(n));
}

void Stepper::nonlinear_node_solve(double rhs, double dt, double& out) const {
  if (rhs == 0.0) {
    out = 0.0;
    return;
  }
  // root of r + dt psi'(r) = rhs lies strictly between 0 and rhs
  double lo = std::min(0.0, rhs);
  double hi = std::max(0.0, rhs);
  double x = rhs;
  double tol = 1e-12 * (1.0 + std::abs(rhs));
  const PotentialTable& tab = *drift_;
  for (int it = 0; it < 80; ++it) {
    double f = x + dt * tab.psi_prime(x) - rhs;
    if (std::abs(f) <= tol) {
      out = x;
      return;
    }
    if (f > 0.0)
      hi = x;
    else
      lo = x;
    double d = 1.0 + dt / tab.m(x);
    double xn = x - f / d;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    x = xn;
  }
  throw NumericsError("implicit potential solve did not converge");
}

void Stepper::step(SpectralField& x, std::uint64_t step_index, const NormalStream& stream) {
  stream.fill_normals(step_index, xi_buf_.size(), xi_buf_.data());
  step_with_noise(x, xi_buf_.data());
}

void Stepper::step_with_noise(SpectralField& x, const double* xi) {
  const int n = basis_.n_modes();
  const int m = basis_.n_nodes();
  basis_.to_grid(x.coeff.data(), gx_.data());
  {
    double gap = std::numeric_limits<double>::infinity();
    int exc = 0;
    for (int j = 0; j < m; ++j) {
      double g = 1.0 - std::abs(gx_[static_cast<std::size_t>(j)]);
      gap = std::min(gap, g);
      if (g < 0.0) ++exc;
    }
    pre_step_gap_ = gap;
    pre_step_excursions_ = exc;
  }
  const double dt = config_.dt;
  const double sqrt_dt = std::sqrt(dt);

  if (config_.linear_test_mode) {
    // exact propagator of I+A applied after the explicit noise increment
    for (int k = 0; k < n; ++k) {
      double c = x.coeff[static_cast<std::size_t>(k)];
      if (config_.noise_enabled)
        c += sqrt_dt * smooth_[static_cast<std::size_t>(k)] * xi[k];
      x.coeff[static_cast<std::size_t>(k)] = lin_exp_[static_cast<std::size_t>(k)] * c;
    }
    return;
  }

  if (config_.noise_enabled) {
    for (int k = 0; k < n; ++k)
      scratch_a_[static_cast<std::size_t>(k)] =
          sqrt_dt * smooth_[static_cast<std::size_t>(k)] * xi[k];
    basis_.to_grid(scratch_a_.data(), gnoise_.data());
    for (int j = 0; j < m; ++j)
      gnoise_[static_cast<std::size_t>(j)] *=
          noise_.multiplier(gx_[static_cast<std::size_t>(j)]);
    basis_.to_spectral(gnoise_.data(), scratch_b_.data());
    for (int k = 0; k < n; ++k)
      x.coeff[static_cast<std::size_t>(k)] += scratch_b_[static_cast<std::size_t>(k)];
    basis_.to_grid(scratch_b_.data(), gw_.data());
    for (int j = 0; j < m; ++j)
      gw_[static_cast<std::size_t>(j)] += gx_[static_cast<std::size_t>(j)];
  } else {
    std::copy(gx_.begin(), gx_.end(), gw_.begin());
  }

  for (int j = 0; j < m; ++j)
    nonlinear_node_solve(gw_[static_cast<std::size_t>(j)], dt,
                         gw_[static_cast<std::size_t>(j)]);
  basis_.to_spectral(gw_.data(), x.coeff.data());

  for (int k = 0; k < n; ++k)
    x.coeff[static_cast<std::size_t>(k)] =
        lin_div_[static_cast<std::size_t>(k)] *
        (x.coeff[static_cast<std::size_t>(k)] + drift_term_[static_cast<std::size_t>(k)]);
}

void Stepper::step_pair(SpectralField& x, SpectralField& y, const double* xi,
                        double* bel_acc) {
  const int n = basis_.n_modes();
  const int m = basis_.n_nodes();
  const double dt = config_.dt;
  const double sqrt_dt = std::sqrt(dt);

  if (config_.linear_test_mode) {
    if (bel_acc) {
      // G is the bare smoothing here, so G^{-1} y pairs diagonally with dW
      double acc = 0;
      for (int k = 0; k < n; ++k)
        acc += sharpen_[static_cast<std::size_t>(k)] *
               y.coeff[static_cast<std::size_t>(k)] * sqrt_dt * xi[k];
      *bel_acc += acc;
    }
    step_with_noise(x, xi);
    for (int k = 0; k < n; ++k)
      y.coeff[static_cast<std::size_t>(k)] *= lin_exp_[static_cast<std::size_t>(k)];
    return;
  }

  basis_.to_grid(x.coeff.data(), gx_.data());
  basis_.to_grid(y.coeff.data(), gy_.data());
  {
    double gap = std::numeric_limits<double>::infinity();
    int exc = 0;
    for (int j = 0; j < m; ++j) {
      double g = 1.0 - std::abs(gx_[static_cast<std::size_t>(j)]);
      gap = std::min(gap, g);
      if (g < 0.0) ++exc;
    }
    pre_step_gap_ = gap;
    pre_step_excursions_ = exc;
  }

  if (bel_acc) {
    // (G^{-1}(x) y, dW)_H with everything at the pre-step state
    for (int j = 0; j < m; ++j)
      gw_[static_cast<std::size_t>(j)] =
          noise_.inverse_multiplier(gx_[static_cast<std::size_t>(j)]) *
          gy_[static_cast<std::size_t>(j)];
    basis_.to_spectral(gw_.data(), scratch_b_.data());
    double acc = 0;
    for (int k = 0; k < n; ++k)
      acc += sharpen_[static_cast<std::size_t>(k)] *
             scratch_b_[static_cast<std::size_t>(k)] * sqrt_dt * xi[k];
    *bel_acc += acc;
  }

  if (config_.noise_enabled) {
    for (int k = 0; k < n; ++k)
      scratch_a_[static_cast<std::size_t>(k)] =
          sqrt_dt * smooth_[static_cast<std::size_t>(k)] * xi[k];
    basis_.to_grid(scratch_a_.data(), gnoise_.data());  // raw smoothed noise w
    // tangent increment first, while gnoise_ still holds w
    for (int j = 0; j < m; ++j)
      gw_[static_cast<std::size_t>(j)] =
          noise_.multiplier_prime(gx_[static_cast<std::size_t>(j)]) *
          gy_[static_cast<std::size_t>(j)] * gnoise_[static_cast<std::size_t>(j)];
    basis_.to_spectral(gw_.data(), scratch_b_.data());
    for (int k = 0; k < n; ++k)
      y.coeff[static_cast<std::size_t>(k)] += scratch_b_[static_cast<std::size_t>(k)];
    // base increment
    for (int j = 0; j < m; ++j)
      gnoise_[static_cast<std::size_t>(j)] *=
          noise_.multiplier(gx_[static_cast<std::size_t>(j)]);
    basis_.to_spectral(gnoise_.data(), scratch_b_.data());
    for (int k = 0; k < n; ++k)
      x.coeff[static_cast<std::size_t>(k)] += scratch_b_[static_cast<std::size_t>(k)];
  }

  // grids of the post-noise states
  basis_.to_grid(x.coeff.data(), gw_.data());
  basis_.to_grid(y.coeff.data(), gy_.data());
  for (int j = 0; j < m; ++j) {
    double r;
    nonlinear_node_solve(gw_[static_cast<std::size_t>(j)], dt, r);
    gw_[static_cast<std::size_t>(j)] = r;
    // implicit-function derivative of the nodal solve at the solved value,
    // differentiating the same psi' evaluator the solve itself uses
    gy_[static_cast<std::size_t>(j)] /= 1.0 + dt * drift_->psi_prime_derivative(r);
  }
  basis_.to_spectral(gw_.data(), x.coeff.data());
  basis_.to_spectral(gy_.data(), y.coeff.data());

  for (int k = 0; k < n; ++k) {
    x.coeff[static_cast<std::size_t>(k)] =
        lin_div_[static_cast<std::size_t>(k)] *
        (x.coeff[static_cast<std::size_t>(k)] + drift_term_[static_cast<std::size_t>(k)]);
    y.coeff[static_cast<std::size_t>(k)] *= lin_div_[static_cast<std::size_t>(k)];
  }
}

double Stepper::lyapunov_energy(const SpectralField& x) const {
  const int n = basis_.n_modes();
  double quad = 0;
  for (int k = 0; k < n; ++k)
    quad += basis_.eigenvalue(k) * x.coeff[static_cast<std::size_t>(k)] *
            x.coeff[static_cast<std::size_t>(k)];
  quad *= 0.5;
  if (!drift_) return quad + 0.5 * l2_norm(x) * l2_norm(x);
  basis_.to_grid(x.coeff.data(), gx_.data());
  double pot = 0;
  for (int j = 0; j < basis_.n_nodes(); ++j)
    pot += drift_->psi(gx_[static_cast<std::size_t>(j)]);
  return quad + pot * basis_.weight();
}

MonitorTables make_monitor_tables(const ModelParams& model) {
  MonitorTables mt;
  mt.gamma = std::make_shared<const PotentialTable>(
      PotentialParams{model.gamma, model.epsilon});
  mt.gamma_half = std::make_shared<const PotentialTable>(
      PotentialParams{model.gamma / 2.0, model.epsilon});
  return mt;
}

TrajectoryRecord simulate(const Basis& basis, const ModelParams& model,
                          const SolverConfig& config, const SpectralField& x0) {
  if (static_cast<int>(x0.coeff.size()) != basis.n_modes())
    throw ConfigError("initial state size does not match the basis");
  if (!(config.horizon > 0.0)) throw ConfigError("horizon must be positive");
  auto n_steps = static_cast<std::uint64_t>(std::llround(config.horizon / config.dt));
  if (n_steps == 0) throw ConfigError("horizon shorter than one step");

  Stepper stepper(basis, model, config);
  NormalStream stream(config.seed, config.stream);
  const bool nonlinear = !config.linear_test_mode;
  MonitorTables mt;
  if (nonlinear) mt = make_monitor_tables(model);

  const int n = basis.n_modes();
  const int m = basis.n_nodes();
  const double w = basis.weight();
  std::vector<double> grid(static_cast<std::size_t>(m));
  std::vector<double> grad(static_cast<std::size_t>(m));
  // derivative synthesis table, reused every step the integrals are on
  std::vector<double> dsynth;
  if (config.monitor_integrals && nonlinear) {
    dsynth.assign(static_cast<std::size_t>(m) * static_cast<std::size_t>(n), 0.0);
    std::vector<double> unit(static_cast<std::size_t>(n), 0.0);
    std::vector<double> col(static_cast<std::size_t>(m));
    for (int k = 0; k < n; ++k) {
      unit[static_cast<std::size_t>(k)] = 1.0;
      basis.gradient_on_grid(unit.data(), col.data());
      unit[static_cast<std::size_t>(k)] = 0.0;
      for (int j = 0; j < m; ++j)
        dsynth[static_cast<std::size_t>(j) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(k)] = col[static_cast<std::size_t>(j)];
    }
  }

  TrajectoryRecord rec;
  rec.seed = config.seed;
  rec.stream = config.stream;
  rec.config_hash = config_hash(model, config);

  SpectralField x = x0;
  double grad_flux_int = 0, cross_int = 0;
  std::uint64_t excursions = 0;
  double sup_abs = 0, min_gap = std::numeric_limits<double>::infinity();
  int stride = std::max(1, config.store_stride);

  auto sample_state = [&](double t) {
    basis.to_grid(x.coeff.data(), grid.data());
    MonitorSample s;
    s.t = t;
    s.h_norm = l2_norm(x);
    s.v_norm = sobolev_norm(basis, x, 0.5);
    double sup = 0;
    for (double v : grid) sup = std::max(sup, std::abs(v));
    s.sup_norm = sup;
    s.barrier_gap = 1.0 - sup;
    if (nonlinear) {
      double acc = 0;
      for (double v : grid) acc += mt.gamma->psi(v);
      s.psi_l1 = acc * w;
    }
    s.grad_flux_int = grad_flux_int;
    s.cross_int = cross_int;
    s.excursion_frac = 0;  // filled by the caller from the running counters
    return s;
  };

  std::uint64_t steps_done = 0;
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    if (step % static_cast<std::uint64_t>(stride) == 0) {
      MonitorSample s = sample_state(static_cast<double>(step) * config.dt);
      s.excursion_frac =
          steps_done == 0
              ? 0.0
              : static_cast<double>(excursions) /
                    (static_cast<double>(steps_done) * static_cast<double>(m));
      rec.samples.push_back(s);
    }
    if (config.monitor_integrals && nonlinear) {
      basis.to_grid(x.coeff.data(), grid.data());
      for (int j = 0; j < m; ++j) {
        double acc = 0;
        const double* row = dsynth.data() +
                            static_cast<std::size_t>(j) * static_cast<std::size_t>(n);
        for (int k = 0; k < n; ++k) acc += row[k] * x.coeff[static_cast<std::size_t>(k)];
        grad[static_cast<std::size_t>(j)] = acc;
      }
      double flux = 0, cross = 0;
      for (int j = 0; j < m; ++j) {
        double v = grid[static_cast<std::size_t>(j)];
        double fj = mt.gamma_half->psi_second(v) * grad[static_cast<std::size_t>(j)];
        flux += fj * fj;
        cross += mt.gamma->psi_prime(v) * stepper.drift_table().psi_prime(v);
      }
      grad_flux_int += flux * w * config.dt;
      cross_int += cross * w * config.dt;
    }
    stepper.step(x, step, stream);
    ++steps_done;
    excursions += static_cast<std::uint64_t>(stepper.pre_step_excursions());
    min_gap = std::min(min_gap, stepper.pre_step_gap());
    sup_abs = std::max(sup_abs, 1.0 - stepper.pre_step_gap());
    if (step % static_cast<std::uint64_t>(stride) == 0 || step + 1 == n_steps) {
      for (double c : x.coeff)
        if (!std::isfinite(c))
          throw NumericsError("state became non-finite", step + 1);
    }
  }
  MonitorSample s = sample_state(static_cast<double>(n_steps) * config.dt);
  s.excursion_frac = static_cast<double>(excursions) /
                     (static_cast<double>(steps_done) * static_cast<double>(m));
  rec.samples.push_back(s);
  // the final state is part of the run extrema too
  min_gap = std::min(min_gap, s.barrier_gap);
  sup_abs = std::max(sup_abs, s.sup_norm);

  rec.final_state = std::move(x);
  rec.final_step = n_steps;
  rec.sup_abs_over_run = sup_abs;
  rec.min_gap_over_run = min_gap;
  return rec;
}

namespace {

template <class T>
void write_pod(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
void read_pod(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& cp) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path);
  os.write("DSPD", 4);
  write_pod(os, static_cast<std::uint32_t>(1));
  write_pod(os, cp.config_hash);
  write_pod(os, cp.n_modes);
  write_pod(os, cp.n_nodes);
  write_pod(os, cp.step_index);
  if (cp.coeff.size() != cp.n_modes) throw IoError("checkpoint coefficient size mismatch");
  os.write(reinterpret_cast<const char*>(cp.coeff.data()),
           static_cast<std::streamsize>(cp.coeff.size() * sizeof(double)));
  write_pod(os, cp.master_seed);
  write_pod(os, cp.stream_id);
  if (!os) throw IoError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "DSPD", 4) != 0)
    throw IoError("not a checkpoint file: " + path);
  std::uint32_t version = 0;
  read_pod(is, version);
  if (version != 1) throw IoError("unsupported checkpoint version");
  Checkpoint cp;
  read_pod(is, cp.config_hash);
  read_pod(is, cp.n_modes);
  read_pod(is, cp.n_nodes);
  read_pod(is, cp.step_index);
  cp.coeff.resize(cp.n_modes);
  is.read(reinterpret_cast<char*>(cp.coeff.data()),
          static_cast<std::streamsize>(cp.coeff.size() * sizeof(double)));
  read_pod(is, cp.master_seed);
  read_pod(is, cp.stream_id);
  if (!is) throw IoError("checkpoint truncated: " + path);
  return cp;
}

}  // namespace dspde
