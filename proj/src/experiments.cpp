#include "dspde/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include "dspde/errors.hpp"
#include "dspde/numerics.hpp"

namespace dspde {

void parallel_for_indexed(int n, int threads, const std::function<void(int, int)>& job) {
  if (n <= 0) return;
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) job(0, i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&](int w) {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        job(w, i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<double> basis_mass_vector(const Basis& basis) {
  const int n = basis.n_modes();
  const double L = basis.length();
  std::vector<double> m(static_cast<std::size_t>(n), 0.0);
  if (basis.bc() == Bc::dirichlet) {
    for (int k = 1; k <= n; ++k) {
      double parity = (k % 2 == 1) ? 2.0 : 0.0;
      m[static_cast<std::size_t>(k - 1)] =
          std::sqrt(2.0 / L) * L / (k * 3.14159265358979323846) * parity;
    }
  } else {
    m[0] = std::sqrt(L);  // constant mode; cosine modes integrate to zero
  }
  return m;
}

double evaluate_observable(const Basis& basis, Observable obs, int mode,
                           const SpectralField& x, const std::vector<double>& mass) {
  switch (obs) {
    case Observable::mode_projection:
      return x.coeff[static_cast<std::size_t>(mode)];
    case Observable::smoothed_mass: {
      double acc = 0;
      for (int k = 0; k < basis.n_modes(); ++k)
        acc += x.coeff[static_cast<std::size_t>(k)] * mass[static_cast<std::size_t>(k)] /
               (1.0 + basis.eigenvalue(k));
      return acc;
    }
    case Observable::sigmoid_h_norm:
      return std::tanh(l2_norm(x));
    case Observable::barrier_distance: {
      GridField g = basis.to_grid(x);
      double gap = std::numeric_limits<double>::infinity();
      for (double v : g.value) gap = std::min(gap, 1.0 - std::abs(v));
      return gap;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

std::vector<TrajectoryRecord> run_ensemble(const Basis& basis, const ModelParams& model,
                                           const SolverConfig& base, const SpectralField& x0,
                                           int n_traj, int threads) {
  std::vector<TrajectoryRecord> out(static_cast<std::size_t>(n_traj));
  parallel_for_indexed(n_traj, threads, [&](int, int i) {
    SolverConfig c = base;
    c.stream = base.stream + static_cast<std::uint64_t>(i);
    out[static_cast<std::size_t>(i)] = simulate(basis, model, c, x0);
  });
  return out;
}

namespace {

void push_stats(SeriesStats& s, std::vector<double>& scratch) {
  std::sort(scratch.begin(), scratch.end());
  double mean = 0;
  for (double v : scratch) mean += v;
  mean /= static_cast<double>(scratch.size());
  s.mean.push_back(mean);
  s.q05.push_back(num::quantile_sorted(scratch, 0.05));
  s.q50.push_back(num::quantile_sorted(scratch, 0.50));
  s.q95.push_back(num::quantile_sorted(scratch, 0.95));
}

}  // namespace

EnsembleStats energy_monitor(const std::vector<TrajectoryRecord>& ensemble,
                             const Basis& basis, const ModelParams& model,
                             const SpectralField& x0) {
  if (ensemble.empty()) throw ConfigError("empty ensemble");
  const std::size_t n_times = ensemble.front().samples.size();
  for (const auto& rec : ensemble)
    if (rec.samples.size() != n_times ||
        rec.config_hash != ensemble.front().config_hash)
      throw ConfigError("inconsistent ensemble");

  EnsembleStats es;
  es.ensemble_size = static_cast<int>(ensemble.size());
  std::vector<double> scratch(ensemble.size());
  auto gather = [&](std::size_t ti, auto proj) {
    for (std::size_t i = 0; i < ensemble.size(); ++i)
      scratch[i] = proj(ensemble[i].samples[ti]);
  };
  for (std::size_t ti = 0; ti < n_times; ++ti) {
    double t = ensemble.front().samples[ti].t;
    es.t.push_back(t);
    gather(ti, [](const MonitorSample& s) { return s.h_norm; });
    push_stats(es.h_norm, scratch);
    gather(ti, [](const MonitorSample& s) { return s.v_norm; });
    push_stats(es.v_norm, scratch);
    gather(ti, [](const MonitorSample& s) { return s.psi_l1; });
    push_stats(es.psi_l1, scratch);
    gather(ti, [](const MonitorSample& s) { return s.sup_norm; });
    push_stats(es.sup_norm, scratch);
    gather(ti, [](const MonitorSample& s) { return s.barrier_gap; });
    push_stats(es.barrier_gap, scratch);
    double inv_t = t > 0 ? 1.0 / t : 0.0;
    gather(ti, [inv_t](const MonitorSample& s) { return s.grad_flux_int * inv_t; });
    push_stats(es.grad_flux_avg, scratch);
    gather(ti, [inv_t](const MonitorSample& s) { return s.cross_int * inv_t; });
    push_stats(es.cross_avg, scratch);
  }

  // budget normalization from the shared initial state
  MonitorTables mt = make_monitor_tables(model);
  GridField g0 = basis.to_grid(x0);
  double psi0 = 0;
  for (double v : g0.value) psi0 += mt.gamma->psi(v);
  psi0 *= basis.weight();
  es.psi_budget = 1.0 + psi0;
  double sup_mean_psi = 0;
  for (double v : es.psi_l1.mean) sup_mean_psi = std::max(sup_mean_psi, v);
  es.psi_budget_ratio = sup_mean_psi / es.psi_budget;
  double final_t = es.t.back();
  double final_grad_int = es.grad_flux_avg.mean.back() * final_t;
  es.grad_budget_ratio = final_grad_int / (es.psi_budget + final_t);

  es.sup_abs_max = 0;
  es.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& rec : ensemble) {
    es.sup_abs_max = std::max(es.sup_abs_max, rec.sup_abs_over_run);
    es.min_gap = std::min(es.min_gap, rec.min_gap_over_run);
  }
  return es;
}

double doubling_log_slope(const std::vector<double>& t, const std::vector<double>& v) {
  if (t.size() != v.size() || t.size() < 3) throw ConfigError("series too short");
  double t_half = 0.5 * t.back();
  std::size_t half_idx = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    double d = std::abs(t[i] - t_half);
    if (d < best) {
      best = d;
      half_idx = i;
    }
  }
  double a = v[half_idx], b = v.back();
  if (a <= 0 || b <= 0) return 0;
  return std::log2(b / a);
}

// ---------------------------------------------------------------------------

BelReport bel_estimate(const Basis& basis, const ModelParams& model,
                       const SolverConfig& base, const BelConfig& cfg) {
  if (cfg.h.coeff.size() != cfg.x0.coeff.size() ||
      static_cast<int>(cfg.x0.coeff.size()) != basis.n_modes())
    throw ConfigError("state or direction size does not match the basis");
  if (!(cfg.t > 0)) throw ConfigError("horizon must be positive");
  const auto n_steps = static_cast<std::uint64_t>(std::llround(cfg.t / base.dt));
  if (n_steps == 0) throw ConfigError("horizon shorter than one step");
  const int n = basis.n_modes();
  std::vector<double> mass = basis_mass_vector(basis);

  struct PathOut {
    double phi = 0, pairing = 0, phi_plus = 0, phi_minus = 0, min_gap = 1;
    bool rejected = false;
  };
  std::vector<PathOut> paths(static_cast<std::size_t>(cfg.n_paths));
  std::vector<std::unique_ptr<Stepper>> steppers(
      static_cast<std::size_t>(std::max(1, cfg.threads)));

  parallel_for_indexed(cfg.n_paths, cfg.threads, [&](int w, int i) {
    auto& st_ptr = steppers[static_cast<std::size_t>(w)];
    if (!st_ptr) st_ptr = std::make_unique<Stepper>(basis, model, base);
    Stepper& st = *st_ptr;
    NormalStream stream(base.seed, base.stream + static_cast<std::uint64_t>(i));

    SpectralField x = cfg.x0, y = cfg.h;
    SpectralField xp = cfg.x0, xm = cfg.x0;
    for (int k = 0; k < n; ++k) {
      xp.coeff[static_cast<std::size_t>(k)] += cfg.eta * cfg.h.coeff[static_cast<std::size_t>(k)];
      xm.coeff[static_cast<std::size_t>(k)] -= cfg.eta * cfg.h.coeff[static_cast<std::size_t>(k)];
    }
    std::vector<double> xi(static_cast<std::size_t>(n));
    double pairing = 0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::uint64_t s = 0; s < n_steps; ++s) {
      stream.fill_normals(s, xi.size(), xi.data());
      st.step_pair(x, y, xi.data(), &pairing);
      min_gap = std::min(min_gap, st.pre_step_gap());
      st.step_with_noise(xp, xi.data());
      min_gap = std::min(min_gap, st.pre_step_gap());
      st.step_with_noise(xm, xi.data());
      min_gap = std::min(min_gap, st.pre_step_gap());
    }
    min_gap = std::min(min_gap,
                       evaluate_observable(basis, Observable::barrier_distance, 0, x, mass));

    PathOut& out = paths[static_cast<std::size_t>(i)];
    out.phi = evaluate_observable(basis, cfg.obs, cfg.obs_mode, x, mass);
    out.phi_plus = evaluate_observable(basis, cfg.obs, cfg.obs_mode, xp, mass);
    out.phi_minus = evaluate_observable(basis, cfg.obs, cfg.obs_mode, xm, mass);
    out.pairing = pairing;
    out.min_gap = min_gap;
    out.rejected = !base.linear_test_mode && min_gap <= base.sep_floor;
  });

  BelReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  double phi_bar = 0;
  std::uint64_t used = 0;
  for (const auto& p : paths) {
    rep.min_gap = std::min(rep.min_gap, p.min_gap);
    if (p.rejected) {
      ++rep.n_rejected;
      continue;
    }
    phi_bar += p.phi;
    ++used;
  }
  rep.n_used = used;
  if (used < 2) throw NumericsError("too few accepted paths");
  phi_bar /= static_cast<double>(used);

  // control variate: E[pairing] = 0, so centering phi leaves the mean intact
  double bel_sum = 0, bel_sq = 0, fd_sum = 0, fd_sq = 0;
  for (const auto& p : paths) {
    if (p.rejected) continue;
    double b = (p.phi - phi_bar) * p.pairing / cfg.t;
    double f = (p.phi_plus - p.phi_minus) / (2.0 * cfg.eta);
    bel_sum += b;
    bel_sq += b * b;
    fd_sum += f;
    fd_sq += f * f;
  }
  double nu = static_cast<double>(used);
  rep.bel = bel_sum / nu;
  rep.fd = fd_sum / nu;
  rep.bel_se = std::sqrt(std::max(0.0, bel_sq / nu - rep.bel * rep.bel) / (nu - 1.0));
  rep.fd_se = std::sqrt(std::max(0.0, fd_sq / nu - rep.fd * rep.fd) / (nu - 1.0));
  double denom = std::sqrt(rep.bel_se * rep.bel_se + rep.fd_se * rep.fd_se);
  rep.z = denom > 0 ? std::abs(rep.bel - rep.fd) / denom : 0.0;
  return rep;
}

// ---------------------------------------------------------------------------

IrreducibilityResult irreducibility_run(const Basis& basis, const ModelParams& model,
                                        const SolverConfig& base,
                                        const IrreducibilityConfig& cfg) {
  const int n = basis.n_modes();
  if (static_cast<int>(cfg.start.coeff.size()) != n ||
      static_cast<int>(cfg.target.coeff.size()) != n)
    throw ConfigError("state size does not match the basis");
  if (!(cfg.tau > 0 && cfg.t > cfg.tau)) throw ConfigError("need 0 < tau < t");

  IrreducibilityResult res;
  res.smoothed_target = basis.zero_field();
  SpectralField dropped = basis.zero_field();
  for (int k = 0; k < n; ++k) {
    if (k < n / 2)
      res.smoothed_target.coeff[static_cast<std::size_t>(k)] =
          cfg.target.coeff[static_cast<std::size_t>(k)];
    else
      dropped.coeff[static_cast<std::size_t>(k)] =
          cfg.target.coeff[static_cast<std::size_t>(k)];
  }
  res.target_gap = sobolev_norm(basis, dropped, model.delta);
  res.expected_rate = cfg.gain / (cfg.t - cfg.tau);

  const double dt = base.dt;
  const auto steps_pre = static_cast<std::uint64_t>(std::llround(cfg.tau / dt));
  const auto steps_win = static_cast<std::uint64_t>(std::llround((cfg.t - cfg.tau) / dt));
  if (steps_win < 4) throw ConfigError("steering window shorter than four steps");
  const std::size_t n_rec = static_cast<std::size_t>(steps_win) + 1;
  res.s.resize(n_rec);
  for (std::size_t j = 0; j < n_rec; ++j) res.s[j] = cfg.tau + static_cast<double>(j) * dt;

  const SpectralField& atil = res.smoothed_target;
  auto sq_dist = [&](const SpectralField& z) {
    double acc = 0;
    for (int k = 0; k < n; ++k) {
      double d = z.coeff[static_cast<std::size_t>(k)] -
                 atil.coeff[static_cast<std::size_t>(k)];
      acc += d * d;
    }
    return acc;
  };
  auto v2d_dist_to_target = [&](const SpectralField& z) {
    SpectralField d = z;
    for (int k = 0; k < n; ++k)
      d.coeff[static_cast<std::size_t>(k)] -= cfg.target.coeff[static_cast<std::size_t>(k)];
    return sobolev_norm(basis, d, model.delta);
  };

  if (cfg.drift_only) {
    // exact contraction dZ = mu (atil - Z) ds, realized mode by mode
    res.n_traj = 1;
    double f = std::exp(-res.expected_rate * dt);
    SpectralField z = cfg.start;
    std::vector<double> row(n_rec);
    row[0] = sq_dist(z);
    for (std::uint64_t j = 1; j <= steps_win; ++j) {
      for (int k = 0; k < n; ++k) {
        double& c = z.coeff[static_cast<std::size_t>(k)];
        double a = atil.coeff[static_cast<std::size_t>(k)];
        c = a + (c - a) * f;
      }
      row[static_cast<std::size_t>(j)] = sq_dist(z);
    }
    res.mean_sq = row;
    res.hits = v2d_dist_to_target(z) < cfg.radius ? 1 : 0;
  } else {
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(cfg.n_traj));
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(cfg.n_traj), 0);
    struct Workers {
      std::unique_ptr<Stepper> free_st, pull_st;
    };
    std::vector<Workers> workers(static_cast<std::size_t>(std::max(1, cfg.threads)));
    SolverConfig pull_cfg = base;
    pull_cfg.drift.enabled = true;
    pull_cfg.drift.gain = cfg.gain;
    pull_cfg.drift.window = cfg.t - cfg.tau;
    pull_cfg.drift.target = atil;

    parallel_for_indexed(cfg.n_traj, cfg.threads, [&](int w, int i) {
      Workers& wk = workers[static_cast<std::size_t>(w)];
      if (!wk.free_st) {
        wk.free_st = std::make_unique<Stepper>(basis, model, base);
        wk.pull_st = std::make_unique<Stepper>(basis, model, pull_cfg);
      }
      NormalStream stream(base.seed, base.stream + static_cast<std::uint64_t>(i));
      SpectralField z = cfg.start;
      for (std::uint64_t s = 0; s < steps_pre; ++s) wk.free_st->step(z, s, stream);
      std::vector<double> row(n_rec);
      row[0] = sq_dist(z);
      for (std::uint64_t j = 0; j < steps_win; ++j) {
        wk.pull_st->step(z, steps_pre + j, stream);
        row[static_cast<std::size_t>(j) + 1] = sq_dist(z);
      }
      rows[static_cast<std::size_t>(i)] = std::move(row);
      hit[static_cast<std::size_t>(i)] = v2d_dist_to_target(z) < cfg.radius ? 1 : 0;
    });

    res.n_traj = static_cast<std::uint64_t>(cfg.n_traj);
    res.mean_sq.assign(n_rec, 0.0);
    for (const auto& row : rows)
      for (std::size_t j = 0; j < n_rec; ++j) res.mean_sq[j] += row[j];
    for (double& v : res.mean_sq) v /= static_cast<double>(cfg.n_traj);
    for (auto h : hit) res.hits += h;
  }

  res.hit_prob = static_cast<double>(res.hits) / static_cast<double>(res.n_traj);
  res.wilson_lo = num::wilson_lower(static_cast<std::size_t>(res.hits),
                                    static_cast<std::size_t>(res.n_traj));

  // Fit the decay rate. A noisy run saturates at a variance floor; once the
  // tail is flat, subtracting it exposes the pure exponential approach. A
  // series still decaying at the end (no noise, or the exact contraction
  // channel) is fitted on its raw prefix instead.
  const std::size_t n_pts = res.mean_sq.size();
  const double floor_hat = res.mean_sq.back();
  std::size_t tail_start = n_pts - std::max<std::size_t>(2, n_pts / 4);
  double tail_min = std::numeric_limits<double>::infinity(), tail_max = 0;
  for (std::size_t j = tail_start; j < n_pts; ++j) {
    tail_min = std::min(tail_min, res.mean_sq[j]);
    tail_max = std::max(tail_max, res.mean_sq[j]);
  }
  bool saturated = tail_min > 0 && tail_max <= 1.5 * tail_min &&
                   res.mean_sq.front() > 10.0 * floor_hat;

  std::vector<double> xs, ys;
  if (saturated) {
    for (std::size_t j = 0; j < n_pts && res.mean_sq[j] > 3.0 * floor_hat; ++j) {
      xs.push_back(res.s[j]);
      ys.push_back(std::log(res.mean_sq[j] - floor_hat));
    }
  }
  if (xs.size() < 4) {
    xs.clear();
    ys.clear();
    double cut = 50.0 * std::max(floor_hat, 1e-300);
    std::size_t n_fit = 0;
    while (n_fit < n_pts && res.mean_sq[n_fit] > cut) ++n_fit;
    if (n_fit < 4) n_fit = std::max<std::size_t>(4, n_pts / 2);
    n_fit = std::min(n_fit, n_pts);
    for (std::size_t j = 0; j < n_fit; ++j) {
      xs.push_back(res.s[j]);
      ys.push_back(std::log(std::max(res.mean_sq[j], 1e-300)));
    }
  }
  res.fitted_rate = -num::fit_line(xs, ys).slope / 2.0;
  return res;
}

// ---------------------------------------------------------------------------

ErgodicityResult ergodicity_run(const Basis& basis, const ModelParams& model,
                                const SolverConfig& base, const ErgodicityConfig& cfg) {
  const int n = basis.n_modes();
  if (static_cast<int>(cfg.x1.coeff.size()) != n ||
      static_cast<int>(cfg.x2.coeff.size()) != n)
    throw ConfigError("state size does not match the basis");
  if (cfg.n_horizons < 2) throw ConfigError("need at least two horizons");
  const double dt = base.dt;
  const auto total_steps = static_cast<std::uint64_t>(std::llround(cfg.horizon / dt));
  const auto stride = static_cast<std::uint64_t>(
      std::max<long long>(1, std::llround(cfg.sample_stride / dt)));

  ErgodicityResult res;
  res.n_traj = cfg.n_traj;
  res.names = {"sigmoid_h_norm", "smoothed_mass", "barrier_distance"};
  res.horizons.resize(static_cast<std::size_t>(cfg.n_horizons));
  for (int m = 0; m < cfg.n_horizons; ++m)
    res.horizons[static_cast<std::size_t>(m)] =
        cfg.horizon / std::pow(2.0, cfg.n_horizons - 1 - m);
  if (!(cfg.burn_in < res.horizons.front()))
    throw ConfigError("burn-in not shorter than the first horizon");

  const std::array<Observable, 3> obs = {Observable::sigmoid_h_norm,
                                         Observable::smoothed_mass,
                                         Observable::barrier_distance};
  std::vector<double> mass = basis_mass_vector(basis);

  // sample times are the stride multiples past burn-in
  std::vector<std::uint64_t> sample_steps;
  for (std::uint64_t s = stride; s <= total_steps; s += stride)
    if (static_cast<double>(s) * dt > cfg.burn_in) sample_steps.push_back(s);
  if (sample_steps.empty()) throw ConfigError("no samples past burn-in");
  res.samples_per_chain =
      static_cast<std::uint64_t>(sample_steps.size()) * static_cast<std::uint64_t>(cfg.n_traj);

  // per (chain, trajectory, observable) sample rows
  const std::size_t n_jobs = 2 * static_cast<std::size_t>(cfg.n_traj);
  std::vector<std::array<std::vector<double>, 3>> rows(n_jobs);
  std::vector<std::unique_ptr<Stepper>> steppers(
      static_cast<std::size_t>(std::max(1, cfg.threads)));

  parallel_for_indexed(static_cast<int>(n_jobs), cfg.threads, [&](int w, int idx) {
    auto& st_ptr = steppers[static_cast<std::size_t>(w)];
    if (!st_ptr) st_ptr = std::make_unique<Stepper>(basis, model, base);
    Stepper& st = *st_ptr;
    const int chain = idx < cfg.n_traj ? 0 : 1;
    const int traj = idx % cfg.n_traj;
    std::uint64_t stream_id = base.stream + static_cast<std::uint64_t>(traj);
    if (chain == 1 && !cfg.common_noise)
      stream_id += static_cast<std::uint64_t>(cfg.n_traj);
    NormalStream stream(base.seed, stream_id);

    SpectralField x = chain == 0 ? cfg.x1 : cfg.x2;
    auto& row = rows[static_cast<std::size_t>(idx)];
    for (auto& r : row) r.reserve(sample_steps.size());
    std::size_t next_sample = 0;
    for (std::uint64_t s = 0; s < total_steps; ++s) {
      st.step(x, s, stream);
      if (next_sample < sample_steps.size() && s + 1 == sample_steps[next_sample]) {
        for (int o = 0; o < 3; ++o)
          row[static_cast<std::size_t>(o)].push_back(
              evaluate_observable(basis, obs[static_cast<std::size_t>(o)], 0, x, mass));
        ++next_sample;
      }
    }
  });

  for (int o = 0; o < 3; ++o)
    res.ks[static_cast<std::size_t>(o)].resize(res.horizons.size());
  for (std::size_t m = 0; m < res.horizons.size(); ++m) {
    auto limit = static_cast<std::uint64_t>(std::llround(res.horizons[m] / dt));
    std::size_t keep = 0;
    while (keep < sample_steps.size() && sample_steps[keep] <= limit) ++keep;
    for (int o = 0; o < 3; ++o) {
      std::vector<double> pool1, pool2;
      pool1.reserve(keep * static_cast<std::size_t>(cfg.n_traj));
      pool2.reserve(keep * static_cast<std::size_t>(cfg.n_traj));
      for (int i = 0; i < cfg.n_traj; ++i) {
        const auto& r1 = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(o)];
        const auto& r2 =
            rows[static_cast<std::size_t>(i + cfg.n_traj)][static_cast<std::size_t>(o)];
        pool1.insert(pool1.end(), r1.begin(), r1.begin() + static_cast<std::ptrdiff_t>(keep));
        pool2.insert(pool2.end(), r2.begin(), r2.begin() + static_cast<std::ptrdiff_t>(keep));
      }
      res.ks[static_cast<std::size_t>(o)][m] = num::ks_distance(pool1, pool2);
    }
  }

  // samples within a trajectory are dependent, so the band is set by the
  // number of independent trajectories, not the pooled count
  res.null_band = 1.36 * std::sqrt(2.0 / static_cast<double>(cfg.n_traj));
  return res;
}

// ---------------------------------------------------------------------------

SeparationStats separation_stats(const std::vector<TrajectoryRecord>& ensemble,
                                 const ModelParams& model,
                                 const std::vector<double>& levels) {
  if (ensemble.empty()) throw ConfigError("empty ensemble");
  SeparationStats st;
  st.ensemble_size = static_cast<int>(ensemble.size());
  st.levels = levels;
  st.sup_budget = 1.0 + 5.0 * model.epsilon;

  std::vector<double> layer;
  layer.reserve(ensemble.size());
  st.sup_abs_max = 0;
  for (const auto& rec : ensemble) {
    layer.push_back(rec.min_gap_over_run);
    st.sup_abs_max = std::max(st.sup_abs_max, rec.sup_abs_over_run);
  }
  std::sort(layer.begin(), layer.end());
  st.layer_q05 = num::quantile_sorted(layer, 0.05);
  st.layer_q50 = num::quantile_sorted(layer, 0.50);
  st.layer_q95 = num::quantile_sorted(layer, 0.95);
  st.within_budget = st.sup_abs_max <= st.sup_budget;

  for (double lv : levels) {
    std::size_t k = 0;
    for (const auto& rec : ensemble)
      if (rec.sup_abs_over_run > 1.0 - lv) ++k;
    st.exceed_prob.push_back(static_cast<double>(k) / static_cast<double>(ensemble.size()));
    st.wilson_lo.push_back(num::wilson_lower(k, ensemble.size()));
  }
  return st;
}

}  // namespace dspde
