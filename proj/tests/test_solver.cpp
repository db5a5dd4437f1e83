#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "dspde/errors.hpp"
#include "dspde/rng.hpp"
#include "dspde/solver.hpp"
#include "dspde/spectral.hpp"

using namespace dspde;

namespace {

SpectralField decaying_coeffs(const Basis& basis, double decay, double scale, int salt) {
  SpectralField f = basis.zero_field();
  NormalStream rng(555, static_cast<std::uint64_t>(salt));
  std::vector<double> xi(f.coeff.size());
  rng.fill_normals(0, xi.size(), xi.data());
  for (int k = 0; k < basis.n_modes(); ++k)
    f.coeff[static_cast<std::size_t>(k)] =
        scale * xi[static_cast<std::size_t>(k)] * std::pow(decay, k);
  return f;
}

SpectralField sup_scaled(const Basis& basis, SpectralField f, double sup) {
  GridField g = basis.to_grid(f);
  double s = 0;
  for (double v : g.value) s = std::max(s, std::abs(v));
  for (double& c : f.coeff) c *= sup / s;
  return f;
}

double rel_h_diff(const SpectralField& a, const SpectralField& b) {
  double num = 0, den = 0;
  for (std::size_t k = 0; k < a.coeff.size(); ++k) {
    double d = a.coeff[k] - b.coeff[k];
    num += d * d;
    den += b.coeff[k] * b.coeff[k];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("config hash tracks dynamics, not bookkeeping") {
  ModelParams model;
  SolverConfig config;
  std::uint64_t base = config_hash(model, config);

  SolverConfig c2 = config;
  c2.seed = 99;
  c2.stream = 7;
  c2.horizon = 123.0;
  c2.store_stride = 1;
  CHECK(config_hash(model, c2) == base);

  ModelParams m2 = model;
  m2.alpha = 4.0;
  CHECK(config_hash(m2, config) != base);

  SolverConfig c3 = config;
  c3.dt = 2e-3;
  CHECK(config_hash(model, c3) != base);

  SolverConfig c4 = config;
  c4.n_modes = 16;
  CHECK(config_hash(model, c4) != base);

  SolverConfig c5 = config;
  c5.drift.enabled = true;
  c5.drift.gain = 5.0;
  c5.drift.window = 0.25;
  c5.drift.target.coeff.assign(static_cast<std::size_t>(config.n_modes), 0.1);
  CHECK(config_hash(model, c5) != base);

  // explicit node count equal to the default resolution is the same dynamics
  SolverConfig c6 = config;
  c6.n_nodes = (3 * config.n_modes + 1) / 2;
  CHECK(config_hash(model, c6) == base);
}

TEST_CASE("frozen-coefficient channel decays exactly") {
  Basis basis(Bc::dirichlet, 3.141592653589793, 8);
  ModelParams model;
  SolverConfig config;
  config.n_modes = 8;
  config.dt = 1e-3;
  config.linear_test_mode = true;
  config.noise_enabled = false;
  Stepper stepper(basis, model, config);
  NormalStream stream(1, 0);

  SpectralField x = decaying_coeffs(basis, 0.8, 1.0, 1);
  SpectralField x0 = x;
  int n_steps = 250;
  for (int s = 0; s < n_steps; ++s) stepper.step(x, static_cast<std::uint64_t>(s), stream);
  for (int k = 0; k < 8; ++k) {
    double expect = x0.coeff[static_cast<std::size_t>(k)] *
                    std::exp(-(1.0 + basis.eigenvalue(k)) * config.dt * n_steps);
    CHECK(x.coeff[static_cast<std::size_t>(k)] ==
          doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("frozen-coefficient channel reproduces the discrete OU variance") {
  // noise enters before the exponential contraction, so after n steps
  // Var(c_k) = s^2 a^2 (1 - a^{2n}) / (1 - a^2) with a = exp(-(1+l)dt),
  // s = sqrt(dt) (1+l)^{-delta}; this pins the substep ordering
  const int n_modes = 8;
  Basis basis(Bc::dirichlet, 3.141592653589793, n_modes);
  ModelParams model;
  model.delta = 0.45;
  SolverConfig config;
  config.n_modes = n_modes;
  config.dt = 1e-3;
  config.linear_test_mode = true;
  Stepper stepper(basis, model, config);

  const int n_paths = 20000;
  const int n_steps = 200;
  std::vector<double> sum(n_modes, 0.0), sum_sq(n_modes, 0.0);
  for (int p = 0; p < n_paths; ++p) {
    NormalStream stream(2024, static_cast<std::uint64_t>(p));
    SpectralField x = basis.zero_field();
    for (int s = 0; s < n_steps; ++s)
      stepper.step(x, static_cast<std::uint64_t>(s), stream);
    for (int k = 0; k < n_modes; ++k) {
      double c = x.coeff[static_cast<std::size_t>(k)];
      sum[static_cast<std::size_t>(k)] += c;
      sum_sq[static_cast<std::size_t>(k)] += c * c;
    }
  }
  for (int k = 0; k < n_modes; ++k) {
    double lam = basis.eigenvalue(k);
    double a = std::exp(-(1.0 + lam) * config.dt);
    double s2 = config.dt * std::pow(1.0 + lam, -2.0 * model.delta);
    double a2 = a * a;
    double expect = s2 * a2 * (1.0 - std::pow(a2, n_steps)) / (1.0 - a2);
    double mean = sum[static_cast<std::size_t>(k)] / n_paths;
    double var = sum_sq[static_cast<std::size_t>(k)] / n_paths - mean * mean;
    double se_var = expect * std::sqrt(2.0 / (n_paths - 1));
    CHECK(std::abs(var - expect) < 4.0 * se_var);
    CHECK(std::abs(mean) < 4.0 * std::sqrt(expect / n_paths));
  }
}

TEST_CASE("implicit nodal solve satisfies its equation on constant states") {
  // constants are exactly resolved by the first cosine mode, so the split
  // step can be inverted by hand and the inner root checked directly
  Basis basis(Bc::neumann, 2.0, 10);
  ModelParams model;
  model.bc = Bc::neumann;
  model.length = 2.0;
  model.epsilon = 0.2;
  SolverConfig config;
  config.n_modes = 10;
  config.dt = 5e-3;
  config.noise_enabled = false;
  Stepper stepper(basis, model, config);

  for (double c0 : {0.7, -0.4, 0.05}) {
    SpectralField x = basis.zero_field();
    x.coeff[0] = c0 * std::sqrt(2.0);  // constant mode has height 1/sqrt(L)
    GridField g0 = basis.to_grid(x);
    CHECK(g0.value[0] == doctest::Approx(c0).epsilon(1e-14));

    stepper.step_with_noise(x, nullptr);
    GridField g1 = basis.to_grid(x);
    // all nodes agree (the state stayed constant) ...
    for (double v : g1.value) CHECK(v == doctest::Approx(g1.value[0]).epsilon(1e-13));
    // ... and the constant mode felt no linear decay (its eigenvalue is 0),
    // so the nodal value is the implicit root itself
    double r = g1.value[0];
    CHECK(r + config.dt * stepper.drift_table().psi_prime(r) ==
          doctest::Approx(c0).epsilon(1e-11));
    // the solve contracts toward zero without overshooting
    CHECK(std::abs(r) < std::abs(c0));
    CHECK(r * c0 > 0.0);
  }
}

TEST_CASE("noise-free energy decreases at every step") {
  Basis basis(Bc::dirichlet, 3.141592653589793, 16);
  ModelParams model;
  model.alpha = 4.0;
  model.beta = 1.0;
  model.epsilon = 0.2;
  SolverConfig config;
  config.n_modes = 16;
  config.dt = 1e-3;
  config.noise_enabled = false;
  Stepper stepper(basis, model, config);

  SpectralField x = sup_scaled(basis, decaying_coeffs(basis, 0.7, 1.0, 2), 0.8);
  double prev = stepper.lyapunov_energy(x);
  for (int s = 0; s < 2000; ++s) {
    stepper.step_with_noise(x, nullptr);
    double cur = stepper.lyapunov_energy(x);
    CHECK(cur <= prev + 1e-12 * (1.0 + std::abs(prev)));
    prev = cur;
  }
  CHECK(prev < 1e-3);  // the flow relaxed most of the way to zero
}

TEST_CASE("tangent process matches pathwise finite differences") {
  Basis basis(Bc::dirichlet, 3.141592653589793, 8);
  ModelParams model;
  model.alpha = 4.0;
  model.beta = 1.0;
  model.epsilon = 0.2;
  model.delta = 0.45;
  SolverConfig config;
  config.n_modes = 8;
  config.dt = 1e-3;
  Stepper stepper(basis, model, config);

  SpectralField x0 = sup_scaled(basis, decaying_coeffs(basis, 0.7, 1.0, 3), 0.5);
  SpectralField h = basis.zero_field();
  h.coeff[0] = 0.2;
  h.coeff[2] = -0.1;

  const int n_steps = 100;
  NormalStream stream(99, 0);
  std::vector<double> xi(8);

  auto run_fd = [&](double eta) {
    SpectralField x = x0, y = h, xp = x0, xm = x0;
    for (std::size_t k = 0; k < xp.coeff.size(); ++k) {
      xp.coeff[k] += eta * h.coeff[k];
      xm.coeff[k] -= eta * h.coeff[k];
    }
    for (int s = 0; s < n_steps; ++s) {
      stream.fill_normals(static_cast<std::uint64_t>(s), xi.size(), xi.data());
      stepper.step_pair(x, y, xi.data());
      stepper.step_with_noise(xp, xi.data());
      stepper.step_with_noise(xm, xi.data());
    }
    SpectralField fd = basis.zero_field();
    for (std::size_t k = 0; k < fd.coeff.size(); ++k)
      fd.coeff[k] = (xp.coeff[k] - xm.coeff[k]) / (2.0 * eta);
    return rel_h_diff(fd, y);
  };

  double err_small = run_fd(1e-4);
  double err_large = run_fd(1e-3);
  CHECK(err_small < 1e-3);
  CHECK(err_large > 5.0 * err_small);  // error decays at least first order in eta
}

TEST_CASE("steering drift pulls the state toward its target") {
  Basis basis(Bc::dirichlet, 3.141592653589793, 8);
  ModelParams model;
  model.epsilon = 0.2;
  SolverConfig config;
  config.n_modes = 8;
  config.dt = 1e-3;
  config.noise_enabled = false;
  config.drift.enabled = true;
  config.drift.gain = 50.0;
  config.drift.window = 0.1;  // rate 500, dominating the stiffest eigenvalue
  config.drift.target = sup_scaled(basis, decaying_coeffs(basis, 0.6, 1.0, 4), 0.4);
  Stepper stepper(basis, model, config);

  SpectralField x = sup_scaled(basis, decaying_coeffs(basis, 0.7, 1.0, 5), 0.4);
  double d0 = rel_h_diff(x, config.drift.target);
  for (int s = 0; s < 100; ++s) stepper.step_with_noise(x, nullptr);
  double d1 = rel_h_diff(x, config.drift.target);
  CHECK(d1 < 0.1 * d0);

  CHECK(DriftSpec{true, 5.0, 0.25, {}}.rate() == doctest::Approx(20.0));
}

TEST_CASE("trajectory records carry the sampling grid and run extrema") {
  Basis basis(Bc::dirichlet, 3.141592653589793, 8);
  ModelParams model;
  model.epsilon = 0.2;
  SolverConfig config;
  config.n_modes = 8;
  config.dt = 1e-3;
  config.horizon = 0.02;
  config.store_stride = 7;
  config.seed = 5;
  config.stream = 3;
  SpectralField x0 = sup_scaled(basis, decaying_coeffs(basis, 0.7, 1.0, 6), 0.5);

  TrajectoryRecord rec = simulate(basis, model, config, x0);
  CHECK(rec.final_step == 20);
  CHECK(rec.seed == 5);
  CHECK(rec.stream == 3);
  CHECK(rec.config_hash == config_hash(model, config));
  REQUIRE(rec.samples.size() == 4);  // steps 0, 7, 14 and the final state
  CHECK(rec.samples[0].t == doctest::Approx(0.0));
  CHECK(rec.samples[1].t == doctest::Approx(0.007));
  CHECK(rec.samples[2].t == doctest::Approx(0.014));
  CHECK(rec.samples[3].t == doctest::Approx(0.020));
  CHECK(rec.samples[0].h_norm == doctest::Approx(l2_norm(x0)).epsilon(1e-14));
  CHECK(rec.samples[0].psi_l1 > 0.0);
  for (const auto& s : rec.samples) {
    CHECK(s.barrier_gap == doctest::Approx(1.0 - s.sup_norm));
    CHECK(s.excursion_frac >= 0.0);
    CHECK(s.excursion_frac <= 1.0);
    CHECK(s.v_norm >= s.h_norm);
  }
  CHECK(rec.samples[3].grad_flux_int >= rec.samples[1].grad_flux_int);
  CHECK(rec.min_gap_over_run <= 1.0);
  CHECK(rec.sup_abs_over_run >= rec.samples[3].sup_norm - 1e-15);

  // the final state matches the last sample
  CHECK(l2_norm(rec.final_state) == doctest::Approx(rec.samples[3].h_norm));
}

TEST_CASE("flat start stays at zero without noise") {
  Basis basis(Bc::dirichlet, 3.141592653589793, 8);
  ModelParams model;
  model.epsilon = 0.2;
  SolverConfig config;
  config.n_modes = 8;
  config.dt = 1e-3;
  config.horizon = 0.05;
  config.noise_enabled = false;
  TrajectoryRecord rec = simulate(basis, model, config, basis.zero_field());
  CHECK(l2_norm(rec.final_state) == 0.0);
  CHECK(rec.samples.back().psi_l1 == 0.0);  // the potential is normalized at 0
}

TEST_CASE("checkpoints round trip and reject tampering") {
  Checkpoint cp;
  cp.config_hash = 0x1234abcd5678ef09ull;
  cp.n_modes = 6;
  cp.n_nodes = 9;
  cp.step_index = 420;
  cp.coeff = {0.1, -0.2, 0.3, -0.4, 0.5, -0.6};
  cp.master_seed = 11;
  cp.stream_id = 22;

  std::string path = "ck_roundtrip.bin";
  save_checkpoint(path, cp);
  Checkpoint back = load_checkpoint(path);
  CHECK(back.config_hash == cp.config_hash);
  CHECK(back.n_modes == cp.n_modes);
  CHECK(back.n_nodes == cp.n_nodes);
  CHECK(back.step_index == cp.step_index);
  CHECK(back.coeff == cp.coeff);
  CHECK(back.master_seed == cp.master_seed);
  CHECK(back.stream_id == cp.stream_id);

  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    f.write("XSPD", 4);
  }
  CHECK_THROWS_AS(load_checkpoint(path), IoError);

  save_checkpoint(path, cp);
  {
    std::ofstream f("ck_short.bin", std::ios::binary);
    std::ifstream in(path, std::ios::binary);
    std::vector<char> buf(40);
    in.read(buf.data(), 40);
    f.write(buf.data(), 40);
  }
  CHECK_THROWS_AS(load_checkpoint("ck_short.bin"), IoError);
  std::remove(path.c_str());
  std::remove("ck_short.bin");
}

TEST_CASE("a split run continues the same trajectory") {
  Basis basis(Bc::dirichlet, 3.141592653589793, 8);
  ModelParams model;
  model.epsilon = 0.2;
  SolverConfig config;
  config.n_modes = 8;
  config.dt = 1e-3;
  config.horizon = 0.1;
  config.seed = 77;
  config.stream = 4;
  SpectralField x0 = sup_scaled(basis, decaying_coeffs(basis, 0.7, 1.0, 7), 0.5);

  TrajectoryRecord whole = simulate(basis, model, config, x0);

  // drive the same 100 steps by hand, pausing halfway
  Stepper stepper(basis, model, config);
  NormalStream stream(config.seed, config.stream);
  SpectralField x = x0;
  for (int s = 0; s < 50; ++s) stepper.step(x, static_cast<std::uint64_t>(s), stream);
  Stepper stepper2(basis, model, config);
  NormalStream stream2(config.seed, config.stream);
  for (int s = 50; s < 100; ++s) stepper2.step(x, static_cast<std::uint64_t>(s), stream2);

  for (int k = 0; k < 8; ++k)
    CHECK(x.coeff[static_cast<std::size_t>(k)] ==
          whole.final_state.coeff[static_cast<std::size_t>(k)]);  // bitwise
}

TEST_CASE("stepper rejects mismatched configuration") {
  Basis basis(Bc::dirichlet, 3.141592653589793, 8);
  ModelParams model;
  model.epsilon = 0.2;
  SolverConfig config;
  config.n_modes = 16;  // disagrees with the basis
  config.dt = 1e-3;
  CHECK_THROWS_AS(Stepper(basis, model, config), ConfigError);

  config.n_modes = 8;
  config.dt = -1.0;
  CHECK_THROWS_AS(Stepper(basis, model, config), ConfigError);

  config.dt = 1e-3;
  ModelParams m2 = model;
  m2.epsilon = 0.0;  // production solve needs the regularized potential
  CHECK_THROWS_AS(Stepper(basis, m2, config), ConfigError);

  SolverConfig c2 = config;
  c2.drift.enabled = true;
  c2.drift.gain = 1.0;
  c2.drift.window = 0.5;
  c2.drift.target = SpectralField{std::vector<double>(4, 0.0)};  // wrong size
  CHECK_THROWS_AS(Stepper(basis, model, c2), ConfigError);
}
