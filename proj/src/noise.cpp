#include "dspde/noise.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dspde/errors.hpp"
#include "dspde/numerics.hpp"

namespace dspde {

NoiseOp::NoiseOp(const Basis& basis, NoiseParams params)
    : basis_(basis), params_(params) {
  if (params_.alpha < 2.0) throw ConfigError("noise: alpha must be >= 2");
  if (params_.delta <= 0.25)
    throw ConfigError("noise: delta must exceed 1/4 for a Hilbert-Schmidt operator");
  if (params_.epsilon < 0.0 || params_.epsilon >= 1.0)
    throw ConfigError("noise: epsilon must lie in [0, 1)");
  if (params_.epsilon > 0.0) {
    table_ = std::make_shared<PotentialTable>(
        PotentialParams{params_.alpha / 2.0, params_.epsilon});
  }
  smooth_.resize(static_cast<std::size_t>(basis_.n_modes()));
  for (int k = 0; k < basis_.n_modes(); ++k)
    smooth_[static_cast<std::size_t>(k)] = std::pow(1.0 + basis_.eigenvalue(k), -params_.delta);
}

double NoiseOp::multiplier(double x) const {
  if (table_) return table_->m(x);
  return mobility(params_.alpha / 2.0, x);
}

double NoiseOp::multiplier_prime(double x) const {
  if (!table_)
    throw ConfigError("noise: multiplier derivative needs the regularized family");
  return table_->m_prime(x);
}

double NoiseOp::inverse_multiplier(double x) const {
  if (table_) return table_->psi_second(x);
  return psi_second(params_.alpha / 2.0, x);
}

double NoiseOp::barrier_gap(const GridField& x) const {
  double gap = std::numeric_limits<double>::infinity();
  for (double v : x.value) gap = std::min(gap, 1.0 - std::abs(v));
  return gap;
}

GridField NoiseOp::apply_G(const GridField& x, const SpectralField& u) const {
  SpectralField smoothed = u;
  for (int k = 0; k < basis_.n_modes(); ++k)
    smoothed.coeff[static_cast<std::size_t>(k)] *= smooth_[static_cast<std::size_t>(k)];
  GridField g = basis_.to_grid(smoothed);
  for (int j = 0; j < basis_.n_nodes(); ++j)
    g.value[static_cast<std::size_t>(j)] *= multiplier(x.value[static_cast<std::size_t>(j)]);
  return g;
}

SpectralField NoiseOp::sample_noise_term(const GridField& x, double dt,
                                         const double* xi) const {
  SpectralField colored;
  colored.coeff.resize(static_cast<std::size_t>(basis_.n_modes()));
  double root_dt = std::sqrt(dt);
  for (int k = 0; k < basis_.n_modes(); ++k)
    colored.coeff[static_cast<std::size_t>(k)] =
        smooth_[static_cast<std::size_t>(k)] * xi[k] * root_dt;
  GridField g = basis_.to_grid(colored);
  for (int j = 0; j < basis_.n_nodes(); ++j)
    g.value[static_cast<std::size_t>(j)] *= multiplier(x.value[static_cast<std::size_t>(j)]);
  return basis_.to_spectral(g);
}

double NoiseOp::hs_norm_sq(const GridField& x, double sigma) const {
  // columns G(x) e_k, each measured in H^{2 sigma} after projection
  double total = 0.0;
  SpectralField unit = basis_.zero_field();
  for (int k = 0; k < basis_.n_modes(); ++k) {
    unit.coeff[static_cast<std::size_t>(k)] = 1.0;
    GridField col = apply_G(x, unit);
    SpectralField coeffs = basis_.to_spectral(col);
    double norm = sobolev_norm(basis_, coeffs, sigma);
    total += norm * norm;
    unit.coeff[static_cast<std::size_t>(k)] = 0.0;
  }
  return total;
}

SpectralField NoiseOp::apply_DG(const GridField& x, const GridField& y,
                                const SpectralField& u) const {
  if (!table_) throw ConfigError("noise: DG needs the regularized family");
  SpectralField smoothed = u;
  for (int k = 0; k < basis_.n_modes(); ++k)
    smoothed.coeff[static_cast<std::size_t>(k)] *= smooth_[static_cast<std::size_t>(k)];
  GridField g = basis_.to_grid(smoothed);
  for (int j = 0; j < basis_.n_nodes(); ++j) {
    std::size_t jj = static_cast<std::size_t>(j);
    g.value[jj] *= table_->m_prime(x.value[jj]) * y.value[jj];
  }
  return basis_.to_spectral(g);
}

SpectralField NoiseOp::apply_G_inverse(const GridField& x, const SpectralField& v) const {
  if (!table_) {
    double gap = barrier_gap(x);
    if (gap <= params_.sep_floor)
      throw FeasibilityError(
          "noise inverse: state within " + std::to_string(params_.sep_floor) +
              " of the barrier",
          gap);
  }
  GridField g = basis_.to_grid(v);
  for (int j = 0; j < basis_.n_nodes(); ++j) {
    std::size_t jj = static_cast<std::size_t>(j);
    g.value[jj] *= inverse_multiplier(x.value[jj]);
  }
  SpectralField out = basis_.to_spectral(g);
  apply_fractional(basis_, params_.delta, out);
  return out;
}

double NoiseOp::inverse_surrogate_norm(const GridField& x) const {
  GridField recip = x;
  for (int j = 0; j < basis_.n_nodes(); ++j) {
    std::size_t jj = static_cast<std::size_t>(j);
    recip.value[jj] = inverse_multiplier(x.value[jj]);
  }
  SpectralField coeffs = basis_.to_spectral(recip);
  return sobolev_norm(basis_, coeffs, params_.delta);
}

double NoiseOp::inverse_operator_norm(const GridField& x) const {
  // G^{-1}(x) : H^{2 delta} -> H in coefficient space is B M B^{-1} applied
  // to weighted coefficients w = B c, B = diag((1+lambda)^delta), M the
  // multiplication-by-psi'' matrix; its largest singular value is found by
  // power iteration on C^T C.
  int n = basis_.n_modes();
  std::vector<double> C(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  SpectralField unit = basis_.zero_field();
  for (int c = 0; c < n; ++c) {
    // column = G^{-1}(x) applied to the H^{2 delta}-normalized basis vector;
    // the output is already measured in plain H coefficients
    unit.coeff[static_cast<std::size_t>(c)] = std::pow(1.0 + basis_.eigenvalue(c), -params_.delta);
    SpectralField col = apply_G_inverse(x, unit);
    for (int r = 0; r < n; ++r)
      C[static_cast<std::size_t>(r) * n + c] = col.coeff[static_cast<std::size_t>(r)];
    unit.coeff[static_cast<std::size_t>(c)] = 0.0;
  }
  std::vector<double> v(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> w(static_cast<std::size_t>(n));
  double norm_sq = 0.0;
  for (int it = 0; it < 300; ++it) {
    for (int r = 0; r < n; ++r) {
      double acc = 0.0;
      for (int c = 0; c < n; ++c) acc += C[static_cast<std::size_t>(r) * n + c] * v[static_cast<std::size_t>(c)];
      w[static_cast<std::size_t>(r)] = acc;
    }
    for (int c = 0; c < n; ++c) {
      double acc = 0.0;
      for (int r = 0; r < n; ++r) acc += C[static_cast<std::size_t>(r) * n + c] * w[static_cast<std::size_t>(r)];
      v[static_cast<std::size_t>(c)] = acc;
    }
    double len = 0.0;
    for (double y : v) len += y * y;
    len = std::sqrt(len);
    if (len == 0.0) return 0.0;
    for (double& y : v) y /= len;
    norm_sq = len;
  }
  return std::sqrt(norm_sq);
}

}  // namespace dspde
