#include "dspde/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dspde/errors.hpp"
#include "dspde/numerics.hpp"

namespace dspde {

namespace {
constexpr double kPi = std::numbers::pi;
}

Basis::Basis(Bc bc, double length, int n_modes, int n_nodes)
    : bc_(bc), length_(length), n_modes_(n_modes) {
  if (length <= 0) throw ConfigError("basis: length must be positive");
  if (n_modes < 1) throw ConfigError("basis: need at least one mode");
  int min_nodes = (3 * n_modes + 1) / 2;
  n_nodes_ = (n_nodes == 0) ? min_nodes : n_nodes;
  if (n_nodes_ < min_nodes)
    throw ConfigError("basis: grid too coarse for dealiased products");

  lambda_.resize(static_cast<std::size_t>(n_modes_));
  for (int k = 0; k < n_modes_; ++k) {
    int mode = (bc_ == Bc::dirichlet) ? k + 1 : k;
    double freq = static_cast<double>(mode) * kPi / length_;
    lambda_[static_cast<std::size_t>(k)] = freq * freq;
  }

  nodes_.resize(static_cast<std::size_t>(n_nodes_));
  if (bc_ == Bc::dirichlet) {
    weight_ = length_ / (n_nodes_ + 1);
    for (int j = 0; j < n_nodes_; ++j) nodes_[static_cast<std::size_t>(j)] = (j + 1) * weight_;
  } else {
    weight_ = length_ / n_nodes_;
    for (int j = 0; j < n_nodes_; ++j)
      nodes_[static_cast<std::size_t>(j)] = (j + 0.5) * weight_;
  }

  synth_.resize(static_cast<std::size_t>(n_nodes_) * static_cast<std::size_t>(n_modes_));
  double amp = std::sqrt(2.0 / length_);
  for (int j = 0; j < n_nodes_; ++j) {
    double z = nodes_[static_cast<std::size_t>(j)];
    double* row = &synth_[static_cast<std::size_t>(j) * n_modes_];
    for (int k = 0; k < n_modes_; ++k) {
      if (bc_ == Bc::dirichlet) {
        row[k] = amp * std::sin((k + 1) * kPi * z / length_);
      } else {
        row[k] = (k == 0) ? 1.0 / std::sqrt(length_) : amp * std::cos(k * kPi * z / length_);
      }
    }
  }
}

void Basis::to_grid(const double* coeff, double* values) const {
  for (int j = 0; j < n_nodes_; ++j) {
    const double* row = &synth_[static_cast<std::size_t>(j) * n_modes_];
    double acc = 0.0;
    for (int k = 0; k < n_modes_; ++k) acc += row[k] * coeff[k];
    values[j] = acc;
  }
}

void Basis::to_spectral(const double* values, double* coeff) const {
  for (int k = 0; k < n_modes_; ++k) coeff[k] = 0.0;
  for (int j = 0; j < n_nodes_; ++j) {
    const double* row = &synth_[static_cast<std::size_t>(j) * n_modes_];
    double v = values[j] * weight_;
    for (int k = 0; k < n_modes_; ++k) coeff[k] += row[k] * v;
  }
}

GridField Basis::to_grid(const SpectralField& f) const {
  if (static_cast<int>(f.coeff.size()) != n_modes_)
    throw ConfigError("to_grid: coefficient count does not match basis");
  GridField g;
  g.value.resize(static_cast<std::size_t>(n_nodes_));
  to_grid(f.coeff.data(), g.value.data());
  return g;
}

SpectralField Basis::to_spectral(const GridField& g) const {
  if (static_cast<int>(g.value.size()) != n_nodes_)
    throw ConfigError("to_spectral: node count does not match basis");
  SpectralField f;
  f.coeff.resize(static_cast<std::size_t>(n_modes_));
  to_spectral(g.value.data(), f.coeff.data());
  return f;
}

void Basis::gradient_on_grid(const double* coeff, double* values) const {
  double amp = std::sqrt(2.0 / length_);
  for (int j = 0; j < n_nodes_; ++j) {
    double z = nodes_[static_cast<std::size_t>(j)];
    double acc = 0.0;
    for (int k = 0; k < n_modes_; ++k) {
      if (bc_ == Bc::dirichlet) {
        double freq = (k + 1) * kPi / length_;
        acc += coeff[k] * amp * freq * std::cos(freq * z);
      } else if (k > 0) {
        double freq = k * kPi / length_;
        acc -= coeff[k] * amp * freq * std::sin(freq * z);
      }
    }
    values[j] = acc;
  }
}

void apply_fractional(const Basis& basis, double s, double* coeff) {
  for (int k = 0; k < basis.n_modes(); ++k)
    coeff[k] *= std::pow(1.0 + basis.eigenvalue(k), s);
}

void apply_fractional(const Basis& basis, double s, SpectralField& f) {
  if (static_cast<int>(f.coeff.size()) != basis.n_modes())
    throw ConfigError("apply_fractional: coefficient count does not match basis");
  apply_fractional(basis, s, f.coeff.data());
}

double l2_norm(const SpectralField& f) {
  double acc = 0.0;
  for (double c : f.coeff) acc += c * c;
  return std::sqrt(acc);
}

double sobolev_norm(const Basis& basis, const SpectralField& f, double s) {
  if (static_cast<int>(f.coeff.size()) != basis.n_modes())
    throw ConfigError("sobolev_norm: coefficient count does not match basis");
  double acc = 0.0;
  for (int k = 0; k < basis.n_modes(); ++k) {
    double w = std::pow(1.0 + basis.eigenvalue(k), 2.0 * s);
    acc += w * f.coeff[static_cast<std::size_t>(k)] * f.coeff[static_cast<std::size_t>(k)];
  }
  return std::sqrt(acc);
}

double grid_l2_norm(const Basis& basis, const GridField& g) {
  double acc = 0.0;
  for (double v : g.value) acc += v * v;
  return std::sqrt(acc * basis.weight());
}

namespace {

// int_b^inf (1 + c k^2)^(-p) dk for 2p > 1, by quadrature on a finite window
// plus the asymptotic expansion of the remainder in powers of 1/(c k^2).
double tail_integral(double b, double c, double p) {
  double window_end = std::max(b * 4.0, b + 64.0);
  double head = num::adaptive_quad(
      [c, p](double k) { return std::pow(1.0 + c * k * k, -p); }, b, window_end, 1e-13,
      1e-300);
  double K = window_end;
  double cp = std::pow(c, -p);
  double r1 = std::pow(K, 1.0 - 2.0 * p) / (2.0 * p - 1.0);
  double r2 = -(p / c) * std::pow(K, -1.0 - 2.0 * p) / (2.0 * p + 1.0);
  double r3 = (p * (p + 1.0) / (2.0 * c * c)) * std::pow(K, -3.0 - 2.0 * p) / (2.0 * p + 3.0);
  return head + cp * (r1 + r2 + r3);
}

}  // namespace

HsReport hs_norm_fractional(Bc bc, double length, int n_modes, double delta, double sigma) {
  HsReport report;
  report.converges = (delta - sigma > 0.25);
  double c = kPi * kPi / (length * length);
  double p = 2.0 * (delta - sigma);
  double sum = 0.0;
  for (int k = 0; k < n_modes; ++k) {
    int mode = (bc == Bc::dirichlet) ? k + 1 : k;
    double lambda = c * mode * mode;
    sum += std::pow(1.0 + lambda, -p);
  }
  report.partial_sum_sq = sum;
  if (report.converges) {
    // first dropped mode index: n_modes+1 (dirichlet) or n_modes (neumann);
    // midpoint comparison starts half a step below it
    double first_dropped = (bc == Bc::dirichlet) ? n_modes + 1 : n_modes;
    report.tail_sq = tail_integral(first_dropped - 0.5, c, p);
  } else {
    report.tail_sq = std::numeric_limits<double>::infinity();
  }
  return report;
}

HsReport hs_norm_fractional(const Basis& basis, double delta, double sigma) {
  return hs_norm_fractional(basis.bc(), basis.length(), basis.n_modes(), delta, sigma);
}

}  // namespace dspde
