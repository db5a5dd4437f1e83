#pragma once

#include <memory>
#include <vector>

#include "dspde/numerics.hpp"

namespace dspde {

// Degenerate mobility (1 - r^2)^s on [-1, 1], zero outside.
double mobility(double exponent, double r);
// One-sided derivative from inside the support, zero outside.
double mobility_prime(double exponent, double r);

// Singular potential family on (-1, 1), defined by
//   psi''(r) = (1 - r^2)^(-s),  psi'(0) = psi(0) = 0,
// so that mobility * psi'' = 1 identically. Closed forms for s = 1, 2;
// tanh-substituted quadrature otherwise.
double psi_second(double exponent, double r);
double psi_prime(double exponent, double r);
double psi_value(double exponent, double r);
// Inverse of the increasing bijection psi' : (-1,1) -> R
double psi_prime_inverse(double exponent, double y);
// N(r) = r * psi'_gamma( (psi'_beta)^{-1}(r) ); equals r^2 when gamma = beta
double coupling_N(double beta, double gamma, double r);

// Smooth bump on (-1, 1) with unit mass and its derivative.
double mollifier(double u);
double mollifier_prime(double u);
// 1 / integral_{-1}^{1} exp(-1/(1-u^2)) du
inline constexpr double kMollifierNorm = 2.2522836210435810;

struct PotentialParams {
  double exponent;  // s >= 1
  double epsilon;   // regularization in (0, 1)
};

// Regularized family:
//   m_eps = (bump_eps * m) + eps^s,
//   psi_eps'' = 1 / m_eps,  psi_eps'(0) = psi_eps(0) = 0.
// m and its derivative are tabulated by quadrature of the convolution on a
// grid refined near the barrier, then served from monotone splines; the
// reciprocal and the antiderivatives are built on top. Outside [-(1+eps),
// 1+eps] the convolution vanishes, so closed-form linear/quadratic
// extensions take over and every evaluator is defined on all of R.
class PotentialTable {
public:
  explicit PotentialTable(PotentialParams params);

  const PotentialParams& params() const { return params_; }
  double floor() const { return floor_; }  // eps^s

  double m(double r) const;
  // exact derivative of the interpolated m, so tangent maps built on it are
  // the true Jacobians of the evaluated dynamics
  double m_prime(double r) const;
  double psi(double r) const;
  double psi_prime(double r) const;
  // exact derivative of the interpolated psi' (psi_second is its smooth
  // counterpart 1/m; the two differ at interpolation error level)
  double psi_prime_derivative(double r) const;
  double psi_second(double r) const { return 1.0 / m(r); }
  double psi_third(double r) const;  // -m' / m^2
  double psi_prime_inverse(double y) const;

  // Quadrature evaluations bypassing the splines (validation / tests)
  double m_direct(double r) const;
  double m_prime_direct(double r) const;
  double psi_prime_direct(double r) const;
  double psi_direct(double r) const;

  struct Validation {
    double max_m_error = 0;
    double max_m_prime_error = 0;
    double max_psi_prime_error = 0;
    double max_psi_error = 0;
  };
  // Max spline-vs-quadrature error over pseudo-random off-grid points
  Validation validate(int n_samples, std::uint64_t seed) const;

private:
  double edge() const { return 1.0 + params_.epsilon; }

  PotentialParams params_;
  double floor_;
  // node data on [0, 1+eps]; symmetry gives the other half
  num::Pchip m_spline_;
  num::Pchip psi_prime_spline_;
  num::Pchip psi_spline_;
  double psi_prime_at_edge_, psi_at_edge_;
};

// Shared, immutable tables for one model parameter set (built once, read by
// every worker thread).
struct PotentialTableSet {
  std::shared_ptr<const PotentialTable> drift;      // exponent beta
  std::shared_ptr<const PotentialTable> noise;      // exponent alpha/2
  std::shared_ptr<const PotentialTable> monitor;    // exponent gamma
  std::shared_ptr<const PotentialTable> monitor_half;  // exponent gamma/2
};

}  // namespace dspde
