#pragma once

#include <memory>

#include "dspde/potentials.hpp"
#include "dspde/spectral.hpp"

namespace dspde {

struct NoiseParams {
  double alpha = 2.0;    // mobility exponent; the multiplier is m_{alpha/2}
  double delta = 0.5;    // smoothing order of (I+A)^{-delta}
  double epsilon = 0.0;  // 0 selects the singular family
  double sep_floor = 1e-6;
};

// Multiplicative degenerate noise operator
//   G(x)[u] = m_{alpha/2}(x) . (I+A)^{-delta} u
// and its directional derivative, inverse, and Hilbert-Schmidt norm, all in
// the truncated eigenbasis. Outputs of grid products are projected back onto
// the basis span, the Galerkin-consistent choice.
class NoiseOp {
public:
  NoiseOp(const Basis& basis, NoiseParams params);

  const NoiseParams& params() const { return params_; }

  // nodal noise multiplier m_{alpha/2}(x) (regularized when epsilon > 0)
  double multiplier(double x) const;
  double multiplier_prime(double x) const;  // requires epsilon > 0
  // reciprocal multiplier psi''_{alpha/2}(x); feasibility-gated when epsilon = 0
  double inverse_multiplier(double x) const;

  GridField apply_G(const GridField& x, const SpectralField& u) const;

  // One Euler-Maruyama noise increment G(x) dW built from n_modes standard
  // normals: coefficients of the projection of
  //   m_{alpha/2}(x) . sum_k (1+lambda_k)^{-delta} xi_k sqrt(dt) e_k.
  SpectralField sample_noise_term(const GridField& x, double dt, const double* xi) const;

  // sum_k || G(x) e_k ||_{H^{2 sigma}}^2 over the truncated basis
  double hs_norm_sq(const GridField& x, double sigma) const;

  // (DG(x)[y])[u] = m'_{alpha/2}(x) . y . (I+A)^{-delta} u, projected
  SpectralField apply_DG(const GridField& x, const GridField& y,
                         const SpectralField& u) const;

  // G^{-1}(x)[v] = (I+A)^{delta} ( psi''_{alpha/2}(x) . v ); for epsilon = 0
  // requires min_j (1 - |x_j|) > sep_floor, else FeasibilityError
  SpectralField apply_G_inverse(const GridField& x, const SpectralField& v) const;

  // Surrogate bound || psi''_{alpha/2}(x) ||_{H^{2 delta}} for the operator
  // norm of G^{-1}(x) : H^{2 delta} -> H, and the norm itself by power
  // iteration on the weighted coefficient matrix.
  double inverse_surrogate_norm(const GridField& x) const;
  double inverse_operator_norm(const GridField& x) const;

  double barrier_gap(const GridField& x) const;  // min_j 1 - |x_j|

private:
  const Basis& basis_;
  NoiseParams params_;
  std::shared_ptr<const PotentialTable> table_;  // built when epsilon > 0
  std::vector<double> smooth_;                   // (1+lambda_k)^{-delta}
};

}  // namespace dspde
