#pragma once

#include <cstddef>
#include <vector>

namespace dspde {

enum class Bc { dirichlet, neumann };

// Coefficients in the eigenbasis of the negative Laplacian on (0, length).
struct SpectralField {
  std::vector<double> coeff;
};

// Nodal values on the quadrature grid of a Basis.
struct GridField {
  std::vector<double> value;
};

// Eigenpairs of -d^2/dz^2 with the given boundary condition, plus a grid on
// which the truncated basis is exactly orthonormal under the uniform
// quadrature weight. Dirichlet: e_k = sqrt(2/L) sin(k pi z / L) on interior
// equispaced nodes. Neumann: constant mode first, then cosines on midpoint
// nodes. n_nodes >= ceil(3 n_modes / 2) so that quadratic nonlinearities are
// dealiased.
class Basis {
public:
  Basis(Bc bc, double length, int n_modes, int n_nodes = 0);

  Bc bc() const { return bc_; }
  double length() const { return length_; }
  int n_modes() const { return n_modes_; }
  int n_nodes() const { return n_nodes_; }
  double node(int j) const { return nodes_[static_cast<std::size_t>(j)]; }
  const std::vector<double>& nodes() const { return nodes_; }
  double weight() const { return weight_; }
  double eigenvalue(int k) const { return lambda_[static_cast<std::size_t>(k)]; }
  const std::vector<double>& eigenvalues() const { return lambda_; }

  void to_grid(const double* coeff, double* values) const;
  void to_spectral(const double* values, double* coeff) const;
  GridField to_grid(const SpectralField& f) const;
  SpectralField to_spectral(const GridField& g) const;

  // d/dz of the truncated expansion, evaluated at the grid nodes
  void gradient_on_grid(const double* coeff, double* values) const;

  SpectralField zero_field() const { return {std::vector<double>(n_modes_, 0.0)}; }

private:
  Bc bc_;
  double length_;
  int n_modes_;
  int n_nodes_;
  double weight_;
  std::vector<double> lambda_;
  std::vector<double> nodes_;
  std::vector<double> synth_;  // n_nodes x n_modes, row-major: e_k(z_j)
};

// coeff_k *= (1 + lambda_k)^s, the diagonal action of (I+A)^s
void apply_fractional(const Basis& basis, double s, double* coeff);
void apply_fractional(const Basis& basis, double s, SpectralField& f);

double l2_norm(const SpectralField& f);
// ( sum_k (1+lambda_k)^(2s) |c_k|^2 )^(1/2), the H^{2s} norm
double sobolev_norm(const Basis& basis, const SpectralField& f, double s);

// Discrete L2 norm of nodal values under the quadrature weight
double grid_l2_norm(const Basis& basis, const GridField& g);

struct HsReport {
  double partial_sum_sq = 0;  // sum over the truncated basis
  double tail_sq = 0;         // midpoint integral estimate of the dropped modes
  bool converges = false;     // delta - sigma > 1/4
  double total_sq() const { return partial_sum_sq + tail_sq; }
};

// Squared Hilbert-Schmidt norm of (I+A)^{-delta} : H -> H^{2 sigma},
// sum_k (1+lambda_k)^{2(sigma-delta)}.
HsReport hs_norm_fractional(Bc bc, double length, int n_modes, double delta, double sigma);
HsReport hs_norm_fractional(const Basis& basis, double delta, double sigma);

}  // namespace dspde
