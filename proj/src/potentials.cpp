#include "dspde/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dspde/errors.hpp"
#include "dspde/rng.hpp"

namespace dspde {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], symmetric halves
constexpr double kGl20X[10] = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
    0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
    0.9639719272779138, 0.9931285991850949};
constexpr double kGl20W[10] = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
    0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
    0.0406014298003869, 0.0176140071391521};
constexpr double kGl5X[2] = {0.5384693101056831, 0.9061798459386640};
constexpr double kGl5W[3] = {0.5688888888888889, 0.4786286704993665, 0.2369268850561891};

template <typename F>
double gauss20(const F& f, double a, double b) {
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 10; ++i)
    acc += kGl20W[i] * (f(mid + half * kGl20X[i]) + f(mid - half * kGl20X[i]));
  return acc * half;
}

template <typename F>
double gauss5(const F& f, double a, double b) {
  double mid = 0.5 * (a + b);
  double half = 0.5 * (b - a);
  double acc = kGl5W[0] * f(mid);
  for (int i = 0; i < 2; ++i)
    acc += kGl5W[i + 1] * (f(mid + half * kGl5X[i]) + f(mid - half * kGl5X[i]));
  return acc * half;
}

}  // namespace

double mobility(double exponent, double r) {
  double g = 1.0 - r * r;
  if (g <= 0.0) return 0.0;
  return std::pow(g, exponent);
}

double mobility_prime(double exponent, double r) {
  double g = 1.0 - r * r;
  if (g <= 0.0) return 0.0;
  return -2.0 * exponent * r * std::pow(g, exponent - 1.0);
}

double psi_second(double exponent, double r) {
  double g = 1.0 - r * r;
  if (g <= 0.0)
    throw FeasibilityError("psi_second: argument reached the barrier", g);
  return std::pow(g, -exponent);
}

double psi_prime(double exponent, double r) {
  if (std::abs(r) >= 1.0)
    throw FeasibilityError("psi_prime: argument reached the barrier", 1.0 - std::abs(r));
  double g = 1.0 - r * r;
  if (exponent == 1.0) return std::atanh(r);
  if (exponent == 2.0) return r / (2.0 * g) + 0.5 * std::atanh(r);
  if (exponent == 3.0)
    return r / (4.0 * g * g) + 3.0 * r / (8.0 * g) + 0.375 * std::atanh(r);
  // int_0^r (1-w^2)^(-s) dw with w = tanh(u): integrand cosh(u)^(2s-2)
  double u_end = std::atanh(r);
  double p = 2.0 * exponent - 2.0;
  return num::adaptive_quad([p](double u) { return std::pow(std::cosh(u), p); }, 0.0,
                            u_end, 1e-13, 1e-300);
}

double psi_value(double exponent, double r) {
  double a = std::abs(r);
  if (a >= 1.0)
    throw FeasibilityError("psi_value: argument reached the barrier", 1.0 - a);
  if (exponent == 1.0)
    return 0.5 * ((1.0 + a) * std::log1p(a) + (1.0 - a) * std::log1p(-a));
  if (exponent == 2.0) return 0.5 * a * std::atanh(a);
  if (exponent == 3.0) {
    double g = 1.0 - a * a;
    return 1.0 / (8.0 * g) - 0.125 + 0.375 * a * std::atanh(a);
  }
  // int_0^r psi'(w) dw with w = tanh(v)
  double v_end = std::atanh(a);
  return num::adaptive_quad(
      [exponent](double v) {
        double c = std::cosh(v);
        return psi_prime(exponent, std::tanh(v)) / (c * c);
      },
      0.0, v_end, 1e-12, 1e-300);
}

double psi_prime_inverse(double exponent, double y) {
  if (y == 0.0) return 0.0;
  double cap = 1.0 - 1e-15;
  // atanh's inverse is exact for exponent 1; for steeper barriers tanh(y)
  // overshoots far into the stiff zone, so invert the leading barrier term
  // (1-r^2)^(1-s) / (2(s-1)) instead and take the nearer of the two starts
  double ay = std::abs(y);
  double r0 = std::tanh(ay);
  if (exponent > 1.0) {
    double g = std::pow(2.0 * (exponent - 1.0) * ay, -1.0 / (exponent - 1.0));
    if (g < 1.0) r0 = std::min(r0, std::sqrt(1.0 - g));
  }
  if (y < 0.0) r0 = -r0;
  return num::newton_bisect(
      [exponent, y](double r) { return psi_prime(exponent, r) - y; },
      [exponent](double r) { return psi_second(exponent, r); }, -cap, cap, r0,
      1e-13 * std::max(1.0, std::abs(y)));
}

double coupling_N(double beta, double gamma, double r) {
  return r * psi_prime(gamma, psi_prime_inverse(beta, r));
}

double mollifier(double u) {
  double g = 1.0 - u * u;
  if (g <= 0.0) return 0.0;
  return kMollifierNorm * std::exp(-1.0 / g);
}

double mollifier_prime(double u) {
  double g = 1.0 - u * u;
  if (g <= 0.0) return 0.0;
  return kMollifierNorm * std::exp(-1.0 / g) * (-2.0 * u / (g * g));
}

// ---- PotentialTable ------------------------------------------------------

double PotentialTable::m_direct(double r) const {
  double eps = params_.epsilon;
  double s = params_.exponent;
  double a = std::abs(r);
  if (a >= 1.0 + eps) return floor_;
  // (bump_eps * m)(a) = int_{-1}^{1} bump(u) m(a - eps u) du, split where the
  // integrand loses smoothness at a - eps u = +-1
  std::set<double> pts{-1.0, 1.0};
  for (double kink : {-1.0, 1.0}) {
    double u = (a - kink) / eps;
    if (u > -1.0 && u < 1.0) pts.insert(u);
  }
  std::vector<double> breaks(pts.begin(), pts.end());
  double conv = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    conv += gauss20(
        [a, eps, s](double u) { return mollifier(u) * mobility(s, a - eps * u); },
        breaks[i], breaks[i + 1]);
  }
  return conv + floor_;
}

double PotentialTable::m_prime_direct(double r) const {
  double eps = params_.epsilon;
  double s = params_.exponent;
  double a = std::abs(r);
  if (a >= 1.0 + eps) return 0.0;
  // d/dr (bump_eps * m) = (bump_eps' * m): the derivative lands on the smooth
  // bump, so no singular factor appears for any exponent
  std::set<double> pts{-1.0, 1.0};
  for (double kink : {-1.0, 1.0}) {
    double u = (a - kink) / eps;
    if (u > -1.0 && u < 1.0) pts.insert(u);
  }
  std::vector<double> breaks(pts.begin(), pts.end());
  double conv = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    conv += gauss20(
        [a, eps, s](double u) {
          return mollifier_prime(u) / eps * mobility(s, a - eps * u);
        },
        breaks[i], breaks[i + 1]);
  }
  return (r < 0.0) ? -conv : conv;
}

namespace {

// Partition of [0, hi] that refines from `coarse` spacing down to eps/100
// inside the mollified barrier layer [1-2eps, 1+eps].
std::vector<double> layered_partition(double hi, double eps, double coarse, double fine) {
  std::set<double> pts{0.0, hi};
  double inner_end = std::min(hi, std::max(0.0, 1.0 - 2.0 * eps));
  for (double r = coarse; r < inner_end; r += coarse) pts.insert(r);
  for (double r = inner_end; r < hi; r += fine) pts.insert(r);
  return {pts.begin(), pts.end()};
}

}  // namespace

double PotentialTable::psi_prime_direct(double r) const {
  double a = std::abs(r);
  double e = edge();
  double inner = std::min(a, e);
  std::vector<double> part =
      layered_partition(inner, params_.epsilon, 0.01, params_.epsilon / 50.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < part.size(); ++i) {
    acc += gauss20([this](double w) { return 1.0 / m_direct(w); }, part[i], part[i + 1]);
  }
  if (a > e) acc += (a - e) / floor_;
  return (r < 0.0) ? -acc : acc;
}

double PotentialTable::psi_direct(double r) const {
  double a = std::abs(r);
  double e = edge();
  double inner = std::min(a, e);
  std::vector<double> part =
      layered_partition(inner, params_.epsilon, 0.01, params_.epsilon / 50.0);
  // cumulative psi' along the partition, then one more pass for psi
  double acc = 0.0;
  double pp_left = 0.0;
  for (std::size_t i = 0; i + 1 < part.size(); ++i) {
    double lo = part[i], hi = part[i + 1];
    acc += gauss5(
        [this, lo, pp_left](double w) {
          return pp_left + gauss5([this](double v) { return 1.0 / m_direct(v); }, lo, w);
        },
        lo, hi);
    pp_left += gauss20([this](double w) { return 1.0 / m_direct(w); }, lo, hi);
  }
  if (a > e) {
    double d = a - e;
    acc += pp_left * d + 0.5 * d * d / floor_;
  }
  return acc;
}

PotentialTable::PotentialTable(PotentialParams params) : params_(params) {
  if (params_.exponent < 0.5)
    throw ConfigError("potential table: exponent must be >= 1/2");
  if (params_.epsilon <= 0.0 || params_.epsilon >= 1.0)
    throw ConfigError("potential table: epsilon must lie in (0, 1)");
  floor_ = std::pow(params_.epsilon, params_.exponent);

  double eps = params_.epsilon;
  double e = edge();
  double coarse = std::min(0.005, eps / 4.0);
  std::vector<double> positive = layered_partition(e, eps, coarse, eps / 100.0);

  // Mirror a few nodes across zero so the interpolant sees the even/odd
  // symmetry there; evaluation only ever queries |r|.
  int n_mirror = std::min<std::size_t>(6, positive.size() - 1);
  std::vector<double> nodes;
  for (int i = n_mirror; i >= 1; --i) nodes.push_back(-positive[static_cast<std::size_t>(i)]);
  nodes.insert(nodes.end(), positive.begin(), positive.end());

  std::size_t n = nodes.size();
  std::size_t zero_at = static_cast<std::size_t>(n_mirror);
  std::vector<double> m_vals(n), pp_vals(n), p_vals(n);
  for (std::size_t i = zero_at; i < n; ++i) m_vals[i] = m_direct(nodes[i]);
  pp_vals[zero_at] = 0.0;
  for (std::size_t i = zero_at + 1; i < n; ++i) {
    pp_vals[i] = pp_vals[i - 1] + gauss20([this](double w) { return 1.0 / m_direct(w); },
                                          nodes[i - 1], nodes[i]);
  }
  p_vals[zero_at] = 0.0;
  for (std::size_t i = zero_at + 1; i < n; ++i) {
    double lo = nodes[i - 1], hi = nodes[i];
    double base = pp_vals[i - 1];
    p_vals[i] = p_vals[i - 1] +
                gauss5(
                    [this, lo, base](double w) {
                      return base +
                             gauss5([this](double v) { return 1.0 / m_direct(v); }, lo, w);
                    },
                    lo, hi);
  }
  for (std::size_t i = 0; i < zero_at; ++i) {
    std::size_t j = 2 * zero_at - i;  // mirrored positive index
    m_vals[i] = m_vals[j];
    pp_vals[i] = -pp_vals[j];
    p_vals[i] = p_vals[j];
  }
  psi_prime_at_edge_ = pp_vals[n - 1];
  psi_at_edge_ = p_vals[n - 1];

  m_spline_ = num::Pchip(nodes, m_vals);
  psi_prime_spline_ = num::Pchip(nodes, pp_vals);
  psi_spline_ = num::Pchip(std::move(nodes), p_vals);
}

double PotentialTable::m(double r) const {
  double a = std::abs(r);
  if (a >= edge()) return floor_;
  return m_spline_(a);
}

// Differentiate the m interpolant itself rather than interpolating tabulated
// derivative values: anything downstream that linearizes the dynamics (noise
// directional derivatives, solver tangents) then uses the exact Jacobian of
// the function actually evaluated, and finite-difference checks converge
// without an interpolation-mismatch floor.
double PotentialTable::m_prime(double r) const {
  double a = std::abs(r);
  if (a >= edge()) return 0.0;
  double v = m_spline_.derivative(a);
  return (r < 0.0) ? -v : v;
}

double PotentialTable::psi_prime(double r) const {
  double a = std::abs(r);
  double v;
  if (a >= edge()) {
    v = psi_prime_at_edge_ + (a - edge()) / floor_;
  } else {
    v = psi_prime_spline_(a);
  }
  return (r < 0.0) ? -v : v;
}

// Exact slope of the psi' evaluator above, even in r since psi' is odd.
// Implicit drift steps differentiate through the psi' they actually solve
// with, so their tangents need this rather than the smooth law 1/m.
double PotentialTable::psi_prime_derivative(double r) const {
  double a = std::abs(r);
  if (a >= edge()) return 1.0 / floor_;
  return psi_prime_spline_.derivative(a);
}

double PotentialTable::psi(double r) const {
  double a = std::abs(r);
  if (a >= edge()) {
    double d = a - edge();
    return psi_at_edge_ + psi_prime_at_edge_ * d + 0.5 * d * d / floor_;
  }
  return psi_spline_(a);
}

double PotentialTable::psi_third(double r) const {
  double mv = m(r);
  return -m_prime(r) / (mv * mv);
}

double PotentialTable::psi_prime_inverse(double y) const {
  if (y == 0.0) return 0.0;
  // psi'' >= 1/(1 + eps^s) > 1/2, so the root lies within 2|y| + 1
  double bound = 2.0 * std::abs(y) + 1.0;
  return num::newton_bisect([this, y](double r) { return psi_prime(r) - y; },
                            [this](double r) { return psi_second(r); }, -bound, bound,
                            std::tanh(y), 1e-12 * std::max(1.0, std::abs(y)));
}

PotentialTable::Validation PotentialTable::validate(int n_samples, std::uint64_t seed) const {
  Validation v;
  NormalStream rng(seed, 0);
  std::vector<double> draws(static_cast<std::size_t>(n_samples));
  rng.fill_normals(0, draws.size(), draws.data());
  int n_psi = std::min(n_samples, 8);  // psi_direct is a heavy double integral
  for (int i = 0; i < n_samples; ++i) {
    double u = std::abs(draws[static_cast<std::size_t>(i)]);
    double r = edge() * (u - std::floor(u));
    v.max_m_error = std::max(v.max_m_error, std::abs(m(r) - m_direct(r)));
    v.max_m_prime_error =
        std::max(v.max_m_prime_error, std::abs(m_prime(r) - m_prime_direct(r)));
    v.max_psi_prime_error =
        std::max(v.max_psi_prime_error, std::abs(psi_prime(r) - psi_prime_direct(r)));
    if (i < n_psi)
      v.max_psi_error = std::max(v.max_psi_error, std::abs(psi(r) - psi_direct(r)));
  }
  return v;
}

}  // namespace dspde
