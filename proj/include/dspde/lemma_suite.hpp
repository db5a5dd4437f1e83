#pragma once

#include <string>
#include <vector>

#include "dspde/potentials.hpp"

namespace dspde {

// One checked property of the regularized potential family. For inequalities
// with unspecified constants the suite reports the extremal ratio observed on
// the sample grid and asserts it is finite and positive; ratios whose
// numerator and denominator both vanish at r = 0 are taken over |r| >= 0.5,
// which the note records.
struct LemmaCheck {
  std::string item;      // "i", "ii", ... "ix"
  double exponent = 0;   // first family exponent
  double exponent2 = 0;  // second exponent for two-parameter items (0 if unused)
  double epsilon = 0;
  double stat_low = 0;   // item-specific: inf ratio / min slack / empirical K
  double stat_high = 0;  // sup ratio where applicable
  bool pass = false;
  std::string note;
};

struct LemmaSuiteConfig {
  std::vector<double> exponents = {1.0, 2.0, 3.0};
  std::vector<double> epsilons = {0.2, 0.05};
  int n_samples = 801;     // odd, so r = 0 is sampled
  double r_max = 3.0;      // beyond the barrier to exercise the extensions
  double inner_cut = 0.5;  // lower-ratio domain |r| >= inner_cut
};

std::vector<LemmaCheck> lemma_property_suite(const LemmaSuiteConfig& config);

bool all_pass(const std::vector<LemmaCheck>& checks);

}  // namespace dspde
