#include <doctest.h>

#include <cmath>
#include <set>

#include "dspde/lemma_suite.hpp"

using namespace dspde;

TEST_CASE("property suite passes on the documented grid") {
  LemmaSuiteConfig cfg;  // exponents {1,2,3}, epsilons {0.2, 0.05}
  cfg.n_samples = 401;   // lighter grid for the unit run
  auto checks = lemma_property_suite(cfg);
  CHECK(all_pass(checks));

  std::set<std::string> items;
  for (const auto& c : checks) {
    items.insert(c.item);
    CHECK(std::isfinite(c.stat_low));
    CHECK(std::isfinite(c.stat_high));
    if (!c.pass) {
      // aid debugging: doctest prints the captured values on failure
      CAPTURE(c.item);
      CAPTURE(c.exponent);
      CAPTURE(c.exponent2);
      CAPTURE(c.epsilon);
      CAPTURE(c.note);
      CHECK(c.pass);
    }
  }
  // every item family is represented
  for (const char* it : {"i", "ii", "iii", "iv", "v", "viii", "ix"})
    CHECK(items.count(it) == 1);
}

TEST_CASE("empirical constants are positive where claimed") {
  LemmaSuiteConfig cfg;
  cfg.exponents = {2.0, 3.0};
  cfg.epsilons = {0.2};
  cfg.n_samples = 201;
  auto checks = lemma_property_suite(cfg);
  for (const auto& c : checks) {
    if (c.item == "iv" || c.item == "v") {
      CHECK(c.stat_low > 0.0);
      CHECK(std::isfinite(c.stat_high));
    }
    if (c.item == "ix") {
      CHECK(c.stat_low > 0.0);  // the empirical coupling constant K
    }
  }
}
