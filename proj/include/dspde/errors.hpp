#pragma once

#include <stdexcept>
#include <string>

namespace dspde {

// Bad user-supplied parameters or config files.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A state left the domain on which a singular operator is defined.
class FeasibilityError : public std::runtime_error {
public:
  FeasibilityError(const std::string& what, double barrier_gap)
      : std::runtime_error(what), barrier_gap_(barrier_gap) {}
  // min over grid nodes of 1 - |x|; negative when the barrier was crossed
  double barrier_gap() const { return barrier_gap_; }

private:
  double barrier_gap_;
};

// Divergence inside an iteration (Newton, power iteration, NaN in a state).
class NumericsError : public std::runtime_error {
public:
  explicit NumericsError(const std::string& what, std::uint64_t step = 0)
      : std::runtime_error(what), step_(step) {}
  std::uint64_t step() const { return step_; }

private:
  std::uint64_t step_;
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dspde
