#pragma once

#include <stdexcept>
#include <string>

namespace maxnorm {

// Bad dimensions, non-finite values, malformed files or configs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The objective became non-finite while iterating.
class Divergence : public std::runtime_error {
 public:
  Divergence(const std::string& what, long iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  long iteration() const noexcept { return iteration_; }

 private:
  long iteration_;
};

}  // namespace maxnorm
