#pragma once

#include <stdexcept>
#include <string>

namespace slitflow {

// Exit-code taxonomy shared with the CLI: usage=2, precision=3, resource=4.

struct usage_error : std::runtime_error {
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when an enclosure cannot be refined enough to decide a comparison
// or pin an integer (floor, round, classification) within the configured
// depth budget.
struct precision_error : std::runtime_error {
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

struct resource_error : std::runtime_error {
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

// An orbit point landed inside the uncertainty band of the flip interval's
// boundary; carries the 1-based step index.
struct boundary_ambiguity_error : precision_error {
  boundary_ambiguity_error(const std::string& what, unsigned long long step)
      : precision_error(what), step_index(step) {}
  unsigned long long step_index;
};

}  // namespace slitflow
