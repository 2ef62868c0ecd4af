// Error taxonomy shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace gibbsdyn {

// A spatial index (cell list) was queried against a configuration other than
// the one it was built from.
class StaleStructureError : public std::runtime_error {
 public:
  explicit StaleStructureError(const std::string& what) : std::runtime_error(what) {}
};

// An exact-enumeration operation was asked to enumerate past its guard size.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// A potential or drift was evaluated at a singular point (zero separation).
class SingularityError : public std::domain_error {
 public:
  explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

// A pairwise term inside the hard core produced an infinite energy where a
// finite value is required.
class CoreOverlapError : public std::domain_error {
 public:
  explicit CoreOverlapError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace gibbsdyn
