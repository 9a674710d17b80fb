#pragma once

#include <stdexcept>
#include <string>

namespace fsrl {

// Non-finite value detected inside the network or optimizer. Carries the
// name of the layer/tensor where the failure surfaced.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& where)
      : std::runtime_error("numerical failure in " + where), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

// Artifact self-check mismatch (summary vs event log, replayed outcomes).
class VerificationFailure : public std::runtime_error {
 public:
  explicit VerificationFailure(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace fsrl
