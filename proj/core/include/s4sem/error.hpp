#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace s4sem {

enum class ErrorKind {
  Shape,            // maps not total / wrong arity
  UnknownId,        // object, morphism or name lookup failed
  ContextMismatch,  // operands live over different contexts or bases
  NotDisplay,       // fiber bound violated where a display map is required
  CeilingExceeded,  // enumeration would exceed the configured ceiling
  Rejected,         // precondition of a construction failed
  Malformed,        // input file or text could not be read
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// One violated law together with the tuple that witnesses it.
struct Violation {
  std::string law;
  std::string witness;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string law, std::string witness) {
    violations.push_back({std::move(law), std::move(witness)});
  }
  void append(const ValidationReport& other, const std::string& prefix = {}) {
    for (const auto& v : other.violations)
      violations.push_back({prefix + v.law, v.witness});
  }
  bool mentions(const std::string& fragment) const {
    for (const auto& v : violations)
      if (v.law.find(fragment) != std::string::npos) return true;
    return false;
  }
};

/// Enumeration guard shared by every brute-force construction.
struct Ceiling {
  long long limit = 2'000'000;

  void check(long long n, const std::string& what) const {
    if (n > limit)
      throw Error(ErrorKind::CeilingExceeded,
                  what + ": " + std::to_string(n) + " exceeds ceiling " +
                      std::to_string(limit));
  }
};

}  // namespace s4sem
