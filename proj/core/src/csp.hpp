#pragma once

// Lexicographic backtracking over finite-domain variables.  Every brute-force
// enumeration in the library (natural maps, presheaves, families, sections)
// is phrased as one of these.

#include <functional>
#include <string>
#include <vector>

#include "s4sem/error.hpp"

namespace s4sem::detail {

class Csp {
 public:
  using Assignment = std::vector<int>;
  using Check = std::function<bool(const Assignment&)>;

  int add_variable(int domain) {
    domain_.push_back(domain);
    fixed_.push_back(-1);
    checks_.emplace_back();
    return static_cast<int>(domain_.size()) - 1;
  }
  int size() const { return static_cast<int>(domain_.size()); }

  /// Restricts a variable to a single value.
  void fix(int var, int value) { fixed_[var] = value; }

  /// `check` may only read variables with index ≤ var; it runs right after
  /// var is assigned.
  void add_check(int var, Check check) { checks_[var].push_back(std::move(check)); }

  /// Visits solutions in lexicographic order; `visit` returns false to stop.
  /// Throws CeilingExceeded once more than ceiling.limit nodes are explored.
  void solve(const std::function<bool(const Assignment&)>& visit, const Ceiling& ceiling,
             const std::string& what) const {
    Assignment a(domain_.size(), 0);
    long long nodes = 0;
    bool stop = false;
    recurse(0, a, visit, ceiling, what, nodes, stop);
  }

 private:
  void recurse(std::size_t var, Assignment& a,
               const std::function<bool(const Assignment&)>& visit, const Ceiling& ceiling,
               const std::string& what, long long& nodes, bool& stop) const {
    if (var == domain_.size()) {
      if (!visit(a)) stop = true;
      return;
    }
    int lo = 0, hi = domain_[var];
    if (fixed_[var] >= 0) {
      lo = fixed_[var];
      hi = fixed_[var] < domain_[var] ? fixed_[var] + 1 : fixed_[var];
    }
    for (int v = lo; v < hi && !stop; ++v) {
      ceiling.check(++nodes, what);
      a[var] = v;
      bool ok = true;
      for (const auto& c : checks_[var])
        if (!c(a)) {
          ok = false;
          break;
        }
      if (ok) recurse(var + 1, a, visit, ceiling, what, nodes, stop);
    }
  }

  std::vector<int> domain_;
  std::vector<int> fixed_;
  std::vector<std::vector<Check>> checks_;
};

}  // namespace s4sem::detail
