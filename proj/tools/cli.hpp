#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "s4sem/model.hpp"

namespace s4sem::cli {

enum Exit { kOk = 0, kCheckFailed = 1, kMalformed = 2, kCeiling = 3 };

/// Parses argv (without the program name) and dispatches.  Text reports go
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

Ceiling ceiling_from_env(Ceiling fallback = {});

// The pipelines behind the subcommands, usable without the argument parser.

Verdict check_file(const std::string& path);
Verdict interpret_file(const std::string& path, const Model& m, int bound,
                       const Ceiling& ceiling = {});
/// hs_universe at `bound`, |U(I)| per object, the classifier, typing and
/// realignment checks over presheaves with values ≤ `contexts_bound`.
Verdict universe_report(const Model& m, int bound, int contexts_bound,
                        const Ceiling& ceiling = {});
/// Coalgebras with carriers ≤ bound, the comparison functor, the coalgebra
/// classifier at k = 1 and the Kock–Wraith classifier.
Verdict coalgebras_report(const Model& m, int bound, const Ceiling& ceiling = {});
/// The naive universe on the discrete two-point space at bound 1.
Verdict stack_failure_demo(const Ceiling& ceiling = {});
/// Presheaves on 0 → 1 against coalgebras of u*u_* for the points
/// u : {0, 1} → 2, compared up to isomorphism and on hom-sets.
Verdict sheaves_as_coalgebras_demo(int bound = 2, const Ceiling& ceiling = {});

}  // namespace s4sem::cli
