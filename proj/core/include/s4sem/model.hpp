#pragma once

// Model files: one JSON document describing a finite base category together
// with optional named presheaves, a site, a comonad and the size bound k.
//
//   {"category": {"objects": [...], "morphisms": [{"name","src","dst"}],
//                 "identities": {"obj": "morphism"},
//                 "composition": [["g","f","gf"], ...]},
//    "presheaves": {"P": {"sizes": {"obj": n}, "actions": {"f": [...]}}},
//    "site": {"covers": {"obj": [["f", ...], ...]}, "topology": false}
//          | {"points": {"obj": [point, ...]}},
//    "comonad": {"from_points": true} | {"identity": true}
//             | {"explicit": {"category": {...}, "objects": {..}, "morphisms": {..}}},
//    "bound": k}
//
// Composites with an identity may be omitted.  Identity actions may be
// omitted from presheaves.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "s4sem/coalg.hpp"

namespace s4sem {

struct ComonadSpec {
  enum class Kind { Identity, FromPoints, Explicit };
  Kind kind = Kind::Identity;
  // Explicit: the functor u from `small` into the base, □ = u*u_*.
  CatPtr small;
  std::vector<int> on_objects;
  std::vector<int> on_morphisms;
};

struct Model {
  std::string name;
  CatPtr cat;
  std::vector<std::pair<std::string, PresheafPtr>> presheaves;
  std::optional<Site> site;
  std::optional<ComonadSpec> comonad;
  int bound = 1;
};

/// Throws Error(Malformed) on anything that does not describe tables of the
/// right shape.  Law violations are left for `model_laws`.
Model parse_model(const std::string& text, const std::string& name = "model");
Model load_model(const std::string& path);

std::shared_ptr<const KanAdjunction> model_adjunction(const Model& m);
ComonadPtr model_comonad(const Model& m);

/// Every presheaf on the base with values of size ≤ bound.
std::vector<PresheafPtr> bounded_presheaves(const CatPtr& c, int bound,
                                            const Ceiling& ceiling = {});

/// Category laws, opposite involution and slices; then, over the named
/// presheaves and every presheaf with values ≤ bound: functoriality, the
/// Yoneda count, the category of elements, Sub(P) ≅ Nat(P, Ω), product and
/// exponential adjunctions; the site axioms; the comonad laws.
Verdict model_laws(const Model& m, const Ceiling& ceiling = {});

}  // namespace s4sem
