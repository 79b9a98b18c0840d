#pragma once

// The presheaf natural model: dependent types over a presheaf context,
// comprehension, Σ and Π, display maps, and the bounded Hofmann–Streicher
// universe.
//
// A type over Γ is a presheaf on ∫Γ stored fiberwise: fiber[I][γ] is the
// size of A(I, γ), and restrict[f][γ] for f : J → I, γ ∈ Γ(I) is the
// function A(I, γ) → A(J, γ·f).

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "s4sem/presheaf.hpp"

namespace s4sem {

struct NaturalModelInstance {
  CatPtr base;
  int bound = 1;  // display maps have fibers of size ≤ bound
  Ceiling ceiling;
};

struct TypeOverContext {
  PresheafPtr context;
  std::vector<std::vector<int>> fiber;
  std::vector<std::vector<std::vector<int>>> restrict;

  int size(int object, int g) const { return fiber[object][g]; }
  int act(int f, int g, int a) const { return restrict[f][g][a]; }
  int max_fiber() const;
  bool operator==(const TypeOverContext& other) const;
};

using TypePtr = std::shared_ptr<const TypeOverContext>;

inline TypePtr share(TypeOverContext a) {
  return std::make_shared<const TypeOverContext>(std::move(a));
}

struct TermOverContext {
  TypePtr type;
  std::vector<std::vector<int>> pick;  // [I][γ]

  bool operator==(const TermOverContext& other) const;
};

/// Fiberwise function between types over the same context.
struct TypeMap {
  TypePtr source;
  TypePtr target;
  std::vector<std::vector<std::vector<int>>> fn;  // [I][γ][a]

  int operator()(int object, int g, int a) const { return fn[object][g][a]; }
  bool operator==(const TypeMap& other) const;
};

/// Type map tables as one self-delimiting vector, for comparing as data.
std::vector<int> flatten(const TypeMap& m);
std::vector<std::vector<std::vector<int>>> unflatten(const std::vector<int>& flat);

ValidationReport validate_type(const TypeOverContext& a);
ValidationReport validate_term(const TermOverContext& t);
ValidationReport validate_type_map(const TypeMap& m);

/// The type whose fibers are all singletons.
TypePtr unit_type(const PresheafPtr& context);
/// A type that does not depend on the context: every fiber is Q(I).
TypePtr constant_type(const PresheafPtr& context, const PresheafPtr& q);
TypeMap identity_type_map(const TypePtr& a);
TypeMap compose(const TypeMap& g, const TypeMap& f);
bool is_iso(const TypeMap& m);
TypeMap inverse(const TypeMap& iso);

// Types over Γ as presheaves on ∫Γ and back.
Presheaf type_as_presheaf(const TypeOverContext& a, const Elements& el);
TypePtr presheaf_as_type(const PresheafPtr& context, const Elements& el, const Presheaf& p);
PresheafMap type_map_as_presheaf_map(const TypeMap& m, const Elements& el,
                                     const PresheafPtr& src, const PresheafPtr& dst);

/// All types over Γ with fibers of size ≤ max_fiber, in the canonical order
/// of presheaves on ∫Γ.
std::vector<TypePtr> enumerate_types(const PresheafPtr& context, int max_fiber,
                                     const Ceiling& ceiling = {});
void for_each_type_map(const TypePtr& a, const TypePtr& b,
                       const std::function<bool(const TypeMap&)>& visit,
                       const Ceiling& ceiling = {});
std::vector<TypeMap> enumerate_type_maps(const TypePtr& a, const TypePtr& b,
                                         const Ceiling& ceiling = {});
std::vector<TermOverContext> enumerate_terms(const TypePtr& a, const Ceiling& ceiling = {});

TypePtr subst(const TypePtr& a, const PresheafMap& alpha);
TermOverContext subst(const TermOverContext& t, const PresheafMap& alpha);
TypeMap subst(const TypeMap& m, const PresheafMap& alpha);

/// Γ.A with p_A and the generic term v_A : A[p_A].  Element (γ, a) of
/// Γ.A(I) has index offset[I][γ] + a.
struct Comprehension {
  TypePtr type;
  PresheafPtr object;
  PresheafMap proj;
  TermOverContext generic;
  std::vector<std::vector<int>> offset;
  std::vector<std::vector<std::pair<int, int>>> pairs;  // [I][e] -> (γ, a)

  int index(int object, int g, int a) const { return offset[object][g] + a; }
  std::pair<int, int> element(int object, int e) const { return pairs[object][e]; }
};

Comprehension comprehension(const TypePtr& a);
/// The same without the generic term, whose type alone has Σ|A(γ)|² entries.
Comprehension comprehension_shape(const TypePtr& a);

/// q(A, α) : Δ.A[α] → Γ.A.
PresheafMap q_map(const TypePtr& a, const PresheafMap& alpha);
/// ā : Γ → Γ.A.
PresheafMap bar(const TermOverContext& t);
/// The term of A read off a section s : Γ → Γ.A of p_A.
TermOverContext section_term(const TypePtr& a, const PresheafMap& s);
/// Applies a type map to a term.
TermOverContext apply(const TypeMap& m, const TermOverContext& t);
/// The map Γ.A → Γ.B over Γ induced by a type map.
PresheafMap comprehension_map(const TypeMap& m);

/// True iff every fiber of f has at most `bound` elements.
bool is_display(const NaturalModelInstance& m, const PresheafMap& f);
/// The type of fibers of f: A(I, γ) = f_I⁻¹(γ), ordered by index in E(I).
TypePtr fiber_type(const PresheafMap& f);
/// The canonical isomorphism E ≅ Γ.fiber_type(f) over Γ.
PresheafMap fiber_iso(const PresheafMap& f);

/// Σ A B for B over Γ.A; fiber elements (a, b) ordered lexicographically.
struct SigmaType {
  TypePtr type;
  TypePtr first;
  TypePtr second;
  std::vector<std::vector<std::vector<std::pair<int, int>>>> pairs;  // [I][γ][k]
  std::vector<std::vector<std::map<std::pair<int, int>, int>>> index;
};

SigmaType sigma_type(const TypePtr& a, const TypePtr& b);
/// The isomorphism Γ.A.B ≅ Γ.ΣAB over Γ.
PresheafMap sigma_iso(const SigmaType& s);

/// Π A B by dependent families.  An element of the fiber at (I, γ) assigns
/// to every slot (f : J → I, a ∈ A(J, γ·f)) a value in B(J, (γ·f, a)).
struct PiType {
  struct Slot {
    int object;  // J
    int arrow;   // f : J → I
    int a;
  };
  TypePtr type;
  TypePtr domain;
  TypePtr codomain;
  std::vector<std::vector<std::vector<Slot>>> slots;                 // [I][γ]
  std::vector<std::vector<std::vector<std::vector<int>>>> families;  // [I][γ][k]
  std::vector<std::vector<std::map<std::vector<int>, int>>> index;

  int slot_of(int object, int g, int arrow, int a) const;
  /// Application of the k-th family at (I, γ) to a ∈ A(I, γ).
  int apply(int object, int g, int k, int a) const;
};

PiType pi_type(const TypePtr& a, const TypePtr& b, const Ceiling& ceiling = {});
/// ev : (Π A B)[p_A] → B over Γ.A.
TypeMap pi_eval(const PiType& pi);
/// λ : for h : R[p_A] → B over Γ.A, the transpose R → Π A B.
TypeMap pi_lambda(const PiType& pi, const TypePtr& r, const TypeMap& h);

/// The bounded Hofmann–Streicher universe.  U(I) lists the presheaves on
/// C/I with values of size ≤ bound.
struct HSUniverse {
  NaturalModelInstance model;
  std::vector<Slice> slices;
  std::vector<std::vector<Presheaf>> codes;       // [I][k]
  std::vector<std::map<Presheaf, int>> code_index;
  PresheafPtr U;
  PresheafPtr Upt;
  PresheafMap proj;

  int index_of(int object, const Presheaf& code) const;
  const Presheaf& code(int object, int k) const { return codes[object][k]; }
  /// Precomposition of a presheaf on C/I with C/J → C/I, g ↦ f∘g.
  Presheaf restrict_code(int f, const Presheaf& code) const;
};

HSUniverse hs_universe(const NaturalModelInstance& m);

/// x ∘ Σ_f for x a presheaf on `upper` = c/I and f : J → I, giving a presheaf
/// on `lower` = c/J.
Presheaf restrict_along(const Slice& upper, const Slice& lower, int f, const Presheaf& x);
/// The morphism of the slice from object `from` to `to` over `arrow`, or -1.
int slice_morphism(const Slice& s, int from, int to, int arrow);

TypePtr decode(const HSUniverse& u, const PresheafMap& code);
/// Strictifies a display map into a code; throws NotDisplay beyond the bound.
PresheafMap encode(const HSUniverse& u, const PresheafMap& display);
PresheafMap encode_type(const HSUniverse& u, const TypePtr& a);

/// The internal category 𝒰 of the universe: Mor(I) lists triples (X, Y, φ)
/// of codes at I and natural maps φ : X → Y on C/I, ordered by (X, Y) and
/// then by φ in enumeration order.
struct UniverseCategory {
  struct Arrow {
    int from;
    int to;
    std::vector<std::vector<int>> components;
  };
  const HSUniverse* universe = nullptr;
  PresheafPtr mor;
  std::vector<std::vector<Arrow>> arrows;  // [I][k]
  std::vector<std::map<std::tuple<int, int, std::vector<std::vector<int>>>, int>> arrow_index;
  PresheafMap src;   // Mor → U
  PresheafMap tgt;   // Mor → U
  PresheafMap ident; // U → Mor
  Pullback composable;  // pairs (g, f) with src g = tgt f
  PresheafMap comp;     // composable → Mor, (g, f) ↦ g∘f

  int index_of(int object, const Arrow& a) const;
};

UniverseCategory universe_category(const HSUniverse& u);
/// The type map decode(src∘μ) → decode(tgt∘μ) named by μ : Γ → Mor.
TypeMap decode_map(const UniverseCategory& cat, const PresheafMap& mu);
PresheafMap encode_map(const UniverseCategory& cat, const TypeMap& m);

struct Verdict {
  bool ok = true;
  std::vector<std::string> notes;     // informational lines
  std::vector<std::string> failures;  // witnesses

  void fail(std::string w) {
    ok = false;
    failures.push_back(std::move(w));
  }
  void note(std::string n) { notes.push_back(std::move(n)); }
  void merge(const Verdict& other, const std::string& prefix = {});
};

/// Essential surjectivity and full faithfulness of A ↦ p_A onto bounded
/// display maps over each context.
Verdict typing_check(const NaturalModelInstance& m, const std::vector<PresheafPtr>& contexts);
/// U(I) ≅ Tp(yI) naturally in I.
Verdict classifier_check(const HSUniverse& u);
/// Full enumeration over monos Δ ↪ Γ between the given contexts.
Verdict realignment_check(const HSUniverse& u, const std::vector<PresheafPtr>& contexts);
Verdict display_topos_check(const NaturalModelInstance& m);

/// The data realignment quantifies over, abstracted so the same brute force
/// runs against any universe that decodes strictly into types.  Isomorphisms
/// are flattened tables, compared as data.
struct RealignmentProblem {
  using Iso = std::vector<int>;
  struct Mono {
    int from;
    int to;
    std::string name;
  };
  std::vector<std::string> contexts;
  std::vector<Mono> monos;
  std::function<int(int context)> num_codes;
  /// B ↦ B∘m, a code on m.to to a code on m.from.
  std::function<int(const Mono&, int code)> restrict_code;
  /// Isomorphisms decode(x) ≅ decode(y) over a context.
  std::function<std::vector<Iso>(int context, int x, int y)> isos;
  std::function<Iso(const Mono&, const Iso&)> restrict_iso;
};

Verdict realignment_search(const RealignmentProblem& p, const Ceiling& ceiling = {});

/// The naive universe 𝔘(V) = labelled sheaves on the opens below V, values
/// drawn as subsets of the atom pool {0..bound}.  Elements are pairs
/// (canonical sheaf, atom labels per open).
struct NaiveUniverse {
  struct Entry {
    Presheaf sheaf;                        // on the slice below V
    std::vector<std::vector<int>> labels;  // per slice object, sorted atoms
    bool operator<(const Entry& o) const {
      return std::tie(sheaf, labels) < std::tie(o.sheaf, o.labels);
    }
    bool operator==(const Entry& o) const { return sheaf == o.sheaf && labels == o.labels; }
  };
  Site site;
  std::vector<Slice> slices;
  std::vector<Site> local_sites;               // site on each slice
  std::vector<std::vector<Entry>> entries;     // [V][k]
  PresheafPtr presheaf;

  std::string describe_entry(int open, int k) const;
};

NaiveUniverse naive_sheaf_universe(const Site& site, int bound, const Ceiling& ceiling = {});
/// The site on the slice c/I whose covers are those of the base site.
Site slice_site(const Site& site, const Slice& s);

}  // namespace s4sem
