#pragma once

// Finite-set-valued presheaves over a FinCat.
//
// Every carrier is canonical, {0, ..., n-1}.  Constructions that build new
// sets (products, pullbacks, exponentials, Kan extensions, sieve sets)
// enumerate their elements in a fixed lexicographic order, so two runs of the
// same construction produce identical data and strict functoriality holds on
// the nose.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "s4sem/fincat.hpp"

namespace s4sem {

struct Presheaf {
  CatPtr base;
  std::vector<int> sizes;                  // per object
  std::vector<std::vector<int>> action;    // f : I → J gives P(J) → P(I)

  int size(int object) const { return sizes[object]; }
  int act(int f, int x) const { return action[f][x]; }
  long long total() const;
  bool operator==(const Presheaf& other) const;
  bool operator<(const Presheaf& other) const;
};

using PresheafPtr = std::shared_ptr<const Presheaf>;

inline PresheafPtr share(Presheaf p) {
  return std::make_shared<const Presheaf>(std::move(p));
}

ValidationReport validate_presheaf(const Presheaf& p);

struct PresheafMap {
  PresheafPtr source;
  PresheafPtr target;
  std::vector<std::vector<int>> components;  // per object, P(I) → Q(I)

  int operator()(int object, int x) const { return components[object][x]; }
  bool operator==(const PresheafMap& other) const;
};

ValidationReport validate_map(const PresheafMap& m);

PresheafMap identity_map(const PresheafPtr& p);
PresheafMap compose(const PresheafMap& g, const PresheafMap& f);
bool is_mono(const PresheafMap& m);
bool is_iso(const PresheafMap& m);
PresheafMap inverse(const PresheafMap& iso);

Presheaf terminal_presheaf(CatPtr c);
Presheaf empty_presheaf(CatPtr c);
/// The unique map into the terminal presheaf.
PresheafMap to_terminal(const PresheafPtr& p);

/// yI: value at J is hom(J, I) in morphism-id order, acting by
/// precomposition.
Presheaf yoneda(CatPtr c, int i);
/// Position of the arrow f : J → I inside yI(J).
int yoneda_index(const FinCat& c, int i, int f);
/// The natural map yI → P classifying x ∈ P(I).
PresheafMap yoneda_map(const PresheafPtr& yI, int i, const PresheafPtr& p, int x);

/// Calls `visit` with every natural map P → Q in lexicographic order of
/// component tables; `visit` returns false to stop.
void for_each_map(const PresheafPtr& p, const PresheafPtr& q,
                  const std::function<bool(const PresheafMap&)>& visit,
                  const Ceiling& ceiling = {});
std::vector<PresheafMap> enumerate_maps(const PresheafPtr& p, const PresheafPtr& q,
                                        const Ceiling& ceiling = {});
long long count_maps(const PresheafPtr& p, const PresheafPtr& q,
                     const Ceiling& ceiling = {});
std::optional<PresheafMap> find_isomorphism(const PresheafPtr& p, const PresheafPtr& q);

/// All presheaves on c with |P(I)| ≤ max_size[I], canonical order: size
/// vectors lexicographically, then actions by morphism id.
std::vector<Presheaf> enumerate_presheaves(CatPtr c, const std::vector<int>& max_size,
                                           const Ceiling& ceiling = {});
std::vector<Presheaf> enumerate_presheaves(CatPtr c, int max_size,
                                           const Ceiling& ceiling = {});

struct Product {
  PresheafPtr object;
  PresheafMap fst;
  PresheafMap snd;

  /// Index of (x, y) at `object`; elements are ordered x-major.
  int pair(int o, int x, int y) const { return x * snd.target->size(o) + y; }
  PresheafMap pairing(const PresheafMap& f, const PresheafMap& g) const;
};

Product product(const PresheafPtr& p, const PresheafPtr& q);

/// Elements are pairs (x, y) with f(x) = g(y), ordered x-major.
struct Pullback {
  PresheafPtr object;
  PresheafMap fst;   // to f.source
  PresheafMap snd;   // to g.source
  std::vector<std::map<std::pair<int, int>, int>> index;

  int pair(int o, int x, int y) const;
  PresheafMap pairing(const PresheafMap& a, const PresheafMap& b) const;
};

Pullback pullback(const PresheafMap& f, const PresheafMap& g);

/// Q^P with Q^P(I) = Nat(yI × P, Q).
struct Exponential {
  PresheafPtr object;
  PresheafPtr exponent;  // P
  PresheafPtr codomain;  // Q
  Product with_exponent; // Q^P × P
  PresheafMap eval;      // Q^P × P → Q
  std::vector<std::vector<PresheafMap>> elements;  // [I][k] : yI × P → Q

  /// h : R × P → Q (given with its product) ↦ R → Q^P.
  PresheafMap curry(const Product& r_times_p, const PresheafMap& h) const;
  int index_of(int object, const PresheafMap& element) const;

  std::vector<std::map<std::vector<std::vector<int>>, int>> lookup;
  std::vector<PresheafPtr> representables;
  std::vector<Product> yi_times_p;
};

Exponential exponential(const PresheafPtr& p, const PresheafPtr& q,
                        const Ceiling& ceiling = {});

using Subpresheaf = std::vector<std::vector<bool>>;  // membership per object

bool is_subpresheaf(const Presheaf& p, const Subpresheaf& s);
std::vector<Subpresheaf> enumerate_subpresheaves(const Presheaf& p,
                                                 const Ceiling& ceiling = {});
/// Renumbered sub-presheaf together with its inclusion.
PresheafMap inclusion(const PresheafPtr& p, const Subpresheaf& s);
Subpresheaf image(const PresheafMap& m);

struct SubobjectClassifier {
  PresheafPtr omega;
  PresheafMap top;                          // 1 → Ω
  std::vector<std::vector<Sieve>> sieves;   // element k of Ω(I) is sieves[I][k]

  int index_of(int object, const Sieve& s) const;
  PresheafMap characteristic(const PresheafPtr& p, const Subpresheaf& s) const;
  Subpresheaf classified(const PresheafMap& chi) const;
};

SubobjectClassifier subobject_classifier(CatPtr c);

struct Elements {
  CatPtr cat;
  Functor projection;
  std::vector<std::pair<int, int>> element;   // object of ∫P -> (I, x)
  std::vector<std::vector<int>> object_of;    // [I][x] -> object of ∫P
};

/// ∫P: objects (I, x), a morphism (J, y) → (I, x) is f : J → I with
/// P(f)(x) = y.
Elements category_of_elements(const Presheaf& p);
/// The morphism of ∫P over f ending at (I, x).
int elements_morphism(const Elements& e, const Presheaf& p, int f, int x);

/// Restriction u* and right Kan extension u_* along u : A → C, with unit and
/// counit.  u_*Q(I) is the set of families (x_(J,f)) over slots
/// f : u(J) → I, natural in J, ordered lexicographically over the slots.
class KanAdjunction {
 public:
  explicit KanAdjunction(Functor u, Ceiling ceiling = {});

  const Functor& functor() const { return u_; }
  CatPtr small() const { return u_.source; }
  CatPtr large() const { return u_.target; }
  bool is_identity() const { return identity_; }

  PresheafPtr restrict(const PresheafPtr& p) const;
  PresheafMap restrict(const PresheafMap& m) const;
  PresheafPtr extend(const PresheafPtr& q) const;
  PresheafMap extend(const PresheafMap& m) const;
  PresheafMap unit(const PresheafPtr& p) const;     // P → u_* u* P
  PresheafMap counit(const PresheafPtr& q) const;   // u* u_* Q → Q

  struct Slot {
    int object;   // J in A
    int arrow;    // f : u(J) → I in C
  };
  const std::vector<Slot>& slots(int i) const { return slots_[i]; }
  /// The family stored at element x of u_*Q(I).
  const std::vector<int>& family(const PresheafPtr& q, int i, int x) const;
  int family_index(const PresheafPtr& q, int i, const std::vector<int>& fam) const;

 private:
  struct Extension {
    PresheafPtr object;
    std::vector<std::vector<std::vector<int>>> families;
    std::vector<std::map<std::vector<int>, int>> index;
  };
  const Extension& extension(const PresheafPtr& q) const;
  Extension build_extension(const PresheafPtr& q) const;

  Functor u_;
  Ceiling ceiling_;
  bool identity_ = false;
  std::vector<std::vector<Slot>> slots_;
  mutable std::mutex mutex_;
  mutable std::map<Presheaf, std::shared_ptr<const Extension>> cache_;
};

struct SheafWitness {
  enum class Failure { Existence, Uniqueness };
  int object = -1;
  Sieve cover;
  std::vector<int> family;     // one element per member of the cover
  Failure failure = Failure::Uniqueness;
  int amalgamations = 0;
};

struct SheafVerdict {
  bool is_sheaf = true;
  std::vector<SheafWitness> failures;
};

/// For every cover, every matching family must have exactly one
/// amalgamation.  With `all_failures` unset, stops at the first witness.
SheafVerdict sheaf_check(const Site& site, const Presheaf& p, bool all_failures = false,
                         const Ceiling& ceiling = {});
std::string describe(const Site& site, const SheafWitness& w);

/// Matching families of p over the sieve `cover` on `object`.
std::vector<std::vector<int>> matching_families(const Presheaf& p, int object,
                                                const Sieve& cover,
                                                const Ceiling& ceiling = {});

struct ElementsSite {
  Elements elements;
  Site site;
};

/// The coverage on ∫S whose covers of (I, e) are the sieves induced by
/// matching families amalgamating to e.  Rejects non-sheaves.
ElementsSite elements_coverage(const Site& site, const PresheafPtr& sheaf);

std::string describe(const Presheaf& p);

}  // namespace s4sem
