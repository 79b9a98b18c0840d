#pragma once

// Explicit finite categories, functors and natural transformations.
//
// Objects and morphisms are interned names; internally everything is an
// index into the category's tables.  Composition is a stored table, so all
// laws can be checked exhaustively.

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "s4sem/error.hpp"

namespace s4sem {

class FinCat {
 public:
  struct Morphism {
    std::string name;
    int src = -1;
    int dst = -1;
  };

  int add_object(std::string name);
  int add_morphism(std::string name, int src, int dst);
  void set_identity(int object, int morphism);
  void set_composite(int g, int f, int gf);
  void erase_composite(int g, int f);
  /// Adds id∘f = f = f∘id for every morphism whose identities are set.
  void fill_identity_composites();

  int num_objects() const { return static_cast<int>(objects_.size()); }
  int num_morphisms() const { return static_cast<int>(morphisms_.size()); }
  const std::string& object_name(int o) const { return objects_.at(o); }
  const Morphism& morphism(int f) const { return morphisms_.at(f); }
  const std::string& morphism_name(int f) const { return morphisms_.at(f).name; }
  int src(int f) const { return morphisms_[f].src; }
  int dst(int f) const { return morphisms_[f].dst; }

  int object(std::string_view name) const;
  int morphism_id(std::string_view name) const;
  bool has_object(std::string_view name) const;

  /// -1 when unset.
  int identity(int object) const { return identity_.at(object); }
  /// g∘f, or -1 when the table has no entry.
  int compose(int g, int f) const { return compose_[g][f]; }
  bool is_identity(int f) const { return identity_[src(f)] == f; }

  std::vector<int> hom(int a, int b) const;
  std::vector<int> arrows_into(int b) const;
  std::vector<int> arrows_from(int a) const;

  bool operator==(const FinCat& other) const;

 private:
  std::vector<std::string> objects_;
  std::vector<Morphism> morphisms_;
  std::vector<int> identity_;
  std::vector<std::vector<int>> compose_;
  std::unordered_map<std::string, int> object_index_;
  std::unordered_map<std::string, int> morphism_index_;
};

using CatPtr = std::shared_ptr<const FinCat>;

/// Checks identities, totality of composition on composable pairs, typing of
/// composites, unit laws and associativity over all composable triples.
ValidationReport validate_category(const FinCat& c);

FinCat opposite(const FinCat& c);

// Small named categories used throughout the suite.
CatPtr terminal_category();          // 𝟙
CatPtr walking_arrow();              // 𝟚: a : 0 → 1
CatPtr chain_category(int n);        // 0 → 1 → ... → n-1, composites included
CatPtr discrete_category(int n);
/// Poset on `names` with order relation `leq(i, j)` (must be reflexive and
/// transitive); the morphism i→j is named "i<=j".
CatPtr poset_category(const std::vector<std::string>& names,
                      const std::vector<std::vector<bool>>& leq);
/// One-object category whose morphisms are `elements` with the given
/// multiplication table `mult[g][f] = g∘f`; element 0 is the identity.
CatPtr monoid_category(const std::vector<std::string>& elements,
                       const std::vector<std::vector<int>>& mult);

struct Functor {
  CatPtr source;
  CatPtr target;
  std::vector<int> on_objects;
  std::vector<int> on_morphisms;

  int obj(int o) const { return on_objects[o]; }
  int mor(int f) const { return on_morphisms[f]; }
  bool operator==(const Functor& other) const;
};

Functor identity_functor(CatPtr c);
Functor constant_functor(CatPtr source, CatPtr target, int object);
Functor compose(const Functor& g, const Functor& f);
bool is_identity_functor(const Functor& f);

struct NatTrans {
  Functor source;
  Functor target;
  std::vector<int> components;  // per source-category object
};

/// Throws Error(Shape) when the maps are not total; law violations are
/// reported.
ValidationReport validate_diagram(const Functor& f);
ValidationReport validate_diagram(const NatTrans& t);

/// The slice c/i: objects are morphisms into i, a morphism f → g is h with
/// g∘h = f.  `object_arrow[k]` is the morphism of c that slice object k
/// stands for; `morphism_arrow[m]` the underlying morphism of c.
struct Slice {
  CatPtr cat;
  Functor projection;
  int base_object = -1;
  std::vector<int> object_arrow;
  std::vector<int> morphism_arrow;
  std::vector<int> object_of_arrow;  // morphism of c -> slice object or -1

  int id_object() const;  // the object id_i
};

Slice slice(CatPtr c, int i);

struct DiscreteInclusion {
  CatPtr cat;
  Functor inclusion;
};

DiscreteInclusion discrete_subcategory(CatPtr c);

// Sieves are sorted morphism-id lists with a common target.
using Sieve = std::vector<int>;

bool is_sieve(const FinCat& c, int target, const Sieve& s);
Sieve maximal_sieve(const FinCat& c, int target);
Sieve pullback_sieve(const FinCat& c, const Sieve& s, int f);
/// All sieves on `target`, ordered by the bitmask of membership over
/// arrows_into(target).
std::vector<Sieve> all_sieves(const FinCat& c, int target);

struct Site {
  CatPtr cat;
  std::vector<std::vector<Sieve>> covers;  // per object
  /// When set, validation also demands that maximal sieves cover and that
  /// covers are stable under pullback.
  bool topology_mode = false;
};

ValidationReport validate_site(const Site& s);

/// The usual coverage of a poset of opens: a sieve on U covers iff the
/// union of the points of its members' domains is the set of points of U.
/// `points_of[U]` lists the points of the open U.
Site opens_site(CatPtr opens, const std::vector<std::vector<int>>& points_of);

std::string describe_sieve(const FinCat& c, const Sieve& s);

}  // namespace s4sem
