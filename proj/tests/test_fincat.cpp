#include <doctest.h>

#include "s4sem/fincat.hpp"

using namespace s4sem;

namespace {

// 0 → 1 → 2 → 3 with every composite, plus a second arrow 0 → 3 that the
// doctored table uses for c∘(b∘a).
FinCat chain_with_spare_arrow() {
  FinCat c;
  for (const char* o : {"0", "1", "2", "3"}) c.add_object(o);
  for (int o = 0; o < 4; ++o) c.set_identity(o, c.add_morphism("id" + std::to_string(o), o, o));
  int a = c.add_morphism("a", 0, 1), b = c.add_morphism("b", 1, 2), cc = c.add_morphism("c", 2, 3);
  int ba = c.add_morphism("ba", 0, 2), cb = c.add_morphism("cb", 1, 3);
  int cba = c.add_morphism("cba", 0, 3);
  c.add_morphism("x", 0, 3);
  c.fill_identity_composites();
  c.set_composite(b, a, ba);
  c.set_composite(cc, b, cb);
  c.set_composite(cc, ba, cba);
  c.set_composite(cb, a, cba);
  return c;
}

std::vector<CatPtr> suite() {
  return {terminal_category(), walking_arrow(), chain_category(3), discrete_category(2),
          monoid_category({"1", "e"}, {{0, 1}, {1, 1}})};
}

}  // namespace

TEST_SUITE("fincat") {
  TEST_CASE("walking arrow is valid and its table is forced") {
    auto two = walking_arrow();
    CHECK(validate_category(*two).ok());
    int a = two->morphism_id("a");
    CHECK(two->compose(a, two->identity(0)) == a);
    CHECK(two->compose(two->identity(1), a) == a);
    CHECK(two->compose(a, a) == -1);
  }

  TEST_CASE("deleting a composite is reported") {
    FinCat c = *walking_arrow();
    c.erase_composite(c.morphism_id("a"), c.morphism_id("id0"));
    auto r = validate_category(c);
    REQUIRE(!r.ok());
    CHECK(r.violations[0].law == "missing composite");
    CHECK(r.violations[0].witness == "(a,id0)");
  }

  TEST_CASE("redirected composite breaks associativity") {
    FinCat c = chain_with_spare_arrow();
    CHECK(validate_category(c).ok());
    c.set_composite(c.morphism_id("c"), c.morphism_id("ba"), c.morphism_id("x"));
    auto r = validate_category(c);
    REQUIRE(r.mentions("associativity"));
    bool found = false;
    for (const auto& v : r.violations)
      if (v.law == "associativity at (h,g,f)" && v.witness == "(c,b,a)") found = true;
    CHECK(found);
  }

  TEST_CASE("suite categories satisfy every law") {
    for (const auto& c : suite()) CHECK(validate_category(*c).ok());
  }

  TEST_CASE("opposite is an involution on the nose") {
    for (const auto& c : suite()) {
      FinCat op = opposite(*c);
      CHECK(validate_category(op).ok());
      CHECK(opposite(op) == *c);
    }
    FinCat op2 = opposite(*walking_arrow());
    int a = op2.morphism_id("a");
    CHECK(op2.src(a) == 1);
    CHECK(op2.dst(a) == 0);
    CHECK(opposite(*discrete_category(3)) == *discrete_category(3));
  }

  TEST_CASE("functor validation") {
    auto two = walking_arrow();
    CHECK(validate_diagram(identity_functor(two)).ok());
    CHECK(validate_diagram(constant_functor(two, two, 1)).ok());
    Functor bad = identity_functor(two);
    bad.on_morphisms[two->morphism_id("a")] = two->identity(0);
    auto r = validate_diagram(bad);
    CHECK(!r.ok());
    CHECK((r.mentions("source/target mismatch") || r.mentions("composition not preserved")));
    Functor partial = identity_functor(two);
    partial.on_morphisms.pop_back();
    CHECK_THROWS_AS(validate_diagram(partial), Error);
  }

  TEST_CASE("natural transformations") {
    auto two = walking_arrow();
    Functor c0 = constant_functor(two, two, 0), c1 = constant_functor(two, two, 1);
    NatTrans t{c0, c1, {two->morphism_id("a"), two->morphism_id("a")}};
    CHECK(validate_diagram(t).ok());
    NatTrans into{identity_functor(two), c1, {two->morphism_id("a"), two->identity(1)}};
    CHECK(validate_diagram(into).ok());
    NatTrans wrong{c0, identity_functor(two), {two->identity(0), two->identity(0)}};
    CHECK(!validate_diagram(wrong).ok());
  }

  TEST_CASE("slices of the walking arrow") {
    auto two = walking_arrow();
    Slice over1 = slice(two, 1);
    CHECK(validate_category(*over1.cat).ok());
    CHECK(over1.cat->num_objects() == 2);
    CHECK(over1.cat->num_morphisms() == 3);  // two identities and a → id1
    int a_obj = over1.object_of_arrow[two->morphism_id("a")];
    CHECK(over1.cat->hom(a_obj, over1.id_object()).size() == 1);
    CHECK(validate_diagram(over1.projection).ok());
    Slice over0 = slice(two, 0);
    CHECK(over0.cat->num_objects() == 1);
    CHECK(over0.cat->num_morphisms() == 1);
    Slice one = slice(terminal_category(), 0);
    CHECK(one.cat->num_objects() == 1);
    CHECK_THROWS_AS(slice(two, 5), Error);
  }

  TEST_CASE("slices of every suite category are categories") {
    for (const auto& c : suite())
      for (int i = 0; i < c->num_objects(); ++i) {
        Slice s = slice(c, i);
        CHECK(validate_category(*s.cat).ok());
        CHECK(validate_diagram(s.projection).ok());
        // objects are the arrows into i, counted directly
        CHECK(s.cat->num_objects() == static_cast<int>(c->arrows_into(i).size()));
      }
  }

  TEST_CASE("discrete subcategory") {
    for (const auto& c : suite()) {
      auto d = discrete_subcategory(c);
      CHECK(d.cat->num_morphisms() == c->num_objects());
      CHECK(validate_diagram(d.inclusion).ok());
      CHECK(validate_category(*d.cat).ok());
    }
    auto d = discrete_subcategory(discrete_category(2));
    CHECK(*d.cat == *discrete_category(2));
  }

  TEST_CASE("sieves on the walking arrow") {
    auto two = walking_arrow();
    CHECK(all_sieves(*two, 0).size() == 2);
    CHECK(all_sieves(*two, 1).size() == 3);
    for (const auto& s : all_sieves(*two, 1)) CHECK(is_sieve(*two, 1, s));
    CHECK(!is_sieve(*two, 1, {two->identity(1)}));
    Sieve just_a{two->morphism_id("a")};
    CHECK(pullback_sieve(*two, just_a, two->morphism_id("a")) == maximal_sieve(*two, 0));
  }

  TEST_CASE("opens of the Sierpinski space") {
    // opens ∅ ⊆ {1} ⊆ {0,1}
    auto opens = chain_category(3);
    Site s = opens_site(opens, {{}, {1}, {0, 1}});
    CHECK(validate_site(s).ok());
    CHECK(s.covers[0].size() == 2);  // the empty sieve and the maximal one
    for (int u = 0; u < 3; ++u) {
      bool has_max = false;
      for (const auto& r : s.covers[u]) has_max |= r == maximal_sieve(*opens, u);
      CHECK(has_max);
    }
  }
}
