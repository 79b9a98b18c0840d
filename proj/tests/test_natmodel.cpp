#include <doctest.h>

#include "oracles.hpp"
#include "s4sem/natmodel.hpp"

using namespace s4sem;

namespace {

std::vector<PresheafPtr> contexts_on(const CatPtr& c, int k) {
  std::vector<PresheafPtr> out;
  for (auto& p : enumerate_presheaves(c, k)) out.push_back(share(std::move(p)));
  return out;
}

PresheafPtr discrete_set(int n) {
  auto one = terminal_category();
  std::vector<int> id(n);
  for (int x = 0; x < n; ++x) id[x] = x;
  return share(Presheaf{one, {n}, {id}});
}

// A type over Γ = 1 on 𝟙 with the given fiber size.
TypePtr set_type(const PresheafPtr& g, int n) {
  std::vector<int> id(n);
  for (int x = 0; x < n; ++x) id[x] = x;
  TypeOverContext a{g, {std::vector<int>(g->size(0), n)}, {std::vector<std::vector<int>>(g->size(0), id)}};
  return share(std::move(a));
}

// A type over a discrete context on 𝟙 with prescribed fiber sizes.
TypePtr family_type(const PresheafPtr& g, const std::vector<int>& sizes) {
  TypeOverContext a{g, {sizes}, {{}}};
  for (int s : sizes) {
    std::vector<int> id(s);
    for (int x = 0; x < s; ++x) id[x] = x;
    a.restrict[0].push_back(id);
  }
  return share(std::move(a));
}

// The discrete two-point space: opens ∅, {a}, {b}, X.
Site discrete_two_point_site() {
  std::vector<std::vector<bool>> leq = {{true, true, true, true},
                                        {false, true, false, true},
                                        {false, false, true, true},
                                        {false, false, false, true}};
  auto opens = poset_category({"empty", "a", "b", "X"}, leq);
  return opens_site(opens, {{}, {0}, {1}, {0, 1}});
}

}  // namespace

TEST_SUITE("natmodel") {
  TEST_CASE("substitution is strictly functorial") {
    auto two = walking_arrow();
    auto ctxs = contexts_on(two, 1);
    for (const auto& g : ctxs) {
      auto types = enumerate_types(g, 2);
      for (const auto& a : types) {
        CHECK(validate_type(*a).ok());
        CHECK(*subst(a, identity_map(g)) == *a);
      }
      for (const auto& d : ctxs)
        for (const auto& alpha : enumerate_maps(d, g))
          for (const auto& e : ctxs)
            for (const auto& beta : enumerate_maps(e, d))
              for (std::size_t k = 0; k < types.size(); k += 3) {
                const auto& a = types[k];
                CHECK(*subst(subst(a, alpha), beta) == *subst(a, compose(alpha, beta)));
                for (const auto& t : enumerate_terms(a)) {
                  CHECK(validate_term(subst(t, alpha)).ok());
                  CHECK(subst(subst(t, alpha), beta) == subst(t, compose(alpha, beta)));
                }
              }
    }
  }

  TEST_CASE("comprehension") {
    auto g = share(terminal_presheaf(terminal_category()));
    Comprehension c2 = comprehension(set_type(g, 2));
    CHECK(c2.object->size(0) == 2);
    Comprehension c0 = comprehension(set_type(g, 0));
    CHECK(c0.object->size(0) == 0);
    CHECK(validate_map(c0.proj).ok());
    auto two = walking_arrow();
    for (const auto& ctx : contexts_on(two, 2))
      for (const auto& a : enumerate_types(ctx, 1)) {
        Comprehension cx = comprehension(a);
        CHECK(validate_presheaf(*cx.object).ok());
        CHECK(validate_map(cx.proj).ok());
        CHECK(validate_term(cx.generic).ok());
        for (int i = 0; i < 2; ++i) {
          std::vector<int> count(ctx->size(i), 0);
          for (int v : cx.proj.components[i]) ++count[v];
          for (int x = 0; x < ctx->size(i); ++x) CHECK(count[x] == a->size(i, x));
        }
      }
  }

  TEST_CASE("comprehension maps") {
    auto two = walking_arrow();
    auto ctxs = contexts_on(two, 1);
    for (const auto& g : ctxs)
      for (const auto& a : enumerate_types(g, 2)) {
        Comprehension ca = comprehension(a);
        CHECK(q_map(a, identity_map(g)) == identity_map(ca.object));
        for (const auto& t : enumerate_terms(a)) {
          PresheafMap b = bar(t);
          CHECK(compose(ca.proj, b) == identity_map(g));
          CHECK(subst(ca.generic, b) == t);
          CHECK(section_term(a, b) == t);
        }
        for (const auto& d : ctxs)
          for (const auto& alpha : enumerate_maps(d, g)) {
            PresheafMap q = q_map(a, alpha);
            CHECK(validate_map(q).ok());
            Comprehension cl = comprehension(subst(a, alpha));
            CHECK(compose(ca.proj, q) == compose(alpha, cl.proj));
            for (const auto& e : ctxs)
              for (const auto& beta : enumerate_maps(e, d))
                CHECK(compose(q, q_map(subst(a, alpha), beta)) == q_map(a, compose(alpha, beta)));
          }
      }
  }

  TEST_CASE("display maps") {
    NaturalModelInstance m{walking_arrow(), 1, {}};
    auto ctxs = contexts_on(m.base, 2);
    for (const auto& g : ctxs) {
      CHECK(is_display(m, identity_map(g)));
      for (const auto& a : enumerate_types(g, 1)) CHECK(is_display(m, comprehension(a).proj));
    }
    auto g = share(terminal_presheaf(terminal_category()));
    NaturalModelInstance one{terminal_category(), 2, {}};
    CHECK(!is_display(one, comprehension(set_type(g, 3)).proj));
    // pullbacks of display maps are display; so are composites with isos
    for (const auto& b : ctxs)
      for (const auto& e : ctxs)
        for (const auto& f : enumerate_maps(e, b)) {
          if (!is_display(m, f)) continue;
          for (const auto& x : ctxs)
            for (const auto& h : enumerate_maps(x, b)) {
              Pullback pb = pullback(h, f);
              CHECK(is_display(m, pb.fst));
            }
          for (const auto& e2 : ctxs)
            if (auto iso = find_isomorphism(e2, e)) CHECK(is_display(m, compose(f, *iso)));
        }
  }

  TEST_CASE("fiber types recover display maps") {
    auto two = walking_arrow();
    NaturalModelInstance m{two, 2, {}};
    for (const auto& g : contexts_on(two, 1))
      for (const auto& e : contexts_on(two, 2))
        for (const auto& f : enumerate_maps(e, g)) {
          if (!is_display(m, f)) continue;
          TypePtr a = fiber_type(f);
          CHECK(validate_type(*a).ok());
          PresheafMap iso = fiber_iso(f);
          CHECK(is_iso(iso));
          CHECK(validate_map(iso).ok());
          CHECK(compose(comprehension(a).proj, iso) == f);
        }
  }

  TEST_CASE("sigma types") {
    auto g = share(terminal_presheaf(terminal_category()));
    TypePtr a = set_type(g, 2);
    Comprehension ca = comprehension(a);
    TypePtr b = family_type(ca.object, {1, 3});
    SigmaType s = sigma_type(a, b);
    CHECK(s.type->size(0, 0) == 4);
    CHECK(validate_type(*s.type).ok());
    // A terminal-fibered: Σ is B reindexed along the section
    TypePtr unit = unit_type(g);
    Comprehension cu = comprehension(unit);
    TypePtr b2 = family_type(cu.object, {3});
    CHECK(sigma_type(unit, b2).type->size(0, 0) == 3);
  }

  TEST_CASE("sigma hom-set bijection") {
    auto two = walking_arrow();
    for (const auto& g : contexts_on(two, 1))
      for (const auto& a : enumerate_types(g, 2)) {
        Comprehension ca = comprehension(a);
        auto bs = enumerate_types(ca.object, 1);
        for (std::size_t k = 0; k < bs.size(); k += 2) {
          SigmaType s = sigma_type(a, bs[k]);
          CHECK(validate_type(*s.type).ok());
          PresheafMap iso = sigma_iso(s);
          CHECK(is_iso(iso));
          CHECK(validate_map(iso).ok());
          if (s.type->max_fiber() > 4) continue;
          for (const auto& r : enumerate_types(g, 1))
            CHECK(enumerate_type_maps(bs[k], subst(r, ca.proj)).size() ==
                  enumerate_type_maps(s.type, r).size());
        }
      }
  }

  TEST_CASE("pi types over the point") {
    auto g = share(terminal_presheaf(terminal_category()));
    TypePtr a = set_type(g, 2);
    Comprehension ca = comprehension(a);
    for (int b0 = 0; b0 <= 3; ++b0)
      for (int b1 = 0; b1 <= 3; ++b1) {
        PiType pi = pi_type(a, family_type(ca.object, {b0, b1}));
        CHECK(pi.type->size(0, 0) == b0 * b1);
      }
    PiType unit = pi_type(a, unit_type(ca.object));
    CHECK(unit.type->size(0, 0) == 1);
  }

  TEST_CASE("pi adjunction and the exponential construction") {
    auto two = walking_arrow();
    int compared = 0;
    for (const auto& g : contexts_on(two, 1))
      for (const auto& a : enumerate_types(g, 2)) {
        Comprehension ca = comprehension(a);
        auto bs = enumerate_types(ca.object, 2);
        for (std::size_t k = 0; k < bs.size(); k += 5) {
          PiType pi = pi_type(a, bs[k]);
          CHECK(validate_type(*pi.type).ok());
          TypeMap ev = pi_eval(pi);
          CHECK(validate_type_map(ev).ok());
          if (pi.type->max_fiber() <= 4)
            for (const auto& r : enumerate_types(g, 1)) {
              auto down = enumerate_type_maps(subst(r, ca.proj), bs[k]);
              auto up = enumerate_type_maps(r, pi.type);
              CHECK(down.size() == up.size());
              for (const auto& h : down) {
                TypeMap lam = pi_lambda(pi, r, h);
                CHECK(validate_type_map(lam).ok());
                CHECK(compose(ev, subst(lam, ca.proj)) == h);
              }
            }
          // Π as a pullback of exponentials in presheaves on ∫Γ: the fiber
          // of Ẽ^Ã → Ã^Ã over the name of the identity.
          Elements el = category_of_elements(*g);
          auto at = share(type_as_presheaf(*a, el));
          SigmaType s = sigma_type(a, bs[k]);
          auto et = share(type_as_presheaf(*s.type, el));
          PresheafMap p{et, at, {}};
          for (int o = 0; o < el.cat->num_objects(); ++o) {
            auto [i, x] = el.element[o];
            std::vector<int> comp;
            for (auto [v, w] : s.pairs[i][x]) comp.push_back(v);
            p.components.push_back(comp);
          }
          REQUIRE(validate_map(p).ok());
          Exponential ee = exponential(at, et), aa = exponential(at, at);
          PresheafMap post{ee.object, aa.object, {}};
          PresheafMap name{share(terminal_presheaf(el.cat)), aa.object, {}};
          for (int o = 0; o < el.cat->num_objects(); ++o) {
            std::vector<int> comp;
            for (const auto& theta : ee.elements[o])
              comp.push_back(aa.index_of(o, compose(p, theta)));
            post.components.push_back(comp);
            name.components.push_back({aa.index_of(o, ee.yi_times_p[o].snd)});
          }
          REQUIRE(validate_map(post).ok());
          REQUIRE(validate_map(name).ok());
          Pullback pb = pullback(post, name);
          auto direct = share(type_as_presheaf(*pi.type, el));
          CHECK(find_isomorphism(pb.object, direct).has_value());
          ++compared;
        }
      }
    CHECK(compared > 5);
  }

  TEST_CASE("Hofmann-Streicher universe sizes") {
    HSUniverse one = hs_universe({terminal_category(), 1, {}});
    CHECK(one.U->size(0) == 2);
    HSUniverse two = hs_universe({walking_arrow(), 1, {}});
    CHECK(two.U->sizes == std::vector<int>{2, 3});
    // C/1 ≅ 𝟚 and C/0 ≅ 𝟙: independent counts of functors with canonical carriers
    for (int k = 1; k <= 3; ++k) {
      HSUniverse u = hs_universe({walking_arrow(), k, {}});
      CHECK(u.U->size(1) == oracle::count_presheaves_on_arrow(k));
      CHECK(u.U->size(0) == k + 1);
      CHECK(validate_presheaf(*u.U).ok());
      CHECK(validate_presheaf(*u.Upt).ok());
      CHECK(validate_map(u.proj).ok());
    }
    HSUniverse u = hs_universe({terminal_category(), 3, {}});
    CHECK(u.U->size(0) == 4);
  }

  TEST_CASE("universe restriction is strict") {
    for (const auto& c : {walking_arrow(), chain_category(3)}) {
      HSUniverse u = hs_universe({c, 1, {}});
      for (int f = 0; f < c->num_morphisms(); ++f) {
        if (c->is_identity(f))
          for (int k = 0; k < u.U->size(c->dst(f)); ++k) CHECK(u.U->act(f, k) == k);
        for (int g = 0; g < c->num_morphisms(); ++g) {
          int fg = c->compose(f, g);
          if (fg < 0) continue;
          for (int k = 0; k < u.U->size(c->dst(f)); ++k)
            CHECK(u.U->act(g, u.U->act(f, k)) == u.U->act(fg, k));
        }
      }
      // fiber of proj over a code at I has the size of the code at id_I
      for (int i = 0; i < c->num_objects(); ++i)
        for (int k = 0; k < u.U->size(i); ++k) {
          int n = 0;
          for (int v : u.proj.components[i]) n += v == k;
          CHECK(n == u.code(i, k).size(u.slices[i].id_object()));
          CHECK(n <= 1);
        }
    }
  }

  TEST_CASE("decode and encode") {
    auto two = walking_arrow();
    HSUniverse u = hs_universe({two, 2, {}});
    for (const auto& g : contexts_on(two, 1)) {
      PresheafMap empty_code{g, u.U, {}};
      Presheaf empty_on_slice = empty_presheaf(u.slices[0].cat);
      for (int i = 0; i < 2; ++i) {
        int k = u.index_of(i, empty_presheaf(u.slices[i].cat));
        empty_code.components.emplace_back(g->size(i), k);
      }
      TypePtr e = decode(u, empty_code);
      CHECK(e->max_fiber() == 0);
      for (const auto& code : enumerate_maps(g, u.U)) {
        TypePtr a = decode(u, code);
        CHECK(validate_type(*a).ok());
        CHECK(encode_type(u, a) == code);
        for (const auto& d : contexts_on(two, 1))
          for (const auto& alpha : enumerate_maps(d, g))
            CHECK(*decode(u, compose(code, alpha)) == *subst(a, alpha));
        // comprehension of decode(A) against the chosen pullback of proj
        Pullback pb = pullback(code, u.proj);
        Comprehension ca = comprehension(a);
        auto iso = find_isomorphism(ca.object, pb.object);
        CHECK(iso.has_value());
      }
      for (const auto& a : enumerate_types(g, 2)) CHECK(*decode(u, encode_type(u, a)) == *a);
    }
    NaturalModelInstance tight{two, 1, {}};
    HSUniverse u1 = hs_universe(tight);
    auto g = share(terminal_presheaf(two));
    TypeOverContext big{g, {{2}, {2}}, {{{0, 1}}, {{0, 1}}, {{0, 1}}}};
    CHECK_THROWS_AS(encode_type(u1, share(big)), Error);
  }

  TEST_CASE("display maps over the point correspond to codes") {
    auto one = terminal_category();
    HSUniverse u = hs_universe({one, 2, {}});
    auto g = share(terminal_presheaf(one));
    // iso classes of display maps E → 1 are sizes 0..2; codes 1 → U likewise
    CHECK(count_maps(g, u.U) == 3);
    for (int n = 0; n <= 2; ++n) {
      PresheafMap f = to_terminal(discrete_set(n));
      PresheafMap code = encode(u, f);
      CHECK(decode(u, code)->size(0, 0) == n);
    }
  }

  TEST_CASE("typing equivalence") {
    for (int k = 1; k <= 3; ++k) {
      NaturalModelInstance m{terminal_category(), k, {}};
      Verdict v = typing_check(m, {share(terminal_presheaf(m.base)), discrete_set(2)});
      CHECK(v.ok);
    }
    NaturalModelInstance m{walking_arrow(), 1, {}};
    Verdict v = typing_check(m, contexts_on(m.base, 1));
    CHECK(v.ok);
  }

  TEST_CASE("type classifier") {
    Verdict v = classifier_check(hs_universe({walking_arrow(), 1, {}}));
    CHECK(v.ok);
    for (int k = 1; k <= 3; ++k) CHECK(classifier_check(hs_universe({terminal_category(), k, {}})).ok);
    CHECK(classifier_check(hs_universe({chain_category(3), 1, {}})).ok);
  }

  TEST_CASE("realignment") {
    HSUniverse u = hs_universe({terminal_category(), 1, {}});
    Verdict v = realignment_check(u, {share(terminal_presheaf(u.model.base)), discrete_set(2)});
    CHECK(v.ok);
    HSUniverse u2 = hs_universe({walking_arrow(), 1, {}});
    CHECK(realignment_check(u2, contexts_on(walking_arrow(), 1)).ok);
  }

  TEST_CASE("display topos conditions") {
    CHECK(display_topos_check({terminal_category(), 2, {}}).ok);
    Verdict v = display_topos_check({walking_arrow(), 2, {}});
    CHECK(!v.ok);
    REQUIRE(!v.failures.empty());
    CHECK(v.failures[0].find("= 3 > 2") != std::string::npos);
    CHECK(!display_topos_check({terminal_category(), 1, {}}).ok);
  }

  TEST_CASE("naive universe of sheaves is not a sheaf") {
    Site site = discrete_two_point_site();
    NaiveUniverse nu = naive_sheaf_universe(site, 1);
    CHECK(validate_presheaf(*nu.presheaf).ok());
    SheafVerdict v = sheaf_check(site, *nu.presheaf, true);
    CHECK(!v.is_sheaf);
    const FinCat& c = *site.cat;
    int x = c.object("X");
    const SheafWitness* at_x = nullptr;
    for (const auto& w : v.failures)
      if (w.object == x && w.cover.size() > 1) at_x = &w;
    REQUIRE(at_x != nullptr);
    CHECK(at_x->failure == SheafWitness::Failure::Uniqueness);
    CHECK(at_x->amalgamations >= 2);
    // oracle: count labelled sheaves on O(X) restricting to the witness pair
    // directly.  At bound 1 a sheaf with singleton values at a and b has a
    // singleton at X (and at ∅), each labelled from the pool {0, 1}.
    int a = c.object("a"), b = c.object("b");
    int fa = c.hom(a, x)[0], fb = c.hom(b, x)[0];
    int sa = -1, sb = -1;
    for (std::size_t s = 0; s < at_x->cover.size(); ++s) {
      if (at_x->cover[s] == fa) sa = at_x->family[s];
      if (at_x->cover[s] == fb) sb = at_x->family[s];
    }
    REQUIRE(sa >= 0);
    REQUIRE(sb >= 0);
    int count = 0;
    for (int k = 0; k < nu.presheaf->size(x); ++k)
      if (nu.presheaf->act(fa, k) == sa && nu.presheaf->act(fb, k) == sb) ++count;
    CHECK(count == at_x->amalgamations);
    const auto& ea = nu.entries[a][sa];
    const auto& eb = nu.entries[b][sb];
    int size_a = ea.sheaf.size(nu.slices[a].id_object());
    int size_b = eb.sheaf.size(nu.slices[b].id_object());
    // every labelling of F(X) (size |F(a)|·|F(b)|) and of F(∅) (size 1) that
    // is compatible with the fixed restrictions
    long long labellings_x = size_a * size_b == 1 ? 2 : (size_a * size_b == 0 ? 1 : 0);
    CHECK(count == labellings_x);
  }
}
