#include <doctest.h>

#include "oracles.hpp"
#include "s4sem/coalg.hpp"

using namespace s4sem;

namespace {

std::shared_ptr<const KanAdjunction> flagship_adjunction() {
  auto d = discrete_subcategory(walking_arrow());
  return std::make_shared<const KanAdjunction>(d.inclusion);
}

ComonadPtr flagship() { return comonad_from_adjunction(flagship_adjunction()); }

CatPtr idempotent_monoid() { return monoid_category({"1", "e"}, {{0, 1}, {1, 1}}); }

std::vector<PresheafPtr> presheaves_on(const CatPtr& c, int k) {
  std::vector<PresheafPtr> out;
  for (auto& p : enumerate_presheaves(c, k)) out.push_back(share(std::move(p)));
  return out;
}

PresheafPtr sized(const CatPtr& c, std::vector<int> sizes) {
  Presheaf p{c, std::move(sizes), {}};
  for (int f = 0; f < c->num_morphisms(); ++f) {
    std::vector<int> id(p.sizes[c->dst(f)]);
    for (std::size_t x = 0; x < id.size(); ++x) id[x] = static_cast<int>(x);
    p.action.push_back(id);
  }
  return share(std::move(p));
}

// Breaks the counit law by sending every element of □P to the first element
// of □□P.
class CollapsedComult : public AdjunctionComonad {
 public:
  using AdjunctionComonad::AdjunctionComonad;
  PresheafMap comult(const PresheafPtr& p) const override {
    PresheafMap d = AdjunctionComonad::comult(p);
    for (auto& comp : d.components)
      for (auto& v : comp) v = 0;
    return d;
  }
};

bool same_coalgebra_type(const CoalgebraType& a, const CoalgebraType& b) {
  return *a.type == *b.type && a.theta.fn == b.theta.fn;
}

}  // namespace

TEST_SUITE("coalg") {
  TEST_CASE("box on the flagship is Q(0) x Q(1) at object 1") {
    auto w = flagship();
    auto d = w->base();
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; b <= 3; ++b) {
        PresheafPtr q = sized(d, {a, b});
        PresheafPtr box = w->apply(q);
        CHECK(box->size(0) == a);
        CHECK(box->size(1) == a * b);
      }
  }

  TEST_CASE("comonad laws hold for every construction in the suite") {
    std::vector<ComonadPtr> ws = {flagship(), identity_comonad(walking_arrow()),
                                  identity_comonad(terminal_category()),
                                  monoid_comonad(idempotent_monoid())};
    for (const auto& w : ws) {
      auto suite = presheaves_on(w->base(), 2);
      auto r = validate_comonad(*w, suite);
      CHECK_MESSAGE(r.ok(), w->name());
      for (const auto& v : r.violations) MESSAGE(std::string(v.law + " at " + v.witness));
    }
  }

  TEST_CASE("a doctored comultiplication is caught") {
    CollapsedComult broken(flagship_adjunction());
    auto r = validate_comonad(broken, presheaves_on(broken.base(), 2));
    CHECK(!r.ok());
    CHECK(r.mentions("counit"));
  }

  TEST_CASE("identity comonad acts as the identity on the nose") {
    auto w = identity_comonad(walking_arrow());
    for (const auto& g : presheaves_on(walking_arrow(), 1))
      for (const auto& a : enumerate_types(g, 2)) {
        CHECK(*w->type_action(a) == *a);
        CHECK(w->tau(a) == identity_map(comprehension(a).object));
        for (const auto& t : enumerate_terms(a)) CHECK(w->term_action(t) == t);
      }
  }

  TEST_CASE("type action is strict and agrees with the componentwise strictification") {
    auto adj = flagship_adjunction();
    AdjunctionComonad w(adj);
    auto ctxs = presheaves_on(w.base(), 2);
    for (const auto& g : ctxs)
      for (const auto& a : enumerate_types(g, 2)) {
        TypePtr ta = w.type_action(a);
        CHECK(*w.type_action_by_components(a) == *ta);
        CHECK(is_iso(w.tau(a)));
        for (const auto& d : ctxs) {
          auto maps = enumerate_maps(d, g);
          for (std::size_t k = 0; k < maps.size() && k < 4; ++k)
            CHECK(*w.type_action(subst(a, maps[k])) == *subst(ta, w.apply(maps[k])));
        }
      }
  }

  TEST_CASE("term action commutes with substitution") {
    auto w = flagship();
    auto ctxs = presheaves_on(w->base(), 2);
    for (const auto& g : ctxs)
      for (const auto& a : enumerate_types(g, 1))
        for (const auto& t : enumerate_terms(a)) {
          TermOverContext bt = w->term_action(t);
          CHECK(validate_term(bt).ok());
          for (const auto& d : ctxs)
            for (const auto& h : enumerate_maps(d, g))
              CHECK(w->term_action(subst(t, h)) == subst(bt, w->apply(h)));
        }
  }

  TEST_CASE("coalgebras of the flagship are presheaves on the arrow") {
    auto w = flagship();
    for (int k = 0; k <= 2; ++k) {
      auto cs = enumerate_coalgebras(*w, k);
      CHECK(static_cast<long long>(cs.size()) == oracle::count_presheaves_on_arrow(k));
      for (const auto& c : cs) CHECK(validate_coalgebra(*w, c).ok());
    }
    CHECK(enumerate_coalgebras(*w, 2).size() == 11);
  }

  TEST_CASE("coalgebras of the idempotent monoid comonad are idempotent self-maps") {
    auto w = monoid_comonad(idempotent_monoid());
    auto cs = enumerate_coalgebras(*w, 2);
    // count idempotent e : n → n for n ≤ 2 by brute force
    long long idem = 0;
    for (int n = 0; n <= 2; ++n)
      oracle::each_function(n, n, [&](const std::vector<int>& e) {
        bool ok = true;
        for (int x = 0; x < n; ++x) ok = ok && e[e[x]] == e[x];
        idem += ok;
      });
    CHECK(static_cast<long long>(cs.size()) == idem);
  }

  TEST_CASE("forgetful functor is left adjoint to the cofree functor") {
    auto w = flagship();
    auto v = forgetful_adjunction_check(*w, enumerate_coalgebras(*w, 1), presheaves_on(w->base(), 1));
    CHECK(v.ok);
  }

  TEST_CASE("comparison functor is an equivalence for the flagship") {
    auto v = comparison_check(flagship_adjunction(), 2);
    CHECK(v.ok);
    for (const auto& f : v.failures) MESSAGE(f);
  }

  TEST_CASE("a point of the arrow gives a non-faithful restriction") {
    auto adj = std::make_shared<const KanAdjunction>(
        constant_functor(terminal_category(), walking_arrow(), 1));
    auto v = faithfulness_check(*adj, presheaves_on(walking_arrow(), 2));
    REQUIRE(!v.ok);
    CHECK(v.failures[0].find("restrict equally") != std::string::npos);
    CHECK(!comparison_check(adj, 1).ok);
  }

  TEST_CASE("induced comonad laws and the two routes to the right adjoint") {
    auto w = flagship();
    for (const auto& at : enumerate_coalgebras(*w, 2)) {
      InducedComonad b(w, at);
      for (const auto& a : enumerate_types(at.carrier, 1)) {
        CHECK(b.check_laws(a).ok());
        CoalgebraType cof = cofree_type(w, at, a);
        CHECK(validate_coalgebra_type(w, cof).ok());
        CHECK(same_coalgebra_type(cof, induced_right_adjoint(w, at, a)));
      }
    }
  }

  TEST_CASE("induced comonad is stable under substitution along coalgebra maps") {
    auto w = flagship();
    auto cs = enumerate_coalgebras(*w, 1);
    for (const auto& g : cs)
      for (const auto& x : enumerate_coalgebra_types(w, g, 1))
        for (const auto& d : cs)
          for (const auto& h : coalgebra_maps(*w, d, g)) {
            CoalgebraType y = subst(w, x, d, h);
            CHECK(validate_coalgebra_type(w, y).ok());
          }
  }

  TEST_CASE("coalgebra types over K(X) match types over X") {
    auto adj = flagship_adjunction();
    auto w = comonad_from_adjunction(adj);
    for (const auto& x : presheaves_on(walking_arrow(), 2)) {
      Coalgebra k{adj->restrict(x), adj->restrict(adj->unit(x))};
      auto coalg_types = enumerate_coalgebra_types(w, k, 1);
      CHECK(coalg_types.size() == enumerate_types(x, 1).size());
    }
  }

  TEST_CASE("comprehension of a coalgebra type is a coalgebra over the context") {
    auto w = flagship();
    for (const auto& g : enumerate_coalgebras(*w, 2))
      for (const auto& x : enumerate_coalgebra_types(w, g, 2)) {
        Coalgebra e = coalgebra_comprehension(w, x);
        CHECK(validate_coalgebra(*w, e).ok());
        CHECK(is_coalgebra_map(*w, e, g, comprehension(x.type).proj));
        CoalgebraType back = strictify_coalgebra(w, e, g, comprehension(x.type).proj);
        CHECK(same_coalgebra_type(back, x));
      }
  }

  TEST_CASE("sigma of coalgebra types has the pair fibers and the universal property") {
    auto w = flagship();
    for (const auto& g : enumerate_coalgebras(*w, 1))
      for (const auto& a : enumerate_coalgebra_types(w, g, 2)) {
        Coalgebra ga = coalgebra_comprehension(w, a);
        for (const auto& b : enumerate_coalgebra_types(w, ga, 1)) {
          CoalgebraType s = coalgebra_sigma(w, a, b);
          CHECK(validate_coalgebra_type(w, s).ok());
          CHECK(*s.type == *sigma_type(a.type, b.type).type);
          PresheafMap pa = comprehension(a.type).proj;
          for (const auto& r : enumerate_coalgebra_types(w, g, 1)) {
            CoalgebraType rp = subst(w, r, ga, pa);
            CHECK(coalgebra_type_maps(w, s, r).size() == coalgebra_type_maps(w, b, rp).size());
          }
        }
      }
  }

  TEST_CASE("coalgebra exponentials satisfy the universal property") {
    auto w = flagship();
    for (const auto& g : enumerate_coalgebras(*w, 1))
      for (const auto& a : enumerate_coalgebra_types(w, g, 1))
        for (const auto& b : enumerate_coalgebra_types(w, g, 2)) {
          CoalgebraPi e = coalgebra_exponential(w, a, b);
          CHECK(validate_coalgebra_type(w, e.type).ok());
          Coalgebra ga = coalgebra_comprehension(w, a);
          PresheafMap pa = comprehension(a.type).proj;
          CHECK(is_coalgebra_type_map(w, subst(w, e.type, ga, pa), e.codomain, e.eval));
          for (const auto& r : enumerate_coalgebra_types(w, g, 1)) {
            CoalgebraType rp = subst(w, r, ga, pa);
            auto into = coalgebra_type_maps(w, r, e.type);
            auto pulled = coalgebra_type_maps(w, rp, e.codomain);
            CHECK(into.size() == pulled.size());
            for (const auto& h : pulled) {
              TypeMap l = coalgebra_lambda(w, e, r, h);
              CHECK(is_coalgebra_type_map(w, r, e.type, l));
              CHECK(compose(e.eval, subst(l, pa)).fn == h.fn);
            }
          }
        }
  }

  TEST_CASE("Kock-Wraith classifier of the flagship") {
    auto w = flagship();
    KockWraith kw = kock_wraith(w);
    auto v = kock_wraith_check(w, kw, enumerate_coalgebras(*w, 2));
    CHECK(v.ok);
    for (const auto& f : v.failures) MESSAGE(f);
    // subterminal presheaves on the arrow: S(1) nonempty forces S(0) nonempty
    int subterminals = 0;
    for (int s0 = 0; s0 <= 1; ++s0)
      for (int s1 = 0; s1 <= 1; ++s1) subterminals += (s1 <= s0);
    Coalgebra one = terminal_coalgebra(*w);
    CHECK(static_cast<int>(coalgebra_maps(*w, one, kw.fixed).size()) == subterminals);
    // the order on global points is a chain of three
    CHECK(kw.fixed.carrier->size(1) == 3);
    CHECK(kw.order[1].size() == 6);
  }

  TEST_CASE("Kock-Wraith for the identity comonad is the subobject classifier") {
    auto w = identity_comonad(walking_arrow());
    KockWraith kw = kock_wraith(w);
    CHECK(*kw.fixed.carrier == *kw.omega.omega);
    CHECK(kock_wraith_check(w, kw, enumerate_coalgebras(*w, 1)).ok);
  }

  TEST_CASE("coalgebra classifier externalizes to coalgebra types") {
    auto w = flagship();
    CoalgebraClassifier cls = coalgebra_classifier(w, 1);
    CHECK(validate_coalgebra(*w, cls.object_coalgebra).ok());
    auto v = classifier_externalization_check(cls, enumerate_coalgebras(*w, 2));
    CHECK(v.ok);
    for (const auto& f : v.failures) MESSAGE(f);
  }

  TEST_CASE("coalgebra classifier refuses bounds the induced comonad leaves") {
    CHECK_THROWS_AS(coalgebra_classifier(flagship(), 2), Error);
  }

  TEST_CASE("identity comonad classifier is the universe on the nose") {
    auto w = identity_comonad(walking_arrow());
    CoalgebraClassifier cls = coalgebra_classifier(w, 1);
    CHECK(*cls.object_coalgebra.carrier == *cls.universe->U);
    CHECK(classifier_externalization_check(cls, enumerate_coalgebras(*w, 1)).ok);
  }

  TEST_CASE("coalgebra realignment on the point") {
    for (const auto& w : {identity_comonad(terminal_category()), monoid_comonad(idempotent_monoid())}) {
      CoalgebraClassifier cls = coalgebra_classifier(w, 1);
      auto v = coalgebra_realignment_check(cls, enumerate_coalgebras(*w, 2));
      CHECK_MESSAGE(v.ok, w->name());
      for (const auto& f : v.failures) MESSAGE(f);
    }
  }
}
