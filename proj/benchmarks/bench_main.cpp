#include <benchmark/benchmark.h>

#include <memory>

#include "s4sem/interp.hpp"
#include "s4sem/model.hpp"

using namespace s4sem;

namespace {

ComonadPtr points_comonad() {
  return comonad_from_adjunction(
      std::make_shared<const KanAdjunction>(discrete_subcategory(walking_arrow()).inclusion));
}

const char* kModule =
    "type A; type B; const a : A; const c : Box A;\n"
    "check | x : Box Box A |- let box u := x in let box v := u in v : A;\n"
    "equal u :: A |- let box v := box(u) in let box w := box(v) in w == u : A;\n";

void BM_BoundedPresheaves(benchmark::State& state) {
  CatPtr c = walking_arrow();
  for (auto _ : state) benchmark::DoNotOptimize(bounded_presheaves(c, state.range(0)).size());
}
BENCHMARK(BM_BoundedPresheaves)->Arg(1)->Arg(2)->Arg(3);

void BM_NaturalMaps(benchmark::State& state) {
  CatPtr c = walking_arrow();
  auto ps = bounded_presheaves(c, state.range(0));
  for (auto _ : state) {
    std::size_t n = 0;
    for (const auto& p : ps)
      for (const auto& q : ps) n += enumerate_maps(p, q).size();
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_NaturalMaps)->Arg(1)->Arg(2);

void BM_HSUniverse(benchmark::State& state) {
  for (auto _ : state) {
    HSUniverse u = hs_universe({walking_arrow(), static_cast<int>(state.range(0)), {}});
    benchmark::DoNotOptimize(u.U->size(1));
  }
}
BENCHMARK(BM_HSUniverse)->Arg(1)->Arg(2);

void BM_EnumerateCoalgebras(benchmark::State& state) {
  ComonadPtr w = points_comonad();
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_coalgebras(*w, state.range(0)).size());
}
BENCHMARK(BM_EnumerateCoalgebras)->Arg(1)->Arg(2);

void BM_CoalgebraTypes(benchmark::State& state) {
  ComonadPtr w = points_comonad();
  Coalgebra g = enumerate_coalgebras(*w, 1).back();
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_coalgebra_types(w, g, state.range(0)).size());
}
BENCHMARK(BM_CoalgebraTypes)->Arg(1)->Arg(2)->Arg(3);

void BM_CoalgebraClassifier(benchmark::State& state) {
  ComonadPtr w = points_comonad();
  for (auto _ : state) {
    CoalgebraClassifier cls = coalgebra_classifier(w, 1);
    benchmark::DoNotOptimize(cls.object_coalgebra.carrier->size(0));
  }
}
BENCHMARK(BM_CoalgebraClassifier)->Unit(benchmark::kMillisecond);

void BM_CheckModule(benchmark::State& state) {
  Module m = parse_module(kModule);
  for (auto _ : state) benchmark::DoNotOptimize(check_module(m).ok());
}
BENCHMARK(BM_CheckModule);

void BM_Soundness(benchmark::State& state) {
  ModuleResult r = check_module(parse_module(kModule));
  ComonadPtr w = points_comonad();
  auto vals = valuations(w, r.signature, 1);
  for (auto _ : state) {
    Interpretation in(w, r.signature, vals.front());
    benchmark::DoNotOptimize(soundness_harness(r, in).ok());
  }
}
BENCHMARK(BM_Soundness)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
