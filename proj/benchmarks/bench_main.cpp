#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "fixtures.hpp"
#include "sgns/gpc.hpp"
#include "sgns/krylov.hpp"
#include "sgns/nonlinear.hpp"

using namespace sgns;

namespace {

/// Channel problem at the first Picard iterate, cached per (cells in x, CoV percent).
struct Bench {
  std::unique_ptr<fixture::Problem> p;
  std::unique_ptr<GalerkinState> state;
  KronSumOperator op;
};

Bench& bench_problem(int nx, int cov_pct, int P) {
  static std::map<std::tuple<int, int, int>, std::unique_ptr<Bench>> cache;
  auto& b = cache[{nx, cov_pct, P}];
  if (!b) {
    b = std::make_unique<Bench>();
    b->p = fixture::make_problem(fixture::channel_config(nx, nx / 6, cov_pct / 100.0, 2, P));
    b->state = std::make_unique<GalerkinState>(b->p->problem, fixture::random_iterate(b->p->problem, 7, 0.1));
    b->state->rebuild();
    b->op = build_linearized_operator(*b->state, Linearization::Picard);
  }
  return *b;
}

void BM_TripleProducts(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0)), P = static_cast<int>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(triple_products(N, P, 2 * P));
}
BENCHMARK(BM_TripleProducts)->Args({2, 3})->Args({4, 3})->Args({2, 6})->Unit(benchmark::kMillisecond);

void BM_KronMatvec(benchmark::State& st) {
  auto& b = bench_problem(static_cast<int>(st.range(0)), 30, static_cast<int>(st.range(1)));
  const Vector x = fixture::random_vector(b.p->problem.layout.ngdof(), 3);
  for (auto _ : st) benchmark::DoNotOptimize(kron_matvec(b.op, x));
  st.counters["ngdof"] = static_cast<double>(x.size());
}
BENCHMARK(BM_KronMatvec)->Args({48, 2})->Args({48, 3})->Args({96, 3})->Unit(benchmark::kMillisecond);

void BM_PreconditionerApply(benchmark::State& st) {
  auto& b = bench_problem(48, 30, 3);
  const PreconditionerSpec spec{static_cast<PrecondKind>(st.range(0)), -1, 20};
  const PcdOperators pcd = pcd_for_state(*b.state);
  const auto pre = make_preconditioner(b.op, spec, &pcd);
  const Vector x = fixture::random_vector(b.p->problem.layout.ngdof(), 5);
  Vector y(x.size());
  for (auto _ : st) {
    pre->apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetLabel(to_string(spec.kind));
}
BENCHMARK(BM_PreconditionerApply)
    ->DenseRange(static_cast<int>(PrecondKind::MB), static_cast<int>(PrecondKind::AHGS_PCD_IT))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
