#include <benchmark/benchmark.h>

#include <map>
#include <memory>
#include <vector>

#include "cyto/ilu.hpp"
#include "cyto/krylov.hpp"
#include "cyto/multigrid.hpp"

using namespace cyto;

namespace {

const Discretization& disc(int levels) {
  static std::map<int, std::unique_ptr<Discretization>> cache;
  auto& slot = cache[levels];
  if (!slot) {
    MeshConfig c;
    c.cells_per_axis = 2;
    c.levels = levels;
    slot = std::make_unique<Discretization>(c);
  }
  return *slot;
}

ModelParams params() {
  ModelParams p;
  p.q.assign(8, 0.0);
  p.q[0] = 2500.0;
  return p;
}

}  // namespace

static void BM_Assemble(benchmark::State& state) {
  const Discretization& d = disc(static_cast<int>(state.range(0)));
  const ModelParams p = params();
  const Problem pr = Problem::steady(p);
  const SystemState s = d.rest_state(d.finest(), p);
  for (auto _ : state) {
    AssembledSystem sys = assemble(d, pr, s);
    benchmark::DoNotOptimize(sys.residual);
  }
  state.counters["dofs"] = static_cast<double>(s.u.size());
}
BENCHMARK(BM_Assemble)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_Ilu0Factor(benchmark::State& state) {
  const Discretization& d = disc(static_cast<int>(state.range(0)));
  const ModelParams p = params();
  const SparseMatrix A = assemble(d, Problem::steady(p), d.rest_state(d.finest(), p)).matrix.flatten();
  for (auto _ : state) {
    Ilu0 ilu(A);
    benchmark::DoNotOptimize(&ilu);
  }
}
BENCHMARK(BM_Ilu0Factor)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

static void BM_VCycle(benchmark::State& state) {
  const Discretization& d = disc(static_cast<int>(state.range(0)));
  const ModelParams p = params();
  MgOptions opt;
  opt.mode = state.range(1) == 1 ? MgMode::CoupledS1 : MgMode::CoupledS2;
  const Multigrid mg(d, Problem::steady(p), d.rest_state(d.finest(), p), opt);
  const auto n = static_cast<std::size_t>(mg.vector_size(mg.finest()));
  std::vector<double> b(n, 1.0), x(n);
  for (auto _ : state) {
    mg.apply(b, x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetLabel(to_string(opt.mode));
}
BENCHMARK(BM_VCycle)->ArgsProduct({{1, 2}, {1, 2}})->Unit(benchmark::kMillisecond);

static void BM_GmresMultigrid(benchmark::State& state) {
  const Discretization& d = disc(static_cast<int>(state.range(0)));
  const ModelParams p = params();
  const Problem pr = Problem::steady(p);
  const AssembledSystem sys = assemble(d, pr, d.rest_state(d.finest(), p));
  const Multigrid mg(d, pr, d.rest_state(d.finest(), p), {});
  const std::vector<double> b(sys.residual.all().begin(), sys.residual.all().end());
  std::vector<double> x(b.size());
  const LinearOperator A = [&](std::span<const double> in, std::span<double> out) { sys.matrix.multiply(in, out); };
  const LinearOperator M = [&](std::span<const double> in, std::span<double> out) { mg.apply(in, out); };
  int iterations = 0;
  for (auto _ : state) {
    std::fill(x.begin(), x.end(), 0.0);
    iterations = gmres(A, M, b, x).iterations;
    benchmark::DoNotOptimize(x.data());
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_GmresMultigrid)->DenseRange(1, 2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
