#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "fincap/bodies.hpp"
#include "fincap/norms.hpp"
#include "fincap/pde.hpp"
#include "fincap/reduce.hpp"

namespace {

using namespace fincap;

// Exterior domain of the Euclidean unit ball, truncated at R = 8, with a
// smooth field so the norm is evaluated at every corner.
struct Setup {
  norms::NormModel model;
  std::shared_ptr<pde::VoxelDomain> domain;
  std::vector<double> u, grad;
  pde::kernels::Problem problem;

  Setup(int n, norms::NormModel m) : model(std::move(m)) {
    const auto body = bodies::ConvexBody::euclidean_ball(3, 1.0, geom::Vec::Zero(3));
    domain = pde::exterior_domain(body, model, 8.0, 8.0, n);
    u.resize(domain->size());
    grad.resize(domain->size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto p = domain->point(i);
      u[i] = 1.0 / (1.0 + p[0] * p[0] + 0.5 * p[1] * p[1] + 0.25 * p[2] * p[2]);
    }
    problem.domain = domain.get();
    problem.model = &model;
    problem.bc[1] = 1.0;
  }
};

norms::NormModel pick(int which) {
  switch (which) {
    case 0: return norms::NormModel::euclidean(3);
    case 1: {
      geom::Mat a = geom::Mat::Zero(3, 3);
      a.diagonal() << 1.0, 2.0, 3.0;
      return norms::NormModel::ellipsoidal(a);
    }
    default: return norms::NormModel::regularized(norms::NormModel::pnorm(3, 4.0), 0.05);
  }
}

void BM_EnergyGradientSerial(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)), pick(static_cast<int>(st.range(1))));
  for (auto _ : st) {
    benchmark::DoNotOptimize(pde::kernels::energy_gradient_serial(s.problem, s.u.data(), s.grad.data()));
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * s.u.size()));
}

void BM_EnergyGradientParallel(benchmark::State& st) {
  Setup s(static_cast<int>(st.range(0)), pick(static_cast<int>(st.range(1))));
  st.counters["threads"] = max_threads();
  for (auto _ : st) {
    benchmark::DoNotOptimize(pde::kernels::energy_gradient_parallel(s.problem, s.u.data(), s.grad.data()));
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * s.u.size()));
}

// range(0): nodes per axis; range(1): 0 euclidean, 1 ellipsoidal, 2 regularized p = 4
BENCHMARK(BM_EnergyGradientSerial)->ArgsProduct({{32, 64, 96}, {0, 1, 2}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyGradientParallel)->ArgsProduct({{32, 64, 96}, {0, 1, 2}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
