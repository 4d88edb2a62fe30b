#include "actsub/elliptic.hpp"
#include "actsub/kernels.hpp"
#include "actsub/pipeline.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace actsub;

Matrix grid_nodes(int q, Vector& sqrt_w) {
  const double h = 1.0 / (q - 1);
  Matrix nodes(q * q, 2);
  sqrt_w.resize(q * q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < q; ++i) {
      nodes(j * q + i, 0) = i * h;
      nodes(j * q + i, 1) = j * h;
      sqrt_w(j * q + i) = h;
    }
  return nodes;
}

void correlation_serial(benchmark::State& state) {
  Vector sw;
  const Matrix nodes = grid_nodes(static_cast<int>(state.range(0)), sw);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_correlation_serial(nodes, sw, 1.0));
}

void correlation_parallel(benchmark::State& state) {
  Vector sw;
  const Matrix nodes = grid_nodes(static_cast<int>(state.range(0)), sw);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::weighted_correlation_parallel(nodes, sw, 1.0));
}

const std::shared_ptr<EllipticModel>& elliptic() {
  static const auto model = make_elliptic(33, 1.0, 100);
  return model;
}

void gradients_serial(benchmark::State& state) {
  const Matrix x = draw_inputs(elliptic()->input_domain(), state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sample_gradients_serial(*elliptic(), x));
}

void gradients_parallel(benchmark::State& state) {
  const Matrix x = draw_inputs(elliptic()->input_domain(), state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::sample_gradients_parallel(*elliptic(), x));
}

void gram_serial(benchmark::State& state) {
  const Matrix a = draw_inputs({InputKind::gaussian_standard, 100}, state.range(0), 3).transpose();
  const Vector l = Vector::Constant(100, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::squared_exponential_gram_serial(a, a, l));
}

void gram_parallel(benchmark::State& state) {
  const Matrix a = draw_inputs({InputKind::gaussian_standard, 100}, state.range(0), 3).transpose();
  const Vector l = Vector::Constant(100, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::squared_exponential_gram_parallel(a, a, l));
}

}  // namespace

BENCHMARK(correlation_serial)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(correlation_parallel)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(gradients_serial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(gradients_parallel)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(gram_serial)->Arg(300)->Arg(900)->Unit(benchmark::kMillisecond);
BENCHMARK(gram_parallel)->Arg(300)->Arg(900)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
