#include <benchmark/benchmark.h>

#include <random>

#include "adnet/model.hpp"
#include "adnet/tensor.hpp"

namespace {

adnet::Tensor random_tensor(std::vector<int> shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  adnet::Tensor t(std::move(shape));
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

void BM_Matmul(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto a = random_tensor({n, n}, 1);
  auto b = random_tensor({n, n}, 2);
  for (auto _ : state) {
    auto c = adnet::matmul(a, b);
    benchmark::DoNotOptimize(c.data().data());
  }
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128);

void BM_SoftmaxRows(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto m = random_tensor({n, n}, 3);
  for (auto _ : state) {
    auto s = adnet::softmax_rows(m);
    benchmark::DoNotOptimize(s.data().data());
  }
}
BENCHMARK(BM_SoftmaxRows)->Arg(64)->Arg(256);

void BM_Conv2d(benchmark::State& state) {
  auto x = random_tensor({16, 32, 32}, 4);
  auto k = random_tensor({32, 16, 3, 3}, 5);
  auto b = random_tensor({32}, 6);
  for (auto _ : state) {
    auto y = adnet::conv2d(x, k, b, 1, 1);
    benchmark::DoNotOptimize(y.data().data());
  }
}
BENCHMARK(BM_Conv2d);

void BM_ForwardEval(benchmark::State& state) {
  adnet::ModelConfig cfg;
  auto params = adnet::AdNetParams::init(cfg, 7);
  auto anchor = random_tensor({3, 64, 64}, 8);
  auto current = random_tensor({3, 64, 64}, 9);
  for (auto _ : state) {
    auto h = adnet::forward(anchor, current, params, false);
    benchmark::DoNotOptimize(h.data().data());
  }
}
BENCHMARK(BM_ForwardEval);

}  // namespace

BENCHMARK_MAIN();
