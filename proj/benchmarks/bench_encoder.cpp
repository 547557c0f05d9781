#include <benchmark/benchmark.h>

#include <random>

#include "dualgraph/encoder.hpp"

namespace dg = dualgraph;

namespace {

dg::Tensor<float> random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::uniform_real_distribution<float> u(-1, 1);
  auto t = dg::Tensor<float>::matrix(r, c);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

// Chain with a few extra shortcuts, roughly the shape of a Levi graph.
std::vector<std::vector<int>> neighborhoods(std::size_t n) {
  std::vector<std::vector<int>> in(n);
  for (std::size_t i = 1; i < n; ++i) in[i].push_back(static_cast<int>(i - 1));
  for (std::size_t i = 3; i < n; i += 3) in[i].push_back(static_cast<int>(i - 3));
  return in;
}

}  // namespace

static void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  dg::Tape<float> tape(false);
  const auto a = tape.constant(random_matrix(n, 300, rng));
  const auto b = tape.constant(random_matrix(300, 300, rng));
  for (auto _ : state) benchmark::DoNotOptimize(dg::matmul(a, b).value().data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 300 * 300));
}
BENCHMARK(BM_Matmul)->Arg(16)->Arg(64);

static void BM_GgnnLayer(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  dg::ParameterStore<float> s;
  dg::add_ggnn_layer_params(s, "l", 64, rng);
  const auto h = random_matrix(n, 64, rng);
  const auto in = neighborhoods(n);
  for (auto _ : state) {
    dg::Tape<float> tape(false);
    benchmark::DoNotOptimize(dg::ggnn_layer(tape.constant(h), in, s, "l").value().data());
  }
}
BENCHMARK(BM_GgnnLayer)->Arg(16)->Arg(64);

static void BM_GgnnLayerBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  dg::ParameterStore<float> s;
  dg::add_ggnn_layer_params(s, "l", 64, rng);
  const auto h = random_matrix(n, 64, rng);
  const auto in = neighborhoods(n);
  for (auto _ : state) {
    s.zero_grad();
    dg::Tape<float> tape;
    tape.backward(dg::sum(dg::ggnn_layer(tape.constant(h), in, s, "l")));
  }
}
BENCHMARK(BM_GgnnLayerBackward)->Arg(16)->Arg(64);
