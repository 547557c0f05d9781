#include <benchmark/benchmark.h>

#include <random>

#include "dualgraph/bleu.hpp"

static void BM_CorpusBleu(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> word(0, 200), len(5, 40);
  std::vector<std::string> refs, hyps;
  for (int i = 0; i < state.range(0); ++i) {
    std::string r, h;
    for (int k = len(rng); k > 0; --k) r += "w" + std::to_string(word(rng)) + ' ';
    for (int k = len(rng); k > 0; --k) h += "w" + std::to_string(word(rng) % 50) + ' ';
    refs.push_back(r);
    hyps.push_back(h);
  }
  for (auto _ : state) benchmark::DoNotOptimize(dualgraph::corpus_bleu(refs, hyps).score);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusBleu)->Arg(100)->Arg(1000);
