#include <benchmark/benchmark.h>

#include "dualgraph/amr_graph.hpp"

namespace {

const char* kGraph =
    "(a / agree :ARG0 (a2 / and :op1 (c / country :wiki China :name (n / name :op1 China)) :op2 (c2 / country "
    ":wiki Kyrgyzstan :name (n2 / name :op1 Kyrgyzstan))) :ARG1 (t / threaten-01 :ARG0 (a3 / and :op1 (t2 / "
    "terrorism) :op2 (s / separatism) :op3 (e / extremism)) :ARG2 (a4 / and :op1 (s3 / security :mod (r / "
    "region)) :op2 (s4 / stability :mod r)) :time (s2 / still) :ARG1-of (m / major-02)) :medium (c3 / "
    "communique :mod (j / joint)))";

}  // namespace

static void BM_ParsePenman(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dualgraph::parse_penman(kGraph).node_count());
}
BENCHMARK(BM_ParsePenman);

static void BM_LeviAndDfs(benchmark::State& state) {
  const auto g = dualgraph::parse_penman(kGraph);
  for (auto _ : state) {
    const auto td = dualgraph::levi_transform(g);
    const auto bu = dualgraph::reverse_view(td);
    benchmark::DoNotOptimize(dualgraph::dfs_order(td).size() + bu.edge_count());
  }
}
BENCHMARK(BM_LeviAndDfs);
