#include "dualgraph/graph_stats.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <queue>

#include "dualgraph/errors.hpp"

namespace dualgraph {

std::vector<int> node_degrees(const AmrGraph& graph) {
  std::vector<int> degree(graph.node_count(), 0);
  for (const auto& e : graph.edges()) {
    ++degree[e.source];
    ++degree[e.target];
  }
  return degree;
}

std::vector<int> out_degrees(const AmrGraph& graph) {
  std::vector<int> degree(graph.node_count(), 0);
  for (const auto& e : graph.edges()) ++degree[e.source];
  return degree;
}

int graph_diameter(const AmrGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<std::vector<int>> adjacency(n);
  for (const auto& e : graph.edges()) {
    adjacency[e.source].push_back(e.target);
    adjacency[e.target].push_back(e.source);
  }
  int diameter = 0;
  std::vector<int> dist(n);
  std::queue<int> frontier;
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    frontier.push(static_cast<int>(s));
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      diameter = std::max(diameter, dist[u]);
      for (int v : adjacency[u]) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          frontier.push(v);
        }
      }
    }
  }
  return diameter;
}

bool is_dag(const AmrGraph& graph) {
  // Kahn's algorithm: acyclic iff every node is eventually emitted.
  const std::size_t n = graph.node_count();
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> out(n);
  for (const auto& e : graph.edges()) {
    out[e.source].push_back(e.target);
    ++indegree[e.target];
  }
  std::vector<int> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(static_cast<int>(i));
  }
  std::size_t emitted = 0;
  while (!ready.empty()) {
    const int u = ready.back();
    ready.pop_back();
    ++emitted;
    for (int v : out[u]) {
      if (--indegree[v] == 0) ready.push_back(v);
    }
  }
  return emitted == n;
}

GraphStats graph_stats(const AmrGraph& graph) {
  GraphStats stats;
  stats.node_count = static_cast<int>(graph.node_count());
  stats.edge_count = static_cast<int>(graph.edge_count());
  stats.diameter = graph_diameter(graph);
  const auto out = out_degrees(graph);
  stats.max_out_degree = out.empty() ? 0 : *std::max_element(out.begin(), out.end());
  const std::int64_t num = 2 * static_cast<std::int64_t>(stats.edge_count);
  const std::int64_t den = stats.node_count;
  const std::int64_t g = std::gcd(num, den);
  stats.mean_degree = Rational{num / g, den / g};
  stats.is_dag = is_dag(graph);
  return stats;
}

namespace {

struct Accumulator {
  std::int64_t min = std::numeric_limits<std::int64_t>::max();
  std::int64_t max = std::numeric_limits<std::int64_t>::min();
  std::int64_t sum = 0;
  std::int64_t count = 0;

  void add(std::int64_t v) {
    min = std::min(min, v);
    max = std::max(max, v);
    sum += v;
    ++count;
  }

  SummaryRow row(std::string name) const {
    return SummaryRow{std::move(name), static_cast<double>(min),
                      static_cast<double>(sum) / static_cast<double>(count),
                      static_cast<double>(max)};
  }
};

std::vector<HistogramBin> make_bins() {
  std::vector<HistogramBin> bins;
  for (int k = 0; k <= kHistogramTop; ++k) bins.push_back(HistogramBin{k, k + 1, 0});
  return bins;
}

void bump(std::vector<HistogramBin>& bins, int value) {
  bins[std::clamp(value, 0, kHistogramTop)].count += 1;
}

}  // namespace

CorpusReport corpus_stats(const std::vector<AmrInstance>& corpus) {
  if (corpus.empty()) throw UsageError("corpus_stats: empty corpus");
  Accumulator nodes, edges, diameter, degree, length;
  CorpusReport report;
  report.diameter_histogram = make_bins();
  report.degree_histogram = make_bins();
  for (const auto& instance : corpus) {
    const auto stats = graph_stats(instance.graph);
    nodes.add(stats.node_count);
    edges.add(stats.edge_count);
    diameter.add(stats.diameter);
    bump(report.diameter_histogram, stats.diameter);
    for (int d : node_degrees(instance.graph)) {
      degree.add(d);
      bump(report.degree_histogram, d);
    }
    length.add(static_cast<std::int64_t>(instance.tokens().size()));
    (stats.is_dag ? report.dag_graphs : report.non_dag_graphs) += 1;
  }
  report.instances = static_cast<std::int64_t>(corpus.size());
  report.rows = {nodes.row("nodes"), edges.row("edges"), diameter.row("diameter"),
                 degree.row("degree"), length.row("sentence_length")};
  return report;
}

void write_report_tsv(const CorpusReport& report, std::ostream& out) {
  char buffer[128];
  out << "statistic\tmin\tmean\tmax\n";
  for (const auto& row : report.rows) {
    std::snprintf(buffer, sizeof buffer, "%.0f\t%.4f\t%.0f", row.min, row.mean, row.max);
    out << row.name << '\t' << buffer << '\n';
  }
  out << "count\tvalue\n";
  out << "instances\t" << report.instances << '\n';
  out << "dag\t" << report.dag_graphs << '\n';
  out << "non_dag\t" << report.non_dag_graphs << '\n';
  auto histogram = [&](const char* name, const std::vector<HistogramBin>& bins) {
    out << "histogram\t" << name << '\n';
    out << "bucket_low\tbucket_high\tcount\n";
    for (const auto& bin : bins) out << bin.low << '\t' << bin.high << '\t' << bin.count << '\n';
  };
  histogram("diameter", report.diameter_histogram);
  histogram("degree", report.degree_histogram);
}

}  // namespace dualgraph
