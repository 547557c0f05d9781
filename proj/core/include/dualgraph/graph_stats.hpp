#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "dualgraph/amr_graph.hpp"
#include "dualgraph/corpus.hpp"

namespace dualgraph {

struct Rational {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct GraphStats {
  int node_count = 0;
  int edge_count = 0;
  int diameter = 0;
  int max_out_degree = 0;
  // Mean undirected degree, 2m / n, in lowest terms.
  Rational mean_degree;
  bool is_dag = true;
};

// Undirected degree (in + out) of every node; a self-loop counts twice.
std::vector<int> node_degrees(const AmrGraph& graph);
std::vector<int> out_degrees(const AmrGraph& graph);

// Longest undirected shortest path, in hops, over all connected pairs.
int graph_diameter(const AmrGraph& graph);
bool is_dag(const AmrGraph& graph);

GraphStats graph_stats(const AmrGraph& graph);

struct SummaryRow {
  std::string name;
  double min = 0;
  double mean = 0;
  double max = 0;
};

struct HistogramBin {
  int low = 0;
  int high = 0;  // exclusive
  std::int64_t count = 0;
};

struct CorpusReport {
  std::int64_t instances = 0;
  std::int64_t dag_graphs = 0;
  std::int64_t non_dag_graphs = 0;
  // nodes, edges, diameter, degree, sentence_length, in that order.
  std::vector<SummaryRow> rows;
  std::vector<HistogramBin> diameter_histogram;
  std::vector<HistogramBin> degree_histogram;
};

// Unit-width histogram bins 0..kHistogramTop; larger values land in the
// top bin.
inline constexpr int kHistogramTop = 20;

CorpusReport corpus_stats(const std::vector<AmrInstance>& corpus);

// TSV rendering: summary rows, graph counts, then both histograms.
void write_report_tsv(const CorpusReport& report, std::ostream& out);

}  // namespace dualgraph
