#include "dualgraph/amr_graph.hpp"

#include <stdexcept>

#include "dualgraph/errors.hpp"

namespace dualgraph {

AmrGraph::AmrGraph(std::vector<AmrNode> nodes, std::vector<AmrEdge> edges, int root)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), root_(root) {
  const int n = static_cast<int>(nodes_.size());
  if (n == 0) throw DataError("AMR graph has no nodes");
  if (root_ < 0 || root_ >= n) throw DataError("AMR root is not a valid node id");
  for (int i = 0; i < n; ++i) {
    if (nodes_[i].id != i) throw DataError("AMR node ids must be dense and ordered");
  }
  for (const auto& e : edges_) {
    if (e.source < 0 || e.source >= n || e.target < 0 || e.target >= n) {
      throw DataError("AMR edge endpoint out of range: " + e.relation);
    }
  }
}

int AmrGraph::find_variable(std::string_view variable) const {
  if (variable.empty()) return -1;
  for (const auto& node : nodes_) {
    if (node.variable == variable) return node.id;
  }
  return -1;
}

std::size_t GraphView::edge_count() const {
  std::size_t total = 0;
  for (const auto& in : in_neighbors) total += in.size();
  return total;
}

GraphView levi_transform(const AmrGraph& graph) {
  const std::size_t n = graph.node_count();
  const std::size_t m = graph.edge_count();

  GraphView view;
  view.kind = ViewKind::top_down;
  view.root = graph.root();
  view.concept_count = n;
  view.node_labels.reserve(n + m);
  for (const auto& node : graph.nodes()) view.node_labels.push_back(node.label);
  for (const auto& edge : graph.edges()) view.node_labels.push_back(edge.relation);

  view.in_neighbors.assign(n + m, {});
  view.out_neighbors.assign(n + m, {});
  for (std::size_t k = 0; k < m; ++k) {
    const auto& edge = graph.edges()[k];
    const int rel = static_cast<int>(n + k);
    view.out_neighbors[edge.source].push_back(rel);
    view.in_neighbors[rel].push_back(edge.source);
    view.out_neighbors[rel].push_back(edge.target);
    view.in_neighbors[edge.target].push_back(rel);
  }
  return view;
}

GraphView reverse_view(const GraphView& view, bool check_kind) {
  if (check_kind && view.kind != ViewKind::top_down) {
    throw UsageError("reverse_view expects a top_down view");
  }
  GraphView reversed = view;
  reversed.in_neighbors = view.out_neighbors;
  reversed.out_neighbors = view.in_neighbors;
  reversed.kind = view.kind == ViewKind::top_down ? ViewKind::bottom_up : ViewKind::top_down;
  return reversed;
}

std::vector<int> dfs_order(const GraphView& view) {
  const std::size_t total = view.node_count();
  std::vector<int> order;
  order.reserve(total);
  if (total == 0) return order;

  std::vector<char> visited(total, 0);
  // Explicit stack of (node, next child index) so deep graphs cannot
  // overflow the call stack.
  std::vector<std::pair<int, std::size_t>> stack;
  visited[view.root] = 1;
  order.push_back(view.root);
  stack.emplace_back(view.root, 0);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& children = view.out_neighbors[node];
    if (next == children.size()) {
      stack.pop_back();
      continue;
    }
    const int child = children[next++];
    if (visited[child]) continue;
    visited[child] = 1;
    order.push_back(child);
    stack.emplace_back(child, 0);
  }
  for (std::size_t i = 0; i < total; ++i) {
    if (!visited[i]) order.push_back(static_cast<int>(i));
  }
  return order;
}

}  // namespace dualgraph
