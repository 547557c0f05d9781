#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dualgraph {

struct AmrNode {
  int id = 0;
  // Empty for attribute constants, which have no variable.
  std::string variable;
  std::string label;
};

struct AmrEdge {
  int source = 0;
  std::string relation;
  int target = 0;
};

// Rooted, directed, edge-labeled AMR graph. Node ids are dense and equal
// to their index in `nodes`; edges keep the order in which they appear in
// the PENMAN source.
class AmrGraph {
 public:
  AmrGraph() = default;
  AmrGraph(std::vector<AmrNode> nodes, std::vector<AmrEdge> edges, int root);

  const std::vector<AmrNode>& nodes() const { return nodes_; }
  const std::vector<AmrEdge>& edges() const { return edges_; }
  int root() const { return root_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Index of the node carrying `variable`, or -1.
  int find_variable(std::string_view variable) const;

 private:
  std::vector<AmrNode> nodes_;
  std::vector<AmrEdge> edges_;
  int root_ = 0;
};

// Parses a single PENMAN expression. Throws ParseError with the byte
// offset of the problem.
AmrGraph parse_penman(std::string_view text);

enum class ViewKind : std::uint8_t { top_down, bottom_up };

// Unlabeled Levi graph of an AmrGraph. View-node ids 0..n-1 are the
// concept nodes, n..n+m-1 the relation nodes in edge order.
struct GraphView {
  std::vector<std::string> node_labels;
  std::vector<std::vector<int>> in_neighbors;
  std::vector<std::vector<int>> out_neighbors;
  int root = 0;
  ViewKind kind = ViewKind::top_down;
  // Number of concept nodes; the rest are relation nodes.
  std::size_t concept_count = 0;

  std::size_t node_count() const { return node_labels.size(); }
  std::size_t edge_count() const;
  bool is_relation(int node) const { return static_cast<std::size_t>(node) >= concept_count; }
};

GraphView levi_transform(const AmrGraph& graph);

// Flips every edge. Throws UsageError on a bottom_up view unless
// `check_kind` is false, in which case the kind simply toggles.
GraphView reverse_view(const GraphView& view, bool check_kind = true);

// Depth-first preorder of the top_down view from its root; unreachable
// nodes follow in id order.
std::vector<int> dfs_order(const GraphView& view);

}  // namespace dualgraph
