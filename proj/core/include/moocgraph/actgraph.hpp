#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moocgraph/footprint.hpp"
#include "moocgraph/token.hpp"

namespace moocgraph {

struct Edge {
  Token from = Token::PL;
  Token to = Token::PL;

  auto operator<=>(const Edge&) const = default;
  bool is_loop() const { return from == to; }
};

// Directed multigraph over activity tokens. Every consecutive token pair of
// the generating sequence contributes one weight-1 edge, so self-loops and
// parallel edges are kept.
class ActivityGraph {
 public:
  ActivityGraph() = default;

  // Explicit construction; nodes are deduplicated and sorted. Throws
  // std::invalid_argument if an edge endpoint is not a node.
  ActivityGraph(std::vector<Token> nodes, std::vector<Edge> edges);

  static ActivityGraph from_sequence(std::span<const Token> tokens);

  // Nodes in token enum order.
  const std::vector<Token>& nodes() const { return nodes_; }
  // Edges in sequence order.
  const std::vector<Edge>& edges() const { return edges_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  bool contains(Token t) const;

  std::size_t indegree(Token t) const;
  std::size_t multiplicity(Edge e) const;

 private:
  std::vector<Token> nodes_;
  std::vector<Edge> edges_;
};

ActivityGraph build_graph(std::span<const Token> tokens);
ActivityGraph build_graph(const FootprintSequence& seq);

// m / (n(n-1)); 0.0 when n <= 1. Exceeds 1 when loops/parallel edges abound.
double density(const ActivityGraph& g);

std::size_t count_self_loops(const ActivityGraph& g);

// Strongly connected components (Tarjan); 0 for the empty graph.
std::size_t count_scc(const ActivityGraph& g);

struct CentralActivity {
  Token token = Token::PL;
  double centrality = 0.0;

  bool operator==(const CentralActivity&) const = default;
};

// Indegree centrality indegree(v)/(n-1), counting parallel edges and loops;
// 0 when n == 1. Sorted descending, ties by token order; min(k, n) entries.
// Throws std::invalid_argument if k == 0.
std::vector<CentralActivity> top_indegree(const ActivityGraph& g, std::size_t k = 3);

struct CentralTransition {
  Edge edge;
  double betweenness = 0.0;

  bool operator==(const CentralTransition&) const = default;
};

// Normalized edge betweenness of every distinct non-loop edge, computed on
// the collapsed simple digraph with unweighted shortest paths:
//   sum over ordered (s, t), s != t, sigma(s,t) > 0 of sigma(s,t|e)/sigma(s,t),
// times 1/(n(n-1)). Pairs are accumulated in (s, t) token order.
std::map<Edge, double> edge_betweenness(const ActivityGraph& g);

// Edge with maximum betweenness (ties by (from, to) token order); nullopt if
// the graph has no non-loop edge.
std::optional<CentralTransition> central_transition(const ActivityGraph& g);

struct GraphMetrics {
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  double density = 0.0;
  std::size_t num_self_loops = 0;
  std::size_t num_scc = 0;
  std::vector<CentralActivity> top_indegree;
  std::optional<CentralTransition> central_transition;

  bool operator==(const GraphMetrics&) const = default;
};

GraphMetrics compute_metrics(const ActivityGraph& g);

// Graphviz digraph with Be/En sentinels (Be -> first token, last token -> En).
// Node width grows linearly with indegree centrality, edge penwidth equals
// parallel-edge multiplicity. Sentinels never enter metric computation.
std::string export_dot(const ActivityGraph& g, std::span<const Token> sequence,
                       std::string_view graph_name = "footprint");

std::string metrics_csv_header();
std::string metrics_csv_row(const SequenceKey& key, Setup setup, const GraphMetrics& m);

}  // namespace moocgraph
