#include "moocgraph/actgraph.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace moocgraph {

namespace {

constexpr int kAbsent = -1;

// Dense local indexing of a graph's nodes (position in nodes()).
struct LocalIndex {
  std::array<int, kTokenCount> of{};

  explicit LocalIndex(const std::vector<Token>& nodes) {
    of.fill(kAbsent);
    for (std::size_t i = 0; i < nodes.size(); ++i) of[index_of(nodes[i])] = static_cast<int>(i);
  }
  int operator[](Token t) const { return of[index_of(t)]; }
};

// Collapsed simple digraph without loops: sorted, deduplicated adjacency.
std::vector<std::vector<int>> simple_adjacency(const ActivityGraph& g, const LocalIndex& idx) {
  std::vector<std::vector<int>> adj(g.num_nodes());
  for (const auto& e : g.edges()) {
    if (e.is_loop()) continue;
    adj[idx[e.from]].push_back(idx[e.to]);
  }
  for (auto& out : adj) {
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return adj;
}

class Tarjan {
 public:
  explicit Tarjan(const std::vector<std::vector<int>>& adj)
      : adj_(adj), index_(adj.size(), kAbsent), low_(adj.size(), 0), on_stack_(adj.size(), false) {}

  std::size_t run() {
    for (int v = 0; v < static_cast<int>(adj_.size()); ++v) {
      if (index_[v] == kAbsent) connect(v);
    }
    return components_;
  }

 private:
  void connect(int v) {
    index_[v] = low_[v] = next_index_++;
    stack_.push_back(v);
    on_stack_[v] = true;
    for (int w : adj_[v]) {
      if (index_[w] == kAbsent) {
        connect(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] == index_[v]) {
      int w = kAbsent;
      do {
        w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = false;
      } while (w != v);
      ++components_;
    }
  }

  const std::vector<std::vector<int>>& adj_;
  std::vector<int> index_;
  std::vector<int> low_;
  std::vector<bool> on_stack_;
  std::vector<int> stack_;
  int next_index_ = 0;
  std::size_t components_ = 0;
};

std::string format_fixed(double v, int precision) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, precision);
  return std::string(buf.data(), res.ptr);
}

std::string format_real(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

constexpr double kNodeBaseWidth = 0.5;
constexpr double kNodeWidthPerCentrality = 0.5;
constexpr double kNodeMaxWidth = 3.0;

}  // namespace

ActivityGraph::ActivityGraph(std::vector<Token> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
  for (const auto& e : edges_) {
    if (!contains(e.from) || !contains(e.to)) {
      throw std::invalid_argument("edge endpoint " + std::string(to_string(contains(e.from) ? e.to : e.from)) +
                                  " is not a node");
    }
  }
}

ActivityGraph ActivityGraph::from_sequence(std::span<const Token> tokens) {
  std::vector<Token> nodes(tokens.begin(), tokens.end());
  std::vector<Edge> edges;
  if (tokens.size() > 1) edges.reserve(tokens.size() - 1);
  for (std::size_t i = 1; i < tokens.size(); ++i) edges.push_back({tokens[i - 1], tokens[i]});
  return ActivityGraph(std::move(nodes), std::move(edges));
}

bool ActivityGraph::contains(Token t) const { return std::binary_search(nodes_.begin(), nodes_.end(), t); }

std::size_t ActivityGraph::indegree(Token t) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [t](const Edge& e) { return e.to == t; }));
}

std::size_t ActivityGraph::multiplicity(Edge edge) const {
  return static_cast<std::size_t>(std::count(edges_.begin(), edges_.end(), edge));
}

ActivityGraph build_graph(std::span<const Token> tokens) { return ActivityGraph::from_sequence(tokens); }

ActivityGraph build_graph(const FootprintSequence& seq) { return ActivityGraph::from_sequence(seq.tokens); }

double density(const ActivityGraph& g) {
  const std::size_t n = g.num_nodes();
  if (n <= 1) return 0.0;
  return static_cast<double>(g.num_edges()) / static_cast<double>(n * (n - 1));
}

std::size_t count_self_loops(const ActivityGraph& g) {
  return static_cast<std::size_t>(
      std::count_if(g.edges().begin(), g.edges().end(), [](const Edge& e) { return e.is_loop(); }));
}

std::size_t count_scc(const ActivityGraph& g) {
  LocalIndex idx(g.nodes());
  return Tarjan(simple_adjacency(g, idx)).run();
}

std::vector<CentralActivity> top_indegree(const ActivityGraph& g, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_indegree: k must be >= 1");
  const std::size_t n = g.num_nodes();
  std::array<std::size_t, kTokenCount> indeg{};
  for (const auto& e : g.edges()) ++indeg[index_of(e.to)];

  std::vector<CentralActivity> all;
  all.reserve(n);
  for (Token t : g.nodes()) {
    const double c = n > 1 ? static_cast<double>(indeg[index_of(t)]) / static_cast<double>(n - 1) : 0.0;
    all.push_back({t, c});
  }
  // nodes() is already in token order, so a stable sort settles ties.
  std::stable_sort(all.begin(), all.end(),
                   [](const CentralActivity& a, const CentralActivity& b) { return a.centrality > b.centrality; });
  all.resize(std::min(k, n));
  return all;
}

std::map<Edge, double> edge_betweenness(const ActivityGraph& g) {
  const std::size_t n = g.num_nodes();
  LocalIndex idx(g.nodes());
  const auto adj = simple_adjacency(g, idx);

  struct LocalEdge {
    int from;
    int to;
  };
  std::vector<LocalEdge> edges;
  for (int v = 0; v < static_cast<int>(n); ++v) {
    for (int w : adj[v]) edges.push_back({v, w});
  }

  // All-pairs BFS: hop distances and shortest-path counts.
  std::vector<std::vector<int>> dist(n, std::vector<int>(n, kAbsent));
  std::vector<std::vector<std::uint64_t>> sigma(n, std::vector<std::uint64_t>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<int> frontier;
    dist[s][s] = 0;
    sigma[s][s] = 1;
    frontier.push(static_cast<int>(s));
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (int w : adj[v]) {
        if (dist[s][w] == kAbsent) {
          dist[s][w] = dist[s][v] + 1;
          frontier.push(w);
        }
        if (dist[s][w] == dist[s][v] + 1) sigma[s][w] += sigma[s][v];
      }
    }
  }

  // Edge (v, w) lies on a shortest s-t path iff d(s,v) + 1 + d(w,t) = d(s,t);
  // it then carries sigma(s,v) * sigma(w,t) of the sigma(s,t) paths.
  std::vector<double> score(edges.size(), 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      if (s == t || dist[s][t] == kAbsent) continue;
      const double total = static_cast<double>(sigma[s][t]);
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const int v = edges[e].from;
        const int w = edges[e].to;
        if (dist[s][v] == kAbsent || dist[w][t] == kAbsent) continue;
        if (dist[s][v] + 1 + dist[w][t] != dist[s][t]) continue;
        score[e] += static_cast<double>(sigma[s][v] * sigma[w][t]) / total;
      }
    }
  }

  std::map<Edge, double> out;
  const double norm = n > 1 ? static_cast<double>(n * (n - 1)) : 1.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out.emplace(Edge{g.nodes()[edges[e].from], g.nodes()[edges[e].to]}, score[e] / norm);
  }
  return out;
}

std::optional<CentralTransition> central_transition(const ActivityGraph& g) {
  std::optional<CentralTransition> best;
  // Map iteration is in (from, to) order; strict > keeps the first maximum.
  for (const auto& [edge, value] : edge_betweenness(g)) {
    if (!best || value > best->betweenness) best = CentralTransition{edge, value};
  }
  return best;
}

GraphMetrics compute_metrics(const ActivityGraph& g) {
  GraphMetrics m;
  m.num_nodes = g.num_nodes();
  m.num_edges = g.num_edges();
  m.density = density(g);
  m.num_self_loops = count_self_loops(g);
  m.num_scc = count_scc(g);
  if (g.num_nodes() > 0) m.top_indegree = top_indegree(g, 3);
  m.central_transition = central_transition(g);
  return m;
}

std::string export_dot(const ActivityGraph& g, std::span<const Token> sequence, std::string_view graph_name) {
  std::ostringstream out;
  out << "digraph \"" << graph_name << "\" {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle, fixedsize=true, fontsize=10];\n";
  out << "  \"Be\" [shape=box, width=0.4, style=filled, fillcolor=lightgray];\n";
  out << "  \"En\" [shape=box, width=0.4, style=filled, fillcolor=lightgray];\n";

  if (g.num_nodes() > 0) {
    const auto ranked = top_indegree(g, g.num_nodes());
    for (Token t : g.nodes()) {
      const auto it = std::find_if(ranked.begin(), ranked.end(),
                                   [t](const CentralActivity& c) { return c.token == t; });
      const double c = it->centrality;
      out << "  \"" << to_string(t) << "\" [width=" << format_fixed(std::min(kNodeMaxWidth, kNodeBaseWidth + kNodeWidthPerCentrality * c), 3)
          << ", tooltip=\"indegree centrality " << format_real(c) << "\"];\n";
    }
  }

  if (!sequence.empty()) {
    out << "  \"Be\" -> \"" << to_string(sequence.front()) << "\" [style=dashed];\n";
  }
  std::map<Edge, std::size_t> multiplicity;
  for (const auto& e : g.edges()) ++multiplicity[e];
  for (const auto& [edge, count] : multiplicity) {
    out << "  \"" << to_string(edge.from) << "\" -> \"" << to_string(edge.to) << "\" [penwidth=" << count
        << ", weight=" << count << ", label=\"" << count << "\"];\n";
  }
  if (!sequence.empty()) {
    out << "  \"" << to_string(sequence.back()) << "\" -> \"En\" [style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

std::string metrics_csv_header() {
  return "sid,courseweek,setup,nodes,edges,density,self_loops,scc,central1,central2,central3,"
         "central_transition,transition_betweenness";
}

std::string metrics_csv_row(const SequenceKey& key, Setup setup, const GraphMetrics& m) {
  std::ostringstream out;
  out << key.student_id << ',' << key.courseweek << ',' << to_string(setup) << ',' << m.num_nodes << ','
      << m.num_edges << ',' << format_real(m.density) << ',' << m.num_self_loops << ',' << m.num_scc;
  for (std::size_t i = 0; i < 3; ++i) {
    out << ',';
    if (i < m.top_indegree.size()) out << to_string(m.top_indegree[i].token);
  }
  out << ',';
  if (m.central_transition) {
    out << to_string(m.central_transition->edge.from) << '>' << to_string(m.central_transition->edge.to) << ','
        << format_real(m.central_transition->betweenness);
  } else {
    out << ',';
  }
  return out.str();
}

}  // namespace moocgraph
