#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bridgelab {

/// Symmetric, connected, loop-free directed graph with dense vertex indices.
///
/// Vertices carry user labels; arcs are stored in CSR form, sorted by source
/// then target, and the position of an arc in that order is its arc id.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Build from labelled arcs. Vertex indices follow first appearance.
  static DirectedGraph from_arcs(
      const std::vector<std::pair<std::string, std::string>>& arcs);

  /// Build from index arcs over n vertices; labels default to "0".."n-1".
  static DirectedGraph from_index_arcs(int n,
                                       const std::vector<std::pair<int, int>>& arcs,
                                       std::vector<std::string> labels = {});

  int num_vertices() const { return static_cast<int>(offsets_.size()) - 1; }
  int num_arcs() const { return static_cast<int>(targets_.size()); }
  int num_edges() const { return num_arcs() / 2; }
  int max_out_degree() const { return max_degree_; }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Out-neighbours of v in increasing index order.
  std::span<const int> neighbors(int v) const {
    return {targets_.data() + offsets_[v], static_cast<size_t>(degree(v))};
  }

  /// Id of the arc x->y, or -1 if absent.
  int arc_id(int x, int y) const;
  bool has_arc(int x, int y) const { return arc_id(x, y) >= 0; }
  int arc_source(int id) const { return sources_[id]; }
  int arc_target(int id) const { return targets_[id]; }
  int first_arc(int v) const { return offsets_[v]; }
  /// Id of the reversed arc.
  int reverse_arc(int id) const { return reverse_[id]; }

  const std::string& label(int v) const { return labels_[v]; }
  /// Index of a labelled vertex; throws VertexUnknown.
  int vertex(std::string_view label) const;
  bool contains(int v) const { return v >= 0 && v < num_vertices(); }
  void require_vertex(int v) const;

 private:
  std::vector<int> offsets_{0};
  std::vector<int> targets_;
  std::vector<int> sources_;
  std::vector<int> reverse_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
  int max_degree_ = 0;
};

/// Vertex sequence x_0 -> ... -> x_n. Closed when x_n == x_0.
struct Walk {
  std::vector<int> vertices;

  int length() const { return vertices.empty() ? 0 : static_cast<int>(vertices.size()) - 1; }
  bool closed() const { return !vertices.empty() && vertices.front() == vertices.back(); }
  bool simple() const;
  bool operator==(const Walk&) const = default;
  auto operator<=>(const Walk&) const = default;
};

/// Throws VertexUnknown / MissingRate-free check: every step must be an arc.
bool is_walk_of(const DirectedGraph& g, const Walk& w);

Walk reverse_walk(const Walk& w);

/// Concatenate two walks where a ends at the start of b.
Walk concatenate(const Walk& a, const Walk& b);

std::string format_walk(const DirectedGraph& g, const Walk& w);

/// Shortest-walk length between x and y.
int graph_distance(const DirectedGraph& g, int x, int y);

/// BFS distances from x to every vertex.
std::vector<int> distances_from(const DirectedGraph& g, int x);

constexpr long long kDefaultWalkBudget = 5'000'000;

/// All simple closed walks of length 2..max_len, every base point and both
/// orientations, sorted lexicographically by vertex index sequence.
std::vector<Walk> enumerate_simple_closed_walks(const DirectedGraph& g, int max_len,
                                                long long budget = kDefaultWalkBudget);

/// Visit the same walks as enumerate_simple_closed_walks without storing
/// them; emission order is DFS order, not lexicographic. Stops early when the
/// visitor returns false.
void for_each_simple_closed_walk(const DirectedGraph& g, int max_len,
                                 const std::function<bool(const Walk&)>& visit,
                                 long long budget = kDefaultWalkBudget);

/// Symmetric spanning tree stored as parent pointers from a root.
struct SpanningTree {
  int root = 0;
  std::vector<int> parent;  // -1 at the root
  std::vector<int> depth;
  std::vector<char> in_tree;  // per arc id

  bool contains_arc(int arc) const { return in_tree[arc] != 0; }
  int num_edges() const { return static_cast<int>(parent.size()) - 1; }
};

/// BFS tree from root (neighbours visited in index order).
SpanningTree spanning_tree(const DirectedGraph& g, int root);

/// Tree from an explicit undirected edge list; throws NotSpanning unless the
/// edges form a spanning tree of g.
SpanningTree spanning_tree_from_edges(const DirectedGraph& g,
                                      const std::vector<std::pair<int, int>>& edges,
                                      int root = 0);

/// The unique simple tree walk from a to b.
Walk tree_path(const SpanningTree& tree, int a, int b);

/// Given an off-tree edge {x,y} with x<y, return true to use c_{x->y} and
/// false to use c_{y->x}.
using OrientationRule = std::function<bool(const DirectedGraph&, int x, int y)>;

bool default_orientation(const DirectedGraph& g, int x, int y);

struct BasisCycle {
  std::string id;
  Walk walk;
  int x = 0;  // defining arc x->y; for a two-cycle x<y
  int y = 0;
};

/// T-basis of closed walks: every two-cycle plus one chosen cycle c_e per
/// off-tree two-cycle e.
struct ClosedWalkBasis {
  SpanningTree tree;
  std::vector<BasisCycle> two_cycles;     // one per undirected edge, x<y
  std::vector<int> off_tree;              // indices into two_cycles
  std::vector<BasisCycle> chosen_cycles;  // aligned with off_tree
  int num_vertices = 0;
  int num_arcs = 0;
};

std::string two_cycle_id(const DirectedGraph& g, int x, int y);
std::string basis_cycle_id(const DirectedGraph& g, int x, int y);

ClosedWalkBasis t_basis(const DirectedGraph& g, const SpanningTree& tree,
                        const OrientationRule& rule = default_orientation);

}  // namespace bridgelab
