#include "bridgelab/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "bridgelab/error.hpp"

namespace bridgelab {

DirectedGraph DirectedGraph::from_arcs(
    const std::vector<std::pair<std::string, std::string>>& arcs) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> index;
  auto intern = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, static_cast<int>(labels.size()));
    if (inserted) labels.push_back(s);
    return it->second;
  };
  std::vector<std::pair<int, int>> idx;
  idx.reserve(arcs.size());
  for (const auto& [a, b] : arcs) {
    int ia = intern(a);
    int ib = intern(b);
    idx.emplace_back(ia, ib);
  }
  const int n = static_cast<int>(labels.size());
  return from_index_arcs(n, idx, std::move(labels));
}

DirectedGraph DirectedGraph::from_index_arcs(int n,
                                             const std::vector<std::pair<int, int>>& arcs,
                                             std::vector<std::string> labels) {
  if (n <= 0) throw Error(ErrorCode::Disconnected, "graph has no vertices");
  if (labels.empty()) {
    labels.resize(n);
    for (int i = 0; i < n; ++i) labels[i] = std::to_string(i);
  }
  if (static_cast<int>(labels.size()) != n)
    throw Error(ErrorCode::VertexUnknown, "label count does not match vertex count");

  std::vector<std::pair<int, int>> sorted = arcs;
  for (const auto& [a, b] : sorted) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw Error(ErrorCode::VertexUnknown, "arc endpoint out of range");
    if (a == b) throw Error(ErrorCode::LoopPresent, "loop at vertex " + labels[a]);
  }
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& [a, b] : sorted) {
    if (!std::binary_search(sorted.begin(), sorted.end(), std::make_pair(b, a)))
      throw Error(ErrorCode::SymmetryViolation,
                  "arc " + labels[a] + "->" + labels[b] + " has no reverse");
  }

  DirectedGraph g;
  g.offsets_.assign(n + 1, 0);
  for (const auto& [a, b] : sorted) ++g.offsets_[a + 1];
  std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
  g.targets_.reserve(sorted.size());
  g.sources_.reserve(sorted.size());
  for (const auto& [a, b] : sorted) {
    g.sources_.push_back(a);
    g.targets_.push_back(b);
  }
  g.labels_ = std::move(labels);
  for (int i = 0; i < n; ++i) {
    if (!g.index_.emplace(g.labels_[i], i).second)
      throw Error(ErrorCode::VertexUnknown, "duplicate vertex label " + g.labels_[i]);
    g.max_degree_ = std::max(g.max_degree_, g.degree(i));
  }
  g.reverse_.resize(g.targets_.size());
  for (int id = 0; id < g.num_arcs(); ++id)
    g.reverse_[id] = g.arc_id(g.targets_[id], g.sources_[id]);

  auto dist = distances_from(g, 0);
  for (int v = 0; v < n; ++v)
    if (dist[v] < 0)
      throw Error(ErrorCode::Disconnected,
                  "vertex " + g.labels_[v] + " unreachable from " + g.labels_[0]);
  return g;
}

int DirectedGraph::arc_id(int x, int y) const {
  if (!contains(x) || !contains(y)) return -1;
  auto nb = neighbors(x);
  auto it = std::lower_bound(nb.begin(), nb.end(), y);
  if (it == nb.end() || *it != y) return -1;
  return offsets_[x] + static_cast<int>(it - nb.begin());
}

int DirectedGraph::vertex(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end())
    throw Error(ErrorCode::VertexUnknown, "no vertex labelled '" + std::string(label) + "'");
  return it->second;
}

void DirectedGraph::require_vertex(int v) const {
  if (!contains(v)) throw Error(ErrorCode::VertexUnknown, "vertex index " + std::to_string(v));
}

bool Walk::simple() const {
  if (vertices.empty()) return false;
  std::vector<int> seen(vertices);
  std::sort(seen.begin(), seen.end());
  auto distinct = std::unique(seen.begin(), seen.end()) - seen.begin();
  if (closed()) return length() >= 1 && distinct == length();
  return distinct == length() + 1;
}

bool is_walk_of(const DirectedGraph& g, const Walk& w) {
  for (int v : w.vertices)
    if (!g.contains(v)) return false;
  for (size_t i = 0; i + 1 < w.vertices.size(); ++i)
    if (!g.has_arc(w.vertices[i], w.vertices[i + 1])) return false;
  return true;
}

Walk reverse_walk(const Walk& w) {
  return Walk{std::vector<int>(w.vertices.rbegin(), w.vertices.rend())};
}

Walk concatenate(const Walk& a, const Walk& b) {
  if (a.vertices.empty()) return b;
  if (b.vertices.empty()) return a;
  if (a.vertices.back() != b.vertices.front())
    throw Error(ErrorCode::DomainError, "walks do not meet");
  Walk out = a;
  out.vertices.insert(out.vertices.end(), b.vertices.begin() + 1, b.vertices.end());
  return out;
}

std::string format_walk(const DirectedGraph& g, const Walk& w) {
  std::string s;
  for (size_t i = 0; i < w.vertices.size(); ++i) {
    if (i) s += "->";
    s += g.label(w.vertices[i]);
  }
  return s;
}

std::vector<int> distances_from(const DirectedGraph& g, int x) {
  g.require_vertex(x);
  std::vector<int> dist(g.num_vertices(), -1);
  std::deque<int> queue{x};
  dist[x] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : g.neighbors(v)) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

int graph_distance(const DirectedGraph& g, int x, int y) {
  g.require_vertex(y);
  return distances_from(g, x)[y];
}

void for_each_simple_closed_walk(const DirectedGraph& g, int max_len,
                                 const std::function<bool(const Walk&)>& visit,
                                 long long budget) {
  if (max_len < 2) return;
  const int n = g.num_vertices();
  std::vector<char> on_path(n, 0);
  Walk w;
  long long emitted = 0;
  bool stop = false;

  // Depth-first extension of a simple open walk from `start`.
  std::function<void(int)> extend = [&](int start) {
    int v = w.vertices.back();
    int len = w.length();
    for (int u : g.neighbors(v)) {
      if (stop) return;
      if (u == start && len + 1 >= 2) {
        if (++emitted > budget)
          throw Error(ErrorCode::BudgetExceeded,
                      "more than " + std::to_string(budget) + " simple closed walks");
        w.vertices.push_back(u);
        if (!visit(w)) stop = true;
        w.vertices.pop_back();
      } else if (!on_path[u] && len + 1 < max_len) {
        on_path[u] = 1;
        w.vertices.push_back(u);
        extend(start);
        w.vertices.pop_back();
        on_path[u] = 0;
      }
    }
  };

  for (int s = 0; s < n && !stop; ++s) {
    w.vertices.assign(1, s);
    on_path[s] = 1;
    extend(s);
    on_path[s] = 0;
  }
}

std::vector<Walk> enumerate_simple_closed_walks(const DirectedGraph& g, int max_len,
                                                long long budget) {
  std::vector<Walk> out;
  for_each_simple_closed_walk(
      g, max_len,
      [&](const Walk& w) {
        out.push_back(w);
        return true;
      },
      budget);
  std::sort(out.begin(), out.end(),
            [](const Walk& a, const Walk& b) { return a.vertices < b.vertices; });
  return out;
}

namespace {

SpanningTree tree_from_parents(const DirectedGraph& g, int root, std::vector<int> parent) {
  SpanningTree t;
  t.root = root;
  t.parent = std::move(parent);
  t.in_tree.assign(g.num_arcs(), 0);
  t.depth.assign(g.num_vertices(), -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (v == root) continue;
    int p = t.parent[v];
    t.in_tree[g.arc_id(v, p)] = 1;
    t.in_tree[g.arc_id(p, v)] = 1;
  }
  // Depths by walking up; parents form a tree so this terminates.
  t.depth[root] = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    std::vector<int> chain;
    int u = v;
    while (t.depth[u] < 0) {
      chain.push_back(u);
      u = t.parent[u];
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) t.depth[*it] = t.depth[t.parent[*it]] + 1;
  }
  return t;
}

}  // namespace

SpanningTree spanning_tree(const DirectedGraph& g, int root) {
  g.require_vertex(root);
  std::vector<int> parent(g.num_vertices(), -2);
  parent[root] = -1;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : g.neighbors(v)) {
      if (parent[u] == -2) {
        parent[u] = v;
        queue.push_back(u);
      }
    }
  }
  return tree_from_parents(g, root, std::move(parent));
}

SpanningTree spanning_tree_from_edges(const DirectedGraph& g,
                                      const std::vector<std::pair<int, int>>& edges, int root) {
  g.require_vertex(root);
  const int n = g.num_vertices();
  if (static_cast<int>(edges.size()) != n - 1)
    throw Error(ErrorCode::NotSpanning, "a spanning tree needs " + std::to_string(n - 1) +
                                            " edges, got " + std::to_string(edges.size()));
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    if (!g.has_arc(a, b))
      throw Error(ErrorCode::NotSpanning, "tree edge " + g.label(a) + "-" + g.label(b) +
                                              " is not an edge of the graph");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> parent(n, -2);
  parent[root] = -1;
  std::deque<int> queue{root};
  int reached = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : adj[v]) {
      if (parent[u] == -2) {
        parent[u] = v;
        ++reached;
        queue.push_back(u);
      }
    }
  }
  if (reached != n) throw Error(ErrorCode::NotSpanning, "tree edges do not reach every vertex");
  return tree_from_parents(g, root, std::move(parent));
}

Walk tree_path(const SpanningTree& tree, int a, int b) {
  std::vector<int> up_a{a};
  std::vector<int> up_b{b};
  int u = a;
  int v = b;
  while (tree.depth[u] > tree.depth[v]) up_a.push_back(u = tree.parent[u]);
  while (tree.depth[v] > tree.depth[u]) up_b.push_back(v = tree.parent[v]);
  while (u != v) {
    up_a.push_back(u = tree.parent[u]);
    up_b.push_back(v = tree.parent[v]);
  }
  Walk w{std::move(up_a)};
  w.vertices.insert(w.vertices.end(), up_b.rbegin() + 1, up_b.rend());
  return w;
}

bool default_orientation(const DirectedGraph&, int, int) { return true; }

std::string two_cycle_id(const DirectedGraph& g, int x, int y) {
  if (x > y) std::swap(x, y);
  return "e:" + g.label(x) + "|" + g.label(y);
}

std::string basis_cycle_id(const DirectedGraph& g, int x, int y) {
  return "c:" + g.label(x) + ">" + g.label(y);
}

ClosedWalkBasis t_basis(const DirectedGraph& g, const SpanningTree& tree,
                        const OrientationRule& rule) {
  if (static_cast<int>(tree.parent.size()) != g.num_vertices() ||
      static_cast<int>(tree.in_tree.size()) != g.num_arcs())
    throw Error(ErrorCode::NotSpanning, "tree was built for a different graph");
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (v != tree.root && (tree.parent[v] < 0 || !g.has_arc(v, tree.parent[v])))
      throw Error(ErrorCode::NotSpanning, "vertex " + g.label(v) + " is not attached to the tree");
  }
  ClosedWalkBasis basis;
  basis.tree = tree;
  basis.num_vertices = g.num_vertices();
  basis.num_arcs = g.num_arcs();
  for (int x = 0; x < g.num_vertices(); ++x) {
    for (int y : g.neighbors(x)) {
      if (y < x) continue;
      int idx = static_cast<int>(basis.two_cycles.size());
      basis.two_cycles.push_back({two_cycle_id(g, x, y), Walk{{x, y, x}}, x, y});
      if (tree.contains_arc(g.arc_id(x, y))) continue;
      basis.off_tree.push_back(idx);
      int a = x;
      int b = y;
      if (!rule(g, x, y)) std::swap(a, b);
      // c_{a->b}: the off-tree arc followed by the tree walk back from b to a.
      Walk c = concatenate(Walk{{a, b}}, tree_path(tree, b, a));
      basis.chosen_cycles.push_back({basis_cycle_id(g, a, b), std::move(c), a, b});
    }
  }
  return basis;
}

}  // namespace bridgelab
