#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "bridgelab/graph.hpp"

namespace testsupport {

// Random connected symmetric graph: a random recursive tree plus extra edges.
inline bridgelab::DirectedGraph random_graph(std::mt19937_64& rng, int n, int extra_edges) {
  std::set<std::pair<int, int>> edges;
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    edges.insert({pick(rng), v});
  }
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int tries = 0; static_cast<int>(edges.size()) < n - 1 + extra_edges && tries < 1000; ++tries) {
    int a = any(rng);
    int b = any(rng);
    if (a == b) continue;
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<std::pair<int, int>> arcs;
  for (auto [a, b] : edges) {
    arcs.emplace_back(a, b);
    arcs.emplace_back(b, a);
  }
  return bridgelab::DirectedGraph::from_index_arcs(n, arcs);
}

}  // namespace testsupport
