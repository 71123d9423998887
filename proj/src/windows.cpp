#include "bridgelab/windows.hpp"

#include <string>

#include "bridgelab/error.hpp"

namespace bridgelab {

LatticeWindow::LatticeWindow(int width, int height) : width_(width), height_(height) {
  if (width < 2 || height < 2)
    throw Error(ErrorCode::DimensionTooSmall, "lattice window " + std::to_string(width) + "x" +
                                                  std::to_string(height) + " has no face");
  std::vector<std::pair<int, int>> arcs;
  std::vector<std::string> labels(width * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      int v = vertex(c, r);
      labels[v] = std::to_string(c) + "," + std::to_string(r);
      if (c + 1 < width) {
        arcs.emplace_back(v, vertex(c + 1, r));
        arcs.emplace_back(vertex(c + 1, r), v);
      }
      if (r + 1 < height) {
        arcs.emplace_back(v, vertex(c, r + 1));
        arcs.emplace_back(vertex(c, r + 1), v);
      }
    }
  }
  graph_ = DirectedGraph::from_index_arcs(width * height, arcs, std::move(labels));
}

Walk LatticeWindow::face(int c, int r) const {
  return Walk{{vertex(c, r), vertex(c, r + 1), vertex(c + 1, r + 1), vertex(c + 1, r), vertex(c, r)}};
}

Walk LatticeWindow::horizontal_two_cycle(int c, int r) const {
  return Walk{{vertex(c, r), vertex(c + 1, r), vertex(c, r)}};
}

Walk LatticeWindow::vertical_two_cycle(int c, int r) const {
  return Walk{{vertex(c, r), vertex(c, r + 1), vertex(c, r)}};
}

bool LatticeWindow::face_interior(int c, int r, int margin) const {
  return c >= margin && r >= margin && c + 1 <= width_ - 1 - margin &&
         r + 1 <= height_ - 1 - margin;
}

bool LatticeWindow::vertex_interior(int v, int margin) const {
  int c = column(v);
  int r = row(v);
  return c >= margin && r >= margin && c <= width_ - 1 - margin && r <= height_ - 1 - margin;
}

double LatticeWindow::exit_rate(int v, double lambda) const {
  return lambda * (4 - graph_.degree(v));
}

std::string LatticeWindow::face_id(int c, int r) const {
  return "f:" + std::to_string(c) + "," + std::to_string(r);
}

DirectedGraph line_window(int radius) {
  if (radius < 1) throw Error(ErrorCode::DimensionTooSmall, "line window needs radius >= 1");
  int n = 2 * radius + 1;
  std::vector<std::pair<int, int>> arcs;
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = std::to_string(i - radius);
    if (i + 1 < n) {
      arcs.emplace_back(i, i + 1);
      arcs.emplace_back(i + 1, i);
    }
  }
  return DirectedGraph::from_index_arcs(n, arcs, std::move(labels));
}

DirectedGraph regular_tree_window(int delta, int depth) {
  if (delta < 2 || depth < 1)
    throw Error(ErrorCode::DimensionTooSmall, "regular tree window needs delta>=2, depth>=1");
  std::vector<std::pair<int, int>> arcs;
  std::vector<int> frontier{0};
  int n = 1;
  for (int level = 0; level < depth; ++level) {
    std::vector<int> next;
    for (int v : frontier) {
      int children = (v == 0) ? delta : delta - 1;
      for (int i = 0; i < children; ++i) {
        int u = n++;
        arcs.emplace_back(v, u);
        arcs.emplace_back(u, v);
        next.push_back(u);
      }
    }
    frontier = std::move(next);
  }
  return DirectedGraph::from_index_arcs(n, arcs);
}

std::vector<double> regular_tree_exit_rates(const DirectedGraph& g, int delta, double lambda) {
  std::vector<double> exit(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) exit[v] = lambda / delta * (delta - g.degree(v));
  return exit;
}

}  // namespace bridgelab
