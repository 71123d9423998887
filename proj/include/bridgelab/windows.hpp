#pragma once

#include <vector>

#include "bridgelab/graph.hpp"

namespace bridgelab {

/// Finite width x height window of the square lattice Z^2.
///
/// Vertex (c,r) has index r*width + c and label "c,r". The face f_(c,r) is
/// the clockwise walk (c,r)->(c,r+1)->(c+1,r+1)->(c+1,r)->(c,r).
class LatticeWindow {
 public:
  LatticeWindow(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  const DirectedGraph& graph() const { return graph_; }
  int vertex(int c, int r) const { return r * width_ + c; }
  int column(int v) const { return v % width_; }
  int row(int v) const { return v / width_; }
  bool inside(int c, int r) const { return c >= 0 && r >= 0 && c < width_ && r < height_; }

  /// Clockwise face with lower-left corner (c,r); needs c<width-1, r<height-1.
  Walk face(int c, int r) const;
  /// e_{x,1} = (x -> x+v1 -> x) and e_{x,2} = (x -> x+v2 -> x).
  Walk horizontal_two_cycle(int c, int r) const;
  Walk vertical_two_cycle(int c, int r) const;

  int num_faces() const { return (width_ - 1) * (height_ - 1); }

  /// True when every vertex of the face / edge lies at least `margin` steps
  /// inside the window.
  bool face_interior(int c, int r, int margin) const;
  bool vertex_interior(int v, int margin) const;

  /// Rate leaving the window from v for a walk on Z^2 with rate lambda per arc.
  double exit_rate(int v, double lambda) const;

  std::string face_id(int c, int r) const;

 private:
  int width_;
  int height_;
  DirectedGraph graph_;
};

/// Path graph -radius..radius; vertex i has index i+radius and label "i".
DirectedGraph line_window(int radius);

/// Ball of the given depth in the Delta-regular tree, BFS-indexed from the
/// root (index 0).
DirectedGraph regular_tree_window(int delta, int depth);

/// Per-vertex rate of leaving a regular-tree window for the walk with rate
/// lambda/Delta per arc.
std::vector<double> regular_tree_exit_rates(const DirectedGraph& g, int delta, double lambda);

}  // namespace bridgelab
