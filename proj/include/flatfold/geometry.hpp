#pragma once

#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "flatfold/graph.hpp"

namespace flatfold {

/// Forced x-coordinates of a folded graph. Each component is anchored at its
/// lowest vertex (x = 0) with that vertex's first dart pointing toward +x.
struct CoordinateMap {
  std::vector<Rational> x;
  std::vector<int> dart_direction;  // +1 or -1 per dart: the side the edge extends to from its origin
  std::vector<VertexId> anchors;    // per component
};

struct ClosureViolation {
  EdgeId edge = no_id;
};

using CoordinateResult = std::variant<CoordinateMap, ClosureViolation>;

/// Depth-first placement of every vertex. Travel direction reverses across each
/// angle except flat ones. Fails on the first non-tree edge (in DFS order) whose
/// prescribed length or direction disagrees with the placement.
/// Requires 0 or 2 flat angles at every vertex.
inline CoordinateResult assign_coordinates(const EmbeddedGraph& g, const FlatSet& flat = {}) {
  CoordinateMap map;
  map.x.assign(g.vertex_count(), 0);
  map.dart_direction.assign(g.dart_count(), 0);
  std::vector<bool> placed(g.vertex_count(), false);
  auto is_flat = [&](AngleId a) { return a < flat.size() && flat[a]; };

  auto seed = [&](VertexId v, DartId from, int dir) {
    auto rot = g.rotation(v);
    DartId d = from;
    for (std::size_t i = 0; i < rot.size(); ++i) {
      map.dart_direction[d] = dir;
      if (is_flat(g.angle_after(d))) dir = -dir;
      d = g.rotation_next(d);
    }
    if (dir != map.dart_direction[from])
      throw std::logic_error("assign_coordinates: odd number of flat angles at a vertex");
  };

  struct Frame {
    VertexId v;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (ComponentId c = 0; c < g.component_count(); ++c) {
    const VertexId root = g.component(c).vertices.front();
    map.anchors.push_back(root);
    placed[root] = true;
    map.x[root] = 0;
    if (g.degree(root) == 0) continue;
    seed(root, g.rotation(root).front(), +1);
    stack.push_back({root, 0});
    while (!stack.empty()) {
      Frame& top = stack.back();
      auto rot = g.rotation(top.v);
      if (top.next == rot.size()) {
        stack.pop_back();
        continue;
      }
      const DartId d = rot[top.next++];
      const VertexId w = g.head(d);
      const int dir = map.dart_direction[d];
      Rational expected = map.x[top.v];
      if (dir > 0)
        expected += g.dart_length(d);
      else
        expected -= g.dart_length(d);
      if (!placed[w]) {
        placed[w] = true;
        map.x[w] = expected;
        seed(w, EmbeddedGraph::twin(d), -dir);
        stack.push_back({w, 0});
      } else if (map.x[w] != expected || map.dart_direction[EmbeddedGraph::twin(d)] != -dir) {
        return ClosureViolation{EmbeddedGraph::edge_of(d)};
      }
    }
  }
  return map;
}

struct ClosureCheck {
  bool ok = false;
  std::size_t edge_count = 0;
  Rational alternating_sum;
};

/// A cycle can lie on a line only if it has an even number of edges whose
/// alternating length sum vanishes.
inline ClosureCheck face_closure_check(const FaceCycle& f) {
  ClosureCheck check;
  check.edge_count = f.entries.size();
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    if (i % 2 == 0)
      check.alternating_sum += f.entries[i].length;
    else
      check.alternating_sum -= f.entries[i].length;
  }
  check.ok = check.edge_count % 2 == 0 && check.alternating_sum == 0;
  return check;
}

inline Rational folded_diameter(const CoordinateMap& coords, std::span<const VertexId> vertices) {
  if (vertices.empty()) throw std::invalid_argument("folded_diameter: empty vertex set");
  Rational lo = coords.x.at(vertices.front());
  Rational hi = lo;
  for (VertexId v : vertices) {
    const Rational& x = coords.x.at(v);
    if (x < lo) lo = x;
    if (x > hi) hi = x;
  }
  return hi - lo;
}

inline Rational face_diameter(const EmbeddedGraph& g, const CoordinateMap& coords, FaceId f) {
  const auto vs = g.face_vertices(f);
  return folded_diameter(coords, vs);
}

inline Rational component_diameter(const EmbeddedGraph& g, const CoordinateMap& coords, ComponentId c) {
  return folded_diameter(coords, g.component(c).vertices);
}

}  // namespace flatfold
