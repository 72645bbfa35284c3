#pragma once

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "flatfold/csp.hpp"
#include "flatfold/decider.hpp"
#include "flatfold/io.hpp"

namespace flatfold {

/// SVG drawing of the constraint graph over the input graph (in gray).
/// Vertex clauses sit on their vertex, face clauses near the middle of their
/// face; layout is a plain circle and only meant for eyeballing small cases.
inline std::string emit_diagram(const Instance& inst, const std::vector<ComponentArtifacts>& artifacts) {
  const EmbeddedGraph& g = inst.graph;
  const double size = 640, mid = size / 2, radius = size * 0.36;
  struct Point {
    double x = 0, y = 0;
  };
  std::vector<Point> at(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const double t = 2 * std::numbers::pi * v / std::max<std::size_t>(1, g.vertex_count());
    at[v] = {mid + radius * std::cos(t), mid + radius * std::sin(t)};
  }

  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(1);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\">\n";
  if (g.vertex_count() == 0) {
    out << "</svg>\n";
    return out.str();
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const auto [u, w] = g.edge(e).ends;
    if (u == w) {
      out << "<circle class=\"graph-edge\" cx=\"" << at[u].x << "\" cy=\"" << at[u].y - 14
          << "\" r=\"14\" fill=\"none\" stroke=\"#bbb\" stroke-width=\"3\"/>\n";
      continue;
    }
    out << "<line class=\"graph-edge\" x1=\"" << at[u].x << "\" y1=\"" << at[u].y << "\" x2=\"" << at[w].x
        << "\" y2=\"" << at[w].y << "\" stroke=\"#bbb\" stroke-width=\"3\"/>\n";
  }

  for (const auto& art : artifacts) {
    const CspInstance& csp = art.csp;
    std::vector<Point> node(csp.clauses.size());
    std::size_t next = 0;
    for (const auto& block : csp.face_blocks) {
      const auto verts = g.face_vertices(block.face);
      Point centre;
      for (VertexId v : verts) {
        centre.x += at[v].x / static_cast<double>(verts.size());
        centre.y += at[v].y / static_cast<double>(verts.size());
      }
      const bool outside = block.face == art.exterior;
      for (std::size_t i = 0; i < block.clauses.size(); ++i, ++next) {
        const double t = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(block.clauses.size());
        const double spread = outside ? radius * 1.25 : 10.0 + 6.0 * static_cast<double>(i);
        node[next] = outside ? Point{mid + spread * std::cos(t + 0.3), mid + spread * std::sin(t + 0.3)}
                             : Point{centre.x + spread * std::cos(t), centre.y + spread * std::sin(t)};
      }
    }
    for (; next < csp.clauses.size(); ++next) node[next] = at[csp.vertex_of_clause[next]];

    for (VarId v : csp.variables) {
      const auto& occ = csp.occurrence(v);
      out << "<line class=\"variable\" data-var=\"" << to_string(v) << "\" x1=\"" << node[occ.red].x << "\" y1=\""
          << node[occ.red].y << "\" x2=\"" << node[occ.blue].x << "\" y2=\"" << node[occ.blue].y
          << "\" stroke=\"#444\" stroke-width=\"1\"/>\n";
    }
    for (std::size_t i = 0; i < csp.clauses.size(); ++i) {
      const bool red = csp.clauses[i].color == Color::red;
      out << "<circle class=\"clause " << (red ? "red" : "blue") << "\" cx=\"" << node[i].x << "\" cy=\""
          << node[i].y << "\" r=\"7\" fill=\"" << (red ? "#d33" : "#36c") << "\"/>\n";
      out << "<text x=\"" << node[i].x << "\" y=\"" << node[i].y + 3
          << "\" font-size=\"8\" text-anchor=\"middle\" fill=\"white\">" << csp.clauses[i].target << "</text>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace flatfold
