#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "flatfold/rational.hpp"

namespace flatfold {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using DartId = std::uint32_t;
using AngleId = std::uint32_t;
using FaceId = std::uint32_t;
using ComponentId = std::uint32_t;

inline constexpr std::uint32_t no_id = std::numeric_limits<std::uint32_t>::max();

// User-facing input problems. Everything else that throws is a bug.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedInput : public InputError {
 public:
  using InputError::InputError;
};

class NonPlanarEmbedding : public InputError {
 public:
  using InputError::InputError;
};

class NonPositiveLength : public InputError {
 public:
  using InputError::InputError;
};

class UnknownVertex : public InputError {
 public:
  using InputError::InputError;
};

struct Edge {
  std::string name;
  std::array<VertexId, 2> ends{};
  Length length;
};

/// The corner at `vertex` between dart `first` and its rotation successor `second`.
struct Angle {
  VertexId vertex = no_id;
  DartId first = no_id;
  DartId second = no_id;
  FaceId face = no_id;
};

/// Boundary walk of one face. Entry i is the edge of darts[i] followed by the
/// angle between that edge and the edge of darts[i + 1].
struct Face {
  std::vector<DartId> darts;
  std::vector<AngleId> angles;
};

struct FaceEntry {
  Length length;
  AngleId angle = no_id;
};

/// A face expanded to a simple cycle of (edge length, angle after the edge).
struct FaceCycle {
  FaceId face = no_id;
  std::vector<FaceEntry> entries;
  bool is_exterior = false;
};

struct Component {
  std::vector<VertexId> vertices;
  std::vector<EdgeId> edges;
  std::vector<FaceId> faces;
};

class EmbeddedGraph {
 public:
  EmbeddedGraph() = default;

  /// `rotation[v]` lists the darts leaving v in counterclockwise order. Dart 2e+k is end k of edge e.
  EmbeddedGraph(std::vector<std::string> vertex_names, std::vector<Edge> edges,
                std::vector<std::vector<DartId>> rotation, std::optional<DartId> exterior = std::nullopt)
      : vertex_names_(std::move(vertex_names)), edges_(std::move(edges)), rotation_(std::move(rotation)),
        exterior_dart_(exterior) {
    validate_structure();
    build_faces();
    build_components();
    check_euler();
  }

  static constexpr DartId dart(EdgeId e, unsigned end) { return 2 * e + end; }
  static constexpr EdgeId edge_of(DartId d) { return d / 2; }
  static constexpr unsigned end_of(DartId d) { return d % 2; }
  static constexpr DartId twin(DartId d) { return d ^ 1U; }

  std::size_t vertex_count() const { return vertex_names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t dart_count() const { return 2 * edges_.size(); }
  std::size_t face_count() const { return faces_.size(); }
  std::size_t angle_count() const { return angles_.size(); }
  std::size_t component_count() const { return components_.size(); }

  const std::string& vertex_name(VertexId v) const { return vertex_names_.at(v); }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const Length& length(EdgeId e) const { return edges_[e].length; }
  const Length& dart_length(DartId d) const { return edges_[edge_of(d)].length; }

  VertexId origin(DartId d) const { return edges_[edge_of(d)].ends[end_of(d)]; }
  VertexId head(DartId d) const { return origin(twin(d)); }

  std::span<const DartId> rotation(VertexId v) const { return rotation_.at(v); }
  std::size_t degree(VertexId v) const { return rotation_.at(v).size(); }

  DartId rotation_next(DartId d) const {
    const auto& rot = rotation_[origin(d)];
    return rot[(rotation_pos_[d] + 1) % rot.size()];
  }
  DartId rotation_prev(DartId d) const {
    const auto& rot = rotation_[origin(d)];
    return rot[(rotation_pos_[d] + rot.size() - 1) % rot.size()];
  }

  const Face& face(FaceId f) const { return faces_.at(f); }
  FaceId face_of(DartId d) const { return face_of_dart_.at(d); }

  const Angle& angle(AngleId a) const { return angles_.at(a); }
  /// The angle between d and its rotation successor.
  AngleId angle_after(DartId d) const { return angle_of_dart_.at(d); }

  /// Angles at v in rotation order, one per dart.
  std::vector<AngleId> angles_at_vertex(VertexId v) const {
    if (v >= vertex_count()) throw UnknownVertex("unknown vertex index " + std::to_string(v));
    std::vector<AngleId> out;
    out.reserve(rotation_[v].size());
    for (DartId d : rotation_[v]) out.push_back(angle_of_dart_[d]);
    return out;
  }

  const Component& component(ComponentId c) const { return components_.at(c); }
  ComponentId component_of(VertexId v) const { return component_of_vertex_.at(v); }
  ComponentId component_of_face(FaceId f) const { return component_of_vertex_[origin(faces_[f].darts.front())]; }

  std::optional<DartId> exterior_dart() const { return exterior_dart_; }
  std::optional<FaceId> exterior_face() const {
    if (!exterior_dart_) return std::nullopt;
    return face_of_dart_[*exterior_dart_];
  }

  /// Vertices met on the boundary walk of f (with repetitions at cut vertices).
  std::vector<VertexId> face_vertices(FaceId f) const {
    std::vector<VertexId> out;
    for (DartId d : faces_.at(f).darts) out.push_back(origin(d));
    return out;
  }

  FaceCycle face_cycle(FaceId f) const {
    FaceCycle cycle;
    cycle.face = f;
    const Face& fc = faces_.at(f);
    cycle.entries.reserve(fc.darts.size());
    for (std::size_t i = 0; i < fc.darts.size(); ++i)
      cycle.entries.push_back({dart_length(fc.darts[i]), fc.angles[i]});
    cycle.is_exterior = exterior_face() == f;
    return cycle;
  }

 private:
  void validate_structure() {
    if (rotation_.size() != vertex_names_.size())
      throw MalformedInput("rotation table size does not match vertex count");
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      for (VertexId v : edges_[e].ends)
        if (v >= vertex_names_.size()) throw MalformedInput("edge \"" + edges_[e].name + "\" has an unknown end");
      if (edges_[e].length <= 0)
        throw NonPositiveLength("edge \"" + edges_[e].name + "\" has non-positive length " +
                                format_rational(edges_[e].length));
    }
    rotation_pos_.assign(dart_count(), no_id);
    for (VertexId v = 0; v < rotation_.size(); ++v) {
      for (std::uint32_t i = 0; i < rotation_[v].size(); ++i) {
        const DartId d = rotation_[v][i];
        if (d >= dart_count()) throw MalformedInput("rotation of \"" + vertex_names_[v] + "\" names a missing dart");
        if (rotation_pos_[d] != no_id)
          throw MalformedInput("dart " + dart_label(d) + " appears more than once in the rotation system");
        if (origin(d) != v)
          throw MalformedInput("dart " + dart_label(d) + " listed in the rotation of \"" + vertex_names_[v] +
                               "\" but originates at \"" + vertex_names_[origin(d)] + "\"");
        rotation_pos_[d] = i;
      }
    }
    for (DartId d = 0; d < dart_count(); ++d)
      if (rotation_pos_[d] == no_id) throw MalformedInput("dart " + dart_label(d) + " is missing from the rotation");
    if (exterior_dart_ && *exterior_dart_ >= dart_count()) throw MalformedInput("exterior names a missing dart");
  }

  // Successor rule: twin, then the dart preceding it in rotation. Bounded faces
  // come out counterclockwise with the face on the left.
  void build_faces() {
    face_of_dart_.assign(dart_count(), no_id);
    angle_of_dart_.assign(dart_count(), no_id);
    for (DartId start = 0; start < dart_count(); ++start) {
      if (face_of_dart_[start] != no_id) continue;
      const auto f = static_cast<FaceId>(faces_.size());
      Face face;
      DartId d = start;
      do {
        face_of_dart_[d] = f;
        face.darts.push_back(d);
        d = rotation_prev(twin(d));
      } while (d != start);
      const std::size_t k = face.darts.size();
      for (std::size_t i = 0; i < k; ++i) {
        const DartId first = face.darts[(i + 1) % k];
        const auto a = static_cast<AngleId>(angles_.size());
        angles_.push_back({origin(first), first, rotation_next(first), f});
        angle_of_dart_[first] = a;
        face.angles.push_back(a);
      }
      faces_.push_back(std::move(face));
    }
  }

  void build_components() {
    component_of_vertex_.assign(vertex_count(), no_id);
    std::vector<VertexId> stack;
    for (VertexId root = 0; root < vertex_count(); ++root) {
      if (component_of_vertex_[root] != no_id) continue;
      const auto c = static_cast<ComponentId>(components_.size());
      Component comp;
      component_of_vertex_[root] = c;
      stack.push_back(root);
      while (!stack.empty()) {
        const VertexId v = stack.back();
        stack.pop_back();
        comp.vertices.push_back(v);
        for (DartId d : rotation_[v]) {
          if (end_of(d) == 0) comp.edges.push_back(edge_of(d));
          const VertexId w = head(d);
          if (component_of_vertex_[w] == no_id) {
            component_of_vertex_[w] = c;
            stack.push_back(w);
          }
        }
      }
      std::sort(comp.vertices.begin(), comp.vertices.end());
      std::sort(comp.edges.begin(), comp.edges.end());
      components_.push_back(std::move(comp));
    }
    for (FaceId f = 0; f < faces_.size(); ++f) components_[component_of_face(f)].faces.push_back(f);
  }

  void check_euler() const {
    for (const Component& c : components_) {
      if (c.edges.empty()) continue;
      const long euler = static_cast<long>(c.vertices.size()) - static_cast<long>(c.edges.size()) +
                         static_cast<long>(c.faces.size());
      if (euler != 2)
        throw NonPlanarEmbedding("component containing \"" + vertex_names_[c.vertices.front()] +
                                 "\" has V - E + F = " + std::to_string(euler) + ", expected 2");
    }
  }

  std::string dart_label(DartId d) const {
    return "(" + edges_[edge_of(d)].name + ", end " + std::to_string(end_of(d)) + ")";
  }

  std::vector<std::string> vertex_names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<DartId>> rotation_;
  std::optional<DartId> exterior_dart_;

  std::vector<std::uint32_t> rotation_pos_;
  std::vector<Face> faces_;
  std::vector<FaceId> face_of_dart_;
  std::vector<Angle> angles_;
  std::vector<AngleId> angle_of_dart_;
  std::vector<Component> components_;
  std::vector<ComponentId> component_of_vertex_;
};

/// All face cycles, the designated exterior (if any) flagged.
inline std::vector<FaceCycle> faces(const EmbeddedGraph& g) {
  std::vector<FaceCycle> out;
  out.reserve(g.face_count());
  for (FaceId f = 0; f < g.face_count(); ++f) out.push_back(g.face_cycle(f));
  return out;
}

inline std::vector<AngleId> angles_at_vertex(const EmbeddedGraph& g, VertexId v) { return g.angles_at_vertex(v); }

/// Angle membership flags indexed by AngleId.
using FlatSet = std::vector<bool>;

/// Face cycle with each flat angle removed and its two edges joined into one.
/// A face whose angles are all flat collapses to one edge carrying no angle.
inline FaceCycle merged_face_cycle(const EmbeddedGraph& g, FaceId f, const FlatSet& flat) {
  FaceCycle plain = g.face_cycle(f);
  if (flat.empty()) return plain;
  const auto& in = plain.entries;
  const std::size_t n = in.size();
  auto is_flat = [&](AngleId a) { return a < flat.size() && flat[a]; };
  std::size_t start = n;
  for (std::size_t i = 0; i < n; ++i)
    if (!is_flat(in[(i + n - 1) % n].angle)) {
      start = i;
      break;
    }
  FaceCycle out;
  out.face = f;
  out.is_exterior = plain.is_exterior;
  if (start == n) {
    Length total = 0;
    for (const auto& e : in) total += e.length;
    out.entries.push_back({total, no_id});
    return out;
  }
  Length acc = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const auto& e = in[(start + j) % n];
    acc += e.length;
    if (!is_flat(e.angle)) {
      out.entries.push_back({acc, e.angle});
      acc = 0;
    }
  }
  return out;
}

}  // namespace flatfold
