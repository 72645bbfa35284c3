#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flatfold/graph.hpp"

namespace flatfold {

using Json = nlohmann::ordered_json;

/// A child component placed inside an interior face of its parent.
struct NestingLink {
  ComponentId child = no_id;
  FaceId parent_face = no_id;
  DartId root_dart = no_id;
  DartId parent_dart = no_id;
};

/// An instance document: the graph plus the optional flat angles and component forest.
struct Instance {
  EmbeddedGraph graph;
  FlatSet flat;
  std::vector<NestingLink> nesting;

  bool is_flat(AngleId a) const { return a < flat.size() && flat[a]; }
};

namespace detail {

class DocumentReader {
 public:
  explicit DocumentReader(const Json& doc) : doc_(doc) {}

  Instance read() {
    if (!doc_.is_object()) fail("", "top level must be an object");
    read_vertices();
    read_edges();
    read_rotation();
    std::optional<DartId> exterior;
    if (doc_.contains("exterior")) exterior = dart_ref(doc_["exterior"], "exterior");
    Instance inst{EmbeddedGraph(names_, edges_, rotation_, exterior), {}, {}};
    read_flats(inst);
    read_components(inst);
    return inst;
  }

 private:
  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw MalformedInput(where.empty() ? what : where + ": " + what);
  }

  const Json& require(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
    return obj[key];
  }

  static std::string as_id(const Json& j, const std::string& where) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return j.dump();
    fail(where, "expected a string id");
  }

  VertexId vertex(const Json& j, const std::string& where) {
    const auto name = as_id(j, where);
    auto it = vertex_index_.find(name);
    if (it == vertex_index_.end()) fail(where, "unknown vertex \"" + name + "\"");
    return it->second;
  }

  void read_vertices() {
    const Json& vs = require(doc_, "vertices", "");
    if (!vs.is_array()) fail("vertices", "expected a list");
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const std::string where = "vertices[" + std::to_string(i) + "]";
      auto name = as_id(vs[i], where);
      if (!vertex_index_.emplace(name, static_cast<VertexId>(names_.size())).second)
        fail(where, "duplicate vertex \"" + name + "\"");
      names_.push_back(std::move(name));
    }
  }

  void read_edges() {
    const Json& es = require(doc_, "edges", "");
    if (!es.is_array()) fail("edges", "expected a list");
    for (std::size_t i = 0; i < es.size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      const Json& e = es[i];
      Edge edge;
      edge.name = as_id(require(e, "id", where), where + ".id");
      if (!edge_index_.emplace(edge.name, static_cast<EdgeId>(edges_.size())).second)
        fail(where, "duplicate edge \"" + edge.name + "\"");
      const Json& ends = require(e, "ends", where);
      if (!ends.is_array() || ends.size() != 2) fail(where + ".ends", "expected two vertices");
      edge.ends = {vertex(ends[0], where + ".ends[0]"), vertex(ends[1], where + ".ends[1]")};
      edge.length = length(require(e, "length", where), where + ".length");
      edges_.push_back(std::move(edge));
    }
  }

  static Length length(const Json& j, const std::string& where) {
    Length len;
    if (j.is_number_integer()) {
      len = parse_rational(j.dump());
    } else if (j.is_string()) {
      try {
        len = parse_rational(j.get<std::string>());
      } catch (const RationalSyntaxError& e) {
        fail(where, e.what());
      }
    } else {
      fail(where, "length must be an integer or a \"p/q\" string (floats are not accepted)");
    }
    if (len <= 0) throw NonPositiveLength(where + ": length must be positive, got " + format_rational(len));
    return len;
  }

  DartId dart_ref(const Json& j, const std::string& where) {
    const auto name = as_id(require(j, "edge", where), where + ".edge");
    auto it = edge_index_.find(name);
    if (it == edge_index_.end()) fail(where, "unknown edge \"" + name + "\"");
    const Json& end = require(j, "end", where);
    if (!end.is_number_integer() || (end.get<int>() != 0 && end.get<int>() != 1))
      fail(where + ".end", "must be 0 or 1");
    return EmbeddedGraph::dart(it->second, end.get<unsigned>());
  }

  void read_rotation() {
    rotation_.assign(names_.size(), {});
    if (!doc_.contains("rotation")) {
      if (!edges_.empty()) fail("", "missing field \"rotation\"");
      return;
    }
    const Json& rot = doc_["rotation"];
    if (!rot.is_object()) fail("rotation", "expected a map from vertex to dart list");
    for (const auto& [key, list] : rot.items()) {
      const std::string where = "rotation[\"" + key + "\"]";
      const VertexId v = vertex(Json(key), where);
      if (!list.is_array()) fail(where, "expected a list of dart references");
      for (std::size_t i = 0; i < list.size(); ++i)
        rotation_[v].push_back(dart_ref(list[i], where + "[" + std::to_string(i) + "]"));
    }
  }

  void read_flats(Instance& inst) {
    if (!doc_.contains("flat_angles")) return;
    const Json& fl = doc_["flat_angles"];
    if (!fl.is_array()) fail("flat_angles", "expected a list");
    inst.flat.assign(inst.graph.angle_count(), false);
    for (std::size_t i = 0; i < fl.size(); ++i) {
      const std::string where = "flat_angles[" + std::to_string(i) + "]";
      const VertexId v = vertex(require(fl[i], "vertex", where), where + ".vertex");
      const DartId d = dart_ref(require(fl[i], "dart", where), where + ".dart");
      if (inst.graph.origin(d) != v) fail(where, "dart does not leave vertex \"" + names_[v] + "\"");
      const AngleId a = inst.graph.angle_after(d);
      if (inst.flat[a]) fail(where, "angle listed twice");
      inst.flat[a] = true;
    }
  }

  void read_components(Instance& inst) {
    if (!doc_.contains("components")) return;
    const Json& cs = doc_["components"];
    if (!cs.is_array()) fail("components", "expected a list");
    const EmbeddedGraph& g = inst.graph;
    std::vector<ComponentId> parent(g.component_count(), no_id);
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string where = "components[" + std::to_string(i) + "]";
      NestingLink link;
      link.root_dart = dart_ref(require(cs[i], "root_dart", where), where + ".root_dart");
      link.parent_dart = dart_ref(require(cs[i], "parent_face", where), where + ".parent_face");
      link.child = g.component_of(g.origin(link.root_dart));
      link.parent_face = g.face_of(link.parent_dart);
      const ComponentId pc = g.component_of_face(link.parent_face);
      if (pc == link.child) fail(where, "parent face lies in the child component itself");
      if (parent[link.child] != no_id) fail(where, "component listed twice");
      if (g.exterior_face() == link.parent_face) fail(where, "parent face is the designated exterior face");
      parent[link.child] = pc;
      inst.nesting.push_back(link);
    }
    for (ComponentId c = 0; c < parent.size(); ++c) {
      ComponentId walk = c;
      for (std::size_t steps = 0; walk != no_id; ++steps) {
        if (steps > parent.size()) fail("components", "parent links contain a cycle");
        walk = parent[walk];
      }
    }
  }

  const Json& doc_;
  std::vector<std::string> names_;
  std::map<std::string, VertexId> vertex_index_;
  std::map<std::string, EdgeId> edge_index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<DartId>> rotation_;
};

}  // namespace detail

inline Instance load_instance(const Json& document) { return detail::DocumentReader(document).read(); }

inline Instance load_instance_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw MalformedInput(std::string("invalid JSON: ") + e.what());
  }
  return load_instance(doc);
}

inline EmbeddedGraph load_graph(const Json& document) { return load_instance(document).graph; }

inline Json dart_to_json(const EmbeddedGraph& g, DartId d) {
  return Json{{"edge", g.edge(EmbeddedGraph::edge_of(d)).name}, {"end", EmbeddedGraph::end_of(d)}};
}

inline Json to_json(const Instance& inst) {
  const EmbeddedGraph& g = inst.graph;
  Json doc;
  doc["vertices"] = Json::array();
  for (VertexId v = 0; v < g.vertex_count(); ++v) doc["vertices"].push_back(g.vertex_name(v));
  doc["edges"] = Json::array();
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& edge = g.edge(e);
    doc["edges"].push_back({{"id", edge.name},
                            {"ends", {g.vertex_name(edge.ends[0]), g.vertex_name(edge.ends[1])}},
                            {"length", format_rational(edge.length)}});
  }
  doc["rotation"] = Json::object();
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    Json list = Json::array();
    for (DartId d : g.rotation(v)) list.push_back(dart_to_json(g, d));
    doc["rotation"][g.vertex_name(v)] = std::move(list);
  }
  if (g.exterior_dart()) doc["exterior"] = dart_to_json(g, *g.exterior_dart());
  if (!inst.flat.empty()) {
    Json fl = Json::array();
    for (AngleId a = 0; a < g.angle_count(); ++a)
      if (inst.is_flat(a))
        fl.push_back({{"vertex", g.vertex_name(g.angle(a).vertex)}, {"dart", dart_to_json(g, g.angle(a).first)}});
    doc["flat_angles"] = std::move(fl);
  }
  if (!inst.nesting.empty()) {
    Json cs = Json::array();
    for (const auto& link : inst.nesting)
      cs.push_back({{"root_dart", dart_to_json(g, link.root_dart)}, {"parent_face", dart_to_json(g, link.parent_dart)}});
    doc["components"] = std::move(cs);
  }
  return doc;
}

/// Stable name of an angle for result documents: "<vertex>/<edge>:<end>" of its leading dart.
inline std::string angle_key(const EmbeddedGraph& g, AngleId a) {
  const Angle& ang = g.angle(a);
  return g.vertex_name(ang.vertex) + "/" + g.edge(EmbeddedGraph::edge_of(ang.first)).name + ":" +
         std::to_string(EmbeddedGraph::end_of(ang.first));
}

}  // namespace flatfold
