#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "flatfold/csp.hpp"
#include "flatfold/flow.hpp"
#include "flatfold/geometry.hpp"
#include "flatfold/io.hpp"
#include "flatfold/oracle.hpp"
#include "flatfold/verdict.hpp"

namespace flatfold {

/// Thrown when a SAT witness fails independent verification. Never expected.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct FlatCountViolation {
  VertexId vertex = no_id;
  std::size_t count = 0;
};

/// Per-face cycles with flat angles merged away, plus the target of each vertex clause.
struct FlatPreprocessed {
  std::vector<FaceCycle> faces;                // indexed by FaceId
  std::vector<std::uint32_t> vertex_targets;   // mountains required at each vertex
};

inline std::variant<FlatPreprocessed, FlatCountViolation> preprocess_flat_angles(const EmbeddedGraph& g,
                                                                                 const FlatSet& flat) {
  FlatPreprocessed out;
  out.vertex_targets.assign(g.vertex_count(), 0);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    std::size_t flats = 0;
    for (AngleId a : g.angles_at_vertex(v)) flats += a < flat.size() && flat[a];
    if (flats != 0 && flats != 2) return FlatCountViolation{v, flats};
    out.vertex_targets[v] = g.degree(v) > 0 && flats == 0 ? 1 : 0;
  }
  out.faces.reserve(g.face_count());
  for (FaceId f = 0; f < g.face_count(); ++f) out.faces.push_back(merged_face_cycle(g, f, flat));
  return out;
}

/// Lowest-id face of the component whose diameter equals the component's,
/// skipping the given faces (those hosting child components).
inline std::optional<FaceId> choose_exterior(const EmbeddedGraph& g, const CoordinateMap& coords, ComponentId c,
                                             const std::vector<FaceId>& excluded = {}) {
  const Component& comp = g.component(c);
  if (comp.faces.empty()) return std::nullopt;
  const Rational diameter = component_diameter(g, coords, c);
  for (FaceId f : comp.faces) {
    if (std::find(excluded.begin(), excluded.end(), f) != excluded.end()) continue;
    if (face_diameter(g, coords, f) == diameter) return f;
  }
  return std::nullopt;
}

struct NestingViolation {
  ComponentId child = no_id;
  FaceId parent_face = no_id;
  Rational child_diameter;
  Rational parent_diameter;
};

/// A child component fits in its parent face only if its folded extent does
/// not exceed the face's.
inline std::optional<NestingViolation> check_component_nesting(const EmbeddedGraph& g,
                                                               const std::vector<NestingLink>& forest,
                                                               const CoordinateMap& coords) {
  for (const auto& link : forest) {
    NestingViolation v{link.child, link.parent_face, component_diameter(g, coords, link.child),
                       face_diameter(g, coords, link.parent_face)};
    if (v.child_diameter > v.parent_diameter) return v;
  }
  return std::nullopt;
}

struct DecideOptions {
  /// Per component; overrides both the document's exterior and the automatic choice.
  std::vector<std::optional<FaceId>> exterior_override;
  /// Keep the CSP and flow network of every component in the result.
  bool keep_artifacts = false;
};

struct ComponentArtifacts {
  ComponentId component = no_id;
  FaceId exterior = no_id;
  CspInstance csp;
  FlowNetwork network;
};

struct DecideResult {
  Verdict verdict;
  std::vector<ComponentArtifacts> artifacts;
};

/// Full pipeline: flat counts, coordinates, exterior choice, per-component
/// CSP solved by max-flow, witness verification, then nesting diameters.
inline DecideResult decide_with_artifacts(const Instance& inst, const DecideOptions& opt = {}) {
  const EmbeddedGraph& g = inst.graph;
  DecideResult result;
  Verdict& v = result.verdict;
  v.stats.angles = g.angle_count();
  auto unsat = [&](UnsatReason reason) {
    v.sat = false;
    v.witness.clear();
    v.reason = std::move(reason);
    return result;
  };

  auto pre = preprocess_flat_angles(g, inst.flat);
  if (auto* bad = std::get_if<FlatCountViolation>(&pre)) {
    UnsatReason r;
    r.kind = UnsatKind::flat_count_violation;
    r.vertex = bad->vertex;
    r.component = g.component_of(bad->vertex);
    r.flat_count = bad->count;
    return unsat(r);
  }
  auto& prep = std::get<FlatPreprocessed>(pre);

  auto placed = assign_coordinates(g, inst.flat);
  if (auto* bad = std::get_if<ClosureViolation>(&placed)) {
    UnsatReason r;
    r.kind = UnsatKind::closure_violation;
    r.edge = bad->edge;
    r.component = g.component_of(g.edge(bad->edge).ends[0]);
    return unsat(r);
  }
  v.coords = std::move(std::get<CoordinateMap>(placed));
  const CoordinateMap& coords = *v.coords;

  std::vector<std::vector<FaceId>> hosting(g.component_count());
  for (const auto& link : inst.nesting) hosting[g.component_of_face(link.parent_face)].push_back(link.parent_face);

  v.witness.assign(g.angle_count(), Fold::valley);
  for (AngleId a = 0; a < g.angle_count(); ++a)
    if (inst.is_flat(a)) v.witness[a] = Fold::flat;
  v.exteriors.assign(g.component_count(), no_id);

  for (ComponentId c = 0; c < g.component_count(); ++c) {
    const Component& comp = g.component(c);
    if (comp.edges.empty()) continue;
    std::optional<FaceId> exterior;
    if (c < opt.exterior_override.size() && opt.exterior_override[c]) {
      exterior = opt.exterior_override[c];
      if (g.component_of_face(*exterior) != c)
        throw std::invalid_argument("decide: exterior override lies in another component");
    } else if (auto doc = g.exterior_face(); doc && g.component_of_face(*doc) == c) {
      exterior = doc;
    } else {
      exterior = choose_exterior(g, coords, c, hosting[c]);
    }
    if (!exterior) {
      UnsatReason r;
      r.kind = UnsatKind::diameter_nesting_violation;
      r.component = c;
      r.face = hosting[c].empty() ? no_id : hosting[c].front();
      r.exterior_conflict = true;
      return unsat(r);
    }
    v.exteriors[c] = *exterior;

    for (FaceId f : comp.faces) {
      // Coordinates exist, so every face closes; a failure here is a bug.
      if (!face_closure_check(prep.faces[f]).ok || prep.faces[f].entries.front().angle == no_id)
        throw InternalError("decide: face " + std::to_string(f) + " fails closure after coordinates were placed");
    }

    CspInstance csp = assemble(g, c, *exterior, inst.flat);
    FlowNetwork net = csp_to_flow(csp);
    v.stats.clauses += csp.clauses.size();
    v.stats.variables += csp.variables.size();
    const CspSolution sol = solve_csp(csp, net);
    v.stats.flow_value += sol.flow_value;
    if (opt.keep_artifacts) result.artifacts.push_back({c, *exterior, csp, net});
    if (!sol.satisfiable) {
      UnsatReason r;
      r.kind = sol.totals_mismatch ? UnsatKind::totals_mismatch : UnsatKind::flow_shortfall;
      r.component = c;
      r.flow_value = sol.flow_value;
      r.total_red = net.total;
      r.total_blue = net.total_blue;
      return unsat(r);
    }
    for (VertexId u : comp.vertices)
      for (AngleId a : g.angles_at_vertex(u))
        if (!inst.is_flat(a)) v.witness[a] = sol.assignment.get(VarId::angle(a)) ? Fold::mountain : Fold::valley;
  }

  if (auto err = verify_witness(inst, v.witness, v.exteriors)) throw InternalError("decide: witness rejected: " + *err);

  if (auto nest = check_component_nesting(g, inst.nesting, coords)) {
    UnsatReason r;
    r.kind = UnsatKind::diameter_nesting_violation;
    r.component = nest->child;
    r.face = nest->parent_face;
    r.child_diameter = nest->child_diameter;
    r.parent_diameter = nest->parent_diameter;
    return unsat(r);
  }
  v.sat = true;
  return result;
}

inline Verdict decide(const Instance& inst, const DecideOptions& opt = {}) {
  return decide_with_artifacts(inst, opt).verdict;
}

inline Verdict decide(const EmbeddedGraph& g, const FlatSet& flat = {}) {
  return decide(Instance{g, flat, {}});
}

/// One-line human description of an UNSAT reason.
inline std::string describe(const EmbeddedGraph& g, const UnsatReason& r) {
  std::string s = to_string(r.kind);
  switch (r.kind) {
    case UnsatKind::closure_violation:
      if (r.edge != no_id) s += ": edge " + g.edge(r.edge).name + " cannot be placed consistently";
      break;
    case UnsatKind::flat_count_violation:
      s += ": vertex " + g.vertex_name(r.vertex) + " has " + std::to_string(r.flat_count) + " flat angles";
      break;
    case UnsatKind::totals_mismatch:
      s += ": red total " + std::to_string(r.total_red) + ", blue total " + std::to_string(r.total_blue);
      break;
    case UnsatKind::flow_shortfall:
      s += ": max flow " + std::to_string(r.flow_value) + " of " + std::to_string(r.total_red);
      break;
    case UnsatKind::diameter_nesting_violation:
      if (r.exterior_conflict)
        s += ": no face of maximal extent is free to be the exterior";
      else
        s += ": child extent " + format_rational(r.child_diameter) + " exceeds face extent " +
             format_rational(r.parent_diameter);
      break;
    case UnsatKind::no_valid_assignment:
      break;
  }
  return s;
}

}  // namespace flatfold
