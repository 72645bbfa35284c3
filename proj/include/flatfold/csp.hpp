#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatfold/face_constraints.hpp"
#include "flatfold/geometry.hpp"
#include "flatfold/graph.hpp"

namespace flatfold {

class StructureViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Boolean values over the variables of one CSP; -1 = unassigned.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::size_t angle_slots, std::size_t fresh_slots)
      : angle_(angle_slots, -1), fresh_(fresh_slots, -1) {}

  bool has(VarId v) const { return slot(v) >= 0; }
  bool get(VarId v) const { return slot(v) > 0; }
  void set(VarId v, bool value) { slot_ref(v) = value ? 1 : 0; }
  std::size_t angle_slots() const { return angle_.size(); }
  std::size_t fresh_slots() const { return fresh_.size(); }

 private:
  std::int8_t slot(VarId v) const {
    const auto& vec = v.kind == VarKind::angle ? angle_ : fresh_;
    return v.index < vec.size() ? vec[v.index] : std::int8_t{-1};
  }
  std::int8_t& slot_ref(VarId v) {
    auto& vec = v.kind == VarKind::angle ? angle_ : fresh_;
    if (v.index >= vec.size()) vec.resize(v.index + 1, -1);
    return vec[v.index];
  }

  std::vector<std::int8_t> angle_;
  std::vector<std::int8_t> fresh_;
};

/// Planar bipartite positive exact-count CSP in which each variable sits in
/// exactly one red and one blue clause.
struct CspInstance {
  std::vector<Clause> clauses;
  std::vector<FaceConstraints> face_blocks;  // provenance of the face clauses, in emission order
  std::vector<VertexId> vertex_of_clause;    // no_id for face clauses
  std::size_t angle_slots = 0;
  std::size_t fresh_slots = 0;

  struct Occurrence {
    std::size_t red = no_id;
    std::size_t blue = no_id;
  };
  std::vector<VarId> variables;            // canonical order of first appearance
  std::vector<Occurrence> angle_occurrence;
  std::vector<Occurrence> fresh_occurrence;

  long total_red = 0;
  long total_blue = 0;

  std::size_t red_count() const {
    std::size_t n = 0;
    for (const auto& c : clauses) n += c.color == Color::red;
    return n;
  }
  std::size_t blue_count() const { return clauses.size() - red_count(); }

  const Occurrence& occurrence(VarId v) const {
    return v.kind == VarKind::angle ? angle_occurrence.at(v.index) : fresh_occurrence.at(v.index);
  }

  /// Recomputes occurrences and totals; throws StructureViolation unless every
  /// variable occurs in exactly one red and one blue clause.
  void index() {
    angle_occurrence.assign(angle_slots, {});
    fresh_occurrence.assign(fresh_slots, {});
    variables.clear();
    total_red = total_blue = 0;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      const Clause& c = clauses[i];
      if (c.target > c.vars.size())
        throw StructureViolation("clause " + std::to_string(i) + " has target above its size");
      (c.color == Color::red ? total_red : total_blue) += c.target;
      for (VarId v : c.vars) {
        auto& occ_list = v.kind == VarKind::angle ? angle_occurrence : fresh_occurrence;
        if (v.index >= occ_list.size()) throw StructureViolation("variable " + to_string(v) + " out of range");
        auto& occ = occ_list[v.index];
        if (occ.red == no_id && occ.blue == no_id) variables.push_back(v);
        std::size_t& slot = c.color == Color::red ? occ.red : occ.blue;
        if (slot != no_id)
          throw StructureViolation("variable " + to_string(v) + " occurs in two " +
                                   (c.color == Color::red ? "red" : "blue") + " clauses");
        slot = i;
      }
    }
    for (VarId v : variables) {
      const auto& occ = occurrence(v);
      if (occ.red == no_id || occ.blue == no_id)
        throw StructureViolation("variable " + to_string(v) + " lacks a " + (occ.red == no_id ? "red" : "blue") +
                                 " clause");
    }
    // Cheap planarity sanity check: a simple planar graph has at most 3V - 6 edges.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(variables.size());
    for (VarId v : variables) pairs.emplace_back(occurrence(v).red, occurrence(v).blue);
    std::sort(pairs.begin(), pairs.end());
    const auto distinct = static_cast<std::size_t>(std::unique(pairs.begin(), pairs.end()) - pairs.begin());
    if (clauses.size() >= 3 && distinct > 3 * clauses.size() - 6)
      throw StructureViolation("clause graph has too many edges to be planar");
  }
};

/// One blue clause per vertex of positive degree: exactly one mountain among
/// its non-flat angles, or none when the vertex carries two flat angles.
inline std::vector<Clause> generate_vertex_constraints(const EmbeddedGraph& g, const FlatSet& flat,
                                                       std::span<const VertexId> vertices) {
  std::vector<Clause> out;
  for (VertexId v : vertices) {
    if (g.degree(v) == 0) continue;
    Clause c{Color::blue, {}, 1};
    std::size_t flats = 0;
    for (AngleId a : g.angles_at_vertex(v)) {
      if (a < flat.size() && flat[a])
        ++flats;
      else
        c.vars.push_back(VarId::angle(a));
    }
    if (flats != 0 && flats != 2) throw std::logic_error("generate_vertex_constraints: flat count must be 0 or 2");
    c.target = flats == 2 ? 0 : 1;
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<Clause> generate_vertex_constraints(const EmbeddedGraph& g, const FlatSet& flat = {}) {
  std::vector<VertexId> all(g.vertex_count());
  std::iota(all.begin(), all.end(), VertexId{0});
  return generate_vertex_constraints(g, flat, all);
}

/// Builds the CSP of one connected component with the given exterior face.
/// Every face of the component must already pass closure.
inline CspInstance assemble(const EmbeddedGraph& g, ComponentId comp, FaceId exterior, const FlatSet& flat = {}) {
  CspInstance csp;
  csp.angle_slots = g.angle_count();
  FreshCounter fresh;
  for (FaceId f : g.component(comp).faces) {
    FaceCycle cycle = merged_face_cycle(g, f, flat);
    cycle.is_exterior = f == exterior;
    FaceConstraints block = generate_face_constraints(cycle, fresh);
    for (const Clause& c : block.clauses) {
      csp.clauses.push_back(c);
      csp.vertex_of_clause.push_back(no_id);
    }
    csp.face_blocks.push_back(std::move(block));
  }
  const auto& vs = g.component(comp).vertices;
  for (VertexId v : vs) {
    if (g.degree(v) == 0) continue;
    auto clause = generate_vertex_constraints(g, flat, std::span<const VertexId>(&v, 1));
    csp.clauses.push_back(std::move(clause.front()));
    csp.vertex_of_clause.push_back(v);
  }
  csp.fresh_slots = fresh.count();
  csp.index();
  return csp;
}

/// Single-component convenience; the exterior comes from the graph's designation.
inline CspInstance assemble(const EmbeddedGraph& g, const FlatSet& flat = {}) {
  if (g.component_count() != 1) throw std::invalid_argument("assemble: graph is not connected");
  const auto ext = g.exterior_face();
  if (!ext) throw std::invalid_argument("assemble: no exterior face designated");
  return assemble(g, 0, *ext, flat);
}

/// Index of the first clause the assignment violates (or leaves unassigned).
inline std::optional<std::size_t> first_violated_clause(const CspInstance& csp, const Assignment& a) {
  for (std::size_t i = 0; i < csp.clauses.size(); ++i) {
    std::uint32_t count = 0;
    for (VarId v : csp.clauses[i].vars) {
      if (!a.has(v)) return i;
      count += a.get(v);
    }
    if (count != csp.clauses[i].target) return i;
  }
  return std::nullopt;
}

/// Fills in the fresh variables of a face block from its angle values, in
/// emission order. Returns false when some y would fall outside {0, 1}.
inline bool extend_fresh(const FaceConstraints& block, Assignment& a) {
  for (const FreshPair& pair : block.fresh) {
    const Clause& red = block.clauses[pair.red_clause];
    long sum = 0;
    for (VarId v : red.vars)
      if (v != pair.y) {
        if (!a.has(v)) return false;
        sum += a.get(v);
      }
    const long y = static_cast<long>(red.target) - sum;
    if (y != 0 && y != 1) return false;
    a.set(pair.y, y == 1);
    a.set(pair.z, y == 0);
  }
  return true;
}

// Text form: a header line, then one "red|blue target var,var,..." line per
// clause ("-" for an empty clause). Variables are a<angle> or f<fresh>.
inline std::string dump_csp(const CspInstance& csp) {
  std::ostringstream out;
  out << "csp clauses " << csp.clauses.size() << " variables " << csp.variables.size() << " red "
      << csp.red_count() << " blue " << csp.blue_count() << "\n";
  for (const Clause& c : csp.clauses) {
    out << (c.color == Color::red ? "red " : "blue ") << c.target << ' ';
    if (c.vars.empty()) out << '-';
    for (std::size_t i = 0; i < c.vars.size(); ++i) out << (i ? "," : "") << to_string(c.vars[i]);
    out << '\n';
  }
  return out.str();
}

class CspSyntaxError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline CspInstance parse_csp(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> void {
    throw CspSyntaxError("line " + std::to_string(line_no) + ": " + what);
  };
  CspInstance csp;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (!header) {
      if (word != "csp") fail("expected the \"csp\" header line");
      header = true;
      continue;
    }
    Clause c;
    if (word == "red")
      c.color = Color::red;
    else if (word == "blue")
      c.color = Color::blue;
    else
      fail("clause color must be red or blue");
    long target = -1;
    if (!(ls >> target) || target < 0) fail("bad clause target");
    c.target = static_cast<std::uint32_t>(target);
    std::string list;
    if (!(ls >> list)) fail("missing variable list");
    if (list != "-") {
      std::istringstream vs(list);
      std::string tok;
      while (std::getline(vs, tok, ',')) {
        if (tok.size() < 2 || (tok[0] != 'a' && tok[0] != 'f') ||
            tok.find_first_not_of("0123456789", 1) != std::string::npos)
          fail("bad variable \"" + tok + "\"");
        const auto idx = static_cast<std::uint32_t>(std::stoul(tok.substr(1)));
        const VarId v = tok[0] == 'a' ? VarId::angle(idx) : VarId::fresh(idx);
        auto& slots = tok[0] == 'a' ? csp.angle_slots : csp.fresh_slots;
        slots = std::max<std::size_t>(slots, idx + 1);
        c.vars.push_back(v);
      }
    }
    csp.clauses.push_back(std::move(c));
    csp.vertex_of_clause.push_back(no_id);
  }
  if (!header) throw CspSyntaxError("empty CSP document");
  try {
    csp.index();
  } catch (const StructureViolation& e) {
    throw CspSyntaxError(std::string("not a bipartite E2 instance: ") + e.what());
  }
  return csp;
}

}  // namespace flatfold
