#pragma once

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flatfold/flatfold.hpp"

namespace flatfold::cli {

inline constexpr int exit_sat = 0;
inline constexpr int exit_unsat = 1;
inline constexpr int exit_input_error = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

inline const char* kind_name(UnsatKind k) {
  switch (k) {
    case UnsatKind::closure_violation:
      return "closure_violation";
    case UnsatKind::flat_count_violation:
      return "flat_count_violation";
    case UnsatKind::totals_mismatch:
      return "totals_mismatch";
    case UnsatKind::flow_shortfall:
      return "flow_shortfall";
    case UnsatKind::diameter_nesting_violation:
      return "diameter_nesting_violation";
    case UnsatKind::no_valid_assignment:
      return "no_valid_assignment";
  }
  return "unknown";
}

inline Json reason_to_json(const EmbeddedGraph& g, const UnsatReason& r) {
  Json j;
  j["kind"] = kind_name(r.kind);
  j["message"] = describe(g, r);
  if (r.component != no_id) j["component"] = r.component;
  switch (r.kind) {
    case UnsatKind::closure_violation:
      if (r.edge != no_id) j["edge"] = g.edge(r.edge).name;
      break;
    case UnsatKind::flat_count_violation:
      j["vertex"] = g.vertex_name(r.vertex);
      j["flat_angles"] = r.flat_count;
      break;
    case UnsatKind::totals_mismatch:
    case UnsatKind::flow_shortfall:
      j["flow"] = r.flow_value;
      j["red_total"] = r.total_red;
      j["blue_total"] = r.total_blue;
      break;
    case UnsatKind::diameter_nesting_violation:
      if (r.face != no_id) j["parent_face"] = dart_to_json(g, g.face(r.face).darts.front());
      if (r.exterior_conflict) {
        j["exterior_conflict"] = true;
      } else {
        j["child_diameter"] = format_rational(r.child_diameter);
        j["parent_diameter"] = format_rational(r.parent_diameter);
      }
      break;
    case UnsatKind::no_valid_assignment:
      break;
  }
  return j;
}

/// Result document of one decision. Key order is fixed so output is byte-stable.
inline Json verdict_to_json(const Instance& inst, const Verdict& v, const char* solver) {
  const EmbeddedGraph& g = inst.graph;
  Json doc;
  doc["status"] = v.sat ? "SAT" : "UNSAT";
  doc["solver"] = solver;
  if (v.sat) {
    Json w = Json::object();
    for (AngleId a = 0; a < g.angle_count(); ++a) w[angle_key(g, a)] = std::string(1, fold_letter(v.witness[a]));
    doc["witness"] = std::move(w);
    Json ext = Json::array();
    for (FaceId f : v.exteriors) ext.push_back(f == no_id ? Json() : dart_to_json(g, g.face(f).darts.front()));
    doc["exteriors"] = std::move(ext);
  }
  if (v.coords) {
    Json c = Json::object();
    for (VertexId u = 0; u < g.vertex_count(); ++u) c[g.vertex_name(u)] = format_rational(v.coords->x[u]);
    doc["coords"] = std::move(c);
  }
  if (v.reason) doc["reason"] = reason_to_json(g, *v.reason);
  doc["stats"] = {{"angles", v.stats.angles},
                  {"clauses", v.stats.clauses},
                  {"variables", v.stats.variables},
                  {"flow_value", v.stats.flow_value}};
  return doc;
}

// Resolves a {"edge", "end"} reference against the instance.
inline DartId dart_from_json(const EmbeddedGraph& g, const Json& j) {
  if (!j.is_object() || !j.contains("edge") || !j.contains("end")) throw MalformedInput("expected {edge, end}");
  const std::string name = j["edge"].get<std::string>();
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (g.edge(e).name == name) {
      const auto end = j["end"].get<int>();
      if (end != 0 && end != 1) throw MalformedInput("dart end must be 0 or 1");
      return EmbeddedGraph::dart(e, static_cast<unsigned>(end));
    }
  throw MalformedInput("unknown edge \"" + name + "\"");
}

/// Checks a result document against an instance. A SAT result is checked on
/// its own; an UNSAT result is checked by re-deciding.
inline std::optional<std::string> verify_result(const Instance& inst, const Json& result) {
  const EmbeddedGraph& g = inst.graph;
  if (!result.is_object() || !result.contains("status")) throw MalformedInput("result: missing \"status\"");
  const std::string status = result["status"].get<std::string>();
  if (status == "UNSAT") {
    if (decide(inst).sat) return "instance is flat foldable but the result says UNSAT";
    return std::nullopt;
  }
  if (status != "SAT") throw MalformedInput("result: status must be SAT or UNSAT");
  if (!result.contains("witness") || !result["witness"].is_object()) throw MalformedInput("result: missing witness");
  std::vector<Fold> witness(g.angle_count(), Fold::valley);
  std::map<std::string, AngleId> by_key;
  for (AngleId a = 0; a < g.angle_count(); ++a) by_key[angle_key(g, a)] = a;
  std::vector<bool> seen(g.angle_count(), false);
  for (const auto& [key, value] : result["witness"].items()) {
    auto it = by_key.find(key);
    if (it == by_key.end()) return "witness names unknown angle " + key;
    const std::string fold = value.get<std::string>();
    if (fold == "M")
      witness[it->second] = Fold::mountain;
    else if (fold == "V")
      witness[it->second] = Fold::valley;
    else if (fold == "F")
      witness[it->second] = Fold::flat;
    else
      return "witness value for " + key + " must be M, V or F";
    seen[it->second] = true;
  }
  for (AngleId a = 0; a < g.angle_count(); ++a)
    if (!seen[a]) return "witness lacks angle " + angle_key(g, a);
  std::vector<FaceId> exteriors(g.component_count(), no_id);
  if (!result.contains("exteriors") || result["exteriors"].size() != g.component_count())
    return "result needs one exterior per component";
  for (ComponentId c = 0; c < g.component_count(); ++c) {
    const Json& ref = result["exteriors"][c];
    if (ref.is_null()) continue;
    const FaceId f = g.face_of(dart_from_json(g, ref));
    if (g.component_of_face(f) != c) return "exterior of component " + std::to_string(c) + " lies elsewhere";
    exteriors[c] = f;
  }
  if (auto err = verify_witness(inst, witness, exteriors)) return *err;
  auto placed = assign_coordinates(g, inst.flat);
  if (!std::holds_alternative<CoordinateMap>(placed)) return "instance fails closure";
  if (auto nest = check_component_nesting(g, inst.nesting, std::get<CoordinateMap>(placed)))
    return "child component is wider than its parent face";
  return std::nullopt;
}

struct BenchRow {
  std::size_t requested = 0;
  std::size_t angles = 0;
  double seconds = 0;
  bool sat = false;
};

// Least-squares slope of log(time) against log(size).
inline double fitted_exponent(const std::vector<BenchRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    const double x = std::log(static_cast<double>(r.angles));
    const double y = std::log(std::max(r.seconds, 1e-6));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Unit grid whose angle count 4k(k-1) is closest to n.
inline std::size_t grid_side_for(std::size_t n) {
  std::size_t k = 2;
  while (4 * (k + 1) * k <= n) ++k;
  const std::size_t below = 4 * k * (k - 1), above = 4 * (k + 1) * k;
  return n - below <= above - n ? k : k + 1;
}

inline BenchRow bench_grid(std::size_t n) {
  const Instance inst = grid_instance(grid_side_for(n));
  const auto start = std::chrono::steady_clock::now();
  const Verdict v = decide(inst);
  const auto stop = std::chrono::steady_clock::now();
  return {n, inst.graph.angle_count(), std::chrono::duration<double>(stop - start).count(), v.sat};
}

inline RandomMode parse_mode(const std::string& s) {
  if (s == "mixed") return RandomMode::mixed;
  if (s == "closure") return RandomMode::closure;
  if (s == "loose") return RandomMode::loose;
  if (s == "cycle") return RandomMode::cycle;
  throw UsageError("unknown mode \"" + s + "\" (expected mixed, closure, loose or cycle)");
}

/// Entry point shared by the executable and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decide flat foldability of edge-length graphs"};
  app.require_subcommand(1);

  std::string input, output, csp_path, flow_path, diagram_path;
  bool use_oracle = false, timing = false;
  auto* decide_cmd = app.add_subcommand("decide", "Decide one instance document");
  decide_cmd->add_option("input", input, "Instance document (JSON)")->required();
  decide_cmd->add_option("-o,--output", output, "Write the result here instead of standard output");
  decide_cmd->add_option("--dump-csp", csp_path, "Write the constraint instance as text");
  decide_cmd->add_option("--dump-flow", flow_path, "Write the flow network as text");
  decide_cmd->add_option("--emit-diagram", diagram_path, "Write an SVG of the constraint graph");
  decide_cmd->add_flag("--oracle", use_oracle, "Decide by exhaustive search instead (small inputs only)");
  decide_cmd->add_flag("--timing", timing, "Add elapsed time to the stats");

  std::uint64_t seed = 0;
  std::size_t size = 0, max_angles = 22;
  std::string mode = "mixed";
  auto* gen_cmd = app.add_subcommand("gen", "Write a random instance document");
  gen_cmd->add_option("--seed", seed, "Random seed")->required();
  gen_cmd->add_option("--size", size, "Target edge count (0 = random)");
  gen_cmd->add_option("--max-angles", max_angles, "Upper bound on angles");
  gen_cmd->add_option("--mode", mode, "mixed | closure | loose | cycle");
  gen_cmd->add_option("-o,--output", output, "Output file");

  std::string result_path;
  auto* verify_cmd = app.add_subcommand("verify", "Check a result document against its instance");
  verify_cmd->add_option("instance", input, "Instance document")->required();
  verify_cmd->add_option("result", result_path, "Result document")->required();

  std::vector<std::size_t> sizes{1000, 10000, 100000};
  auto* bench_cmd = app.add_subcommand("bench", "Time decide() on unit grids of growing size");
  bench_cmd->add_option("--sizes", sizes, "Target angle counts")->delimiter(',');

  auto* solve_cmd = app.add_subcommand("solve", "Solve a constraint instance written by --dump-csp");
  solve_cmd->add_option("input", input, "CSP text file")->required();

  std::vector<std::string> argv_storage{"flatfold"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  }

  auto emit = [&](const std::string& text) {
    if (output.empty())
      out << text;
    else
      write_file(output, text);
  };

  try {
    if (*decide_cmd) {
      const Instance inst = load_instance_text(read_file(input));
      const auto start = std::chrono::steady_clock::now();
      Json doc;
      Verdict v;
      std::vector<ComponentArtifacts> artifacts;
      const bool want_artifacts = !csp_path.empty() || !flow_path.empty() || !diagram_path.empty();
      if (use_oracle) {
        v = brute_force_decide(inst);
        if (auto placed = assign_coordinates(inst.graph, inst.flat); std::holds_alternative<CoordinateMap>(placed))
          v.coords = std::get<CoordinateMap>(placed);
        if (want_artifacts) artifacts = decide_with_artifacts(inst, {{}, true}).artifacts;
      } else {
        auto r = decide_with_artifacts(inst, {{}, want_artifacts});
        v = std::move(r.verdict);
        artifacts = std::move(r.artifacts);
      }
      const auto stop = std::chrono::steady_clock::now();
      doc = verdict_to_json(inst, v, use_oracle ? "brute_force" : "flow");
      if (timing) doc["stats"]["elapsed_ms"] = std::chrono::duration<double, std::milli>(stop - start).count();
      if (!csp_path.empty()) {
        std::string text;
        for (const auto& a : artifacts) text += "# component " + std::to_string(a.component) + "\n" + dump_csp(a.csp);
        write_file(csp_path, text);
      }
      if (!flow_path.empty()) {
        std::string text;
        for (const auto& a : artifacts) text += "# component " + std::to_string(a.component) + "\n" + dump_flow(a.network);
        write_file(flow_path, text);
      }
      if (!diagram_path.empty()) write_file(diagram_path, emit_diagram(inst, artifacts));
      emit(doc.dump(2) + "\n");
      return v.sat ? exit_sat : exit_unsat;
    }
    if (*gen_cmd) {
      RandomParams p;
      p.mode = parse_mode(mode);
      p.edges = size;
      p.max_angles = max_angles;
      emit(to_json(random_instance(seed, p)).dump(2) + "\n");
      return 0;
    }
    if (*verify_cmd) {
      const Instance inst = load_instance_text(read_file(input));
      Json result;
      try {
        result = Json::parse(read_file(result_path));
      } catch (const Json::parse_error& e) {
        throw MalformedInput(std::string("result: invalid JSON: ") + e.what());
      }
      if (auto problem = verify_result(inst, result)) {
        out << "invalid: " << *problem << "\n";
        return 1;
      }
      out << "valid\n";
      return 0;
    }
    if (*bench_cmd) {
      std::vector<BenchRow> rows;
      out << "angles seconds status\n";
      for (std::size_t n : sizes) {
        rows.push_back(bench_grid(n));
        out << rows.back().angles << ' ' << rows.back().seconds << ' ' << (rows.back().sat ? "SAT" : "UNSAT") << "\n";
      }
      if (rows.size() >= 2) out << "fitted exponent " << fitted_exponent(rows) << "\n";
      return 0;
    }
    if (*solve_cmd) {
      const CspInstance csp = parse_csp(read_file(input));
      const CspSolution sol = solve_csp(csp);
      if (!sol.satisfiable) {
        out << "UNSAT flow " << sol.flow_value << " of " << sol.total << (sol.totals_mismatch ? " (totals differ)" : "")
            << "\n";
        return exit_unsat;
      }
      out << "SAT";
      for (VarId var : csp.variables) out << ' ' << to_string(var) << '=' << sol.assignment.get(var);
      out << "\n";
      return exit_sat;
    }
  } catch (const InputError& e) {
    err << "error: " << input << ": " << e.what() << "\n";
    return exit_input_error;
  } catch (const CspSyntaxError& e) {
    err << "error: " << input << ": " << e.what() << "\n";
    return exit_input_error;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const TooLarge& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_input_error;
  }
  return exit_input_error;
}

}  // namespace flatfold::cli
