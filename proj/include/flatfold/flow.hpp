#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "flatfold/csp.hpp"

namespace flatfold {

struct FlowArc {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::int64_t capacity = 0;
};

/// Flow network of a CSP. Clause i owns node 2i; node 2i+1 is its private
/// source (red) or sink (blue). Arcs: one terminal arc per clause, in clause
/// order, followed by one unit arc red -> blue per variable.
struct FlowNetwork {
  std::size_t node_count = 0;
  std::vector<FlowArc> arcs;
  std::vector<std::uint32_t> sources;
  std::vector<std::uint32_t> sinks;
  std::size_t first_variable_arc = 0;
  std::vector<VarId> arc_variable;  // variable of arc first_variable_arc + i
  std::int64_t total = 0;           // sum of red targets
  std::int64_t total_blue = 0;
};

inline FlowNetwork csp_to_flow(const CspInstance& csp) {
  FlowNetwork net;
  net.node_count = 2 * csp.clauses.size();
  for (std::size_t i = 0; i < csp.clauses.size(); ++i) {
    const Clause& c = csp.clauses[i];
    const auto node = static_cast<std::uint32_t>(2 * i);
    if (c.color == Color::red) {
      net.arcs.push_back({node + 1, node, c.target});
      net.sources.push_back(node + 1);
      net.total += c.target;
    } else {
      net.arcs.push_back({node, node + 1, c.target});
      net.sinks.push_back(node + 1);
      net.total_blue += c.target;
    }
  }
  net.first_variable_arc = net.arcs.size();
  for (VarId v : csp.variables) {
    const auto& occ = csp.occurrence(v);
    net.arcs.push_back({static_cast<std::uint32_t>(2 * occ.red), static_cast<std::uint32_t>(2 * occ.blue), 1});
    net.arc_variable.push_back(v);
  }
  return net;
}

struct FlowResult {
  std::int64_t value = 0;
  std::vector<std::int64_t> arc_flow;
};

/// Blocking-flow max-flow (shortest augmenting paths in phases). Sources and
/// sinks are tied to a super source and super sink by uncapacitated arcs.
/// Adjacency is scanned in arc order, so results are deterministic.
class BlockingFlowBackend {
 public:
  static FlowResult solve(const FlowNetwork& net) {
    BlockingFlowBackend b(net);
    return b.run();
  }

 private:
  explicit BlockingFlowBackend(const FlowNetwork& net) : net_(net) {
    const std::size_t n = net.node_count + 2;
    source_ = static_cast<std::uint32_t>(net.node_count);
    sink_ = source_ + 1;
    std::int64_t inf = 1;
    for (const auto& a : net.arcs) inf += a.capacity;
    std::vector<FlowArc> all = net.arcs;
    for (auto s : net.sources) all.push_back({source_, s, inf});
    for (auto t : net.sinks) all.push_back({t, sink_, inf});
    // Residual pairs 2i (forward) and 2i+1 (backward), grouped by tail.
    to_.resize(2 * all.size());
    cap_.resize(2 * all.size());
    start_.assign(n + 1, 0);
    for (const auto& a : all) {
      ++start_[a.from + 1];
      ++start_[a.to + 1];
    }
    for (std::size_t v = 0; v < n; ++v) start_[v + 1] += start_[v];
    adj_.resize(2 * all.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::uint32_t i = 0; i < all.size(); ++i) {
      to_[2 * i] = all[i].to;
      cap_[2 * i] = all[i].capacity;
      to_[2 * i + 1] = all[i].from;
      cap_[2 * i + 1] = 0;
      adj_[fill[all[i].from]++] = 2 * i;
      adj_[fill[all[i].to]++] = 2 * i + 1;
    }
    level_.resize(n);
    cursor_.resize(n);
  }

  bool build_levels() {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<std::uint32_t> queue{source_};
    level_[source_] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto v = queue[head];
      for (auto k = start_[v]; k < start_[v + 1]; ++k) {
        const auto e = adj_[k];
        if (cap_[e] > 0 && level_[to_[e]] < 0) {
          level_[to_[e]] = level_[v] + 1;
          queue.push_back(to_[e]);
        }
      }
    }
    return level_[sink_] >= 0;
  }

  std::int64_t blocking_flow() {
    for (std::size_t v = 0; v < cursor_.size(); ++v) cursor_[v] = start_[v];
    std::int64_t pushed = 0;
    std::vector<std::uint32_t> path;
    std::uint32_t v = source_;
    while (true) {
      if (v == sink_) {
        std::int64_t f = std::numeric_limits<std::int64_t>::max();
        for (auto e : path) f = std::min(f, cap_[e]);
        for (auto e : path) {
          cap_[e] -= f;
          cap_[e ^ 1U] += f;
        }
        pushed += f;
        path.clear();
        v = source_;
        continue;
      }
      bool advanced = false;
      for (; cursor_[v] < start_[v + 1]; ++cursor_[v]) {
        const auto e = adj_[cursor_[v]];
        if (cap_[e] > 0 && level_[to_[e]] == level_[v] + 1) {
          path.push_back(e);
          v = to_[e];
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      level_[v] = -1;  // dead end for this phase
      if (path.empty()) break;
      const auto e = path.back();
      path.pop_back();
      v = to_[e ^ 1U];
      ++cursor_[v];
    }
    return pushed;
  }

  FlowResult run() {
    FlowResult result;
    while (build_levels()) result.value += blocking_flow();
    result.arc_flow.resize(net_.arcs.size());
    for (std::size_t i = 0; i < net_.arcs.size(); ++i) result.arc_flow[i] = cap_[2 * i + 1];
    return result;
  }

  const FlowNetwork& net_;
  std::uint32_t source_ = 0;
  std::uint32_t sink_ = 0;
  std::vector<std::uint32_t> to_;
  std::vector<std::int64_t> cap_;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> adj_;
  std::vector<int> level_;
  std::vector<std::uint32_t> cursor_;
};

/// Maximum integer flow. The backend is a seam for alternative algorithms.
template <class Backend = BlockingFlowBackend>
FlowResult max_flow(const FlowNetwork& net) {
  return Backend::solve(net);
}

/// A variable is true iff its arc carries flow. Empty unless the flow meets
/// every red and blue target exactly.
inline std::optional<Assignment> extract_assignment(const FlowNetwork& net, const CspInstance& csp,
                                                    const FlowResult& flow) {
  if (net.total != net.total_blue || flow.value != net.total) return std::nullopt;
  Assignment a(csp.angle_slots, csp.fresh_slots);
  for (std::size_t i = 0; i < net.arc_variable.size(); ++i)
    a.set(net.arc_variable[i], flow.arc_flow[net.first_variable_arc + i] > 0);
  return a;
}

struct CspSolution {
  bool satisfiable = false;
  bool totals_mismatch = false;
  std::int64_t flow_value = 0;
  std::int64_t total = 0;
  Assignment assignment;
};

/// Decides a CSP: totals short-circuit, then max-flow, then a direct check
/// of every clause against the extracted assignment.
template <class Backend = BlockingFlowBackend>
CspSolution solve_csp(const CspInstance& csp, const FlowNetwork& net) {
  CspSolution s;
  s.total = net.total;
  if (net.total != net.total_blue) {
    s.totals_mismatch = true;
    return s;
  }
  const FlowResult flow = max_flow<Backend>(net);
  s.flow_value = flow.value;
  auto a = extract_assignment(net, csp, flow);
  if (!a) return s;
  if (auto bad = first_violated_clause(csp, *a))
    throw std::logic_error("solve_csp: extracted assignment violates clause " + std::to_string(*bad));
  s.satisfiable = true;
  s.assignment = std::move(*a);
  return s;
}

template <class Backend = BlockingFlowBackend>
CspSolution solve_csp(const CspInstance& csp) {
  return solve_csp<Backend>(csp, csp_to_flow(csp));
}

// Arc-list text: header, then "arc from to capacity [variable]" per arc.
inline std::string dump_flow(const FlowNetwork& net) {
  std::ostringstream out;
  out << "flow nodes " << net.node_count << " arcs " << net.arcs.size() << " total " << net.total << "\n";
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& a = net.arcs[i];
    out << "arc " << a.from << ' ' << a.to << ' ' << a.capacity;
    if (i >= net.first_variable_arc) out << ' ' << to_string(net.arc_variable[i - net.first_variable_arc]);
    out << '\n';
  }
  return out.str();
}

}  // namespace flatfold
