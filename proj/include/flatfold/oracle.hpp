#pragma once

// Ground truth used by the tests and by witness verification. Nothing here
// depends on the constraint generator, the CSP, or the flow solver.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "flatfold/graph.hpp"
#include "flatfold/io.hpp"
#include "flatfold/verdict.hpp"

namespace flatfold {

/// A face cycle with a fold on each angle; mv[i] is the angle after edge i.
struct AssignedCycle {
  std::vector<Length> lengths;
  std::vector<Fold> mv;
  bool is_exterior = false;
};

namespace oracle_detail {

struct MinimalRun {
  std::size_t start;  // first edge
  std::size_t count;
};

inline bool closes(std::span<const Length> lengths) {
  if (lengths.size() % 2 != 0) return false;
  Rational sum = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i % 2 == 0)
      sum += lengths[i];
    else
      sum -= lengths[i];
  }
  return sum == 0;
}

// Maximal runs of equal edges flanked by strictly longer edges, by start index.
inline std::vector<MinimalRun> minimal_runs(const std::vector<Length>& len) {
  const std::size_t n = len.size();
  std::size_t s = 0;
  while (s < n && len[s] == len[(s + n - 1) % n]) ++s;
  std::vector<MinimalRun> runs;
  if (s == n) return runs;
  std::vector<MinimalRun> all;
  for (std::size_t j = 0; j < n;) {
    const std::size_t start = (s + j) % n;
    std::size_t k = 1;
    while (j + k < n && len[(s + j + k) % n] == len[start]) ++k;
    all.push_back({start, k});
    j += k;
  }
  for (const auto& r : all) {
    const Length& before = len[(r.start + n - 1) % n];
    const Length& after = len[(r.start + r.count) % n];
    if (before > len[r.start] && after > len[r.start]) runs.push_back(r);
  }
  std::sort(runs.begin(), runs.end(), [](const MinimalRun& a, const MinimalRun& b) { return a.start < b.start; });
  return runs;
}

}  // namespace oracle_detail

/// Picks which minimal run to reduce; receives the candidates sorted by start index.
using RunChooser = std::function<std::size_t(std::size_t candidate_count)>;

/// Direct recursive test of a mountain/valley assignment on one cycle:
/// equal-length base case compares valley and mountain counts, otherwise a
/// minimal run is checked and crimped away.
inline bool crimp_check(AssignedCycle c, const RunChooser& choose = {}) {
  using oracle_detail::MinimalRun;
  if (c.lengths.size() != c.mv.size()) throw std::invalid_argument("crimp_check: size mismatch");
  if (!oracle_detail::closes(c.lengths)) return false;
  while (true) {
    const std::size_t n = c.lengths.size();
    const auto runs = oracle_detail::minimal_runs(c.lengths);
    if (runs.empty()) {
      long mountains = 0;
      for (Fold f : c.mv) mountains += f == Fold::mountain;
      const long valleys = static_cast<long>(n) - mountains;
      return c.is_exterior ? mountains - valleys == 2 : valleys - mountains == 2;
    }
    const MinimalRun r = runs[choose ? choose(runs.size()) : 0];
    const std::size_t m = r.start;
    long balance = 0;  // mountains minus valleys over the angles touching the run
    for (std::size_t i = 0; i <= r.count; ++i) balance += c.mv[(m + n - 1 + i) % n] == Fold::mountain ? 1 : -1;
    AssignedCycle next;
    next.is_exterior = c.is_exterior;
    if (r.count % 2 == 1) {
      if (balance != 0) return false;
      const std::size_t before = (m + n - 1) % n;
      const std::size_t after = (m + r.count) % n;
      if (before == after) throw std::logic_error("crimp_check: degenerate odd run");
      next.lengths.push_back(c.lengths[before] - c.lengths[m] + c.lengths[after]);
      next.mv.push_back(c.mv[after]);
      for (std::size_t i = (after + 1) % n; i != before; i = (i + 1) % n) {
        next.lengths.push_back(c.lengths[i]);
        next.mv.push_back(c.mv[i]);
      }
    } else {
      if (balance != 1 && balance != -1) return false;
      const std::size_t before = (m + n - 1) % n;
      next.lengths.push_back(c.lengths[before]);
      next.mv.push_back(balance > 0 ? Fold::mountain : Fold::valley);
      for (std::size_t i = (m + r.count) % n; i != before; i = (i + 1) % n) {
        next.lengths.push_back(c.lengths[i]);
        next.mv.push_back(c.mv[i]);
      }
    }
    c = std::move(next);
  }
}

/// Same recursion as crimp_check, on a run-length list so long faces stay
/// near-linear. Runs are reduced in queue order.
inline bool crimp_check_fast(const AssignedCycle& c) {
  const std::size_t n = c.lengths.size();
  if (n != c.mv.size()) throw std::invalid_argument("crimp_check_fast: size mismatch");
  if (!oracle_detail::closes(c.lengths)) return false;
  struct Run {
    Length len;
    std::deque<Fold> mv;  // angle after each edge of the run
    std::uint32_t prev = 0, next = 0;
    bool alive = true;
    bool queued = false;
  };
  std::vector<Run> runs;
  std::size_t s = 0;
  while (s < n && c.lengths[s] == c.lengths[(s + n - 1) % n]) ++s;
  if (s == n) s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = (s + j) % n;
    if (runs.empty() || c.lengths[i] != runs.back().len) runs.push_back({c.lengths[i], {}, 0, 0, true, false});
    runs.back().mv.push_back(c.mv[i]);
  }
  const auto m = static_cast<std::uint32_t>(runs.size());
  for (std::uint32_t r = 0; r < m; ++r) {
    runs[r].prev = (r + m - 1) % m;
    runs[r].next = (r + 1) % m;
  }
  std::size_t alive = m;
  std::deque<std::uint32_t> queue;
  auto push = [&](std::uint32_t r) {
    if (runs[r].alive && !runs[r].queued) {
      runs[r].queued = true;
      queue.push_back(r);
    }
  };
  auto unlink = [&](std::uint32_t r) {
    runs[runs[r].prev].next = runs[r].next;
    runs[runs[r].next].prev = runs[r].prev;
    runs[r].alive = false;
    --alive;
  };
  // b follows a and has the same length; the smaller fold list moves.
  auto absorb = [&](std::uint32_t a, std::uint32_t b) {
    if (runs[a].mv.size() >= runs[b].mv.size()) {
      for (Fold f : runs[b].mv) runs[a].mv.push_back(f);
      unlink(b);
      return a;
    }
    for (auto it = runs[a].mv.rbegin(); it != runs[a].mv.rend(); ++it) runs[b].mv.push_front(*it);
    unlink(a);
    return b;
  };
  auto settle = [&](std::uint32_t r) {
    if (alive > 1 && runs[runs[r].prev].len == runs[r].len) r = absorb(runs[r].prev, r);
    if (alive > 1 && runs[runs[r].next].len == runs[r].len) r = absorb(r, runs[r].next);
    push(r);
    push(runs[r].prev);
    push(runs[r].next);
  };
  for (std::uint32_t r = 0; r < m; ++r) push(r);

  while (alive > 1) {
    if (queue.empty()) throw std::logic_error("crimp_check_fast: no reducible run");
    const std::uint32_t r = queue.front();
    queue.pop_front();
    if (!runs[r].alive) continue;
    runs[r].queued = false;
    const std::uint32_t p = runs[r].prev;
    const std::uint32_t q = runs[r].next;
    if (!(runs[p].len > runs[r].len && runs[q].len > runs[r].len)) continue;
    long balance = runs[p].mv.back() == Fold::mountain ? 1 : -1;
    for (Fold f : runs[r].mv) balance += f == Fold::mountain ? 1 : -1;
    if (runs[r].mv.size() % 2 == 1) {
      if (balance != 0) return false;
      if (p == q) throw std::logic_error("crimp_check_fast: degenerate odd run");
      const Length merged = runs[p].len - runs[r].len + runs[q].len;
      const Fold after = runs[q].mv.front();
      runs[p].mv.pop_back();
      runs[q].mv.pop_front();
      unlink(r);
      const auto x = static_cast<std::uint32_t>(runs.size());
      runs.push_back({merged, {after}, p, q, true, false});
      runs[p].next = x;
      runs[q].prev = x;
      ++alive;
      if (runs[p].mv.empty()) unlink(p);
      if (runs[q].mv.empty()) unlink(q);
      settle(x);
    } else {
      if (balance != 1 && balance != -1) return false;
      runs[p].mv.back() = balance > 0 ? Fold::mountain : Fold::valley;
      unlink(r);
      if (alive > 1 && runs[p].len == runs[q].len) {
        settle(absorb(p, q));
      } else {
        push(p);
        push(q);
      }
    }
  }
  std::uint32_t last = 0;
  while (!runs[last].alive) ++last;
  long mountains = 0;
  for (Fold f : runs[last].mv) mountains += f == Fold::mountain;
  const long valleys = static_cast<long>(runs[last].mv.size()) - mountains;
  return c.is_exterior ? mountains - valleys == 2 : valleys - mountains == 2;
}

/// Every answer crimp_check can give over all sequences of run choices.
inline std::vector<bool> crimp_check_all_orders(const AssignedCycle& c) {
  std::vector<bool> answers;
  // Depth-first over choice sequences, replaying the prefix each time.
  std::vector<std::size_t> prefix;
  std::function<void()> explore = [&]() {
    std::size_t depth = 0;
    std::size_t branching = 0;
    bool has_more = false;
    const bool ok = crimp_check(c, [&](std::size_t count) -> std::size_t {
      if (depth < prefix.size()) return prefix[depth++];
      if (!has_more) {
        has_more = true;
        branching = count;
      }
      ++depth;
      return 0;
    });
    if (!has_more) {
      answers.push_back(ok);
      return;
    }
    for (std::size_t i = 0; i < branching; ++i) {
      prefix.push_back(i);
      explore();
      prefix.pop_back();
    }
  };
  explore();
  return answers;
}

/// Independent geometric test: lay the cycle on a line and search for a
/// stacking order of its edges in which no fold pierces an edge and folds
/// meeting at the same point nest instead of interleaving. Exponential; meant for n <= 12.
inline bool layer_order_check(const AssignedCycle& c) {
  const std::size_t n = c.lengths.size();
  if (n != c.mv.size()) throw std::invalid_argument("layer_order_check: size mismatch");
  if (n > 16) throw std::length_error("layer_order_check: cycle too long");
  if (n % 2 != 0 || n == 0) return false;
  std::vector<Rational> x(n + 1);
  std::vector<int> dir(n);
  for (std::size_t i = 0; i < n; ++i) {
    dir[i] = i % 2 == 0 ? 1 : -1;
    x[i + 1] = dir[i] > 0 ? Rational(x[i] + c.lengths[i]) : Rational(x[i] - c.lengths[i]);
  }
  if (x[n] != 0) return false;

  // A simple closed curve turns by +-360 degrees; each fold turns by +-180.
  long mountains = 0;
  for (Fold f : c.mv) mountains += f == Fold::mountain;
  const long valleys = static_cast<long>(n) - mountains;
  if ((c.is_exterior ? mountains - valleys : valleys - mountains) != 2) return false;

  struct Crease {
    std::size_t lower, upper;
    Rational at;
    int side;
  };
  std::vector<Crease> creases;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    // Walking with the face on the left: a valley turns left (up when moving
    // right), a mountain turns right.
    const bool next_above = (dir[i] > 0) != (c.mv[i] == Fold::mountain);
    creases.push_back({next_above ? i : j, next_above ? j : i, x[i + 1], -dir[i]});
  }
  auto lo = [&](std::size_t e) { return std::min(x[e], x[e + 1]); };
  auto hi = [&](std::size_t e) { return std::max(x[e], x[e + 1]); };

  struct Pierce {
    std::size_t crease, edge;
  };
  std::vector<Pierce> pierces;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t e = 0; e < n; ++e)
      if (e != creases[k].lower && e != creases[k].upper && lo(e) < creases[k].at && creases[k].at < hi(e))
        pierces.push_back({k, e});
  // Folds sharing a point and a side must nest like brackets: while building
  // the stack bottom-up, a pair can only close if it is the innermost open one
  // at its location.
  std::vector<std::size_t> location(n);
  std::size_t location_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    location[k] = location_count;
    for (std::size_t j = 0; j < k; ++j)
      if (creases[j].at == creases[k].at && creases[j].side == creases[k].side) {
        location[k] = location[j];
        break;
      }
    if (location[k] == location_count) ++location_count;
  }

  using Mask = std::uint32_t;
  struct State {
    Mask placed = 0;
    std::vector<std::vector<std::uint8_t>> open;  // per location, innermost last
  };
  auto in = [](Mask m, std::size_t e) { return (m >> e) & 1U; };
  auto key = [](const State& st) {
    std::string k(reinterpret_cast<const char*>(&st.placed), sizeof st.placed);
    for (const auto& stack : st.open) {
      k.append(stack.begin(), stack.end());
      k.push_back('|');
    }
    return k;
  };
  auto place = [&](const State& st, std::size_t t) -> std::optional<State> {
    for (const auto& cr : creases) {
      if (cr.upper == t && !in(st.placed, cr.lower)) return std::nullopt;
      if (cr.lower == t && in(st.placed, cr.upper)) return std::nullopt;
    }
    for (const auto& p : pierces)
      if (p.edge == t && in(st.placed, creases[p.crease].lower) != in(st.placed, creases[p.crease].upper))
        return std::nullopt;
    State next = st;
    next.placed |= Mask{1} << t;
    for (std::size_t k = 0; k < n; ++k) {
      const Crease& cr = creases[k];
      if (cr.lower != t && cr.upper != t) continue;
      auto& stack = next.open[location[k]];
      const std::size_t partner = cr.lower == t ? cr.upper : cr.lower;
      if (!in(st.placed, partner)) {
        stack.push_back(static_cast<std::uint8_t>(k));
      } else {
        if (stack.empty() || stack.back() != k) return std::nullopt;
        stack.pop_back();
      }
    }
    return next;
  };

  const Mask full = (Mask{1} << n) - 1;
  State root;
  root.open.resize(location_count);
  std::unordered_set<std::string> seen{key(root)};
  std::vector<State> frontier{root};
  while (!frontier.empty()) {
    State st = std::move(frontier.back());
    frontier.pop_back();
    if (st.placed == full) return true;
    for (std::size_t t = 0; t < n; ++t) {
      if (in(st.placed, t)) continue;
      auto next = place(st, t);
      if (next && seen.insert(key(*next)).second) frontier.push_back(std::move(*next));
    }
  }
  return false;
}

namespace oracle_detail {

struct OracleFace {
  FaceId face;
  std::vector<Length> lengths;
  std::vector<AngleId> angles;  // no_id when the whole face is one flat-joined edge
  bool closes = false;
  Rational diameter;            // extent of all boundary vertices
};

// Own flat-merging walk, kept separate from merged_face_cycle on purpose.
inline OracleFace build_face(const Instance& inst, FaceId f) {
  const EmbeddedGraph& g = inst.graph;
  const Face& face = g.face(f);
  const std::size_t n = face.darts.size();
  OracleFace out;
  out.face = f;
  std::size_t first_real = n;
  for (std::size_t i = 0; i < n; ++i)
    if (!inst.is_flat(face.angles[i])) {
      first_real = i;
      break;
    }
  Rational pos = 0, lo = 0, hi = 0;
  int dir = 1;
  Length acc = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i = first_real == n ? j : (first_real + 1 + j) % n;
    const Length& len = g.dart_length(face.darts[i]);
    acc += len;
    if (dir > 0)
      pos += len;
    else
      pos -= len;
    lo = std::min(lo, pos);
    hi = std::max(hi, pos);
    if (!inst.is_flat(face.angles[i])) {
      out.lengths.push_back(acc);
      out.angles.push_back(face.angles[i]);
      acc = 0;
      dir = -dir;
    }
  }
  if (out.lengths.empty()) {
    out.lengths.push_back(acc);
    out.angles.push_back(no_id);
  }
  out.diameter = hi - lo;
  out.closes = closes(out.lengths) && out.angles.front() != no_id;
  return out;
}

}  // namespace oracle_detail

/// Independent check of a witness: flats exactly where specified, one
/// mountain per plain vertex (none at a two-flat vertex), and every face
/// accepted by crimp_check with the given exteriors. Returns a description of
/// the first failure.
inline std::optional<std::string> verify_witness(const Instance& inst, std::span<const Fold> witness,
                                                 std::span<const FaceId> exteriors) {
  const EmbeddedGraph& g = inst.graph;
  if (witness.size() != g.angle_count()) return "witness size differs from the angle count";
  for (AngleId a = 0; a < g.angle_count(); ++a)
    if ((witness[a] == Fold::flat) != inst.is_flat(a)) return "angle " + std::to_string(a) + " flat mismatch";
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    std::size_t flats = 0, mountains = 0;
    for (AngleId a : g.angles_at_vertex(v)) {
      flats += witness[a] == Fold::flat;
      mountains += witness[a] == Fold::mountain;
    }
    if (g.degree(v) == 0) continue;
    if (flats != 0 && flats != 2) return "vertex " + g.vertex_name(v) + " has " + std::to_string(flats) + " flats";
    if (mountains != (flats == 2 ? 0U : 1U))
      return "vertex " + g.vertex_name(v) + " has " + std::to_string(mountains) + " mountains";
  }
  if (exteriors.size() != g.component_count()) return "one exterior per component expected";
  for (FaceId f = 0; f < g.face_count(); ++f) {
    const auto face = oracle_detail::build_face(inst, f);
    if (!face.closes) return "face " + std::to_string(f) + " fails closure";
    AssignedCycle c;
    c.lengths = face.lengths;
    for (AngleId a : face.angles) c.mv.push_back(witness[a]);
    c.is_exterior = exteriors[g.component_of_face(f)] == f;
    if (!crimp_check_fast(c)) return "face " + std::to_string(f) + " is not flat foldable under the witness";
  }
  return std::nullopt;
}

class TooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Exhaustive decision: every mountain/valley assignment with one mountain
/// per vertex, every face tried as exterior (unless one is designated),
/// every face checked with crimp_check, then the nesting diameters.
inline Verdict brute_force_decide(const Instance& inst, std::size_t max_angles = 22) {
  using oracle_detail::OracleFace;
  const EmbeddedGraph& g = inst.graph;
  Verdict verdict;
  verdict.stats.angles = g.angle_count();
  std::size_t free_angles = 0;
  for (AngleId a = 0; a < g.angle_count(); ++a) free_angles += !inst.is_flat(a);
  if (free_angles > max_angles)
    throw TooLarge("brute_force_decide: " + std::to_string(free_angles) + " angles exceeds the bound");

  auto unsat = [&](UnsatKind kind) {
    verdict.sat = false;
    verdict.reason = UnsatReason{};
    verdict.reason->kind = kind;
    verdict.witness.clear();
    return verdict;
  };

  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    std::size_t flats = 0;
    for (AngleId a : g.angles_at_vertex(v)) flats += inst.is_flat(a);
    if (flats != 0 && flats != 2) return unsat(UnsatKind::flat_count_violation);
  }

  std::vector<OracleFace> faces;
  for (FaceId f = 0; f < g.face_count(); ++f) faces.push_back(oracle_detail::build_face(inst, f));

  std::vector<std::vector<FaceId>> parent_faces(g.component_count());
  for (const auto& link : inst.nesting) parent_faces[g.component_of_face(link.parent_face)].push_back(link.parent_face);

  verdict.witness.assign(g.angle_count(), Fold::valley);
  for (AngleId a = 0; a < g.angle_count(); ++a)
    if (inst.is_flat(a)) verdict.witness[a] = Fold::flat;
  verdict.exteriors.assign(g.component_count(), no_id);

  for (ComponentId comp = 0; comp < g.component_count(); ++comp) {
    const Component& cc = g.component(comp);
    if (cc.edges.empty()) continue;
    for (FaceId f : cc.faces)
      if (!faces[f].closes) return unsat(UnsatKind::closure_violation);

    std::vector<FaceId> allowed;
    if (auto ext = g.exterior_face(); ext && g.component_of_face(*ext) == comp) {
      allowed.push_back(*ext);
    } else {
      for (FaceId f : cc.faces)
        if (std::find(parent_faces[comp].begin(), parent_faces[comp].end(), f) == parent_faces[comp].end())
          allowed.push_back(f);
    }

    // Mixed-radix walk over "which angle is the mountain" at each plain vertex.
    std::vector<std::vector<AngleId>> choices;
    for (VertexId v : cc.vertices) {
      std::vector<AngleId> free;
      std::size_t flats = 0;
      for (AngleId a : g.angles_at_vertex(v)) {
        if (inst.is_flat(a))
          ++flats;
        else
          free.push_back(a);
      }
      if (flats == 0 && !free.empty()) choices.push_back(std::move(free));
    }
    std::vector<std::size_t> digit(choices.size(), 0);
    std::vector<Fold> mv(g.angle_count(), Fold::valley);

    // Memo of crimp verdicts per face, keyed by the mountain bitmask.
    std::vector<std::unordered_map<std::uint32_t, std::pair<bool, bool>>> memo(g.face_count());
    auto face_ok = [&](FaceId f) {
      const OracleFace& face = faces[f];
      std::uint32_t mask = 0;
      for (std::size_t i = 0; i < face.angles.size(); ++i)
        if (mv[face.angles[i]] == Fold::mountain) mask |= 1U << i;
      auto it = memo[f].find(mask);
      if (it != memo[f].end()) return it->second;
      AssignedCycle c;
      c.lengths = face.lengths;
      for (AngleId a : face.angles) c.mv.push_back(mv[a]);
      c.is_exterior = false;
      const bool interior = crimp_check(c);
      c.is_exterior = true;
      const bool exterior = crimp_check(c);
      return memo[f].emplace(mask, std::make_pair(interior, exterior)).first->second;
    };

    bool found = false;
    while (!found) {
      for (std::size_t i = 0; i < choices.size(); ++i)
        for (std::size_t j = 0; j < choices[i].size(); ++j)
          mv[choices[i][j]] = j == digit[i] ? Fold::mountain : Fold::valley;
      std::vector<FaceId> bad;
      std::vector<FaceId> ext_ok;
      for (FaceId f : cc.faces) {
        const auto [interior, exterior] = face_ok(f);
        if (!interior) bad.push_back(f);
        if (exterior) ext_ok.push_back(f);
        if (bad.size() > 1) break;
      }
      if (bad.size() <= 1) {
        for (FaceId f : allowed) {
          const bool exterior_fits = std::find(ext_ok.begin(), ext_ok.end(), f) != ext_ok.end();
          if (exterior_fits && (bad.empty() || bad.front() == f)) {
            found = true;
            verdict.exteriors[comp] = f;
            break;
          }
        }
      }
      if (found) break;
      std::size_t i = 0;
      for (; i < digit.size(); ++i) {
        if (++digit[i] < choices[i].size()) break;
        digit[i] = 0;
      }
      if (i == digit.size()) break;
    }
    if (!found) return unsat(UnsatKind::no_valid_assignment);
    for (const auto& ch : choices)
      for (AngleId a : ch) verdict.witness[a] = mv[a];
  }

  for (const auto& link : inst.nesting) {
    Rational child = 0;
    for (FaceId f : g.component(link.child).faces) child = std::max(child, faces[f].diameter);
    if (child > faces[link.parent_face].diameter) return unsat(UnsatKind::diameter_nesting_violation);
  }
  verdict.sat = true;
  return verdict;
}

}  // namespace flatfold
