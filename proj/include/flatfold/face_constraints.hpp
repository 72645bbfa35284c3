#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flatfold/geometry.hpp"
#include "flatfold/graph.hpp"

namespace flatfold {

enum class VarKind : std::uint8_t { angle, fresh };

/// A boolean CSP variable: either an original angle (true = mountain) or a
/// fresh variable introduced while reducing an even run.
struct VarId {
  VarKind kind = VarKind::angle;
  std::uint32_t index = 0;

  static constexpr VarId angle(AngleId a) { return {VarKind::angle, a}; }
  static constexpr VarId fresh(std::uint32_t i) { return {VarKind::fresh, i}; }

  friend constexpr auto operator<=>(const VarId&, const VarId&) = default;
};

inline std::string to_string(VarId v) { return (v.kind == VarKind::angle ? "a" : "f") + std::to_string(v.index); }

enum class Color : std::uint8_t { red, blue };

/// "Exactly `target` of `vars` are true."
struct Clause {
  Color color = Color::red;
  std::vector<VarId> vars;
  std::uint32_t target = 0;
};

/// The y/z pair of one even-run reduction and the clauses that force them.
struct FreshPair {
  VarId y;
  VarId z;
  std::size_t red_clause = 0;   // index into FaceConstraints::clauses
  std::size_t blue_clause = 0;
};

struct FaceConstraints {
  FaceId face = no_id;
  std::vector<Clause> clauses;
  std::vector<FreshPair> fresh;
};

/// Cyclic doubly-linked list of maximal equal-length runs over a face's
/// edges, with a FIFO of runs strictly shorter than both neighbours.
class RunList {
 public:
  using Index = std::uint32_t;

  struct EdgeNode {
    Length length;
    VarId angle_after;
    Index prev = no_id;
    Index next = no_id;
  };

  struct Run {
    Length length;
    Index first = no_id;  // edge nodes
    Index last = no_id;
    std::uint32_t count = 0;
    Index prev = no_id;  // runs
    Index next = no_id;
    bool alive = false;
    bool queued = false;
  };

  explicit RunList(const FaceCycle& f) {
    const std::size_t n = f.entries.size();
    if (n == 0) throw std::logic_error("RunList: empty face");
    edges_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& e = f.entries[i];
      edges_.push_back({e.length, VarId::angle(e.angle), static_cast<Index>((i + n - 1) % n),
                        static_cast<Index>((i + 1) % n)});
    }
    edge_count_ = n;
    // Start the first run at a length change so no run straddles the wrap.
    std::size_t start = 0;
    while (start < n && edges_[start].length == edges_[(start + n - 1) % n].length) ++start;
    if (start == n) {
      runs_.push_back({edges_[0].length, 0, static_cast<Index>(n - 1), static_cast<std::uint32_t>(n), 0, 0, true, false});
      head_ = 0;
      alive_runs_ = 1;
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto i = static_cast<Index>((start + j) % n);
      if (j == 0 || edges_[i].length != runs_.back().length) {
        Run r;
        r.length = edges_[i].length;
        r.first = r.last = i;
        r.count = 1;
        r.alive = true;
        runs_.push_back(r);
      } else {
        runs_.back().last = i;
        ++runs_.back().count;
      }
    }
    const auto m = static_cast<Index>(runs_.size());
    for (Index r = 0; r < m; ++r) {
      runs_[r].prev = (r + m - 1) % m;
      runs_[r].next = (r + 1) % m;
    }
    alive_runs_ = m;
    head_ = 0;
    // Report runs from the one holding entry 0 so views follow boundary order.
    for (Index r = 0; r < m; ++r)
      if (covers(r, 0)) head_ = r;
    Index r = head_;
    do {
      maybe_queue(r);
      r = runs_[r].next;
    } while (r != head_);
  }

  std::size_t run_count() const { return alive_runs_; }
  std::size_t edge_count() const { return edge_count_; }
  const Run& run(Index r) const { return runs_.at(r); }
  const EdgeNode& edge(Index e) const { return edges_.at(e); }

  /// Runs in cyclic order starting at the head: (length, number of edges).
  std::vector<std::pair<Length, std::uint32_t>> runs() const {
    std::vector<std::pair<Length, std::uint32_t>> out;
    Index r = head_;
    do {
      out.emplace_back(runs_[r].length, runs_[r].count);
      r = runs_[r].next;
    } while (r != head_);
    return out;
  }

  std::vector<Index> queued() const {
    std::vector<Index> out;
    for (Index r : queue_)
      if (runs_[r].alive && runs_[r].queued) out.push_back(r);
    return out;
  }

  Index head() const { return head_; }

  /// Removes and returns the oldest surrounded run, or no_id if none is queued.
  Index pop_surrounded() {
    while (!queue_.empty()) {
      const Index r = queue_.front();
      queue_.pop_front();
      if (runs_[r].alive && runs_[r].queued) {
        runs_[r].queued = false;
        return r;
      }
    }
    return no_id;
  }

  /// Angles touching the run's edges: the one before its first edge, then one after each edge.
  std::vector<VarId> run_angles(Index r) const {
    const Run& run = runs_[r];
    std::vector<VarId> out;
    out.reserve(run.count + 1);
    out.push_back(edges_[edges_[run.first].prev].angle_after);
    Index e = run.first;
    for (std::uint32_t i = 0; i < run.count; ++i, e = edges_[e].next) out.push_back(edges_[e].angle_after);
    return out;
  }

  /// Current angles of the face, in boundary order from the head run.
  std::vector<VarId> angles() const {
    std::vector<VarId> out;
    out.reserve(edge_count_);
    const Index start = runs_[head_].first;
    Index e = start;
    do {
      out.push_back(edges_[e].angle_after);
      e = edges_[e].next;
    } while (e != start);
    return out;
  }

  /// Odd run: the run and both flanking edges become one edge of length
  /// prev - run + next. Requires at least three runs.
  void splice_merge(Index r) {
    Run& run = runs_[r];
    const Index p = run.prev;
    const Index nx = run.next;
    if (p == nx) throw std::logic_error("RunList: degenerate odd-run merge");
    const Index before = runs_[p].last;
    const Index after = runs_[nx].first;
    const Index keep_left = edges_[before].prev;
    const Index keep_right = edges_[after].next;

    // Edge level: `after` is reused as the merged edge and keeps its angle.
    edges_[after].length = runs_[p].length - run.length + runs_[nx].length;
    edges_[keep_left].next = after;
    edges_[after].prev = keep_left;
    edge_count_ -= run.count + 1;

    // Run level.
    unlink_run(r);
    const auto x = static_cast<Index>(runs_.size());
    runs_.push_back({edges_[after].length, after, after, 1, p, nx, true, false});
    runs_[p].next = x;
    runs_[nx].prev = x;
    ++alive_runs_;
    if (--runs_[p].count == 0)
      unlink_run(p);
    else
      runs_[p].last = keep_left;
    if (--runs_[nx].count == 0)
      unlink_run(nx);
    else
      runs_[nx].first = keep_right;
    if (!runs_[head_].alive) head_ = x;

    Index merged = x;
    if (runs_[merged].prev != merged && runs_[runs_[merged].prev].length == runs_[merged].length)
      merged = absorb(runs_[merged].prev, merged);
    if (runs_[merged].next != merged && runs_[runs_[merged].next].length == runs_[merged].length)
      merged = absorb(merged, runs_[merged].next);
    maybe_queue(merged);
    maybe_queue(runs_[merged].prev);
    maybe_queue(runs_[merged].next);
  }

  /// Even run: the run's edges disappear and one new angle `z` takes the
  /// place of the angles around them.
  void splice_angle(Index r, VarId z) {
    Run& run = runs_[r];
    const Index p = run.prev;
    const Index nx = run.next;
    const Index before = runs_[p].last;
    const Index after = runs_[nx].first;
    edges_[before].angle_after = z;
    edges_[before].next = after;
    edges_[after].prev = before;
    edge_count_ -= run.count;
    unlink_run(r);
    if (head_ == r) head_ = p;
    Index keep = p;
    if (p != nx && runs_[p].length == runs_[nx].length) keep = absorb(p, nx);
    maybe_queue(keep);
    if (runs_[keep].next != keep) maybe_queue(runs_[keep].next);
  }

 private:
  bool covers(Index r, Index edge) const {
    Index e = runs_[r].first;
    for (std::uint32_t i = 0; i < runs_[r].count; ++i, e = edges_[e].next)
      if (e == edge) return true;
    return false;
  }

  bool surrounded(Index r) const {
    const Run& run = runs_[r];
    if (alive_runs_ < 2) return false;
    return runs_[run.prev].length > run.length && runs_[run.next].length > run.length;
  }

  void maybe_queue(Index r) {
    if (!runs_[r].alive || runs_[r].queued || !surrounded(r)) return;
    runs_[r].queued = true;
    queue_.push_back(r);
  }

  void unlink_run(Index r) {
    Run& run = runs_[r];
    runs_[run.prev].next = run.next;
    runs_[run.next].prev = run.prev;
    run.alive = false;
    run.queued = false;
    --alive_runs_;
  }

  // Appends the run following `a` to `a`; both have equal length.
  Index absorb(Index a, Index b) {
    if (runs_[b].queued || runs_[a].queued) throw std::logic_error("RunList: merging a queued run");
    runs_[a].last = runs_[b].last;
    runs_[a].count += runs_[b].count;
    unlink_run(b);
    if (head_ == b) head_ = a;
    return a;
  }

  std::vector<EdgeNode> edges_;
  std::vector<Run> runs_;
  std::deque<Index> queue_;
  std::size_t edge_count_ = 0;
  std::size_t alive_runs_ = 0;
  Index head_ = 0;
};

/// Allocates fresh variable ids; shared across the faces of one CSP.
class FreshCounter {
 public:
  VarId next() { return VarId::fresh(count_++); }
  std::uint32_t count() const { return count_; }

 private:
  std::uint32_t count_ = 0;
};

/// Exact-count clauses whose solutions (projected to the face's angles) are
/// precisely the flat-foldable mountain/valley assignments of the face.
/// Requires face_closure_check(f).ok.
inline FaceConstraints generate_face_constraints(const FaceCycle& f, FreshCounter& fresh) {
  if (!face_closure_check(f).ok) throw std::logic_error("generate_face_constraints: face fails closure");
  FaceConstraints out;
  out.face = f.face;
  RunList runs(f);
  while (runs.run_count() > 1) {
    const RunList::Index r = runs.pop_surrounded();
    if (r == no_id) throw std::logic_error("generate_face_constraints: no surrounded run");
    std::vector<VarId> s = runs.run_angles(r);
    const auto size = static_cast<std::uint32_t>(s.size());
    if (runs.run(r).count % 2 == 1) {
      out.clauses.push_back({Color::red, std::move(s), size / 2});
      runs.splice_merge(r);
    } else {
      const VarId y = fresh.next();
      const VarId z = fresh.next();
      s.insert(s.begin(), y);
      out.clauses.push_back({Color::red, std::move(s), (size + 1) / 2});
      out.clauses.push_back({Color::blue, {y, z}, 1});
      out.fresh.push_back({y, z, out.clauses.size() - 2, out.clauses.size() - 1});
      runs.splice_angle(r, z);
    }
  }
  std::vector<VarId> all = runs.angles();
  const auto half = static_cast<long>(all.size() / 2);
  const long target = f.is_exterior ? half + 1 : half - 1;
  if (target < 0 || target > static_cast<long>(all.size()))
    throw std::logic_error("generate_face_constraints: equal-length target out of range");
  out.clauses.push_back({Color::red, std::move(all), static_cast<std::uint32_t>(target)});
  return out;
}

inline FaceConstraints generate_face_constraints(const FaceCycle& f) {
  FreshCounter fresh;
  return generate_face_constraints(f, fresh);
}

}  // namespace flatfold
