#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "flatfold/graph.hpp"
#include "flatfold/io.hpp"

namespace flatfold {

/// A simple cycle v0 - v1 - ... - v(n-1) - v0; edge i runs from v_i to v_(i+1).
/// One edge gives a loop.
inline Instance cycle_instance(const std::vector<Length>& lengths, std::optional<DartId> exterior = std::nullopt) {
  const std::size_t n = lengths.size();
  if (n < 1) throw std::invalid_argument("cycle_instance: need at least one edge");
  std::vector<std::string> names;
  std::vector<Edge> edges;
  std::vector<std::vector<DartId>> rotation(n);
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("v" + std::to_string(i));
    edges.push_back({"e" + std::to_string(i),
                     {static_cast<VertexId>(i), static_cast<VertexId>((i + 1) % n)},
                     lengths[i]});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto in = static_cast<EdgeId>((i + n - 1) % n);
    rotation[i] = {EmbeddedGraph::dart(static_cast<EdgeId>(i), 0), EmbeddedGraph::dart(in, 1)};
  }
  return Instance{EmbeddedGraph(std::move(names), std::move(edges), std::move(rotation), exterior), {}, {}};
}

inline Instance cycle_instance(const std::vector<long>& lengths) {
  std::vector<Length> ls;
  for (long l : lengths) ls.emplace_back(l);
  return cycle_instance(ls);
}

/// Unit-length k x k grid graph; 4k(k-1) angles.
inline Instance grid_instance(std::size_t k) {
  if (k < 2) throw std::invalid_argument("grid_instance: need k >= 2");
  auto id = [k](std::size_t i, std::size_t j) { return static_cast<VertexId>(j * k + i); };
  std::vector<std::string> names(k * k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) names[id(i, j)] = "p" + std::to_string(i) + "_" + std::to_string(j);
  std::vector<Edge> edges;
  std::vector<EdgeId> horizontal(k * k, no_id), vertical(k * k, no_id);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      if (i + 1 < k) {
        horizontal[id(i, j)] = static_cast<EdgeId>(edges.size());
        edges.push_back({"h" + std::to_string(edges.size()), {id(i, j), id(i + 1, j)}, 1});
      }
      if (j + 1 < k) {
        vertical[id(i, j)] = static_cast<EdgeId>(edges.size());
        edges.push_back({"u" + std::to_string(edges.size()), {id(i, j), id(i, j + 1)}, 1});
      }
    }
  std::vector<std::vector<DartId>> rotation(k * k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      auto& rot = rotation[id(i, j)];
      if (i + 1 < k) rot.push_back(EmbeddedGraph::dart(horizontal[id(i, j)], 0));
      if (j + 1 < k) rot.push_back(EmbeddedGraph::dart(vertical[id(i, j)], 0));
      if (i > 0) rot.push_back(EmbeddedGraph::dart(horizontal[id(i - 1, j)], 1));
      if (j > 0) rot.push_back(EmbeddedGraph::dart(vertical[id(i, j - 1)], 1));
    }
  return Instance{EmbeddedGraph(std::move(names), std::move(edges), std::move(rotation)), {}, {}};
}

enum class RandomMode : std::uint8_t {
  mixed,    // either of the two below, chosen per seed
  closure,  // built from coordinates, so every face closes
  loose,    // random lengths in {1,2,3} and random flat angles
  cycle,    // one even cycle with zero alternating sum
};

struct RandomParams {
  RandomMode mode = RandomMode::mixed;
  std::size_t max_angles = 22;  // upper bound on darts (= angles)
  std::size_t edges = 0;        // target edge count; 0 = random up to the bound
  bool allow_components = true;
};

namespace generate_detail {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  bool chance(unsigned percent) { return below(100) < percent; }

 private:
  std::mt19937_64 engine_;
};

// Mutable embedded graph with per-dart direction and flat flag ("the angle
// after this dart is flat"), used to grow random instances.
struct Builder {
  std::vector<long> x;
  std::vector<std::vector<DartId>> rot;
  std::vector<std::array<VertexId, 2>> ends;
  std::vector<long> len;
  std::vector<int> dir;
  std::vector<char> flat;

  VertexId add_vertex(long at) {
    x.push_back(at);
    rot.emplace_back();
    return static_cast<VertexId>(x.size() - 1);
  }
  EdgeId add_edge(VertexId u, VertexId w, long length) {
    ends.push_back({u, w});
    len.push_back(length);
    dir.push_back(0);
    dir.push_back(0);
    flat.push_back(0);
    flat.push_back(0);
    return static_cast<EdgeId>(ends.size() - 1);
  }
  VertexId origin(DartId d) const { return ends[d / 2][d % 2]; }
  std::size_t pos(DartId d) const {
    const auto& r = rot[origin(d)];
    return static_cast<std::size_t>(std::find(r.begin(), r.end(), d) - r.begin());
  }
  DartId rot_next(DartId d) const {
    const auto& r = rot[origin(d)];
    return r[(pos(d) + 1) % r.size()];
  }
  DartId rot_prev(DartId d) const {
    const auto& r = rot[origin(d)];
    return r[(pos(d) + r.size() - 1) % r.size()];
  }
  void insert_after(DartId a, DartId t) {
    auto& r = rot[origin(a)];
    r.insert(r.begin() + static_cast<long>(pos(a)) + 1, t);
  }
  std::vector<std::vector<DartId>> faces() const {
    std::vector<char> seen(2 * ends.size(), 0);
    std::vector<std::vector<DartId>> out;
    for (DartId d = 0; d < seen.size(); ++d) {
      if (seen[d]) continue;
      std::vector<DartId> walk;
      for (DartId e = d; !seen[e]; e = rot_prev(e ^ 1U)) {
        seen[e] = 1;
        walk.push_back(e);
      }
      out.push_back(std::move(walk));
    }
    return out;
  }
  // Directions a new dart may take in the corner after `a`, with the flat
  // flags (of a, of the new dart) that keep every vertex consistent.
  struct CornerOption {
    int dir;
    char flat_a;
    char flat_t;
  };
  std::vector<CornerOption> corner_options(DartId a) const {
    if (!flat[a]) return {{dir[a], 0, 0}};
    return {{dir[a], 0, 1}, {-dir[a], 1, 0}};
  }

  Instance build(std::optional<DartId> exterior) const {
    std::vector<std::string> names;
    for (std::size_t v = 0; v < x.size(); ++v) names.push_back("v" + std::to_string(v));
    std::vector<Edge> edges;
    for (std::size_t e = 0; e < ends.size(); ++e) edges.push_back({"e" + std::to_string(e), ends[e], len[e]});
    Instance inst{EmbeddedGraph(std::move(names), std::move(edges), rot, exterior), {}, {}};
    inst.flat.assign(inst.graph.angle_count(), false);
    for (DartId d = 0; d < flat.size(); ++d)
      if (flat[d]) inst.flat[inst.graph.angle_after(d)] = true;
    return inst;
  }
};

inline void grow(Builder& b, Rng& rng, std::size_t edge_budget, bool coordinates) {
  const VertexId u0 = b.add_vertex(0);
  const long first = 1 + static_cast<long>(rng.below(3));
  const VertexId w0 = b.add_vertex(first);
  const EdgeId e0 = b.add_edge(u0, w0, first);
  b.rot[u0].push_back(2 * e0);
  b.rot[w0].push_back(2 * e0 + 1);
  b.dir[2 * e0] = 1;
  b.dir[2 * e0 + 1] = -1;
  std::vector<VertexId> vertices{u0, w0};
  std::size_t used = 1;
  for (std::size_t attempt = 0; used < edge_budget && attempt < 40 * edge_budget; ++attempt) {
    const auto op = rng.below(100);
    if (op < 30) {  // leaf
      const VertexId u = vertices[rng.below(vertices.size())];
      const DartId a = b.rot[u][rng.below(b.rot[u].size())];
      const auto options = b.corner_options(a);
      const auto opt = options[rng.below(options.size())];
      const long l = 1 + static_cast<long>(rng.below(3));
      const VertexId w = b.add_vertex(b.x[u] + opt.dir * l);
      vertices.push_back(w);
      const EdgeId e = b.add_edge(u, w, l);
      b.insert_after(a, 2 * e);
      b.rot[w].push_back(2 * e + 1);
      b.dir[2 * e] = opt.dir;
      b.dir[2 * e + 1] = -opt.dir;
      b.flat[a] = opt.flat_a;
      b.flat[2 * e] = opt.flat_t;
      ++used;
    } else if (op < 80) {  // chord across one face
      const auto fs = b.faces();
      const auto& face = fs[rng.below(fs.size())];
      const DartId a1 = face[rng.below(face.size())];
      const DartId a2 = face[rng.below(face.size())];
      const VertexId u = b.origin(a1), w = b.origin(a2);
      long l = 1 + static_cast<long>(rng.below(3));
      Builder::CornerOption o1{}, o2{};
      if (coordinates) {
        if (a1 == a2) continue;
        std::vector<std::pair<Builder::CornerOption, Builder::CornerOption>> fits;
        for (auto p : b.corner_options(a1))
          for (auto q : b.corner_options(a2))
            if (q.dir == -p.dir && p.dir * (b.x[w] - b.x[u]) > 0) fits.emplace_back(p, q);
        if (fits.empty()) continue;
        std::tie(o1, o2) = fits[rng.below(fits.size())];
        l = o1.dir * (b.x[w] - b.x[u]);
      } else {
        o1 = b.corner_options(a1)[rng.below(b.corner_options(a1).size())];
        o2 = b.corner_options(a2)[rng.below(b.corner_options(a2).size())];
      }
      const EdgeId e = b.add_edge(u, w, l);
      if (a1 == a2) {
        // Adjacent darts of a loop enclose an empty one-edge face.
        b.insert_after(a1, 2 * e);
        b.insert_after(a1, 2 * e + 1);
      } else {
        b.insert_after(a1, 2 * e);
        b.insert_after(a2, 2 * e + 1);
      }
      b.dir[2 * e] = o1.dir;
      b.dir[2 * e + 1] = o2.dir;
      if (a1 != a2) {
        b.flat[a1] = o1.flat_a;
        b.flat[2 * e] = o1.flat_t;
        b.flat[a2] = o2.flat_a;
        b.flat[2 * e + 1] = o2.flat_t;
      }
      ++used;
    } else {  // subdivide an edge with a straight-through vertex
      const auto e = static_cast<EdgeId>(rng.below(b.ends.size()));
      if (b.len[e] < 2 || !coordinates) continue;
      const long cut = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(b.len[e] - 1)));
      const DartId near = 2 * e, far = 2 * e + 1;
      const VertexId w = b.ends[e][1];
      const VertexId m = b.add_vertex(b.x[b.ends[e][0]] + b.dir[near] * cut);
      vertices.push_back(m);
      const EdgeId e2 = b.add_edge(m, w, b.len[e] - cut);
      b.len[e] = cut;
      // The far end of e moves to m; its old slot at w goes to e2.
      auto& rw = b.rot[w];
      *std::find(rw.begin(), rw.end(), far) = 2 * e2 + 1;
      b.dir[2 * e2 + 1] = b.dir[far];
      b.flat[2 * e2 + 1] = b.flat[far];
      b.ends[e][1] = m;
      b.rot[m] = {far, 2 * e2};
      b.dir[2 * e2] = b.dir[near];
      b.flat[far] = 1;
      b.flat[2 * e2] = 1;
      ++used;
    }
  }
}

}  // namespace generate_detail

/// Deterministic random instance for a seed. Mixed mode alternates between
/// coordinate-first construction (closure-consistent except for an occasional
/// perturbed length) and loose random lengths and flats.
inline Instance random_instance(std::uint64_t seed, const RandomParams& params = {}) {
  using namespace generate_detail;
  Rng rng(seed);
  RandomMode mode = params.mode;
  if (mode == RandomMode::mixed) mode = rng.chance(60) ? RandomMode::closure : RandomMode::loose;
  const std::size_t max_edges = std::max<std::size_t>(1, params.max_angles / 2);

  if (mode == RandomMode::cycle) {
    const std::size_t pairs = std::max<std::size_t>(1, max_edges / 2);
    const std::size_t n = params.edges ? 2 * ((params.edges + 1) / 2) : 2 * (1 + rng.below(pairs));
    for (int tries = 0;; ++tries) {
      std::vector<Length> ls;
      Rational alt = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        ls.emplace_back(static_cast<long>(1 + rng.below(3)));
        alt += i % 2 == 0 ? ls.back() : Length(-ls.back());
      }
      // The last edge has odd index, so it must equal the running sum.
      if (alt > 0 || tries > 50) {
        ls.push_back(alt > 0 ? alt : Length(1));
        return cycle_instance(ls);
      }
    }
  }

  const bool coordinates = mode == RandomMode::closure;
  std::size_t budget = params.edges ? std::min(params.edges, max_edges) : 1 + rng.below(max_edges);
  const bool two_components = params.allow_components && budget >= 3 && rng.chance(20);
  const std::size_t first_budget = two_components ? budget - budget / 3 : budget;

  Builder b;
  grow(b, rng, first_budget, coordinates);
  const std::size_t first_vertices = b.x.size();
  if (two_components) grow(b, rng, budget / 3, coordinates);
  if (params.allow_components && rng.chance(5)) b.add_vertex(0);

  if (coordinates && params.mode == RandomMode::mixed && rng.chance(25)) {
    const auto e = rng.below(b.len.size());
    b.len[e] = std::max(1L, b.len[e] + (rng.chance(50) ? 1 : -1));
  }
  if (!coordinates) {
    std::fill(b.flat.begin(), b.flat.end(), 0);
    for (std::size_t v = 0; v < b.rot.size(); ++v) {
      const auto& r = b.rot[v];
      if (r.size() < 2 || !rng.chance(20)) continue;
      const auto i = rng.below(r.size());
      b.flat[r[i]] = 1;
      if (!rng.chance(10)) b.flat[r[(i + 1 + rng.below(r.size() - 1)) % r.size()]] = 1;
    }
  }

  Instance inst = b.build(std::nullopt);
  const EmbeddedGraph& g = inst.graph;
  std::vector<NestingLink> nesting;
  if (two_components && rng.chance(50)) {
    const ComponentId parent = g.component_of(0);
    const ComponentId child = g.component_of(static_cast<VertexId>(first_vertices));
    const auto& pf = g.component(parent).faces;
    const FaceId face = pf[rng.below(pf.size())];
    const DartId root = g.rotation(static_cast<VertexId>(first_vertices)).front();
    nesting.push_back({child, face, root, g.face(face).darts.front()});
  }
  std::optional<DartId> exterior;
  if (rng.chance(25)) {
    const DartId d = static_cast<DartId>(rng.below(b.len.size() * 2));
    const bool hosts = std::any_of(nesting.begin(), nesting.end(),
                                   [&](const NestingLink& l) { return l.parent_face == g.face_of(d); });
    if (!hosts) exterior = d;
  }
  if (exterior) {
    Instance again = b.build(exterior);
    again.nesting = std::move(nesting);
    return again;
  }
  inst.nesting = std::move(nesting);
  return inst;
}

}  // namespace flatfold
