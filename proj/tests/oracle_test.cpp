#include <gtest/gtest.h>

#include <map>

#include "test_support.hpp"

using namespace flatfold;
using flatfold::testing::assigned;

namespace {

constexpr std::uint32_t bits(std::initializer_list<int> mountains) {
  std::uint32_t m = 0;
  for (int i : mountains) m |= 1U << i;
  return m;
}

// Every vertex-valid assignment of a plain cycle whose two faces pass the
// crimp test with the given exterior.
std::size_t count_cycle_witnesses(const Instance& inst, FaceId exterior) {
  const EmbeddedGraph& g = inst.graph;
  std::size_t count = 0;
  for (std::uint32_t m = 0; m < (1U << g.angle_count()); ++m) {
    bool ok = true;
    for (VertexId v = 0; v < g.vertex_count() && ok; ++v) {
      int mountains = 0;
      for (AngleId a : g.angles_at_vertex(v)) mountains += (m >> a) & 1U;
      ok = mountains == 1;
    }
    for (FaceId f = 0; f < g.face_count() && ok; ++f) {
      AssignedCycle c;
      for (const auto& e : g.face_cycle(f).entries) {
        c.lengths.push_back(e.length);
        c.mv.push_back((m >> e.angle) & 1U ? Fold::mountain : Fold::valley);
      }
      c.is_exterior = f == exterior;
      ok = crimp_check(c);
    }
    count += ok;
  }
  return count;
}

template <class F>
void for_each_length_vector(std::size_t n, long max_len, F&& f) {
  std::vector<long> ls(n, 1);
  while (true) {
    f(ls);
    std::size_t i = 0;
    while (i < n && ls[i] == max_len) ls[i++] = 1;
    if (i == n) return;
    ++ls[i];
  }
}

}  // namespace

TEST(Crimp, EqualLengthCounts) {
  EXPECT_TRUE(crimp_check(assigned({1, 1, 1, 1}, bits({0}))));
  EXPECT_FALSE(crimp_check(assigned({1, 1, 1, 1}, bits({0, 1}))));
  EXPECT_FALSE(crimp_check(assigned({1, 1, 1, 1}, 0)));
  EXPECT_TRUE(crimp_check(assigned({1, 1, 1, 1}, bits({0, 1, 2}), true)));
  EXPECT_TRUE(crimp_check(assigned({3, 3}, 0)));
  EXPECT_TRUE(crimp_check(assigned({3, 3}, 3, true)));
}

TEST(Crimp, ShortEdgeNeedsOneMountain) {
  // Angles 0 and 1 flank the short edge.
  for (std::uint32_t m = 0; m < 16; ++m) {
    const bool expected = m == bits({0}) || m == bits({1});
    EXPECT_EQ(crimp_check(assigned({2, 1, 2, 3}, m)), expected) << m;
    EXPECT_EQ(crimp_check_fast(assigned({2, 1, 2, 3}, m)), expected) << m;
    EXPECT_EQ(layer_order_check(assigned({2, 1, 2, 3}, m)), expected) << m;
  }
}

TEST(Crimp, OpenCycleIsRejected) {
  EXPECT_FALSE(crimp_check(assigned({3, 1, 1, 1}, bits({0}))));
  EXPECT_FALSE(crimp_check_fast(assigned({1, 1, 1}, bits({0}))));
  EXPECT_FALSE(layer_order_check(assigned({1, 2, 1, 2}, bits({0}))));
}

// The stacking-order search is independent of the crimp recursion.
TEST(Crimp, AgreesWithLayerOrderSearch) {
  std::size_t cases = 0, foldable = 0;
  for (std::size_t n = 2; n <= 6; n += 2)
    for_each_length_vector(n, 3, [&](const std::vector<long>& ls) {
      for (bool ext : {false, true})
        for (std::uint32_t m = 0; m < (1U << n); ++m) {
          const AssignedCycle c = assigned(ls, m, ext);
          const bool a = crimp_check(c);
          ASSERT_EQ(a, layer_order_check(c)) << "n=" << n << " m=" << m << " ext=" << ext;
          ASSERT_EQ(a, crimp_check_fast(c));
          ++cases;
          foldable += a;
        }
    });
  EXPECT_GT(foldable, 100U);
  EXPECT_GT(cases, 10000U);
}

TEST(Crimp, OrderOfReductionDoesNotMatter) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::size_t n = 4 + 2 * (rng() % 4);
    std::vector<long> ls;
    long alt = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      ls.push_back(1 + static_cast<long>(rng() % 3));
      alt += i % 2 == 0 ? ls.back() : -ls.back();
    }
    if (alt <= 0) continue;
    ls.push_back(alt);
    const auto outcomes = crimp_check_all_orders(assigned(ls, static_cast<std::uint32_t>(rng()), rng() % 2));
    ASSERT_FALSE(outcomes.empty());
    for (bool o : outcomes) EXPECT_EQ(o, outcomes.front());
  }
}

TEST(BruteForce, UnitSquareHasFourWitnesses) {
  const Instance inst = cycle_instance(std::vector<long>{1, 1, 1, 1});
  EXPECT_TRUE(brute_force_decide(inst).sat);
  EXPECT_EQ(count_cycle_witnesses(inst, 0), 4U);
  EXPECT_EQ(count_cycle_witnesses(inst, 1), 4U);
}

TEST(BruteForce, SmallExamples) {
  const Verdict bad = brute_force_decide(cycle_instance(std::vector<long>{1, 2, 1, 2}));
  EXPECT_FALSE(bad.sat);
  const Instance parallel = flatfold::testing::load_sample("parallel_edges.json");
  const Verdict ok = brute_force_decide(parallel);
  ASSERT_TRUE(ok.sat);
  EXPECT_FALSE(verify_witness(parallel, ok.witness, ok.exteriors));
  EXPECT_FALSE(brute_force_decide(flatfold::testing::load_sample("flow_shortfall.json"), 30).sat);
  EXPECT_FALSE(brute_force_decide(flatfold::testing::load_sample("nested_larger.json")).sat);
  EXPECT_TRUE(brute_force_decide(flatfold::testing::load_sample("nested_equal.json")).sat);
}

TEST(BruteForce, RefusesLargeInputs) {
  EXPECT_THROW(brute_force_decide(grid_instance(4)), TooLarge);
}

TEST(VerifyWitness, CatchesTampering) {
  const Instance inst = cycle_instance(std::vector<long>{1, 1, 1, 1});
  const Verdict v = decide(inst);
  ASSERT_TRUE(v.sat);
  EXPECT_FALSE(verify_witness(inst, v.witness, v.exteriors));
  auto bad = v.witness;
  for (auto& f : bad) f = f == Fold::mountain ? Fold::valley : Fold::mountain;
  EXPECT_TRUE(verify_witness(inst, bad, v.exteriors));
  bad = v.witness;
  bad[0] = Fold::flat;
  EXPECT_TRUE(verify_witness(inst, bad, v.exteriors));
  EXPECT_TRUE(verify_witness(inst, std::vector<Fold>(3, Fold::valley), v.exteriors));
  // Swapping the exterior flips the per-face counts.
  const FaceId other = v.exteriors[0] == 0 ? 1 : 0;
  EXPECT_TRUE(verify_witness(inst, v.witness, std::vector<FaceId>{other}));
}

TEST(Generator, Deterministic) {
  for (std::uint64_t seed : {0ULL, 1ULL, 77ULL, 123456789ULL})
    EXPECT_EQ(to_json(random_instance(seed)).dump(), to_json(random_instance(seed)).dump());
  EXPECT_NE(to_json(random_instance(1)).dump(), to_json(random_instance(2)).dump());
}

TEST(Generator, ClosureModeAlwaysCloses) {
  RandomParams p;
  p.mode = RandomMode::closure;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const Instance inst = random_instance(seed, p);
    EXPECT_LE(inst.graph.angle_count(), p.max_angles);
    EXPECT_TRUE(std::holds_alternative<CoordinateMap>(assign_coordinates(inst.graph, inst.flat))) << seed;
  }
}

TEST(Generator, CycleModeHasZeroAlternatingSum) {
  RandomParams p;
  p.mode = RandomMode::cycle;
  p.edges = 8;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = random_instance(seed, p);
    ASSERT_EQ(inst.graph.edge_count(), 8U);
    ASSERT_EQ(inst.graph.face_count(), 2U);
    EXPECT_TRUE(face_closure_check(inst.graph.face_cycle(0)).ok);
  }
}

TEST(Generator, MixedModeCoversEveryOutcome) {
  std::map<std::string, std::size_t> seen;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    const Verdict v = decide(random_instance(seed));
    seen[v.sat ? "sat" : to_string(v.reason->kind)]++;
  }
  EXPECT_GT(seen["sat"], 0U);
  EXPECT_GT(seen["closure violation"], 0U);
  EXPECT_GT(seen["flat-angle count violation"], 0U);
  EXPECT_GT(seen["flow shortfall"], 0U);
  EXPECT_GT(seen["diameter nesting violation"], 0U);
}
