#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lightplan/errors.hpp"
#include "lightplan/planning.hpp"
#include "test_helpers.hpp"

using namespace lightplan;

namespace {

// All-pairs distinctness oracle.
std::vector<std::uint8_t> pairwise_flags(const std::vector<double>& v, double tau) {
  std::vector<std::uint8_t> out(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (i != j && std::abs(v[i] - v[j]) <= tau) out[i] = 0;
  return out;
}

std::vector<double> all_sums(const std::vector<double>& x) {
  std::vector<double> s(std::size_t{1} << x.size());
  for (std::size_t m = 0; m < s.size(); ++m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (m & (std::size_t{1} << i)) acc += x[i];
    s[m] = acc;
  }
  return s;
}

CoverInstance make_instance(std::size_t universe, const std::vector<std::vector<std::size_t>>& sets) {
  CoverInstance inst;
  inst.universe_size = universe;
  for (std::size_t e = 0; e < universe; ++e) inst.labels.emplace_back(e, 0);
  for (const auto& s : sets) {
    DynamicBitset b(universe);
    for (auto e : s) b.set(e);
    inst.sets.push_back(b);
  }
  return inst;
}

DynamicBitset coverable(const CoverInstance& inst) {
  DynamicBitset all(inst.universe_size);
  for (const auto& s : inst.sets) all |= s;
  return all;
}

// Smallest number of sets covering every coverable element, by enumerating
// all subsets of sets.
std::size_t exhaustive_min_cover(const CoverInstance& inst) {
  const auto target = coverable(inst);
  std::size_t best = inst.sets.size();
  for (std::size_t m = 0; m < (std::size_t{1} << inst.sets.size()); ++m) {
    const auto k = static_cast<std::size_t>(std::popcount(m));
    if (k >= best) continue;
    DynamicBitset u(inst.universe_size);
    for (std::size_t i = 0; i < inst.sets.size(); ++i)
      if (m & (std::size_t{1} << i)) u |= inst.sets[i];
    if (u == target) best = k;
  }
  return best;
}

double harmonic(std::size_t k) {
  double h = 0.0;
  for (std::size_t i = 1; i <= k; ++i) h += 1.0 / static_cast<double>(i);
  return h;
}

CoverInstance random_instance(testing::Rng& rng) {
  const std::size_t universe = testing::uniform_index(rng, 1, 20);
  const std::size_t count = testing::uniform_index(rng, 1, 12);
  std::vector<std::vector<std::size_t>> sets(count);
  for (auto& s : sets)
    for (std::size_t e = 0; e < universe; ++e)
      if (testing::uniform(rng, 0, 1) < 0.25) s.push_back(e);
  return make_instance(universe, sets);
}

}  // namespace

TEST_CASE("distinctness_vector examples") {
  const std::vector<double> v{1, 2, 4};
  const auto d1 = distinctness_vector(v, 1.0);
  CHECK(d1.flags == std::vector<std::uint8_t>{0, 0, 1});
  CHECK(d1.score() == 1);
  CHECK(distinctness_vector(v, 0.5).score() == 3);
  CHECK(distinctness_vector(std::vector<double>{5, 5}, 0.01).score() == 0);
  CHECK(distinctness_vector(std::vector<double>{3}, 100).score() == 1);
  CHECK_THROWS_AS(distinctness_vector(std::vector<double>{}, 0.1), ValidationError);
  CHECK_THROWS_AS(distinctness_vector(v, -1), ValidationError);
}

TEST_CASE("state_distinctness examples") {
  CHECK(state_distinctness(std::vector<double>{1, 2, 4}, 0.01).score() == 8);
  // Sums 0,1,1,2,4,5,5,6: only 0, 2, 4 and 6 are unique.
  const auto d = state_distinctness(std::vector<double>{1, 1, 4}, 0.01);
  CHECK(d.score() == 4);
  CHECK(d.flags == std::vector<std::uint8_t>{1, 0, 0, 1, 1, 0, 0, 1});
  CHECK(state_distinctness(std::vector<double>{0, 0, 4}, 0.01).score() == 0);
}

TEST_CASE("configuration_sums equals index-order enumeration bitwise") {
  testing::Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(testing::uniform_index(rng, 0, 10));
    for (auto& v : x) v = testing::uniform(rng, 0, 500);
    CHECK(configuration_sums(x) == all_sums(x));
  }
}

TEST_CASE("distinctness matches all-pairs oracle") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(testing::uniform_index(rng, 1, 40));
    const bool coarse = trial % 2 == 0;
    for (auto& e : v)
      e = coarse ? std::round(testing::uniform(rng, 0, 20)) * 0.5 : testing::uniform(rng, 0, 10);
    const double tau = coarse ? 0.5 * static_cast<double>(testing::uniform_index(rng, 0, 3)) : testing::uniform(rng, 0, 1);
    CHECK(distinctness_vector(v, tau).flags == pairwise_flags(v, tau));
  }
}

TEST_CASE("distinctness properties") {
  testing::Rng rng(6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> x(testing::uniform_index(rng, 1, 8));
    for (auto& v : x) v = testing::uniform(rng, 0, 50);
    const double tau = testing::uniform(rng, 0, 2);

    // Larger tau never increases the score.
    const auto base = state_distinctness(x, tau).score();
    CHECK(state_distinctness(x, tau + testing::uniform(rng, 0, 2)).score() <= base);

    // Scaling values and tau by a power of two is exact in floating point.
    auto scaled = x;
    for (auto& v : scaled) v *= 4.0;
    CHECK(state_distinctness(scaled, tau * 4.0).score() == base);

    // Reordering luminaires permutes configurations, not the score.
    auto shuffled = x;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm_score = state_distinctness(shuffled, tau).score();
    // Sums are order-dependent in the last ulp, so compare against the oracle.
    std::vector<double> sums_shuffled = all_sums(shuffled);
    const auto oracle = pairwise_flags(sums_shuffled, tau);
    CHECK(perm_score == static_cast<std::size_t>(std::count(oracle.begin(), oracle.end(), 1)));
  }
  // Integer-valued contributions: the permutation has no rounding to hide behind.
  const std::vector<double> a{1, 3, 7, 7, 20}, b{7, 20, 1, 7, 3};
  CHECK(state_distinctness(a, 0.5).score() == state_distinctness(b, 0.5).score());
}

TEST_CASE("aggregate_distinctness of a single luminaire") {
  ContributionMatrix m(1, 1, 1);
  m.at(0, 0)[0] = 10;
  CHECK(aggregate_distinctness(m, 0.01, 0) == 2);
  m.at(0, 0)[0] = 0;
  CHECK(aggregate_distinctness(m, 0.01, 0) == 0);
}

TEST_CASE("apartment distinctness") {
  const auto scene = testing::apartment();
  const auto states = enumerate_door_states(scene);
  REQUIRE(states.size() == 9);
  const auto matrix = sweep(scene, states, scene.candidates);
  const auto table = distinctness_table(matrix, kDefaultTau);
  const auto open = open_door_states(scene, states);
  REQUIRE(open.size() == 1);
  CHECK(states[open[0]].angles_deg == std::vector<double>{90, 90});
  CHECK(*std::max_element(table[open[0]].begin(), table[open[0]].end()) == 64);
  for (std::size_t pt = 0; pt < matrix.points(); pt += 97) {
    const auto agg = aggregate_distinctness(matrix, kDefaultTau, pt);
    CHECK(agg <= 576);
    std::size_t sum = 0;
    for (const auto& row : table) sum += row[pt];
    CHECK(agg == sum);
  }
}

TEST_CASE("greedy_set_cover toy example") {
  // A = {1,2}, B = {2,3}, C = {3}, elements renumbered from zero.
  const auto inst = make_instance(3, {{0, 1}, {1, 2}, {2}});
  const auto sol = greedy_set_cover(inst);
  CHECK(sol.chosen == std::vector<std::size_t>{0, 1});
  CHECK(sol.gains == std::vector<std::size_t>{2, 1});
  CHECK(sol.complete);
}

TEST_CASE("exact_min_cover examples") {
  CHECK(exact_min_cover(make_instance(3, {{0, 1}, {1, 2}, {2}, {0, 2}})).chosen.size() == 2);
  for (std::size_t k = 1; k <= 6; ++k) {
    std::vector<std::vector<std::size_t>> singles;
    for (std::size_t e = 0; e < k; ++e) singles.push_back({e});
    CHECK(exact_min_cover(make_instance(k, singles)).chosen.size() == k);
  }
  const auto partial = exact_min_cover(make_instance(4, {{0, 1}, {1}}));
  CHECK_FALSE(partial.complete);
  CHECK(partial.chosen.size() == 1);
  CHECK(partial.covered.count() == 2);
  CHECK_THROWS_AS(exact_min_cover(make_instance(30, {{0}}), 24), ValidationError);
}

TEST_CASE("greedy stays within the harmonic bound and both covers are sound") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng);
    const auto target = coverable(inst);
    const auto greedy = greedy_set_cover(inst);
    const auto exact = exact_min_cover(inst);
    const auto opt = exhaustive_min_cover(inst);

    CHECK(exact.chosen.size() == opt);
    std::size_t largest = 0;
    for (const auto& s : inst.sets) largest = std::max(largest, s.count());
    CHECK(static_cast<double>(greedy.chosen.size()) <= harmonic(largest) * static_cast<double>(opt) + 1e-12);

    for (const auto* sol : {&greedy, &exact}) {
      DynamicBitset u(inst.universe_size);
      for (auto i : sol->chosen) u |= inst.sets[i];
      CHECK(u == sol->covered);
      CHECK(u == target);
      CHECK(sol->complete == (target.count() == inst.universe_size));
    }
    CHECK(std::accumulate(greedy.gains.begin(), greedy.gains.end(), std::size_t{0}) == target.count());
  }
}

TEST_CASE("cover instance membership follows state distinctness") {
  ContributionMatrix m(2, 2, 2);
  m.at(0, 0)[0] = 1; m.at(0, 0)[1] = 2;   // all four sums distinct
  m.at(0, 1)[0] = 1; m.at(0, 1)[1] = 1;   // sums 0,1,1,2
  m.at(1, 0)[0] = 0; m.at(1, 0)[1] = 5;   // 0,0,5,5
  m.at(1, 1)[0] = 3; m.at(1, 1)[1] = 0;   // 0,3,0,3
  const auto inst = build_cover_instance(m, 0.01);
  CHECK(inst.universe_size == 8);
  CHECK(inst.labels[5] == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(inst.sets[0].indices() == std::vector<std::size_t>{0, 1, 2, 3, 4, 7});
  CHECK(inst.sets[1].none());

  const std::vector<std::size_t> only_second{1};
  const auto sub = build_cover_instance(m, 0.01, only_second);
  CHECK(sub.universe_size == 4);
  CHECK(sub.labels[0] == std::pair<std::size_t, std::size_t>{0, 1});
  CHECK(sub.sets[0].indices() == std::vector<std::size_t>{0, 3});
}

TEST_CASE("heatmap outputs") {
  std::vector<CandidatePoint> cands;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 3; ++c) {
      auto p = testing::omni_point(0.5 + static_cast<double>(c), 0.5 + static_cast<double>(r), 1);
      p.col = c;
      p.row = r;
      cands.push_back(p);
    }
  const std::vector<std::size_t> scores{0, 1, 2, 3, 4, 64};
  CHECK(heatmap_pgm(cands, scores, 64) == "P2\n3 2\n64\n3 4 64\n0 1 2\n");
  CHECK(heatmap_csv(std::span(cands).first(2), std::span(scores).first(2)) == "x,y,score\n0.5,0.5,0\n1.5,0.5,1\n");
  CHECK_THROWS_AS(heatmap_pgm(cands, std::span(scores).first(2), 64), ValidationError);
}

TEST_CASE("cover report lists picks with running coverage") {
  const auto inst = make_instance(3, {{0, 1}, {1, 2}, {2}});
  std::vector<CandidatePoint> cands{testing::omni_point(1, 2, 1), testing::omni_point(3, 4, 1), testing::omni_point(5, 6, 1)};
  const auto report = cover_report(greedy_set_cover(inst), inst, cands);
  CHECK(report.find("step,point_index,x,y,gain,covered\n1,0,1,2,2,2\n2,1,3,4,1,3\n") == 0);
  CHECK(report.find("# sensors=2 covered=3/3 complete=true") != std::string::npos);
}
