#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "skillmon/metrics.hpp"

using namespace skillmon;

namespace {

AtomicMetric make_atomic(const std::string& id, MetricKind kind,
                         double threshold, const std::string& unit) {
  AtomicMetric m;
  m.id = id;
  m.spec.kind = kind;
  m.spec.threshold = threshold;
  m.spec.unit = unit;
  return m;
}

}  // namespace

TEST_CASE("steady-state offset normalization against the 0.28 m bound") {
  const AtomicMetric m =
      make_atomic("sso", MetricKind::SteadyStateOffset, 0.28, "m");
  CHECK(evaluate_atomic(m, {0.14, "m"}).value() ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(evaluate_atomic(m, {0.0, "m"}).value() == 1.0);
  CHECK(evaluate_atomic(m, {0.30, "m"}).value() == 0.0);
  CHECK(evaluate_atomic(m, {0.28, "m"}).value() == 0.0);
}

TEST_CASE("min-distance band endpoints") {
  AtomicMetric m = make_atomic("dist", MetricKind::MinDistance, 0.28, "m");
  m.spec.band = 0.28;
  CHECK(evaluate_atomic(m, {0.56, "m"}).value() == 1.0);
  CHECK(evaluate_atomic(m, {0.28, "m"}).value() == 0.0);
  CHECK(evaluate_atomic(m, {0.42, "m"}).value() ==
        doctest::Approx(0.5).epsilon(1e-12));
  // default band equals the minimum itself
  AtomicMetric no_band = make_atomic("d2", MetricKind::MinDistance, 0.28, "m");
  CHECK(evaluate_atomic(no_band, {0.56, "m"}).value() == 1.0);
}

TEST_CASE("range, variance, and validity normalization") {
  AtomicMetric range = make_atomic("r", MetricKind::Range, 0.0, "x");
  range.spec.lower = 0.0;
  range.spec.upper = 1.0;
  range.spec.band = 0.5;
  CHECK(evaluate_atomic(range, {0.5, "x"}).value() == 1.0);
  CHECK(evaluate_atomic(range, {0.0, "x"}).value() == 1.0);
  CHECK(evaluate_atomic(range, {1.25, "x"}).value() ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(evaluate_atomic(range, {-0.75, "x"}).value() == 0.0);

  const AtomicMetric var =
      make_atomic("v", MetricKind::VarianceBound, 0.01, "m2");
  CHECK(evaluate_atomic(var, {0.0, "m2"}).value() == 1.0);
  CHECK(evaluate_atomic(var, {0.005, "m2"}).value() ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(evaluate_atomic(var, {0.02, "m2"}).value() == 0.0);
  try {
    evaluate_atomic(var, {-0.001, "m2"});
    FAIL("expected NegativeVariance");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NegativeVariance);
  }

  const AtomicMetric valid =
      make_atomic("ok", MetricKind::ValidityFlag, 0.0, "bool");
  CHECK(evaluate_atomic(valid, {1.0, "bool"}).value() == 1.0);
  CHECK(evaluate_atomic(valid, {0.0, "bool"}).value() == 0.0);
}

TEST_CASE("unit mismatches are rejected") {
  const AtomicMetric m = make_atomic("sso", MetricKind::SteadyStateOffset,
                                     0.28, "m");
  try {
    evaluate_atomic(m, {0.1, "cm"});
    FAIL("expected UnitMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnitMismatch);
  }
}

TEST_CASE("atomic evaluation is monotone and bounded") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const AtomicMetric limit = make_atomic("l", MetricKind::MaxLimit, 0.7, "u");
  AtomicMetric min_dist = make_atomic("d", MetricKind::MinDistance, 0.4, "u");
  for (int i = 0; i < 2000; ++i) {
    const double a = dist(rng) * 2.0 - 1.0;
    const double b = dist(rng) * 2.0 - 1.0;
    const double la = evaluate_atomic(limit, {a, "u"}).value();
    const double lb = evaluate_atomic(limit, {b, "u"}).value();
    CHECK(la >= 0.0);
    CHECK(la <= 1.0);
    if (std::abs(a) <= std::abs(b)) {
      CHECK(la >= lb);  // non-increasing in |m|
    }
    const double da = evaluate_atomic(min_dist, {a, "u"}).value();
    const double db = evaluate_atomic(min_dist, {b, "u"}).value();
    if (a <= b) {
      CHECK(da <= db);  // non-decreasing in m
    }
  }
}

TEST_CASE("compose normalizes weights and records history") {
  MetricRegistry reg;
  reg.add_atomic(make_atomic("a", MetricKind::MaxLimit, 1.0, "u"));
  reg.add_atomic(make_atomic("b", MetricKind::MaxLimit, 1.0, "u"));
  const ComposedMetric& c =
      reg.compose("ab", {"a", "b"}, {1.0, 1.0}, CompositionRule::WeightedMean);
  CHECK(c.weights == std::vector<double>{0.5, 0.5});
  CHECK(c.history == std::set<std::string>{"a", "b"});

  try {
    reg.compose("bad", {"ab", "a"}, {1.0, 1.0}, CompositionRule::WeightedMean);
    FAIL("expected CorrelatedComposition");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::CorrelatedComposition);
  }
  try {
    reg.compose("empty", {}, {}, CompositionRule::Min);
    FAIL("expected EmptyChildren");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyChildren);
  }
  try {
    reg.compose("w", {"a"}, {0.0}, CompositionRule::Min);
    FAIL("expected NonPositiveWeight");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonPositiveWeight);
  }
}

TEST_CASE("allow_shared permits explicit diamonds with set-semantics history") {
  MetricRegistry reg;
  reg.add_atomic(make_atomic("a", MetricKind::MaxLimit, 1.0, "u"));
  reg.add_atomic(make_atomic("b", MetricKind::MaxLimit, 1.0, "u"));
  reg.add_atomic(make_atomic("c", MetricKind::MaxLimit, 1.0, "u"));
  reg.compose("ab", {"a", "b"}, {1.0, 1.0}, CompositionRule::WeightedMean);
  reg.compose("ac", {"a", "c"}, {1.0, 1.0}, CompositionRule::WeightedMean);

  const ComposedMetric& diamond = reg.compose(
      "diamond", {"ab", "ac"}, {1.0, 1.0}, CompositionRule::WeightedMean, {"a"});
  CHECK(diamond.history == std::set<std::string>{"a", "b", "c"});
  CHECK(reg.history_of("diamond").size() == 3);
}

TEST_CASE("composed bias is pessimistic only when every child is") {
  MetricRegistry reg;
  AtomicMetric p1 = make_atomic("p1", MetricKind::MaxLimit, 1.0, "u");
  p1.bias = EstimationBias::Pessimistic;
  AtomicMetric p2 = make_atomic("p2", MetricKind::MaxLimit, 1.0, "u");
  p2.bias = EstimationBias::Pessimistic;
  AtomicMetric opt = make_atomic("opt", MetricKind::MaxLimit, 1.0, "u");
  opt.bias = EstimationBias::Optimistic;
  reg.add_atomic(p1);
  reg.add_atomic(p2);
  reg.add_atomic(opt);
  CHECK(reg.compose("pp", {"p1", "p2"}, {1, 1}, CompositionRule::Min).bias ==
        EstimationBias::Pessimistic);
  CHECK(reg.compose("po", {"p1", "opt"}, {1, 1}, CompositionRule::Min).bias ==
        EstimationBias::Unknown);
}

TEST_CASE("evaluate_composed arithmetic") {
  MetricRegistry reg;
  reg.add_atomic(make_atomic("a", MetricKind::MaxLimit, 1.0, "u"));
  reg.add_atomic(make_atomic("b", MetricKind::MaxLimit, 1.0, "u"));
  reg.add_atomic(make_atomic("c", MetricKind::MaxLimit, 1.0, "u"));
  const ComposedMetric& mean =
      reg.compose("mean", {"a", "b"}, {0.5, 0.5}, CompositionRule::WeightedMean);
  const ComposedMetric& minimum =
      reg.compose("min", {"a", "b", "c"}, {1, 1, 1}, CompositionRule::Min);

  std::map<std::string, PerformanceLevel> levels{
      {"a", PerformanceLevel{1.0}},
      {"b", PerformanceLevel{0.6}},
      {"c", PerformanceLevel{0.8}},
  };
  CHECK(evaluate_composed(mean, levels).value() ==
        doctest::Approx(0.8).epsilon(1e-12));
  CHECK(evaluate_composed(minimum, levels).value() == 0.6);

  levels.erase("b");
  try {
    evaluate_composed(mean, levels);
    FAIL("expected MissingChildLevel");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MissingChildLevel);
  }
}

TEST_CASE("history of nested compositions") {
  MetricRegistry reg;
  reg.add_atomic(make_atomic("a", MetricKind::MaxLimit, 1.0, "u"));
  reg.add_atomic(make_atomic("b", MetricKind::MaxLimit, 1.0, "u"));
  reg.add_atomic(make_atomic("c", MetricKind::MaxLimit, 1.0, "u"));
  CHECK(history(reg.atomic("a")) == std::set<std::string>{"a"});
  reg.compose("ab", {"a", "b"}, {1, 1}, CompositionRule::WeightedMean);
  reg.compose("abc", {"ab", "c"}, {1, 1}, CompositionRule::WeightedMean);
  CHECK(history(reg.composed("abc")) == std::set<std::string>{"a", "b", "c"});
}

namespace {

// Random metric trees: returns the registry plus the brute-force leaf sets of
// every registered metric, built by structural traversal in test code.
struct RandomTrees {
  MetricRegistry registry;
  std::map<std::string, std::set<std::string>> leaves;
  std::vector<std::string> ids;
};

RandomTrees build_random_trees(std::mt19937& rng, int node_budget) {
  RandomTrees out;
  std::map<std::string, std::vector<std::string>> child_map;
  int atoms = 0, composites = 0;
  for (int i = 0; i < node_budget; ++i) {
    const bool make_leaf = out.ids.size() < 2 || rng() % 2 == 0;
    if (make_leaf) {
      std::string id = "atom" + std::to_string(atoms++);
      out.registry.add_atomic(make_atomic(id, MetricKind::MaxLimit, 1.0, "u"));
      out.ids.push_back(id);
    } else {
      // pick children with pairwise disjoint leaf sets
      std::vector<std::string> children;
      std::set<std::string> used;
      std::vector<std::string> shuffled = out.ids;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      for (const auto& candidate : shuffled) {
        const auto& cl = out.registry.history_of(candidate);
        bool disjoint = true;
        for (const auto& atom : cl) {
          if (used.contains(atom)) disjoint = false;
        }
        if (disjoint) {
          children.push_back(candidate);
          used.insert(cl.begin(), cl.end());
          if (children.size() == 3) break;
        }
      }
      if (children.size() < 2) continue;
      std::string id = "comp" + std::to_string(composites++);
      std::vector<double> weights(children.size(), 1.0);
      out.registry.compose(id, children, weights, CompositionRule::WeightedMean);
      child_map[id] = children;
      out.ids.push_back(id);
    }
  }
  // brute-force leaf sets by recursive traversal over child_map
  std::function<std::set<std::string>(const std::string&)> walk =
      [&](const std::string& id) -> std::set<std::string> {
    auto it = child_map.find(id);
    if (it == child_map.end()) return {id};
    std::set<std::string> acc;
    for (const auto& child : it->second) {
      for (const auto& leaf : walk(child)) acc.insert(leaf);
    }
    return acc;
  };
  for (const auto& id : out.ids) out.leaves[id] = walk(id);
  return out;
}

}  // namespace

TEST_CASE("history equals brute-force leaf traversal on random trees") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    RandomTrees trees = build_random_trees(rng, 15);
    for (const auto& id : trees.ids) {
      CHECK(trees.registry.history_of(id) == trees.leaves.at(id));
    }
  }
}

TEST_CASE("trees built without allow_shared have all-distinct leaves") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    RandomTrees trees = build_random_trees(rng, 15);
    for (const auto& id : trees.ids) {
      if (trees.registry.is_atomic(id)) continue;
      const ComposedMetric& m = trees.registry.composed(id);
      // sum of child leaf counts equals the union size: no overlap anywhere
      std::size_t total = 0;
      for (const auto& child : m.children) {
        total += trees.registry.history_of(child).size();
      }
      CHECK(total == m.history.size());
    }
  }
}

TEST_CASE("weighted mean lies between min and max; min matches brute force") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    MetricRegistry reg;
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<std::string> ids;
    std::vector<double> weights;
    std::map<std::string, PerformanceLevel> levels;
    double lo = 1.0, hi = 0.0, true_min = 1.0;
    for (int i = 0; i < n; ++i) {
      std::string id = "a" + std::to_string(i);
      reg.add_atomic(make_atomic(id, MetricKind::MaxLimit, 1.0, "u"));
      ids.push_back(id);
      weights.push_back(0.1 + dist(rng));
      const double level = dist(rng);
      levels.emplace(id, PerformanceLevel{level});
      lo = std::min(lo, level);
      hi = std::max(hi, level);
      true_min = std::min(true_min, level);
    }
    const ComposedMetric& mean =
        reg.compose("mean", ids, weights, CompositionRule::WeightedMean);
    const double wm = evaluate_composed(mean, levels).value();
    CHECK(wm >= lo - 1e-12);
    CHECK(wm <= hi + 1e-12);

    MetricRegistry reg2;
    for (const auto& id : ids) {
      reg2.add_atomic(make_atomic(id, MetricKind::MaxLimit, 1.0, "u"));
    }
    const ComposedMetric& minimum =
        reg2.compose("min", ids, weights, CompositionRule::Min);
    CHECK(evaluate_composed(minimum, levels).value() == true_min);
  }
}

TEST_CASE("performance level constructor enforces its bounds") {
  CHECK_THROWS_AS(PerformanceLevel{1.5}, Error);
  CHECK_THROWS_AS(PerformanceLevel{-0.1}, Error);
  CHECK(PerformanceLevel::clamped(1.5).value() == 1.0);
  CHECK(PerformanceLevel::clamped(-2.0).value() == 0.0);
}
