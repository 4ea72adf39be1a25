#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ihho;

namespace {

HhoParams box(std::size_t n, std::size_t t, std::vector<double> lb, std::vector<double> ub) {
  HhoParams p;
  p.population = n;
  p.iterations = t;
  p.lb = std::move(lb);
  p.ub = std::move(ub);
  return p;
}

}  // namespace

TEST(EscapeEnergy, Examples) {
  EXPECT_DOUBLE_EQ(escape_energy(0.5, 0, 10), 1.0);
  EXPECT_DOUBLE_EQ(escape_energy(-0.8, 5, 10), -0.8);
  EXPECT_NEAR(std::abs(escape_energy(0.3, 99, 100)), 2 * 0.3 / 100, 1e-15);
}

TEST(Levy, SigmaAgainstIndependentGamma) {
  EXPECT_NEAR(oracle::gamma(5.0), 24.0, 1e-10);
  EXPECT_NEAR(oracle::gamma(0.5), std::sqrt(std::numbers::pi), 1e-12);
  const double expected = oracle::levy_sigma(1.5);
  EXPECT_NEAR(expected, 0.69657, 1e-4);
  EXPECT_NEAR(levy_sigma(1.5), expected, 1e-12);
}

TEST(Levy, LengthAndCenteredMean) {
  RngStream g(1, 1);
  EXPECT_EQ(levy_step(7, 1.5, g).size(), 7u);
  const auto xs = levy_step(100000, 1.5, g);
  double sum = 0, sq = 0;
  for (double x : xs) sum += x;
  const double mean = sum / xs.size();
  for (double x : xs) sq += (x - mean) * (x - mean);
  const double se = std::sqrt(sq / (xs.size() - 1) / xs.size());
  EXPECT_LE(std::abs(mean), 3 * se);
}

TEST(Levy, LiteralModeIsNonnegative) {
  RngStream g(2, 2);
  for (double x : levy_step(1000, 1.5, g, true)) EXPECT_GE(x, 0.0);
}

TEST(Hho, FindsOneDimensionalOptimum) {
  const auto f = [](std::span<const double> x) { return -(x[0] - 0.37) * (x[0] - 0.37); };
  // grid oracle: the optimum of f on [0,1] sits at 0.37
  double grid_best = 0, grid_val = -1e9;
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 10000.0, v = f(std::vector<double>{x});
    if (v > grid_val) grid_val = v, grid_best = x;
  }
  ASSERT_NEAR(grid_best, 0.37, 1e-4);
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto tr = hho_optimize(f, box(20, 100, {0}, {1}), RngStream(seed, stream::kHho));
    hits += std::abs(tr.best[0] - grid_best) <= 0.02 ? 1 : 0;
  }
  EXPECT_GE(hits, 95);
}

TEST(Hho, FindsSphereOrigin) {
  const auto f = [](std::span<const double> x) { return -(x[0] * x[0] + x[1] * x[1]); };
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto tr = hho_optimize(f, box(30, 200, {-5, -5}, {5, 5}), RngStream(seed, stream::kHho));
    hits += std::hypot(tr.best[0], tr.best[1]) <= 0.1 ? 1 : 0;
  }
  EXPECT_GE(hits, 90);
}

TEST(Hho, ConstantFitness) {
  const auto tr = hho_optimize([](std::span<const double>) { return 0.25; }, box(5, 10, {0}, {1}), RngStream(1, 1));
  EXPECT_EQ(tr.best_value, 0.25);
  for (double v : tr.best_fitness) EXPECT_EQ(v, 0.25);
}

TEST(Hho, InvariantsOnRuggedFunction) {
  std::atomic<std::size_t> calls{0};
  const auto f = [&](std::span<const double> x) {
    ++calls;
    return std::sin(7 * x[0]) * std::cos(3 * x[1]) - 0.1 * x[0] * x[1];
  };
  const auto p = box(12, 40, {-2, 0}, {3, 1});
  const auto tr = hho_optimize(f, p, RngStream(5, stream::kHho));
  ASSERT_EQ(tr.best_fitness.size(), 40u);
  for (std::size_t t = 1; t < tr.best_fitness.size(); ++t) EXPECT_GE(tr.best_fitness[t], tr.best_fitness[t - 1]);
  double max_seen = -1e300;
  for (const auto& e : tr.evaluations) {
    max_seen = std::max(max_seen, e.fitness);
    for (std::size_t d = 0; d < 2; ++d) {
      EXPECT_GE(e.position[d], p.lb[d]);
      EXPECT_LE(e.position[d], p.ub[d]);
    }
  }
  EXPECT_EQ(tr.best_value, max_seen);
  EXPECT_EQ(calls.load(), tr.evaluations.size());
  EXPECT_GE(calls.load(), 12u * 40u);
  EXPECT_LE(calls.load(), 3u * 12u * 40u);
  for (const auto& row : tr.energies) {
    for (double e : row) EXPECT_LE(std::abs(e), 2.0);
  }
}

TEST(Hho, DeterministicAndThreadIndependent) {
  const auto f = [](std::span<const double> x) { return -std::abs(x[0] - 0.2) - std::abs(x[1] + 0.4); };
  auto p = box(10, 30, {-1, -1}, {1, 1});
  const auto a = hho_optimize(f, p, RngStream(3, 3));
  const auto b = hho_optimize(f, p, RngStream(3, 3));
  p.threads = 4;
  const auto c = hho_optimize(f, p, RngStream(3, 3));
  EXPECT_EQ(a.best_fitness, b.best_fitness);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.best_fitness, c.best_fitness);
  EXPECT_EQ(a.best, c.best);
  ASSERT_EQ(a.evaluations.size(), c.evaluations.size());
  for (std::size_t i = 0; i < a.evaluations.size(); ++i) EXPECT_EQ(a.evaluations[i].position, c.evaluations[i].position);
}

TEST(Hho, PatienceStopsEarly) {
  auto p = box(5, 50, {0}, {1});
  p.patience = 3;
  const auto tr = hho_optimize([](std::span<const double>) { return 1.0; }, p, RngStream(1, 1));
  EXPECT_EQ(tr.best_fitness.size(), 4u);
}

TEST(Hho, LiteralFlagsStillRespectBounds) {
  auto p = box(8, 25, {0.05}, {1.0});
  p.literal_hard_besiege = true;
  p.literal_levy = true;
  const auto tr = hho_optimize([](std::span<const double> x) { return -std::abs(x[0] - 0.6); }, p, RngStream(2, 2));
  for (const auto& e : tr.evaluations) {
    EXPECT_GE(e.position[0], 0.05);
    EXPECT_LE(e.position[0], 1.0);
  }
}

TEST(Hho, RejectsBadParams) {
  const auto f = [](std::span<const double>) { return 0.0; };
  EXPECT_THROW(hho_optimize(f, box(1, 5, {0}, {1}), RngStream(1, 1)), Error);
  EXPECT_THROW(hho_optimize(f, box(5, 5, {1}, {0}), RngStream(1, 1)), Error);
  EXPECT_THROW(hho_optimize(f, box(5, 0, {0}, {1}), RngStream(1, 1)), Error);
}
