#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "ihho/core.hpp"

namespace ihho {

struct HhoParams {
  std::size_t population = 10;
  std::size_t iterations = 30;
  std::vector<double> lb;
  std::vector<double> ub;
  double beta = 1.5;
  /// Hard besiege as X_rabbit - |dX| (no energy factor).
  bool literal_hard_besiege = false;
  /// Levy step from U(0,1) draws as 0.01 * u * sigma / |v|^beta.
  bool literal_levy = false;
  /// Stop after this many iterations without improvement; 0 disables.
  std::size_t patience = 0;
  /// Workers for the per-iteration population evaluation.
  std::size_t threads = 1;
};

struct HhoEvaluation {
  std::size_t iteration = 0;
  std::vector<double> position;
  double fitness = 0.0;
};

struct HhoTrace {
  /// Best-so-far fitness and position at the end of each iteration.
  std::vector<double> best_fitness;
  std::vector<std::vector<double>> best_position;
  /// Escape energy drawn for each hawk, per iteration.
  std::vector<std::vector<double>> energies;
  /// Every fitness call in call order.
  std::vector<HhoEvaluation> evaluations;
  std::vector<double> best;
  double best_value = -std::numeric_limits<double>::infinity();
};

/// E = 2 * e0 * (1 - t / T).
inline double escape_energy(double e0, std::size_t t, std::size_t max_iter) {
  return 2.0 * e0 * (1.0 - static_cast<double>(t) / static_cast<double>(max_iter));
}

/// Mantegna scale for a Levy-stable step with index beta.
inline double levy_sigma(double beta) {
  const double num = std::tgamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0);
  const double den = std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0);
  return std::pow(num / den, 1.0 / beta);
}

/// Levy-flight step per component: 0.01 * u / |v|^(1/beta) with
/// u ~ N(0, sigma^2) and v ~ N(0, 1). `literal` switches to u, v ~ U(0,1) and
/// the step 0.01 * u * sigma / |v|^beta.
inline std::vector<double> levy_step(std::size_t dim, double beta, RngStream& rng, bool literal = false) {
  require(dim >= 1, "Levy step needs dimension >= 1");
  require(beta > 0.0, "beta must be positive");
  const double sigma = levy_sigma(beta);
  std::vector<double> step(dim);
  for (auto& s : step) {
    double u, v;
    do {
      u = literal ? rng.uniform() : rng.normal() * sigma;
      v = literal ? rng.uniform() : rng.normal();
    } while (std::abs(v) < 1e-12);
    s = literal ? 0.01 * u * sigma / std::pow(std::abs(v), beta) : 0.01 * u / std::pow(std::abs(v), 1.0 / beta);
  }
  return step;
}

/// Harris Hawks Optimization, maximizing `fitness` over the box [lb, ub].
///
/// Each iteration evaluates every hawk, moves the rabbit to any strictly
/// better position, then updates each hawk from its own stream
/// rng.child(t, i): exploration when |E| >= 1, otherwise soft or hard besiege
/// (r >= 0.5) or the matching progressive-dive variant (r < 0.5), where the
/// dive candidates Y then Z replace the hawk only if they beat its current
/// fitness. Positions are clipped to the box after every move. Candidate
/// evaluations also update the rabbit, so the reported best is the maximum
/// over every call.
template <class Fitness>
  requires std::invocable<const Fitness&, std::span<const double>>
HhoTrace hho_optimize(const Fitness& fitness, const HhoParams& params, const RngStream& rng) {
  const std::size_t n = params.population;
  const std::size_t dim = params.lb.size();
  require(n >= 2, "HHO needs at least two hawks");
  require(params.iterations >= 1, "HHO needs at least one iteration");
  require(dim >= 1 && params.ub.size() == dim, "bounds must be non-empty and equally sized");
  for (std::size_t d = 0; d < dim; ++d) require(params.lb[d] < params.ub[d], "lb must be below ub");
  require(params.beta > 0.0, "beta must be positive");

  const auto& lb = params.lb;
  const auto& ub = params.ub;
  auto clip = [&](std::vector<double>& x) {
    for (std::size_t d = 0; d < dim; ++d) x[d] = std::clamp(x[d], lb[d], ub[d]);
  };

  std::vector<std::vector<double>> hawks(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r = rng.child(~std::uint64_t{0}, i);
    for (std::size_t d = 0; d < dim; ++d) hawks[i][d] = r.uniform(lb[d], ub[d]);
  }

  HhoTrace trace;
  std::vector<double> rabbit = hawks[0];
  double rabbit_fit = -std::numeric_limits<double>::infinity();
  auto record = [&](std::size_t t, const std::vector<double>& x, double f) {
    trace.evaluations.push_back({t, x, f});
    if (f > rabbit_fit) {
      rabbit_fit = f;
      rabbit = x;
    }
  };
  auto population_mean = [&] {
    std::vector<double> m(dim, 0.0);
    for (const auto& h : hawks) {
      for (std::size_t d = 0; d < dim; ++d) m[d] += h[d];
    }
    for (auto& v : m) v /= static_cast<double>(n);
    return m;
  };

  std::vector<double> fit(n);
  std::size_t stale = 0;
  for (std::size_t t = 0; t < params.iterations; ++t) {
    const double before = rabbit_fit;
    parallel_for(n, params.threads, [&](std::size_t i) { fit[i] = fitness(std::span<const double>(hawks[i])); });
    for (std::size_t i = 0; i < n; ++i) record(t, hawks[i], fit[i]);

    auto& energies = trace.energies.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) {
      RngStream r = rng.child(t, i);
      auto& x = hawks[i];
      const double e = escape_energy(r.uniform(-1.0, 1.0), t, params.iterations);
      const double jump = 2.0 * (1.0 - r.uniform());
      energies[i] = e;

      if (std::abs(e) >= 1.0) {
        if (r.uniform() >= 0.5) {
          // perch relative to a random family member
          const auto other = hawks[r.below(n)];
          const double r1 = r.uniform(), r2 = r.uniform();
          for (std::size_t d = 0; d < dim; ++d) x[d] = other[d] - r1 * std::abs(other[d] - 2.0 * r2 * x[d]);
        } else {
          // perch inside the home range, offset from the rabbit by the mean
          const auto mean = population_mean();
          const double r3 = r.uniform(), r4 = r.uniform();
          for (std::size_t d = 0; d < dim; ++d) {
            x[d] = (rabbit[d] - mean[d]) - r3 * (lb[d] + r4 * (ub[d] - lb[d]));
          }
        }
      } else if (r.uniform() >= 0.5) {
        if (std::abs(e) >= 0.5) {
          for (std::size_t d = 0; d < dim; ++d) {
            x[d] = (rabbit[d] - x[d]) - e * std::abs(jump * rabbit[d] - x[d]);
          }
        } else {
          const double scale = params.literal_hard_besiege ? 1.0 : e;
          for (std::size_t d = 0; d < dim; ++d) x[d] = rabbit[d] - scale * std::abs(rabbit[d] - x[d]);
        }
      } else {
        // soft dives aim from the hawk itself, hard dives from the population mean
        const auto anchor = std::abs(e) >= 0.5 ? x : population_mean();
        std::vector<double> y(dim);
        for (std::size_t d = 0; d < dim; ++d) y[d] = rabbit[d] - e * std::abs(jump * rabbit[d] - anchor[d]);
        clip(y);
        const double fy = fitness(std::span<const double>(y));
        record(t, y, fy);
        if (fy > fit[i]) {
          x = y;
        } else {
          const auto lf = levy_step(dim, params.beta, r, params.literal_levy);
          std::vector<double> z(dim);
          for (std::size_t d = 0; d < dim; ++d) z[d] = y[d] + r.uniform() * lf[d];
          clip(z);
          const double fz = fitness(std::span<const double>(z));
          record(t, z, fz);
          if (fz > fit[i]) x = z;
        }
      }
      clip(x);
    }

    trace.best_fitness.push_back(rabbit_fit);
    trace.best_position.push_back(rabbit);
    stale = rabbit_fit > before ? 0 : stale + 1;
    if (params.patience > 0 && stale >= params.patience) break;
  }
  trace.best = rabbit;
  trace.best_value = rabbit_fit;
  return trace;
}

}  // namespace ihho
