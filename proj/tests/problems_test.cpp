#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "o2nc/problems.hpp"

namespace o2nc {
namespace {

std::vector<ProblemSpec> shipped_problems() {
  return {
      make_huber_valley({1.0, 2.0, 0.5}, {0.3, 0.0, 1.0}, {1.0, -2.0, 0.05}),
      make_huber_valley({1.0}, {0.0}, {3.0}, 1.0),
      make_bounded_wave({1.0, 3.0}, {0.5, 0.5}, {1.0, -0.3}),
      make_hetero_mix(6, 100.0, 0.1, ParamVector::filled(6, 0.7)),
  };
}

ParamVector random_point(RandomStream& rng, std::size_t dim, double spread) {
  std::vector<double> v(dim);
  for (auto& x : v) x = spread * (2.0 * rng.next_uniform() - 1.0);
  return ParamVector(std::move(v));
}

TEST(Problems, Names) {
  EXPECT_EQ(parse_problem_kind("HETERO_MIX"), ProblemKind::kHeteroMix);
  EXPECT_EQ(to_string(ProblemKind::kHuberValley), "HUBER_VALLEY");
  EXPECT_THROW(parse_problem_kind("ROSENBROCK"), std::invalid_argument);
  EXPECT_THROW(make_problem("ROSENBROCK", {}), std::invalid_argument);
}

TEST(Problems, HuberExamples) {
  const auto origin = make_huber_valley(ParamVector::filled(3, 1.0),
                                        ParamVector::zeros(3),
                                        ParamVector::zeros(3), 1.0);
  EXPECT_EQ(eval_f(origin, ParamVector::zeros(3)), 0.0);
  EXPECT_TRUE(exact_grad(origin, ParamVector::zeros(3)).is_zero());

  const auto one = make_huber_valley({1.0}, {0.0}, {3.0}, 1.0);
  EXPECT_EQ(eval_f(one, {3.0}), 2.5);
  EXPECT_EQ(exact_grad(one, {3.0})[0], 1.0);
  EXPECT_EQ(exact_grad(one, {-3.0})[0], -1.0);
  EXPECT_EQ(eval_f(one, {0.5}), 0.125);
  EXPECT_EQ(one.delta_bound, 2.5);
}

TEST(Problems, WaveFollowsFormula) {
  // The stated formula gives F(0) = 0 with the origin a stationary minimum.
  const auto w = make_bounded_wave({1.0}, {0.0}, {0.0});
  EXPECT_EQ(eval_f(w, {0.0}), 0.0);
  EXPECT_EQ(exact_grad(w, {0.0})[0], 0.0);
  EXPECT_NEAR(eval_f(w, {1.0}), 0.5 / kWaveSlopeMax, 1e-15);
  // Slope peaks at 1/sqrt(3) with value exactly G.
  EXPECT_NEAR(exact_grad(w, {1.0 / std::sqrt(3.0)})[0], 1.0, 1e-15);
  EXPECT_NEAR(kWaveSlopeMax, 3.0 * std::sqrt(3.0) / 8.0, 1e-16);
}

TEST(Problems, HeteroMixConstants) {
  const auto p = make_hetero_mix(4, 50.0, 0.2, ParamVector::filled(4, 1.0));
  EXPECT_EQ(p.kind, ProblemKind::kHeteroMix);
  EXPECT_EQ(p.lipschitz, ParamVector({50.0, 1.0, 1.0, 1.0}));
  EXPECT_EQ(p.noise, ParamVector({10.0, 0.2, 0.2, 0.2}));
  EXPECT_EQ(p.name(), "HETERO_MIX");
}

TEST(Problems, MakeFromParams) {
  const auto p = make_problem(
      "BOUNDED_WAVE", {{"d", {3}}, {"G", {1.0, 2.0, 3.0}}, {"sigma", {0.5}}});
  EXPECT_EQ(p.dim, 3u);
  EXPECT_EQ(p.lipschitz, ParamVector({1.0, 2.0, 3.0}));
  EXPECT_EQ(p.noise, ParamVector::filled(3, 0.5));
  EXPECT_EQ(p.x0, ParamVector::filled(3, 1.0));
  EXPECT_NEAR(p.global_lipschitz(), std::sqrt(14.0), 1e-15);

  EXPECT_THROW(make_problem("BOUNDED_WAVE", {{"H", {1.0}}}),
               std::invalid_argument);
  EXPECT_THROW(make_problem("BOUNDED_WAVE", {{"d", {2}}, {"G", {1, 2, 3}}}),
               DimensionError);
  EXPECT_THROW(make_problem("BOUNDED_WAVE", {{"d", {1.5}}}),
               std::invalid_argument);
  EXPECT_THROW(make_problem("HUBER_VALLEY", {{"G", {-1.0}}}),
               std::invalid_argument);
  EXPECT_THROW(make_problem("HUBER_VALLEY", {{"sigma", {-1.0}}}),
               std::invalid_argument);
}

TEST(Problems, FiniteDifferenceGradient) {
  RandomStream rng(5);
  for (const auto& p : shipped_problems()) {
    for (int k = 0; k < 100; ++k) {
      const ParamVector x = random_point(rng, p.dim, 3.0);
      const ParamVector g = exact_grad(p, x);
      for (std::size_t i = 0; i < p.dim; ++i) {
        std::vector<double> up = x.vec();
        std::vector<double> dn = x.vec();
        up[i] += 1e-6;
        dn[i] -= 1e-6;
        const double fd =
            (eval_f(p, ParamVector(up)) - eval_f(p, ParamVector(dn))) / 2e-6;
        EXPECT_NEAR(g[i], fd, 1e-4) << p.name() << " coordinate " << i;
      }
    }
  }
}

TEST(Problems, LipschitzCertification) {
  RandomStream rng(6);
  for (const auto& p : shipped_problems()) {
    double worst = 0.0;
    for (int k = 0; k < 100000 / static_cast<int>(p.dim); ++k) {
      const ParamVector x = random_point(rng, p.dim, 5.0);
      const ParamVector g = exact_grad(p, x);
      for (std::size_t i = 0; i < p.dim; ++i) {
        ASSERT_LE(std::abs(g[i]), p.lipschitz[i]);
        worst = std::max(worst, std::abs(g[i]) / p.lipschitz[i]);
      }
      ASSERT_LE(l2_norm(g), p.global_lipschitz() * (1.0 + 1e-15));
    }
    EXPECT_GT(worst, 0.9) << p.name();
  }
}

TEST(Problems, DeltaBound) {
  for (const auto& p : shipped_problems()) {
    // Both families have infimum 0 at the origin.
    EXPECT_LE(eval_f(p, p.x0) - 0.0, p.delta_bound);
    EXPECT_EQ(eval_f(p, ParamVector::zeros(p.dim)), 0.0);
  }
}

TEST(Oracle, NoiselessIsExact) {
  const auto p = make_bounded_wave({1.0, 2.0}, {0.0, 0.0}, {1.0, 1.0});
  RandomStream rng(1);
  const ParamVector x{0.3, -0.8};
  const OracleSample s = sto_grad(p, x, rng);
  EXPECT_EQ(s.g, exact_grad(p, x));
  EXPECT_EQ(s.tag, 0u);
  EXPECT_EQ(rng.counter(), 2u);
}

TEST(Oracle, UnbiasedWithVariance) {
  RandomStream rng(77);
  for (const auto& p : shipped_problems()) {
    const ParamVector x = random_point(rng, p.dim, 1.0);
    const ParamVector grad = exact_grad(p, x);
    const int n = 100000;
    std::vector<double> sum(p.dim, 0.0), sumsq(p.dim, 0.0);
    for (int k = 0; k < n; ++k) {
      const ParamVector g = sto_grad(p, x, rng).g;
      for (std::size_t i = 0; i < p.dim; ++i) {
        const double e = g[i] - grad[i];
        // Rademacher noise: every draw is exactly sigma_i away.
        ASSERT_NEAR(std::abs(e), p.noise[i], 1e-12 * (1.0 + p.noise[i]));
        sum[i] += g[i];
        sumsq[i] += e * e;
      }
    }
    for (std::size_t i = 0; i < p.dim; ++i) {
      const double mean = sum[i] / n;
      EXPECT_LE(std::abs(mean - grad[i]), 3.0 * p.noise[i] / std::sqrt(n) + 1e-12)
          << p.name() << " coordinate " << i;
      if (p.noise[i] > 0.0) {
        EXPECT_NEAR(sumsq[i] / n, p.noise[i] * p.noise[i],
                    0.02 * p.noise[i] * p.noise[i]);
      }
    }
  }
}

TEST(Oracle, DimensionMismatch) {
  const auto p = make_bounded_wave({1.0}, {0.0}, {1.0});
  RandomStream rng(1);
  EXPECT_THROW(sto_grad(p, {1.0, 2.0}, rng), DimensionError);
  EXPECT_THROW(eval_f(p, {1.0, 2.0}), DimensionError);
}

}  // namespace
}  // namespace o2nc
