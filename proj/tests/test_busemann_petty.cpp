#include <cmath>

#include "cbp/busemann_petty.hpp"

#include "doctest.h"

using namespace cbp;
using doctest::Approx;

TEST_CASE("scaled ball is consistent") {
  const auto ball = std::make_shared<EuclideanBall>(8);
  const ScaledBody small(ball, 0.9);
  BpRules r{SphereRule::product_gauss(4), SphereRule::quasi_monte_carlo(1 << 12, 1)};
  const auto rep = bp_verify(small, *ball, make_grid(8, 8, Reduction::orbit), r);
  CHECK(rep.verdict == BpVerdict::consistent);
  CHECK_FALSE(rep.tie);
  for (const auto& g : rep.gaps) {
    CHECK(g.gap.value < 0);
    CHECK(g.a_l == Approx(ball_volume(6)).epsilon(1e-9));
    CHECK(g.a_k == Approx(std::pow(0.9, 6) * ball_volume(6)).epsilon(1e-9));
  }
  CHECK(rep.vol_diff.value < 0);
  CHECK(rep.vol_l.value == Approx(ball_volume(8)).epsilon(1e-9));
}

TEST_CASE("identical bodies are consistent with zero gaps") {
  const EuclideanBall b(8);
  const auto rep = bp_verify(b, b, make_grid(8, 8, Reduction::orbit));
  CHECK(rep.verdict == BpVerdict::consistent);
  CHECK(rep.max_gap == 0.0);
  CHECK(rep.vol_diff.value == 0.0);
}

TEST_CASE("zero perturbation reproduces the base body") {
  const auto L = mollify(std::make_shared<ComplexLqBall>(2, 4.0), 0.05);
  const Polynomial g = Polynomial::norm_squared_power(4, 1) + 3.0 * modulus_squared(2, 0);
  const auto K = make_perturbed(L, g, 0.0, 2);
  const auto rep = bp_verify(*K, *L, make_grid(4, 8, Reduction::torus), {SphereRule::product_gauss(8),
                                                                        SphereRule::product_gauss(8)});
  CHECK(rep.verdict == BpVerdict::consistent);
  CHECK(std::abs(rep.max_gap) < 1e-13);
  CHECK(std::abs(rep.vol_diff.value) < 1e-13);
}

TEST_CASE("holder chain") {
  const auto rule = SphereRule::quasi_monte_carlo(1 << 12, 3);
  const auto b6 = std::make_shared<EuclideanBall>(6);
  const ScaledBody small(b6, 0.9);
  auto rep = holder_chain_check(small, *b6, rule);
  CHECK(rep.ok);
  CHECK(rep.vol_term.value == Approx(std::pow(0.9, 6) * sphere_area(6)).epsilon(1e-12));
  CHECK(rep.mixed_term.value == Approx(0.81 * sphere_area(6)).epsilon(1e-12));
  CHECK(rep.slack_sections.value > 0);
  // Holder is an equality for dilates
  CHECK(rep.slack_holder.value == Approx(0.0).scale(1.0).epsilon(1e-9));

  const auto k = mollify(std::make_shared<ComplexLqBall>(3, 4.0), 0.05);
  rep = holder_chain_check(*k, *k, rule);
  CHECK(rep.ok);
  CHECK(std::abs(rep.slack_sections.value) <= 1e-12 * rep.vol_term.value);
  CHECK(std::abs(rep.slack_holder.value) <= 1e-9 * rep.vol_term.value);

  const ScaledBody bigger(k, 1.05);
  rep = holder_chain_check(*k, bigger, rule);
  CHECK(rep.ok);
  CHECK(rep.slack_sections.value > 0);
  CHECK(rep.slack_holder.value >= -3 * rep.slack_holder.total_error() - 1e-12 * rep.vol_term.value);
}

TEST_CASE("no counterexample exists for n = 3") {
  ConstructOptions o;
  o.n = 3;
  o.grid_resolution = 8;
  CHECK_THROWS_WITH_AS(bp_construct(o), doctest::Contains("no negativity region"), ConstructionError);
}

TEST_CASE("bump invariance and gap sign for a nonnegative perturbation") {
  // g >= 0 shrinks every radius: sections and volume both decrease
  const auto L = mollify(std::make_shared<ComplexLqBall>(2, 4.0), 0.05);
  const Polynomial g = Polynomial::norm_squared_power(4, 1) + modulus_squared(2, 0);
  const auto K = make_perturbed(L, g, 0.05, 2);
  CHECK(K->invariance() == Invariance::independent_rotation);
  const auto rep = bp_verify(*K, *L, make_grid(4, 8, Reduction::torus),
                             {SphereRule::product_gauss(8), SphereRule::product_gauss(12)});
  CHECK(rep.verdict == BpVerdict::consistent);
  CHECK(rep.max_gap < 0);
  CHECK(rep.vol_diff.value < 0);
}
