#include <cmath>

#include "cbp/bodies.hpp"
#include "cbp/frames.hpp"
#include "cbp/rng.hpp"
#include "doctest.h"

using namespace cbp;
using doctest::Approx;

namespace {

Vec random_unit(int d, std::uint64_t i) {
  Vec x(d);
  for (int c = 0; c < d; ++c) x[c] = rng::normal(99, i, c);
  return normalized(x);
}

void check_frame(const ComplexFrame& f) {
  std::vector<Vec> all{f.xi, f.xi_perp};
  all.insert(all.end(), f.basis.begin(), f.basis.end());
  REQUIRE(all.size() == f.xi.size());
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j)
      CHECK(std::abs(dot(all[i], all[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
}

}  // namespace

TEST_CASE("frame of a coordinate direction") {
  auto f = make_frame(Vec{1, 0, 0, 0});
  CHECK(f.xi_perp == Vec{0, 1, 0, 0});
  check_frame(f);
  for (const auto& b : f.basis) CHECK(std::abs(b[0]) + std::abs(b[1]) < 1e-15);
  CHECK(make_frame(Vec{0, 1, 0, 0}).xi_perp == Vec{-1, 0, 0, 0});
  CHECK_THROWS_AS(make_frame(Vec{1, 1, 0, 0}), DomainError);
}

TEST_CASE("random frames are orthonormal and perp is a quarter turn") {
  for (int d : {4, 6, 8})
    for (std::uint64_t i = 0; i < 20; ++i) {
      auto xi = random_unit(d, i);
      auto f = make_frame(xi);
      check_frame(f);
      auto r = rotate(xi, kPi / 2);
      for (int c = 0; c < d; ++c) CHECK(f.xi_perp[c] == Approx(r[c]).scale(1).epsilon(1e-15));
    }
}

TEST_CASE("rotation action") {
  auto a = rotate(Vec{1, 0, 0, 0}, kPi / 2);
  CHECK(a[0] == Approx(0).scale(1));
  CHECK(a[1] == Approx(1));
  auto b = rotate(Vec{1, 0, 1, 0}, kPi);
  CHECK(b[0] == Approx(-1));
  CHECK(b[2] == Approx(-1));
  CHECK_THROWS_AS(rotate(Vec{1, 0, 0}, 1.0), DomainError);
  auto x = random_unit(8, 3);
  auto y = rotate(rotate(x, 0.4), 1.1), z = rotate(x, 1.5);
  for (int c = 0; c < 8; ++c) CHECK(y[c] == Approx(z[c]).scale(1).epsilon(1e-14));
  CHECK(norm2(rotate(x, 2.2)) == Approx(1.0).epsilon(1e-14));
  // the orbit of xi stays in span{xi, xi_perp}
  auto f = make_frame(x);
  for (double t : {0.3, 2.0, 5.0}) {
    auto r = rotate(x, t);
    for (const auto& v : f.basis) CHECK(std::abs(dot(r, v)) < 1e-12);
  }
}

TEST_CASE("orbit-reduced grids") {
  auto g4 = make_grid(4, 16, Reduction::torus);
  CHECK(g4.size() == 17);
  for (const auto& p : g4.points) {
    CHECK(p[1] == 0.0);
    CHECK(p[3] == 0.0);
    CHECK(p[0] >= 0.0);
    CHECK(p[2] >= 0.0);
  }
  auto g8 = make_grid(8, 12, Reduction::orbit, 7);
  for (const auto& p : g8.points) {
    double s = 0.0;
    for (int j = 0; j < 4; ++j) {
      CHECK(p[2 * j] >= 0.0);
      s += p[2 * j] * p[2 * j];
      if (j) CHECK(p[2 * j] <= p[2 * j - 2]);
    }
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
  for (std::size_t i = 0; i < g8.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) CHECK(orbit_distance(g8.points[i], g8.points[j]) > 1e-3);
  CHECK(parse_grid("grid:dim=8,res=16,reduce=orbit,seed=7").spec() ==
        "grid:dim=8,res=16,reduce=orbit,seed=7");
  CHECK_THROWS_AS(make_grid(8, 4, Reduction::orbit), DomainError);
  auto ph = make_grid(6, 64, Reduction::phase, 2);
  for (const auto& p : ph.points) CHECK(p[1] == 0.0);
}

TEST_CASE("orbit coverage for a modulus-invariant body") {
  ComplexLqBall b(3, 4);
  auto g = make_grid(6, 24, Reduction::orbit);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto xi = random_unit(6, 500 + i);
    double best = 1e9;
    for (const auto& p : g.points) best = std::min(best, std::abs(b.radial(xi) - b.radial(p)));
    worst = std::max(worst, best);
  }
  CHECK(worst < 0.02);
}

TEST_CASE("quasi-uniform grid discrepancy shrinks on doubling") {
  // cap discrepancy estimated over random caps
  auto disc = [](int n) {
    auto g = make_grid(4, n, Reduction::none, 1);
    double worst = 0.0;
    for (std::uint64_t c = 0; c < 200; ++c) {
      auto center = random_unit(4, 9000 + c);
      const double h = 2.0 * rng::uniform(5, c, 0) - 1.0;
      // normalized area of the cap {<x, center> >= h} on S^3
      const double t = std::acos(h);
      const double area = (t - std::sin(t) * std::cos(t)) / kPi;
      int inside = 0;
      for (const auto& p : g.points) inside += dot(p, center) >= h;
      worst = std::max(worst, std::abs(static_cast<double>(inside) / n - area));
    }
    return worst;
  };
  double prev = disc(256);
  for (int n : {1024, 4096}) {
    double cur = disc(n);
    CHECK(cur < prev);
    prev = cur;
  }
}
