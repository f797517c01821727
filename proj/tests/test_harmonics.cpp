#include <cmath>

#include "cbp/harmonics.hpp"
#include "cbp/quadrature.hpp"
#include "doctest.h"

using namespace cbp;
using doctest::Approx;

namespace {

Vec rotate_pairs(const Vec& x, double t) {
  Vec y(x.size());
  for (std::size_t j = 0; j + 1 < x.size(); j += 2) {
    y[j] = std::cos(t) * x[j] - std::sin(t) * x[j + 1];
    y[j + 1] = std::sin(t) * x[j] + std::cos(t) * x[j + 1];
  }
  return y;
}

double numeric_laplacian(const HarmonicAtom& a, const Vec& x) {
  const double h = 1e-2;
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec p1 = x, p2 = x, m1 = x, m2 = x;
    p1[i] += h;
    p2[i] += 2 * h;
    m1[i] -= h;
    m2[i] -= 2 * h;
    s += (-a(p2) + 16 * a(p1) - 30 * a(x) + 16 * a(m1) - a(m2)) / (12 * h * h);
  }
  return s;
}

}  // namespace

TEST_CASE("degree zero is the normalized constant") {
  auto atoms = build_invariant_harmonics(2, 0);
  REQUIRE(atoms.size() == 1);
  Vec e{1, 0, 0, 0};
  CHECK(atoms[0](e) == Approx(1.0 / std::sqrt(sphere_area(4))));
}

TEST_CASE("trace-free modulus difference is in degree two") {
  auto atoms = build_invariant_harmonics(2, 2, HarmonicFamily::complex);
  auto target = modulus_squared(2, 0) - modulus_squared(2, 1);
  CHECK(target.laplacian().is_zero());
  // projection of the target onto the degree-2 atoms recovers it
  double captured = 0.0;
  for (const auto& a : atoms)
    if (a.degree == 2) captured += std::pow(sphere_inner(a.poly, target), 2);
  CHECK(captured == Approx(sphere_inner(target, target)).epsilon(1e-10));
}

TEST_CASE("atoms are harmonic, invariant and orthonormal") {
  for (auto fam : {HarmonicFamily::complex, HarmonicFamily::torus, HarmonicFamily::symmetric}) {
    const int n = 3, J = fam == HarmonicFamily::complex ? 4 : 6;
    auto atoms = build_invariant_harmonics(n, J, fam);
    int expected = 0;
    for (int d = 0; d <= J; d += 2) expected += invariant_harmonic_dimension(n, d, fam);
    CHECK(static_cast<int>(atoms.size()) == expected);
    Vec x{0.3, -0.2, 0.5, 0.1, -0.7, 0.25};
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      CHECK(std::abs(numeric_laplacian(atoms[i], x)) < 1e-6);
      CHECK(std::abs(atoms[i].poly.laplacian().evaluate(x)) < 1e-8);
      for (double t : {0.3, 1.7, 4.0})
        CHECK(atoms[i](rotate_pairs(x, t)) == Approx(atoms[i](x)).epsilon(1e-10));
      for (std::size_t j = 0; j <= i; ++j)
        CHECK(std::abs(sphere_inner(atoms[i].poly, atoms[j].poly) - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("torus atoms survive independent pair rotations") {
  auto atoms = build_invariant_harmonics(2, 4, HarmonicFamily::torus);
  Vec x{0.3, -0.2, 0.5, 0.1};
  Vec y{0.3 * std::cos(1.0) + 0.2 * std::sin(1.0), 0.3 * std::sin(1.0) - 0.2 * std::cos(1.0), 0.5, 0.1};
  for (const auto& a : atoms) CHECK(a(y) == Approx(a(x)).epsilon(1e-12));
}

TEST_CASE("L2 normalization against quadrature") {
  auto atoms = build_invariant_harmonics(2, 4, HarmonicFamily::complex);
  for (const auto& a : atoms) {
    auto g = integrate_sphere(SphereRule::product_gauss(12), 4, [&](auto t) { return a(t) * a(t); });
    CHECK(g.value == Approx(1.0).epsilon(1e-10));
  }
}
