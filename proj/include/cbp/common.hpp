#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbp {

using Vec = std::vector<double>;

/// Largest ambient dimension supported by the stack-buffered hot loops.
inline constexpr int kMaxDim = 16;

inline constexpr double kPi = std::numbers::pi;

// Error hierarchy. Every failure surfaced by the library is one of these.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : Error {
  using Error::Error;
};
struct QuadratureError : Error {
  using Error::Error;
};
struct NoisyEstimateError : Error {
  using Error::Error;
};
struct UnsupportedRouteError : Error {
  using Error::Error;
};
struct RootBracketError : Error {
  using Error::Error;
};
struct SpecError : Error {
  using Error::Error;
};
struct ConstructionError : Error {
  using Error::Error;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vec scaled(std::span<const double> a, double s) {
  Vec r(a.begin(), a.end());
  for (double& v : r) v *= s;
  return r;
}

inline Vec normalized(std::span<const double> a) {
  const double n = norm2(a);
  if (!(n > 0.0)) throw DomainError("cannot normalize the zero vector");
  return scaled(a, 1.0 / n);
}

inline void require_unit(std::span<const double> x, double tol, const char* what) {
  const double n = norm2(x);
  if (std::abs(n - 1.0) > tol)
    throw DomainError(std::string(what) + ": expected a unit vector, |x| = " + std::to_string(n));
}

/// Surface area of S^{d-1} in R^d.
inline double sphere_area(int d) {
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Volume of the Euclidean unit ball in R^d.
inline double ball_volume(int d) { return sphere_area(d) / d; }

}  // namespace cbp
