#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cbp/common.hpp"

namespace cbp {

/// Sparse real polynomial in `dim` variables.
class Polynomial {
 public:
  using Exponent = std::vector<std::uint8_t>;

  Polynomial() = default;
  explicit Polynomial(int dim) : dim_(dim) {}

  static Polynomial constant(int dim, double c);
  static Polynomial variable(int dim, int i);
  static Polynomial monomial(const Exponent& e, double c);
  /// |x|^{2k}
  static Polynomial norm_squared_power(int dim, int k);

  int dim() const { return dim_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  /// Degree if every term has the same total degree, -1 otherwise (0 for zero).
  int homogeneous_degree() const;
  const std::map<Exponent, double>& terms() const { return terms_; }

  void add_term(const Exponent& e, double c);
  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  Polynomial derivative(int i) const;
  Polynomial laplacian() const;
  /// Drops terms with |coefficient| <= tol * max |coefficient|.
  Polynomial pruned(double tol = 1e-14) const;

  double evaluate(std::span<const double> x) const;
  /// Upper bound of |P| on the unit sphere (sum of |coefficients|).
  double coefficient_bound() const;

  std::string to_string() const;

 private:
  int dim_ = 0;
  std::map<Exponent, double> terms_;
};

/// Flattened form of a polynomial for repeated evaluation in hot loops.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);
  double operator()(std::span<const double> x) const;
  int dim() const { return dim_; }
  bool empty() const { return coef_.empty(); }

 private:
  int dim_ = 0;
  int max_power_ = 0;
  std::vector<double> coef_;
  std::vector<std::uint16_t> offsets_;  // per term: start into factors_
  std::vector<std::uint8_t> factors_;   // pairs (variable, power)
};

/// Integral over S^{d-1} of the monomial x^e.
double sphere_moment(const Polynomial::Exponent& e);
/// L^2(S^{d-1}) inner product of two polynomials.
double sphere_inner(const Polynomial& p, const Polynomial& q);

/// Harmonic part of a homogeneous polynomial of degree k.
Polynomial harmonic_projection(const Polynomial& p);

/// Gauss decomposition p = sum_j |x|^{2j} h_{k-2j} of a homogeneous polynomial;
/// returns the harmonic pieces h indexed by their degree (entry k-2j holds h_{k-2j}).
std::map<int, Polynomial> harmonic_decomposition(const Polynomial& p);

}  // namespace cbp
