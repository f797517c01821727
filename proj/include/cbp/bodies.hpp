#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbp/common.hpp"
#include "cbp/harmonics.hpp"
#include "cbp/polynomial.hpp"

namespace cbp {

enum class Invariance { general, complex_rotation, independent_rotation };
enum class Smoothness { nonsmooth, C2, C_infinity };

std::string to_string(Invariance v);
std::string to_string(Smoothness v);
/// True when `have` implies invariance under the common rotation R_theta.
inline bool complex_invariant(Invariance have) { return have != Invariance::general; }

/// Origin-symmetric star body in R^dim given by its Minkowski functional.
/// Immutable after construction, so evaluation is safe from any thread.
class StarBody {
 public:
  virtual ~StarBody() = default;

  int dim() const { return dim_; }
  Invariance invariance() const { return invariance_; }
  Smoothness smoothness() const { return smoothness_; }
  /// Certified bounds on the radial function over the unit sphere.
  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  /// Invariant under permutations of the coordinate pairs.
  bool permutation_symmetric() const { return permutation_symmetric_; }
  const std::string& spec() const { return spec_; }

  /// ||x||; throws DomainError on the zero vector or a dimension mismatch.
  double norm(std::span<const double> x) const;
  /// rho(theta) = 1 / ||theta|| for unit theta (checked to 1e-12).
  double radial(std::span<const double> theta) const;

  /// Hot-path evaluation without argument checks.
  virtual double norm_unchecked(std::span<const double> x) const = 0;
  /// Radial value for a unit vector without checks.
  double radial_unchecked(std::span<const double> theta) const { return 1.0 / norm_unchecked(theta); }

  /// When set, ||x||^degree equals this homogeneous polynomial.
  virtual const Polynomial* gauge_polynomial() const { return nullptr; }

 protected:
  int dim_ = 0;
  Invariance invariance_ = Invariance::general;
  Smoothness smoothness_ = Smoothness::nonsmooth;
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  bool permutation_symmetric_ = false;
  std::string spec_;
};

using BodyPtr = std::shared_ptr<const StarBody>;

class EuclideanBall final : public StarBody {
 public:
  explicit EuclideanBall(int dim);
  double norm_unchecked(std::span<const double> x) const override;
  const Polynomial* gauge_polynomial() const override { return &gauge_; }

 private:
  Polynomial gauge_;
};

/// Unit ball of the complex l_q norm (sum_j |z_j|^q)^{1/q} on C^n = R^{2n}.
class ComplexLqBall final : public StarBody {
 public:
  ComplexLqBall(int n, double q);
  int n() const { return dim_ / 2; }
  double q() const { return q_; }
  double norm_unchecked(std::span<const double> x) const override;
  const Polynomial* gauge_polynomial() const override { return gauge_ ? &*gauge_ : nullptr; }

 private:
  double q_;
  std::optional<Polynomial> gauge_;
};

/// lambda * base.
class ScaledBody final : public StarBody {
 public:
  ScaledBody(BodyPtr base, double factor);
  double norm_unchecked(std::span<const double> x) const override;
  const BodyPtr& base() const { return base_; }
  double factor() const { return factor_; }

 private:
  BodyPtr base_;
  double factor_;
};

/// ||x|| = P(x)^{1/degree} for a homogeneous polynomial P positive off the origin.
class PolynomialGaugeBody final : public StarBody {
 public:
  struct Meta {
    Invariance invariance = Invariance::general;
    Smoothness smoothness = Smoothness::C_infinity;
    double r_min = 0.0;
    double r_max = 0.0;
    bool permutation_symmetric = false;
    std::string spec;
  };
  PolynomialGaugeBody(Polynomial p, const Meta& meta);
  double norm_unchecked(std::span<const double> x) const override;
  const Polynomial* gauge_polynomial() const override { return &poly_; }

 private:
  Polynomial poly_;
  CompiledPolynomial compiled_;
  double inv_degree_;
};

/// Spherical function used as a perturbation bump.
class Bump {
 public:
  /// Polynomial bump evaluated on unit vectors; `sup_abs` bounds |g| on the sphere.
  Bump(Polynomial g, Invariance invariance, std::string id);
  double operator()(std::span<const double> theta) const { return compiled_(theta); }
  double sup_abs() const { return sup_abs_; }
  Invariance invariance() const { return invariance_; }
  const std::string& id() const { return id_; }
  const Polynomial& polynomial() const { return poly_; }

 private:
  Polynomial poly_;
  CompiledPolynomial compiled_;
  double sup_abs_;
  Invariance invariance_;
  std::string id_;
};

/// Estimate of sup |g| over the sphere: maximum over a dense quasi-uniform set.
double sampled_sup_abs(const std::function<double(std::span<const double>)>& g, int dim,
                       int samples = 1 << 15);

/// ||x||_K^{-s} = ||x||_L^{-s} - eps * g(x/|x|) |x|^{-s}.
class RadialPerturbation final : public StarBody {
 public:
  RadialPerturbation(BodyPtr base, double exponent, double eps, std::shared_ptr<const Bump> bump);
  double norm_unchecked(std::span<const double> x) const override;
  const BodyPtr& base() const { return base_; }
  double exponent() const { return s_; }
  double eps() const { return eps_; }
  const Bump& bump() const { return *bump_; }

 private:
  BodyPtr base_;
  double s_;
  double eps_;
  std::shared_ptr<const Bump> bump_;
};

/// Radial function averaged over a fixed family of near-identity unitary maps of C^n.
class UnitaryAveragedBody final : public StarBody {
 public:
  UnitaryAveragedBody(BodyPtr base, double width, int maps = 64, std::uint64_t seed = 0x6d6f6c6c);
  double norm_unchecked(std::span<const double> x) const override;

 private:
  BodyPtr base_;
  int n_;
  std::vector<double> mats_;  // maps x 2n x 2n real matrices
  std::vector<double> weights_;
};

/// Kernel of the cap mollifier: exp(-1 / (1 - (phi / width)^2)) on the geodesic
/// distance phi < width. Returns the Funk-Hecke eigenvalue of degree k in R^dim.
double cap_multiplier(int dim, int k, double width);

/// Smooth approximation of `body` at angular scale `width` in (0, 1).
BodyPtr mollify(const BodyPtr& body, double width);

struct ConvexityReport {
  long samples = 0;
  long violations = 0;
  double worst_gap = -1.0;  // max over pairs of ||(x + y) / 2|| - 1
};

/// Midpoint test on random boundary pairs. Half of the pairs are close, with
/// angular separations log-uniform in [1e-4, 1].
ConvexityReport convexity_probe(const StarBody& body, long samples, std::uint64_t seed,
                                double tol = 1e-9);

/// sup over sampled unit directions of |rho_a - rho_b|.
double radial_distance(const StarBody& a, const StarBody& b, int samples = 4096,
                       std::uint64_t seed = 11);

/// Builds a body from the spec language: `ball:dim=8`, `clq:n=4,q=4`,
/// `scale:base=(ball:dim=8),factor=0.9`, `mollify:base=(clq:n=4,q=4),width=0.05`,
/// `perturb:base=(...),eps=0.01,bump=(atom:n=4,deg=2,index=1,family=torus),exponent=6`.
BodyPtr parse_body(const std::string& spec);
/// Bump spec: `atom:n=..,deg=..,index=..[,family=complex|torus|symmetric]`.
std::shared_ptr<const Bump> parse_bump(const std::string& spec);

}  // namespace cbp
