#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cbp/common.hpp"

namespace cbp {

/// Result of a numerical integral. When `batches` is non-empty the value is the
/// mean of independent batch estimates and `std_err` their standard error;
/// linear combinations of estimates that share batches (common random numbers)
/// are formed batch by batch so correlated noise cancels.
struct Estimate {
  double value = 0.0;
  double std_err = 0.0;
  // Systematic error bound (truncation, extrapolation); zero when not modelled.
  double bias = 0.0;
  long nodes = 0;
  std::string method;
  std::vector<double> batches;

  double total_error() const { return std::hypot(std_err, bias); }
  bool paired_with(const Estimate& o) const {
    return !batches.empty() && batches.size() == o.batches.size();
  }
};

/// Builds an estimate from batch values (value = mean, std_err = sd / sqrt(B)).
Estimate from_batches(std::vector<double> batches, long nodes, std::string method);
Estimate exact_estimate(double value, long nodes, std::string method);

Estimate operator+(const Estimate& a, const Estimate& b);
Estimate operator-(const Estimate& a, const Estimate& b);
Estimate operator*(double s, const Estimate& a);
/// sum_i coeffs[i] * terms[i], batchwise when every term shares the same batches.
Estimate linear_combination(std::span<const Estimate> terms, std::span<const double> coeffs);
/// Standard error of a - b: paired (batchwise) when possible, otherwise root-sum-square.
double combined_error(const Estimate& a, const Estimate& b);

/// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double result() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double kahan_reduce(std::span<const double> partials);

// ---------------------------------------------------------------------------
// One-dimensional rules

struct Rule1d {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `n` nodes on [a, b].
Rule1d gauss_legendre(int n, double a = -1.0, double b = 1.0);
/// Gauss-Jacobi rule for the weight (1 - x)^alpha (1 + x)^beta on [-1, 1].
Rule1d gauss_jacobi(int n, double alpha, double beta);

/// Vector-valued adaptive Gauss-Kronrod (7/15) quadrature. All components are
/// integrated on the same subdivision; refinement is driven by the component
/// mean so that batchwise estimates stay paired.
using VectorFn = std::function<std::vector<double>(double)>;
std::vector<double> adaptive_gauss_kronrod(const VectorFn& f, double a, double b, double rel_tol,
                                           double abs_tol, int max_depth = 18);

// ---------------------------------------------------------------------------
// Sphere rules

enum class RuleKind { monte_carlo, quasi_monte_carlo, product_gauss };

/// Quadrature on S^{d-1} for any d (product_gauss only for d <= 6). Nodes are
/// produced on demand from counters, so a rule is a small value type and every
/// integral that uses it sees the same node stream.
class SphereRule {
 public:
  static constexpr int kBatches = 32;

  static SphereRule monte_carlo(long nodes, std::uint64_t seed);
  static SphereRule quasi_monte_carlo(long nodes, std::uint64_t seed);
  static SphereRule product_gauss(int level);
  /// Parses `mc:n=4e6,seed=1`, `qmc:n=2^20`, `gauss:level=40`.
  static SphereRule parse(const std::string& spec);

  RuleKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  int level() const { return level_; }
  long per_batch() const { return per_batch_; }
  int batch_count() const { return kind_ == RuleKind::product_gauss ? 1 : kBatches; }
  long node_count(int dim) const;
  std::string spec() const;

  /// Same kind, `factor` times as many nodes (gauss: level scaled by factor^(1/(d-1)) rounded up).
  SphereRule refined(int factor) const;
  /// Smallest refinement whose node count on S^{dim-1} is at least `factor` times larger.
  SphereRule with_more_nodes(int dim, double factor) const;
  SphereRule with_seed(std::uint64_t seed) const;

  // Segment iteration used by the integrators. A segment is a batch for
  // random rules and a slab of the outermost polar angle for gauss rules.
  int segment_count(int dim) const;
  void for_each_node(int dim, int segment,
                     const std::function<void(std::span<const double>, double)>& fn) const;

 private:
  RuleKind kind_ = RuleKind::quasi_monte_carlo;
  long per_batch_ = 0;
  int level_ = 0;
  std::uint64_t seed_ = 1;
};

/// Number of worker threads used by integrators. Results never depend on it.
void set_worker_count(int workers);
int worker_count();

using SphereFn = std::function<double(std::span<const double>)>;
using MultiSphereFn = std::function<void(std::span<const double>, std::span<double>)>;

/// Integrates `outputs` functions at once over S^{dim-1} on a shared node stream.
std::vector<Estimate> integrate_sphere_multi(const SphereRule& rule, int dim, int outputs,
                                             const MultiSphereFn& fn);
Estimate integrate_sphere(const SphereRule& rule, int dim, const SphereFn& f);

/// Integrates over the unit sphere of span(basis); `fn` receives ambient points.
std::vector<Estimate> integrate_subsphere_multi(const SphereRule& rule,
                                                const std::vector<Vec>& basis, int outputs,
                                                const MultiSphereFn& fn);
Estimate integrate_subsphere(const SphereRule& rule, const std::vector<Vec>& basis,
                             const SphereFn& f);

/// Checks orthonormality of a basis to `tol`; throws DomainError otherwise.
void require_orthonormal(const std::vector<Vec>& basis, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Fractional radial integral  int_0^inf (g(t) - g(0)) / t^{1+q} dt  for an even
// profile g supported on [0, T]. Each profile evaluation returns batch values
// so the result keeps the pairing of the inputs.

using ProfileFn = std::function<std::vector<double>(double)>;

struct FractionalOptions {
  double split_fraction = 1e-3;  // delta = T * split_fraction
  int taylor_samples = 5;
  double rel_tol = 1e-9;
};

Estimate fractional_radial(const ProfileFn& g, double q, double cutoff,
                           const FractionalOptions& opt = {});
double fractional_radial(const std::function<double(double)>& g, double q, double cutoff,
                         const FractionalOptions& opt = {});

/// Cubature for functions on S^{2n-1} invariant under independent rotations of the
/// pairs: the squared moduli are uniform on the simplex, integrated by a conical
/// Gauss product with `level` nodes per axis. Points have x_{2j} = |z_j|, x_{2j+1} = 0;
/// weights sum to the sphere area.
struct TorusRule {
  std::vector<Vec> points;
  std::vector<double> weights;
};
TorusRule torus_invariant_rule(int n, int level);

}  // namespace cbp
