#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "cbp/bodies.hpp"
#include "cbp/frames.hpp"
#include "cbp/harmonics.hpp"
#include "cbp/quadrature.hpp"

namespace cbp {

/// Value of (||x||^{-p})^ at a direction. `flagged` marks a sample whose relative
/// error exceeds the route's acceptance threshold.
struct FtSample {
  Vec xi;
  double p = 0.0;
  Estimate est;
  bool flagged = false;

  double value() const { return est.value; }
  double error() const { return est.total_error(); }
  const std::string& method() const { return est.method; }
};

/// (-1)^m 4 pi (n - m - 1) Delta^m A(0) with p = 2n - 2m - 2. Requires an R_theta-invariant body.
FtSample ft_derivative_route(const StarBody& body, std::span<const double> xi, int m,
                             const SphereRule& rule, double fd_step = 0.0);

struct FractionalRouteOptions {
  int angles = 1;            // circle nodes in [0, pi); the profile is radial for invariant bodies
  int panel_nodes = 10;      // Gauss-Legendre nodes per radial panel
  double split_fraction = 1e-3;
};

/// Radial profile t -> A(t theta) sampled once on a fixed node set, reusable for every q.
struct SectionProfile {
  Vec xi;
  double cutoff = 0.0;  // A vanishes beyond this radius
  double delta = 0.0;   // split point of the singular head
  std::vector<double> head_t;   // Taylor-fit nodes in (0, delta]
  std::vector<double> mid_t, mid_w;  // rule on [delta, cutoff] without the singular factor
  std::vector<std::vector<Estimate>> values;  // per angle: A(0), head nodes, mid nodes
  std::vector<double> angles;
};

SectionProfile section_profile(const StarBody& body, std::span<const double> xi, const SphereRule& rule,
                               const FractionalRouteOptions& opt = {});

/// The circle pairing (1/Gamma(-q/2)) int_{S^1} int_0^inf (A(t u) - A(0)) t^{-1-q} dt du.
Estimate fractional_pairing(const SectionProfile& prof, double q);

/// 2^{q+1} Gamma((q+2)/2) (2n - q - 2) * pairing, with p = 2n - q - 2.
FtSample ft_fractional_route(const StarBody& body, std::span<const double> xi, double q,
                             const SphereRule& rule, const FractionalRouteOptions& opt = {});
FtSample ft_from_profile(const SectionProfile& prof, int n, double q);

struct PairingOptions {
  double sigma = 0.025;
  int panel_nodes = 12;
  double panel_ratio = 1.6;
};

/// r-integral of r^{a-1} exp(-sigma^2 r^2 / 2) cos(r s) over (0, inf).
double gaussian_radial_kernel(double a, double sigma, double s);

/// Pairs x -> h(x/|x|) |x|^{-p} with the inverse transform of a Gaussian bump pair at
/// +-xi of width sigma * |xi| and extrapolates sigma -> 0 over {sigma, sigma/2}. `h` is an
/// even function on the unit sphere; `xi` need not be a unit vector.
FtSample pairing_oracle_fn(const std::function<double(std::span<const double>)>& h, int dim,
                           std::span<const double> xi, double p, const SphereRule& rule,
                           const PairingOptions& opt = {});
/// Oracle for (||x||_K^{-p})^ at xi.
FtSample pairing_oracle(const StarBody& body, std::span<const double> xi, double p,
                        const SphereRule& rule, const PairingOptions& opt = {});

/// Exponents reachable by the derivative route (p = 2n - 2m - 2) or the fractional
/// route (2n - 4 < p < 2n - 2).
bool derivative_reachable(int n, double p, int* m = nullptr);
bool fractional_reachable(int n, double p);

/// Derivative route when p = 2n - 2m - 2, fractional route otherwise.
FtSample ft_primary(const StarBody& body, std::span<const double> xi, double p, const SphereRule& rule);

// ---------------------------------------------------------------------------
// Harmonic multipliers: (P_j(x/|x|) |x|^{-p})^ = lambda P_j(y/|y|) |y|^{-2n+p}.

struct MultiplierRecord {
  double value = 0.0;
  double std_err = 0.0;
  bool calibrated = false;  // false when loaded from a report
};

/// Write-once cache shared by all callers. The first successful calibration of a
/// key wins; later callers reuse it.
class MultiplierTable {
 public:
  static MultiplierTable& global();
  /// Calibrates lambda(j, p, n) by the pairing oracle against one invariant atom.
  /// Throws NoisyEstimateError when the calibration error exceeds 5%.
  MultiplierRecord get(int j, double p, int n, const SphereRule& rule, const PairingOptions& opt = {});
  void preload(int j, double p, int n, double value);
  std::map<std::string, MultiplierRecord> snapshot() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::map<std::string, MultiplierRecord> table_;
};

double multiplier(int j, double p, int n, const SphereRule& rule);

// ---------------------------------------------------------------------------
// Identity checks

struct ParsevalReport {
  double lhs = 0.0;
  double lhs_err = 0.0;
  double rhs = 0.0;
  double rhs_err = 0.0;
  double rel_gap = 0.0;
  int directions = 0;
};

/// Checks int (||x||_K^{-p})^ (||x||_L^{-2n+p})^ = (2 pi)^{2n} int ||x||_K^{-p} ||x||_L^{-2n+p}
/// over the sphere. Both bodies must be torus invariant: directions are then parametrized
/// by the moduli, uniform on the simplex, and integrated by a conical Gauss product of
/// `level` nodes per axis.
ParsevalReport parseval_check(const StarBody& K, const StarBody& L, double p, int level,
                              const SphereRule& rule);

struct SphReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;
};

/// |v|^{-q-2} against [Gamma(-q/2) / (2 Gamma((-q-1)/2) sqrt(pi))] int_{S^1} |(v,u)|^{-q-2} du.
SphReport sph_identity_check(std::array<double, 2> v, double q, int nodes = 32);

}  // namespace cbp
