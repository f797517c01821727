#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cbp/bodies.hpp"
#include "cbp/embedding.hpp"
#include "cbp/frames.hpp"
#include "cbp/polynomial.hpp"
#include "cbp/quadrature.hpp"

namespace cbp {

struct BpRules {
  SphereRule sections = SphereRule::product_gauss(6);
  SphereRule volume = SphereRule::quasi_monte_carlo(1 << 16, 4);

  /// Rules with `factor` times the nodes for bodies in R^dim.
  BpRules with_more_nodes(int dim, double factor) const {
    return {sections.with_more_nodes(dim - 2, factor), volume.with_more_nodes(dim, factor)};
  }
};

enum class BpVerdict { consistent, violation, not_dominated };
std::string to_string(BpVerdict v);

struct SectionGap {
  Vec xi;
  double a_k = 0.0;
  double a_l = 0.0;
  Estimate gap;  ///< A_K(0) - A_L(0), paired node by node
};

struct BpReport {
  std::string k_spec;
  std::string l_spec;
  std::string grid;
  std::vector<SectionGap> gaps;
  double max_gap = 0.0;
  double max_gap_err = 0.0;
  Vec max_gap_xi;
  Estimate vol_k;
  Estimate vol_l;
  Estimate vol_diff;  ///< Vol(K) - Vol(L), paired node by node
  BpVerdict verdict = BpVerdict::not_dominated;
  bool tie = false;
  std::vector<std::string> flags;
};

/// Central sections of K and L on the grid and both volumes, with shared frames and rules.
BpReport bp_verify(const StarBody& K, const StarBody& L, const DirectionGrid& grid, const BpRules& rules = {});

struct HolderReport {
  Estimate vol_term;    ///< int ||x||_K^{-2n} = 2n Vol(K)
  Estimate mixed_term;  ///< int ||x||_L^{-2n+2} ||x||_K^{-2}
  double bound = 0.0;   ///< (2n Vol L)^{(n-1)/n} (2n Vol K)^{1/n}
  Estimate slack_sections;  ///< mixed_term - vol_term
  Estimate slack_holder;    ///< bound - mixed_term
  bool ok = false;
};

/// The polar-formula and Holder chain 2n Vol(K) <= int ||x||_L^{-2n+2}||x||_K^{-2} <= bound.
/// The first inequality presumes K is a 2-intersection body whose sections are dominated by L.
HolderReport holder_chain_check(const StarBody& K, const StarBody& L, const SphereRule& rule);

struct ConstructOptions {
  int n = 4;
  double q_body = 4.0;
  double width = 0.05;   ///< mollifier width for L
  int max_degree = 4;    ///< degree of the harmonic combination squared into f
  int grid_resolution = 16;         ///< orbit grid of the negativity scan of L
  int verify_resolution = 8;        ///< torus grid of the section comparison
  std::uint64_t grid_seed = 7;
  ScanRules scan;
  BpRules verify;
  SphereRule multiplier_rule = SphereRule::quasi_monte_carlo(1 << 14, 5);
  int simplex_level = 10;
  double floor_fraction = 0.25;  ///< share of the negative pairing spent on a positive floor of f
  long convexity_samples = 100000;
  std::uint64_t convexity_seed = 17;
  int max_halvings = 8;
};

struct Construction {
  ConstructOptions options;
  BodyPtr L;
  std::shared_ptr<const RadialPerturbation> K;
  std::vector<std::string> atoms;
  std::vector<double> coefficients;
  double floor = 0.0;
  double min_eigenvalue = 0.0;
  double predicted_pairing = 0.0;  ///< int rho_L^2 g over the sphere, negative by design
  std::map<int, double> multipliers;
  Polynomial f;
  Polynomial g;
  double eps = 0.0;
  std::vector<std::string> eps_trace;
  EmbeddingVerdict scan;
  DirectionGrid verify_grid;
  BpReport report;
};

/// Pair (K, L) with smaller central sections but larger volume: L is the mollified
/// complex l_q ball and ||x||_K^{-2n+2} = ||x||_L^{-2n+2} - eps g(x/|x|)|x|^{-2n+2}.
Construction bp_construct(const ConstructOptions& opt = {});

/// Rebuilds K from L and the stored perturbation.
std::shared_ptr<const RadialPerturbation> make_perturbed(const BodyPtr& L, const Polynomial& g, double eps,
                                                         int n);

}  // namespace cbp
