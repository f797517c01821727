#pragma once

#include <map>
#include <string>
#include <vector>

#include "cbp/bodies.hpp"
#include "cbp/fourier.hpp"
#include "cbp/frames.hpp"
#include "cbp/quadrature.hpp"

namespace cbp {

enum class Conclusion { nonnegative_up_to_tol, negativity_witness, inconclusive };
std::string to_string(Conclusion c);

struct ScanRules {
  SphereRule primary = SphereRule::quasi_monte_carlo(1 << 12, 1);
  SphereRule confirm = SphereRule::quasi_monte_carlo(1 << 14, 2);
  PairingOptions pairing;
  /// Refinements (x4 nodes each) before a noisy grid value is given up.
  int max_refine = 2;
};

struct GridValue {
  Vec xi;
  FtSample sample;
  bool noisy = false;  ///< primary route could not resolve the value
};

struct RouteAgreement {
  FtSample primary;
  FtSample confirm;
  double gap_sigmas = 0.0;
  bool agree = false;
};

struct EmbeddingVerdict {
  std::string body;
  double p = 0.0;
  std::string grid;
  double min_value = 0.0;
  double min_stderr = 0.0;
  Vec argmin;
  Conclusion conclusion = Conclusion::inconclusive;
  RouteAgreement agreement;
  std::vector<GridValue> values;
  std::vector<std::string> diagnostics;
};

/// Checks that the grid reduction is sound for the body's symmetry group.
void require_compatible(const StarBody& body, const DirectionGrid& grid);

/// Sign scan of (||x||^{-p})^ over the grid. Values are trusted up to three total
/// errors; the argmin is confirmed by the pairing oracle and routes disagreeing by
/// more than five combined errors make the verdict inconclusive.
EmbeddingVerdict scan(const StarBody& body, double p, const DirectionGrid& grid, const ScanRules& rules = {});

/// Scan for several exponents; fractional exponents share one section profile per direction.
std::map<double, EmbeddingVerdict> embedding_interval(const StarBody& body, const std::vector<double>& p_list,
                                                      const DirectionGrid& grid, const ScanRules& rules = {});

}  // namespace cbp
