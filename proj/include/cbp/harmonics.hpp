#pragma once

#include <string>
#include <vector>

#include "cbp/polynomial.hpp"

namespace cbp {

/// Which symmetry the generated harmonics carry.
///  complex:   invariant under the common rotation of all coordinate pairs
///  torus:     invariant under rotating each coordinate pair separately
///  symmetric: torus-invariant and symmetric under permuting the pairs
enum class HarmonicFamily { complex, torus, symmetric };

HarmonicFamily parse_harmonic_family(const std::string& s);
std::string to_string(HarmonicFamily f);

/// Homogeneous harmonic polynomial on R^{2n}, unit norm in L^2(S^{2n-1}).
struct HarmonicAtom {
  int degree = 0;
  Polynomial poly;
  CompiledPolynomial compiled;
  std::string label;

  double operator()(std::span<const double> theta) const { return compiled(theta); }
};

/// Invariant harmonics of every even degree <= max_degree, orthonormal in L^2 of
/// the sphere. Degree-2k candidates are products of quadratic invariants,
/// projected onto their harmonic part and orthogonalized; candidates that lose
/// rank are dropped.
std::vector<HarmonicAtom> build_invariant_harmonics(int n, int max_degree,
                                                    HarmonicFamily family = HarmonicFamily::complex);

/// Number of linearly independent invariant harmonics of exact degree `degree`.
int invariant_harmonic_dimension(int n, int degree, HarmonicFamily family);

/// |z_j|^2 = x_{2j}^2 + x_{2j+1}^2 as a polynomial on R^{2n}.
Polynomial modulus_squared(int n, int j);

}  // namespace cbp
