#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cbp/common.hpp"

namespace cbp {

/// (x_11, x_12, ..., x_n1, x_n2) -> (-x_12, x_11, ..., -x_n2, x_n1), i.e. multiplication by i.
Vec perp(std::span<const double> x);

/// Simultaneous rotation of every coordinate pair by `theta`.
Vec rotate(std::span<const double> x, double theta);

/// Distance from `a` to the closest point of the rotation orbit of `b`.
double orbit_distance(std::span<const double> a, std::span<const double> b);

struct ComplexFrame {
  Vec xi;
  Vec xi_perp;
  std::vector<Vec> basis;  // orthonormal basis of the complex hyperplane orthogonal to xi, xi_perp
};

ComplexFrame make_frame(std::span<const double> xi);

enum class Reduction {
  none,   // quasi-uniform points on the full sphere
  phase,  // quasi-uniform points rotated so that the first coordinate pair is (r, 0)
  torus,  // canonical moduli (r_1, 0, ..., r_n, 0), one point per torus orbit
  orbit,  // torus canonical form with moduli sorted descending
};

Reduction parse_reduction(const std::string& s);
std::string to_string(Reduction r);

struct DirectionGrid {
  int dim = 0;
  int resolution = 0;
  Reduction reduction = Reduction::none;
  std::uint64_t seed = 0;
  std::vector<Vec> points;

  std::string spec() const;
  std::size_t size() const { return points.size(); }
};

/// Deterministic direction grid. For torus/orbit the moduli run over the simplex
/// grid r_j^2 = i_j / resolution; for none/phase `resolution` is the point count.
DirectionGrid make_grid(int dim, int resolution, Reduction reduction, std::uint64_t seed = 0);

/// Parses `grid:dim=8,res=16,reduce=orbit,seed=7`.
DirectionGrid parse_grid(const std::string& spec);

}  // namespace cbp
