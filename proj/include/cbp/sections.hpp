#pragma once

#include <array>
#include <span>
#include <vector>

#include "cbp/bodies.hpp"
#include "cbp/frames.hpp"
#include "cbp/quadrature.hpp"

namespace cbp {

using Offset = std::array<double, 2>;

/// Vol(K) = (1/d) int_{S^{d-1}} rho^d.
Estimate volume(const StarBody& body, const SphereRule& rule);

/// Vol_{2n-2}(K cap H_xi) = (1/(2n-2)) int_{S cap H_xi} rho^{2n-2}.
Estimate section_volume(const StarBody& body, const ComplexFrame& frame, const SphereRule& rule);

/// A(u): volume of {x in K : <x, xi> = u_1, <x, xi_perp> = u_2}, by ray integration
/// inside the slice plane. Zero when the slice misses the body.
Estimate parallel_section(const StarBody& body, const ComplexFrame& frame, Offset u,
                          const SphereRule& rule);

/// A(u) for several offsets on one shared node stream (common random numbers).
std::vector<Estimate> parallel_sections(const StarBody& body, const ComplexFrame& frame,
                                        std::span<const Offset> offsets, const SphereRule& rule);

/// Default finite-difference step: 0.05 r_min for m = 1 and 0.1 r_min for m = 2.
double default_fd_step(const StarBody& body, int m);

/// Delta^m A(0) for m in {1, 2}: second-order stencils at steps h and h/2 combined
/// by Richardson extrapolation. `bias` carries |D(h/2) - D(h)| / 15.
Estimate laplacian_at_zero(const StarBody& body, const ComplexFrame& frame, int m,
                           const SphereRule& rule, double h = 0.0);

/// True when the affine slice at offset u meets the interior of the body (64 probe rays).
bool slice_nonempty(const StarBody& body, const ComplexFrame& frame, Offset u);

/// Exit distance of the ray center + r * dir from the body, center inside. A positive
/// `guess` seeds a narrow bracket around it.
double exit_radius(const StarBody& body, std::span<const double> center, std::span<const double> dir,
                   double hi, double guess = 0.0);

}  // namespace cbp
