#include "cbp/sections.hpp"

#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <optional>
#include <sstream>

namespace cbp {

namespace {

std::string method_tag(const SphereRule& rule) {
  switch (rule.kind()) {
    case RuleKind::monte_carlo:
      return "mc";
    case RuleKind::quasi_monte_carlo:
      return "qmc";
    case RuleKind::product_gauss:
      return "gauss";
  }
  return "?";
}

std::string format_vec(std::span<const double> v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

double norm_at(const StarBody& body, std::span<const double> c, std::span<const double> dir, double r) {
  std::array<double, kMaxDim> y{};
  for (std::size_t i = 0; i < c.size(); ++i) y[i] = c[i] + r * dir[i];
  return body.norm_unchecked(std::span<const double>(y.data(), c.size()));
}

// Interior point of the slice b + H, or nothing if 64 probe rays all miss the body.
std::optional<Vec> slice_center(const StarBody& body, const ComplexFrame& frame, const Vec& b) {
  if (norm2(b) < 1e-300 || body.norm_unchecked(b) < 1.0) return b;
  const int m = static_cast<int>(frame.basis.size());
  const double hi = body.r_max() + norm2(b);
  std::optional<Vec> best;
  double best_val = 1.0;
  for (int k = 0; k < 64; ++k) {
    // probe directions: +-basis vectors, then fixed pseudo-random combinations
    Vec dir(b.size(), 0.0);
    if (k < 2 * m) {
      dir = scaled(frame.basis[k / 2], k % 2 ? -1.0 : 1.0);
    } else {
      for (int j = 0; j < m; ++j) {
        const double c = std::sin(12.9898 * (k + 1) + 78.233 * (j + 1)) * 43758.5453;
        const double w = c - std::floor(c) - 0.5;
        for (std::size_t i = 0; i < dir.size(); ++i) dir[i] += w * frame.basis[j][i];
      }
      dir = normalized(dir);
    }
    // the norm is convex along the ray: golden-section search for its minimum
    double lo = 0.0, up = hi;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = up - g * (up - lo), x2 = lo + g * (up - lo);
    double f1 = norm_at(body, b, dir, x1), f2 = norm_at(body, b, dir, x2);
    for (int it = 0; it < 80 && up - lo > 1e-12 * hi; ++it) {
      if (f1 < f2) {
        up = x2;
        x2 = x1;
        f2 = f1;
        x1 = up - g * (up - lo);
        f1 = norm_at(body, b, dir, x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (up - lo);
        f2 = norm_at(body, b, dir, x2);
      }
    }
    const double r = 0.5 * (lo + up);
    const double v = norm_at(body, b, dir, r);
    if (v < best_val) {
      best_val = v;
      Vec c(b.size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = b[i] + r * dir[i];
      best = c;
    }
  }
  return best;
}

}  // namespace

double exit_radius(const StarBody& body, std::span<const double> center, std::span<const double> dir,
                   double hi, double guess) {
  auto f = [&](double r) { return norm_at(body, center, dir, r) - 1.0; };
  double lo = 0.0, flo = 0.0, up = hi, fup = 0.0;
  bool have_lo = false, have_up = false;
  if (guess > 0.0 && guess < hi) {
    const double w = 1e-2 * guess;
    const double a = guess - w, b = guess + w;
    const double fa = f(a);
    if (fa < 0.0) {
      lo = a;
      flo = fa;
      have_lo = true;
      const double fb = f(b);
      if (fb > 0.0) {
        up = b;
        fup = fb;
        have_up = true;
      } else {
        lo = b;
        flo = fb;
      }
    }
  }
  if (!have_lo) {
    flo = f(0.0);
    if (!(flo < 0.0)) throw RootBracketError("exit_radius: ray center is not inside the body");
  }
  if (!have_up) {
    fup = f(up);
    int grow = 0;
    while (!(fup > 0.0)) {
      if (++grow > 40 || !std::isfinite(fup))
        throw RootBracketError("exit_radius: no sign change along direction " + format_vec(dir) +
                               " on bracket [0, " + std::to_string(up) + "]");
      up *= 2.0;
      fup = f(up);
    }
  }
  std::uintmax_t iters = 200;
  const auto res = boost::math::tools::toms748_solve(f, lo, up, flo, fup,
                                                     boost::math::tools::eps_tolerance<double>(50), iters);
  if (iters >= 200)
    throw RootBracketError("exit_radius: no convergence along direction " + format_vec(dir) + " on bracket [" +
                           std::to_string(lo) + ", " + std::to_string(up) + "]");
  return 0.5 * (res.first + res.second);
}

Estimate volume(const StarBody& body, const SphereRule& rule) {
  const int d = body.dim();
  Estimate e = integrate_sphere(rule, d, [&](std::span<const double> t) {
    return std::pow(body.norm_unchecked(t), -static_cast<double>(d)) / d;
  });
  e.method = method_tag(rule);
  return e;
}

Estimate section_volume(const StarBody& body, const ComplexFrame& frame, const SphereRule& rule) {
  const int k = static_cast<int>(frame.basis.size());
  Estimate e = integrate_subsphere(rule, frame.basis, [&](std::span<const double> t) {
    return std::pow(body.norm_unchecked(t), -static_cast<double>(k)) / k;
  });
  e.method = method_tag(rule);
  return e;
}

std::vector<Estimate> parallel_sections(const StarBody& body, const ComplexFrame& frame,
                                        std::span<const Offset> offsets, const SphereRule& rule) {
  const int d = body.dim();
  const int k = static_cast<int>(frame.basis.size());
  struct Slice {
    bool empty = false;
    bool central = false;
    Vec center;
    double hi = 0.0;
  };
  std::vector<Slice> slices(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const Offset& u = offsets[i];
    Slice& s = slices[i];
    if (u[0] == 0.0 && u[1] == 0.0) {
      s.central = true;
      continue;
    }
    if (std::hypot(u[0], u[1]) >= body.r_max()) {
      s.empty = true;
      continue;
    }
    Vec b(d);
    for (int c = 0; c < d; ++c) b[c] = u[0] * frame.xi[c] + u[1] * frame.xi_perp[c];
    auto center = slice_center(body, frame, b);
    if (!center) {
      s.empty = true;
      continue;
    }
    s.center = *center;
    s.hi = body.r_max() + norm2(s.center);
  }
  const double inv_k = 1.0 / k;
  auto est = integrate_subsphere_multi(
      rule, frame.basis, static_cast<int>(offsets.size()),
      [&](std::span<const double> t, std::span<double> out) {
        double rho = -1.0, prev1 = 0.0, prev2 = 0.0;
        std::array<double, kMaxDim> neg{};
        for (std::size_t i = 0; i < slices.size(); ++i) {
          const Slice& s = slices[i];
          if (s.empty) {
            out[i] = 0.0;
          } else if (s.central) {
            if (rho < 0.0) rho = 1.0 / body.norm_unchecked(t);
            out[i] = std::pow(rho, k) * inv_k;
          } else {
            // r(-u, t) = r(u, -t): averaging both signs makes each node even in u
            for (int c = 0; c < d; ++c) neg[c] = -t[c];
            const double r1 = exit_radius(body, s.center, t, s.hi, prev1);
            const double r2 = exit_radius(body, s.center, std::span<const double>(neg.data(), d), s.hi, prev2);
            prev1 = r1;
            prev2 = r2;
            out[i] = 0.5 * (std::pow(r1, k) + std::pow(r2, k)) * inv_k;
          }
        }
      });
  for (auto& e : est) e.method = method_tag(rule);
  return est;
}

Estimate parallel_section(const StarBody& body, const ComplexFrame& frame, Offset u,
                          const SphereRule& rule) {
  const std::array<Offset, 1> one{u};
  return parallel_sections(body, frame, one, rule).front();
}

bool slice_nonempty(const StarBody& body, const ComplexFrame& frame, Offset u) {
  if (std::hypot(u[0], u[1]) >= body.r_max()) return false;
  Vec b(body.dim());
  for (int c = 0; c < body.dim(); ++c) b[c] = u[0] * frame.xi[c] + u[1] * frame.xi_perp[c];
  return slice_center(body, frame, b).has_value();
}

double default_fd_step(const StarBody& body, int m) {
  return (m == 1 ? 0.05 : 0.1) * body.r_min();
}

Estimate laplacian_at_zero(const StarBody& body, const ComplexFrame& frame, int m,
                           const SphereRule& rule, double h) {
  const int n = body.dim() / 2;
  if (m != 1 && m != 2) throw DomainError("laplacian_at_zero: order must be 1 or 2");
  if (!(m < n - 1)) throw DomainError("laplacian_at_zero: order must satisfy m < n - 1");
  if (body.smoothness() == Smoothness::nonsmooth)
    throw DomainError("laplacian_at_zero: body must be at least C2");
  if (h <= 0.0) h = default_fd_step(body, m);

  // Offsets up to the symmetry A(-u) = A(u); both steps share the origin.
  std::vector<Offset> offs{{0.0, 0.0}};
  std::vector<std::vector<double>> coeff;  // per step, coefficients over offs
  for (double s : {h, 0.5 * h}) {
    std::vector<double> c;
    auto add = [&](Offset u, double w) {
      auto it = std::find(offs.begin(), offs.end(), u);
      std::size_t idx = static_cast<std::size_t>(it - offs.begin());
      if (it == offs.end()) offs.push_back(u);
      if (c.size() < offs.size()) c.resize(offs.size(), 0.0);
      c[idx] += w;
    };
    if (m == 1) {
      const double w = 1.0 / (s * s);
      add({0, 0}, -4 * w);
      add({s, 0}, 2 * w);
      add({0, s}, 2 * w);
    } else {
      const double w = 1.0 / (s * s * s * s);
      add({0, 0}, 20 * w);
      add({s, 0}, -16 * w);
      add({0, s}, -16 * w);
      add({s, s}, 4 * w);
      add({s, -s}, 4 * w);
      add({2 * s, 0}, 2 * w);
      add({0, 2 * s}, 2 * w);
    }
    coeff.push_back(std::move(c));
  }
  for (auto& c : coeff) c.resize(offs.size(), 0.0);
  const auto a = parallel_sections(body, frame, offs, rule);
  const Estimate d_h = linear_combination(a, coeff[0]);
  const Estimate d_h2 = linear_combination(a, coeff[1]);
  std::vector<double> rich(offs.size());
  for (std::size_t i = 0; i < offs.size(); ++i) rich[i] = (4.0 * coeff[1][i] - coeff[0][i]) / 3.0;
  Estimate out = linear_combination(a, rich);
  out.bias = std::abs(d_h2.value - d_h.value) / 15.0;
  out.method = a.front().method + "+fd";
  if (!(out.std_err <= 0.25 * std::abs(out.value)))
    throw NoisyEstimateError("laplacian_at_zero: standard error " + std::to_string(out.std_err) +
                             " exceeds 25% of the estimate " + std::to_string(out.value) +
                             "; increase the node count");
  return out;
}

}  // namespace cbp
