#include "cbp/frames.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "cbp/rng.hpp"
#include "cbp/spec_parse.hpp"

namespace cbp {

namespace {

void require_even(std::size_t n, const char* what) {
  if (n % 2 || n == 0) throw DomainError(std::string(what) + ": dimension must be even");
}

}  // namespace

Vec perp(std::span<const double> x) {
  require_even(x.size(), "perp");
  Vec y(x.size());
  for (std::size_t j = 0; j < x.size(); j += 2) {
    y[j] = -x[j + 1];
    y[j + 1] = x[j];
  }
  return y;
}

Vec rotate(std::span<const double> x, double theta) {
  require_even(x.size(), "rotate");
  const double c = std::cos(theta), s = std::sin(theta);
  Vec y(x.size());
  for (std::size_t j = 0; j < x.size(); j += 2) {
    y[j] = c * x[j] - s * x[j + 1];
    y[j + 1] = s * x[j] + c * x[j + 1];
  }
  return y;
}

double orbit_distance(std::span<const double> a, std::span<const double> b) {
  const Vec bp = perp(b);
  const double h = std::hypot(dot(a, b), dot(a, bp));
  return std::sqrt(std::max(0.0, dot(a, a) + dot(b, b) - 2.0 * h));
}

ComplexFrame make_frame(std::span<const double> xi) {
  require_unit(xi, 1e-12, "make_frame");
  ComplexFrame f;
  f.xi.assign(xi.begin(), xi.end());
  f.xi_perp = perp(xi);
  const std::size_t d = xi.size();
  std::vector<Vec> done{f.xi, f.xi_perp};
  // complete with coordinate seeds, taking the largest residual first
  while (done.size() < d) {
    Vec best;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < d; ++i) {
      Vec v(d, 0.0);
      v[i] = 1.0;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : done) {
          const double c = dot(v, u);
          for (std::size_t k = 0; k < d; ++k) v[k] -= c * u[k];
        }
      const double nv = norm2(v);
      if (nv > best_norm) {
        best_norm = nv;
        best = v;
      }
    }
    best = scaled(best, 1.0 / best_norm);
    done.push_back(best);
    f.basis.push_back(best);
  }
  return f;
}

Reduction parse_reduction(const std::string& s) {
  if (s == "none") return Reduction::none;
  if (s == "phase") return Reduction::phase;
  if (s == "torus") return Reduction::torus;
  if (s == "orbit") return Reduction::orbit;
  throw SpecError("unknown grid reduction '" + s + "'");
}

std::string to_string(Reduction r) {
  switch (r) {
    case Reduction::none:
      return "none";
    case Reduction::phase:
      return "phase";
    case Reduction::torus:
      return "torus";
    case Reduction::orbit:
      return "orbit";
  }
  return "?";
}

std::string DirectionGrid::spec() const {
  std::ostringstream os;
  os << "grid:dim=" << dim << ",res=" << resolution << ",reduce=" << to_string(reduction)
     << ",seed=" << seed;
  return os.str();
}

namespace {

std::vector<Vec> quasi_uniform(int dim, int count, std::uint64_t seed) {
  // Kronecker sequence through the inverse normal map
  double phi = 2.0;
  for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
  std::vector<double> alpha(dim), u(dim);
  double p = 1.0;
  for (int c = 0; c < dim; ++c) {
    p /= phi;
    alpha[c] = p - std::floor(p);
    u[c] = rng::uniform(seed, 0x6e1d, c);
  }
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Vec x(dim);
    for (int c = 0; c < dim; ++c) {
      u[c] += alpha[c];
      u[c] -= std::floor(u[c]);
      x[c] = rng::inverse_normal_cdf(std::clamp(u[c], 1e-300, 1.0 - 1e-16));
    }
    pts.push_back(normalized(x));
  }
  return pts;
}

}  // namespace

DirectionGrid make_grid(int dim, int resolution, Reduction reduction, std::uint64_t seed) {
  if (dim < 2 || dim % 2 || dim > kMaxDim) throw DomainError("make_grid: dimension must be even");
  if (resolution < 8) throw DomainError("make_grid: resolution must be >= 8");
  DirectionGrid g;
  g.dim = dim;
  g.resolution = resolution;
  g.reduction = reduction;
  g.seed = seed;
  const int n = dim / 2;
  if (reduction == Reduction::none || reduction == Reduction::phase) {
    g.points = quasi_uniform(dim, resolution, seed);
    if (reduction == Reduction::phase)
      for (auto& x : g.points) {
        const double t = std::atan2(x[1], x[0]);
        x = rotate(x, -t);
        x[1] = 0.0;
        x = normalized(x);
      }
    return g;
  }
  std::set<std::vector<int>> seen;
  std::vector<int> idx(n, 0);
  std::function<void(int, int)> rec = [&](int j, int left) {
    if (j == n - 1) {
      idx[j] = left;
      std::vector<int> key = idx;
      if (reduction == Reduction::orbit) std::sort(key.rbegin(), key.rend());
      if (!seen.insert(key).second) return;
      Vec x(dim, 0.0);
      for (int k = 0; k < n; ++k) x[2 * k] = std::sqrt(static_cast<double>(key[k]) / resolution);
      g.points.push_back(normalized(x));
      return;
    }
    for (int v = left; v >= 0; --v) {
      idx[j] = v;
      rec(j + 1, left - v);
    }
  };
  rec(0, resolution);
  return g;
}

DirectionGrid parse_grid(const std::string& spec) {
  const SpecNode node = parse_spec(spec);
  if (node.kind != "grid") throw SpecError("expected a grid spec, got '" + node.kind + "'");
  node.require_only({"dim", "res", "reduce", "seed"});
  return make_grid(node.integer("dim"), node.integer("res"),
                   parse_reduction(node.text("reduce", "none")),
                   static_cast<std::uint64_t>(node.number("seed", 0.0)));
}

}  // namespace cbp
