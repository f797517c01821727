#include "cbp/fourier.hpp"

#include <algorithm>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "cbp/sections.hpp"

namespace cbp {

namespace {

void require_invariant(const StarBody& body, const char* route) {
  if (!complex_invariant(body.invariance()))
    throw UnsupportedRouteError(std::string(route) +
                                " route needs a body invariant under the common rotation R_theta");
}

std::string key_of(int j, double p, int n) {
  std::ostringstream os;
  os.precision(17);
  os << "j=" << j << ",p=" << p << ",n=" << n;
  return os.str();
}

// Composite Gauss-Legendre rule over consecutive panel boundaries.
void append_panels(const std::vector<double>& edges, int per_panel, std::vector<double>& t,
                   std::vector<double>& w) {
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    const Rule1d r = gauss_legendre(per_panel, edges[i], edges[i + 1]);
    t.insert(t.end(), r.nodes.begin(), r.nodes.end());
    w.insert(w.end(), r.weights.begin(), r.weights.end());
  }
}

}  // namespace

FtSample ft_derivative_route(const StarBody& body, std::span<const double> xi, int m,
                             const SphereRule& rule, double fd_step) {
  require_invariant(body, "derivative");
  const int n = body.dim() / 2;
  if (m < 0 || !(m < n - 1)) throw DomainError("derivative route: need 0 <= m < n - 1");
  const ComplexFrame frame = make_frame(xi);
  FtSample s;
  s.xi = frame.xi;
  s.p = 2.0 * n - 2.0 * m - 2.0;
  const double factor = (m % 2 ? -1.0 : 1.0) * 4.0 * kPi * (n - m - 1);
  const Estimate d = m == 0 ? section_volume(body, frame, rule) : laplacian_at_zero(body, frame, m, rule, fd_step);
  s.est = factor * d;
  s.est.method = "derivative";
  return s;
}

SectionProfile section_profile(const StarBody& body, std::span<const double> xi, const SphereRule& rule,
                               const FractionalRouteOptions& opt) {
  require_invariant(body, "fractional");
  if (opt.angles < 1) throw DomainError("fractional route: need at least one angle");
  const ComplexFrame frame = make_frame(xi);
  SectionProfile prof;
  prof.xi = frame.xi;
  for (int a = 0; a < opt.angles; ++a) prof.angles.push_back(kPi * a / opt.angles);

  // support radius of the profile by bisection on slice emptiness
  double cutoff = 0.0;
  for (double ang : prof.angles) {
    const double c = std::cos(ang), s = std::sin(ang);
    double lo = 0.0, hi = body.r_max();
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slice_nonempty(body, frame, {mid * c, mid * s}) ? lo : hi) = mid;
    }
    cutoff = std::max(cutoff, hi);
  }
  prof.cutoff = cutoff;
  prof.delta = cutoff * opt.split_fraction;
  for (int i = 1; i <= 5; ++i) prof.head_t.push_back(prof.delta * i / 5.0);

  // panels geometric away from delta, then geometric towards the cutoff
  std::vector<double> edges{prof.delta};
  while (edges.back() * 2.0 < 0.5 * cutoff) edges.push_back(edges.back() * 2.0);
  for (int k = 1; k <= 12; ++k) edges.push_back(cutoff * (1.0 - std::pow(0.5, k)));
  edges.push_back(cutoff);
  append_panels(edges, opt.panel_nodes, prof.mid_t, prof.mid_w);

  for (double ang : prof.angles) {
    const double c = std::cos(ang), s = std::sin(ang);
    std::vector<Offset> offs{{0.0, 0.0}};
    for (double t : prof.head_t) offs.push_back({t * c, t * s});
    for (double t : prof.mid_t) offs.push_back({t * c, t * s});
    prof.values.push_back(parallel_sections(body, frame, offs, rule));
  }
  return prof;
}

Estimate fractional_pairing(const SectionProfile& prof, double q) {
  if (!(q > 0.0 && q < 2.0))
    throw DomainError("fractional route: q must lie in (0, 2); use the derivative route at the endpoints");
  const std::size_t nh = prof.head_t.size(), nm = prof.mid_t.size();
  std::vector<double> coeff(1 + nh + nm, 0.0);
  // head: least-squares fit of c2 t^2 to A(t) - A(0), integrated analytically on [0, delta]
  double den = 0.0;
  for (double t : prof.head_t) den += t * t * t * t;
  const double head_factor = std::pow(prof.delta, 2.0 - q) / (2.0 - q) / den;
  for (std::size_t i = 0; i < nh; ++i) {
    const double t2 = prof.head_t[i] * prof.head_t[i];
    coeff[1 + i] += head_factor * t2;
    coeff[0] -= head_factor * t2;
  }
  for (std::size_t i = 0; i < nm; ++i) {
    const double w = prof.mid_w[i] * std::pow(prof.mid_t[i], -1.0 - q);
    coeff[1 + nh + i] += w;
    coeff[0] -= w;
  }
  coeff[0] -= std::pow(prof.cutoff, -q) / q;
  // circle integral: F(theta + pi) = F(theta), equally spaced angles in [0, pi)
  const double scale = 2.0 * kPi / static_cast<double>(prof.values.size()) / std::tgamma(-0.5 * q);
  std::vector<Estimate> terms;
  std::vector<double> all;
  for (const auto& vals : prof.values)
    for (std::size_t i = 0; i < vals.size(); ++i) {
      terms.push_back(vals[i]);
      all.push_back(scale * coeff[i]);
    }
  Estimate e = linear_combination(terms, all);
  e.method = "fractional";
  return e;
}

FtSample ft_from_profile(const SectionProfile& prof, int n, double q) {
  FtSample s;
  s.xi = prof.xi;
  s.p = 2.0 * n - q - 2.0;
  const double factor = std::pow(2.0, q + 1.0) * std::tgamma(0.5 * (q + 2.0)) * (2.0 * n - q - 2.0);
  s.est = factor * fractional_pairing(prof, q);
  s.est.method = "fractional";
  return s;
}

FtSample ft_fractional_route(const StarBody& body, std::span<const double> xi, double q,
                             const SphereRule& rule, const FractionalRouteOptions& opt) {
  if (!(q > 0.0 && q < 2.0))
    throw DomainError("fractional route: q must lie in (0, 2); use the derivative route at the endpoints");
  return ft_from_profile(section_profile(body, xi, rule, opt), body.dim() / 2, q);
}

// ---------------------------------------------------------------------------

double gaussian_radial_kernel(double a, double sigma, double s) {
  const double z = -s * s / (2.0 * sigma * sigma);
  return 0.5 * std::tgamma(0.5 * a) * std::pow(2.0 / (sigma * sigma), 0.5 * a) *
         boost::math::hypergeometric_1F1(0.5 * a, 0.5, z);
}

// Per-term relative rounding of kernel, weight and shell products.
constexpr double kTermRounding = 16.0 * std::numeric_limits<double>::epsilon();

FtSample pairing_oracle_fn(const std::function<double(std::span<const double>)>& h, int dim,
                           std::span<const double> xi, double p, const SphereRule& rule,
                           const PairingOptions& opt) {
  if (!(p > 0.0 && p < dim)) throw DomainError("pairing oracle: p must lie in (0, dim)");
  if (!(opt.sigma > 0.0 && opt.sigma <= 0.2)) throw DomainError("pairing oracle: sigma must lie in (0, 0.2]");
  if (static_cast<int>(xi.size()) != dim) throw DomainError("pairing oracle: dimension mismatch");
  const double len = norm2(xi);
  const Vec u = normalized(xi);
  const double a = dim - p;

  // Householder reflection sending e_k to u; its other columns span u^perp.
  int k = 0;
  for (int i = 1; i < dim; ++i)
    if (std::abs(u[i]) > std::abs(u[k])) k = i;
  Vec v = u;
  v[k] -= 1.0;
  const double vv = dot(v, v);
  std::vector<Vec> perp_basis;
  for (int c = 0; c < dim; ++c) {
    if (c == k) continue;
    Vec col(dim, 0.0);
    col[c] = 1.0;
    if (vv > 0.0) {
      const double f = 2.0 * v[c] / vv;
      for (int i = 0; i < dim; ++i) col[i] -= f * v[i];
    }
    perp_basis.push_back(col);
  }

  // psi in [0, pi/2] with s = sin(psi); panels geometric from the finest bump scale
  std::vector<double> edges{0.0};
  double step = 0.125 * opt.sigma;
  while (edges.back() + step < 0.5 * kPi) {
    edges.push_back(edges.back() + step);
    step *= opt.panel_ratio;
  }
  edges.push_back(0.5 * kPi);
  std::vector<double> psi, wpsi;
  append_panels(edges, opt.panel_nodes, psi, wpsi);
  const std::size_t np = psi.size();
  std::vector<double> sn(np), cs(np);
  for (std::size_t i = 0; i < np; ++i) {
    sn[i] = std::sin(psi[i]);
    cs[i] = std::cos(psi[i]);
  }

  const auto shell = integrate_sphere_multi(
      rule, dim - 1, static_cast<int>(np), [&](std::span<const double> w, std::span<double> out) {
        std::array<double, kMaxDim> om{}, x{}, y{};
        for (int j = 0; j < dim - 1; ++j)
          for (int c = 0; c < dim; ++c) om[c] += w[j] * perp_basis[j][c];
        // both signs of s per node: odd parts in s cancel sample by sample
        for (std::size_t i = 0; i < np; ++i) {
          for (int c = 0; c < dim; ++c) {
            x[c] = sn[i] * u[c] + cs[i] * om[c];
            y[c] = cs[i] * om[c] - sn[i] * u[c];
          }
          out[i] = 0.5 * (h(std::span<const double>(x.data(), dim)) + h(std::span<const double>(y.data(), dim)));
        }
      });

  // E(sigma) = 2 int_0^{pi/2} cos^{d-2}(psi) R_sigma(|xi| sin psi) H(sin psi) dpsi
  auto coefficients = [&](double sig) {
    std::vector<double> c(np);
    for (std::size_t i = 0; i < np; ++i)
      c[i] = 2.0 * wpsi[i] * std::pow(cs[i], dim - 2) * gaussian_radial_kernel(a, sig, len * sn[i]);
    return c;
  };
  // smoothing width relative to |xi| keeps the oracle homogeneous in xi
  const double sig = opt.sigma * len;
  const auto c1 = coefficients(sig), c2 = coefficients(0.5 * sig);
  std::vector<double> cr(np);
  for (std::size_t i = 0; i < np; ++i) cr[i] = (4.0 * c2[i] - c1[i]) / 3.0;
  const Estimate e1 = linear_combination(shell, c1);
  const Estimate e2 = linear_combination(shell, c2);
  FtSample s;
  s.xi.assign(xi.begin(), xi.end());
  s.p = p;
  s.est = linear_combination(shell, cr);
  // cancellation in the oscillatory sum amplifies per-term rounding
  double magnitude = 0.0;
  for (std::size_t i = 0; i < np; ++i) magnitude += std::abs(cr[i] * shell[i].value);
  s.est.bias = std::hypot(std::abs(e2.value - e1.value) / 15.0, kTermRounding * magnitude);
  s.est.method = "pairing";
  s.flagged = !(s.est.std_err <= 0.1 * std::abs(s.est.value));
  return s;
}

FtSample pairing_oracle(const StarBody& body, std::span<const double> xi, double p,
                        const SphereRule& rule, const PairingOptions& opt) {
  if (static_cast<int>(xi.size()) != body.dim()) throw DomainError("pairing oracle: dimension mismatch");
  return pairing_oracle_fn([&](std::span<const double> t) { return std::pow(body.norm_unchecked(t), -p); },
                           body.dim(), xi, p, rule, opt);
}

bool derivative_reachable(int n, double p, int* m) {
  const double mm = (2.0 * n - 2.0 - p) / 2.0;
  if (mm < 0 || mm != std::floor(mm) || !(mm < n - 1)) return false;
  if (m) *m = static_cast<int>(mm);
  return true;
}

bool fractional_reachable(int n, double p) { return p > 2.0 * n - 4.0 && p < 2.0 * n - 2.0; }

FtSample ft_primary(const StarBody& body, std::span<const double> xi, double p, const SphereRule& rule) {
  const int n = body.dim() / 2;
  int m = 0;
  if (derivative_reachable(n, p, &m)) return ft_derivative_route(body, xi, m, rule);
  if (fractional_reachable(n, p)) return ft_fractional_route(body, xi, 2.0 * n - 2.0 - p, rule);
  std::ostringstream os;
  os << "exponent p=" << p << " is not reachable by the derivative or fractional route in dimension "
     << 2 * n;
  throw UnsupportedRouteError(os.str());
}

// ---------------------------------------------------------------------------

MultiplierTable& MultiplierTable::global() {
  static MultiplierTable t;
  return t;
}

MultiplierRecord MultiplierTable::get(int j, double p, int n, const SphereRule& rule,
                                      const PairingOptions& opt) {
  const std::string key = key_of(j, p, n);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = table_.find(key);
    if (it != table_.end()) return it->second;
  }
  if (j < 0 || j % 2) throw DomainError("multiplier: degree must be even");
  const auto atoms = build_invariant_harmonics(n, j, HarmonicFamily::torus);
  const HarmonicAtom* atom = nullptr;
  for (const auto& a : atoms)
    if (a.degree == j) {
      atom = &a;
      break;
    }
  if (!atom) throw DomainError("multiplier: no invariant harmonic of degree " + std::to_string(j));
  Vec best;
  double best_val = -1.0;
  for (const auto& x : make_grid(2 * n, 8, Reduction::torus).points) {
    const double v = std::abs((*atom)(x));
    if (v > best_val) {
      best_val = v;
      best = x;
    }
  }
  const FtSample s = pairing_oracle_fn(*atom, 2 * n, best, p, rule, opt);
  const double pj = (*atom)(best);
  MultiplierRecord rec;
  rec.value = s.value() / pj;
  rec.std_err = s.error() / std::abs(pj);
  rec.calibrated = true;
  if (!(rec.std_err <= 0.05 * std::abs(rec.value)))
    throw NoisyEstimateError("multiplier " + key + ": calibration error " + std::to_string(rec.std_err) +
                             " exceeds 5% of " + std::to_string(rec.value));
  std::lock_guard<std::mutex> lock(mu_);
  return table_.emplace(key, rec).first->second;
}

void MultiplierTable::preload(int j, double p, int n, double value) {
  std::lock_guard<std::mutex> lock(mu_);
  table_.emplace(key_of(j, p, n), MultiplierRecord{value, 0.0, false});
}

std::map<std::string, MultiplierRecord> MultiplierTable::snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_;
}

void MultiplierTable::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  table_.clear();
}

double multiplier(int j, double p, int n, const SphereRule& rule) {
  return MultiplierTable::global().get(j, p, n, rule).value;
}

// ---------------------------------------------------------------------------

ParsevalReport parseval_check(const StarBody& K, const StarBody& L, double p, int level,
                              const SphereRule& rule) {
  if (K.dim() != L.dim()) throw DomainError("parseval: dimension mismatch");
  if (K.invariance() != Invariance::independent_rotation || L.invariance() != Invariance::independent_rotation)
    throw UnsupportedRouteError("parseval: both bodies must be invariant under independent pair rotations");
  const int d = K.dim(), n = d / 2;
  const double pl = d - p;
  for (double e : {p, pl})
    if (!derivative_reachable(n, e) && !fractional_reachable(n, e))
      throw UnsupportedRouteError("parseval: unreachable exponent pair (" + std::to_string(p) + ", " +
                                  std::to_string(pl) + ")");

  const TorusRule tr = torus_invariant_rule(n, level);
  CompensatedSum lhs;
  double var = 0.0;
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    const FtSample a = ft_primary(K, tr.points[i], p, rule);
    const FtSample b = ft_primary(L, tr.points[i], pl, rule);
    const double w = tr.weights[i];
    lhs.add(w * a.value() * b.value());
    var += std::pow(w * b.value() * a.error(), 2) + std::pow(w * a.value() * b.error(), 2);
  }
  const Estimate rhs = integrate_sphere(rule, d, [&](std::span<const double> t) {
    return std::pow(K.norm_unchecked(t), -p) * std::pow(L.norm_unchecked(t), -pl);
  });
  ParsevalReport rep;
  rep.directions = static_cast<int>(tr.points.size());
  rep.lhs = lhs.result();
  rep.lhs_err = std::sqrt(var);
  const double c = std::pow(2.0 * kPi, d);
  rep.rhs = c * rhs.value;
  rep.rhs_err = c * rhs.total_error();
  rep.rel_gap = std::abs(rep.lhs - rep.rhs) / std::abs(rep.rhs);
  return rep;
}

SphReport sph_identity_check(std::array<double, 2> v, double q, int nodes) {
  if (!(q > -2.0 && q < -1.0)) throw DomainError("sph identity: q must lie in (-2, -1)");
  const double len = std::hypot(v[0], v[1]);
  if (!(len > 0.0)) throw DomainError("sph identity: v must be nonzero");
  const double a = -q - 2.0;
  // split the circle at the zeros of (v, u); on each arc (v, u) = +-|v| sin(tau),
  // and x = cos(tau) turns |sin tau|^a d tau into a Gauss-Jacobi weight
  const double t0 = std::atan2(v[1], v[0]) - 0.5 * kPi;
  const double ab = 0.5 * (a - 1.0);
  const Rule1d r = gauss_jacobi(nodes, ab, ab);
  CompensatedSum integral;
  for (double shift : {0.0, kPi})
    for (int i = 0; i < nodes; ++i) {
      const double x = r.nodes[i];
      const double tau = std::acos(x);
      const double t = t0 + shift + tau;
      const double f = std::pow(std::abs(v[0] * std::cos(t) + v[1] * std::sin(t)), a);
      integral.add(r.weights[i] * f / std::pow(1.0 - x * x, 0.5 * a));
    }
  SphReport rep;
  rep.lhs = std::pow(len, a);
  rep.rhs = std::tgamma(-0.5 * q) / (2.0 * std::tgamma(0.5 * (-q - 1.0)) * std::sqrt(kPi)) * integral.result();
  rep.rel_gap = std::abs(rep.lhs - rep.rhs) / std::abs(rep.lhs);
  return rep;
}

}  // namespace cbp
