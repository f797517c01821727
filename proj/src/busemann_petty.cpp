#include "cbp/busemann_petty.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cbp/fourier.hpp"
#include "cbp/harmonics.hpp"
#include "cbp/spec_parse.hpp"

namespace cbp {

std::string to_string(BpVerdict v) {
  switch (v) {
    case BpVerdict::consistent:
      return "consistent";
    case BpVerdict::violation:
      return "violation";
    case BpVerdict::not_dominated:
      return "not_dominated";
  }
  return "?";
}

BpReport bp_verify(const StarBody& K, const StarBody& L, const DirectionGrid& grid, const BpRules& rules) {
  if (K.dim() != L.dim()) throw DomainError("bp_verify: dimension mismatch");
  if (!complex_invariant(K.invariance()) || !complex_invariant(L.invariance()))
    throw UnsupportedRouteError("bp_verify: both bodies must be invariant under R_theta");
  require_compatible(K, grid);
  require_compatible(L, grid);
  const int d = K.dim();
  const int k = d - 2;
  BpReport rep;
  rep.k_spec = K.spec();
  rep.l_spec = L.spec();
  rep.grid = grid.spec();

  bool dominated = true;
  for (const Vec& xi : grid.points) {
    const ComplexFrame frame = make_frame(xi);
    const auto est = integrate_subsphere_multi(rules.sections, frame.basis, 3,
                                               [&](std::span<const double> t, std::span<double> out) {
                                                 const double a = std::pow(K.norm_unchecked(t), -k) / k;
                                                 const double b = std::pow(L.norm_unchecked(t), -k) / k;
                                                 out[0] = a;
                                                 out[1] = b;
                                                 out[2] = a - b;
                                               });
    SectionGap g;
    g.xi = xi;
    g.a_k = est[0].value;
    g.a_l = est[1].value;
    g.gap = est[2];
    const double err = g.gap.total_error();
    if (rep.gaps.empty() || g.gap.value > rep.max_gap) {
      rep.max_gap = g.gap.value;
      rep.max_gap_err = err;
      rep.max_gap_xi = xi;
    }
    if (g.gap.value > 3.0 * err) dominated = false;
    if (err > 0.0 && std::abs(g.gap.value) <= 3.0 * err) rep.tie = true;
    rep.gaps.push_back(std::move(g));
  }

  const auto vol = integrate_sphere_multi(rules.volume, d, 3, [&](std::span<const double> t, std::span<double> out) {
    const double a = std::pow(K.norm_unchecked(t), -d) / d;
    const double b = std::pow(L.norm_unchecked(t), -d) / d;
    out[0] = a;
    out[1] = b;
    out[2] = a - b;
  });
  rep.vol_k = vol[0];
  rep.vol_l = vol[1];
  rep.vol_diff = vol[2];

  if (rep.tie) {
    rep.flags.push_back("tie");
    rep.verdict = BpVerdict::not_dominated;
  } else if (!dominated) {
    rep.verdict = BpVerdict::not_dominated;
  } else if (rep.vol_diff.value > 3.0 * rep.vol_diff.total_error()) {
    rep.verdict = BpVerdict::violation;
  } else {
    rep.verdict = BpVerdict::consistent;
  }
  return rep;
}

HolderReport holder_chain_check(const StarBody& K, const StarBody& L, const SphereRule& rule) {
  if (K.dim() != L.dim()) throw DomainError("holder_chain_check: dimension mismatch");
  const int d = K.dim();
  const double n = d / 2;
  const auto est = integrate_sphere_multi(rule, d, 3, [&](std::span<const double> t, std::span<double> out) {
    const double rk = 1.0 / K.norm_unchecked(t);
    const double rl = 1.0 / L.norm_unchecked(t);
    out[0] = std::pow(rk, d);
    out[1] = std::pow(rl, d - 2) * rk * rk;
    out[2] = std::pow(rl, d);
  });
  HolderReport rep;
  rep.vol_term = est[0];
  rep.mixed_term = est[1];
  const double vk = est[0].value, vl = est[2].value;
  rep.bound = std::pow(vl, (n - 1) / n) * std::pow(vk, 1 / n);
  const std::array<double, 3> c1{-1.0, 1.0, 0.0};
  rep.slack_sections = linear_combination(est, c1);
  // linearized error of the bound; the value itself is exact
  const std::array<double, 3> c2{rep.bound / (n * vk), -1.0, rep.bound * (n - 1) / (n * vl)};
  rep.slack_holder = linear_combination(est, c2);
  rep.slack_holder.value = rep.bound - rep.mixed_term.value;
  // equality cases leave only rounding in the slacks
  const double round = 1e-12 * rep.vol_term.value;
  rep.ok = rep.slack_sections.value >= -3.0 * rep.slack_sections.total_error() - round &&
           rep.slack_holder.value >= -3.0 * rep.slack_holder.total_error() - round;
  return rep;
}

namespace {

std::string fnv_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Terms that survive on the slice x_{2j+1} = 0 holding the torus rule points.
CompiledPolynomial on_moduli(const Polynomial& p) {
  Polynomial r(p.dim());
  for (const auto& [e, c] : p.terms()) {
    bool keep = true;
    for (std::size_t i = 1; i < e.size(); i += 2) keep = keep && e[i] == 0;
    if (keep) r.add_term(e, c);
  }
  return CompiledPolynomial(r);
}

// Multiplier transform at exponent 2: harmonic pieces of a degree-D polynomial are scaled
// by lambda(k, 2, n) and returned as one homogeneous polynomial of degree D.
Polynomial multiplier_transform(const Polynomial& f, const std::map<int, double>& lambda) {
  const int deg = f.homogeneous_degree();
  Polynomial out(f.dim());
  for (const auto& [k, h] : harmonic_decomposition(f))
    out += lambda.at(k) * (Polynomial::norm_squared_power(f.dim(), (deg - k) / 2) * h);
  return out;
}

}  // namespace

std::shared_ptr<const RadialPerturbation> make_perturbed(const BodyPtr& L, const Polynomial& g, double eps,
                                                         int n) {
  auto bump = std::make_shared<Bump>(g, Invariance::independent_rotation, "poly:fnv=" + fnv_hex(g.to_string()));
  return std::make_shared<RadialPerturbation>(L, 2.0 * n - 2.0, eps, bump);
}

Construction bp_construct(const ConstructOptions& opt) {
  if (opt.n < 2) throw DomainError("bp_construct: need n >= 2");
  if (opt.max_degree < 2 || opt.max_degree % 2 || 2 * opt.max_degree > 8)
    throw DomainError("bp_construct: max_degree must be 2 or 4");
  const int n = opt.n, d = 2 * n, J = opt.max_degree;
  Construction out;
  out.options = opt;
  out.L = mollify(std::make_shared<ComplexLqBall>(n, opt.q_body), opt.width);
  const StarBody& L = *out.L;

  // (1) locate negativity of (||x||_L^{-2})^
  const DirectionGrid grid = make_grid(d, opt.grid_resolution, Reduction::orbit, opt.grid_seed);
  out.scan = scan(L, 2.0, grid, opt.scan);
  if (out.scan.conclusion != Conclusion::negativity_witness)
    throw ConstructionError("no negativity region: scan of " + L.spec() + " at p=2 returned " +
                            to_string(out.scan.conclusion));

  // (2) f = (sum c_j P_j)^2 minimizing int rho_L^2 T(f) / int f over invariant atoms
  const auto atoms = build_invariant_harmonics(n, J, HarmonicFamily::torus);
  std::vector<Polynomial> Q;
  for (const auto& a : atoms) {
    Q.push_back(Polynomial::norm_squared_power(d, (J - a.degree) / 2) * a.poly);
    out.atoms.push_back(a.label);
  }
  for (int k = 0; k <= 2 * J; k += 2)
    out.multipliers[k] = MultiplierTable::global().get(k, 2.0, n, opt.multiplier_rule).value;

  const TorusRule tr = torus_invariant_rule(n, opt.simplex_level);
  std::vector<double> rho2(tr.points.size());
  double rho2_int = 0.0;
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    rho2[i] = std::pow(L.norm_unchecked(tr.points[i]), -2.0);
    rho2_int += tr.weights[i] * rho2[i];
  }
  auto integrate = [&](const Polynomial& p, bool weighted) {
    const CompiledPolynomial c = on_moduli(p);
    double s = 0.0;
    for (std::size_t i = 0; i < tr.points.size(); ++i)
      s += tr.weights[i] * (weighted ? rho2[i] : 1.0) * c(tr.points[i]);
    return s;
  };
  const int m = static_cast<int>(Q.size());
  Eigen::MatrixXd M(m, m), N(m, m);
  for (int j = 0; j < m; ++j)
    for (int l = j; l < m; ++l) {
      const Polynomial prod = Q[j] * Q[l];
      M(j, l) = M(l, j) = integrate(multiplier_transform(prod, out.multipliers), true);
      N(j, l) = N(l, j) = integrate(prod, false);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(M, N);
  out.min_eigenvalue = es.eigenvalues()(0);
  if (!(out.min_eigenvalue < 0.0)) {
    std::ostringstream os;
    os << "no negativity region: smallest pairing eigenvalue " << out.min_eigenvalue << " is not negative";
    throw ConstructionError(os.str());
  }
  const Eigen::VectorXd c = es.eigenvectors().col(0);
  out.verify_grid = make_grid(d, opt.verify_resolution, Reduction::torus, opt.grid_seed);
  Polynomial base(d);
  for (int j = 0; j < m; ++j) {
    out.coefficients.push_back(c(j));
    base += c(j) * Q[j];
  }
  // positive floor keeps every central section strictly smaller
  out.floor = opt.floor_fraction * std::abs(out.min_eigenvalue) / (out.multipliers.at(0) * rho2_int);
  out.f = base * base + out.floor * Polynomial::norm_squared_power(d, J);
  out.g = multiplier_transform(out.f, out.multipliers).pruned(0.0);
  out.predicted_pairing = integrate(out.g, true);

  // (3) eps: halve until K is a convex body and the verifier reports the violation
  const double gsup = sampled_sup_abs(CompiledPolynomial(out.g), d);
  double eps = 0.5 * std::pow(L.r_min(), d - 2) / gsup;
  std::ostringstream trace;
  for (int attempt = 0; attempt <= opt.max_halvings; ++attempt, eps *= 0.5) {
    std::ostringstream step;
    step << "eps=" << format_number(eps) << ": ";
    std::shared_ptr<const RadialPerturbation> K;
    try {
      K = make_perturbed(out.L, out.g, eps, n);
    } catch (const DomainError& e) {
      step << e.what();
      out.eps_trace.push_back(step.str());
      continue;
    }
    const ConvexityReport cr = convexity_probe(*K, opt.convexity_samples, opt.convexity_seed);
    if (cr.violations > 0) {
      step << cr.violations << " convexity violations (worst gap " << cr.worst_gap << ")";
      out.eps_trace.push_back(step.str());
      continue;
    }
    BpReport rep = bp_verify(*K, L, out.verify_grid, opt.verify);
    step << "verdict " << to_string(rep.verdict) << ", max gap " << rep.max_gap << " +- " << rep.max_gap_err
         << ", volume gain " << rep.vol_diff.value << " +- " << rep.vol_diff.total_error();
    out.eps_trace.push_back(step.str());
    if (rep.verdict == BpVerdict::violation) {
      out.K = K;
      out.eps = eps;
      out.report = std::move(rep);
      return out;
    }
  }
  std::ostringstream os;
  os << "construction failed: coefficients (";
  for (std::size_t i = 0; i < out.coefficients.size(); ++i) os << (i ? ", " : "") << out.coefficients[i];
  os << "); eps trace:";
  for (const auto& s : out.eps_trace) os << " [" << s << "]";
  throw ConstructionError(os.str());
}

}  // namespace cbp
