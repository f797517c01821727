#include "cbp/embedding.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace cbp {

std::string to_string(Conclusion c) {
  switch (c) {
    case Conclusion::nonnegative_up_to_tol:
      return "nonnegative_up_to_tol";
    case Conclusion::negativity_witness:
      return "negativity_witness";
    case Conclusion::inconclusive:
      return "inconclusive";
  }
  return "?";
}

void require_compatible(const StarBody& body, const DirectionGrid& grid) {
  if (grid.dim != body.dim())
    throw DomainError("grid dimension " + std::to_string(grid.dim) + " does not match body dimension " +
                      std::to_string(body.dim()));
  switch (grid.reduction) {
    case Reduction::none:
      return;
    case Reduction::phase:
      if (!complex_invariant(body.invariance()))
        throw DomainError("grid reduction 'phase' needs a body invariant under R_theta");
      return;
    case Reduction::torus:
      if (body.invariance() != Invariance::independent_rotation)
        throw DomainError("grid reduction 'torus' needs a body invariant under independent pair rotations");
      return;
    case Reduction::orbit:
      if (body.invariance() != Invariance::independent_rotation || !body.permutation_symmetric())
        throw DomainError(
            "grid reduction 'orbit' needs independent pair rotations and permutation symmetry of the pairs");
      return;
  }
}

namespace {

template <class F>
std::optional<FtSample> with_refinement(const SphereRule& rule, int max_refine, F&& eval) {
  SphereRule r = rule;
  for (int attempt = 0;; ++attempt) {
    try {
      return eval(r);
    } catch (const NoisyEstimateError&) {
      if (attempt >= max_refine) return std::nullopt;
      r = r.refined(4);
    }
  }
}

// Primary-route samples at one direction for every exponent.
std::vector<GridValue> evaluate_direction(const StarBody& body, const Vec& xi, const std::vector<double>& ps,
                                          const ScanRules& rules) {
  const int n = body.dim() / 2;
  std::vector<GridValue> out(ps.size());
  std::optional<SectionProfile> profile;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double p = ps[i];
    out[i].xi = xi;
    int m = 0;
    std::optional<FtSample> s;
    if (derivative_reachable(n, p, &m)) {
      s = with_refinement(rules.primary, rules.max_refine,
                          [&](const SphereRule& r) { return ft_derivative_route(body, xi, m, r); });
    } else if (fractional_reachable(n, p)) {
      if (!profile) profile = section_profile(body, xi, rules.primary);
      s = ft_from_profile(*profile, n, 2.0 * n - 2.0 - p);
    } else {
      std::ostringstream os;
      os << "exponent p=" << p << " is not reachable by the derivative or fractional route in dimension "
         << body.dim();
      throw UnsupportedRouteError(os.str());
    }
    if (s) {
      out[i].sample = *s;
    } else {
      out[i].noisy = true;
      out[i].sample.xi = xi;
      out[i].sample.p = p;
      out[i].sample.est.value = std::numeric_limits<double>::quiet_NaN();
      out[i].sample.est.std_err = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

EmbeddingVerdict decide(const StarBody& body, double p, const DirectionGrid& grid, std::vector<GridValue> values,
                        const ScanRules& rules) {
  EmbeddingVerdict v;
  v.body = body.spec();
  v.p = p;
  v.grid = grid.spec();
  std::size_t noisy = 0, arg = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const GridValue& g = values[i];
    if (g.noisy) {
      ++noisy;
      continue;
    }
    if (arg == values.size() || g.sample.value() < values[arg].sample.value()) arg = i;
  }
  v.values = std::move(values);
  if (arg == v.values.size()) {
    v.diagnostics.push_back("no grid value could be resolved");
    return v;
  }
  const FtSample& best = v.values[arg].sample;
  v.min_value = best.value();
  v.min_stderr = best.error();
  v.argmin = v.values[arg].xi;

  // second route at the argmin
  v.agreement.primary = best;
  v.agreement.confirm = pairing_oracle(body, v.argmin, p, rules.confirm, rules.pairing);
  const double comb = std::hypot(best.error(), v.agreement.confirm.error());
  v.agreement.gap_sigmas = std::abs(best.value() - v.agreement.confirm.value()) / comb;
  v.agreement.agree = v.agreement.gap_sigmas <= 5.0;

  std::ostringstream os;
  if (!v.agreement.agree) {
    os << "routes disagree at the argmin: " << best.method() << " " << best.value() << " +- " << best.error()
       << " vs pairing " << v.agreement.confirm.value() << " +- " << v.agreement.confirm.error() << " ("
       << v.agreement.gap_sigmas << " combined errors)";
    v.diagnostics.push_back(os.str());
    return v;
  }
  const FtSample& conf = v.agreement.confirm;
  if (v.min_value < -3.0 * v.min_stderr) {
    if (conf.value() < -3.0 * conf.error() && !conf.flagged) {
      v.conclusion = Conclusion::negativity_witness;
    } else {
      os << "pairing oracle does not confirm the negative minimum (" << conf.value() << " +- " << conf.error()
         << ")";
      v.diagnostics.push_back(os.str());
    }
    return v;
  }
  if (noisy > 0) {
    os << noisy << " grid values remained noisy after " << rules.max_refine << " refinements";
    v.diagnostics.push_back(os.str());
    return v;
  }
  v.conclusion = Conclusion::nonnegative_up_to_tol;
  return v;
}

}  // namespace

EmbeddingVerdict scan(const StarBody& body, double p, const DirectionGrid& grid, const ScanRules& rules) {
  return embedding_interval(body, {p}, grid, rules).at(p);
}

std::map<double, EmbeddingVerdict> embedding_interval(const StarBody& body, const std::vector<double>& p_list,
                                                      const DirectionGrid& grid, const ScanRules& rules) {
  require_compatible(body, grid);
  if (!complex_invariant(body.invariance()))
    throw UnsupportedRouteError("scan needs two routes; the body is not invariant under R_theta");
  if (grid.points.empty()) throw DomainError("scan: empty grid");
  std::vector<std::vector<GridValue>> per_p(p_list.size());
  for (const Vec& xi : grid.points) {
    auto vals = evaluate_direction(body, xi, p_list, rules);
    for (std::size_t i = 0; i < p_list.size(); ++i) per_p[i].push_back(std::move(vals[i]));
  }
  std::map<double, EmbeddingVerdict> out;
  for (std::size_t i = 0; i < p_list.size(); ++i)
    out.emplace(p_list[i], decide(body, p_list[i], grid, std::move(per_p[i]), rules));
  return out;
}

}  // namespace cbp
