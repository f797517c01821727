#include "cbp/bodies.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <sstream>

#include "cbp/quadrature.hpp"
#include "cbp/rng.hpp"
#include "cbp/spec_parse.hpp"

namespace cbp {

std::string to_string(Invariance v) {
  switch (v) {
    case Invariance::general:
      return "general";
    case Invariance::complex_rotation:
      return "complex_rotation";
    case Invariance::independent_rotation:
      return "independent_rotation";
  }
  return "?";
}

std::string to_string(Smoothness v) {
  switch (v) {
    case Smoothness::nonsmooth:
      return "nonsmooth";
    case Smoothness::C2:
      return "C2";
    case Smoothness::C_infinity:
      return "C_infinity";
  }
  return "?";
}

namespace {

std::string fmt(double v) { return format_number(v); }

Invariance weaker(Invariance a, Invariance b) { return static_cast<int>(a) < static_cast<int>(b) ? a : b; }

// Random unit vector from a counter-based stream.
void random_unit(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter, std::span<double> out) {
  double s = 0.0;
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = rng::normal(seed, stream, counter * out.size() + c);
    s += out[c] * out[c];
  }
  const double inv = 1.0 / std::sqrt(s);
  for (double& v : out) v *= inv;
}

}  // namespace

double StarBody::norm(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DomainError("norm: expected dimension " + std::to_string(dim_) + ", got " +
                      std::to_string(x.size()));
  double s = 0.0;
  for (double v : x) s += v * v;
  if (!(s > 0.0)) throw DomainError("norm: zero vector");
  return norm_unchecked(x);
}

double StarBody::radial(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim_) throw DomainError("radial: dimension mismatch");
  require_unit(theta, 1e-12, "radial");
  return 1.0 / norm_unchecked(theta);
}

// ---------------------------------------------------------------------------

EuclideanBall::EuclideanBall(int dim) {
  if (dim < 2 || dim > kMaxDim) throw DomainError("ball: unsupported dimension");
  dim_ = dim;
  invariance_ = dim % 2 ? Invariance::general : Invariance::independent_rotation;
  smoothness_ = Smoothness::C_infinity;
  r_min_ = r_max_ = 1.0;
  permutation_symmetric_ = true;
  spec_ = "ball:dim=" + std::to_string(dim);
  gauge_ = Polynomial::norm_squared_power(dim, 1);
}

double EuclideanBall::norm_unchecked(std::span<const double> x) const {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

ComplexLqBall::ComplexLqBall(int n, double q) : q_(q) {
  if (n < 1 || 2 * n > kMaxDim) throw DomainError("clq: unsupported n");
  if (!(q >= 1.0)) throw DomainError("clq: q must be >= 1");
  dim_ = 2 * n;
  invariance_ = Invariance::independent_rotation;
  const bool even_int = q == std::floor(q) && static_cast<long>(q) % 2 == 0;
  smoothness_ = even_int ? Smoothness::C_infinity : (q >= 2.0 ? Smoothness::C2 : Smoothness::nonsmooth);
  // on the unit sphere ||theta||^q = sum s_j^{q/2} with sum s_j = 1
  const double a = std::pow(static_cast<double>(n), 0.5 - 1.0 / q);
  r_min_ = std::min(1.0, a);
  r_max_ = std::max(1.0, a);
  permutation_symmetric_ = true;
  spec_ = "clq:n=" + std::to_string(n) + ",q=" + fmt(q);
  if (even_int && q <= 16) {
    Polynomial p(dim_);
    for (int j = 0; j < n; ++j) {
      Polynomial t = Polynomial::constant(dim_, 1.0);
      for (int e = 0; e < static_cast<int>(q) / 2; ++e) t = t * modulus_squared(n, j);
      p += t;
    }
    gauge_ = p;
  }
}

double ComplexLqBall::norm_unchecked(std::span<const double> x) const {
  const int n = dim_ / 2;
  std::array<double, kMaxDim / 2> m{};
  double mx = 0.0;
  for (int j = 0; j < n; ++j) {
    m[j] = std::hypot(x[2 * j], x[2 * j + 1]);
    mx = std::max(mx, m[j]);
  }
  if (mx == 0.0) return 0.0;
  if (q_ == 2.0) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += m[j] * m[j];
    return std::sqrt(s);
  }
  if (q_ == 4.0) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = m[j] / mx;
      s += (t * t) * (t * t);
    }
    return mx * std::sqrt(std::sqrt(s));
  }
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += std::pow(m[j] / mx, q_);
  return mx * std::pow(s, 1.0 / q_);
}

ScaledBody::ScaledBody(BodyPtr base, double factor) : base_(std::move(base)), factor_(factor) {
  if (!(factor > 0.0)) throw DomainError("scale: factor must be positive");
  dim_ = base_->dim();
  invariance_ = base_->invariance();
  smoothness_ = base_->smoothness();
  r_min_ = factor * base_->r_min();
  r_max_ = factor * base_->r_max();
  permutation_symmetric_ = base_->permutation_symmetric();
  spec_ = "scale:base=(" + base_->spec() + "),factor=" + fmt(factor);
}

double ScaledBody::norm_unchecked(std::span<const double> x) const {
  return base_->norm_unchecked(x) / factor_;
}

PolynomialGaugeBody::PolynomialGaugeBody(Polynomial p, const Meta& meta)
    : poly_(std::move(p)), compiled_(poly_) {
  const int k = poly_.homogeneous_degree();
  if (k <= 0 || k % 2) throw DomainError("gauge polynomial must be homogeneous of positive even degree");
  inv_degree_ = 1.0 / k;
  dim_ = poly_.dim();
  invariance_ = meta.invariance;
  smoothness_ = meta.smoothness;
  r_min_ = meta.r_min;
  r_max_ = meta.r_max;
  permutation_symmetric_ = meta.permutation_symmetric;
  spec_ = meta.spec;
}

double PolynomialGaugeBody::norm_unchecked(std::span<const double> x) const {
  double s = 0.0;
  for (double v : x) s += v * v;
  // evaluate on the unit sphere and restore the scale
  const double r = std::sqrt(s);
  std::array<double, kMaxDim> u{};
  for (int i = 0; i < dim_; ++i) u[i] = x[i] / r;
  const double p = compiled_(std::span<const double>(u.data(), dim_));
  if (!(p > 0.0)) throw DomainError("gauge polynomial is not positive at the given point");
  return r * std::pow(p, inv_degree_);
}

// ---------------------------------------------------------------------------

double sampled_sup_abs(const std::function<double(std::span<const double>)>& g, int dim, int samples) {
  struct Best {
    double v;
    Vec x;
  };
  std::vector<Best> top;
  Vec x(dim);
  for (int i = 0; i < samples; ++i) {
    random_unit(0x5bd1e995, 7, static_cast<std::uint64_t>(i), x);
    const double v = std::abs(g(x));
    if (top.size() < 16 || v > top.back().v) {
      top.push_back({v, x});
      std::sort(top.begin(), top.end(), [](const Best& a, const Best& b) { return a.v > b.v; });
      if (top.size() > 16) top.pop_back();
    }
  }
  // local refinement: coordinate-wise pattern search on the sphere
  double best = top.empty() ? 0.0 : top.front().v;
  for (auto& b : top) {
    double step = 0.05;
    Vec cur = b.x;
    double cv = b.v;
    while (step > 1e-6) {
      bool moved = false;
      for (int c = 0; c < dim; ++c)
        for (double sgn : {1.0, -1.0}) {
          Vec y = cur;
          y[c] += sgn * step;
          y = normalized(y);
          const double v = std::abs(g(y));
          if (v > cv) {
            cv = v;
            cur = y;
            moved = true;
          }
        }
      if (!moved) step *= 0.5;
    }
    best = std::max(best, cv);
  }
  return best;
}

Bump::Bump(Polynomial g, Invariance invariance, std::string id)
    : poly_(std::move(g)), compiled_(poly_), invariance_(invariance), id_(std::move(id)) {
  sup_abs_ = std::min(poly_.coefficient_bound(),
                      sampled_sup_abs([this](std::span<const double> t) { return compiled_(t); },
                                      poly_.dim()));
}

RadialPerturbation::RadialPerturbation(BodyPtr base, double exponent, double eps,
                                       std::shared_ptr<const Bump> bump)
    : base_(std::move(base)), s_(exponent), eps_(eps), bump_(std::move(bump)) {
  if (!(exponent > 0.0)) throw DomainError("perturb: exponent must be positive");
  dim_ = base_->dim();
  if (bump_->polynomial().dim() != dim_) throw DomainError("perturb: bump dimension mismatch");
  const double slack = 1.05 * std::abs(eps) * bump_->sup_abs();
  const double lo = std::pow(base_->r_min(), s_) - slack;
  const double hi = std::pow(base_->r_max(), s_) + slack;
  if (!(lo > 0.0))
    throw DomainError("perturb: radial expression is not positive on the sphere (eps=" + fmt(eps) + ")");
  r_min_ = std::pow(lo, 1.0 / s_);
  r_max_ = std::pow(hi, 1.0 / s_);
  invariance_ = weaker(base_->invariance(), bump_->invariance());
  smoothness_ = base_->smoothness();
  permutation_symmetric_ = false;
  spec_ = "perturb:base=(" + base_->spec() + "),eps=" + fmt(eps) + ",bump=(" + bump_->id() +
          "),exponent=" + fmt(exponent);
}

double RadialPerturbation::norm_unchecked(std::span<const double> x) const {
  double s = 0.0;
  for (double v : x) s += v * v;
  const double r = std::sqrt(s);
  std::array<double, kMaxDim> u{};
  for (int i = 0; i < dim_; ++i) u[i] = x[i] / r;
  const std::span<const double> th(u.data(), dim_);
  const double rho_s = std::pow(base_->norm_unchecked(th), -s_) - eps_ * (*bump_)(th);
  if (!(rho_s > 0.0)) throw DomainError("perturb: radial expression not positive");
  return r * std::pow(rho_s, -1.0 / s_);
}

// ---------------------------------------------------------------------------

UnitaryAveragedBody::UnitaryAveragedBody(BodyPtr base, double width, int maps, std::uint64_t seed)
    : base_(std::move(base)) {
  dim_ = base_->dim();
  if (dim_ % 2) throw DomainError("mollify: unitary averaging needs an even dimension");
  n_ = dim_ / 2;
  const int half = std::max(1, maps / 2);
  for (int m = 0; m < half; ++m) {
    Eigen::MatrixXcd h(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j <= i; ++j) {
        const double re = rng::normal(seed, 100 + m, 2 * (i * n_ + j));
        const double im = i == j ? 0.0 : rng::normal(seed, 100 + m, 2 * (i * n_ + j) + 1);
        h(i, j) = {re, im};
        h(j, i) = std::conj(h(i, j));
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    const double t = (m + 0.5) / half;
    const double w = std::exp(-1.0 / (1.0 - t * t));
    for (double sgn : {1.0, -1.0}) {
      Eigen::VectorXcd ph(n_);
      for (int i = 0; i < n_; ++i)
        ph(i) = std::exp(std::complex<double>(0.0, sgn * width * t * es.eigenvalues()(i) / scale));
      const Eigen::MatrixXcd u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
      for (int r = 0; r < n_; ++r)
        for (int c = 0; c < n_; ++c) {
          const double a = u(r, c).real(), b = u(r, c).imag();
          // (x_c1 + i x_c2) -> row block r of the real 2n x 2n matrix
          mats_.push_back(a);
          mats_.push_back(-b);
          mats_.push_back(b);
          mats_.push_back(a);
        }
      weights_.push_back(w);
    }
  }
  double ws = 0.0;
  for (double w : weights_) ws += w;
  for (double& w : weights_) w /= ws;
  invariance_ = complex_invariant(base_->invariance()) ? Invariance::complex_rotation : Invariance::general;
  smoothness_ = base_->smoothness();
  r_min_ = base_->r_min();
  r_max_ = base_->r_max();
  permutation_symmetric_ = false;
  spec_ = "mollify:base=(" + base_->spec() + "),width=" + fmt(width);
}

double UnitaryAveragedBody::norm_unchecked(std::span<const double> x) const {
  double s = 0.0;
  for (double v : x) s += v * v;
  const double r = std::sqrt(s);
  std::array<double, kMaxDim> u{}, y{};
  for (int i = 0; i < dim_; ++i) u[i] = x[i] / r;
  double rho = 0.0;
  const std::size_t block = 4 * static_cast<std::size_t>(n_) * n_;
  for (std::size_t m = 0; m < weights_.size(); ++m) {
    const double* a = mats_.data() + m * block;
    for (int row = 0; row < n_; ++row) {
      double re = 0.0, im = 0.0;
      for (int c = 0; c < n_; ++c) {
        const double* e = a + 4 * (row * n_ + c);
        re += e[0] * u[2 * c] + e[1] * u[2 * c + 1];
        im += e[2] * u[2 * c] + e[3] * u[2 * c + 1];
      }
      y[2 * row] = re;
      y[2 * row + 1] = im;
    }
    rho += weights_[m] / base_->norm_unchecked(std::span<const double>(y.data(), dim_));
  }
  return r / rho;
}

// ---------------------------------------------------------------------------

double cap_multiplier(int dim, int k, double width) {
  if (!(width > 0.0 && width < kPi)) throw DomainError("cap_multiplier: width out of range");
  const double lam = 0.5 * (dim - 2);
  auto gegenbauer = [&](double t) {
    if (k == 0) return 1.0;
    double c0 = 1.0, c1 = 2.0 * lam * t;
    for (int j = 2; j <= k; ++j) {
      const double c2 = (2.0 * t * (j + lam - 1.0) * c1 - (j + 2.0 * lam - 2.0) * c0) / j;
      c0 = c1;
      c1 = c2;
    }
    return c1;
  };
  const double norm_at_one = gegenbauer(1.0);
  const Rule1d r = gauss_legendre(400, 0.0, width);
  CompensatedSum num, den;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double phi = r.nodes[i];
    const double t = phi / width;
    const double w = r.weights[i] * std::exp(-1.0 / (1.0 - t * t)) * std::pow(std::sin(phi), dim - 2);
    num.add(w * gegenbauer(std::cos(phi)) / norm_at_one);
    den.add(w);
  }
  return num.result() / den.result();
}

BodyPtr mollify(const BodyPtr& body, double width) {
  if (!(width > 0.0 && width < 1.0)) throw DomainError("mollify: width must lie in (0, 1)");
  if (dynamic_cast<const EuclideanBall*>(body.get())) return body;
  if (const auto* sb = dynamic_cast<const ScaledBody*>(body.get()))
    return std::make_shared<ScaledBody>(mollify(sb->base(), width), sb->factor());
  if (const Polynomial* p = body->gauge_polynomial()) {
    const int deg = p->homogeneous_degree();
    const int d = body->dim();
    Polynomial out(d);
    for (const auto& [k, h] : harmonic_decomposition(*p))
      out += cap_multiplier(d, k, width) * (Polynomial::norm_squared_power(d, (deg - k) / 2) * h);
    PolynomialGaugeBody::Meta meta;
    meta.invariance = body->invariance();
    meta.smoothness = Smoothness::C_infinity;
    // the kernel is a probability measure, so the gauge stays within its range on the sphere
    meta.r_min = body->r_min();
    meta.r_max = body->r_max();
    meta.permutation_symmetric = body->permutation_symmetric();
    meta.spec = "mollify:base=(" + body->spec() + "),width=" + fmt(width);
    return std::make_shared<PolynomialGaugeBody>(out.pruned(1e-15), meta);
  }
  return std::make_shared<UnitaryAveragedBody>(body, width);
}

ConvexityReport convexity_probe(const StarBody& body, long samples, std::uint64_t seed, double tol) {
  ConvexityReport rep;
  rep.samples = samples;
  const int d = body.dim();
  Vec a(d), b(d), v(d), mid(d);
  for (long i = 0; i < samples; ++i) {
    const auto c = static_cast<std::uint64_t>(i);
    random_unit(seed, 1, c, a);
    if (i % 2 == 0) {
      random_unit(seed, 2, c, b);
    } else {
      random_unit(seed, 3, c, v);
      const double proj = dot(v, a);
      for (int k = 0; k < d; ++k) v[k] -= proj * a[k];
      v = normalized(v);
      const double sep = std::pow(10.0, -4.0 * rng::uniform(seed, 4, c));
      for (int k = 0; k < d; ++k) b[k] = std::cos(sep) * a[k] + std::sin(sep) * v[k];
    }
    const double ra = body.radial_unchecked(a), rb = body.radial_unchecked(b);
    double s = 0.0;
    for (int k = 0; k < d; ++k) {
      mid[k] = 0.5 * (ra * a[k] + rb * b[k]);
      s += mid[k] * mid[k];
    }
    if (s < 1e-28) continue;
    const double gap = body.norm_unchecked(mid) - 1.0;
    rep.worst_gap = std::max(rep.worst_gap, gap);
    if (gap > tol) ++rep.violations;
  }
  return rep;
}

double radial_distance(const StarBody& a, const StarBody& b, int samples, std::uint64_t seed) {
  if (a.dim() != b.dim()) throw DomainError("radial_distance: dimension mismatch");
  Vec t(a.dim());
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    random_unit(seed, 9, static_cast<std::uint64_t>(i), t);
    m = std::max(m, std::abs(a.radial_unchecked(t) - b.radial_unchecked(t)));
  }
  return m;
}

// ---------------------------------------------------------------------------

std::shared_ptr<const Bump> parse_bump(const std::string& spec) {
  const SpecNode node = parse_spec(spec);
  if (node.kind != "atom") throw SpecError("unknown bump kind '" + node.kind + "' in '" + spec + "'");
  node.require_only({"n", "deg", "index", "family"});
  const int n = node.integer("n"), deg = node.integer("deg"), index = node.integer("index");
  const auto family = parse_harmonic_family(node.text("family", "complex"));
  int seen = 0;
  for (const auto& a : build_invariant_harmonics(n, deg, family)) {
    if (a.degree != deg) continue;
    if (seen++ == index) {
      const Invariance inv = family == HarmonicFamily::complex ? Invariance::complex_rotation
                                                               : Invariance::independent_rotation;
      return std::make_shared<Bump>(a.poly, inv, node.source);
    }
  }
  throw SpecError("bump index out of range in '" + spec + "'");
}

BodyPtr parse_body(const std::string& spec) {
  const SpecNode node = parse_spec(spec);
  if (node.kind == "ball") {
    node.require_only({"dim"});
    return std::make_shared<EuclideanBall>(node.integer("dim"));
  }
  if (node.kind == "clq") {
    node.require_only({"n", "q"});
    return std::make_shared<ComplexLqBall>(node.integer("n"), node.number("q"));
  }
  if (node.kind == "scale") {
    node.require_only({"base", "factor"});
    return std::make_shared<ScaledBody>(parse_body(node.text("base")), node.number("factor"));
  }
  if (node.kind == "mollify") {
    node.require_only({"base", "width"});
    return mollify(parse_body(node.text("base")), node.number("width"));
  }
  if (node.kind == "perturb") {
    node.require_only({"base", "eps", "bump", "exponent"});
    auto base = parse_body(node.text("base"));
    return std::make_shared<RadialPerturbation>(base, node.number("exponent", base->dim() - 2.0),
                                                node.number("eps"), parse_bump(node.text("bump")));
  }
  throw SpecError("unknown body kind '" + node.kind + "' in '" + spec + "'");
}

}  // namespace cbp
