#include "cbp/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "cbp/rng.hpp"
#include "cbp/spec_parse.hpp"

namespace cbp {

// ---------------------------------------------------------------------------
// Estimates

Estimate from_batches(std::vector<double> batches, long nodes, std::string method) {
  Estimate e;
  e.nodes = nodes;
  e.method = std::move(method);
  const auto b = static_cast<double>(batches.size());
  if (batches.empty()) return e;
  e.value = kahan_reduce(batches) / b;
  if (batches.size() > 1) {
    CompensatedSum ss;
    for (double v : batches) ss.add((v - e.value) * (v - e.value));
    e.std_err = std::sqrt(ss.result() / (b - 1.0) / b);
  }
  e.batches = std::move(batches);
  return e;
}

Estimate exact_estimate(double value, long nodes, std::string method) {
  Estimate e;
  e.value = value;
  e.nodes = nodes;
  e.method = std::move(method);
  return e;
}

namespace {

bool is_constant(const Estimate& e) { return e.batches.empty() && e.std_err == 0.0; }

}  // namespace

Estimate linear_combination(std::span<const Estimate> terms, std::span<const double> coeffs) {
  if (terms.size() != coeffs.size()) throw DomainError("linear_combination: size mismatch");
  if (terms.empty()) return {};
  std::size_t nb = 0;
  bool paired = true;
  for (const auto& t : terms) {
    if (is_constant(t)) continue;
    if (t.batches.empty()) {
      paired = false;
      break;
    }
    if (nb == 0) nb = t.batches.size();
    if (t.batches.size() != nb) paired = false;
  }
  long nodes = 0;
  double bias = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    nodes = std::max(nodes, terms[i].nodes);
    bias += std::abs(coeffs[i]) * terms[i].bias;
  }
  Estimate out;
  if (paired && nb > 0) {
    std::vector<double> b(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      CompensatedSum s;
      for (std::size_t i = 0; i < terms.size(); ++i)
        s.add(coeffs[i] * (terms[i].batches.empty() ? terms[i].value : terms[i].batches[k]));
      b[k] = s.result();
    }
    out = from_batches(std::move(b), nodes, terms.front().method);
  } else {
    CompensatedSum s;
    double var = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      s.add(coeffs[i] * terms[i].value);
      var += coeffs[i] * coeffs[i] * terms[i].std_err * terms[i].std_err;
    }
    out.value = s.result();
    out.std_err = std::sqrt(var);
    out.nodes = nodes;
    out.method = terms.front().method;
  }
  out.bias = bias;
  return out;
}

Estimate operator+(const Estimate& a, const Estimate& b) {
  const std::array<Estimate, 2> t{a, b};
  const std::array<double, 2> c{1.0, 1.0};
  return linear_combination(t, c);
}

Estimate operator-(const Estimate& a, const Estimate& b) {
  const std::array<Estimate, 2> t{a, b};
  const std::array<double, 2> c{1.0, -1.0};
  return linear_combination(t, c);
}

Estimate operator*(double s, const Estimate& a) {
  Estimate r = a;
  r.value *= s;
  r.std_err *= std::abs(s);
  r.bias *= std::abs(s);
  for (double& v : r.batches) v *= s;
  return r;
}

double combined_error(const Estimate& a, const Estimate& b) {
  return (a - b).std_err;
}

double kahan_reduce(std::span<const double> partials) {
  CompensatedSum s;
  for (double v : partials) s.add(v);
  return s.result();
}

// ---------------------------------------------------------------------------
// 1-D rules

Rule1d gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  Rule1d r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) {
        // one more evaluation of the derivative at the converged node
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
    r.nodes[i] = mid - half * z;
    r.nodes[n - 1 - i] = mid + half * z;
    r.weights[i] = w * half;
    r.weights[n - 1 - i] = w * half;
  }
  return r;
}

Rule1d gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1 || alpha <= -1.0 || beta <= -1.0) throw DomainError("gauss_jacobi: bad parameters");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double d = 2.0 * k + ab;
    J(k, k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (d * (d + 2.0));
    if (k > 0) {
      const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
      const double den = d * d * (d + 1.0) * (d - 1.0);
      J(k, k - 1) = J(k - 1, k) = std::sqrt(num / den);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  Rule1d r;
  for (int k = 0; k < n; ++k) {
    r.nodes.push_back(es.eigenvalues()(k));
    const double v = es.eigenvectors()(0, k);
    r.weights.push_back(mu0 * v * v);
  }
  return r;
}

namespace {

constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
  std::vector<double> kronrod;
  double err = 0.0;
};

GkResult gk15(const VectorFn& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::vector<double> fc = f(c);
  const std::size_t m = fc.size();
  std::vector<double> k(m), g(m);
  for (std::size_t i = 0; i < m; ++i) {
    k[i] = kKronrodW[7] * fc[i];
    g[i] = kGaussW[3] * fc[i];
  }
  for (int j = 0; j < 7; ++j) {
    const auto f1 = f(c - h * kKronrodX[j]);
    const auto f2 = f(c + h * kKronrodX[j]);
    for (std::size_t i = 0; i < m; ++i) {
      k[i] += kKronrodW[j] * (f1[i] + f2[i]);
      if (j % 2 == 1) g[i] += kGaussW[j / 2] * (f1[i] + f2[i]);
    }
  }
  GkResult r;
  double km = 0.0, gm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    k[i] *= h;
    g[i] *= h;
    km += k[i];
    gm += g[i];
  }
  r.err = std::abs(km - gm) / static_cast<double>(m);
  r.kronrod = std::move(k);
  return r;
}

void gk_recurse(const VectorFn& f, double a, double b, const GkResult& whole, double tol,
                int depth, std::vector<double>& acc) {
  if (whole.err <= tol || depth <= 0) {
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += whole.kronrod[i];
    return;
  }
  const double c = 0.5 * (a + b);
  const GkResult left = gk15(f, a, c);
  const GkResult right = gk15(f, c, b);
  gk_recurse(f, a, c, left, tol / std::sqrt(2.0), depth - 1, acc);
  gk_recurse(f, c, b, right, tol / std::sqrt(2.0), depth - 1, acc);
}

}  // namespace

std::vector<double> adaptive_gauss_kronrod(const VectorFn& f, double a, double b, double rel_tol,
                                           double abs_tol, int max_depth) {
  const GkResult whole = gk15(f, a, b);
  double mag = 0.0;
  for (double v : whole.kronrod) mag += std::abs(v);
  mag /= static_cast<double>(whole.kronrod.size());
  const double tol = std::max(abs_tol, rel_tol * mag);
  std::vector<double> acc(whole.kronrod.size(), 0.0);
  gk_recurse(f, a, b, whole, tol, max_depth, acc);
  return acc;
}

// ---------------------------------------------------------------------------
// Sphere rules

namespace {

// Generalized golden ratio: positive root of x^{d+1} = x + 1.
double harmonious(int d) {
  double x = 2.0;
  for (int i = 0; i < 200; ++i) x = std::pow(1.0 + x, 1.0 / (d + 1.0));
  return x;
}

// Polar angle k of S^{d-1} carries the weight sin^{d-2-k}; in t = cos(phi) this is
// the Gegenbauer weight, so each angle gets its own Gauss-Jacobi rule.
struct GaussTable {
  int level = 0;
  int dim = 0;
  std::vector<std::vector<double>> cos_phi, sin_phi, w_phi;
};

GaussTable gauss_table(int level, int dim) {
  GaussTable t;
  t.level = level;
  t.dim = dim;
  for (int k = 0; k + 2 < dim; ++k) {
    const double a = 0.5 * (dim - 3 - k);
    const Rule1d r = gauss_jacobi(level, a, a);
    std::vector<double> c, s, w;
    for (int i = 0; i < level; ++i) {
      c.push_back(r.nodes[i]);
      s.push_back(std::sqrt(std::max(0.0, 1.0 - r.nodes[i] * r.nodes[i])));
      w.push_back(r.weights[i]);
    }
    t.cos_phi.push_back(std::move(c));
    t.sin_phi.push_back(std::move(s));
    t.w_phi.push_back(std::move(w));
  }
  return t;
}

std::atomic<int> g_workers{1};

}  // namespace

void set_worker_count(int workers) { g_workers.store(std::max(1, workers)); }
int worker_count() { return g_workers.load(); }

SphereRule SphereRule::monte_carlo(long nodes, std::uint64_t seed) {
  SphereRule r;
  r.kind_ = RuleKind::monte_carlo;
  r.per_batch_ = std::max(1L, nodes / kBatches);
  r.seed_ = seed;
  return r;
}

SphereRule SphereRule::quasi_monte_carlo(long nodes, std::uint64_t seed) {
  SphereRule r = monte_carlo(nodes, seed);
  r.kind_ = RuleKind::quasi_monte_carlo;
  return r;
}

SphereRule SphereRule::product_gauss(int level) {
  if (level < 1) throw DomainError("gauss rule level must be positive");
  SphereRule r;
  r.kind_ = RuleKind::product_gauss;
  r.level_ = level;
  r.seed_ = 0;
  return r;
}

SphereRule SphereRule::parse(const std::string& spec) {
  const SpecNode node = parse_spec(spec);
  if (node.kind == "mc" || node.kind == "qmc") {
    const long n = static_cast<long>(node.number("n", 65536.0));
    const auto seed = static_cast<std::uint64_t>(node.number("seed", 1.0));
    node.require_only({"n", "seed"});
    return node.kind == "mc" ? monte_carlo(n, seed) : quasi_monte_carlo(n, seed);
  }
  if (node.kind == "gauss") {
    node.require_only({"level"});
    return product_gauss(static_cast<int>(node.number("level", 16.0)));
  }
  throw SpecError("unknown rule kind '" + node.kind + "' in '" + spec + "'");
}

long SphereRule::node_count(int dim) const {
  if (kind_ != RuleKind::product_gauss) return per_batch_ * kBatches;
  long n = 2L * level_;
  for (int i = 2; i < dim; ++i) n *= level_;
  return n;
}

std::string SphereRule::spec() const {
  std::ostringstream os;
  switch (kind_) {
    case RuleKind::monte_carlo:
      os << "mc:n=" << per_batch_ * kBatches << ",seed=" << seed_;
      break;
    case RuleKind::quasi_monte_carlo:
      os << "qmc:n=" << per_batch_ * kBatches << ",seed=" << seed_;
      break;
    case RuleKind::product_gauss:
      os << "gauss:level=" << level_;
      break;
  }
  return os.str();
}

SphereRule SphereRule::refined(int factor) const {
  SphereRule r = *this;
  if (kind_ == RuleKind::product_gauss)
    r.level_ *= factor;
  else
    r.per_batch_ *= factor;
  return r;
}

SphereRule SphereRule::with_more_nodes(int dim, double factor) const {
  SphereRule r = *this;
  if (kind_ != RuleKind::product_gauss) {
    r.per_batch_ = static_cast<long>(std::ceil(per_batch_ * factor));
    return r;
  }
  const double target = factor * node_count(dim);
  while (r.node_count(dim) < target) ++r.level_;
  return r;
}

SphereRule SphereRule::with_seed(std::uint64_t seed) const {
  SphereRule r = *this;
  r.seed_ = seed;
  return r;
}

int SphereRule::segment_count(int dim) const {
  if (kind_ != RuleKind::product_gauss) return kBatches;
  return dim <= 2 ? 1 : level_;
}

void SphereRule::for_each_node(int dim, int segment,
                               const std::function<void(std::span<const double>, double)>& fn) const {
  if (dim < 2 || dim > kMaxDim) throw DomainError("sphere rule: unsupported dimension");
  std::array<double, kMaxDim> x{};
  const std::span<const double> node(x.data(), static_cast<std::size_t>(dim));
  const double area = sphere_area(dim);

  if (kind_ == RuleKind::monte_carlo) {
    const double w = area / static_cast<double>(per_batch_);
    const std::uint64_t stream = 1 + static_cast<std::uint64_t>(segment);
    for (long i = 0; i < per_batch_; ++i) {
      double s = 0.0;
      for (int c = 0; c < dim; ++c) {
        x[c] = rng::normal(seed_, stream, static_cast<std::uint64_t>(i) * dim + c);
        s += x[c] * x[c];
      }
      const double inv = 1.0 / std::sqrt(s);
      for (int c = 0; c < dim; ++c) x[c] *= inv;
      fn(node, w);
    }
    return;
  }

  if (kind_ == RuleKind::quasi_monte_carlo) {
    const double w = area / static_cast<double>(per_batch_);
    const double phi = harmonious(dim);
    std::array<double, kMaxDim> alpha{}, shift{}, u{};
    double p = 1.0;
    for (int c = 0; c < dim; ++c) {
      p /= phi;
      alpha[c] = p - std::floor(p);
      shift[c] = rng::uniform(seed_, 0x51a7 + static_cast<std::uint64_t>(segment), c);
      u[c] = shift[c];
    }
    for (long i = 0; i < per_batch_; ++i) {
      double s = 0.0;
      for (int c = 0; c < dim; ++c) {
        u[c] += alpha[c];
        u[c] -= std::floor(u[c]);
        const double uc = std::clamp(u[c], 1e-300, 1.0 - 1e-16);
        x[c] = rng::inverse_normal_cdf(uc);
        s += x[c] * x[c];
      }
      const double inv = 1.0 / std::sqrt(s);
      for (int c = 0; c < dim; ++c) x[c] *= inv;
      fn(node, w);
    }
    return;
  }

  // Product Gauss rule in hyperspherical coordinates.
  static thread_local GaussTable table;
  if (table.level != level_ || table.dim != dim) table = gauss_table(level_, dim);
  const int naz = 2 * level_;
  const double waz = 2.0 * kPi / naz;
  const int polar = dim - 2;
  std::array<int, kMaxDim> idx{};
  if (polar > 0) idx[0] = segment;
  while (true) {
    double w = waz, s = 1.0;
    for (int k = 0; k < polar; ++k) {
      const int i = idx[k];
      x[k] = s * table.cos_phi[k][i];
      w *= table.w_phi[k][i];
      s *= table.sin_phi[k][i];
    }
    for (int a = 0; a < naz; ++a) {
      const double ang = waz * a;
      x[dim - 2] = s * std::cos(ang);
      x[dim - 1] = s * std::sin(ang);
      fn(node, w);
    }
    // odometer over the inner polar angles (index 0 is fixed by the segment)
    int k = polar - 1;
    while (k >= 1) {
      if (++idx[k] < level_) break;
      idx[k] = 0;
      --k;
    }
    if (k < 1) break;
  }
}

namespace {

template <class Task>
void run_segments(int segments, const Task& task) {
  const int workers = std::min(worker_count(), segments);
  std::vector<std::exception_ptr> errors(segments);
  if (workers <= 1) {
    for (int s = 0; s < segments; ++s) task(s);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int s = next.fetch_add(1); s < segments; s = next.fetch_add(1)) {
        try {
          task(s);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string rule_method(const SphereRule& rule) {
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

}  // namespace

std::vector<Estimate> integrate_sphere_multi(const SphereRule& rule, int dim, int outputs,
                                             const MultiSphereFn& fn) {
  const int segments = rule.segment_count(dim);
  std::vector<std::vector<double>> partial(segments, std::vector<double>(outputs, 0.0));
  run_segments(segments, [&](int seg) {
    std::vector<CompensatedSum> acc(outputs);
    std::vector<double> out(outputs);
    long index = 0;
    rule.for_each_node(dim, seg, [&](std::span<const double> x, double w) {
      std::fill(out.begin(), out.end(), 0.0);
      fn(x, out);
      for (int o = 0; o < outputs; ++o) {
        if (!std::isfinite(out[o])) {
          std::ostringstream os;
          os << "non-finite integrand value " << out[o] << " (output " << o << ") at node "
             << index << " of segment " << seg << ", x = (";
          for (std::size_t c = 0; c < x.size(); ++c) os << (c ? ", " : "") << x[c];
          os << ")";
          throw QuadratureError(os.str());
        }
        acc[o].add(w * out[o]);
      }
      ++index;
    });
    for (int o = 0; o < outputs; ++o) partial[seg][o] = acc[o].result();
  });

  std::vector<Estimate> res(outputs);
  const long nodes = rule.node_count(dim);
  for (int o = 0; o < outputs; ++o) {
    std::vector<double> col(segments);
    for (int s = 0; s < segments; ++s) col[s] = partial[s][o];
    if (rule.kind() == RuleKind::product_gauss)
      res[o] = exact_estimate(kahan_reduce(col), nodes, rule_method(rule));
    else
      res[o] = from_batches(std::move(col), nodes, rule_method(rule));
  }
  return res;
}

Estimate integrate_sphere(const SphereRule& rule, int dim, const SphereFn& f) {
  return integrate_sphere_multi(rule, dim, 1,
                                [&](std::span<const double> x, std::span<double> out) {
                                  out[0] = f(x);
                                })
      .front();
}

void require_orthonormal(const std::vector<Vec>& basis, double tol) {
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double g = dot(basis[i], basis[j]);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > tol)
        throw DomainError("basis is not orthonormal (Gram entry " + std::to_string(i) + "," +
                          std::to_string(j) + " = " + std::to_string(g) + ")");
    }
}

std::vector<Estimate> integrate_subsphere_multi(const SphereRule& rule,
                                                const std::vector<Vec>& basis, int outputs,
                                                const MultiSphereFn& fn) {
  require_orthonormal(basis);
  const int m = static_cast<int>(basis.size());
  if (m < 2) throw DomainError("subsphere integration needs at least two basis vectors");
  const int d = static_cast<int>(basis.front().size());
  return integrate_sphere_multi(rule, m, outputs,
                                [&](std::span<const double> w, std::span<double> out) {
                                  std::array<double, kMaxDim> x{};
                                  for (int i = 0; i < m; ++i)
                                    for (int c = 0; c < d; ++c) x[c] += w[i] * basis[i][c];
                                  fn(std::span<const double>(x.data(), d), out);
                                });
}

Estimate integrate_subsphere(const SphereRule& rule, const std::vector<Vec>& basis,
                             const SphereFn& f) {
  return integrate_subsphere_multi(rule, basis, 1,
                                   [&](std::span<const double> x, std::span<double> out) {
                                     out[0] = f(x);
                                   })
      .front();
}

// ---------------------------------------------------------------------------
// Fractional radial integral

Estimate fractional_radial(const ProfileFn& g, double q, double cutoff,
                           const FractionalOptions& opt) {
  if (!(q > 0.0 && q < 2.0))
    throw DomainError("fractional_radial: q must lie in (0, 2), got " + std::to_string(q));
  if (!(cutoff > 0.0)) throw DomainError("fractional_radial: cutoff must be positive");
  const std::vector<double> g0 = g(0.0);
  const std::size_t m = g0.size();
  const double delta = cutoff * opt.split_fraction;

  // [0, delta]: even profile, g(t) - g(0) ~ c2 t^2
  std::vector<double> c2num(m, 0.0);
  double c2den = 0.0;
  for (int i = 1; i <= opt.taylor_samples; ++i) {
    const double t = delta * i / opt.taylor_samples;
    const auto gt = g(t);
    for (std::size_t k = 0; k < m; ++k) c2num[k] += (gt[k] - g0[k]) * t * t;
    c2den += t * t * t * t;
  }

  double scale = 0.0;
  for (double v : g0) scale = std::max(scale, std::abs(v));
  const auto middle = adaptive_gauss_kronrod(
      [&](double t) {
        auto gt = g(t);
        const double inv = std::pow(t, -1.0 - q);
        for (std::size_t k = 0; k < m; ++k) gt[k] = (gt[k] - g0[k]) * inv;
        return gt;
      },
      delta, cutoff, opt.rel_tol, 1e-13 * scale * std::pow(cutoff, -q) + 1e-300);

  std::vector<double> total(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double head = c2num[k] / c2den * std::pow(delta, 2.0 - q) / (2.0 - q);
    const double tail = -g0[k] * std::pow(cutoff, -q) / q;
    total[k] = head + middle[k] + tail;
  }
  if (m == 1) return exact_estimate(total[0], 0, "fractional");
  return from_batches(std::move(total), 0, "fractional");
}

double fractional_radial(const std::function<double(double)>& g, double q, double cutoff,
                         const FractionalOptions& opt) {
  return fractional_radial([&](double t) { return std::vector<double>{g(t)}; }, q, cutoff, opt)
      .value;
}

TorusRule torus_invariant_rule(int n, int level) {
  if (n < 1 || level < 1) throw DomainError("torus_invariant_rule: need n >= 1 and level >= 1");
  struct Node {
    std::vector<double> u;
    double w;
  };
  std::vector<Node> nodes{{{}, 1.0}};
  for (int k = 1; k <= n - 1; ++k) {
    const double alpha = n - 1 - k;
    const Rule1d r = gauss_jacobi(level, alpha, 0.0);
    std::vector<Node> next;
    next.reserve(nodes.size() * level);
    for (const auto& nd : nodes)
      for (int i = 0; i < level; ++i) {
        Node m = nd;
        m.u.push_back(0.5 * (1.0 + r.nodes[i]));
        m.w *= r.weights[i] * std::pow(0.5, alpha + 1.0);
        next.push_back(std::move(m));
      }
    nodes = std::move(next);
  }
  // uniform density on the simplex is (n - 1)!
  double scale = sphere_area(2 * n);
  for (int i = 2; i <= n - 1; ++i) scale *= i;
  TorusRule out;
  for (const auto& nd : nodes) {
    Vec x(2 * n, 0.0);
    double rest = 1.0;
    for (int k = 0; k < n - 1; ++k) {
      const double sk = rest * nd.u[k];
      x[2 * k] = std::sqrt(sk);
      rest -= sk;
    }
    x[2 * (n - 1)] = std::sqrt(std::max(0.0, rest));
    out.points.push_back(normalized(x));
    out.weights.push_back(scale * nd.w);
  }
  return out;
}

}  // namespace cbp
