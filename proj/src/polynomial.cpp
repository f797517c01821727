#include "cbp/polynomial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace cbp {

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add_term(Exponent(dim, 0), c);
  return p;
}

Polynomial Polynomial::variable(int dim, int i) {
  Exponent e(dim, 0);
  e[i] = 1;
  return monomial(e, 1.0);
}

Polynomial Polynomial::monomial(const Exponent& e, double c) {
  Polynomial p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

Polynomial Polynomial::norm_squared_power(int dim, int k) {
  Polynomial r2(dim);
  for (int i = 0; i < dim; ++i) {
    Exponent e(dim, 0);
    e[i] = 2;
    r2.add_term(e, 1.0);
  }
  Polynomial out = constant(dim, 1.0);
  for (int j = 0; j < k; ++j) out = out * r2;
  return out;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (auto v : e) s += v;
    d = std::max(d, s);
  }
  return d;
}

int Polynomial::homogeneous_degree() const {
  int d = -2;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (auto v : e) s += v;
    if (d == -2)
      d = s;
    else if (d != s)
      return -1;
  }
  return d == -2 ? 0 : d;
}

void Polynomial::add_term(const Exponent& e, double c) {
  if (static_cast<int>(e.size()) != dim_) throw DomainError("polynomial: exponent size mismatch");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (dim_ == 0) dim_ = o.dim_;
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (dim_ == 0) dim_ = o.dim_;
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r(std::max(a.dim_, b.dim_));
  Polynomial::Exponent e(r.dim_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < r.dim_; ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
      r.add_term(e, ca * cb);
    }
  return r;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial r(dim_);
  for (const auto& [e0, c] : terms_) {
    if (e0[i] == 0) continue;
    Exponent e = e0;
    const double f = e[i];
    --e[i];
    r.add_term(e, c * f);
  }
  return r;
}

Polynomial Polynomial::laplacian() const {
  Polynomial r(dim_);
  for (const auto& [e0, c] : terms_)
    for (int i = 0; i < dim_; ++i) {
      if (e0[i] < 2) continue;
      Exponent e = e0;
      const double f = static_cast<double>(e[i]) * (e[i] - 1);
      e[i] = static_cast<std::uint8_t>(e[i] - 2);
      r.add_term(e, c * f);
    }
  return r;
}

Polynomial Polynomial::pruned(double tol) const {
  double mx = 0.0;
  for (const auto& [e, c] : terms_) mx = std::max(mx, std::abs(c));
  Polynomial r(dim_);
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > tol * mx) r.terms_.emplace(e, c);
  return r;
}

double Polynomial::evaluate(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    s += t;
  }
  return s;
}

double Polynomial::coefficient_bound() const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) s += std::abs(c);
  return s;
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    os << (first ? "" : " + ") << c;
    first = false;
    for (int i = 0; i < dim_; ++i)
      if (e[i]) os << "*x" << i << (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
  }
  return first ? "0" : os.str();
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : dim_(p.dim()) {
  for (const auto& [e, c] : p.terms()) {
    coef_.push_back(c);
    offsets_.push_back(static_cast<std::uint16_t>(factors_.size()));
    for (int i = 0; i < dim_; ++i)
      if (e[i]) {
        factors_.push_back(static_cast<std::uint8_t>(i));
        factors_.push_back(e[i]);
        max_power_ = std::max<int>(max_power_, e[i]);
      }
  }
  offsets_.push_back(static_cast<std::uint16_t>(factors_.size()));
  if (factors_.size() > 65535) throw DomainError("polynomial too large to compile");
}

double CompiledPolynomial::operator()(std::span<const double> x) const {
  constexpr int kMaxPow = 24;
  if (max_power_ >= kMaxPow) throw DomainError("compiled polynomial: power too large");
  std::array<std::array<double, kMaxPow>, kMaxDim> pw;
  for (int i = 0; i < dim_; ++i) {
    pw[i][0] = 1.0;
    for (int k = 1; k <= max_power_; ++k) pw[i][k] = pw[i][k - 1] * x[i];
  }
  double s = 0.0;
  const std::size_t n = coef_.size();
  for (std::size_t t = 0; t < n; ++t) {
    double v = coef_[t];
    for (std::uint16_t f = offsets_[t]; f < offsets_[t + 1]; f += 2) v *= pw[factors_[f]][factors_[f + 1]];
    s += v;
  }
  return s;
}

namespace {

// lgamma(m / 2) for small m
double lgamma_half(int m) {
  static const std::vector<double> table = [] {
    std::vector<double> t(512);
    for (int i = 1; i < 512; ++i) t[i] = std::lgamma(0.5 * i);
    return t;
  }();
  return m < 512 ? table[m] : std::lgamma(0.5 * m);
}

}  // namespace

double sphere_moment(const Polynomial::Exponent& e) {
  double lg = 0.0;
  int total = 0;
  for (auto a : e) {
    if (a % 2) return 0.0;
    lg += lgamma_half(a + 1);
    total += a;
  }
  lg -= lgamma_half(total + static_cast<int>(e.size()));
  return 2.0 * std::exp(lg);
}

double sphere_inner(const Polynomial& p, const Polynomial& q) {
  double s = 0.0;
  Polynomial::Exponent e(p.dim());
  for (const auto& [ea, ca] : p.terms())
    for (const auto& [eb, cb] : q.terms()) {
      bool even = true;
      for (int i = 0; i < p.dim(); ++i) {
        e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
        even = even && (e[i] % 2 == 0);
      }
      if (even) s += ca * cb * sphere_moment(e);
    }
  return s;
}

namespace {

// Coefficients c_j of H[p] = sum_j c_j |x|^{2j} Delta^j p, with c_0 = 1 and
// c_{j+1} = -c_j / (2 (j+1) (d + 2k - 2j - 4)).
std::vector<double> projection_coefficients(int d, int k) {
  std::vector<double> c{1.0};
  for (int j = 0; 2 * (j + 1) <= k; ++j)
    c.push_back(-c.back() / (2.0 * (j + 1) * (d + 2.0 * k - 2.0 * j - 4.0)));
  return c;
}

}  // namespace

Polynomial harmonic_projection(const Polynomial& p) {
  const int k = p.homogeneous_degree();
  if (k < 0) throw DomainError("harmonic_projection: polynomial is not homogeneous");
  const int d = p.dim();
  const auto c = projection_coefficients(d, k);
  Polynomial h = p;
  Polynomial lap = p;
  for (std::size_t j = 1; j < c.size(); ++j) {
    lap = lap.laplacian();
    if (lap.is_zero()) break;
    h += c[j] * (Polynomial::norm_squared_power(d, static_cast<int>(j)) * lap);
  }
  return h.pruned(1e-13);
}

std::map<int, Polynomial> harmonic_decomposition(const Polynomial& p) {
  std::map<int, Polynomial> out;
  Polynomial cur = p;
  int k = p.homogeneous_degree();
  if (k < 0) throw DomainError("harmonic_decomposition: polynomial is not homogeneous");
  const int d = p.dim();
  while (k >= 0 && !cur.is_zero()) {
    const auto c = projection_coefficients(d, k);
    Polynomial h = cur;
    Polynomial quotient(d);
    Polynomial lap = cur;
    for (std::size_t j = 1; j < c.size(); ++j) {
      lap = lap.laplacian();
      if (lap.is_zero()) break;
      h += c[j] * (Polynomial::norm_squared_power(d, static_cast<int>(j)) * lap);
      quotient -= c[j] * (Polynomial::norm_squared_power(d, static_cast<int>(j) - 1) * lap);
    }
    h = h.pruned(1e-13);
    if (!h.is_zero()) out[k] = h;
    cur = quotient.pruned(1e-13);
    k -= 2;
  }
  return out;
}

}  // namespace cbp
