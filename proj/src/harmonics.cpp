#include "cbp/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace cbp {

HarmonicFamily parse_harmonic_family(const std::string& s) {
  if (s == "complex") return HarmonicFamily::complex;
  if (s == "torus") return HarmonicFamily::torus;
  if (s == "symmetric") return HarmonicFamily::symmetric;
  throw SpecError("unknown harmonic family '" + s + "'");
}

std::string to_string(HarmonicFamily f) {
  switch (f) {
    case HarmonicFamily::complex:
      return "complex";
    case HarmonicFamily::torus:
      return "torus";
    case HarmonicFamily::symmetric:
      return "symmetric";
  }
  return "?";
}

Polynomial modulus_squared(int n, int j) {
  Polynomial::Exponent a(2 * n, 0), b(2 * n, 0);
  a[2 * j] = 2;
  b[2 * j + 1] = 2;
  return Polynomial::monomial(a, 1.0) + Polynomial::monomial(b, 1.0);
}

namespace {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long partitions(int k, int parts, int largest) {
  if (k == 0) return 1;
  if (parts == 0) return 0;
  long s = 0;
  for (int p = std::min(k, largest); p >= 1; --p) s += partitions(k - p, parts - 1, p);
  return s;
}

void for_each_composition(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> a(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      a[i] = left;
      fn(a);
      return;
    }
    for (int v = left; v >= 0; --v) {
      a[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, k);
}

Polynomial s_monomial(int n, const std::vector<int>& alpha) {
  Polynomial p = Polynomial::constant(2 * n, 1.0);
  for (int j = 0; j < n; ++j)
    for (int e = 0; e < alpha[j]; ++e) p = p * modulus_squared(n, j);
  return p;
}

struct Complex {
  Polynomial re, im;
};

Complex mul(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

// z^alpha conj(z)^beta as a pair of real polynomials.
Complex z_monomial(int n, const std::vector<int>& alpha, const std::vector<int>& beta) {
  const int d = 2 * n;
  Complex p{Polynomial::constant(d, 1.0), Polynomial(d)};
  for (int j = 0; j < n; ++j) {
    const Complex z{Polynomial::variable(d, 2 * j), Polynomial::variable(d, 2 * j + 1)};
    const Complex zb{Polynomial::variable(d, 2 * j), -1.0 * Polynomial::variable(d, 2 * j + 1)};
    for (int e = 0; e < alpha[j]; ++e) p = mul(p, z);
    for (int e = 0; e < beta[j]; ++e) p = mul(p, zb);
  }
  return p;
}

std::string exponent_label(const std::vector<int>& a) {
  std::string s;
  for (int v : a) s += std::to_string(v);
  return s;
}

struct Candidate {
  Polynomial poly;
  std::string label;
};

std::vector<Candidate> candidates(int n, int k, HarmonicFamily family) {
  std::vector<Candidate> out;
  if (family == HarmonicFamily::torus) {
    for_each_composition(n, k, [&](const std::vector<int>& a) {
      out.push_back({s_monomial(n, a), "s^" + exponent_label(a)});
    });
  } else if (family == HarmonicFamily::symmetric) {
    std::set<std::vector<int>> seen;
    for_each_composition(n, k, [&](const std::vector<int>& a) {
      std::vector<int> lam = a;
      std::sort(lam.rbegin(), lam.rend());
      if (!seen.insert(lam).second) return;
      // monomial symmetric polynomial m_lambda(s)
      Polynomial m(2 * n);
      std::set<std::vector<int>> orbit;
      std::vector<int> perm = lam;
      std::sort(perm.begin(), perm.end());
      do {
        orbit.insert(perm);
      } while (std::next_permutation(perm.begin(), perm.end()));
      for (const auto& p : orbit) m += s_monomial(n, p);
      out.push_back({m, "m_" + exponent_label(lam)});
    });
  } else {
    std::vector<std::vector<int>> idx;
    for_each_composition(n, k, [&](const std::vector<int>& a) { idx.push_back(a); });
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = i; j < idx.size(); ++j) {
        const Complex c = z_monomial(n, idx[i], idx[j]);
        const std::string tag = exponent_label(idx[i]) + "|" + exponent_label(idx[j]);
        out.push_back({c.re, "re " + tag});
        if (i != j) out.push_back({c.im, "im " + tag});
      }
  }
  return out;
}

}  // namespace

int invariant_harmonic_dimension(int n, int degree, HarmonicFamily family) {
  if (degree % 2) return 0;
  const int k = degree / 2;
  switch (family) {
    case HarmonicFamily::torus:
      return static_cast<int>(binomial(n + k - 1, k) - binomial(n + k - 2, k - 1));
    case HarmonicFamily::symmetric:
      return static_cast<int>(partitions(k, n, k) - (k > 0 ? partitions(k - 1, n, k - 1) : 0));
    case HarmonicFamily::complex: {
      const long a = binomial(n + k - 1, k), b = binomial(n + k - 2, k - 1);
      return static_cast<int>(a * a - b * b);
    }
  }
  return 0;
}

std::vector<HarmonicAtom> build_invariant_harmonics(int n, int max_degree, HarmonicFamily family) {
  if (n < 1 || max_degree < 0 || max_degree % 2) throw DomainError("harmonics: need even max_degree >= 0");
  if (max_degree > 8) throw DomainError("harmonics: max_degree must be <= 8");
  std::vector<HarmonicAtom> atoms;
  for (int deg = 0; deg <= max_degree; deg += 2) {
    std::vector<Polynomial> basis;
    for (auto& c : candidates(n, deg / 2, family)) {
      Polynomial h = harmonic_projection(c.poly);
      const double n0 = std::sqrt(sphere_inner(h, h));
      if (!(n0 > 1e-12)) continue;
      h *= 1.0 / n0;
      // two passes of modified Gram-Schmidt
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) h -= sphere_inner(h, b) * b;
      const double n1 = std::sqrt(std::max(0.0, sphere_inner(h, h)));
      if (n1 < 1e-8) continue;
      h = (1.0 / n1 * h).pruned(1e-14);
      basis.push_back(h);
      HarmonicAtom a;
      a.degree = deg;
      a.poly = h;
      a.compiled = CompiledPolynomial(h);
      a.label = "deg" + std::to_string(deg) + ":" + c.label;
      atoms.push_back(std::move(a));
    }
  }
  return atoms;
}

}  // namespace cbp
