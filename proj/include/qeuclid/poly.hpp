#pragma once
// Dense univariate polynomials over GaussRat, stored by ascending power.
// Invariant: coefficient vector is empty (zero polynomial) or has nonzero back().
#include <algorithm>
#include <cassert>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace qeuclid {

struct Poly {
  std::vector<GaussRat> c;

  Poly() = default;
  explicit Poly(const GaussRat& a) {
    if (!a.is_zero()) c = {a};
  }
  static Poly monomial(const GaussRat& a, int k) {
    Poly p;
    if (a.is_zero()) return p;
    if (k < 0) throw std::invalid_argument("Poly::monomial: negative power");
    p.c.assign(k + 1, GaussRat());
    p.c[k] = a;
    return p;
  }

  void trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  bool is_one() const { return c.size() == 1 && c[0].is_one(); }
  int deg() const { return (int)c.size() - 1; }
  const GaussRat& lead() const {
    assert(!c.empty());
    return c.back();
  }
  // Index of the lowest nonzero coefficient; -1 for zero.
  int valuation() const {
    for (size_t k = 0; k < c.size(); ++k)
      if (!c[k].is_zero()) return (int)k;
    return -1;
  }
  bool is_monomial() const {
    if (c.empty()) return false;
    for (size_t k = 0; k + 1 < c.size(); ++k)
      if (!c[k].is_zero()) return false;
    return true;
  }
  // Divide by s^k in place; requires valuation >= k.
  void shift_down(int k) {
    assert(k >= 0 && (is_zero() || valuation() >= k));
    if (k > 0 && !c.empty()) c.erase(c.begin(), c.begin() + k);
  }

  GaussRat at(int k) const { return (k >= 0 && k < (int)c.size()) ? c[k] : GaussRat(); }

  Poly operator-() const {
    Poly r = *this;
    for (auto& x : r.c) x = -x;
    return r;
  }
  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] = a.at((int)k) + b.at((int)k);
    r.trim();
    return r;
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    if (a.is_zero() || b.is_zero()) return r;
    if (b.is_monomial()) {
      r.c.assign(a.c.size() + b.c.size() - 1, GaussRat());
      for (size_t i = 0; i < a.c.size(); ++i)
        if (!a.c[i].is_zero()) r.c[i + b.c.size() - 1] = a.c[i] * b.lead();
      return r;
    }
    if (a.is_monomial()) return b * a;
    r.c.assign(a.c.size() + b.c.size() - 1, GaussRat());
    for (size_t i = 0; i < a.c.size(); ++i) {
      if (a.c[i].is_zero()) continue;
      for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    r.trim();
    return r;
  }
  friend Poly operator*(const GaussRat& s, const Poly& p) {
    Poly r;
    if (s.is_zero()) return r;
    r.c = p.c;
    for (auto& x : r.c) x = s * x;
    return r;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c == b.c; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  static void divrem(const Poly& a, const Poly& b, Poly& q, Poly& r) {
    if (b.is_zero()) throw std::domain_error("Poly::divrem: division by zero");
    q = Poly();
    r = a;
    if (a.deg() < b.deg()) return;
    q.c.assign(a.deg() - b.deg() + 1, GaussRat());
    GaussRat binv = b.lead().inv();
    while (!r.is_zero() && r.deg() >= b.deg()) {
      int k = r.deg() - b.deg();
      GaussRat f = r.lead() * binv;
      q.c[k] = f;
      for (int j = 0; j <= b.deg(); ++j) r.c[k + j] -= f * b.c[j];
      r.trim();
    }
    q.trim();
  }
  // Exact quotient; throws if the division leaves a remainder.
  friend Poly operator/(const Poly& a, const Poly& b) {
    Poly q, r;
    divrem(a, b, q, r);
    if (!r.is_zero()) throw std::domain_error("Poly: inexact division");
    return q;
  }

  Poly monic() const {
    if (is_zero()) return *this;
    return lead().inv() * *this;
  }

  static Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
      Poly q, r;
      divrem(a, b, q, r);
      a = std::move(b);
      b = r.monic();
    }
    return a.monic();
  }

  Poly pow(int e) const {
    if (e < 0) throw std::invalid_argument("Poly::pow: negative power");
    Poly r(GaussRat(1)), base = *this;
    while (e) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  Poly conj_coeffs() const {
    Poly r = *this;
    for (auto& x : r.c) x = x.conj();
    return r;
  }

  std::complex<double> eval(std::complex<double> t) const {
    std::complex<double> acc{0.0, 0.0};
    for (size_t k = c.size(); k-- > 0;) acc = acc * t + c[k].to_complex();
    return acc;
  }
  GaussRat eval_one() const {
    GaussRat acc;
    for (const auto& x : c) acc += x;
    return acc;
  }
  GaussRat eval_rat(const GaussRat& t) const {
    GaussRat acc;
    for (size_t k = c.size(); k-- > 0;) acc = acc * t + c[k];
    return acc;
  }

  // Exact square root of a perfect-square polynomial; false when no
  // square root with rational leading behaviour exists.
  static bool sqrt_of(const Poly& p, Poly& out) {
    if (p.is_zero()) {
      out = Poly();
      return true;
    }
    int v = p.valuation();
    if (v % 2 != 0) return false;
    std::vector<GaussRat> a(p.c.begin() + v, p.c.end());
    if ((a.size() - 1) % 2 != 0) return false;
    GaussRat r0;
    if (!rational_sqrt(a[0], r0)) return false;
    size_t half = (a.size() - 1) / 2;
    std::vector<GaussRat> r(half + 1);
    r[0] = r0;
    GaussRat two_r0 = GaussRat(2) * r0;
    for (size_t k = 1; k <= half; ++k) {
      GaussRat s = a[k];
      for (size_t i = 1; i < k; ++i)
        if (i <= half && k - i <= half) s -= r[i] * r[k - i];
      r[k] = s / two_r0;
    }
    Poly cand;
    cand.c.assign(v / 2, GaussRat());
    cand.c.insert(cand.c.end(), r.begin(), r.end());
    cand.trim();
    if (cand * cand != p) return false;
    out = cand;
    return true;
  }

  // Square root of a positive rational that is an exact square of a rational.
  static bool rational_sqrt(const GaussRat& x, GaussRat& out) {
    if (!x.is_real() || x.re < 0) return false;
    if (x.re == 0) {
      out = GaussRat();
      return true;
    }
    mpz_class num = x.re.get_num(), den = x.re.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return false;
    mpz_class sn, sd;
    mpz_sqrt(sn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(sd.get_mpz_t(), den.get_mpz_t());
    out = GaussRat(mpq_class(sn) / mpq_class(sd));
    return true;
  }

  std::string str(const std::string& var = "s") const {
    if (is_zero()) return "0";
    std::string out;
    bool first = true;
    for (size_t k = 0; k < c.size(); ++k) {
      if (c[k].is_zero()) continue;
      GaussRat coeff = c[k];
      if (!first) {
        if (coeff.is_real() && coeff.re < 0) {
          out += " - ";
          coeff = -coeff;
        } else {
          out += " + ";
        }
      }
      first = false;
      out += term_str(coeff, (int)k, var);
    }
    return out;
  }

  static std::string term_str(const GaussRat& coeff, int e, const std::string& var) {
    if (e == 0) return coeff.str();
    std::string base = (e == 1) ? var : var + "^" + std::to_string(e);
    if (coeff.is_one()) return base;
    if ((-coeff).is_one()) return "-" + base;
    return coeff.str() + "*" + base;
  }
};

}  // namespace qeuclid
