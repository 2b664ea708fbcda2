#pragma once
// Exact scalar field for the deformation parameter: fractions of polynomials
// in a formal root s with q = s^8, so q^{1/2} = s^4, q^{1/4} = s^2, q^{1/8} = s.
// Canonical form: gcd-reduced, monic denominator; Laurent monomials live as
// fractions (s^-3 is 1/s^3).
#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>

#include "poly.hpp"

namespace qeuclid {

struct FieldElem {
  Poly num, den;  // den monic nonzero, gcd(num, den) = 1

  FieldElem() : den(Poly(GaussRat(1))) {}
  FieldElem(long v) : num(Poly(GaussRat(v))), den(Poly(GaussRat(1))) {}
  FieldElem(const GaussRat& a) : num(Poly(a)), den(Poly(GaussRat(1))) {}
  FieldElem(Poly n, Poly d) : num(std::move(n)), den(std::move(d)) { reduce(); }

  static FieldElem from_int(long v) { return FieldElem(v); }
  static FieldElem i() { return FieldElem(GaussRat::I()); }
  static FieldElem s_power(int k) {
    if (k >= 0) return FieldElem(Poly::monomial(GaussRat(1), k), Poly(GaussRat(1)));
    return FieldElem(Poly(GaussRat(1)), Poly::monomial(GaussRat(1), -k));
  }
  static FieldElem q_power(int k) { return s_power(8 * k); }
  // q - q^{-1}
  static FieldElem lambda() { return q_power(1) - q_power(-1); }
  // q^{1/2} - q^{-1/2}
  static FieldElem mu() { return s_power(4) - s_power(-4); }

  void reduce() {
    if (den.is_zero()) throw std::domain_error("FieldElem: zero denominator");
    if (num.is_zero()) {
      den = Poly(GaussRat(1));
      return;
    }
    int t = std::min(num.valuation(), den.valuation());
    num.shift_down(t);
    den.shift_down(t);
    // After the common s-power cancels, one side with a bare monomial leaves
    // nothing for a gcd to find; the Euclidean pass is only for mixed tails.
    if (!num.is_monomial() && !den.is_monomial()) {
      Poly g = Poly::gcd(num, den);
      if (g.deg() > 0) {
        num = num / g;
        den = den / g;
      }
    }
    if (!den.lead().is_one()) {
      GaussRat inv = den.lead().inv();
      num = inv * num;
      den = inv * den;
    }
  }

  bool is_zero() const { return num.is_zero(); }
  bool is_one() const { return num.is_one() && den.is_one(); }

  FieldElem operator-() const {
    FieldElem r = *this;
    r.num = -r.num;
    return r;
  }
  friend FieldElem operator+(const FieldElem& a, const FieldElem& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den == b.den) return FieldElem(a.num + b.num, a.den);
    return FieldElem(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b) { return a + (-b); }
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b) {
    if (a.is_zero() || b.is_zero()) return FieldElem();
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    return FieldElem(a.num * b.num, a.den * b.den);
  }
  FieldElem inv() const {
    if (is_zero()) throw std::domain_error("FieldElem: division by zero");
    return FieldElem(den, num);
  }
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b) { return a * b.inv(); }
  FieldElem& operator+=(const FieldElem& o) { return *this = *this + o; }
  FieldElem& operator-=(const FieldElem& o) { return *this = *this - o; }
  FieldElem& operator*=(const FieldElem& o) { return *this = *this * o; }
  FieldElem& operator/=(const FieldElem& o) { return *this = *this / o; }

  FieldElem pow(long e) const {
    if (e < 0) return inv().pow(-e);
    FieldElem r(1), base = *this;
    while (e) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  // Star on scalars: antilinear (i -> -i), q kept real (s -> s).
  FieldElem conj() const {
    FieldElem r;
    r.num = num.conj_coeffs();
    r.den = den.conj_coeffs();
    r.reduce();
    return r;
  }

  friend bool operator==(const FieldElem& a, const FieldElem& b) { return a.num == b.num && a.den == b.den; }
  friend bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

  std::complex<double> eval_q(double q0) const {
    std::complex<double> s0{std::pow(q0, 1.0 / 8.0), 0.0};
    return num.eval(s0) / den.eval(s0);
  }
  // Exact value at q = 1; throws when the reduced fraction has a pole there.
  GaussRat at_one() const {
    GaussRat d1 = den.eval_one();
    if (d1.is_zero()) throw std::domain_error("FieldElem: pole at q = 1");
    return num.eval_one() / d1;
  }
  // Exact value at a rational s; throws on a pole there.
  GaussRat eval_s(const GaussRat& s0) const {
    GaussRat d0 = den.eval_rat(s0);
    if (d0.is_zero()) throw std::domain_error("FieldElem: pole at sampled s");
    return num.eval_rat(s0) / d0;
  }

  bool sqrt_to(FieldElem& out) const {
    Poly sn, sd;
    if (!Poly::sqrt_of(num, sn) || !Poly::sqrt_of(den, sd)) return false;
    out = FieldElem(sn, sd);
    return true;
  }

  std::string str() const {
    if (den.is_one()) return num.str();
    if (num.is_monomial() && den.is_monomial()) {
      int e = num.deg() - den.deg();
      return Poly::term_str(num.lead(), e, "s");
    }
    return "(" + num.str() + ")/(" + den.str() + ")";
  }
};

}  // namespace qeuclid
