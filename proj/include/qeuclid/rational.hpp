#pragma once
// Exact Gaussian rationals a + b*i over arbitrary-precision rationals.
#include <gmpxx.h>

#include <complex>
#include <stdexcept>
#include <string>

namespace qeuclid {

struct GaussRat {
  mpq_class re, im;

  GaussRat() : re(0), im(0) {}
  GaussRat(long v) : re(v), im(0) {}
  GaussRat(const mpq_class& r) : re(r), im(0) {}
  GaussRat(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {}

  static GaussRat I() { return GaussRat(mpq_class(0), mpq_class(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_one() const { return re == 1 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussRat operator-() const { return GaussRat(mpq_class(-re), mpq_class(-im)); }
  GaussRat conj() const { return GaussRat(re, mpq_class(-im)); }

  GaussRat& operator+=(const GaussRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
  friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
  friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
    return GaussRat(mpq_class(a.re * b.re - a.im * b.im), mpq_class(a.re * b.im + a.im * b.re));
  }
  GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }

  GaussRat inv() const {
    mpq_class n = re * re + im * im;
    if (n == 0) throw std::domain_error("GaussRat: division by zero");
    return GaussRat(mpq_class(re / n), mpq_class(-im / n));
  }
  friend GaussRat operator/(const GaussRat& a, const GaussRat& b) { return a * b.inv(); }

  friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  // Canonical, re-parseable: "3/2", "i", "-i", "3/2*i", "(1+i)", "(1-3/2*i)".
  std::string str() const {
    auto imag_part = [](const mpq_class& b) -> std::string {
      if (b == 1) return "i";
      if (b == -1) return "-i";
      return b.get_str() + "*i";
    };
    if (im == 0) return re.get_str();
    if (re == 0) return imag_part(im);
    std::string s = re.get_str();
    if (im > 0)
      s += "+" + imag_part(im);
    else
      s += "-" + imag_part(mpq_class(-im));
    return "(" + s + ")";
  }
};

}  // namespace qeuclid
