#pragma once
// Radial sector.  Fields that depend on the (central) squared radius live in a
// small closed family: Laurent polynomials in r with exact scalar coefficients
// over products of factors (1 + (s^j r)^n)^k.  The family is stable under
// argument scaling r -> s^t r, under the lattice difference quotient, and
// under the split action of a derivative across a radial factor.  A numeric
// companion applies powers of the Gaussian weight multiplier on the log-radial
// grid, which no exact closed form covers for the rational members.
#include "qeuclid/calculus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace qeuclid {

// One denominator factor (1 + (s^shift_s r)^n)^k with k >= 1.  Its poles sit
// at |r| = s^{-shift_s}, phases exp(i pi (2m+1)/n): never on the positive axis.
struct RFactor {
  int shift_s = 0;
  int n = 1;
  int k = 1;

  friend bool operator==(const RFactor& a, const RFactor& b) {
    return a.shift_s == b.shift_s && a.n == b.n && a.k == b.k;
  }
  friend bool operator<(const RFactor& a, const RFactor& b) {
    return std::tie(a.shift_s, a.n, a.k) < std::tie(b.shift_s, b.n, b.k);
  }
};

using Laurent = std::map<int, FieldElem>;  // r-power -> coefficient

namespace detail {

inline void laurent_add(Laurent& a, const Laurent& b) {
  for (const auto& [m, c] : b) {
    auto [it, fresh] = a.emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) a.erase(it);
    }
  }
}

inline Laurent laurent_mul(const Laurent& a, const Laurent& b) {
  Laurent out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      FieldElem c = ca * cb;
      if (c.is_zero()) continue;
      auto [it, fresh] = out.emplace(ma + mb, c);
      if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) out.erase(it);
      }
    }
  return out;
}

// (1 + (s^j r)^n)^k expanded as a Laurent polynomial.
inline Laurent expand_factor(int shift_s, int n, int k) {
  Laurent base{{0, FieldElem(1)}, {n, FieldElem::s_power(shift_s * n)}};
  Laurent out{{0, FieldElem(1)}};
  for (int i = 0; i < k; ++i) out = laurent_mul(out, base);
  return out;
}

}  // namespace detail

// num / prod (1 + (s^j r)^n)^k.  den is kept sorted with one entry per base.
struct RTerm {
  Laurent num;
  std::vector<RFactor> den;

  void tidy() {
    for (auto it = num.begin(); it != num.end();)
      it = it->second.is_zero() ? num.erase(it) : std::next(it);
    std::sort(den.begin(), den.end());
    std::vector<RFactor> merged;
    for (const auto& f : den) {
      if (f.k == 0) continue;
      if (!merged.empty() && merged.back().shift_s == f.shift_s && merged.back().n == f.n)
        merged.back().k += f.k;
      else
        merged.push_back(f);
    }
    den = std::move(merged);
  }
};

class RadialFn {
 public:
  std::vector<RTerm> terms;

  RadialFn() = default;

  static RadialFn monomial(int m, const FieldElem& c = FieldElem(1)) {
    RadialFn f;
    if (!c.is_zero()) f.terms.push_back({{{m, c}}, {}});
    return f;
  }
  static RadialFn one() { return monomial(0); }
  // num(r) / (1 + (s^shift_s r)^n)^k
  static RadialFn rational(Laurent num, int shift_s, int n, int k) {
    RadialFn f;
    RTerm t{std::move(num), {{shift_s, n, k}}};
    t.tidy();
    if (!t.num.empty()) f.terms.push_back(std::move(t));
    return f;
  }

  // r -> s^t r.  Coefficients of r^m pick up s^{t m}; pole moduli shift.
  RadialFn scale_arg(int t) const {
    RadialFn out;
    for (const auto& tm : terms) {
      RTerm nt;
      for (const auto& [m, c] : tm.num) nt.num.emplace(m, c * FieldElem::s_power(t * m));
      for (auto f : tm.den) {
        f.shift_s += t;
        nt.den.push_back(f);
      }
      nt.tidy();
      out.terms.push_back(std::move(nt));
    }
    return out;
  }

  RadialFn conj_coeffs() const {
    RadialFn out;
    for (const auto& tm : terms) {
      RTerm nt;
      for (const auto& [m, c] : tm.num) nt.num.emplace(m, c.conj());
      nt.den = tm.den;
      out.terms.push_back(std::move(nt));
    }
    return out;
  }

  friend RadialFn operator+(const RadialFn& a, const RadialFn& b) {
    RadialFn out = a;
    out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
    out.collect();
    return out;
  }
  friend RadialFn operator-(const RadialFn& a, const RadialFn& b) {
    return a + (FieldElem(-1) * b);
  }
  friend RadialFn operator*(const FieldElem& c, const RadialFn& a) {
    RadialFn out;
    if (c.is_zero()) return out;
    for (const auto& tm : a.terms) {
      RTerm nt;
      for (const auto& [m, cm] : tm.num) nt.num.emplace(m, c * cm);
      nt.den = tm.den;
      out.terms.push_back(std::move(nt));
    }
    return out;
  }
  friend RadialFn operator*(const RadialFn& a, const RadialFn& b) {
    RadialFn out;
    for (const auto& ta : a.terms)
      for (const auto& tb : b.terms) {
        RTerm nt;
        nt.num = detail::laurent_mul(ta.num, tb.num);
        nt.den = ta.den;
        nt.den.insert(nt.den.end(), tb.den.begin(), tb.den.end());
        nt.tidy();
        if (!nt.num.empty()) out.terms.push_back(std::move(nt));
      }
    out.collect();
    return out;
  }

  // Everything over the least common denominator.  No factor/numerator
  // cancellation is attempted; zero detection does not need it.
  std::pair<Laurent, std::vector<RFactor>> canonical() const {
    std::map<std::pair<int, int>, int> lcm;  // (shift, n) -> max k
    for (const auto& tm : terms)
      for (const auto& f : tm.den) {
        int& k = lcm[{f.shift_s, f.n}];
        k = std::max(k, f.k);
      }
    Laurent num;
    for (const auto& tm : terms) {
      Laurent part = tm.num;
      for (const auto& [base, K] : lcm) {
        int have = 0;
        for (const auto& f : tm.den)
          if (f.shift_s == base.first && f.n == base.second) have = f.k;
        if (K > have)
          part = detail::laurent_mul(part, detail::expand_factor(base.first, base.second, K - have));
      }
      detail::laurent_add(num, part);
    }
    std::vector<RFactor> den;
    if (!num.empty())
      for (const auto& [base, K] : lcm) den.push_back({base.first, base.second, K});
    return {std::move(num), std::move(den)};
  }

  bool is_zero() const {
    if (terms.empty()) return true;
    return canonical().first.empty();
  }

  friend bool operator==(const RadialFn& a, const RadialFn& b) { return (a - b).is_zero(); }
  friend bool operator!=(const RadialFn& a, const RadialFn& b) { return !(a == b); }

  std::complex<double> eval(double q0, double r) const;

  // Growth order at r -> infinity of the reduced form; INT_MIN for zero.
  int deg_infinity() const {
    auto [num, den] = canonical();
    if (num.empty()) return std::numeric_limits<int>::min();
    int d = num.rbegin()->first;
    for (const auto& f : den) d -= f.n * f.k;
    return d;
  }

  // Poles compatible with the half-integer lattice |r| in q^{Z + beta} and
  // phase count dividing N: factor (1+(s^j r)^n)^k qualifies iff n | N and
  // j = -8 beta (mod 8).  Pole-free terms always qualify.
  bool admissible(int beta_half, int N) const {
    const int want = beta_half == 0 ? 0 : 4;
    auto [num, den] = canonical();
    (void)num;
    for (const auto& f : den) {
      if (N % f.n != 0) return false;
      if (((f.shift_s % 8) + 8) % 8 != want) return false;
    }
    return true;
  }

 private:
  // Merge terms sharing a denominator; drop vanished ones.
  void collect() {
    std::map<std::vector<RFactor>, Laurent> by_den;
    for (auto& tm : terms) {
      tm.tidy();
      detail::laurent_add(by_den[tm.den], tm.num);
    }
    terms.clear();
    for (auto& [den, num] : by_den) {
      if (num.empty()) continue;
      terms.push_back({std::move(num), den});
    }
  }
};

// A radial function pinned to one value of q, ready for pointwise use.
// Compiling goes through the combined form: summand coefficients can carry
// poles in s (difference quotients at q = 1) that only cancel once the terms
// sit over one denominator.
class RadialProfile {
 public:
  RadialProfile(const RadialFn& f, double q0) {
    const double s0 = std::pow(q0, 1.0 / 8.0);
    auto [num, den] = f.canonical();
    for (const auto& [m, c] : num) num_.emplace_back(m, c.eval_q(q0));
    for (const auto& fac : den) den_.push_back({std::pow(s0, fac.shift_s), fac.n, fac.k});
  }

  std::complex<double> operator()(double r) const {
    std::complex<double> v = 0;
    for (const auto& [m, c] : num_) v += c * std::pow(r, m);
    for (const auto& f : den_) v /= std::pow(1.0 + std::pow(f.scale * r, f.n), f.k);
    return v;
  }

 private:
  struct Factor {
    double scale;
    int n, k;
  };
  std::vector<std::pair<int, std::complex<double>>> num_;
  std::vector<Factor> den_;
};

inline std::complex<double> RadialFn::eval(double q0, double r) const {
  return RadialProfile(*this, q0)(r);
}

// Constants moving one derivative across the central squared radius:
//   d_a r^2 = k x_lowered(a) + c r^2 d_a,  x_lowered(a) = q^{rho(a)} x^{-a}.
// Both are fitted against the rewriting engine and verified to leave no
// residual for every label; c must come out a pure (even) power of s so that
// f -> f(c r^2) is an argument scaling inside the family.
struct RadialConstants {
  FieldElem k_const;
  FieldElem c_const;
  int c_exp_s = 0;  // c_const = s^{c_exp_s}
};

inline NCExpr lowered_coordinate(const IndexSet& idx, int a) {
  return idx.q_rho(a) * NCExpr::generator(Species::X, -a);
}

inline RadialConstants derive_radial_constants(const RuleSet& rs) {
  const IndexSet& idx = rs.sp.idx;
  const NCExpr r2 = radius_squared(idx);
  RadialConstants rc;
  bool first = true;
  for (int a : idx.labels()) {
    const NCExpr lhs = rs.normal_order(rs.mul(NCExpr::generator(Species::D, a), r2));
    const NCExpr rhs = rs.normal_order(rs.mul(r2, NCExpr::generator(Species::D, a)));
    const Word wx(1, letter(Species::X, -a));
    auto itx = lhs.terms.find(wx);
    if (itx == lhs.terms.end())
      throw std::logic_error("radial constants: no coordinate term in d_a r^2");
    FieldElem k = itx->second / idx.q_rho(a);
    if (rhs.is_zero()) throw std::logic_error("radial constants: r^2 d_a collapsed");
    const auto& probe = *rhs.terms.begin();
    auto itp = lhs.terms.find(probe.first);
    if (itp == lhs.terms.end())
      throw std::logic_error("radial constants: probe word missing from d_a r^2");
    FieldElem c = itp->second / probe.second;
    NCExpr residual = lhs - k * rs.normal_order(lowered_coordinate(idx, a)) - c * rhs;
    if (!residual.is_zero())
      throw std::logic_error("radial constants: ansatz does not close for label " +
                             std::to_string(a) + "; residual " + std::to_string(residual.terms.size()) +
                             " terms");
    if (first) {
      rc.k_const = k;
      rc.c_const = c;
      first = false;
    } else if (rc.k_const != k || rc.c_const != c) {
      throw std::logic_error("radial constants: label dependence detected");
    }
  }
  // Pure power of s, even exponent, so that sqrt(c) scales the argument.
  const Poly& n = rc.c_const.num;
  if (!rc.c_const.den.is_one() || !n.is_monomial() || !n.lead().is_one() || n.deg() % 2 != 0)
    throw std::logic_error("radial constants: scale constant is not an even power of s");
  rc.c_exp_s = n.deg();
  return rc;
}

// (Df)(r^2) = (f(r^2) - f(c r^2)) / ((1 - c) r^2), inside the family.
// On r^j (any integer j, odd included via the half-scale) this is
// (1 - c^{j/2}) / (1 - c) r^{j-2}.
inline RadialFn radial_difference(const RadialFn& f, const RadialConstants& rc) {
  RadialFn diff = f - f.scale_arg(rc.c_exp_s / 2);
  const FieldElem pref = (FieldElem(1) - rc.c_const).inv();
  return diff * RadialFn::monomial(-2, pref);
}

// d_a acting on S(x) f(r^2): the crossing constants split the action into
//   k x_lowered(a) S . (Df)  +  (d_a acting on S) . f(c r^2).
// Returned as (coordinate polynomial, radial factor) pairs.
inline std::vector<std::pair<NCExpr, RadialFn>> apply_partial_radial(
    const RuleSet& rs, const RadialConstants& rc, int a, const NCExpr& S, const RadialFn& f,
    PartialMemo* memo = nullptr) {
  std::vector<std::pair<NCExpr, RadialFn>> out;
  NCExpr P1 = rs.normal_order(rs.mul(lowered_coordinate(rs.sp.idx, a), S));
  RadialFn g1 = rc.k_const * radial_difference(f, rc);
  if (!P1.is_zero() && !g1.is_zero()) out.emplace_back(std::move(P1), std::move(g1));
  NCExpr P2 = memo ? apply_partial(rs, a, S, *memo) : apply_partial(rs, a, S);
  if (!P2.is_zero()) out.emplace_back(std::move(P2), f.scale_arg(rc.c_exp_s / 2));
  return out;
}

// Polynomial members (no denominators, even nonnegative powers) back as
// elements of the coordinate algebra.
inline NCExpr radial_to_polynomial(const RuleSet& rs, const RadialFn& f) {
  auto [num, den] = f.canonical();
  if (!den.empty())
    throw std::invalid_argument("radial function with poles is not a polynomial");
  const NCExpr r2 = rs.normal_order(radius_squared(rs.sp.idx));
  NCExpr out;
  for (const auto& [m, c] : num) {
    if (m < 0 || m % 2 != 0)
      throw std::invalid_argument("radial power not an even nonnegative integer");
    out += c * rs.pow(r2, m / 2);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Numeric weight multiplier on the log-radial grid.
//
// In y = ln r, with the profile conjugated by e^{w0 y} (w0 = N/2 plus the
// angular degree), the k-th power of the weight operator is the Fourier
// multiplier q^{k w^2 / 4}.  For one sign of k ln q the multiplier decays and
// smooths; for the other it grows without bound and only spectra with
// super-Gaussian decay stay in its domain, so the amplification is gated by a
// spectral floor and refused when band-edge content would cross it.

struct NuOptions {
  int M = 16;                  // grid steps per lattice unit ln q (>= 8)
  double boundary_rel = 1e-12; // window grows until the profile falls below this
  double floor_rel = 1e-13;    // spectral floor, relative to the peak mode
  bool force_window = false;   // take [y_lo, y_hi] as given (no decay search)
  int max_samples = 1 << 21;
};

struct NuTransform {
  bool applied = false;
  std::string note;
  double y0 = 0.0;
  double h = 0.0;
  int n = 0;
  std::vector<std::complex<double>> values;  // transformed profile at y0 + j h
  double err_est = 0.0;

  std::complex<double> at_y(double y) const {
    const double t = (y - y0) / h;
    const long j = std::lround(t);
    if (j < 0 || j >= n || std::abs(t - (double)j) > 1e-6)
      throw std::logic_error("requested point is off the transform grid");
    return values[(size_t)j];
  }
  std::complex<double> at_r(double r) const { return at_y(std::log(r)); }
};

inline NuTransform nu_radial_numeric(const std::function<std::complex<double>(double)>& f_of_r,
                                     double q0, int k, double w0, double y_lo, double y_hi,
                                     const NuOptions& opt = {}) {
  NuTransform tr;
  if (q0 <= 0.0 || q0 == 1.0) {
    tr.note = "weight multiplier needs 0 < q != 1";
    return tr;
  }
  if (opt.M < 8) {
    tr.note = "grid refinement below the supported minimum";
    return tr;
  }
  const double lnq = std::log(q0);
  const double h = std::abs(lnq) / opt.M;
  auto psi = [&](double y) { return std::exp(w0 * y) * f_of_r(std::exp(y)); };

  // Window: anchored at y_lo so lattice points y_lo + j h stay on-grid.
  long lo = 0, hi = (long)std::ceil((y_hi - y_lo) / h);
  if (!opt.force_window) {
    double peak = 0.0;
    for (long j = lo; j <= hi; ++j) peak = std::max(peak, std::abs(psi(y_lo + j * h)));
    long step = 4 * opt.M;
    long guard = 0;
    while (std::abs(psi(y_lo + lo * h)) > opt.boundary_rel * peak ||
           std::abs(psi(y_lo + hi * h)) > opt.boundary_rel * peak) {
      if (std::abs(psi(y_lo + lo * h)) > opt.boundary_rel * peak) lo -= step;
      if (std::abs(psi(y_lo + hi * h)) > opt.boundary_rel * peak) hi += step;
      for (long j = 0; j < step; ++j) {
        peak = std::max(peak, std::abs(psi(y_lo + (lo + j) * h)));
        peak = std::max(peak, std::abs(psi(y_lo + (hi - j) * h)));
      }
      step *= 2;  // slow log-grid decay needs geometric growth
      if (++guard > 24 || (hi - lo) > opt.max_samples) {
        tr.note = "profile does not decay on the log grid; window condition failed";
        return tr;
      }
    }
  }
  int n = 1;
  while (n < hi - lo + 1) n <<= 1;
  if (n > opt.max_samples) {
    tr.note = "window exceeds the sample budget";
    return tr;
  }
  // Center the retained window inside the transform window.
  long shift = (n - (hi - lo + 1)) / 2;
  lo -= shift;

  std::vector<std::complex<double>> buf(n);
  for (int j = 0; j < n; ++j) buf[j] = psi(y_lo + (lo + j) * h);

  fftw_plan fwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);

  double peak_hat = 0.0;
  for (const auto& v : buf) peak_hat = std::max(peak_hat, std::abs(v));
  const double floor = opt.floor_rel * peak_hat;
  const bool growing = k * lnq > 0.0;
  double discarded = 0.0, total = 0.0, worst_amp = 0.0;
  for (int m = 0; m < n; ++m) {
    double w = 2.0 * M_PI * (m <= n / 2 ? m : m - n) / (n * h);
    total += std::abs(buf[m]);
    if (growing && std::abs(buf[m]) < floor) {
      discarded += std::abs(buf[m]);
      buf[m] = 0.0;
      continue;
    }
    const double mult = std::exp(0.25 * k * lnq * w * w);
    if (growing) worst_amp = std::max(worst_amp, std::abs(buf[m]) * mult);
    buf[m] *= mult;
  }
  if (growing && worst_amp > peak_hat / opt.floor_rel) {
    tr.note = "band-edge content would be amplified past the spectral floor; "
              "profile is outside the domain of the growing multiplier";
    return tr;
  }

  fftw_plan bwd = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(buf.data()),
                                   reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD,
                                   FFTW_ESTIMATE);
  fftw_execute(bwd);
  fftw_destroy_plan(bwd);

  tr.applied = true;
  tr.y0 = y_lo + lo * h;
  tr.h = h;
  tr.n = n;
  tr.values.resize(n);
  for (int j = 0; j < n; ++j)
    tr.values[j] = buf[j] / (double)n * std::exp(-w0 * (tr.y0 + j * h));
  tr.err_est = opt.boundary_rel + (total > 0 ? discarded / total : 0.0);
  return tr;
}

inline NuTransform nu_radial_numeric(const RadialFn& f, double q0, int k, double w0, double y_lo,
                                     double y_hi, const NuOptions& opt = {}) {
  const RadialProfile p(f, q0);
  return nu_radial_numeric([&p](double r) { return p(r); }, q0, k, w0, y_lo, y_hi, opt);
}

}  // namespace qeuclid
