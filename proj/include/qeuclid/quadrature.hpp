#pragma once
// Integration and weighted scalar products.  The integral of a field is the
// radial integral of its rotationally trivial component against a scaling-
// covariant measure (continuum or lattice).  Scalar products insert the
// inverse-square weight multiplier, evaluated exactly on power-law radial
// parts and numerically on rational ones; Hermiticity of the momenta and the
// Laplacian, Gram positivity, and the kinetic action ride on top.
#include "qeuclid/harmonics.hpp"
#include "qeuclid/radial.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qeuclid {

enum class MeasureKind { Uniform, Jackson };

struct Measure {
  MeasureKind kind = MeasureKind::Jackson;
  double q_value = 1.2;
  int beta_half = 0;  // lattice base point r0 = q^{beta_half/2}
  int window = 60;    // lattice indices |n| <= window

  double r0() const { return std::pow(q_value, 0.5 * beta_half); }
};

struct IntegralValue {
  std::complex<double> value{};
  double abs_scale = 0.0;  // integral of the pointwise magnitude
  double err_est = 0.0;
};

struct WaveTerm {
  int l = 0;
  int I = 0;
  RadialFn radial;
};

// Finite sum of (harmonic, radial factor) components.
struct WaveFunction {
  std::vector<WaveTerm> terms;

  void add(int l, int I, const RadialFn& f) {
    for (auto& t : terms)
      if (t.l == l && t.I == I) {
        t.radial = t.radial + f;
        return;
      }
    terms.push_back({l, I, f});
  }
  void prune() {
    std::vector<WaveTerm> kept;
    for (auto& t : terms)
      if (!t.radial.is_zero()) kept.push_back(std::move(t));
    terms = std::move(kept);
  }
  bool admissible(int beta_half, int N) const {
    for (const auto& t : terms)
      if (!t.radial.admissible(beta_half, N)) return false;
    return true;
  }
  // Growth order of the field at r -> infinity.
  int decay_order() const {
    int d = std::numeric_limits<int>::min();
    for (const auto& t : terms) {
      int di = t.radial.deg_infinity();
      if (di != std::numeric_limits<int>::min()) d = std::max(d, t.l + di);
    }
    return d;
  }
};

class QuadratureContext {
 public:
  QuadratureContext(const RuleSet& rs, const HarmonicTable& table)
      : rs_(&rs), table_(&table), rc_(derive_radial_constants(rs)) {}

  const RuleSet& rules() const { return *rs_; }
  const HarmonicTable& table() const { return *table_; }
  const RadialConstants& constants() const { return rc_; }
  int dim() const { return rs_->sp.idx.N; }

  PartialMemo memo;

 private:
  const RuleSet* rs_;
  const HarmonicTable* table_;
  RadialConstants rc_;
};

// ---------------------------------------------------------------------------
// Radial integrals of the trivial angular component.

inline IntegralValue integrate_lattice(const Measure& mu, int N,
                                       const std::function<std::complex<double>(double)>& f0) {
  IntegralValue out;
  const double q = mu.q_value;
  const double w = std::abs(q - 1.0);
  double prev_lo = 0, prev_hi = 0, last_lo = 0, last_hi = 0;
  for (int n = -mu.window; n <= mu.window; ++n) {
    const double r = mu.r0() * std::pow(q, n);
    const std::complex<double> term = w * std::pow(r, N) * f0(r);
    out.value += term;
    out.abs_scale += std::abs(term);
    if (n == -mu.window + 1) prev_lo = std::abs(term);
    if (n == -mu.window) last_lo = std::abs(term);
    if (n == mu.window - 1) prev_hi = std::abs(term);
    if (n == mu.window) last_hi = std::abs(term);
  }
  // Geometric tail bound from the outermost ratios, when they contract.
  auto tail = [](double last, double prev) {
    if (last <= 0) return 0.0;
    const double rho = prev > 0 ? last / prev : 1.0;
    return rho < 1.0 ? last * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
  };
  out.err_est = tail(last_lo, prev_lo) + tail(last_hi, prev_hi);
  return out;
}

inline IntegralValue integrate_continuum(int N,
                                         const std::function<std::complex<double>(double)>& f0) {
  IntegralValue out;
  boost::math::quadrature::exp_sinh<double> integrator;
  double err_re = 0, err_im = 0;
  // The quadrature probes far into the tails, where a decaying rational
  // overflows to inf/inf; the true value there is below underflow.
  auto eval = [&](double r) -> std::complex<double> {
    const std::complex<double> v = std::pow(r, N - 1) * f0(r);
    return std::isfinite(v.real()) && std::isfinite(v.imag()) ? v : std::complex<double>{};
  };
  auto g_re = [&](double r) { return eval(r).real(); };
  auto g_im = [&](double r) { return eval(r).imag(); };
  auto g_abs = [&](double r) { return std::abs(eval(r)); };
  const double tol = 1e-10;
  out.value = {integrator.integrate(g_re, tol, &err_re),
               integrator.integrate(g_im, tol, &err_im)};
  out.abs_scale = integrator.integrate(g_abs, tol);
  out.err_est = err_re + err_im;
  return out;
}

inline IntegralValue integrate_radial(const Measure& mu, int N,
                                      const std::function<std::complex<double>(double)>& f0) {
  return mu.kind == MeasureKind::Jackson ? integrate_lattice(mu, N, f0)
                                         : integrate_continuum(N, f0);
}

// Only the rotationally trivial component contributes to the integral.
inline IntegralValue integrate(QuadratureContext& ctx, const Measure& mu,
                               const WaveFunction& f) {
  RadialFn f0;
  for (const auto& t : f.terms)
    if (t.l == 0) f0 = f0 + t.radial;
  if (f0.is_zero()) return {};
  const int N = ctx.dim();
  const int deg = f0.deg_infinity();
  if (deg >= -N)
    throw std::domain_error("integral diverges: the trivial component decays like r^" +
                            std::to_string(deg) + " but needs r^" + std::to_string(-N - 1) +
                            " or faster");
  const RadialProfile prof(f0, mu.q_value);
  return integrate_radial(mu, N, [&](double r) { return prof(r); });
}

// ---------------------------------------------------------------------------
// Operators on wavefunctions.

inline WaveFunction scale_wave(const FieldElem& c, const WaveFunction& f) {
  WaveFunction out;
  for (const auto& t : f.terms) out.terms.push_back({t.l, t.I, c * t.radial});
  return out;
}

inline WaveFunction apply_partial_wave(QuadratureContext& ctx, int a, const WaveFunction& f) {
  WaveFunction out;
  for (const auto& t : f.terms) {
    const NCExpr& S = ctx.table().level(t.l)[t.I].rep;
    auto parts = apply_partial_radial(ctx.rules(), ctx.constants(), a, S, t.radial, &ctx.memo);
    for (const auto& [poly, g] : parts) {
      HarmonicExpansion he = ctx.table().decompose(poly);
      for (const auto& ht : he.terms)
        for (const auto& [m, c] : ht.radial) out.add(ht.l, ht.I, RadialFn::monomial(m, c) * g);
    }
  }
  out.prune();
  return out;
}

// p^a = i d^a with the index raised by the metric: d^a = q^{rho(a)} d_{-a}.
inline WaveFunction apply_momentum(QuadratureContext& ctx, int a, const WaveFunction& f) {
  const FieldElem c = FieldElem::i() * ctx.rules().sp.idx.q_rho(a);
  return scale_wave(c, apply_partial_wave(ctx, -a, f));
}

// Laplacian -q^N g^{ab} d_b d_a, matching the exterior-calculus convention.
inline WaveFunction apply_laplace_wave(QuadratureContext& ctx, const WaveFunction& f) {
  const IndexSet& idx = ctx.rules().sp.idx;
  WaveFunction acc;
  for (int a : idx.labels()) {
    WaveFunction w = apply_partial_wave(ctx, -a, apply_partial_wave(ctx, a, f));
    w = scale_wave(idx.q_rho(a), w);
    for (const auto& t : w.terms) acc.add(t.l, t.I, t.radial);
  }
  acc.prune();
  return scale_wave(FieldElem(-1) * FieldElem::s_power(8 * idx.N), acc);
}

// ---------------------------------------------------------------------------
// The inverse-square weight multiplier on a radial factor of an angular
// degree-l component: exact on power laws (diagonal), numeric otherwise.

struct WeightedRadial {
  bool exact = true;
  RadialFn fn;               // exact path (weights folded into coefficients)
  NuTransform tr;            // numeric path
  std::complex<double> level = 1.0;
  double q0 = 1.0;
  double arg_shift_y = 0.0;  // evaluate at ln r + shift (lattice-aligned)

  // Pointwise closure; compiles the exact path once, so build it outside
  // the quadrature loop.
  std::function<std::complex<double>(double)> evaluator() const {
    if (exact) return [p = RadialProfile(fn, q0)](double r) { return p(r); };
    return [t = tr, lvl = level, sh = arg_shift_y](double r) { return lvl * t.at_y(std::log(r) + sh); };
  }
  // r -> s^t r on the transformed profile.
  void shift_arg(int t_s) {
    if (exact)
      fn = fn.scale_arg(t_s);
    else
      arg_shift_y += t_s * std::log(q0) / 8.0;
  }
};

inline WeightedRadial nu_inverse_square(QuadratureContext& ctx, const Measure& mu, int l,
                                        const RadialFn& g) {
  const int N = ctx.dim();
  WeightedRadial out;
  out.q0 = mu.q_value;
  if (mu.q_value == 1.0) {  // the multiplier is the identity at q = 1
    out.fn = g;
    return out;
  }
  auto [num, den] = g.canonical();
  if (den.empty()) {
    RadialFn acc;
    for (const auto& [m, c] : num)
      acc = acc + RadialFn::monomial(m, c * FieldElem::s_power(weight_exponent_s(N, l, m, -2)));
    out.fn = acc;
    return out;
  }
  if (mu.q_value < 1.0)
    throw std::runtime_error("the weight multiplier diverges for q < 1; use q > 1");
  if (mu.kind != MeasureKind::Jackson)
    throw std::runtime_error("numeric weight multiplier needs the lattice measure grid");
  const double lnq = std::log(mu.q_value);
  const double y_lo = lnq * (0.5 * mu.beta_half - mu.window);
  const double y_hi = lnq * (0.5 * mu.beta_half + mu.window);
  out.exact = false;
  out.tr = nu_radial_numeric(g, mu.q_value, -2, 0.5 * N + l, y_lo, y_hi);
  if (!out.tr.applied)
    throw std::runtime_error("weight multiplier failed: " + out.tr.note);
  out.level = FieldElem::s_power(4 * l * (l + N - 2)).eval_q(mu.q_value);
  return out;
}

// ---------------------------------------------------------------------------
// Scalar product (phi, psi) = integral of phi^* (weight^{-2} psi): the angular
// pairing handles star(S) S' exactly; the radial factor of psi is transformed.

inline std::complex<double> scalar_product(QuadratureContext& ctx, const Measure& mu,
                                           const WaveFunction& phi, const WaveFunction& psi) {
  const double q = mu.q_value;
  std::complex<double> out = 0;
  for (const auto& tp : phi.terms)
    for (const auto& tq : psi.terms) {
      if (tp.l != tq.l) continue;  // exact level orthogonality of the pairing
      const NCExpr& Sp = ctx.table().level(tp.l)[tp.I].rep;
      const NCExpr& Sq = ctx.table().level(tq.l)[tq.I].rep;
      const FieldElem z = ctx.table().pairing(Sp, Sq, tp.l);
      if (z.is_zero()) continue;
      const WeightedRadial G = nu_inverse_square(ctx, mu, tq.l, tq.radial);
      const auto ge = G.evaluator();
      // conj(f)(r) for real r is the coefficient-conjugated function
      const RadialProfile fbar(tp.radial.conj_coeffs(), q);
      const int twol = 2 * tp.l;
      IntegralValue iv = integrate_radial(mu, ctx.dim(), [&](double r) {
        return fbar(r) * std::pow(r, twol) * ge(r);
      });
      out += z.eval_q(q) * iv.value;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Verification-style outcomes.

struct CheckOutcome {
  bool applicable = true;
  std::string reason;
  double rel_err = 0.0;
  std::complex<double> lhs{};
  std::complex<double> rhs{};
};

// The integral of a derivative vanishes when the field decays fast enough.
inline CheckOutcome stokes_check(QuadratureContext& ctx, const Measure& mu,
                                 const WaveFunction& f) {
  const int N = ctx.dim();
  CheckOutcome out;
  if (f.decay_order() > -N) {
    out.applicable = false;
    out.reason = "field does not decrease faster than r^{-(N-1)}";
    return out;
  }
  for (int a : ctx.rules().sp.idx.labels()) {
    WaveFunction df = apply_partial_wave(ctx, a, f);
    IntegralValue iv = integrate(ctx, mu, df);
    const double rel = std::abs(iv.value) / std::max(iv.abs_scale, 1e-300);
    out.rel_err = std::max(out.rel_err, rel);
  }
  return out;
}

inline CheckOutcome hermiticity_pair(QuadratureContext& ctx, const Measure& mu,
                                     const WaveFunction& phi, const WaveFunction& psi,
                                     const std::function<WaveFunction(const WaveFunction&)>& op) {
  const int N = ctx.dim();
  CheckOutcome out;
  if (!phi.admissible(mu.beta_half, N) || !psi.admissible(mu.beta_half, N)) {
    out.applicable = false;
    out.reason = "poles off the lattice q^{j+beta} exp(i pi (2k+1)/n); inadmissible pair";
    return out;
  }
  out.lhs = scalar_product(ctx, mu, phi, op(psi));
  out.rhs = scalar_product(ctx, mu, op(phi), psi);
  const double scale = std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-300});
  out.rel_err = std::abs(out.lhs - out.rhs) / scale;
  return out;
}

inline CheckOutcome hermiticity_momentum(QuadratureContext& ctx, const Measure& mu,
                                         const WaveFunction& phi, const WaveFunction& psi,
                                         int a) {
  return hermiticity_pair(ctx, mu, phi, psi,
                          [&](const WaveFunction& w) { return apply_momentum(ctx, a, w); });
}

inline CheckOutcome hermiticity_laplace(QuadratureContext& ctx, const Measure& mu,
                                        const WaveFunction& phi, const WaveFunction& psi) {
  return hermiticity_pair(ctx, mu, phi, psi,
                          [&](const WaveFunction& w) { return apply_laplace_wave(ctx, w); });
}

inline std::vector<std::vector<std::complex<double>>> gram_matrix(
    QuadratureContext& ctx, const Measure& mu, const std::vector<WaveFunction>& fs) {
  const size_t n = fs.size();
  std::vector<std::vector<std::complex<double>>> g(n, std::vector<std::complex<double>>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) g[i][j] = scalar_product(ctx, mu, fs[i], fs[j]);
  return g;
}

inline double gram_min_eigenvalue(const std::vector<std::vector<std::complex<double>>>& g) {
  const int n = (int)g.size();
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g[i][j];
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  return es.eigenvalues().minCoeff();
}

// Kinetic term of the action: (Laplacian f, f) + M^2 (f, f), summands apart.
struct ActionValue {
  double kinetic = 0.0;
  double mass = 0.0;
  double total = 0.0;
  double imag_leak = 0.0;  // magnitude of the discarded imaginary parts
};

inline ActionValue kinetic_action(QuadratureContext& ctx, const Measure& mu,
                                  const WaveFunction& f, double mass_param) {
  ActionValue out;
  const std::complex<double> kin = scalar_product(ctx, mu, apply_laplace_wave(ctx, f), f);
  const std::complex<double> nrm = scalar_product(ctx, mu, f, f);
  out.kinetic = kin.real();
  out.mass = mass_param * mass_param * nrm.real();
  out.total = out.kinetic + out.mass;
  out.imag_leak = std::abs(kin.imag()) + mass_param * mass_param * std::abs(nrm.imag());
  return out;
}

// ---------------------------------------------------------------------------
// p-form scalar products through the Hodge map.  A p-form term is a frame
// word times a harmonic times a radial factor; the product star(alpha) x
// *(weighted beta) is a top form whose scalar part integrates.  Radial
// factors cross frame letters by a pure argument scale measured from the
// engine, never assumed.

struct FormTerm {
  Word xi_word;
  int l = 0;
  int I = 0;
  RadialFn radial;
};
struct FormWave {
  std::vector<FormTerm> terms;
};

namespace detail {

// A pure scale is s^e with either sign of e; anything else is rejected.
inline int pure_s_exponent(const FieldElem& ratio) {
  const Poly& n = ratio.num;
  const Poly& d = ratio.den;
  if (!n.is_monomial() || !n.lead().is_one() || !d.is_monomial() || !d.lead().is_one())
    throw std::logic_error("frame crossing is not a pure power of s");
  return n.deg() - d.deg();
}

// s-exponent Gamma with (top frame word) r^2 = s^Gamma r^2 (top frame word).
// Individual frame letters mix under the braiding, but the volume direction
// is one-dimensional, so the full top word crosses by a pure scale.
inline int top_radial_crossing(const RuleSet& rs) {
  Word w;
  for (int a : rs.sp.idx.labels()) w.push_back(letter(Species::XI, a));
  const NCExpr top = rs.normal_order(NCExpr::monomial(w));
  if (top.terms.size() != 1) throw std::logic_error("top frame word is not canonical");
  const NCExpr r2 = radius_squared(rs.sp.idx);
  const NCExpr lhs = rs.normal_order(rs.mul(top, r2));
  const NCExpr rhs = rs.normal_order(rs.mul(r2, top));
  if (rhs.is_zero()) throw std::logic_error("frame crossing probe collapsed");
  const auto& pr = *rhs.terms.begin();
  auto it = lhs.terms.find(pr.first);
  if (it == lhs.terms.end()) throw std::logic_error("frame crossing probe mismatch");
  const FieldElem ratio = it->second / pr.second;
  const int e = pure_s_exponent(ratio);
  if (!(lhs - ratio * rhs).is_zero())
    throw std::logic_error("frame crossing is not a uniform scale");
  return e;
}

// s-exponent with (scale generator) acting on a coordinate as s^e x.
inline int scale_action_exponent(const RuleSet& rs) {
  const NCExpr x0 = NCExpr::generator(Species::X, rs.sp.idx.labels().front());
  const NCExpr img = act(rs, NCExpr::generator(Species::LAM, 1), x0);
  if (img.terms.size() != 1) throw std::logic_error("scale action probe not diagonal");
  return pure_s_exponent(img.terms.begin()->second / x0.terms.begin()->second);
}

}  // namespace detail

inline std::complex<double> scalar_product_forms(QuadratureContext& ctx, const Hodge& hd,
                                                 const Measure& mu, const FormWave& alpha,
                                                 const FormWave& beta) {
  const RuleSet& rs = ctx.rules();
  const int N = ctx.dim();
  const double q = mu.q_value;

  size_t p = alpha.terms.empty() ? 0 : alpha.terms.front().xi_word.size();
  for (const auto& t : alpha.terms)
    if (t.xi_word.size() != p) throw std::invalid_argument("mixed form degrees");
  for (const auto& t : beta.terms)
    if (t.xi_word.size() != p) throw std::invalid_argument("mixed form degrees");

  if (p == 0) {  // *1 = dV: the formula collapses to the function product
    WaveFunction a, b;
    for (const auto& t : alpha.terms) a.add(t.l, t.I, t.radial);
    for (const auto& t : beta.terms) b.add(t.l, t.I, t.radial);
    return scalar_product(ctx, mu, a, b);
  }

  const int gamma_top = detail::top_radial_crossing(rs);
  const int e_lam = detail::scale_action_exponent(rs);
  if (gamma_top % 2 != 0) throw std::logic_error("frame crossing scale is odd");

  // The scale letters shift lattice queries; keep them inside the grid.
  Measure wide = mu;
  if (wide.kind == MeasureKind::Jackson) wide.window += 2 * (int)p + 2;

  std::complex<double> out = 0;
  for (const auto& ti : alpha.terms)
    for (const auto& tj : beta.terms) {
      const NCExpr wi = rs.mul(NCExpr::monomial(ti.xi_word), ctx.table().level(ti.l)[ti.I].rep);
      const NCExpr wj = rs.mul(NCExpr::monomial(tj.xi_word), ctx.table().level(tj.l)[tj.I].rep);
      const NCExpr T = rs.mul(star_map(rs, wi), hodge_op(hd, wj));

      // Top-form words: [frame top][coordinate word][scale letters].
      std::map<int, NCExpr> poly_by_scale;
      Word top;
      for (const auto& [w, c] : T.terms) {
        size_t i = 0;
        while (i < w.size() && species_of(w[i]) == Species::XI) ++i;
        const Word xi_part = w.substr(0, i);
        if (top.empty())
          top = xi_part;
        else if (xi_part != top)
          throw std::logic_error("top-form frame word is not unique");
        Word coord;
        int lam = 0;
        for (; i < w.size(); ++i) {
          const Species sp = species_of(w[i]);
          if (sp == Species::X) {
            coord.push_back(w[i]);
          } else if (sp == Species::LAM) {
            lam += index_of(w[i]) > 0 ? 1 : -1;
          } else {
            throw std::logic_error("unexpected letter in a top-form word");
          }
        }
        poly_by_scale[lam].add_term(coord, c);
      }
      if ((int)top.size() != N) throw std::logic_error("product is not a top form");

      // The left radial factor crosses the whole top word; the transformed
      // right factor absorbs the scale-letter action.
      const RadialProfile fbar(ti.radial.conj_coeffs().scale_arg(-gamma_top / 2), q);
      const WeightedRadial G0 = nu_inverse_square(ctx, wide, tj.l, tj.radial);
      for (const auto& [lam, poly] : poly_by_scale) {
        if (poly.is_zero()) continue;
        HarmonicExpansion he = ctx.table().decompose(poly);
        RadialFn p0;
        for (const auto& ht : he.terms)
          if (ht.l == 0)
            for (const auto& [m, c] : ht.radial) p0 = p0 + RadialFn::monomial(m, c);
        if (p0.is_zero()) continue;
        WeightedRadial G = G0;
        G.shift_arg(e_lam * lam);
        const auto ge = G.evaluator();
        const RadialProfile pprof(p0, q);
        IntegralValue iv = integrate_radial(mu, N, [&](double r) {
          return fbar(r) * pprof(r) * ge(r);
        });
        out += iv.value;
      }
    }
  return out;
}

}  // namespace qeuclid
