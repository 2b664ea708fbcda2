#include <catch2/catch_amalgamated.hpp>
#include <qeuclid/harmonics.hpp>
#include <qeuclid/radial.hpp>

using namespace qeuclid;

namespace {

const RuleSet& rules3() {
  static RuleSet rs = derive_rules(build_structure(3));
  return rs;
}
const RadialConstants& consts3() {
  static RadialConstants rc = derive_radial_constants(rules3());
  return rc;
}

NCExpr xgen(int i) { return NCExpr::generator(Species::X, i); }
NCExpr dgen(int i) { return NCExpr::generator(Species::D, i); }

}  // namespace

TEST_CASE("derivative crossing constants close the ansatz", "[radial]") {
  const RuleSet& rs = rules3();
  const RadialConstants& rc = consts3();  // derivation throws on any residual

  // Classical limit of the crossing relation: d_a r^2 = 2 x_a + r^2 d_a.
  REQUIRE(rc.k_const.at_one() == GaussRat(2));
  REQUIRE(rc.c_const.at_one() == GaussRat(1));
  REQUIRE(rc.c_exp_s % 2 == 0);
  REQUIRE(rc.c_const == FieldElem::s_power(rc.c_exp_s));

  // Induction to higher radial powers must follow from the single relation.
  const NCExpr r2 = rs.normal_order(radius_squared(rs.sp.idx));
  for (int p = 1; p <= 3; ++p) {
    const NCExpr rp = rs.pow(r2, p);
    for (int a : rs.sp.idx.labels()) {
      auto parts = apply_partial_radial(rs, rc, a, NCExpr::one(), RadialFn::monomial(2 * p));
      NCExpr assembled;
      for (const auto& [poly, rad] : parts)
        assembled += rs.mul(poly, radial_to_polynomial(rs, rad));
      REQUIRE(rs.normal_order(assembled) == act(rs, dgen(a), rp));
    }
  }
}

TEST_CASE("difference quotient on integer powers", "[radial]") {
  const RadialConstants& rc = consts3();
  const FieldElem inv = (FieldElem(1) - rc.c_const).inv();
  for (int j : {-2, -1, 1, 2, 3, 4, 6}) {
    RadialFn d = radial_difference(RadialFn::monomial(j), rc);
    FieldElem expect = (FieldElem(1) - FieldElem::s_power(rc.c_exp_s / 2 * j)) * inv;
    REQUIRE(d == RadialFn::monomial(j - 2, expect));
  }
  REQUIRE(radial_difference(RadialFn::one(), rc).is_zero());
}

TEST_CASE("radial family is closed and exact", "[radial]") {
  const RadialConstants& rc = consts3();
  // f = r^2 / (1 + (q r)^3)^2 with q = s^8
  RadialFn f = RadialFn::rational({{2, FieldElem(1)}}, 8, 3, 2);

  SECTION("argument scaling composes and shifts pole moduli") {
    RadialFn g = f.scale_arg(8).scale_arg(-8);
    REQUIRE(g == f);
    RadialFn h = f.scale_arg(4);
    REQUIRE(h.terms.size() == 1);
    REQUIRE(h.terms[0].den[0].shift_s == 12);
    REQUIRE(h.terms[0].num.begin()->second == FieldElem::s_power(8));
  }

  SECTION("arithmetic stays in the family") {
    RadialFn sum = f + RadialFn::monomial(-1);
    RadialFn prod = sum * f;
    auto [num, den] = prod.canonical();
    REQUIRE(den.size() == 1);
    REQUIRE(den[0].n == 3);
    REQUIRE(den[0].k == 4);  // the pole-free summand picked up the full factor
    REQUIRE((f - f).is_zero());
    REQUIRE(f.deg_infinity() == -4);
    REQUIRE(sum.deg_infinity() == -1);  // r^{-1} dominates the decay
    REQUIRE(prod.deg_infinity() == -5);
  }

  SECTION("difference quotient keeps the denominators on the lattice") {
    RadialFn d = radial_difference(f, rc);
    for (const auto& t : d.terms)
      for (const auto& fac : t.den) {
        REQUIRE(fac.n == 3);
        REQUIRE((fac.shift_s == 8 || fac.shift_s == 16));
      }
  }
}

TEST_CASE("pole lattices gate the admissible measures", "[radial]") {
  RadialFn a = RadialFn::rational({{0, FieldElem(1)}}, 8, 3, 1);   // |poles| = q^{-1}
  RadialFn b = RadialFn::rational({{0, FieldElem(1)}}, 12, 3, 1);  // |poles| = q^{-3/2}
  RadialFn c = RadialFn::rational({{0, FieldElem(1)}}, 0, 2, 1);   // phase count 2
  REQUIRE(a.admissible(0, 3));
  REQUIRE_FALSE(a.admissible(1, 3));
  REQUIRE(b.admissible(1, 3));
  REQUIRE_FALSE(b.admissible(0, 3));
  REQUIRE_FALSE(c.admissible(0, 3));
  REQUIRE_FALSE(c.admissible(1, 3));
  REQUIRE(RadialFn::monomial(2).admissible(0, 3));
  REQUIRE(RadialFn::monomial(2).admissible(1, 3));
}

TEST_CASE("split derivative action agrees with the rewriting engine", "[radial]") {
  const RuleSet& rs = rules3();
  const RadialConstants& rc = consts3();
  const NCExpr r2 = rs.normal_order(radius_squared(rs.sp.idx));
  HarmonicTable table(rs);
  PartialMemo memo;

  // Every monomial times every radial power up to total degree 6.
  for (int ds = 0; ds <= 4; ++ds) {
    for (const Word& w : table.monomial_words(ds)) {
      const NCExpr S = NCExpr::monomial(w);
      for (int p = 0; 2 * p + ds <= 6; ++p) {
        const NCExpr field = rs.mul(S, rs.pow(r2, p));
        for (int a : rs.sp.idx.labels()) {
          auto parts = apply_partial_radial(rs, rc, a, S, RadialFn::monomial(2 * p), &memo);
          NCExpr assembled;
          for (const auto& [poly, rad] : parts)
            assembled += rs.mul(poly, radial_to_polynomial(rs, rad));
          REQUIRE(rs.normal_order(assembled) == act(rs, dgen(a), field));
        }
      }
    }
  }

  // Mixed coefficients exercise the linear extension.
  NCExpr S = FieldElem(3) * xgen(1) - FieldElem::q_power(1) * xgen(-1);
  NCExpr field = rs.mul(S, r2);
  for (int a : rs.sp.idx.labels()) {
    auto parts = apply_partial_radial(rs, rc, a, S, RadialFn::monomial(2), &memo);
    NCExpr assembled;
    for (const auto& [poly, rad] : parts)
      assembled += rs.mul(poly, radial_to_polynomial(rs, rad));
    REQUIRE(rs.normal_order(assembled) == act(rs, dgen(a), field));
  }
}

TEST_CASE("numeric weight multiplier on the log grid", "[radial]") {
  const int N = 3;
  const double q0 = 1.2;
  const double w0 = N / 2.0;

  SECTION("zeroth power is the identity") {
    RadialFn f = RadialFn::rational({{0, FieldElem(1)}}, 0, 3, 1);
    NuTransform tr = nu_radial_numeric(f, q0, 0, w0, -2.0, 2.0);
    REQUIRE(tr.applied);
    for (int j : {tr.n / 2 - 40, tr.n / 2, tr.n / 2 + 40}) {
      const double r = std::exp(tr.y0 + j * tr.h);
      auto want = f.eval(q0, r);
      REQUIRE(std::abs(tr.values[j] - want) < 1e-9 * std::abs(want));
    }
  }

  SECTION("power eigenfunctions carry the diagonal weight") {
    // Fixed window wide enough for the Gaussian kernel to confine boundary
    // effects, yet narrow enough that the exponential's dynamic range stays
    // within double precision of the mid-window values.
    NuOptions opt;
    opt.force_window = true;
    for (int m = 0; m <= 2; ++m) {
      RadialFn f = RadialFn::monomial(m);
      NuTransform tr = nu_radial_numeric(f, q0, -2, w0, -5.0, 5.0, opt);
      REQUIRE(tr.applied);
      const double lam =
          FieldElem::s_power(weight_exponent_s(N, 0, m, -2)).eval_q(q0).real();
      for (double ytarget : {-1.0, 0.0, 0.8}) {
        const int j = (int)std::lround((ytarget - tr.y0) / tr.h);
        const double y = tr.y0 + j * tr.h;
        const double want = lam * std::pow(std::exp(y), m);
        REQUIRE(std::abs(tr.values[j] - want) < 1e-6 * std::abs(want));
      }
    }
  }

  SECTION("inverse pair restores a rational profile") {
    // 1/(1+r^2): the widest analyticity strip in the family, so its spectrum
    // outlasts the masking floor and the round trip recovers it sharply.
    RadialFn f = RadialFn::rational({{0, FieldElem(1)}}, 0, 2, 1);
    NuTransform down = nu_radial_numeric(f, q0, -2, w0, -3.0, 3.0);
    REQUIRE(down.applied);
    NuOptions opt;
    opt.force_window = true;
    // Total sampler: the smoothed profile, zero beyond the computed window.
    auto sample = [&](double r) -> std::complex<double> {
      const long j = std::lround((std::log(r) - down.y0) / down.h);
      if (j < 0 || j >= down.n) return 0.0;
      return down.values[(size_t)j];
    };
    NuTransform up =
        nu_radial_numeric(sample, q0, 2, w0, down.y0, down.y0 + down.h * (down.n - 1), opt);
    REQUIRE(up.applied);
    for (double ytarget : {-1.0, 0.0, 0.5, 1.0}) {
      const int j = (int)std::lround((ytarget - up.y0) / up.h);
      auto want = f.eval(q0, std::exp(up.y0 + j * up.h));
      REQUIRE(std::abs(up.values[j] - want) < 1e-6 * std::abs(want));
    }
  }

  SECTION("growing multiplier refuses broadband input") {
    NuOptions opt;
    opt.force_window = true;
    NuTransform tr = nu_radial_numeric(RadialFn::monomial(1), q0, 2, w0, -12.0, 12.0, opt);
    REQUIRE_FALSE(tr.applied);
    REQUIRE(tr.note.find("growing multiplier") != std::string::npos);
  }

  SECTION("smoothing keeps a decaying profile real and positive") {
    RadialFn f = RadialFn::rational({{0, FieldElem(1)}}, 0, 3, 1);
    NuTransform tr = nu_radial_numeric(f, q0, -2, w0, -2.0, 2.0);
    REQUIRE(tr.applied);
    for (double ytarget : {-1.0, 0.0, 1.0}) {
      const int j = (int)std::lround((ytarget - tr.y0) / tr.h);
      auto v = tr.values[j];
      REQUIRE(std::abs(v.imag()) < 1e-10);
      REQUIRE(v.real() > 0.0);
    }
  }
}
