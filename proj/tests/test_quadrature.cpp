#include <catch2/catch_amalgamated.hpp>
#include <qeuclid/quadrature.hpp>

#include <cmath>

using namespace qeuclid;

namespace {

const RuleSet& rules3() {
  static RuleSet rs = derive_rules(build_structure(3));
  return rs;
}
const HarmonicTable& table3() {
  static HarmonicTable t(rules3());
  return t;
}
QuadratureContext& ctx3() {
  static QuadratureContext ctx(rules3(), table3());
  return ctx;
}

NCExpr xgen(int i) { return NCExpr::generator(Species::X, i); }

// 1 / (1 + (s^shift r)^n)^k
RadialFn rat(int shift, int n, int k) { return RadialFn::rational({{0, FieldElem(1)}}, shift, n, k); }

WaveFunction wave0(const RadialFn& f) {
  WaveFunction w;
  w.add(0, 0, f);
  return w;
}
WaveFunction wave_l(int l, int I, const RadialFn& f) {
  WaveFunction w;
  w.add(l, I, f);
  return w;
}

WaveFunction wave_from_expr(QuadratureContext& ctx, const NCExpr& e) {
  WaveFunction w;
  for (const auto& ht : ctx.table().decompose(e).terms) {
    RadialFn f;
    for (const auto& [m, c] : ht.radial) f = f + RadialFn::monomial(m, c);
    w.add(ht.l, ht.I, f);
  }
  return w;
}

NCExpr reassemble(QuadratureContext& ctx, const WaveFunction& w) {
  const RuleSet& rs = ctx.rules();
  NCExpr out;
  for (const auto& t : w.terms)
    out += rs.mul(ctx.table().level(t.l)[t.I].rep, radial_to_polynomial(rs, t.radial));
  return rs.normal_order(out);
}

}  // namespace

TEST_CASE("integrals on the scaling lattice", "[quadrature]") {
  QuadratureContext& ctx = ctx3();
  Measure mu;  // jackson, q = 1.2, beta = 0, window 60

  SECTION("a field with no trivial component integrates to zero exactly") {
    IntegralValue iv = integrate(ctx, mu, wave_l(1, 0, rat(0, 6, 1)));
    REQUIRE(iv.value == std::complex<double>(0.0, 0.0));
    REQUIRE(iv.err_est == 0.0);
  }

  SECTION("positive integrand, stability under window doubling") {
    const WaveFunction f = wave0(rat(0, 6, 1));
    IntegralValue a = integrate(ctx, mu, f);
    Measure wide = mu;
    wide.window = 120;
    IntegralValue b = integrate(ctx, wide, f);
    REQUIRE(a.value.imag() == 0.0);  // real integrand on a real lattice
    REQUIRE(a.value.real() > 0.0);
    REQUIRE(std::abs(a.value - b.value) / std::abs(b.value) < 1e-8);
    REQUIRE(std::abs(a.value - b.value) <= 10 * a.err_est + 1e-15);
  }

  SECTION("lattice rescaling covariance: f(q r) integrates to q^-N times f") {
    const RadialFn f = rat(0, 6, 1);
    IntegralValue base = integrate(ctx, mu, wave0(f));
    IntegralValue shifted = integrate(ctx, mu, wave0(f.scale_arg(8)));
    const double qN = std::pow(mu.q_value, -3);
    REQUIRE(std::abs(shifted.value - qN * base.value) / std::abs(base.value) < 1e-13);
  }

  SECTION("non-decaying fields are refused with a decay diagnosis") {
    REQUIRE_THROWS_WITH(integrate(ctx, mu, wave0(RadialFn::monomial(0))),
                        Catch::Matchers::ContainsSubstring("diverges"));
  }

  SECTION("continuum measure reproduces a closed-form radial integral") {
    Measure cont;
    cont.kind = MeasureKind::Uniform;
    IntegralValue iv = integrate(ctx, cont, wave0(rat(0, 6, 1)));
    // int_0^inf r^2/(1+r^6) dr = pi/6
    REQUIRE(std::abs(iv.value.real() - M_PI / 6) < 1e-9);
    REQUIRE(std::abs(iv.value.imag()) < 1e-12);
  }
}

TEST_CASE("wave operators match the direct rewriting path", "[quadrature]") {
  QuadratureContext& ctx = ctx3();
  const RuleSet& rs = ctx.rules();
  const NCExpr r2 = rs.normal_order(radius_squared(rs.sp.idx));

  std::vector<NCExpr> samples = {
      rs.normal_order(r2),
      rs.normal_order(rs.mul(xgen(1), r2)),
      rs.normal_order(xgen(0)),
      rs.normal_order(rs.mul(xgen(1), xgen(-1))),
  };
  {
    NCExpr mixed = rs.mul(xgen(1), rs.mul(xgen(1), xgen(0)));
    mixed -= FieldElem::s_power(8) * rs.mul(xgen(-1), r2);
    samples.push_back(rs.normal_order(mixed));
  }

  for (const auto& e : samples) {
    const WaveFunction w = wave_from_expr(ctx, e);
    REQUIRE(reassemble(ctx, w) == e);  // decomposition round-trip
    for (int a : rs.sp.idx.labels()) {
      PartialMemo& memo = ctx.memo;
      REQUIRE(reassemble(ctx, apply_partial_wave(ctx, a, w)) == apply_partial(rs, a, e, memo));
      const NCExpr want_p =
          (FieldElem::i() * rs.sp.idx.q_rho(a)) * apply_partial(rs, -a, e, memo);
      REQUIRE(reassemble(ctx, apply_momentum(ctx, a, w)) == rs.normal_order(want_p));
    }
    const NCExpr want_l =
        (FieldElem(-1) * FieldElem::s_power(24)) * apply_laplace(rs, e);
    REQUIRE(reassemble(ctx, apply_laplace_wave(ctx, w)) == rs.normal_order(want_l));
  }
}

TEST_CASE("derivatives integrate to zero on decaying fields", "[quadrature]") {
  QuadratureContext& ctx = ctx3();

  SECTION("lattice measure, both scales and both base points") {
    const WaveFunction f = wave_l(1, 0, rat(0, 6, 1));
    for (double q : {1.2, 0.9}) {
      for (int beta : {0, 1}) {
        Measure mu;
        mu.q_value = q;
        mu.beta_half = beta;
        mu.window = q > 1 ? 100 : 250;
        CheckOutcome out = stokes_check(ctx, mu, f);
        INFO("q = " << q << ", beta_half = " << beta << ", rel = " << out.rel_err);
        REQUIRE(out.applicable);
        REQUIRE(out.rel_err < 1e-8);
      }
    }
  }

  SECTION("slow decay is refused") {
    CheckOutcome out = stokes_check(ctx, Measure{}, wave0(RadialFn::monomial(0)));
    REQUIRE_FALSE(out.applicable);
    REQUIRE_THAT(out.reason, Catch::Matchers::ContainsSubstring("decrease"));
  }

  SECTION("continuum measure is quadrature-limited") {
    Measure cont;
    cont.kind = MeasureKind::Uniform;
    cont.q_value = 1.2;
    CheckOutcome out = stokes_check(ctx, cont, wave_l(1, 0, rat(0, 2, 4)));
    REQUIRE(out.applicable);
    REQUIRE(out.rel_err < 1e-6);
  }
}

TEST_CASE("weighted scalar products", "[quadrature]") {
  QuadratureContext& ctx = ctx3();

  SECTION("norms are positive at both lattice base points") {
    for (int beta : {0, 1}) {
      Measure mu;
      mu.beta_half = beta;
      const std::complex<double> n0 = scalar_product(ctx, mu, wave0(rat(0, 3, 1)), wave0(rat(0, 3, 1)));
      INFO("beta_half = " << beta);
      REQUIRE(n0.real() > 0.0);
      REQUIRE(std::abs(n0.imag()) < 1e-10 * n0.real());

      WaveFunction mixed = wave0(rat(0, 3, 1));
      mixed.add(1, 0, rat(8, 3, 1));
      const std::complex<double> n1 = scalar_product(ctx, mu, mixed, mixed);
      REQUIRE(n1.real() > 0.0);
      REQUIRE(std::abs(n1.imag()) < 1e-10 * n1.real());
    }
  }

  SECTION("distinct angular levels are orthogonal exactly") {
    Measure mu;
    const std::complex<double> z =
        scalar_product(ctx, mu, wave_l(1, 0, rat(0, 3, 1)), wave_l(2, 0, rat(0, 3, 1)));
    REQUIRE(z == std::complex<double>(0.0, 0.0));
  }

  SECTION("conjugate symmetry") {
    Measure mu;
    WaveFunction phi = wave0(FieldElem(GaussRat(1, 2)) * rat(0, 3, 1));
    phi.add(1, 0, rat(8, 3, 1));
    WaveFunction psi = wave0(rat(8, 3, 1));
    psi.add(1, 0, FieldElem(GaussRat(0, 1)) * rat(0, 3, 2));
    const std::complex<double> a = scalar_product(ctx, mu, phi, psi);
    const std::complex<double> b = scalar_product(ctx, mu, psi, phi);
    const double scale = std::max(std::abs(a), std::abs(b));
    REQUIRE(scale > 0.0);
    REQUIRE(std::abs(a - std::conj(b)) < 1e-10 * scale);
  }

  SECTION("the weight multiplier refuses q below one") {
    Measure mu;
    mu.q_value = 0.9;
    REQUIRE_THROWS_WITH(scalar_product(ctx, mu, wave0(rat(0, 3, 1)), wave0(rat(0, 3, 1))),
                        Catch::Matchers::ContainsSubstring("q > 1"));
  }
}

TEST_CASE("momenta and Laplacian are symmetric on the admissible lattice", "[quadrature]") {
  QuadratureContext& ctx = ctx3();

  // Pole families on the two base-point lattices: shift 0 mod 8 pairs with
  // beta = 0, shift 4 mod 8 with beta = 1/2; the factor order must divide N.
  auto family = [](int base_shift) {
    return std::vector<WaveFunction>{
        wave0(rat(base_shift, 3, 1)),
        wave0(rat(base_shift + 8, 3, 1)),
        wave0(rat(base_shift, 3, 2)),
        wave0(rat(base_shift + 16, 3, 1)),
    };
  };
  const std::vector<std::pair<int, int>> pairs = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};

  for (int beta : {0, 1}) {
    Measure mu;
    mu.beta_half = beta;
    const auto fam = family(beta == 0 ? 0 : 4);
    for (auto [i, j] : pairs) {
      for (int a : ctx.rules().sp.idx.labels()) {
        CheckOutcome out = hermiticity_momentum(ctx, mu, fam[i], fam[j], a);
        INFO("beta_half = " << beta << ", pair (" << i << "," << j << "), label " << a
                            << ", rel = " << out.rel_err);
        REQUIRE(out.applicable);
        REQUIRE(out.rel_err <= 1e-6);
      }
      CheckOutcome lap = hermiticity_laplace(ctx, mu, fam[i], fam[j]);
      INFO("beta_half = " << beta << ", pair (" << i << "," << j << "), rel = " << lap.rel_err);
      REQUIRE(lap.applicable);
      REQUIRE(lap.rel_err <= 1e-6);
    }
  }

  SECTION("a pair with angular structure") {
    Measure mu;
    const WaveFunction phi = wave_l(1, 0, rat(0, 3, 1));
    const WaveFunction psi = wave_l(1, 1, rat(8, 3, 1));
    for (int a : ctx.rules().sp.idx.labels()) {
      CheckOutcome out = hermiticity_momentum(ctx, mu, phi, psi, a);
      REQUIRE(out.applicable);
      REQUIRE(out.rel_err <= 1e-6);
    }
    CheckOutcome lap = hermiticity_laplace(ctx, mu, phi, psi);
    REQUIRE(lap.applicable);
    REQUIRE(lap.rel_err <= 1e-6);
  }

  SECTION("poles off the base-point lattice are refused") {
    Measure mu;  // beta = 0
    CheckOutcome a = hermiticity_momentum(ctx, mu, wave0(rat(0, 3, 1)), wave0(rat(4, 3, 1)), 1);
    REQUIRE_FALSE(a.applicable);
    REQUIRE_THAT(a.reason, Catch::Matchers::ContainsSubstring("lattice"));
    CheckOutcome b = hermiticity_laplace(ctx, mu, wave0(rat(0, 2, 1)), wave0(rat(0, 3, 1)));
    REQUIRE_FALSE(b.applicable);  // pole order does not divide N
  }
}

TEST_CASE("gram matrix of an admissible family is positive definite", "[quadrature]") {
  QuadratureContext& ctx = ctx3();
  Measure mu;
  const std::vector<WaveFunction> fam = {
      wave0(rat(0, 3, 1)),
      wave0(rat(8, 3, 1)),
      wave0(rat(0, 3, 2)),
      wave0(rat(16, 3, 1)),
  };
  const auto g = gram_matrix(ctx, mu, fam);
  for (size_t i = 0; i < fam.size(); ++i)
    for (size_t j = 0; j < fam.size(); ++j)
      REQUIRE(std::abs(g[i][j] - std::conj(g[j][i])) < 1e-10 * std::abs(g[i][i]));
  REQUIRE(gram_min_eigenvalue(g) > 0.0);
}

TEST_CASE("kinetic action", "[quadrature]") {
  QuadratureContext& ctx = ctx3();

  SECTION("summands recompose and the mass term dominates at large M") {
    Measure mu;
    const WaveFunction psi = wave0(rat(0, 3, 1));
    const double M = 100.0;
    ActionValue act = kinetic_action(ctx, mu, psi, M);
    const std::complex<double> norm = scalar_product(ctx, mu, psi, psi);
    REQUIRE(act.total == act.kinetic + act.mass);
    REQUIRE(std::abs(act.mass - M * M * norm.real()) < 1e-12 * act.mass);
    REQUIRE(act.total > 0.0);
    REQUIRE(act.kinetic > 0.0);
    REQUIRE(act.imag_leak < 1e-8 * act.total);
  }

  SECTION("classical limit against the radial Laplacian") {
    Measure cont;
    cont.kind = MeasureKind::Uniform;
    cont.q_value = 1.0;
    const int l = 1, N = 3;
    const WaveFunction psi = wave_l(l, 0, rat(0, 2, 3));  // f = (1+r^2)^-3
    const std::complex<double> kin = scalar_product(ctx, cont, apply_laplace_wave(ctx, psi), psi);
    const std::complex<double> nrm = scalar_product(ctx, cont, psi, psi);
    const double got = (kin / nrm).real();

    auto f = [](double r) { return std::pow(1 + r * r, -3.0); };
    auto fp = [](double r) { return -6 * r * std::pow(1 + r * r, -4.0); };
    auto fpp = [](double r) {
      return -6 * std::pow(1 + r * r, -4.0) + 48 * r * r * std::pow(1 + r * r, -5.0);
    };
    boost::math::quadrature::exp_sinh<double> integ;
    const double w = N - 1 + 2 * l;
    auto num = [&](double r) {
      if (r > 1e8) return 0.0;  // below underflow; avoids inf * 0 artifacts
      return std::pow(r, w) * f(r) * (-fpp(r) - (N + 2 * l - 1) * fp(r) / r);
    };
    auto den = [&](double r) {
      if (r > 1e8) return 0.0;
      return std::pow(r, w) * f(r) * f(r);
    };
    const double want = integ.integrate(num, 1e-12) / integ.integrate(den, 1e-12);
    INFO("engine " << got << " vs classical " << want);
    REQUIRE(std::abs(got - want) < 1e-4 * std::abs(want));
  }
}

TEST_CASE("form products through the frame map", "[quadrature]") {
  QuadratureContext& ctx = ctx3();
  const RuleSet& rs = ctx.rules();
  static Hodge hd = solve_hodge(rs);
  REQUIRE(hd.solve_report.pass());

  auto one_form = [&](int label, const RadialFn& f) {
    FormWave a;
    a.terms.push_back({Word(1, letter(Species::XI, label)), 0, 0, f});
    return a;
  };

  SECTION("degree zero reduces to the function product exactly") {
    Measure mu;
    FormWave a, b;
    a.terms.push_back({Word(), 0, 0, rat(0, 3, 1)});
    a.terms.push_back({Word(), 1, 0, rat(8, 3, 1)});
    b.terms.push_back({Word(), 0, 0, rat(8, 3, 2)});
    WaveFunction wa = wave0(rat(0, 3, 1));
    wa.add(1, 0, rat(8, 3, 1));
    const WaveFunction wb = wave0(rat(8, 3, 2));
    REQUIRE(scalar_product_forms(ctx, hd, mu, a, b) == scalar_product(ctx, mu, wa, wb));
  }

  SECTION("one-form norms are positive on the lattice") {
    Measure mu;
    for (int label : {-1, 0, 1}) {
      const FormWave a = one_form(label, rat(0, 3, 1));
      const std::complex<double> n = scalar_product_forms(ctx, hd, mu, a, a);
      INFO("label " << label << ", norm " << n);
      REQUIRE(n.real() > 0.0);
      REQUIRE(std::abs(n.imag()) < 1e-8 * n.real());
    }
  }

  SECTION("classical limit factorizes over the frame metric") {
    Measure cont;
    cont.kind = MeasureKind::Uniform;
    cont.q_value = 1.0;
    const RadialFn f = rat(0, 2, 3), g = rat(0, 2, 2);
    std::vector<std::complex<double>> ratios;
    for (int label : {-1, 0, 1}) {
      const std::complex<double> fg =
          scalar_product_forms(ctx, hd, cont, one_form(label, f), one_form(label, g));
      const std::complex<double> sg = scalar_product(ctx, cont, wave0(f), wave0(g));
      ratios.push_back(fg / sg);
    }
    for (const auto& r : ratios) {
      WARN("frame ratio " << r.real() << " + " << r.imag() << "i");
      REQUIRE(std::abs(r.imag()) < 1e-9 * std::abs(r));
      REQUIRE(std::abs(r - ratios[0]) < 1e-9 * std::abs(ratios[0]));
    }
  }
}
