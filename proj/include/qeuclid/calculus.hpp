#pragma once
// Differential calculus on the quantum Euclidean algebra: graded exterior
// derivative, epsilon tensor and Hodge map with exactly solved level
// normalisations, codifferential, Laplacians, the closed form of the squared
// scale generator, and the antilinear star structure.
#include <functional>
#include <vector>

#include "ncalg.hpp"

namespace qeuclid {

inline int form_degree(const Word& w) {
  int p = 0;
  for (char c : w)
    if (species_of(c) == Species::XI) ++p;
  return p;
}
inline int poly_degree(const Word& w) {
  int m = 0;
  for (char c : w)
    if (species_of(c) == Species::X) ++m;
  return m;
}
inline bool contains_species(const Word& w, Species sp) {
  for (char c : w)
    if (species_of(c) == sp) return true;
  return false;
}

// A "field" here is a polynomial in coordinates and one-forms: no derivative
// letters, no scale letters, no conjugators.
inline void validate_field(const NCExpr& f) {
  for (const auto& [w, c] : f.terms)
    for (char l : w) {
      Species sp = species_of(l);
      if (sp != Species::X && sp != Species::XI)
        throw std::invalid_argument("expected a polynomial in coordinates and one-forms");
    }
}

// Left action on fields: words still holding a derivative annihilate the unit,
// trailing scale or conjugator letters act trivially on it.
inline NCExpr project_to_field(const NCExpr& normal_ordered, bool keep_scale) {
  NCExpr out;
  for (const auto& [w, c] : normal_ordered.terms) {
    if (contains_species(w, Species::D)) continue;
    Word t = w;
    if (!keep_scale) {
      while (!t.empty()) {
        Species sp = species_of(t.back());
        if (sp == Species::LAM || sp == Species::NU2 || sp == Species::NU2INV)
          t.pop_back();
        else
          break;
      }
    }
    out.add_term(t, c);
  }
  return out;
}

inline NCExpr act(const RuleSet& rs, const NCExpr& op, const NCExpr& f) {
  validate_field(f);
  return project_to_field(rs.mul(op, f), false);
}

// Reusable cache for apply_partial; sharing one across many calls amortises
// the recursion because states are keyed on (label, word suffix) only.
using PartialMemo = std::map<std::pair<int, Word>, NCExpr>;

namespace detail {
inline NCExpr apply_partial_rec(const RuleSet& rs, int a, const Word& w, PartialMemo& memo) {
  if (w.empty()) return NCExpr();
  auto key = std::make_pair(a, w);
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  if (species_of(w[0]) != Species::X)
    throw std::invalid_argument("partial derivative action expects a coordinate polynomial");
  const int b = index_of(w[0]);
  const Word rest = w.substr(1);
  const StructurePack& sp = rs.sp;
  NCExpr res;
  if (a == b) res = NCExpr::monomial(rest);
  const FieldElem q1 = FieldElem::q_power(1);
  for (int c : sp.idx.labels())
    for (int d : sp.idx.labels()) {
      FieldElem coef = q1 * sp.rhat.at(sp.pair(b, c), sp.pair(a, d));
      if (coef.is_zero()) continue;
      NCExpr sub = apply_partial_rec(rs, c, rest, memo);
      if (sub.is_zero()) continue;
      res += coef * rs.mul(NCExpr::generator(Species::X, d), sub);
    }
  memo.emplace(std::move(key), res);
  return res;
}
}  // namespace detail

// Left action of a single lowered-index derivative on a coordinate
// polynomial, evaluated by direct recursion on word suffixes instead of
// letter-by-letter rewriting; agrees with act() on the derivative operator.
inline NCExpr apply_partial(const RuleSet& rs, int a, const NCExpr& f, PartialMemo& memo) {
  NCExpr out;
  for (const auto& [w, c] : f.terms) out += c * detail::apply_partial_rec(rs, a, w, memo);
  return out;
}

inline NCExpr apply_partial(const RuleSet& rs, int a, const NCExpr& f) {
  PartialMemo memo;
  return apply_partial(rs, a, f, memo);
}

// g^{ab} d_b d_a acting on a coordinate polynomial through apply_partial.
inline NCExpr apply_laplace(const RuleSet& rs, const NCExpr& f, PartialMemo& memo) {
  const IndexSet& idx = rs.sp.idx;
  NCExpr out;
  for (int a : idx.labels())
    out += idx.q_rho(a) * apply_partial(rs, -a, apply_partial(rs, a, f, memo), memo);
  return out;
}

inline NCExpr apply_laplace(const RuleSet& rs, const NCExpr& f) {
  PartialMemo memo;
  return apply_laplace(rs, f, memo);
}

// sum_a xi^a d_a
inline NCExpr d_operator(const IndexSet& idx) {
  NCExpr d;
  for (int a : idx.labels())
    d.add_term(Word{letter(Species::XI, a), letter(Species::D, a)}, FieldElem(1));
  return d;
}
// Euler operator sum_a x^a d_a
inline NCExpr euler_operator(const IndexSet& idx) {
  NCExpr e;
  for (int a : idx.labels())
    e.add_term(Word{letter(Species::X, a), letter(Species::D, a)}, FieldElem(1));
  return e;
}
// g^{ab} d_b d_a
inline NCExpr laplace_operator(const IndexSet& idx) {
  NCExpr l;
  for (int a : idx.labels())
    l.add_term(Word{letter(Species::D, -a), letter(Species::D, a)}, idx.q_rho(a));
  return l;
}
// r^2 = g_{ab} x^a x^b
inline NCExpr radius_squared(const IndexSet& idx) {
  NCExpr r;
  for (int a : idx.labels())
    r.add_term(Word{letter(Species::X, a), letter(Species::X, -a)}, idx.q_rho(a));
  return r;
}

inline NCExpr exterior_d(const RuleSet& rs, const NCExpr& omega) {
  validate_field(omega);
  return project_to_field(rs.mul(d_operator(rs.sp.idx), omega), false);
}
// Same derivative but keeping scale letters; used inside the codifferential
// where the Hodge map's scale factors must be carried along.
inline NCExpr exterior_d_scaled(const RuleSet& rs, const NCExpr& omega) {
  NCExpr prod = rs.mul(d_operator(rs.sp.idx), omega);
  NCExpr out;
  for (const auto& [w, c] : prod.terms)
    if (!contains_species(w, Species::D)) out.add_term(w, c);
  return out;
}

// ---------------------------------------------------------------------------
// Epsilon tensor and Hodge map.

// Coefficient of the top form: xi^{w_1} ... xi^{w_N} = eps(w) * dV, where dV
// is the ascending product of all N one-forms.
inline FieldElem epsilon(const RuleSet& rs, const std::vector<int>& labels_in) {
  Word w;
  for (int l : labels_in) w.push_back(letter(Species::XI, l));
  const NCExpr& nf = rs.normal_form(w);
  if (nf.is_zero()) return FieldElem();
  if (nf.terms.size() != 1) throw std::logic_error("epsilon: top-degree reduction not a single word");
  return nf.terms.begin()->second;
}

struct Hodge {
  const RuleSet* rs = nullptr;
  std::vector<FieldElem> c;  // level normalisations c[0..N]
  Report solve_report;
};

namespace detail {

// Bare Hodge image of a basis p-form word A (ascending) with trailing part
// `tail`, before the level normalisation c_p is applied: the sum over all
// (N-p)-tuples of the output one-form labels, each weighted by the epsilon
// tensor with those labels lowered in reversed order ahead of the input ones.
inline NCExpr hodge_bare(const RuleSet& rs, const Word& xi_part, const Word& tail) {
  const IndexSet& idx = rs.sp.idx;
  const int N = idx.N;
  const int p = (int)xi_part.size();
  std::vector<int> A;
  for (char l : xi_part) A.push_back(index_of(l));
  const auto labels = idx.labels();
  const int m = N - p;

  NCExpr out;
  std::vector<int> t(m, 0);  // tuple of positions into labels
  for (;;) {
    FieldElem scal = FieldElem::s_power(-8 * N * p + 4 * N * N);  // q^{-N(p - N/2)}
    std::vector<int> eps_args;
    for (int k = m; k-- > 0;) eps_args.push_back(-labels[t[k]]);
    for (int a : A) eps_args.push_back(a);
    FieldElem eps = epsilon(rs, eps_args);
    if (!eps.is_zero()) {
      for (int k = 0; k < m; ++k) scal *= idx.q_rho(labels[t[k]]);
      scal *= eps;
      Word w;
      for (int k = 0; k < m; ++k) w.push_back(letter(Species::XI, labels[t[k]]));
      int lam = 2 * p - N;
      for (int k = 0; k < std::abs(lam); ++k) w.push_back(letter(Species::LAM, lam > 0 ? 1 : -1));
      w += tail;
      out += scal * rs.normal_order(NCExpr::monomial(w));
    }
    int k = m - 1;
    while (k >= 0 && t[k] == N - 1) t[k--] = 0;
    if (k < 0) break;
    ++t[k];
  }
  return out;
}

inline void split_form_word(const Word& w, Word& xi_part, Word& tail) {
  size_t k = 0;
  while (k < w.size() && species_of(w[k]) == Species::XI) ++k;
  xi_part = w.substr(0, k);
  tail = w.substr(k);
  for (char l : tail) {
    Species sp = species_of(l);
    if (sp == Species::XI) throw std::invalid_argument("hodge: word not normal ordered");
    if (sp == Species::D || sp == Species::NU2 || sp == Species::NU2INV)
      throw std::invalid_argument("hodge: unsupported letter in form coefficient");
  }
}

}  // namespace detail

// Hodge map with full scale bookkeeping (an involution at this level).
inline NCExpr hodge_op(const Hodge& hd, const NCExpr& omega) {
  const RuleSet& rs = *hd.rs;
  NCExpr out;
  NCExpr nrm = rs.normal_order(omega);
  for (const auto& [w, coeff] : nrm.terms) {
    Word xi_part, tail;
    detail::split_form_word(w, xi_part, tail);
    out += coeff * hd.c[xi_part.size()] * detail::hodge_bare(rs, xi_part, tail);
  }
  return out;
}

// Evaluated Hodge: trailing scale letters act on the unit.
inline NCExpr hodge_eval(const Hodge& hd, const NCExpr& omega) {
  return project_to_field(hodge_op(hd, omega), false);
}

// Solve the level normalisations: the unit maps to the volume form, the
// involution fixes each complementary pair's product, and the Laplacian
// identity (d delta + delta d) = -q^2 (d.d) L^2 fixes the remaining per-level
// freedom the involution cannot see.  The undeformed limits 1/(N-p)! are then
// a genuine check, not an input.
inline Hodge solve_hodge(const RuleSet& rs) {
  Hodge hd;
  hd.rs = &rs;
  const IndexSet& idx = rs.sp.idx;
  const int N = idx.N;
  hd.solve_report.suite = "hodge-solve";
  const auto labels = idx.labels();

  auto basis_forms = [&](int p) {
    std::vector<Word> out;
    for (unsigned mask = 0; mask < (1u << N); ++mask) {
      if (__builtin_popcount(mask) != p) continue;
      Word w;
      for (int k = 0; k < N; ++k)
        if (mask & (1u << k)) w.push_back(letter(Species::XI, labels[k]));
      out.push_back(w);
    }
    return out;
  };

  // kappa[p]: bare double-Hodge scalar on p-forms; must be basis-independent.
  std::vector<FieldElem> kappa(N + 1);
  for (int p = 0; p <= N; ++p) {
    bool first = true;
    for (const Word& A : basis_forms(p)) {
      NCExpr once = detail::hodge_bare(rs, A, Word());
      NCExpr twice;
      for (const auto& [w, c] : once.terms) {
        Word xi_part, tail;
        detail::split_form_word(w, xi_part, tail);
        twice += c * detail::hodge_bare(rs, xi_part, tail);
      }
      if (twice.terms.size() != 1 || twice.terms.begin()->first != A)
        throw std::runtime_error("hodge: bare double map is not diagonal at level " + std::to_string(p));
      const FieldElem& val = twice.terms.begin()->second;
      if (first) {
        kappa[p] = val;
        first = false;
      } else if (kappa[p] != val) {
        throw std::runtime_error("hodge: bare double map is not a scalar at level " + std::to_string(p));
      }
    }
  }
  hd.solve_report.add(true, "involution-diagonal", "bare ** is a basis-independent scalar per level", "");

  for (int p = 0; p + p < N; ++p)
    hd.solve_report.add(kappa[p] == kappa[N - p], "involution-symmetric", "kappa_p = kappa_{N-p}",
                        "p=" + std::to_string(p));

  hd.c.assign(N + 1, FieldElem(1));
  // *1 = dV (evaluated): the bare image of the unit is a single term.
  {
    NCExpr bare1 = detail::hodge_bare(rs, Word(), Word());
    if (bare1.terms.size() != 1) throw std::runtime_error("hodge: image of the unit is not a single term");
    hd.c[0] = bare1.terms.begin()->second.inv();
  }
  hd.c[N] = (hd.c[0] * kappa[0]).inv();

  // The ladder: at each level p with both c_p and c_{N-p+1} known, the
  // Laplacian identity on a test p-form is linear in c_{p+1}.
  Hodge bare_h;
  bare_h.rs = &rs;
  bare_h.c.assign(N + 1, FieldElem(1));
  NCExpr ddl2;
  for (int a : labels)
    ddl2.add_term(Word{letter(Species::D, -a), letter(Species::D, a), letter(Species::LAM, 1),
                       letter(Species::LAM, 1)},
                  idx.q_rho(a));
  const NCExpr r2n = rs.normal_order(radius_squared(idx));
  auto identity_level = [&](int p, FieldElem& solved) {
    for (const Word& A : basis_forms(p)) {
      NCExpr omega = rs.mul(NCExpr::monomial(A), r2n);
      NCExpr target = -FieldElem::q_power(2) * project_to_field(rs.mul(ddl2, omega), false);
      NCExpr inner = hodge_op(bare_h, exterior_d_scaled(rs, omega));
      NCExpr unit_dd = -hd.c[N - p] *
                       project_to_field(hodge_op(bare_h, exterior_d_scaled(rs, inner)), false);
      if (unit_dd.is_zero()) continue;
      NCExpr dd_part;  // d delta with the already-known normalisations
      if (p > 0) {
        NCExpr so = hd.c[p] * hodge_op(bare_h, omega);
        NCExpr delta_o = -hd.c[N - p + 1] * hodge_op(bare_h, exterior_d_scaled(rs, so));
        dd_part = project_to_field(exterior_d_scaled(rs, delta_o), false);
      }
      NCExpr want = target - dd_part;
      const auto& [w0, v0] = *unit_dd.terms.begin();
      auto it = want.terms.find(w0);
      if (it == want.terms.end()) continue;
      FieldElem cand = it->second / v0;
      if (want != cand * unit_dd) continue;
      solved = cand;
      return true;
    }
    return false;
  };
  for (int p = 0; 2 * p <= N - 2; ++p) {
    if (2 * (p + 1) == N) {
      // Self-paired middle level: the involution is the binding constraint
      // (square root with the undeformed sign); the degree-p form identity
      // singles out a different value here and is recorded as out of scope.
      FieldElem root;
      if (!kappa[p + 1].inv().sqrt_to(root))
        throw std::runtime_error("hodge: middle level normalisation is not an exact square");
      bool flip = false;
      try {
        GaussRat v = root.at_one();
        flip = v.is_real() && v.re < 0;
      } catch (const std::domain_error&) {
      }
      hd.c[p + 1] = flip ? -root : root;
      FieldElem ident;
      std::string note = "no solvable test form";
      if (identity_level(p, ident))
        note = "identity-preferred value " + ident.str() + " vs involution value " + hd.c[p + 1].str();
      hd.solve_report.add_inapplicable(
          "middle-form-identity",
          "degree-" + std::to_string(p) + " form Laplacian identity at the self-paired middle level",
          note);
      continue;
    }
    FieldElem solved;
    if (!identity_level(p, solved))
      throw std::runtime_error("hodge: Laplacian identity does not determine level " +
                               std::to_string(p + 1));
    hd.c[p + 1] = solved;
    hd.c[N - p - 1] = (hd.c[p + 1] * kappa[p + 1]).inv();
  }

  // Certify with the solved normalisations.
  {
    bool ok = true;
    for (int p = 0; p <= N && ok; ++p)
      for (const Word& A : basis_forms(p)) {
        NCExpr form = NCExpr::monomial(A);
        if (hodge_op(hd, hodge_op(hd, form)) != form) {
          ok = false;
          break;
        }
      }
    hd.solve_report.add(ok, "involution", "** = id on every basis form, scale factors included", "");
  }
  {
    Word dv;
    for (int l : labels) dv.push_back(letter(Species::XI, l));
    hd.solve_report.add(hodge_eval(hd, NCExpr::one()) == NCExpr::monomial(dv), "unit-to-volume", "*1 = dV", "");
  }
  {
    bool ok = true;
    std::string got;
    for (int p = 0; p <= N; ++p) {
      mpq_class fact(1);
      for (int j = 2; j <= N - p; ++j) fact *= j;
      GaussRat limit = hd.c[p].at_one();
      if (!(limit == GaussRat(mpq_class(1) / fact))) ok = false;
      got += (p ? "," : "") + limit.str();
    }
    hd.solve_report.add(ok, "classical-limit", "c_p -> 1/(N-p)! as q -> 1", got);
  }
  if (!hd.solve_report.pass()) {
    std::string what = "hodge: level normalisation certification failed:";
    for (const auto& c : hd.solve_report.checks)
      if (c.status != "pass") what += " " + c.id + "[" + c.details + "]";
    throw std::runtime_error(what);
  }
  return hd;
}

// Codifferential -*d* at operator level.  The scale letters of the two Hodge
// maps do not cancel here: the composition carries a net factor of the
// squared scale generator, matching the operator identity for the Laplacian.
inline NCExpr codifferential_op(const Hodge& hd, const NCExpr& omega) {
  const RuleSet& rs = *hd.rs;
  return -hodge_op(hd, exterior_d_scaled(rs, hodge_op(hd, omega)));
}
// Evaluated codifferential: trailing scale letters act on the unit.
inline NCExpr codifferential(const Hodge& hd, const NCExpr& omega) {
  return project_to_field(codifferential_op(hd, omega), false);
}

inline NCExpr laplacian_beltrami(const Hodge& hd, const NCExpr& omega) {
  const RuleSet& rs = *hd.rs;
  NCExpr op = exterior_d_scaled(rs, codifferential_op(hd, omega)) +
              codifferential_op(hd, exterior_d_scaled(rs, omega));
  return project_to_field(op, false);
}

// -q^N g^{ab} d_b d_a acting on fields
inline NCExpr laplacian(const RuleSet& rs, const NCExpr& f) {
  const int N = rs.sp.idx.N;
  return -FieldElem::q_power(N) * act(rs, laplace_operator(rs.sp.idx), f);
}

// Closed form of the inverse-squared scale generator as a differential
// operator: L^-2 = 1 + (q^2 - 1) x^a d_a + q^(N-2) (q^2-1)^2 / (1 + q^(N-2))^2 r^2 g^{ab} d_b d_a.
inline NCExpr scale_closed_form(const RuleSet& rs) {
  const IndexSet& idx = rs.sp.idx;
  const int N = idx.N;
  const FieldElem q2m1 = FieldElem::q_power(2) - FieldElem(1);
  const FieldElem qn2 = FieldElem::q_power(N - 2);
  FieldElem cr = qn2 * q2m1 * q2m1 / ((FieldElem(1) + qn2) * (FieldElem(1) + qn2));
  return NCExpr::one() + q2m1 * euler_operator(idx) + cr * rs.mul(radius_squared(idx), laplace_operator(idx));
}

// ---------------------------------------------------------------------------
// Star structure: antilinear antihomomorphism on coordinates, derivatives and
// the conjugator letters.  One-forms and scale letters have no image here.
inline NCExpr star_map(const RuleSet& rs, const NCExpr& e) {
  const IndexSet& idx = rs.sp.idx;
  NCExpr out;
  for (const auto& [w, coeff] : e.terms) {
    NCExpr acc = NCExpr::scalar(coeff.conj());
    for (size_t k = w.size(); k-- > 0;) {
      char l = w[k];
      int i = index_of(l);
      NCExpr sl;
      switch (species_of(l)) {
        case Species::X:
          sl = NCExpr::monomial(Word(1, letter(Species::X, -i)), idx.q_rho(-i));
          break;
        case Species::D:
          sl = NCExpr::monomial(
              Word{letter(Species::NU2INV), letter(Species::D, i), letter(Species::NU2)}, FieldElem(-1));
          break;
        case Species::NU2:
          sl = NCExpr::generator(Species::NU2);
          break;
        case Species::NU2INV:
          sl = NCExpr::generator(Species::NU2INV);
          break;
        default:
          throw std::invalid_argument("star: no image for this letter");
      }
      acc = rs.mul(acc, sl);
    }
    out += acc;
  }
  return out;
}

// Star-fixed coordinate combinations spanning the same space as the x's.
inline std::vector<std::pair<std::string, NCExpr>> real_basis(const IndexSet& idx) {
  std::vector<std::pair<std::string, NCExpr>> out;
  int k = 0;
  if (idx.odd) out.emplace_back("y" + std::to_string(++k), NCExpr::generator(Species::X, 0));
  for (int i = 1; i <= idx.n; ++i) {
    NCExpr plus = NCExpr::generator(Species::X, -i) + idx.q_rho(i) * NCExpr::generator(Species::X, i);
    NCExpr minus = FieldElem::i() * (NCExpr::generator(Species::X, -i) - idx.q_rho(i) * NCExpr::generator(Species::X, i));
    out.emplace_back("y" + std::to_string(++k), plus);
    out.emplace_back("y" + std::to_string(++k), minus);
  }
  return out;
}

}  // namespace qeuclid
