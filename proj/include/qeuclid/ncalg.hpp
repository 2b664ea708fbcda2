#pragma once
// Word algebra over the generators of the quantum Euclidean phase space:
// one-forms xi^i, coordinates x^i, derivatives d_i, the scale generator L
// (with its inverse), and an opaque conjugator pair nu2 / nu2^-1.
//
// A word packs one letter per byte: species * 32 + (index + 8).  Byte order
// therefore sorts by species xi < x < d < L first and ascending index inside
// a species, so the normal form of a monomial is the byte-lex-minimal word.
// Every rewrite rule strictly decreases shortlex order; this is asserted when
// the rules are derived, which grounds termination of normal ordering.
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "structure.hpp"

namespace qeuclid {

enum class Species : uint8_t { XI = 0, X = 1, D = 2, LAM = 3, NU2 = 4, NU2INV = 5 };

using Word = std::string;

inline char letter(Species sp, int idx = 0) {
  return (char)(uint8_t)((uint8_t)sp * 32 + (idx + 8));
}
inline Species species_of(char c) { return (Species)((uint8_t)c >> 5); }
inline int index_of(char c) { return (int)((uint8_t)c & 31) - 8; }

inline std::string letter_str(char c) {
  int i = index_of(c);
  switch (species_of(c)) {
    case Species::XI: return "xi[" + std::to_string(i) + "]";
    case Species::X: return "x[" + std::to_string(i) + "]";
    case Species::D: return "d[" + std::to_string(i) + "]";
    case Species::LAM: return i > 0 ? "L" : "L^-1";
    case Species::NU2: return "nu2";
    case Species::NU2INV: return "nu2^-1";
  }
  return "?";
}

struct NCExpr {
  std::map<Word, FieldElem> terms;

  NCExpr() = default;
  static NCExpr scalar(const FieldElem& c) {
    NCExpr e;
    if (!c.is_zero()) e.terms[Word()] = c;
    return e;
  }
  static NCExpr one() { return scalar(FieldElem(1)); }
  static NCExpr monomial(const Word& w, const FieldElem& c = FieldElem(1)) {
    NCExpr e;
    if (!c.is_zero()) e.terms[w] = c;
    return e;
  }
  static NCExpr generator(Species sp, int idx = 0) { return monomial(Word(1, letter(sp, idx))); }

  bool is_zero() const { return terms.empty(); }

  void add_term(const Word& w, const FieldElem& c) {
    if (c.is_zero()) return;
    auto it = terms.find(w);
    if (it == terms.end()) {
      terms.emplace(w, c);
      return;
    }
    it->second += c;
    if (it->second.is_zero()) terms.erase(it);
  }

  NCExpr& operator+=(const NCExpr& o) {
    for (const auto& [w, c] : o.terms) add_term(w, c);
    return *this;
  }
  NCExpr& operator-=(const NCExpr& o) {
    for (const auto& [w, c] : o.terms) add_term(w, -c);
    return *this;
  }
  friend NCExpr operator+(NCExpr a, const NCExpr& b) { return a += b; }
  friend NCExpr operator-(NCExpr a, const NCExpr& b) { return a -= b; }
  NCExpr operator-() const {
    NCExpr r;
    for (const auto& [w, c] : terms) r.terms.emplace(w, -c);
    return r;
  }
  friend NCExpr operator*(const FieldElem& s, const NCExpr& e) {
    NCExpr r;
    if (s.is_zero()) return r;
    for (const auto& [w, c] : e.terms) r.terms.emplace(w, s * c);
    return r;
  }
  friend bool operator==(const NCExpr& a, const NCExpr& b) { return a.terms == b.terms; }
  friend bool operator!=(const NCExpr& a, const NCExpr& b) { return !(a == b); }

  // Antilinear coefficient conjugation (i -> -i); letters untouched.
  NCExpr conj_coeffs() const {
    NCExpr r;
    for (const auto& [w, c] : terms) r.terms.emplace(w, c.conj());
    return r;
  }

  std::string str() const {
    if (terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [w, c] : terms) {
      if (!first) out += " + ";
      first = false;
      std::string ws;
      for (size_t k = 0; k < w.size(); ++k) {
        if (k) ws += "*";
        ws += letter_str(w[k]);
      }
      if (w.empty())
        out += "(" + c.str() + ")";
      else if (c.is_one())
        out += ws;
      else
        out += "(" + c.str() + ")*" + ws;
    }
    return out;
  }
};

enum class Strategy { Leftmost, Rightmost };

inline bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;  // char_traits compare is unsigned byte-wise
}

// Termination measure: (cross-species inversions, same-species disorder pairs,
// length), compared lexicographically.  Disorder counts index-descending pairs
// and, for the anticommuting species, repeated indices.
inline std::tuple<int, int, size_t> word_measure(const Word& w) {
  int cross = 0, inner = 0;
  for (size_t i = 0; i < w.size(); ++i)
    for (size_t j = i + 1; j < w.size(); ++j) {
      Species si = species_of(w[i]), sj = species_of(w[j]);
      if (si != sj) {
        if ((uint8_t)si > (uint8_t)sj) ++cross;
      } else {
        int a = index_of(w[i]), b = index_of(w[j]);
        if (a > b || (a == b && si == Species::XI)) ++inner;
        if (si == Species::LAM && a != b) ++inner;  // cancelling pair, either order
      }
    }
  return {cross, inner, w.size()};
}

struct RuleSet {
  StructurePack sp;
  // key: first byte * 256 + second byte of the redex
  std::map<int, std::vector<std::pair<Word, FieldElem>>> rules;
  mutable std::map<Word, NCExpr> memo_left, memo_right;

  static int key_of(char a, char b) { return (int)(uint8_t)a * 256 + (int)(uint8_t)b; }

  const std::vector<std::pair<Word, FieldElem>>* find_rule(char a, char b) const {
    auto it = rules.find(key_of(a, b));
    return it == rules.end() ? nullptr : &it->second;
  }

  void add_rule(char a, char b, std::vector<std::pair<Word, FieldElem>> rhs) {
    Word lhs{a, b};
    auto lm = word_measure(lhs);
    for (auto& [w, c] : rhs) {
      if (c.is_zero()) throw std::logic_error("RuleSet: zero coefficient in rule");
      if (!shortlex_less(w, lhs)) throw std::logic_error("RuleSet: rule does not decrease shortlex order");
      if (word_measure(w) >= lm) throw std::logic_error("RuleSet: rule does not decrease the disorder measure");
    }
    if (!rules.emplace(key_of(a, b), std::move(rhs)).second) throw std::logic_error("RuleSet: duplicate rule");
  }

  const NCExpr& normal_form(const Word& w, Strategy st = Strategy::Leftmost) const {
    auto& memo = st == Strategy::Leftmost ? memo_left : memo_right;
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    int pos = -1;
    if (st == Strategy::Leftmost) {
      for (int i = 0; i + 1 < (int)w.size(); ++i)
        if (find_rule(w[i], w[i + 1])) {
          pos = i;
          break;
        }
    } else {
      for (int i = (int)w.size() - 2; i >= 0; --i)
        if (find_rule(w[i], w[i + 1])) {
          pos = i;
          break;
        }
    }
    NCExpr result;
    if (pos < 0) {
      result.terms.emplace(w, FieldElem(1));
    } else {
      const auto& rl = *find_rule(w[pos], w[pos + 1]);
      for (const auto& [repl, coef] : rl) {
        Word nw = w.substr(0, pos) + repl + w.substr(pos + 2);
        const NCExpr& sub = normal_form(nw, st);
        for (const auto& [swd, sc] : sub.terms) result.add_term(swd, coef * sc);
      }
    }
    return memo.emplace(w, std::move(result)).first->second;
  }

  NCExpr normal_order(const NCExpr& e, Strategy st = Strategy::Leftmost) const {
    NCExpr out;
    for (const auto& [w, c] : e.terms) {
      const NCExpr& nf = normal_form(w, st);
      for (const auto& [nw, nc] : nf.terms) out.add_term(nw, c * nc);
    }
    return out;
  }

  NCExpr mul(const NCExpr& a, const NCExpr& b, Strategy st = Strategy::Leftmost) const {
    NCExpr prod;
    for (const auto& [wa, ca] : a.terms)
      for (const auto& [wb, cb] : b.terms) prod.add_term(wa + wb, ca * cb);
    return normal_order(prod, st);
  }

  NCExpr pow(const NCExpr& a, int e, Strategy st = Strategy::Leftmost) const {
    NCExpr r = NCExpr::one();
    for (int k = 0; k < e; ++k) r = mul(r, a, st);
    return r;
  }
};

namespace detail {

// Solve a quadratic exchange subsystem: express each "bad" pair of generators
// through the "good" pairs, given rows spanning the relation covector space.
// Columns of `rel` are indexed by slot pairs (slot_a * N + slot_b).  A pivot
// structure other than exactly-the-bad-pairs means the subsystem is singular
// for this parameter regime and derivation must stop.
inline std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, FieldElem>>> solve_exchange(
    const Mat& rel, const std::vector<std::pair<int, int>>& bad, const std::vector<std::pair<int, int>>& good,
    const IndexSet& idx) {
  const int N = idx.N;
  auto col_of = [&](const std::pair<int, int>& p) { return idx.slot(p.first) * N + idx.slot(p.second); };
  Mat perm(rel.rows, (int)(bad.size() + good.size()));
  for (int r = 0; r < rel.rows; ++r) {
    for (size_t k = 0; k < bad.size(); ++k) perm.at(r, (int)k) = rel.at(r, col_of(bad[k]));
    for (size_t k = 0; k < good.size(); ++k) perm.at(r, (int)(bad.size() + k)) = rel.at(r, col_of(good[k]));
  }
  std::vector<int> pivots = rref(perm);
  if (pivots.size() != bad.size()) throw std::runtime_error("quadratic subsystem: rank does not match bad pairs");
  for (size_t k = 0; k < bad.size(); ++k)
    if (pivots[k] != (int)k) throw std::runtime_error("quadratic subsystem: singular in the bad-pair block");
  std::map<std::pair<int, int>, std::vector<std::pair<std::pair<int, int>, FieldElem>>> out;
  for (size_t k = 0; k < bad.size(); ++k) {
    std::vector<std::pair<std::pair<int, int>, FieldElem>> rhs;
    for (size_t g = 0; g < good.size(); ++g) {
      FieldElem c = -perm.at((int)k, (int)(bad.size() + g));
      if (!c.is_zero()) rhs.emplace_back(good[g], c);
    }
    out.emplace(bad[k], std::move(rhs));
  }
  return out;
}

}  // namespace detail

inline RuleSet derive_rules(const StructurePack& sp) {
  RuleSet rs;
  rs.sp = sp;
  const IndexSet& idx = sp.idx;
  const int N = idx.N;
  const auto labels = idx.labels();
  const FieldElem q1 = FieldElem::q_power(1), qm1 = FieldElem::q_power(-1);

  auto pairs = [&](auto&& pred) {
    std::vector<std::pair<int, int>> out;
    for (int a : labels)
      for (int b : labels)
        if (pred(a, b)) out.emplace_back(a, b);
    return out;
  };

  // Coordinates: relations are the rows of Pa; bad pairs descend.
  {
    auto table = detail::solve_exchange(sp.pa, pairs([](int a, int b) { return a > b; }),
                                        pairs([](int a, int b) { return a <= b; }), idx);
    for (const auto& [bp, rhs] : table) {
      std::vector<std::pair<Word, FieldElem>> rl;
      for (const auto& [gp, c] : rhs) rl.emplace_back(Word{letter(Species::X, gp.first), letter(Species::X, gp.second)}, c);
      rs.add_rule(letter(Species::X, bp.first), letter(Species::X, bp.second), std::move(rl));
    }
  }

  // One-forms: relations are the rows of Ps + Pt; squares are bad too.
  {
    Mat psym = sp.ps + sp.pt;
    auto table = detail::solve_exchange(psym, pairs([](int a, int b) { return a >= b; }),
                                        pairs([](int a, int b) { return a < b; }), idx);
    for (const auto& [bp, rhs] : table) {
      std::vector<std::pair<Word, FieldElem>> rl;
      for (const auto& [gp, c] : rhs)
        rl.emplace_back(Word{letter(Species::XI, gp.first), letter(Species::XI, gp.second)}, c);
      rs.add_rule(letter(Species::XI, bp.first), letter(Species::XI, bp.second), std::move(rl));
    }
  }

  // Derivatives: the relation covectors are the columns of Pa read against
  // index-swapped words, sum_{ab} Pa^{ab}_{cd} d_b d_a = 0.
  {
    Mat rel(N * N, N * N);
    for (int r = 0; r < N * N; ++r)
      for (int a : labels)
        for (int b : labels) rel.at(r, idx.slot(b) * N + idx.slot(a)) = sp.pa.at(sp.pair(a, b), r);
    auto table = detail::solve_exchange(rel, pairs([](int a, int b) { return a > b; }),
                                        pairs([](int a, int b) { return a <= b; }), idx);
    for (const auto& [bp, rhs] : table) {
      std::vector<std::pair<Word, FieldElem>> rl;
      for (const auto& [gp, c] : rhs) rl.emplace_back(Word{letter(Species::D, gp.first), letter(Species::D, gp.second)}, c);
      rs.add_rule(letter(Species::D, bp.first), letter(Species::D, bp.second), std::move(rl));
    }
  }

  // Coordinates past one-forms: x^c xi^a = q R^{ca}_{bd} xi^b x^d.
  for (int c : labels)
    for (int a : labels) {
      std::vector<std::pair<Word, FieldElem>> rl;
      for (int b : labels)
        for (int d : labels) {
          FieldElem coef = q1 * sp.rhat.at(sp.pair(c, a), sp.pair(b, d));
          if (!coef.is_zero()) rl.emplace_back(Word{letter(Species::XI, b), letter(Species::X, d)}, coef);
        }
      rs.add_rule(letter(Species::X, c), letter(Species::XI, a), std::move(rl));
    }

  // Derivatives past coordinates: d_a x^b = delta^b_a + q R^{bc}_{ad} x^d d_c.
  for (int a : labels)
    for (int b : labels) {
      std::vector<std::pair<Word, FieldElem>> rl;
      if (a == b) rl.emplace_back(Word(), FieldElem(1));
      for (int c : labels)
        for (int d : labels) {
          FieldElem coef = q1 * sp.rhat.at(sp.pair(b, c), sp.pair(a, d));
          if (!coef.is_zero()) rl.emplace_back(Word{letter(Species::X, d), letter(Species::D, c)}, coef);
        }
      rs.add_rule(letter(Species::D, a), letter(Species::X, b), std::move(rl));
    }

  // Derivatives past one-forms: d_m xi^a = q^-1 (g_{mc} R^{ca}_{bd} g^{de}) xi^b d_e.
  for (int m : labels)
    for (int a : labels) {
      std::vector<std::pair<Word, FieldElem>> rl;
      for (int b : labels)
        for (int e : labels) {
          // g is antidiagonal: c = -m, d = -e up to the metric factors.
          FieldElem coef = qm1 * idx.q_rho(m) * sp.rhat.at(sp.pair(-m, a), sp.pair(b, -e)) * idx.q_rho(-e);
          if (!coef.is_zero()) rl.emplace_back(Word{letter(Species::XI, b), letter(Species::D, e)}, coef);
        }
      rs.add_rule(letter(Species::D, m), letter(Species::XI, a), std::move(rl));
    }

  // Scale generator: L x = q^-1 x L, L xi = xi L, L d = q d L, and inverses.
  for (int e : {1, -1}) {
    for (int a : labels) {
      rs.add_rule(letter(Species::LAM, e), letter(Species::X, a),
                  {{Word{letter(Species::X, a), letter(Species::LAM, e)}, FieldElem::q_power(-e)}});
      rs.add_rule(letter(Species::LAM, e), letter(Species::XI, a),
                  {{Word{letter(Species::XI, a), letter(Species::LAM, e)}, FieldElem(1)}});
      rs.add_rule(letter(Species::LAM, e), letter(Species::D, a),
                  {{Word{letter(Species::D, a), letter(Species::LAM, e)}, FieldElem::q_power(e)}});
    }
  }
  rs.add_rule(letter(Species::LAM, 1), letter(Species::LAM, -1), {{Word(), FieldElem(1)}});
  rs.add_rule(letter(Species::LAM, -1), letter(Species::LAM, 1), {{Word(), FieldElem(1)}});
  rs.add_rule(letter(Species::NU2), letter(Species::NU2INV), {{Word(), FieldElem(1)}});
  rs.add_rule(letter(Species::NU2INV), letter(Species::NU2), {{Word(), FieldElem(1)}});

  return rs;
}

}  // namespace qeuclid
