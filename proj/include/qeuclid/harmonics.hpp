#pragma once
// Level-l harmonic spaces: exact kernels of the invariant second-order
// operator on homogeneous polynomials, the angular pairing through the
// radial-trivial component, exact harmonic decomposition of polynomials, and
// the diagonal action of the even powers of the weight operator on
// (level x radial-monomial) components.
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <random>
#include <vector>

#include "calculus.hpp"
#include "linalg.hpp"

namespace qeuclid {

struct Harmonic {
  int l = 0, I = 0;
  NCExpr rep;         // exact polynomial representative, pairwise orthogonal
  double norm = 1.0;  // numeric 1/sqrt(<S,S>) at the reference q0
};

// One (level, index) component of a polynomial: radial part as a Laurent
// polynomial in r, stored as exponent -> coefficient.
struct HarmonicTerm {
  int l = 0, I = 0;
  std::map<int, FieldElem> radial;
};
struct HarmonicExpansion {
  std::vector<HarmonicTerm> terms;
  HarmonicTerm& component(int l, int I) {
    for (auto& t : terms)
      if (t.l == l && t.I == I) return t;
    terms.push_back({l, I, {}});
    return terms.back();
  }
};

// s-exponent of the diagonal eigenvalue of the k-th power of the weight
// operator on a level-l, radial-degree-m component: the level part
// q^{-k l(l+N-2)/4} and the homogeneity part q^{-k (l+m+N/2)^2 / 4}.
inline int weight_exponent_s(int N, int l, int m, int k) {
  if (k % 2 != 0) throw std::invalid_argument("weight power must be even");
  const int c2 = 2 * (l + m) + N;  // twice the shifted homogeneity degree
  return -2 * k * l * (l + N - 2) - k * c2 * c2 / 2;
}
// s-exponent of the bare level eigenvalue: q^{-l(l+N-2)/4}.
inline int level_exponent_s(int N, int l) { return -2 * l * (l + N - 2); }

class HarmonicTable {
 public:
  explicit HarmonicTable(const RuleSet& rs, double q0 = 1.2) : rs_(&rs), q0_(q0) {}

  const RuleSet& rules() const { return *rs_; }
  double reference_q() const { return q0_; }

  // Homogeneous degree-d monomial basis: ascending coordinate words.
  std::vector<Word> monomial_words(int d) const {
    std::vector<Word> out;
    Word cur;
    const auto& labels = rs_->sp.idx.labels();
    std::function<void(int, size_t)> rec = [&](int rem, size_t from) {
      if (rem == 0) {
        out.push_back(cur);
        return;
      }
      for (size_t k = from; k < labels.size(); ++k) {
        cur.push_back(letter(Species::X, labels[k]));
        rec(rem - 1, k);
        cur.pop_back();
      }
    };
    rec(d, 0);
    return out;
  }

  // f |-> result of applying the invariant second-order operator n times.
  NCExpr iterated_laplace(const NCExpr& f, int n) const {
    NCExpr cur = f;
    for (int k = 0; k < n; ++k) cur = apply_laplace(*rs_, cur, dmemo_);
    return cur;
  }

  // Angular pairing of two degree-l harmonics: the radial-trivial component
  // of star(S) S', extracted by exhausting the radial degree.  Evaluated as a
  // bilinear form against a per-level monomial pairing matrix.
  FieldElem pairing(const NCExpr& S, const NCExpr& Sp, int l) const {
    const PairData& pd = pair_data(l);
    FieldElem out;
    for (const auto& [wu, cu] : S.terms) {
      const int i = pd.row_of.at(wu);
      const FieldElem cuc = cu.conj();
      for (const auto& [wv, cv] : Sp.terms) {
        const FieldElem& qv = pd.Q.at(i, pd.row_of.at(wv));
        if (!qv.is_zero()) out += cuc * qv * cv;
      }
    }
    return out / radial_norm(l);
  }

  const std::vector<Harmonic>& level(int l) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(l);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(l, build_level(l)).first->second;
  }

  // Exact expansion over {S_l^I r^{d-l}} per homogeneous degree d.
  HarmonicExpansion decompose(const NCExpr& f) const {
    for (const auto& [w, c] : f.terms)
      for (char ch : w)
        if (species_of(ch) != Species::X)
          throw std::invalid_argument("harmonic decomposition expects a coordinate polynomial");
    HarmonicExpansion out;
    std::map<int, NCExpr> by_degree;
    for (const auto& [w, c] : f.terms) by_degree[(int)w.size()].add_term(w, c);
    for (const auto& [d, fd] : by_degree) decompose_degree(d, fd, out);
    return out;
  }

  NCExpr reconstruct(const HarmonicExpansion& e) const {
    const NCExpr r2 = rs_->normal_order(radius_squared(rs_->sp.idx));
    NCExpr out;
    for (const auto& t : e.terms) {
      const NCExpr& rep = level(t.l)[t.I].rep;
      for (const auto& [m, c] : t.radial) {
        if (m < 0 || m % 2 != 0)
          throw std::invalid_argument("reconstruction needs even nonnegative radial powers");
        out += c * rs_->mul(rep, rs_->pow(r2, m / 2));
      }
    }
    return out;
  }

  // Diagonal action of the k-th (even) power of the weight operator.
  HarmonicExpansion weight_pow(const HarmonicExpansion& e, int k) const {
    const int N = rs_->sp.idx.N;
    HarmonicExpansion out;
    for (const auto& t : e.terms) {
      HarmonicTerm nt{t.l, t.I, {}};
      for (const auto& [m, c] : t.radial)
        nt.radial[m] = c * FieldElem::s_power(weight_exponent_s(N, t.l, m, k));
      out.terms.push_back(std::move(nt));
    }
    return out;
  }

  // Numeric Gram matrix of the normalised level-l family at the reference q.
  std::vector<std::vector<std::complex<double>>> gram(int l) const {
    const auto& fam = level(l);
    std::vector<std::vector<std::complex<double>>> g(fam.size(),
                                                     std::vector<std::complex<double>>(fam.size()));
    for (size_t i = 0; i < fam.size(); ++i)
      for (size_t j = 0; j < fam.size(); ++j)
        g[i][j] = pairing(fam[i].rep, fam[j].rep, l).eval_q(q0_) * fam[i].norm * fam[j].norm;
    return g;
  }

 private:
  struct PairData {
    std::vector<Word> words;  // degree-l monomials, row order
    std::map<Word, int> row_of;
    Mat Q;  // raw extraction of star(w_i) w_j, before the radial normaliser
  };

  const RuleSet* rs_;
  double q0_;
  mutable std::mutex mu_;
  mutable std::map<int, std::vector<Harmonic>> cache_;
  mutable std::map<int, std::vector<FieldElem>> selfs_;  // exact self-pairings per level
  mutable std::map<int, FieldElem> radial_norm_;  // value of the extraction on r^{2l}
  mutable PartialMemo dmemo_;                     // shared across every derivative application
  mutable std::map<int, std::map<Word, FieldElem>> ext_;  // scalar part of the l-fold operator
  mutable std::map<int, PairData> pairdata_;

  const PairData& pair_data(int l) const {
    auto it = pairdata_.find(l);
    if (it != pairdata_.end()) return it->second;
    PairData pd;
    pd.words = monomial_words(l);
    const int n = (int)pd.words.size();
    for (int r = 0; r < n; ++r) pd.row_of[pd.words[r]] = r;
    pd.Q = Mat(n, n);
    for (int i = 0; i < n; ++i) {
      const NCExpr si = star_map(*rs_, NCExpr::monomial(pd.words[i]));
      for (int j = 0; j < n; ++j)
        pd.Q.at(i, j) = extract_scalar(rs_->mul(si, NCExpr::monomial(pd.words[j])), l);
    }
    return pairdata_.emplace(l, std::move(pd)).first->second;
  }

  // Linear functional w |-> scalar term of the l-fold second-order operator
  // applied to w, built degree by degree so each monomial image is taken once.
  const std::map<Word, FieldElem>& extraction(int l) const {
    auto it = ext_.find(l);
    if (it != ext_.end()) return it->second;
    std::map<Word, FieldElem> cur;
    if (l == 0) {
      cur[Word()] = FieldElem(1);
    } else {
      const auto& prev = extraction(l - 1);
      for (const Word& w : monomial_words(2 * l)) {
        NCExpr img = apply_laplace(*rs_, NCExpr::monomial(w), dmemo_);
        FieldElem v;
        for (const auto& [wp, c] : img.terms) {
          auto jt = prev.find(wp);
          if (jt != prev.end()) v += c * jt->second;
        }
        if (!v.is_zero()) cur[w] = v;
      }
    }
    return ext_.emplace(l, std::move(cur)).first->second;
  }

  // Scalar term of the l-fold operator on a homogeneous degree-2l polynomial.
  FieldElem extract_scalar(const NCExpr& f, int l) const {
    const auto& E = extraction(l);
    FieldElem out;
    for (const auto& [w, c] : f.terms) {
      auto jt = E.find(w);
      if (jt != E.end()) out += c * jt->second;
    }
    return out;
  }

  const FieldElem& radial_norm(int l) const {
    auto it = radial_norm_.find(l);
    if (it != radial_norm_.end()) return it->second;
    const NCExpr r2 = rs_->normal_order(radius_squared(rs_->sp.idx));
    FieldElem val = extract_scalar(rs_->pow(r2, l), l);
    if (val.is_zero()) throw std::logic_error("radial extraction scalar vanished");
    return radial_norm_.emplace(l, val).first->second;
  }

  std::vector<Harmonic> build_level(int l) const {
    std::vector<Harmonic> fam;
    if (l == 0) {
      fam.push_back({0, 0, NCExpr::one(), 1.0});
      selfs_[0] = {FieldElem(1)};
      return fam;
    }
    const auto words = monomial_words(l);
    const auto rows = monomial_words(l - 2 >= 0 ? l - 2 : 0);
    std::map<Word, int> row_of;
    for (size_t r = 0; r < rows.size(); ++r) row_of[rows[r]] = (int)r;
    Mat sys((int)(l >= 2 ? rows.size() : 0), (int)words.size());
    if (l >= 2) {
      for (size_t c = 0; c < words.size(); ++c) {
        NCExpr img = apply_laplace(*rs_, NCExpr::monomial(words[c]), dmemo_);
        for (const auto& [w, v] : img.terms) sys.at(row_of.at(w), (int)c) = v;
      }
    }
    Mat kernel = l >= 2 ? nullspace(sys) : Mat::identity((int)words.size());
    if (kernel.cols == 0)
      throw std::runtime_error("harmonic solver found an empty kernel at level " + std::to_string(l));

    // exact orthogonalisation under the angular pairing
    std::vector<NCExpr> reps;
    std::vector<FieldElem> selfs;
    for (int kc = 0; kc < kernel.cols; ++kc) {
      NCExpr v;
      for (size_t k = 0; k < words.size(); ++k)
        if (!kernel.at((int)k, kc).is_zero()) v.add_term(words[k], kernel.at((int)k, kc));
      for (size_t i = 0; i < reps.size(); ++i)
        v -= (pairing(reps[i], v, l) / selfs[i]) * reps[i];
      if (v.is_zero())
        throw std::runtime_error("harmonic orthogonalisation degenerated at level " +
                                 std::to_string(l));
      v = v.terms.begin()->second.inv() * v;  // canonical leading coefficient
      FieldElem s = pairing(v, v, l);
      if (s.is_zero())
        throw std::runtime_error("harmonic pairing is isotropic at level " + std::to_string(l));
      reps.push_back(v);
      selfs.push_back(s);
    }
    for (size_t k = 0; k < reps.size(); ++k) {
      std::complex<double> val = selfs[k].eval_q(q0_);
      if (!(val.real() > 0) || std::abs(val.imag()) > 1e-9 * std::abs(val.real()))
        throw std::runtime_error("harmonic norm is not positive at the reference q at level " +
                                 std::to_string(l));
      fam.push_back({l, (int)k, reps[k], 1.0 / std::sqrt(val.real())});
    }
    selfs_[l] = std::move(selfs);
    return fam;
  }

  // The m-fold second-order operator sends S r^{2m} back to a multiple of S
  // on each level: an intertwiner on an irreducible level is a scalar.
  FieldElem radial_scalar(int m, int l) const {
    FieldElem val(1);
    if (m == 0) return val;
    const NCExpr& S = level(l).front().rep;
    const NCExpr r2 = rs_->normal_order(radius_squared(rs_->sp.idx));
    NCExpr g = rs_->mul(S, rs_->pow(r2, m));
    for (int k = 0; k < m; ++k) g = apply_laplace(*rs_, g, dmemo_);
    auto jt = g.terms.find(S.terms.begin()->first);
    if (jt == g.terms.end())
      throw std::logic_error("radial ladder lost the harmonic layer at level " + std::to_string(l));
    val = jt->second;  // the representative has leading coefficient one
    if (!(g - val * S).is_zero())
      throw std::logic_error("radial ladder is not scalar at level " + std::to_string(l));
    return val;
  }

  // Peel the most radial layer first: the m-fold operator kills every layer
  // S r^{2m'} with m' < m, so it isolates the r^{2m} layer exactly.
  void decompose_degree(int d, const NCExpr& fd, HarmonicExpansion& out) const {
    const NCExpr r2 = rs_->normal_order(radius_squared(rs_->sp.idx));
    NCExpr rem = fd;
    for (int m = d / 2; m >= 0 && !rem.is_zero(); --m) {
      const int l = d - 2 * m;
      NCExpr g = rem;
      for (int k = 0; k < m; ++k) g = apply_laplace(*rs_, g, dmemo_);
      if (g.is_zero()) continue;
      const NCExpr h = radial_scalar_cached(m, l).inv() * g;
      const auto& fam = level(l);
      const auto& sf = selfs_.at(l);
      NCExpr res = h;
      for (size_t i = 0; i < fam.size(); ++i) {
        FieldElem c = pairing(fam[i].rep, h, l) / sf[i];
        if (c.is_zero()) continue;
        out.component(l, fam[i].I).radial[2 * m] += c;
        res -= c * fam[i].rep;
      }
      if (!res.is_zero())
        throw std::runtime_error("harmonic basis incomplete at degree " + std::to_string(d));
      rem -= rs_->mul(h, rs_->pow(r2, m));
    }
  }

  FieldElem radial_scalar_cached(int m, int l) const {
    auto key = std::make_pair(m, l);
    auto it = ladder_.find(key);
    if (it != ladder_.end()) return it->second;
    return ladder_.emplace(key, radial_scalar(m, l)).first->second;
  }
  mutable std::map<std::pair<int, int>, FieldElem> ladder_;
};

// Verification battery for the harmonic layer; every check names the identity
// it certifies.
inline Report verify_harmonics(const RuleSet& rs, int lmax = 4, int degmax = 6) {
  Report rep;
  rep.suite = "harmonics";
  HarmonicTable tab(rs);
  const IndexSet& idx = rs.sp.idx;
  const NCExpr lap = laplace_operator(idx);

  for (int l = 0; l <= lmax; ++l) {
    const auto& fam = tab.level(l);
    rep.add((int)fam.size() == 2 * l + 1, "dimension",
            "dim V_l = 2l+1 at N=3 (undeformed multiplicities)",
            "l=" + std::to_string(l) + " dim=" + std::to_string(fam.size()));
    bool harm = true, homog = true;
    for (const auto& h : fam) {
      if (!act(rs, lap, h.rep).is_zero()) harm = false;
      for (const auto& [w, c] : h.rep.terms)
        if ((int)w.size() != l) homog = false;
    }
    rep.add(harm, "harmonicity", "the invariant second-order operator annihilates every S_l^I",
            "l=" + std::to_string(l));
    rep.add(homog, "homogeneity", "S_l^I homogeneous of degree l", "l=" + std::to_string(l));
  }
  for (int l = 1; l <= std::min(lmax, 3); ++l) {
    const auto g = tab.gram(l);
    double dev = 0;
    for (size_t i = 0; i < g.size(); ++i)
      for (size_t j = 0; j < g.size(); ++j)
        dev = std::max(dev, std::abs(g[i][j] - (i == j ? 1.0 : 0.0)));
    rep.add(dev < 1e-10, "orthonormal-gram",
            "normalised angular Gram matrix is the identity at the reference q",
            "l=" + std::to_string(l) + " max deviation " + std::to_string(dev));
  }
  {
    bool pos = true;
    for (int l = 0; l <= std::min(lmax, 3); ++l)
      for (const auto& h : tab.level(l)) {
        std::complex<double> v = tab.pairing(h.rep, h.rep, l).eval_q(tab.reference_q());
        if (!(v.real() > 0) || std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
          pos = false;
      }
    rep.add(pos, "self-pairing-positive",
            "the radial-trivial component of star(S) S is a positive multiple of r^{2l}", "");
  }
  {
    bool ok = true;
    std::mt19937 gen(20260822);
    std::uniform_int_distribution<int> pick_coeff(-3, 3);
    for (int d = 0; d <= degmax && ok; ++d) {
      NCExpr f;
      const auto words = tab.monomial_words(d);
      for (const auto& w : words) f.add_term(w, FieldElem(pick_coeff(gen)));
      if (f.is_zero()) continue;
      HarmonicExpansion e = tab.decompose(f);
      ok = (tab.reconstruct(e) == f);
    }
    rep.add(ok, "decompose-reconstruct", "f = sum_l sum_I S_l^I f_{l,I}(r) exactly, degree <= 6",
            "");
  }
  {
    const int N = idx.N;
    bool ok = weight_exponent_s(N, 0, 0, 4) == -18;  // q^{-9/4} on the constant, N=3
    ok = ok && level_exponent_s(N, 1) == -4;         // q^{-1/2} on level 1, N=3
    HarmonicExpansion e;
    e.component(1, 0).radial[2] = FieldElem(3);
    e.component(2, 1).radial[0] = FieldElem::lambda();
    HarmonicExpansion back = tab.weight_pow(tab.weight_pow(e, 4), -4);
    for (const auto& t : back.terms)
      for (const auto& [m, c] : t.radial) {
        FieldElem orig;
        for (const auto& t0 : e.terms)
          if (t0.l == t.l && t0.I == t.I && t0.radial.count(m)) orig = t0.radial.at(m);
        if (!(c == orig)) ok = false;
      }
    rep.add(ok, "weight-diagonal",
            "weight eigenvalue q^{-k l(l+N-2)/4} q^{-k(l+m+N/2)^2/4}; k and -k invert", "");
  }
  return rep;
}

}  // namespace qeuclid
