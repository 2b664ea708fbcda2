#pragma once
// Covariance structure of N-dimensional quantum Euclidean space: the braid
// matrix on V (x) V in the signed-index basis, the q-metric, and the spectral
// projectors (symmetric-traceless / antisymmetric / trace).
//
// Indices run over {-n,...,-1,0,1,...,n} for odd N = 2n+1 and the same set
// without 0 for even N = 2n.  rho(i) = sign(i) (N/2 - |i|), kept as 2*rho so
// everything stays integral; q-powers of rho are s-powers via q = s^8.
#include <cstdlib>
#include <vector>

#include "linalg.hpp"
#include "report.hpp"

namespace qeuclid {

struct IndexSet {
  int N = 0, n = 0;
  bool odd = false;

  IndexSet() = default;
  explicit IndexSet(int N_) : N(N_), n(N_ / 2), odd(N_ % 2 != 0) {
    if (N_ < 2) throw std::invalid_argument("IndexSet: need N >= 2");
  }

  std::vector<int> labels() const {
    std::vector<int> out;
    for (int i = -n; i <= n; ++i)
      if (i != 0 || odd) out.push_back(i);
    return out;
  }
  int slot(int label) const {
    if (odd) return label + n;
    return label < 0 ? label + n : label + n - 1;
  }
  int label(int slot) const {
    if (odd) return slot - n;
    return slot < n ? slot - n : slot - n + 1;
  }
  // 2 rho(i) = sign(i) (N - 2|i|)
  int two_rho(int label) const {
    int sg = (label > 0) - (label < 0);
    return sg * (N - 2 * std::abs(label));
  }
  // Position in the rho-decreasing enumeration (+1,...,+n, 0, -n,...,-1);
  // the braid matrix's off-diagonal terms are ordered by this key, not by
  // the signed label (the two agree only when rho is monotone in the label).
  int key(int label) const {
    if (label > 0) return label;
    if (label == 0) return n + 1;
    return N + 1 + label;
  }
  // q^rho(i) as an exact scalar
  FieldElem q_rho(int label) const { return FieldElem::s_power(4 * two_rho(label)); }
};

struct StructurePack {
  IndexSet idx;
  Mat g_lo, g_up;    // g_{ij}, g^{ij} = delta_{i,-j} q^{rho(i)}
  Mat u_inv;         // g^{ai} g_{aj} = q^{-2 rho(i)} delta^i_j, diagonal
  Mat rhat;          // braid matrix on V (x) V, row (a,b) col (c,d)
  Mat ps, pa, pt;    // spectral projectors
  FieldElem pt_scalar;    // Pt = pt_scalar * (g^{ab} g_{cd})
  FieldElem metric_quad;  // Q = g_{ab} g^{ab} = sum_i q^{2 rho(i)}

  int pair(int label_a, int label_b) const { return idx.slot(label_a) * idx.N + idx.slot(label_b); }
};

inline StructurePack build_structure(int N) {
  StructurePack sp;
  sp.idx = IndexSet(N);
  const auto labels = sp.idx.labels();
  const FieldElem lam = FieldElem::lambda();

  sp.g_lo = Mat(N, N);
  sp.g_up = Mat(N, N);
  sp.u_inv = Mat(N, N);
  for (int i : labels) {
    sp.g_lo.at(sp.idx.slot(i), sp.idx.slot(-i)) = sp.idx.q_rho(i);
    sp.g_up.at(sp.idx.slot(i), sp.idx.slot(-i)) = sp.idx.q_rho(i);
    sp.u_inv.at(sp.idx.slot(i), sp.idx.slot(i)) = FieldElem::s_power(-8 * sp.idx.two_rho(i));
  }

  // R on V (x) V, then the braid matrix as swap . R.
  Mat R(N * N, N * N);
  for (int i : labels)
    for (int j : labels) {
      int e = 8 * ((i == j ? 1 : 0) - (i == -j ? 1 : 0));
      R.at(sp.pair(i, j), sp.pair(i, j)) = FieldElem::s_power(e);
    }
  for (int i : labels)
    for (int j : labels) {
      if (sp.idx.key(i) >= sp.idx.key(j)) continue;
      R.at(sp.pair(i, j), sp.pair(j, i)) += lam;
      R.at(sp.pair(i, -i), sp.pair(j, -j)) -= lam * FieldElem::s_power(4 * (sp.idx.two_rho(j) - sp.idx.two_rho(i)));
    }
  sp.rhat = Mat(N * N, N * N);
  for (int a : labels)
    for (int b : labels)
      for (int col = 0; col < N * N; ++col) sp.rhat.at(sp.pair(a, b), col) = R.at(sp.pair(b, a), col);

  // Projectors from the minimal cubic: eigenvalues q, -q^{-1}, q^{1-N}.
  const FieldElem mu_s = FieldElem::q_power(1);
  const FieldElem mu_a = -FieldElem::q_power(-1);
  const FieldElem mu_t = FieldElem::s_power(8 * (1 - N));
  const Mat id = Mat::identity(N * N);
  auto proj = [&](const FieldElem& va, const FieldElem& vb, const FieldElem& vc) {
    FieldElem denom = (va - vb) * (va - vc);
    return denom.inv() * ((sp.rhat - vb * id) * (sp.rhat - vc * id));
  };
  sp.ps = proj(mu_s, mu_a, mu_t);
  sp.pa = proj(mu_a, mu_s, mu_t);
  sp.pt = proj(mu_t, mu_s, mu_a);

  for (int i : labels) sp.metric_quad += FieldElem::s_power(8 * sp.idx.two_rho(i));
  // Scalar relating Pt to the rank-one form g^{ab} g_{cd}, read off at the
  // first structurally nonzero entry.
  int a0 = labels.front();
  sp.pt_scalar = sp.pt.at(sp.pair(a0, -a0), sp.pair(a0, -a0)) /
                 (sp.g_up.at(sp.idx.slot(a0), sp.idx.slot(-a0)) * sp.g_lo.at(sp.idx.slot(a0), sp.idx.slot(-a0)));
  return sp;
}

// Certification of the structure layer; every known identity is rechecked
// from scratch against the constructed matrices.
inline Report verify_structure(const StructurePack& sp) {
  Report rep;
  rep.suite = "structure";
  const int N = sp.idx.N;
  const auto labels = sp.idx.labels();
  const std::string dims = "N=" + std::to_string(N);

  rep.add(sp.g_up * sp.g_lo == Mat::identity(N) && sp.g_lo * sp.g_up == Mat::identity(N), "metric-inverse",
          "g^{ia} g_{aj} = delta^i_j", dims);

  {
    Mat u = sp.g_up.transpose() * sp.g_lo;  // (g^{ai} g_{aj})_{ij}
    rep.add(u == sp.u_inv, "metric-u-inverse", "g^{ai} g_{aj} = q^{-2 rho(i)} delta^i_j", dims);
  }

  {
    Mat r1 = Mat::kron(sp.rhat, Mat::identity(N));
    Mat r2 = Mat::kron(Mat::identity(N), sp.rhat);
    rep.add(r1 * r2 * r1 == r2 * r1 * r2, "braid", "(R x 1)(1 x R)(R x 1) = (1 x R)(R x 1)(1 x R)", dims);
  }

  {
    const Mat id = Mat::identity(N * N);
    Mat cubic = (sp.rhat - FieldElem::q_power(1) * id) * (sp.rhat + FieldElem::q_power(-1) * id) *
                (sp.rhat - FieldElem::s_power(8 * (1 - N)) * id);
    rep.add(cubic.is_zero(), "cubic", "(R - q)(R + q^-1)(R - q^(1-N)) = 0", dims);
  }

  {
    const Mat id = Mat::identity(N * N);
    bool ok = (sp.ps + sp.pa + sp.pt == id) && (sp.ps * sp.ps == sp.ps) && (sp.pa * sp.pa == sp.pa) &&
              (sp.pt * sp.pt == sp.pt) && (sp.ps * sp.pa).is_zero() && (sp.pa * sp.pt).is_zero() &&
              (sp.ps * sp.pt).is_zero() && (sp.pa * sp.ps).is_zero() && (sp.pt * sp.pa).is_zero() &&
              (sp.pt * sp.ps).is_zero();
    rep.add(ok, "projector-idempotent", "Pa Pb = delta_ab Pa, Ps + Pa + Pt = 1", dims);
  }

  {
    Mat spectral = FieldElem::q_power(1) * sp.ps - FieldElem::q_power(-1) * sp.pa +
                   FieldElem::s_power(8 * (1 - N)) * sp.pt;
    rep.add(spectral == sp.rhat, "spectral", "R = q Ps - q^-1 Pa + q^(1-N) Pt", dims);
  }

  {
    int rs = rank(sp.ps), ra = rank(sp.pa), rt = rank(sp.pt);
    bool ok = rs == N * (N + 1) / 2 - 1 && ra == N * (N - 1) / 2 && rt == 1;
    rep.add(ok, "projector-ranks", "rank(Ps, Pa, Pt) = (N(N+1)/2 - 1, N(N-1)/2, 1)",
            dims + " got (" + std::to_string(rs) + "," + std::to_string(ra) + "," + std::to_string(rt) + ")");
  }

  {
    Mat gg(N * N, N * N);
    for (int a : labels)
      for (int b : labels)
        for (int c : labels)
          for (int d : labels)
            gg.at(sp.pair(a, b), sp.pair(c, d)) =
                sp.g_up.at(sp.idx.slot(a), sp.idx.slot(b)) * sp.g_lo.at(sp.idx.slot(c), sp.idx.slot(d));
    bool ok = sp.pt == sp.pt_scalar * gg && sp.pt_scalar == sp.metric_quad.inv();
    Check c{"trace-form", "Pt^{ab}_{cd} = g^{ab} g_{cd} / (g_{ef} g^{ef})", ok ? "pass" : "fail", dims,
            nlohmann::json::object()};
    c.extra["scalar"] = sp.pt_scalar.str();
    rep.checks.push_back(std::move(c));
  }

  {
    // g_{ab} R^{ab}_{cd} = q^{1-N} g_{cd} and R^{ab}_{cd} g^{cd} = q^{1-N} g^{ab}
    bool ok = true;
    const FieldElem ev = FieldElem::s_power(8 * (1 - N));
    for (int c : labels)
      for (int d : labels) {
        FieldElem acc;
        for (int a : labels)
          acc += sp.idx.q_rho(a) * sp.rhat.at(sp.pair(a, -a), sp.pair(c, d));
        if (acc != ev * sp.g_lo.at(sp.idx.slot(c), sp.idx.slot(d))) ok = false;
      }
    for (int a : labels)
      for (int b : labels) {
        FieldElem acc;
        for (int c : labels)
          acc += sp.rhat.at(sp.pair(a, b), sp.pair(c, -c)) * sp.idx.q_rho(c);
        if (acc != ev * sp.g_up.at(sp.idx.slot(a), sp.idx.slot(b))) ok = false;
      }
    rep.add(ok, "metric-eigen", "g_{ab} R^{ab}_{cd} = q^(1-N) g_{cd}, R^{ab}_{cd} g^{cd} = q^(1-N) g^{ab}", dims);
  }

  if (N == 3) {
    // Fixed low-dimensional relations, stated as covectors that must lie in
    // the row space of the relation projector (u P = u).
    auto in_rowspace = [&](const std::vector<std::pair<int, FieldElem>>& u, const Mat& P) {
      Mat row(1, N * N);
      for (const auto& [col, v] : u) row.at(0, col) = v;
      return row * P == row;
    };
    const FieldElem mu = FieldElem::mu(), one(1);
    bool c1 = in_rowspace({{sp.pair(-1, 0), one}, {sp.pair(0, -1), -FieldElem::q_power(1)}}, sp.pa);
    bool c2 = in_rowspace({{sp.pair(0, 1), one}, {sp.pair(1, 0), -FieldElem::q_power(1)}}, sp.pa);
    bool c3 = in_rowspace({{sp.pair(1, -1), one}, {sp.pair(-1, 1), -one}, {sp.pair(0, 0), -mu}}, sp.pa);
    rep.add(c1, "coord-rel-a", "x^-1 x^0 - q x^0 x^-1 in rowspace(Pa)", dims);
    rep.add(c2, "coord-rel-b", "x^0 x^1 - q x^1 x^0 in rowspace(Pa)", dims);
    rep.add(c3, "coord-rel-c", "x^1 x^-1 - x^-1 x^1 - (q^1/2 - q^-1/2) x^0 x^0 in rowspace(Pa)", dims);

    Mat psym = sp.ps + sp.pt;
    bool f1 = in_rowspace({{sp.pair(-1, 0), FieldElem::q_power(1)}, {sp.pair(0, -1), one}}, psym);
    bool f2 = in_rowspace({{sp.pair(0, 1), FieldElem::q_power(1)}, {sp.pair(1, 0), one}}, psym);
    bool f3 = in_rowspace({{sp.pair(-1, 1), one}, {sp.pair(1, -1), one}}, psym);
    bool f4 = in_rowspace({{sp.pair(1, 1), one}}, psym) && in_rowspace({{sp.pair(-1, -1), one}}, psym);
    bool f5 = in_rowspace({{sp.pair(0, 0), one}, {sp.pair(-1, 1), -mu}}, psym);
    rep.add(f1, "form-rel-a", "q xi^-1 xi^0 + xi^0 xi^-1 in rowspace(Ps + Pt)", dims);
    rep.add(f2, "form-rel-b", "q xi^0 xi^1 + xi^1 xi^0 in rowspace(Ps + Pt)", dims);
    rep.add(f3, "form-rel-c", "xi^-1 xi^1 + xi^1 xi^-1 in rowspace(Ps + Pt)", dims);
    rep.add(f4, "form-rel-d", "(xi^1)^2 and (xi^-1)^2 in rowspace(Ps + Pt)", dims);
    rep.add(f5, "form-rel-e", "(xi^0)^2 - (q^1/2 - q^-1/2) xi^-1 xi^1 in rowspace(Ps + Pt)", dims);
  }

  return rep;
}

}  // namespace qeuclid
