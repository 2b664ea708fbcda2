#include <catch2/catch_amalgamated.hpp>
#include <qeuclid/ncalg.hpp>

#include <random>

using namespace qeuclid;

namespace {

Word w(std::initializer_list<std::pair<Species, int>> ls) {
  Word out;
  for (auto [sp, i] : ls) out.push_back(letter(sp, i));
  return out;
}

NCExpr nf(const RuleSet& rs, const Word& word) { return rs.normal_form(word); }

const RuleSet& rules3() {
  static RuleSet rs = derive_rules(build_structure(3));
  return rs;
}

}  // namespace

TEST_CASE("letters pack and unpack", "[ncalg]") {
  for (auto sp : {Species::XI, Species::X, Species::D}) {
    for (int i = -8; i <= 8; ++i) {
      char c = letter(sp, i);
      REQUIRE(species_of(c) == sp);
      REQUIRE(index_of(c) == i);
    }
  }
  REQUIRE(letter(Species::XI, 1) < letter(Species::X, -1));
  REQUIRE(letter(Species::X, 1) < letter(Species::D, -1));
  REQUIRE(letter(Species::D, 1) < letter(Species::LAM, -1));
  REQUIRE(shortlex_less(Word(), w({{Species::X, 0}})));
}

TEST_CASE("coordinate exchange rules for N=3", "[ncalg]") {
  const auto& rs = rules3();
  const FieldElem mu = FieldElem::mu();
  REQUIRE(nf(rs, w({{Species::X, 0}, {Species::X, -1}})) ==
          NCExpr::monomial(w({{Species::X, -1}, {Species::X, 0}}), FieldElem::q_power(-1)));
  REQUIRE(nf(rs, w({{Species::X, 1}, {Species::X, 0}})) ==
          NCExpr::monomial(w({{Species::X, 0}, {Species::X, 1}}), FieldElem::q_power(-1)));
  REQUIRE(nf(rs, w({{Species::X, 1}, {Species::X, -1}})) ==
          NCExpr::monomial(w({{Species::X, -1}, {Species::X, 1}})) +
              NCExpr::monomial(w({{Species::X, 0}, {Species::X, 0}}), mu));
}

TEST_CASE("one-form exchange rules for N=3", "[ncalg]") {
  const auto& rs = rules3();
  const FieldElem mu = FieldElem::mu(), q1 = FieldElem::q_power(1);
  REQUIRE(nf(rs, w({{Species::XI, 0}, {Species::XI, -1}})) ==
          NCExpr::monomial(w({{Species::XI, -1}, {Species::XI, 0}}), -q1));
  REQUIRE(nf(rs, w({{Species::XI, 1}, {Species::XI, 0}})) ==
          NCExpr::monomial(w({{Species::XI, 0}, {Species::XI, 1}}), -q1));
  REQUIRE(nf(rs, w({{Species::XI, 1}, {Species::XI, -1}})) ==
          NCExpr::monomial(w({{Species::XI, -1}, {Species::XI, 1}}), FieldElem(-1)));
  REQUIRE(nf(rs, w({{Species::XI, 1}, {Species::XI, 1}})).is_zero());
  REQUIRE(nf(rs, w({{Species::XI, -1}, {Species::XI, -1}})).is_zero());
  REQUIRE(nf(rs, w({{Species::XI, 0}, {Species::XI, 0}})) ==
          NCExpr::monomial(w({{Species::XI, -1}, {Species::XI, 1}}), mu));
}

TEST_CASE("derivative exchange rules for N=3", "[ncalg]") {
  const auto& rs = rules3();
  const FieldElem mu = FieldElem::mu(), q1 = FieldElem::q_power(1);
  REQUIRE(nf(rs, w({{Species::D, 0}, {Species::D, -1}})) ==
          NCExpr::monomial(w({{Species::D, -1}, {Species::D, 0}}), q1));
  REQUIRE(nf(rs, w({{Species::D, 1}, {Species::D, 0}})) ==
          NCExpr::monomial(w({{Species::D, 0}, {Species::D, 1}}), q1));
  REQUIRE(nf(rs, w({{Species::D, 1}, {Species::D, -1}})) ==
          NCExpr::monomial(w({{Species::D, -1}, {Species::D, 1}})) -
              NCExpr::monomial(w({{Species::D, 0}, {Species::D, 0}}), mu));
}

TEST_CASE("derivative past coordinate matches the inhomogeneous exchange", "[ncalg]") {
  const auto& rs = rules3();
  const FieldElem q1 = FieldElem::q_power(1), lam = FieldElem::lambda();
  NCExpr d0x0 = nf(rs, w({{Species::D, 0}, {Species::X, 0}}));
  NCExpr expect = NCExpr::one() + NCExpr::monomial(w({{Species::X, 0}, {Species::D, 0}}), q1) +
                  NCExpr::monomial(w({{Species::X, 1}, {Species::D, 1}}), q1 * lam);
  REQUIRE(d0x0 == expect);

  REQUIRE(nf(rs, w({{Species::D, 1}, {Species::X, -1}})) ==
          NCExpr::monomial(w({{Species::X, -1}, {Species::D, 1}})));
  REQUIRE(nf(rs, w({{Species::D, -1}, {Species::X, 1}})) ==
          NCExpr::monomial(w({{Species::X, 1}, {Species::D, -1}})));
  REQUIRE(nf(rs, w({{Species::D, 1}, {Species::X, 1}})) ==
          NCExpr::one() + NCExpr::monomial(w({{Species::X, 1}, {Species::D, 1}}), FieldElem::q_power(2)));
}

TEST_CASE("quadratic invariants are central in their own algebras", "[ncalg]") {
  const auto& rs = rules3();
  const IndexSet& idx = rs.sp.idx;
  NCExpr r2, dd;
  for (int i : idx.labels()) {
    r2 += NCExpr::monomial(w({{Species::X, i}, {Species::X, -i}}), idx.q_rho(i));
    dd += NCExpr::monomial(w({{Species::D, -i}, {Species::D, i}}), idx.q_rho(i));  // g^{ab} d_b d_a
  }
  r2 = rs.normal_order(r2);
  dd = rs.normal_order(dd);
  for (int i : idx.labels()) {
    NCExpr xi_gen = NCExpr::generator(Species::X, i);
    REQUIRE(rs.mul(r2, xi_gen) == rs.mul(xi_gen, r2));
    NCExpr di = NCExpr::generator(Species::D, i);
    REQUIRE(rs.mul(dd, di) == rs.mul(di, dd));
  }
}

TEST_CASE("scale generator commutation and cancellation", "[ncalg]") {
  const auto& rs = rules3();
  NCExpr lam_word = NCExpr::monomial(w({{Species::LAM, 1}, {Species::LAM, -1}}));
  REQUIRE(rs.normal_order(lam_word) == NCExpr::one());
  REQUIRE(rs.normal_form(w({{Species::LAM, 1}, {Species::X, 0}})) ==
          NCExpr::monomial(w({{Species::X, 0}, {Species::LAM, 1}}), FieldElem::q_power(-1)));
  REQUIRE(rs.normal_form(w({{Species::LAM, 1}, {Species::D, 1}})) ==
          NCExpr::monomial(w({{Species::D, 1}, {Species::LAM, 1}}), FieldElem::q_power(1)));
  REQUIRE(rs.normal_form(w({{Species::LAM, 1}, {Species::XI, 1}})) ==
          NCExpr::monomial(w({{Species::XI, 1}, {Species::LAM, 1}})));
  REQUIRE(rs.normal_form(w({{Species::NU2INV, 0}, {Species::NU2, 0}})) == NCExpr::one());
}

TEST_CASE("normal forms are species-blocked and index-ordered", "[ncalg]") {
  const auto& rs = rules3();
  std::mt19937 rng(424242);
  std::vector<char> alphabet;
  for (int i : rs.sp.idx.labels())
    for (auto sp : {Species::XI, Species::X, Species::D}) alphabet.push_back(letter(sp, i));
  alphabet.push_back(letter(Species::LAM, 1));
  alphabet.push_back(letter(Species::LAM, -1));
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  for (int round = 0; round < 60; ++round) {
    Word word;
    for (int k = 0; k < 5; ++k) word.push_back(alphabet[pick(rng)]);
    for (const auto& [nw, c] : rs.normal_form(word).terms) {
      REQUIRE(!c.is_zero());
      for (size_t k = 0; k + 1 < nw.size(); ++k) {
        Species sa = species_of(nw[k]), sb = species_of(nw[k + 1]);
        REQUIRE((uint8_t)sa <= (uint8_t)sb);
        if (sa == sb) {
          int ia = index_of(nw[k]), ib = index_of(nw[k + 1]);
          if (sa == Species::XI)
            REQUIRE(ia < ib);
          else if (sa == Species::LAM)
            REQUIRE(ia == ib);
          else
            REQUIRE(ia <= ib);
        }
      }
    }
  }
}

TEST_CASE("both rewrite strategies agree on random words", "[ncalg]") {
  const auto& rs = rules3();
  std::mt19937 rng(20260822);
  std::vector<char> alphabet;
  for (int i : rs.sp.idx.labels())
    for (auto sp : {Species::XI, Species::X, Species::D}) alphabet.push_back(letter(sp, i));
  alphabet.push_back(letter(Species::LAM, 1));
  alphabet.push_back(letter(Species::LAM, -1));
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  for (int round = 0; round < 80; ++round) {
    Word word;
    for (int k = 0; k < 5; ++k) word.push_back(alphabet[pick(rng)]);
    REQUIRE(rs.normal_form(word, Strategy::Leftmost) == rs.normal_form(word, Strategy::Rightmost));
  }
}
