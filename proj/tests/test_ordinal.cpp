#include <catch2/catch_amalgamated.hpp>

#include "wadge/ordinal.hpp"

using namespace wadge;

namespace {

// Independent evaluation of the stated coding formulas, used to freeze the
// derived code values.
unsigned long long tpair(unsigned long long x, unsigned long long y) {
  return (x + y) * (x + y + 1) / 2 + y;
}

Ordinal w2(uint64_t a, uint64_t b, uint64_t c) {
  // w^2*a + w*b + c
  Ordinal r;
  if (a) r.terms.push_back(Ordinal::Term{Ordinal::fin(2), a});
  if (b) r.terms.push_back(Ordinal::Term{Ordinal::fin(1), b});
  if (c) r.terms.push_back(Ordinal::Term{Ordinal::zero(), c});
  return r;
}

std::vector<Ordinal> below_w3_coeff3() {
  std::vector<Ordinal> out;
  for (uint64_t a = 0; a <= 3; ++a)
    for (uint64_t b = 0; b <= 3; ++b)
      for (uint64_t c = 0; c <= 3; ++c) out.push_back(w2(a, b, c));
  return out;
}

}  // namespace

TEST_CASE("compare: basic examples and laws") {
  Ordinal zero = Ordinal::zero();
  Ordinal one = Ordinal::fin(1);
  Ordinal w = Ordinal::omega();

  CHECK(compare(zero, one) == Order::Less);
  CHECK(compare(w, w) == Order::Equal);
  // w*2+3 < w^2
  Ordinal w2p3 = w2(0, 2, 3);
  CHECK(compare(w2p3, Ordinal::w_pow(Ordinal::fin(2))) == Order::Less);

  auto all = below_w3_coeff3();
  for (const auto& a : all)
    for (const auto& b : all) {
      Order ab = compare(a, b);
      Order ba = compare(b, a);
      if (ab == Order::Less) CHECK(ba == Order::Greater);
      if (ab == Order::Equal) CHECK(ba == Order::Equal);
      for (const auto& c : all) {
        if (ab == Order::Less && compare(b, c) == Order::Less)
          CHECK(compare(a, c) == Order::Less);
      }
    }
}

TEST_CASE("classify and successor round trip") {
  CHECK(classify(Ordinal::zero()).kind == OrdKind::Zero);

  auto c = classify(succ(Ordinal::w_pow(Ordinal::fin(2))));
  REQUIRE(c.kind == OrdKind::Successor);
  CHECK(c.pred == Ordinal::w_pow(Ordinal::fin(2)));

  CHECK(classify(w2(0, 2, 0)).kind == OrdKind::Limit);

  for (const auto& a : below_w3_coeff3()) {
    auto r = classify(succ(a));
    REQUIRE(r.kind == OrdKind::Successor);
    CHECK(r.pred == a);
  }
}

TEST_CASE("fundamental sequences: stated rules") {
  Ordinal w = Ordinal::omega();
  CHECK(fundamental_seq(w, 3) == Ordinal::fin(3));
  CHECK(fundamental_seq(Ordinal::w_pow(Ordinal::fin(2)), 2) == w2(0, 2, 0));
  CHECK(fundamental_seq(Ordinal::w_pow(w), 3) == Ordinal::w_pow(Ordinal::fin(3)));
  CHECK_THROWS_AS(fundamental_seq(Ordinal::fin(4), 1), Error);
  CHECK_THROWS_AS(fundamental_seq(Ordinal::zero(), 1), Error);
}

TEST_CASE("fundamental sequences: monotone and cofinal below w^3") {
  std::vector<Ordinal> limits;
  for (const auto& a : below_w3_coeff3())
    if (is_limit(a)) limits.push_back(a);
  limits.push_back(Ordinal::w_pow(Ordinal::fin(3)));

  for (const auto& lam : limits) {
    for (uint64_t k = 0; k < 20; ++k) {
      Ordinal a = fundamental_seq(lam, k);
      Ordinal b = fundamental_seq(lam, k + 1);
      CHECK(compare(a, b) == Order::Less);
      CHECK(compare(b, lam) == Order::Less);
    }
    for (const auto& beta : below_w3_coeff3()) {
      if (!(compare(beta, lam) == Order::Less)) continue;
      u128 bound = code(beta) + 20;
      bool reached = false;
      for (u128 k = 0; k <= bound && !reached; ++k)
        if (!(compare(fundamental_seq(lam, uint64_t(k)), beta) == Order::Less)) reached = true;
      CHECK(reached);
    }
  }
}

TEST_CASE("coding: base cases and derived values") {
  CHECK(code(Ordinal::zero()) == 0);

  // code(1), evaluated from the pairing formulas directly
  unsigned long long term = tpair(0, 1);           // pair(code(0), 1)
  unsigned long long seq = tpair(0, term) + 1;     // seqcode of the one-term list
  CHECK(code(Ordinal::fin(1)) == u128(1 + seq));
  CHECK(code(Ordinal::fin(1)) == 7);

  CHECK(decode(7, Ordinal::omega()) == Ordinal::fin(1));
  CHECK_THROWS_AS(decode(8, Ordinal::omega()), Error);
  // valid code but not below the bound
  CHECK_THROWS_AS(decode(7, Ordinal::fin(1)), Error);
}

TEST_CASE("coding: bijective below w^3 with coefficients <= 3") {
  auto all = below_w3_coeff3();
  std::vector<u128> seen;
  for (const auto& a : all) {
    u128 n = code(a);
    for (u128 m : seen) CHECK(m != n);
    seen.push_back(n);
    CHECK(decode(n, Ordinal::w_pow(Ordinal::fin(3))) == a);
  }
}

TEST_CASE("ordinal text syntax round trips") {
  auto check_rt = [](const std::string& s) {
    Ordinal a = parse_ordinal(s);
    CHECK(print(a) == s);
    CHECK(parse_ordinal(print(a)) == a);
  };
  check_rt("0");
  check_rt("5");
  check_rt("w");
  check_rt("w+5");
  check_rt("w^2*3+w+5");
  check_rt("w^w");
  check_rt("w^(w+1)*2+w^2");

  for (const auto& a : below_w3_coeff3()) CHECK(parse_ordinal(print(a)) == a);

  CHECK_THROWS_AS(parse_ordinal("w+w^2"), Error);   // non-decreasing exponents
  CHECK_THROWS_AS(parse_ordinal("w^"), Error);
  CHECK_THROWS_AS(parse_ordinal(""), Error);
  CHECK_THROWS_AS(parse_ordinal("3+3"), Error);
}

TEST_CASE("levels: the top element sits above every notation") {
  Level top = Level::top();
  CHECK(compare(top, Level::of(Ordinal::w_pow(Ordinal::fin(3)))) == Order::Greater);
  CHECK(compare(Level::of(Ordinal::zero()), top) == Order::Less);
  CHECK(compare(top, top) == Order::Equal);
  CHECK(print(top) == "w1");
}
