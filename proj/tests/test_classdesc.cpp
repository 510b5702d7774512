#include <catch2/catch_amalgamated.hpp>

#include "wadge/classdesc.hpp"

using namespace wadge;

namespace {

DescSeq alternating(const ClassDescription& theta) {
  DescSeq s;
  s.tail = {theta.root, dual(theta).root};
  s.cert = MonotoneCertificate{MonotoneCertificate::AlternatingDual, {}, {}};
  return s;
}

}  // namespace

TEST_CASE("o_of") {
  CHECK(o_of(std_constant(0)) == Level::top());
  CHECK(o_of(std_constant(1)) == Level::top());
  Ordinal w = Ordinal::omega();
  CHECK(o_of(std_sigma(w)) == Level::of(w));
  auto g = su(Ordinal::fin(1), Ordinal::fin(2), alternating(std_sigma(Ordinal::fin(2))));
  CHECK(o_of(g) == Level::of(Ordinal::fin(1)));
}

TEST_CASE("dual") {
  auto g = std_sigma(Ordinal::zero());
  CHECK(desc_equal(dual(dual(g)), g));
  CHECK(desc_equal(dual(std_constant(0)), std_constant(1)));
  // dual of sigma: even leaves labelled 1, odd labelled 0
  auto d = dual(g);
  CHECK(child_at(*d.root, 0)->label == 1);
  CHECK(child_at(*d.root, 1)->label == 0);
  CHECK(child_at(*d.root, 2)->label == 1);
  // the tree shape is untouched
  CHECK(d.root->xi == g.root->xi);
  CHECK(d.root->eta == g.root->eta);
}

TEST_CASE("subdescription") {
  auto g = std_diff(Ordinal::fin(2), Ordinal::zero());
  CHECK(desc_equal(subdescription(g, {}), g));
  auto leaf = subdescription(g, {0});
  CHECK(leaf.root->is_leaf);
  CHECK(leaf.root->label == 0);

  auto theta = std_sigma(Ordinal::fin(1));
  auto s = su(Ordinal::zero(), Ordinal::fin(1), alternating(theta));
  for (uint32_t n = 0; n < 6; ++n) {
    auto sub = subdescription(s, {n});
    if (n % 2 == 0) CHECK(desc_equal(sub, theta));
    else CHECK(desc_equal(sub, dual(theta)));
  }
  CHECK_THROWS_AS(subdescription(std_constant(0), {0}), Error);
}

TEST_CASE("su") {
  // su(0,1, alternating leaves) is the sigma description
  DescSeq leaves;
  leaves.tail = {make_leaf(0), make_leaf(1)};
  leaves.cert = MonotoneCertificate{MonotoneCertificate::AlternatingDual, {}, {}};
  CHECK(desc_equal(su(Ordinal::zero(), Ordinal::fin(1), leaves), std_sigma(Ordinal::zero())));

  // eta defaults to 1
  CHECK(desc_equal(su(Ordinal::zero(), leaves), std_sigma(Ordinal::zero())));

  // level monotonicity is enforced
  CHECK_THROWS_AS(su(Ordinal::fin(2), Ordinal::fin(1), alternating(std_sigma(Ordinal::fin(1)))),
                  Error);
  CHECK_NOTHROW(su(Ordinal::fin(1), Ordinal::fin(1), alternating(std_sigma(Ordinal::fin(1)))));
}

TEST_CASE("is_acceptable") {
  CHECK_FALSE(is_acceptable(std_sigma(Ordinal::omega())).has_value());
  CHECK_FALSE(is_acceptable(std_diff(Ordinal::fin(2), Ordinal::zero())).has_value());
  CHECK_FALSE(is_acceptable(std_diff(Ordinal::fin(3), Ordinal::fin(1))).has_value());

  auto eta2 = su(Ordinal::zero(), Ordinal::fin(2), alternating(std_constant(0)));
  auto r1 = is_acceptable(eta2);
  REQUIRE(r1.has_value());
  CHECK(r1->find("eta") != std::string::npos);

  auto finite = std_bisep(Ordinal::zero(), std_sigma(Ordinal::zero()), std_constant(0));
  auto r2 = is_acceptable(finite);
  REQUIRE(r2.has_value());
  CHECK(r2->find("finite") != std::string::npos);

  DescSeq uncertified;
  uncertified.tail = {make_leaf(0), make_leaf(1)};
  auto nocert = su(Ordinal::zero(), Ordinal::fin(1), uncertified);
  auto r3 = is_acceptable(nocert);
  REQUIRE(r3.has_value());
  CHECK(r3->find("certificate") != std::string::npos);
}

TEST_CASE("classify_type: the stated examples") {
  CHECK(classify_type(std_constant(1)).kind == ClassTypeKind::Zero);
  CHECK(classify_type(std_constant(0)).kind == ClassTypeKind::Zero);

  for (auto xi : {Ordinal::zero(), Ordinal::fin(1), Ordinal::omega()}) {
    CHECK(classify_type(std_sigma(xi)).kind == ClassTypeKind::Countable);
    CHECK(classify_type(std_diff(Ordinal::fin(2), xi)).kind == ClassTypeKind::Countable);
  }

  // SU at level 0 over alternating level-1 sigma children: uncountable
  auto ups = su(Ordinal::zero(), Ordinal::fin(1), alternating(std_sigma(Ordinal::fin(1))));
  CHECK(classify_type(ups).kind == ClassTypeKind::Uncountable);

  // type is stable under dual
  CHECK(classify_type(dual(ups)).kind == ClassTypeKind::Uncountable);
  CHECK(classify_type(dual(std_sigma(Ordinal::fin(1)))).kind == ClassTypeKind::Countable);
  CHECK(classify_type(dual(std_diff(Ordinal::fin(2), Ordinal::zero()))).kind ==
        ClassTypeKind::Countable);

  CHECK_THROWS_AS(classify_type(std_bisep(Ordinal::zero(), std_sigma(Ordinal::zero()),
                                          std_constant(0))),
                  Error);
}

TEST_CASE("standard descriptions: structure") {
  // D_1 = Sigma
  CHECK(desc_equal(std_diff(Ordinal::fin(1), Ordinal::zero()), std_sigma(Ordinal::zero())));

  // D_2 children: leaf 0, then alternating D_1 duals and D_1
  auto d2 = std_diff(Ordinal::fin(2), Ordinal::zero());
  CHECK(child_at(*d2.root, 0)->is_leaf);
  CHECK(child_at(*d2.root, 0)->label == 0);
  CHECK(desc_node_equal(child_at(*d2.root, 1), dual(std_sigma(Ordinal::zero())).root));
  CHECK(desc_node_equal(child_at(*d2.root, 2), std_sigma(Ordinal::zero()).root));

  CHECK(desc_equal(std_constant(0), ClassDescription{make_leaf(0), "computable"}));

  // every constructor output is structurally valid
  for (const auto& g :
       {std_sigma(Ordinal::omega()), std_diff(Ordinal::fin(3), Ordinal::fin(1)),
        std_diff(Ordinal::omega(), Ordinal::zero()),
        std_bisep(Ordinal::zero(), std_sigma(Ordinal::fin(1)), std_constant(1)),
        std_sep(Ordinal::zero(), Ordinal::fin(2), std_sigma(Ordinal::fin(1)))}) {
    auto bad = validate_description(g);
    INFO((bad ? *bad : std::string()));
    CHECK_FALSE(bad.has_value());
  }
}

TEST_CASE("eta_eliminate") {
  auto theta = alternating(std_constant(0));

  // eta = 1: unchanged
  auto e1 = eta_eliminate(Ordinal::zero(), Ordinal::fin(1), theta);
  CHECK(desc_equal(e1, su(Ordinal::zero(), Ordinal::fin(1), theta)));

  // eta = 2: children are Theta_0, Lambda_0, Lambda_1, ... with
  // Lambda_n = SU^1 of the n-shifted sequence
  auto e2 = eta_eliminate(Ordinal::zero(), Ordinal::fin(2), theta);
  CHECK_FALSE(is_acceptable(e2).has_value());
  CHECK(desc_node_equal(child_at(*e2.root, 0), theta.at(0)));
  CHECK(desc_node_equal(child_at(*e2.root, 1),
                        su(Ordinal::zero(), Ordinal::fin(1), theta).root));
  CHECK(desc_node_equal(child_at(*e2.root, 2),
                        su(Ordinal::zero(), Ordinal::fin(1), drop_seq(theta, 1)).root));

  // eta = 3 stays acceptable
  auto e3 = eta_eliminate(Ordinal::zero(), Ordinal::fin(3), theta);
  auto bad3 = is_acceptable(e3);
  INFO((bad3 ? *bad3 : std::string()));
  CHECK_FALSE(bad3.has_value());

  // limit eta = omega: child n is the elimination at eta_n = n+1
  auto ew = eta_eliminate(Ordinal::zero(), Ordinal::omega(), theta);
  auto badw = is_acceptable(ew);
  INFO((badw ? *badw : std::string()));
  CHECK_FALSE(badw.has_value());
  CHECK(desc_node_equal(child_at(*ew.root, 0), theta.at(0)));
  CHECK(desc_node_equal(child_at(*ew.root, 1),
                        eta_eliminate(Ordinal::zero(), Ordinal::fin(2), theta).root));

  // o of the result is xi
  CHECK(o_of(ew) == Level::of(Ordinal::zero()));
}
