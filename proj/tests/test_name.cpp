#include <catch2/catch_amalgamated.hpp>

#include "wadge/name.hpp"
#include "wadge/props.hpp"

using namespace wadge;

namespace {

Ctx ctx0() { return StageContext::make(Ordinal::fin(2), default_machine()); }

GammaName sigma_name_contains5(Ctx ctx) {
  // std_sigma(0) name: route to child 1 once a 5 appears
  GammaName n;
  n.desc = std_sigma(Ordinal::zero());
  n.forest = full_forest(ctx, Ordinal::zero(), 4, 6);
  NodeAssign na;
  for (const auto& s : n.forest.members) {
    bool has5 = false;
    for (u128 e : s) has5 |= (e == 5);
    if (has5) {
      na.f[s] = 1;
      na.beta[s] = Ordinal::zero();
    }
  }
  n.assign[Path{}] = na;
  return n;
}

}  // namespace

TEST_CASE("eval_leaf") {
  auto ctx = ctx0();

  // one-node description: the constant function
  GammaName leaf;
  leaf.desc = std_constant(1);
  leaf.forest = full_forest(ctx, Ordinal::zero(), 3, 2);
  for (const auto& w : leaf.forest.members) {
    auto l = eval_leaf(leaf, w);
    CHECK(l.node.empty());
    CHECK(l.label == 1);
  }

  auto n = sigma_name_contains5(ctx);
  CHECK_FALSE(check_name(n).has_value());
  auto l5 = eval_leaf(n, str_of({5}));
  CHECK(l5.node == Path{1});
  CHECK(l5.label == 1);
  CHECK(eval01(n, str_of({0, 1})) == 0);
  CHECK_THROWS_AS(eval_leaf(n, str_of({9, 9, 9, 9, 9})), Error);

  // dual name flips the value pointwise
  auto d = dual_name(n);
  for (const auto& w : n.forest.members) CHECK(eval01(d, w) == 1 - eval01(n, w));
  CHECK(desc_equal(dual_name(d).desc, n.desc));
  CHECK(d.forest.members == n.forest.members);
}

TEST_CASE("restrict") {
  auto ctx = ctx0();
  auto n = sigma_name_contains5(ctx);

  auto same = restrict_name(n, n.forest);
  for (const auto& w : n.forest.members) CHECK(eval01(same, w) == eval01(n, w));

  AlphaForest empty{ctx, Ordinal::zero(), {}, 4, 6};
  auto none = restrict_name(n, empty);
  CHECK(none.forest.members.empty());

  AlphaForest half = forest_from_pred(ctx, Ordinal::zero(),
                                      [](const Str& s) { return s.empty() || s[0] != 0; }, 4, 6);
  auto h = restrict_name(n, half);
  CHECK_FALSE(check_name(h).has_value());
  for (const auto& w : half.members) CHECK(eval01(h, w) == eval01(n, w));

  AlphaForest outside{ctx, Ordinal::zero(), {str_of({7, 7, 7, 7, 7})}, 5, 8};
  CHECK_THROWS_AS(restrict_name(n, outside), Error);
}

TEST_CASE("totalize") {
  auto ctx = ctx0();

  // already total: values unchanged everywhere
  auto n = sigma_name_contains5(ctx);
  auto t = totalize(n);
  for (const auto& w : n.forest.members) CHECK(eval01(t, w) == eval01(n, w));

  // empty domain: the constant default path
  GammaName e;
  e.desc = std_sigma(Ordinal::zero());
  e.forest = AlphaForest{ctx, Ordinal::zero(), {}, 3, 2};
  auto te = totalize(e);
  CHECK(te.forest.members.size() == full_forest(ctx, Ordinal::zero(), 3, 2).members.size());
  for (const auto& w : te.forest.members) CHECK(eval01(te, w) == 0);

  // partial name: agreement on the original members
  AlphaForest part = forest_from_pred(ctx, Ordinal::zero(),
                                      [](const Str& s) { return s.size() < 2 || s[0] == 5; }, 4, 6);
  auto np = restrict_name(n, part);
  auto tp = totalize(np);
  CHECK_FALSE(check_name(tp).has_value());
  for (const auto& w : part.members) CHECK(eval01(tp, w) == eval01(np, w));
}

TEST_CASE("merge") {
  auto ctx = ctx0();
  auto n = sigma_name_contains5(ctx);
  const AlphaForest& S = n.forest;

  // single piece covering S
  auto m1 = merge(S, n.desc, {{S, n}});
  for (const auto& w : S.members) CHECK(eval01(m1, w) == eval01(n, w));

  // two disjoint cones with different names
  AlphaForest c0 = forest_from_pred(ctx, Ordinal::zero(),
                                    [](const Str& s) { return !s.empty() && s[0] == 0; }, 4, 6);
  AlphaForest c1 = forest_from_pred(ctx, Ordinal::zero(),
                                    [](const Str& s) { return !s.empty() && s[0] == 1; }, 4, 6);
  GammaName k0 = restrict_name(n, c0);
  GammaName always;  // routes everything to child 1
  always.desc = n.desc;
  always.forest = c1;
  NodeAssign na;
  for (const auto& s : c1.members) {
    na.f[s] = 1;
    na.beta[s] = Ordinal::zero();
  }
  always.assign[Path{}] = na;

  auto m2 = merge(S, n.desc, {{c0, k0}, {c1, always}});
  CHECK_FALSE(check_name(m2).has_value());
  for (const auto& w : c0.members)
    if (stable_member(m2, w) || w.size() == 4) CHECK(eval01(m2, w) == eval01(n, w));
  for (const auto& w : c1.members)
    if (w.size() >= 2) CHECK(eval01(m2, w) == 1);

  // the empty family: the all-default name
  auto m3 = merge(S, n.desc, {});
  for (const auto& w : S.members) CHECK(eval01(m3, w) == 0);

  // non-orthogonal pieces are rejected
  CHECK_THROWS_AS(merge(S, n.desc, {{S, n}, {c0, k0}}), Error);
}

TEST_CASE("compose_lower") {
  auto ctx = ctx0();
  Ordinal zero = Ordinal::zero();
  ClassDescription g = std_sigma(Ordinal::fin(1));
  AlphaForest S = full_forest(ctx, zero, 4, 3);

  // F_0: constant 0; F_1: constant 1 (via routing)
  GammaName f0;
  f0.desc = g;
  f0.forest = S;
  GammaName f1 = route_to_leaf(g, 1, S, "computable");
  REQUIRE(eval01(f1, str_of({0})) == 1);

  // constant selector: the first name
  Approximation sel;
  sel.forest = S;
  for (const auto& s : S.members) sel.f[s] = 0;
  auto c = compose_lower(sel, {f0, f1});
  for (const auto& w : S.members) CHECK(eval01(c, w) == 0);

  // two cones
  Approximation cones;
  cones.forest = S;
  for (const auto& s : S.members) cones.f[s] = (!s.empty() && s[0] == 1) ? 1 : 0;
  auto c2 = compose_lower(cones, {f0, f1});
  for (const auto& w : S.deep_members()) CHECK(eval01(c2, w) == ((w[0] == 1) ? 1 : 0));

  // a single mind change is honoured after stabilisation
  Approximation flip;
  flip.forest = S;
  for (const auto& s : S.members) flip.f[s] = s.size() >= 2 ? 1 : 0;
  auto c3 = compose_lower(flip, {f0, f1});
  for (const auto& w : S.deep_members()) CHECK(eval01(c3, w) == 1);

  // level must sit strictly below
  ClassDescription low = std_sigma(zero);
  GammaName l0;
  l0.desc = low;
  l0.forest = S;
  CHECK_THROWS_AS(compose_lower(sel, {l0}), Error);
}

TEST_CASE("translate_oracle") {
  OracleRegistry reg;
  reg.add("computable", Str{});
  reg.add("z", str_of({1, 2, 3, 4}));
  reg.add("w", str_of({1, 2, 3, 4, 5, 5}));

  auto op = oracle_probe_machine();
  auto ctxz = StageContext::make(Ordinal::fin(2), op, reg.get("z"));
  GammaName n;
  n.desc = std_sigma(Ordinal::fin(1));
  n.forest = full_forest(ctxz, Ordinal::fin(1), 4, 2);
  NodeAssign na;
  for (const auto& s : n.forest.members) {
    if (!s.empty() && s[0] == 1) {
      na.f[s] = 1;
      na.beta[s] = Ordinal::zero();
    }
  }
  n.assign[Path{}] = na;
  n.oracle = "z";
  REQUIRE_FALSE(check_name(n).has_value());

  // identity translation
  auto same = translate_oracle(n, "z", reg);
  for (const auto& w : n.forest.members) CHECK(eval01(same, w) == eval01(n, w));

  // stronger oracle: deep evaluation agrees
  auto up = translate_oracle(n, "w", reg);
  CHECK(up.oracle == "w");
  CHECK_FALSE(check_name(up).has_value());
  for (const auto& w : up.forest.members)
    if (w.size() == 4 && n.forest.contains(w) && stable_member(n, w) && stable_member(up, w))
      CHECK(eval01(up, w) == eval01(n, w));

  CHECK_THROWS_AS(translate_oracle(n, "nope", reg), Error);

  // null contexts: the translation is a structural copy
  auto nctx = StageContext::make(Ordinal::fin(2), null_jump(), reg.get("z"));
  GammaName nn = n;
  nn.forest = full_forest(nctx, Ordinal::fin(1), 4, 2);
  auto nup = translate_oracle(nn, "w", reg);
  for (const auto& w : nn.forest.members) CHECK(eval01(nup, w) == eval01(nn, w));
}

TEST_CASE("universal") {
  auto ctx = ctx0();
  ClassDescription g = std_sigma(Ordinal::zero());

  // a single constant slice
  auto sel1 = [&](const Str&) {
    GammaName k;
    k.desc = g;
    k.forest = full_forest(ctx, Ordinal::zero(), 6, 2);
    return k;
  };
  auto u1 = universal(g, sel1, ctx, 6, 2);
  CHECK_FALSE(check_name(u1).has_value());
  for (const auto& w : u1.forest.deep_members()) CHECK(eval01(u1, w) == 0);

  // two slices separated by the first oracle entry
  auto sel2 = [&](const Str& z) {
    GammaName k;
    k.desc = g;
    k.forest = full_forest(ctx, Ordinal::zero(), 6, 2);
    if (!z.empty() && z[0] == 1) {
      NodeAssign na;
      for (const auto& s : k.forest.members)
        if (!s.empty()) {
          na.f[s] = 1;
          na.beta[s] = Ordinal::zero();
        }
      k.assign[Path{}] = na;
    }
    return k;
  };
  auto u2 = universal(g, sel2, ctx, 6, 2);
  CHECK_FALSE(check_name(u2).has_value());
  for (const auto& w : u2.forest.deep_members()) {
    Str z = pair_component(w, 0);
    Str x = pair_component(w, 1);
    GammaName slice = sel2(z);
    if (stable_member(u2, w)) CHECK(eval01(u2, w) == eval01(slice, x));
  }

  // unpairing bound: |h| <= |(sigma)_0| shows up as table values living on
  // the odd part; spot-check the diagonal slices
  for (const auto& w : u2.forest.deep_members()) {
    if (pair_component(w, 0) == pair_component(w, 1) && stable_member(u2, w))
      CHECK(eval01(u2, w) == eval01(sel2(pair_component(w, 0)), pair_component(w, 1)));
  }
}

TEST_CASE("behead") {
  auto ctx = ctx0();

  // alternating constants: behead is a reinterpretation
  auto n = sigma_name_contains5(ctx);
  auto b = behead(n);
  CHECK_FALSE(check_name(b).has_value());
  // target: dual of the beheaded sigma, i.e. labels 1,0,1,0 at the children
  CHECK(child_at(*b.desc.root, 0)->label == 0);
  for (const auto& w : n.forest.members) {
    CHECK(eval01(b, w) == eval01(n, w));
    CHECK(f_at(b, {}, w) == f_at(n, {}, w));  // the default stays put
  }

  // over std_diff(2,0): the first step needs the const-embedding
  std::mt19937_64 rng(5);
  ClassDescription d2 = std_diff(Ordinal::fin(2), Ordinal::zero());
  AlphaForest S = full_forest(ctx, Ordinal::zero(), 4, 2);
  for (int trial = 0; trial < 20; ++trial) {
    GammaName m = props::random_name(d2, S, rng);
    REQUIRE_FALSE(check_name(m).has_value());
    auto bm = behead(m);
    auto bad = check_name(bm);
    INFO((bad ? *bad : std::string()));
    CHECK_FALSE(bad.has_value());
    for (const auto& w : S.members)
      if (stable_member(m, w) && stable_member(bm, w)) CHECK(eval01(bm, w) == eval01(m, w));
  }
}

TEST_CASE("eta_to_one and one_to_eta") {
  auto ctx = ctx0();
  AlphaForest S = full_forest(ctx, Ordinal::zero(), 4, 2);
  DescSeq leaves;
  leaves.tail = {make_leaf(0), make_leaf(1)};
  leaves.cert = MonotoneCertificate{MonotoneCertificate::AlternatingDual, {}, {}};

  // eta = 1: identity
  std::mt19937_64 rng(11);
  ClassDescription g1 = su(Ordinal::zero(), Ordinal::fin(1), leaves);
  GammaName n1 = props::random_name(g1, S, rng);
  auto e1 = eta_to_one(n1);
  for (const auto& w : S.members) CHECK(eval01(e1, w) == eval01(n1, w));

  // eta = 2: a single mind change routes through the tower and back
  ClassDescription g2 = su(Ordinal::zero(), Ordinal::fin(2), leaves);
  GammaName n2;
  n2.desc = g2;
  n2.forest = S;
  NodeAssign na;
  for (const auto& s : S.members) {
    if (s.size() >= 1 && s[0] == 1) {
      na.f[s] = 1;
      na.beta[s] = Ordinal::fin(1);
    }
    if (s.size() >= 2 && s[0] == 1 && s[1] == 1) {
      na.f[s] = 2;
      na.beta[s] = Ordinal::zero();
    }
  }
  n2.assign[Path{}] = na;
  REQUIRE_FALSE(check_name(n2).has_value());

  auto e2 = eta_to_one(n2);
  auto bad2 = check_name(e2);
  INFO((bad2 ? *bad2 : std::string()));
  CHECK_FALSE(bad2.has_value());
  CHECK_FALSE(is_acceptable(e2.desc).has_value());
  for (const auto& w : S.members)
    if (stable_member(n2, w) && stable_member(e2, w)) CHECK(eval01(e2, w) == eval01(n2, w));

  auto back2 = one_to_eta(e2, Ordinal::fin(2), leaves);
  auto badb = check_name(back2);
  INFO((badb ? *badb : std::string()));
  CHECK_FALSE(badb.has_value());
  for (const auto& w : S.members)
    if (stable_member(n2, w) && stable_member(back2, w)) CHECK(eval01(back2, w) == eval01(n2, w));

  // eta = omega: a witness dropping to 3 routes into the stage bounding it
  ClassDescription gw = su(Ordinal::zero(), Ordinal::omega(), leaves);
  GammaName nw;
  nw.desc = gw;
  nw.forest = S;
  NodeAssign nwa;
  for (const auto& s : S.members)
    if (!s.empty() && s[0] == 0) {
      nwa.f[s] = 1;
      nwa.beta[s] = Ordinal::fin(3);
    }
  nw.assign[Path{}] = nwa;
  REQUIRE_FALSE(check_name(nw).has_value());
  auto ew = eta_to_one(nw);
  CHECK_FALSE(check_name(ew).has_value());
  // beta = 3 < eta_3 = fundseq(omega, 4) = 4: routed to child 3
  for (const auto& s : S.members)
    if (!s.empty() && s[0] == 0) CHECK(f_at(ew, {}, s) == 3);
  for (const auto& w : S.members)
    if (stable_member(nw, w) && stable_member(ew, w)) CHECK(eval01(ew, w) == eval01(nw, w));
  auto backw = one_to_eta(ew, Ordinal::omega(), leaves);
  for (const auto& w : S.members)
    if (stable_member(nw, w) && stable_member(backw, w)) CHECK(eval01(backw, w) == eval01(nw, w));
}

TEST_CASE("subforests_eta1") {
  auto ctx = ctx0();
  auto n = sigma_name_contains5(ctx);
  auto sub = subforests_eta1(n);

  // root carries everything; the pieces partition it
  CHECK(sub.at({}) == n.forest.members);
  size_t total = 0;
  for (const auto& [p, ss] : sub)
    if (p.size() == 1) total += ss.size();
  CHECK(total == n.forest.members.size());

  // default child closed-in, the other open-in
  AlphaForest S0{ctx, Ordinal::zero(), sub.at({0}), n.forest.depth, n.forest.alphabet};
  AlphaForest S1{ctx, Ordinal::zero(), sub.at({1}), n.forest.depth, n.forest.alphabet};
  auto t0 = relative_topology(S0, n.forest);
  auto t1 = relative_topology(S1, n.forest);
  CHECK((t0 == Topology::ClosedIn || t0 == Topology::Both));
  CHECK((t1 == Topology::OpenIn || t1 == Topology::Both));

  // constant name: all mass on the default child
  GammaName c;
  c.desc = std_sigma(Ordinal::zero());
  c.forest = n.forest;
  auto csub = subforests_eta1(c);
  CHECK(csub.at({0}) == n.forest.members);
}

TEST_CASE("name validity and duality over random names") {
  auto ctx = ctx0();
  AlphaForest S = full_forest(ctx, Ordinal::zero(), 4, 2);
  std::mt19937_64 rng(2024);
  std::vector<ClassDescription> descs = {
      std_sigma(Ordinal::zero()), std_diff(Ordinal::fin(2), Ordinal::zero()),
      std_bisep(Ordinal::zero(), std_sigma(Ordinal::fin(1)), std_constant(0)),
      std_constant(1)};
  for (const auto& g : descs) {
    for (int t = 0; t < 15; ++t) {
      auto n = props::random_name(g, S, rng);
      auto bad = check_name(n);
      INFO((bad ? *bad : std::string()));
      REQUIRE_FALSE(bad.has_value());
      auto d = dual_name(n);
      for (const auto& w : S.members) CHECK(eval01(d, w) == 1 - eval01(n, w));
    }
  }
}
