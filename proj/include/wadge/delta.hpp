#pragma once

#include <map>
#include <optional>
#include <vector>

#include "wadge/name.hpp"

namespace wadge {

// --- the starred class --------------------------------------------------------

// A star name never takes the root default: beta stays below eta everywhere.
inline std::optional<Str> star_check(const GammaName& n) {
  if (n.desc.root->is_leaf) return std::nullopt;
  const Ordinal& eta = n.desc.root->eta;
  for (const auto& s : n.forest.members)
    if (beta_at(n, {}, s, eta) == eta) return s;
  return std::nullopt;
}

// The dual of a star function, named inside the same class: shift every
// child one slot to the right through the dualised certificate steps.
inline GammaName star_dualize(const GammaName& n) {
  if (n.desc.root->is_leaf) raise(errc::bad_input, "star_dualize needs an SU name");
  if (auto s = star_check(n))
    raise(errc::bad_input, "not a star name: default taken at " + str_print(*s));
  DescSeq seq = children_seq(*n.desc.root);
  if (!seq.cert) raise(errc::missing_certificate, "star_dualize needs a certified sequence");

  GammaName out;
  out.desc = n.desc;
  out.forest = n.forest;
  out.oracle = n.oracle;
  NodeAssign root;
  const Ordinal& eta = n.desc.root->eta;
  for (const auto& s : n.forest.members) {
    root.f[s] = f_at(n, {}, s) + 1;
    Ordinal b = beta_at(n, {}, s, eta);
    if (!(b == eta)) root.beta[s] = b;
  }
  out.assign[Path{}] = root;
  for (uint64_t k : realized_children(n, Path{})) {
    // child k+1 of the output carries 1 - F^{N_(k)}: step the certificate
    // and dualise
    GammaName stepped = apply_step(seq.cert->token_at(k), subname(n, uint32_t(k)), seq.at(k + 1));
    GammaName flipped = dual_name(stepped);
    flipped.desc = ClassDescription{seq.at(k + 1), n.desc.oracle_tag};
    graft(out, uint32_t(k + 1), flipped);
  }
  return out;
}

// Pieces of a star name: the sets where f commits to each child, with the
// restricted sub-names.
struct StarPiece {
  uint64_t index;
  AlphaForest part;
  GammaName name;
};

inline std::vector<StarPiece> star_partition(const GammaName& n) {
  if (auto s = star_check(n))
    raise(errc::bad_input, "not a star name: default taken at " + str_print(*s));
  std::map<uint64_t, std::set<Str>> parts;
  for (const auto& s : n.forest.members) parts[f_at(n, {}, s)].insert(s);
  std::vector<StarPiece> out;
  for (const auto& [k, members] : parts) {
    AlphaForest part{n.forest.ctx, n.forest.level, members, n.forest.depth, n.forest.alphabet};
    out.push_back(StarPiece{k, part, restrict_name(subname(n, uint32_t(k)), part)});
  }
  return out;
}

// --- stage comparison ----------------------------------------------------------

// F in the ambiguous class, witnessed by a Gamma-name N and a dual name M on
// the same forest: split into the closed part where both defaults persist
// and the open parts where one of the witnesses moved first.
struct Decomposition {
  AlphaForest T, Wplus, Wminus;
  GammaName n_on_T;      // Gamma_(0)-name for F on the closed part
  GammaName m_on_T;      // its dual
  GammaName star_plus;   // Gamma-star name on Wplus (from N)
  GammaName star_minus;  // dual-Gamma-star name on Wminus (from M)
};

inline Decomposition decompose(const GammaName& n, const GammaName& m) {
  if (n.forest.members != m.forest.members)
    raise(errc::forest_mismatch, "stage comparison needs a shared forest");
  if (n.desc.root->is_leaf || !desc_equal(m.desc, dual(n.desc)))
    raise(errc::forest_mismatch, "m must name through the dual description");
  Ordinal one = Ordinal::fin(1);
  if (!(n.desc.root->eta == one)) raise(errc::bad_input, "stage comparison needs eta = 1");

  const auto& S = n.forest;
  std::set<Str> t, wplus, wminus;
  for (const auto& s : S.members) {
    Ordinal bn = beta_at(n, {}, s, one), bm = beta_at(m, {}, s, one);
    if (bn == one && bm == one) {
      t.insert(s);
      continue;
    }
    bool plus = false;
    auto preds = S.ctx->predecessors(s, n.desc.root->xi);
    for (const auto& r : preds) {
      if (!S.contains(r)) continue;
      if (beta_at(n, {}, r, one).is_zero() && beta_at(m, {}, r, one) == one) {
        plus = true;
        break;
      }
    }
    (plus ? wplus : wminus).insert(s);
  }
  Decomposition d;
  d.T = AlphaForest{S.ctx, S.level, t, S.depth, S.alphabet};
  d.Wplus = AlphaForest{S.ctx, S.level, wplus, S.depth, S.alphabet};
  d.Wminus = AlphaForest{S.ctx, S.level, wminus, S.depth, S.alphabet};
  d.n_on_T = restrict_name(subname(n, 0), d.T);
  d.m_on_T = restrict_name(subname(m, 0), d.T);
  d.star_plus = restrict_name(n, d.Wplus);
  d.star_minus = restrict_name(m, d.Wminus);
  return d;
}

// Reassembly check: gluing the three pieces back reproduces the original
// evaluation (the minus piece re-enters through the star dual).
inline GammaName reassemble(const Decomposition& d, const GammaName& n) {
  GammaName minus_as_gamma = dual_name(star_dualize(d.star_minus));
  minus_as_gamma.desc = n.desc;
  return merge_cover(n.forest, n.desc,
                     {{d.T, n}, {d.Wplus, d.star_plus}, {d.Wminus, minus_as_gamma}});
}

// --- the successor absorption ---------------------------------------------------

struct AbsorbPiece {
  AlphaForest part;  // open one level above the base
  GammaName name;    // a Theta_n-name for F on the piece
};

// F ambiguous at a successor level: absorb the countable-type partition into
// a bounded separated union one level down.  The approximation comes from
// the open family, its witness is synthesised, and the pieces are totalised
// into the children.
inline GammaName successor_absorb(const Ordinal& xi, const DescSeq& theta, const GammaName& n,
                                  const std::vector<AbsorbPiece>& pieces) {
  AlphaForest base{n.forest.ctx, xi, n.forest.members, n.forest.depth, n.forest.alphabet};
  std::vector<AlphaForest> fam;
  for (const auto& p : pieces) fam.push_back(p.part);
  Approximation f = from_open_family(base, fam);
  auto [eta, w] = synthesize_witness(f);

  GammaName out;
  out.desc = su(xi, eta, theta, n.desc.oracle_tag);
  out.forest = base;
  out.oracle = n.oracle;
  NodeAssign root;
  for (const auto& s : base.members) {
    if (f.at(s) != 0) root.f[s] = f.at(s);
    if (!(w.at(s) == eta)) root.beta[s] = w.at(s);
  }
  out.assign[Path{}] = root;
  for (size_t k = 0; k < pieces.size(); ++k) {
    GammaName child = restrict_name(totalize(pieces[k].name), base);
    graft(out, uint32_t(k), child);
  }
  return out;
}

// --- towers for the limit case ---------------------------------------------------

// The class family Lambda_{alpha,k} over a limit lambda: level lambda_k from
// the TSP5 sequence; successor stages interleave the previous row, limit
// stages climb the fundamental sequence.  Generated lazily to `width`
// children, with the tail repeating the last stage.
class LimitTower {
 public:
  LimitTower(Ctx ctx, Ordinal lambda, DescSeq theta, std::string tag = "computable",
             size_t width = 3)
      : ctx_(std::move(ctx)), lambda_(std::move(lambda)), theta_(std::move(theta)),
        tag_(std::move(tag)), width_(width) {}

  Ordinal level(uint64_t k) { return ctx_->tsp5_seq(lambda_, k); }

  ClassDescription at(const Ordinal& alpha, uint64_t k) {
    auto key = std::make_pair(alpha, k);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    ClassDescription out;
    auto cl = classify(alpha);
    if (cl.kind == OrdKind::Zero) {
      out = su(level(k), Ordinal::fin(1), theta_, tag_);
    } else if (cl.kind == OrdKind::Successor) {
      DescSeq seq;
      std::vector<std::string> toks;
      DescPtr last;
      for (size_t m = 0; m <= width_; ++m) {
        last = at(cl.pred, k + m).root;
        seq.prefix.push_back(last);
        toks.push_back("tower-step");
      }
      toks.back() = "id";
      seq.tail = {dual_node(last), last};
      seq.cert = MonotoneCertificate{MonotoneCertificate::TranslationFamily, toks, {"id"}};
      out = su(level(k), Ordinal::fin(1), seq, tag_);
    } else {
      DescSeq seq;
      std::vector<std::string> toks;
      DescPtr last;
      for (size_t m = 0; m <= width_; ++m) {
        Ordinal aj = fundamental_seq(alpha, k + m);
        last = at(aj, k + m).root;
        seq.prefix.push_back(last);
        toks.push_back("tower-step");
      }
      toks.back() = "id";
      seq.tail = {dual_node(last), last};
      seq.cert = MonotoneCertificate{MonotoneCertificate::TranslationFamily, toks, {"id"}};
      out = su(level(k), Ordinal::fin(1), seq, tag_);
    }
    memo_.emplace(key, out);
    return out;
  }

  const DescSeq& theta() const { return theta_; }
  size_t width() const { return width_; }

 private:
  Ctx ctx_;
  Ordinal lambda_;
  DescSeq theta_;
  std::string tag_;
  size_t width_;
  std::map<std::pair<Ordinal, uint64_t>, ClassDescription> memo_;
};

// Lift a name from Lambda_{alpha,k} into Lambda_{alpha',k'} for alpha <=
// alpha', k <= k'.  Same stage: reselect through the lower-level root
// approximation; higher stage: route through the child that dominates.
inline GammaName tower_lift(LimitTower& tower, const GammaName& n, const Ordinal& alpha,
                            uint64_t k, const Ordinal& alpha2, uint64_t k2) {
  if (alpha == alpha2 && k == k2) {
    GammaName out = n;
    out.desc = tower.at(alpha, k);
    return out;
  }
  if (alpha == alpha2) {
    // stage lift: G(x) = F_{f(x)}(x) with f read at the lower level; child c
    // of the source lifts into child c of the target, whose stage dominates
    ClassDescription target = tower.at(alpha2, k2);
    Approximation g;
    g.forest = n.forest;
    g.forest.level = tower.level(k);
    for (const auto& s : n.forest.members) g.f[s] = f_at(n, {}, s);
    size_t used = 1;
    for (const auto& s : n.forest.members) used = std::max<size_t>(used, f_at(n, {}, s) + 1);
    auto cl = classify(alpha);
    std::vector<GammaName> fs;
    for (size_t c = 0; c < used; ++c) {
      GammaName childname = subname(n, uint32_t(c));
      GammaName inner;
      if (cl.kind == OrdKind::Zero) {
        inner = childname;  // Theta_c in both towers
      } else {
        Ordinal sub = cl.kind == OrdKind::Successor ? cl.pred : fundamental_seq(alpha, k + c);
        Ordinal sub2 = cl.kind == OrdKind::Successor ? cl.pred : fundamental_seq(alpha2, k2 + c);
        inner = tower_lift(tower, childname, sub, k + c, sub2, k2 + c);
      }
      GammaName lifted;
      lifted.desc = target;
      lifted.forest = n.forest;
      lifted.oracle = n.oracle;
      if (c != 0) {
        NodeAssign na;
        for (const auto& s : n.forest.members) {
          na.f[s] = c;
          na.beta[s] = Ordinal::zero();
        }
        lifted.assign[Path{}] = na;
      }
      graft(lifted, uint32_t(c), inner);
      fs.push_back(lifted);
    }
    return compose_lower(g, fs);
  }
  // alpha < alpha2: descend through the target's first non-default child
  auto cl2 = classify(alpha2);
  ClassDescription target = tower.at(alpha2, k2);
  if (cl2.kind == OrdKind::Successor) {
    GammaName inner = tower_lift(tower, n, alpha, k, cl2.pred, k2 + 1);
    GammaName out;
    out.desc = target;
    out.forest = n.forest;
    out.oracle = n.oracle;
    NodeAssign na;
    for (const auto& s : n.forest.members) {
      na.f[s] = 1;
      na.beta[s] = Ordinal::zero();
    }
    out.assign[Path{}] = na;
    graft(out, 1, inner);
    return out;
  }
  // limit: find a fundamental stage dominating alpha
  for (size_t m = 0; m <= tower.width(); ++m) {
    Ordinal aj = fundamental_seq(alpha2, k2 + m);
    if (!(compare(aj, alpha) == Order::Less)) {
      GammaName inner = tower_lift(tower, n, alpha, k, aj, k2 + m);
      GammaName out;
      out.desc = target;
      out.forest = n.forest;
      out.oracle = n.oracle;
      if (m != 0) {
        NodeAssign na;
        for (const auto& s : n.forest.members) {
          na.f[s] = m;
          na.beta[s] = Ordinal::zero();
        }
        out.assign[Path{}] = na;
      }
      graft(out, uint32_t(m), inner);
      return out;
    }
  }
  raise(errc::bad_input, "tower width too small to dominate the source stage");
}

// --- assembling a name along a ranked tree ----------------------------------------

struct RankedTree {
  std::set<Str> members;          // the closed, well-founded remainder T
  std::map<Str, Ordinal> rank;    // strictly decreasing upward, positive on T
};

// Effective recursion along the ranked remainder: pieces live on the open
// parts, inner strings collect their immediate successors one stage up.
inline GammaName limit_assemble(LimitTower& tower, const AlphaForest& S, const RankedTree& rt,
                                const std::vector<std::pair<AlphaForest, GammaName>>& pieces,
                                const Ordinal& delta_rank) {
  const Ordinal& lambda_level = S.level;  // the limit level the tower was built on
  auto& ctx = *S.ctx;

  // rank sanity: positive and strictly decreasing along the tree
  for (const auto& s : rt.members) {
    if (!rt.rank.count(s) || rt.rank.at(s).is_zero())
      raise(errc::rank_violation, "rank must be positive on T");
    for (const auto& r : ctx.predecessors(s, lambda_level)) {
      if (r == s || !rt.members.count(r)) continue;
      if (!(compare(rt.rank.at(s), rt.rank.at(r)) == Order::Less))
        raise(errc::rank_violation, "rank must decrease upward");
    }
  }

  std::function<GammaName(const Str&)> build = [&](const Str& sigma) -> GammaName {
    uint64_t k = ctx.height(sigma, lambda_level);
    std::set<Str> cone;
    for (const auto& t : S.members)
      if (ctx.leq(lambda_level, sigma, t)) cone.insert(t);
    AlphaForest Scone{S.ctx, S.level, cone, S.depth, S.alphabet};

    if (!rt.members.count(sigma)) {
      // off the remainder: the string lies in some piece
      for (const auto& [part, kn] : pieces) {
        if (!part.contains(sigma)) continue;
        ClassDescription target = tower.at(Ordinal::zero(), k + 1);
        // which child index carries this piece's class
        size_t idx = 0;
        for (; idx < tower.theta().generators(); ++idx)
          if (desc_node_equal(tower.theta().at(idx), kn.desc.root)) break;
        GammaName out;
        out.desc = target;
        out.forest = Scone;
        out.oracle = kn.oracle;
        if (idx != 0) {
          NodeAssign na;
          for (const auto& s : cone) {
            na.f[s] = idx;
            na.beta[s] = Ordinal::zero();
          }
          out.assign[Path{}] = na;
        }
        graft(out, uint32_t(idx), restrict_name(kn, Scone));
        return out;
      }
      raise(errc::bad_input, "string outside both the remainder and the pieces: " +
                                 str_print(sigma));
    }

    const Ordinal& r = rt.rank.at(sigma);
    ClassDescription target = tower.at(r, k + 1);
    GammaName out;
    out.desc = target;
    out.forest = Scone;
    NodeAssign root;
    uint32_t slot = 0;
    std::map<Str, uint32_t> slot_of;
    std::vector<std::pair<Str, GammaName>> grafts;
    for (const auto& t : S.members) {
      if (!ctx.leq(lambda_level, sigma, t) || t == sigma) continue;
      if (ctx.height(t, lambda_level) != k + 1) continue;
      // an immediate successor: its subtree goes to a fresh child slot
      GammaName nt = build(t);
      Ordinal rt_rank = rt.members.count(t) ? rt.rank.at(t) : Ordinal::zero();
      auto cl = classify(r);
      GammaName lifted;
      if (cl.kind == OrdKind::Successor) {
        lifted = tower_lift(tower, nt, rt_rank, k + 1, cl.pred, k + 1 + (++slot));
      } else {
        // limit rank: the slot must dominate the child's rank
        ++slot;
        Ordinal aj = fundamental_seq(r, k + 1 + slot);
        while (compare(aj, rt_rank) == Order::Less && slot <= tower.width()) {
          ++slot;
          aj = fundamental_seq(r, k + 1 + slot);
        }
        if (slot > tower.width()) raise(errc::bad_input, "tower width too small");
        lifted = tower_lift(tower, nt, rt_rank, k + 1, aj, k + 1 + slot);
      }
      slot_of[t] = slot;
      grafts.push_back({t, lifted});
      for (const auto& s : cone)
        if (ctx.leq(lambda_level, t, s)) {
          root.f[s] = slot;
          root.beta[s] = Ordinal::zero();
        }
    }
    out.assign[Path{}] = root;
    for (auto& [t, g] : grafts) graft(out, slot_of[t], g);
    return out;
  };

  GammaName at_root = build(Str{});
  uint64_t k0 = ctx.height(Str{}, lambda_level);
  Ordinal r0 = rt.members.count(Str{}) ? rt.rank.at(Str{}) : Ordinal::zero();
  return tower_lift(tower, at_root, r0, k0 + 1, delta_rank, 1);
}

// --- witnesses for the countable type ----------------------------------------------

// The witness sequence for a countable-type description, following the three
// cases of the inductive classification: a leaf default child hands back the
// root children; a countable default child interleaves its own witness.
inline DescSeq type_witness(const ClassDescription& g, size_t width = 3) {
  if (classify_type(g).kind != ClassTypeKind::Countable)
    raise(errc::not_countable, "type_witness needs a countable-type description");
  DescSeq rootseq = children_seq(*g.root);
  DescPtr child0 = child_at(*g.root, 0);
  if (child0->is_leaf) return rootseq;

  DescSeq inner = type_witness(ClassDescription{child0, g.oracle_tag}, width);
  DescSeq out;
  size_t distinct = inner.prefix.size() + inner.tail.size();
  std::vector<DescPtr> lams;
  for (size_t n = 0; n < distinct + inner.tail.size(); ++n) {
    DescSeq ln;
    ln.prefix = {inner.at(n)};
    for (const auto& c : rootseq.prefix) ln.prefix.push_back(c);
    ln.tail = rootseq.tail;
    std::vector<std::string> toks = {"witness-step"};
    if (rootseq.cert) {
      MonotoneCertificate c = *rootseq.cert;
      if (c.kind == MonotoneCertificate::AlternatingDual) {
        for (size_t i = 0; i + 1 < rootseq.prefix.size() + 2 * rootseq.tail.size(); ++i)
          toks.push_back("id");
      } else {
        for (const auto& t : c.prefix_tokens) toks.push_back(t);
      }
      ln.cert = MonotoneCertificate{
          MonotoneCertificate::TranslationFamily, toks,
          c.kind == MonotoneCertificate::AlternatingDual ? std::vector<std::string>{"id"}
                                                         : c.tail_tokens};
    }
    lams.push_back(su(g.root->xi, Ordinal::fin(1), ln, g.oracle_tag).root);
  }
  for (size_t n = 0; n < distinct; ++n) out.prefix.push_back(lams[n]);
  for (size_t n = distinct; n < lams.size(); ++n) out.tail.push_back(lams[n]);
  std::vector<std::string> toks;
  for (size_t n = 0; n + 1 < distinct; ++n) toks.push_back("witness-step");
  out.cert = MonotoneCertificate{MonotoneCertificate::TranslationFamily, toks, {"witness-step"}};
  return out;
}

}  // namespace wadge
