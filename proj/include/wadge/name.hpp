#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "wadge/approx.hpp"
#include "wadge/classdesc.hpp"
#include "wadge/forest.hpp"

namespace wadge {

// A Gamma-name: per-inner-node approximation/witness tables over a forest.
// Unassigned nodes (and missing table entries) take the default: leftmost
// child with witness value eta.  Keeping defaults implicit is what lets
// names live on descriptions with infinitely many nodes.
struct NodeAssign {
  std::map<Str, uint64_t> f;
  std::map<Str, Ordinal> beta;
};

struct GammaName {
  ClassDescription desc;
  AlphaForest forest;
  std::map<Path, NodeAssign> assign;
  std::string oracle = "computable";
};

inline uint64_t f_at(const GammaName& n, const Path& p, const Str& s) {
  auto it = n.assign.find(p);
  if (it == n.assign.end()) return 0;
  auto jt = it->second.f.find(s);
  return jt == it->second.f.end() ? 0 : jt->second;
}

inline Ordinal beta_at(const GammaName& n, const Path& p, const Str& s, const Ordinal& eta) {
  auto it = n.assign.find(p);
  if (it == n.assign.end()) return eta;
  auto jt = it->second.beta.find(s);
  return jt == it->second.beta.end() ? eta : jt->second;
}

struct LeafPath {
  Path node;
  int label;
};

inline LeafPath eval_leaf(const GammaName& n, const Str& w) {
  if (!n.forest.contains(w)) raise(errc::not_in_forest, "eval at " + str_print(w));
  Path p;
  DescPtr t = n.desc.root;
  while (!t->is_leaf) {
    uint64_t m = f_at(n, p, w);
    p.push_back(uint32_t(m));
    t = child_at(*t, m);
  }
  return LeafPath{p, t->label};
}

inline int eval01(const GammaName& n, const Str& w) { return eval_leaf(n, w).label; }

// Child indices the name actually uses at a node (plus the default 0).
inline std::set<uint64_t> realized_children(const GammaName& n, const Path& p) {
  std::set<uint64_t> out{0};
  auto it = n.assign.find(p);
  if (it != n.assign.end())
    for (const auto& [s, v] : it->second.f) out.insert(v);
  for (const auto& [path, a] : n.assign)
    if (path.size() > p.size() && std::equal(p.begin(), p.end(), path.begin()))
      out.insert(path[p.size()]);
  return out;
}

inline GammaName subname(const GammaName& n, uint32_t i) {
  GammaName out;
  out.desc = subdescription(n.desc, {i});
  out.forest = n.forest;
  out.oracle = n.oracle;
  for (const auto& [path, a] : n.assign)
    if (!path.empty() && path[0] == i) out.assign[Path(path.begin() + 1, path.end())] = a;
  return out;
}

inline void graft(GammaName& m, uint32_t i, const GammaName& k) {
  for (const auto& [path, a] : k.assign) {
    Path p{i};
    p.insert(p.end(), path.begin(), path.end());
    m.assign[p] = a;
  }
}

// Validity: child indices exist, the default law (beta = eta forces the
// leftmost child), and the witness law at each node's own level.
inline std::optional<std::string> check_name(const GammaName& n) {
  std::set<Path> paths{{}};
  for (const auto& [p, a] : n.assign) paths.insert(p);
  for (const auto& p : paths) {
    DescPtr node;
    try {
      node = node_at(n.desc, p);
    } catch (const Error&) {
      return "assigned path outside the tree";
    }
    if (node->is_leaf) {
      auto it = n.assign.find(p);
      if (it != n.assign.end() && (!it->second.f.empty() || !it->second.beta.empty()))
        return "assignment at a leaf";
      continue;
    }
    const Ordinal& eta = node->eta;
    for (const auto& s : n.forest.members) {
      uint64_t fv = f_at(n, p, s);
      if (node->tail.empty() && fv >= node->kids.size()) return "f value beyond the child family";
      Ordinal bv = beta_at(n, p, s, eta);
      if (compare(bv, eta) == Order::Greater) return "beta value above eta";
      if (bv == eta && fv != 0) return "default law: beta = eta forces child 0";
    }
    for (const auto& t : n.forest.members) {
      for (const auto& r : n.forest.ctx->predecessors(t, node->xi)) {
        if (r == t || !n.forest.contains(r)) continue;
        Ordinal br = beta_at(n, p, r, eta), bt = beta_at(n, p, t, eta);
        Order o = compare(bt, br);
        if (o == Order::Greater) return "witness increases along a chain";
        if (f_at(n, p, r) != f_at(n, p, t) && o != Order::Less)
          return "value change without a witness drop";
      }
    }
  }
  return std::nullopt;
}

// Deep stability: along the eval path, the last two levels of each node's
// chain agree and sit strictly below the default.
inline bool stable_member(const GammaName& n, const Str& w) {
  if (!n.forest.contains(w)) return false;
  Path p;
  DescPtr t = n.desc.root;
  while (!t->is_leaf) {
    std::vector<Str> chain;
    for (const auto& r : n.forest.ctx->predecessors(w, t->xi))
      if (n.forest.contains(r)) chain.push_back(r);
    if (chain.size() < 2) return false;
    const Str& a = chain[chain.size() - 2];
    const Str& b = chain[chain.size() - 1];
    if (f_at(n, p, a) != f_at(n, p, b)) return false;
    if (!(compare(beta_at(n, p, a, t->eta), t->eta) == Order::Less)) return false;
    if (!(compare(beta_at(n, p, b, t->eta), t->eta) == Order::Less)) return false;
    uint64_t m = f_at(n, p, w);
    p.push_back(uint32_t(m));
    t = child_at(*t, m);
  }
  return true;
}

// --- the algebra ------------------------------------------------------------

inline GammaName dual_name(const GammaName& n) {
  GammaName out = n;
  out.desc = dual(n.desc);
  return out;
}

inline GammaName restrict_name(const GammaName& n, const AlphaForest& T) {
  for (const auto& s : T.members)
    if (!n.forest.contains(s)) raise(errc::not_a_subforest, "restriction outside the forest");
  GammaName out;
  out.desc = n.desc;
  out.oracle = n.oracle;
  out.forest = T;
  for (const auto& [p, a] : n.assign) {
    NodeAssign na;
    for (const auto& [s, v] : a.f)
      if (T.contains(s)) na.f[s] = v;
    for (const auto& [s, v] : a.beta)
      if (T.contains(s)) na.beta[s] = v;
    out.assign[p] = na;
  }
  return out;
}

// Totalisation: off the original forest, copy from the longest predecessor
// inside it (per node level), or fall back to the default.
inline GammaName totalize(const GammaName& n) {
  AlphaForest full = full_forest(n.forest.ctx, n.forest.level, n.forest.depth, n.forest.alphabet);
  GammaName out;
  out.desc = n.desc;
  out.oracle = n.oracle;
  out.forest = full;
  for (const auto& [p, a] : n.assign) {
    DescPtr node = node_at(n.desc, p);
    NodeAssign na;
    for (const auto& s : full.members) {
      if (n.forest.contains(s)) {
        uint64_t fv = f_at(n, p, s);
        Ordinal bv = beta_at(n, p, s, node->eta);
        if (fv != 0) na.f[s] = fv;
        if (!(bv == node->eta)) na.beta[s] = bv;
        continue;
      }
      const Str* longest = nullptr;
      auto preds = n.forest.ctx->predecessors(s, node->xi);
      for (const auto& r : preds)
        if (r != s && n.forest.contains(r)) longest = &r;
      if (longest) {
        uint64_t fv = f_at(n, p, *longest);
        Ordinal bv = beta_at(n, p, *longest, node->eta);
        if (fv != 0) na.f[s] = fv;
        if (!(bv == node->eta)) na.beta[s] = bv;
      }
    }
    out.assign[p] = na;
  }
  return out;
}

// Disjoint union along a covering family: values are copied from the longest
// chain predecessor that lies in a piece.  Orthogonality of open pieces is
// what the public merge validates; the covering engine itself is shared with
// the stage-comparison reassembly.
inline GammaName merge_cover(const AlphaForest& S, const ClassDescription& desc,
                             const std::vector<std::pair<AlphaForest, GammaName>>& pieces) {
  GammaName out;
  out.desc = desc;
  out.oracle = pieces.empty() ? "computable" : pieces[0].second.oracle;
  out.forest = S;
  std::set<Path> paths;
  for (const auto& [sn, nn] : pieces) {
    if (!desc_equal(nn.desc, out.desc)) raise(errc::forest_mismatch, "pieces over different descriptions");
    for (const auto& [p, a] : nn.assign) paths.insert(p);
  }
  for (const auto& p : paths) {
    DescPtr node = node_at(out.desc, p);
    NodeAssign na;
    for (const auto& s : S.members) {
      // longest rho on the chain inside a piece
      const GammaName* src = nullptr;
      Str at;
      auto preds = S.ctx->predecessors(s, S.level);
      for (const auto& r : preds) {
        if (!S.contains(r)) continue;
        for (const auto& [sn, nn] : pieces)
          if (sn.contains(r) && nn.forest.contains(r)) {
            src = &nn;
            at = r;
          }
      }
      if (!src) continue;
      uint64_t fv = f_at(*src, p, at);
      Ordinal bv = beta_at(*src, p, at, node->eta);
      if (fv != 0) na.f[s] = fv;
      if (!(bv == node->eta)) na.beta[s] = bv;
    }
    out.assign[p] = na;
  }
  return out;
}

inline GammaName merge(const AlphaForest& S, const ClassDescription& desc,
                       const std::vector<std::pair<AlphaForest, GammaName>>& pieces) {
  for (size_t i = 0; i < pieces.size(); ++i) {
    auto topo = relative_topology(pieces[i].first, S);
    if (topo != Topology::OpenIn && topo != Topology::Both)
      raise(errc::not_orthogonal, "merge piece not open in S");
    for (size_t j = i + 1; j < pieces.size(); ++j)
      if (!forests_orthogonal(pieces[i].first, pieces[j].first))
        raise(errc::not_orthogonal, "merge pieces not orthogonal");
  }
  return merge_cover(S, desc, pieces);
}

// G(x) = F_{g(x)}(x) for an index approximation g strictly below the class
// level.  The committed sets {g = n from here on} are open at the class
// level and orthogonal, so the merge engine applies.
inline GammaName compose_lower(const Approximation& g, const std::vector<GammaName>& names) {
  if (names.empty()) raise(errc::bad_input, "compose_lower needs at least one name");
  Level o = o_of(names[0].desc);
  if (!(compare(Level::of(g.forest.level), o) == Order::Less))
    raise(errc::level_not_below, "selector level must sit strictly below the class level");
  const AlphaForest& S = g.forest;
  std::vector<std::pair<AlphaForest, GammaName>> pieces;
  for (size_t n = 0; n < names.size(); ++n) {
    AlphaForest W{S.ctx, S.level, {}, S.depth, S.alphabet};
    for (const auto& s : S.members) {
      bool committed = g.at(s) == n;
      for (const auto& t : S.members)
        if (committed && S.ctx->leq(S.level, s, t) && g.at(t) != n) committed = false;
      if (committed) W.members.insert(s);
    }
    pieces.push_back({W, names[n]});
  }
  return merge_cover(S, names[0].desc, pieces);
}

// --- oracle registry and translation ----------------------------------------

struct OracleRegistry {
  std::map<std::string, Str> table;
  std::set<std::pair<std::string, std::string>> above;  // (w, z): w computes z

  void add(const std::string& name, Str value) { table[name] = std::move(value); }
  void declare_extends(const std::string& w, const std::string& z) { above.insert({w, z}); }
  const Str& get(const std::string& name) const {
    auto it = table.find(name);
    if (it == table.end()) raise(errc::unknown_oracle, name);
    return it->second;
  }
  bool extends(const std::string& w, const std::string& z) const {
    if (w == z) return true;
    if (above.count({w, z})) return true;
    auto iw = table.find(w), iz = table.find(z);
    return iw != table.end() && iz != table.end() && is_prefix(iz->second, iw->second);
  }
};

// Translate a name to a stronger oracle: per node, pull the tables back
// through the true-stage translation between the two relativised worlds.
inline GammaName translate_oracle(const GammaName& n, const std::string& w,
                                  const OracleRegistry& reg) {
  if (w == n.oracle) return n;
  if (!reg.extends(w, n.oracle)) raise(errc::unknown_oracle, w + " does not compute " + n.oracle);
  Str wstr = reg.get(w);
  Str zstr = reg.get(n.oracle);
  auto& base = *n.forest.ctx;
  Ctx ctx_w = StageContext::make(base.delta(), base.op_ptr(), wstr);
  Ctx ctx_z = StageContext::make(base.delta(), base.op_ptr(), zstr);

  GammaName out;
  out.desc = n.desc;
  out.oracle = w;
  std::map<Ordinal, std::shared_ptr<Translation>> trs;
  auto translation_for = [&](const Ordinal& xi) {
    auto it = trs.find(xi);
    if (it != trs.end()) return it->second;
    auto tr = std::make_shared<Translation>(
        ctx_z, ctx_w, xi, [ctx_z, ctx_w, xi](const Str& rho, const Str& sigma) {
          // stagewise opening of the z-true extensions of rho, read in the
          // w-world: entered once some w-predecessor is z-true above rho
          for (size_t i = 0; i <= sigma.size(); ++i) {
            Str nu = prefix_of(sigma, i);
            if (ctx_w->leq(xi, nu, sigma) && ctx_z->leq(xi, rho, nu)) return true;
          }
          return false;
        });
    trs[xi] = tr;
    return tr;
  };

  Ordinal root_level = n.forest.level;
  auto tr0 = translation_for(root_level);
  AlphaForest universe = full_forest(ctx_w, root_level, n.forest.depth, n.forest.alphabet);
  out.forest = AlphaForest{ctx_w, root_level, {}, n.forest.depth, n.forest.alphabet};
  for (const auto& s : universe.members)
    if (n.forest.contains(tr0->h(s))) out.forest.members.insert(s);

  for (const auto& [p, a] : n.assign) {
    DescPtr node = node_at(n.desc, p);
    auto tr = translation_for(node->xi);
    NodeAssign na;
    for (const auto& s : out.forest.members) {
      Str hs = tr->h(s);
      if (!n.forest.contains(hs)) continue;
      uint64_t fv = f_at(n, p, hs);
      Ordinal bv = beta_at(n, p, hs, node->eta);
      if (fv != 0) na.f[s] = fv;
      if (!(bv == node->eta)) na.beta[s] = bv;
    }
    out.assign[p] = na;
  }
  return out;
}

// --- the universal name ------------------------------------------------------

// Universal name over the paired space: the slice at z evaluates like the
// selected name, consulting only the even part of the string read so far.
// The unpairing translation realises |h(sigma)| <= |(sigma)_0| and lands in
// the odd part.
inline GammaName universal(const ClassDescription& g,
                           const std::function<GammaName(const Str&)>& selector, Ctx ctx,
                           size_t depth, uint64_t alphabet) {
  GammaName out;
  out.desc = g;
  out.forest = full_forest(ctx, g.root->is_leaf ? Ordinal::zero() : g.root->xi, depth, alphabet);
  if (g.root->is_leaf) return out;

  // per-level unpairing translations
  std::map<Ordinal, std::shared_ptr<Translation>> trs;
  std::map<Str, Ctx> slice_ctx;
  auto ctx_for = [&](const Str& z) {
    auto it = slice_ctx.find(z);
    if (it != slice_ctx.end()) return it->second;
    auto c = StageContext::make(ctx->delta(), ctx->op_ptr(), z);
    slice_ctx[z] = c;
    return c;
  };
  auto translation_for = [&](const Ordinal& xi) {
    auto it = trs.find(xi);
    if (it != trs.end()) return it->second;
    auto tr = std::make_shared<Translation>(ctx, ctx, xi,
                                            [](const Str&, const Str&) { return true; });
    tr->set_candidates([](const Str& sigma) {
      Str odd = pair_component(sigma, 1);
      std::vector<Str> out;
      for (size_t i = 0; i <= odd.size(); ++i) out.push_back(prefix_of(odd, i));
      return out;
    });
    tr->set_src_leq([&, xi](const Str& a, const Str& b, const Str& at) {
      Str z = pair_component(at, 0);
      if (z.size() < b.size()) return false;
      return ctx_for(z)->leq(xi, a, b);
    });
    // membership: rho is z-true along the odd part at some stage
    trs[xi] = tr;
    return tr;
  };

  // collect the paths any slice name assigns
  std::set<Path> paths{{}};
  std::set<Str> zprefixes;
  for (const auto& s : out.forest.members) zprefixes.insert(pair_component(s, 0));
  std::map<Str, GammaName> slices;
  for (const auto& z : zprefixes) {
    slices[z] = selector(z);
    for (const auto& [p, a] : slices[z].assign) paths.insert(p);
  }

  for (const auto& p : paths) {
    DescPtr node = node_at(g, p);
    if (node->is_leaf) continue;
    auto tr = translation_for(node->xi);
    NodeAssign na;
    for (const auto& s : out.forest.members) {
      Str z = pair_component(s, 0);
      Str hs = tr->h(s);
      const GammaName& slice = slices.at(z);
      if (!slice.forest.contains(hs)) continue;
      uint64_t fv = f_at(slice, p, hs);
      Ordinal bv = beta_at(slice, p, hs, node->eta);
      if (fv != 0) na.f[s] = fv;
      if (!(bv == node->eta)) na.beta[s] = bv;
    }
    out.assign[p] = na;
  }
  return out;
}

// --- certificate transformers -------------------------------------------------

// apply_step(token, K, next): K names a function in Theta_n; the result
// names the same function in dual(Theta_{n+1}) = dual(next), as licensed by
// the monotone certificate step.
inline GammaName apply_step(const std::string& token, const GammaName& k, const DescPtr& next);

inline GammaName route_to_leaf(const ClassDescription& target, int bit, const AlphaForest& S,
                               const std::string& oracle) {
  // constant name: steer every string to the leftmost leaf with this label
  GammaName out;
  out.desc = target;
  out.forest = S;
  out.oracle = oracle;
  Path p;
  DescPtr t = target.root;
  while (!t->is_leaf) {
    size_t pick = 0;
    bool found = false;
    for (size_t i = 0; i < child_generator_count(*t) && !found; ++i) {
      std::function<bool(const DescPtr&)> has = [&](const DescPtr& n) {
        if (n->is_leaf) return n->label == bit;
        for (size_t j = 0; j < child_generator_count(*n); ++j)
          if (has(child_at(*n, j))) return true;
        return false;
      };
      if (has(child_at(*t, i))) {
        pick = i;
        found = true;
      }
    }
    if (!found) raise(errc::missing_certificate, "target class has no leaf with the needed bit");
    if (pick != 0) {
      NodeAssign na;
      for (const auto& s : S.members) {
        na.f[s] = pick;
        na.beta[s] = Ordinal::zero();
      }
      out.assign[p] = na;
    }
    p.push_back(uint32_t(pick));
    t = child_at(*t, pick);
  }
  return out;
}

inline GammaName apply_step(const std::string& token, const GammaName& k, const DescPtr& next) {
  DescPtr target = dual_node(next);
  if (token == "dual" || token == "id") {
    if (!desc_node_equal(k.desc.root, target))
      raise(errc::missing_certificate, "identity step between unequal descriptions");
    GammaName out = k;
    out.desc = ClassDescription{target, k.desc.oracle_tag};
    return out;
  }
  if (token == "const0" || token == "const1") {
    int bit = token == "const0" ? 0 : 1;
    if (!k.desc.root->is_leaf || k.desc.root->label != bit)
      raise(errc::missing_certificate, "const step from a non-matching description");
    return route_to_leaf(ClassDescription{target, k.desc.oracle_tag}, bit, k.forest, k.oracle);
  }
  if (token == "su-extra") {
    // Theta_0 into the dual of an SU whose child sequence starts with it
    if (next->is_leaf) raise(errc::missing_certificate, "su-extra into a leaf");
    DescSeq psi = children_seq(*next);
    if (!psi.cert || !desc_node_equal(psi.at(0), k.desc.root))
      raise(errc::missing_certificate, "su-extra: sequence does not start with the source");
    GammaName inner = apply_step(psi.cert->token_at(0),
                                 GammaName{ClassDescription{psi.at(0), k.desc.oracle_tag}, k.forest,
                                           k.assign, k.oracle},
                                 psi.at(1));
    GammaName out;
    out.desc = ClassDescription{target, k.desc.oracle_tag};
    out.forest = k.forest;
    out.oracle = k.oracle;
    NodeAssign na;
    for (const auto& s : k.forest.members) {
      na.f[s] = 1;
      na.beta[s] = Ordinal::zero();
    }
    out.assign[Path{}] = na;
    graft(out, 1, inner);
    return out;
  }
  if (token == "eta-up" || token == "su-behead") {
    if (k.desc.root->is_leaf || next->is_leaf)
      raise(errc::missing_certificate, token + " needs SU shapes");
    DescSeq psi = children_seq(*k.desc.root);
    if (!psi.cert) raise(errc::missing_certificate, token + ": source sequence uncertified");
    bool shift = token == "eta-up";  // f moves up one child; behead keeps indices
    GammaName out;
    out.desc = ClassDescription{target, k.desc.oracle_tag};
    out.forest = k.forest;
    out.oracle = k.oracle;
    NodeAssign root;
    auto it = k.assign.find(Path{});
    if (it != k.assign.end()) {
      for (const auto& [s, v] : it->second.f) root.f[s] = v + (shift ? 1 : 0);
      root.beta = it->second.beta;
    }
    if (shift)
      for (const auto& s : k.forest.members)
        if (!root.f.count(s)) root.f[s] = 1;
    out.assign[Path{}] = root;
    for (uint64_t m : realized_children(k, Path{})) {
      GammaName sub = subname(k, uint32_t(m));
      GammaName stepped = apply_step(psi.cert->token_at(m), sub, psi.at(m + 1));
      graft(out, uint32_t(m + (shift ? 1 : 0)), stepped);
    }
    return out;
  }
  raise(errc::missing_certificate, "no transformer for certificate token: " + token);
}

// Double step: Theta_k into Theta_{k+2} (dualised second step).
inline GammaName double_step(const GammaName& k, const DescSeq& seq, size_t at) {
  GammaName first = apply_step(seq.cert->token_at(at), k, seq.at(at + 1));
  // first names the function in dual(Theta_{at+1}); dualise, step, dualise
  GammaName d = dual_name(first);
  GammaName second = apply_step(seq.cert->token_at(at + 1), d, seq.at(at + 2));
  GammaName out = dual_name(second);
  out.desc = ClassDescription{seq.at(at + 2), k.desc.oracle_tag};
  return out;
}

inline GammaName embed_even_steps(const GammaName& k, const DescSeq& seq, size_t from, size_t to) {
  if (((to - from) % 2) != 0) raise(errc::missing_certificate, "embedding needs an even gap");
  GammaName cur = k;
  for (size_t i = from; i < to; i += 2) cur = double_step(cur, seq, i);
  return cur;
}

// behead: a name over SU(xi,eta,T0,T1,...) read as a name over the dual of
// SU(xi,eta,T1,T2,...); indices stay put, so the default is preserved.
inline GammaName behead(const GammaName& n) {
  if (n.desc.root->is_leaf) raise(errc::missing_certificate, "behead needs an SU description");
  if (!n.desc.root->cert) raise(errc::missing_certificate, "behead needs a certified SU");
  DescSeq seq = children_seq(*n.desc.root);
  DescSeq dropped = drop_seq(seq, 1);
  ClassDescription target = su(n.desc.root->xi, n.desc.root->eta, dropped, n.desc.oracle_tag);
  return apply_step("su-behead", n, target.root);
}

// --- sub-forests when every eta is 1 -----------------------------------------

inline void subforests_walk(const GammaName& n, const Path& p, const std::set<Str>& here,
                            std::map<Path, std::set<Str>>& out) {
  out[p] = here;
  DescPtr node = node_at(n.desc, p);
  if (node->is_leaf) return;
  if (!(node->eta == Ordinal::fin(1)))
    raise(errc::bad_input, "sub-forest decomposition needs eta = 1 throughout");
  for (uint64_t m : realized_children(n, p)) {
    std::set<Str> next;
    for (const auto& s : here)
      if (f_at(n, p, s) == m) next.insert(s);
    Path q = p;
    q.push_back(uint32_t(m));
    subforests_walk(n, q, next, out);
  }
}

// S_root = S; S_{t^m} = the part of S_t where f_t picks m.  The default
// child's set is closed in its parent, the others open.
inline std::map<Path, std::set<Str>> subforests_eta1(const GammaName& n) {
  std::map<Path, std::set<Str>> out;
  subforests_walk(n, Path{}, n.forest.members, out);
  return out;
}

// --- eta conversion -----------------------------------------------------------

namespace etadetail {

// the slot for original child k inside the beheaded tower starting at n:
// even gaps only, injective, with k = n landing on the default slot 0
inline uint64_t slot(uint64_t n, uint64_t k) {
  if (k >= n) {
    uint64_t d = k - n;
    return d == 0 ? 0 : 4 * d + (d % 2);
  }
  uint64_t e = n - k;
  return 4 * e + 2 + (e % 2);
}

struct Drops {
  std::set<Str> closed;                       // beta still at eta
  std::map<uint64_t, std::set<Str>> pieces;   // key: f at the minimal drop point
};

// Partition of the forest by the minimal drop points of the root witness.
inline Drops root_drops(const GammaName& n) {
  DescPtr root = n.desc.root;
  const Ordinal& eta = root->eta;
  Drops out;
  std::map<Str, uint64_t> owner;
  for (const auto& s : n.forest.members) {
    if (beta_at(n, {}, s, eta) == eta) {
      out.closed.insert(s);
      continue;
    }
    // walk the chain to the minimal drop point
    auto preds = n.forest.ctx->predecessors(s, root->xi);
    const Str* minimal = nullptr;
    for (const auto& r : preds) {
      if (!n.forest.contains(r)) continue;
      if (!(beta_at(n, {}, r, eta) == eta)) { minimal = &r; break; }
    }
    out.pieces[f_at(n, {}, *minimal)].insert(s);
  }
  return out;
}

}  // namespace etadetail

// A name over SU(xi, eta, Theta) rewritten over the eta-eliminated
// description; deep evaluation is preserved.
inline GammaName eta_to_one(const GammaName& n, size_t limit_width = 4) {
  DescPtr root = n.desc.root;
  if (root->is_leaf) raise(errc::bad_input, "eta_to_one needs an SU name");
  DescSeq seq = children_seq(*root);
  if (!seq.cert) raise(errc::missing_certificate, "eta_to_one needs a certified sequence");
  const Ordinal& xi = root->xi;
  const Ordinal& eta = root->eta;
  auto cl = classify(eta);
  if (cl.kind == OrdKind::Successor && cl.pred.is_zero()) return n;

  ClassDescription target = eta_eliminate(xi, eta, seq, n.desc.oracle_tag, limit_width);
  auto drops = etadetail::root_drops(n);

  GammaName out;
  out.desc = target;
  out.forest = n.forest;
  out.oracle = n.oracle;

  AlphaForest T{n.forest.ctx, n.forest.level, drops.closed, n.forest.depth, n.forest.alphabet};
  graft(out, 0, restrict_name(subname(n, 0), T));

  NodeAssign rootAssign;
  if (cl.kind == OrdKind::Successor) {
    const Ordinal& gamma = cl.pred;
    for (const auto& [k0, piece] : drops.pieces) {
      uint64_t route = uint64_t(k0) + 1;  // child k0+1 holds Lambda_{k0}
      AlphaForest W{n.forest.ctx, n.forest.level, piece, n.forest.depth, n.forest.alphabet};
      // the tower name at eta-1 over the k0-shifted sequence
      GammaName g;
      g.desc = su(xi, gamma, drop_seq(seq, k0), n.desc.oracle_tag);
      g.forest = W;
      g.oracle = n.oracle;
      NodeAssign ga;
      std::set<uint64_t> used;
      for (const auto& s : piece) {
        uint64_t k = f_at(n, {}, s);
        uint64_t m = etadetail::slot(k0, k);
        used.insert(k);
        if (m != 0) ga.f[s] = m;
        Ordinal b = beta_at(n, {}, s, eta);
        if (!(b == gamma)) ga.beta[s] = b;
      }
      g.assign[Path{}] = ga;
      for (uint64_t k : used) {
        uint64_t m = etadetail::slot(k0, k);
        GammaName embedded = embed_even_steps(restrict_name(subname(n, uint32_t(k)), W), seq, k,
                                              k0 + m);
        graft(g, uint32_t(m), embedded);
      }
      for (const auto& s : piece) {
        rootAssign.f[s] = route;
        rootAssign.beta[s] = Ordinal::zero();
      }
      graft(out, uint32_t(route), eta_to_one(g, limit_width));
    }
  } else {
    // limit: route each piece to the least stage of the fundamental sequence
    // that bounds its witness values
    std::map<uint64_t, std::map<uint64_t, std::set<Str>>> buckets;  // stage -> (k0 -> strings)
    for (const auto& [k0, piece] : drops.pieces) {
      for (const auto& s : piece) {
        // the minimal drop point of s fixes the stage
        auto preds = n.forest.ctx->predecessors(s, xi);
        const Str* minimal = nullptr;
        for (const auto& r : preds) {
          if (!n.forest.contains(r)) continue;
          if (!(beta_at(n, {}, r, eta) == eta)) { minimal = &r; break; }
        }
        Ordinal b = beta_at(n, {}, *minimal, eta);
        uint64_t j = 1;
        for (; j <= limit_width; ++j)
          if (compare(b, fundamental_seq(eta, j + 1)) == Order::Less) break;
        if (j > limit_width)
          raise(errc::bad_input, "limit width too small for the witness values");
        buckets[j][k0].insert(s);
      }
    }
    for (const auto& [j, by_k] : buckets) {
      std::set<Str> piece;
      for (const auto& [k0, ss] : by_k) piece.insert(ss.begin(), ss.end());
      AlphaForest W{n.forest.ctx, n.forest.level, piece, n.forest.depth, n.forest.alphabet};
      Ordinal etaj = fundamental_seq(eta, j + 1);
      GammaName g;
      g.desc = su(xi, etaj, seq, n.desc.oracle_tag);
      g.forest = W;
      g.oracle = n.oracle;
      NodeAssign ga;
      std::set<uint64_t> used;
      for (const auto& s : piece) {
        uint64_t k = f_at(n, {}, s);
        used.insert(k);
        if (k != 0) ga.f[s] = k;
        ga.beta[s] = beta_at(n, {}, s, eta);  // strictly below etaj on this piece
      }
      g.assign[Path{}] = ga;
      for (uint64_t k : used)
        graft(g, uint32_t(k), restrict_name(subname(n, uint32_t(k)), W));
      for (const auto& s : piece) {
        rootAssign.f[s] = j;
        rootAssign.beta[s] = Ordinal::zero();
      }
      graft(out, uint32_t(j), eta_to_one(g, limit_width));
    }
  }
  out.assign[Path{}] = rootAssign;
  return out;
}

// The inverse direction: a name over the eliminated description read back
// over SU(xi, eta, Theta).
inline GammaName one_to_eta(const GammaName& n, const Ordinal& eta, const DescSeq& seq,
                            size_t limit_width = 4) {
  DescPtr root = n.desc.root;
  if (root->is_leaf) raise(errc::bad_input, "one_to_eta needs an SU name");
  const Ordinal& xi = root->xi;
  auto cl = classify(eta);
  if (cl.kind == OrdKind::Zero) raise(errc::bad_input, "eta must be nonzero");
  if (cl.kind == OrdKind::Successor && cl.pred.is_zero()) {
    GammaName out = n;
    out.desc = su(xi, Ordinal::fin(1), seq, n.desc.oracle_tag);
    return out;
  }

  GammaName out;
  out.desc = su(xi, eta, seq, n.desc.oracle_tag);
  out.forest = n.forest;
  out.oracle = n.oracle;

  auto sub = subforests_eta1(n);
  NodeAssign rootAssign;
  // per target child k: covering pieces to merge
  std::map<uint64_t, std::vector<std::pair<AlphaForest, GammaName>>> pieces;

  AlphaForest S0{n.forest.ctx, n.forest.level, sub.count({0}) ? sub[{0}] : std::set<Str>{},
                 n.forest.depth, n.forest.alphabet};
  pieces[0].push_back({S0, subname(n, 0)});

  for (const auto& [p, members] : sub) {
    if (p.size() != 1 || p[0] == 0 || members.empty()) continue;
    uint32_t c = p[0];
    AlphaForest Sc{n.forest.ctx, n.forest.level, members, n.forest.depth, n.forest.alphabet};
    if (cl.kind == OrdKind::Successor) {
      uint64_t k0 = c - 1;
      GammaName K = one_to_eta(restrict_name(subname(n, c), Sc), cl.pred, drop_seq(seq, k0),
                               limit_width);
      for (const auto& s : members) {
        uint64_t m = f_at(K, {}, s);
        // invert the slot map: child m of the tower is Theta_{k0+m}
        rootAssign.f[s] = k0 + m;
        rootAssign.beta[s] = beta_at(K, {}, s, cl.pred);
      }
      for (uint64_t m : realized_children(K, Path{}))
        pieces[k0 + m].push_back({Sc, subname(K, uint32_t(m))});
    } else {
      Ordinal etaj = fundamental_seq(eta, c + 1);
      GammaName K = one_to_eta(restrict_name(subname(n, c), Sc), etaj, seq, limit_width);
      for (const auto& s : members) {
        rootAssign.f[s] = f_at(K, {}, s);
        rootAssign.beta[s] = beta_at(K, {}, s, etaj);
      }
      for (uint64_t m : realized_children(K, Path{}))
        pieces[m].push_back({Sc, subname(K, uint32_t(m))});
    }
  }
  // drop explicit defaults so the default law holds structurally
  for (auto it = rootAssign.f.begin(); it != rootAssign.f.end();) {
    if (it->second == 0) it = rootAssign.f.erase(it);
    else ++it;
  }
  out.assign[Path{}] = rootAssign;
  for (auto& [k, ps] : pieces) {
    GammaName child = merge_cover(n.forest, ClassDescription{seq.at(size_t(k)), n.desc.oracle_tag}, ps);
    graft(out, uint32_t(k), child);
  }
  return out;
}

}  // namespace wadge
