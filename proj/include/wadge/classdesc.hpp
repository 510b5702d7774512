#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wadge/error.hpp"
#include "wadge/ordinal.hpp"

namespace wadge {

// Class descriptions: labelled well-founded trees.  Leaves carry bits, inner
// nodes carry (xi, eta) with eta >= 1 and xi monotone along the tree.
// Infinite child families are finite prefixes plus a periodic tail; every
// child is a subterm, so the tree is well-founded by construction.
struct DescNode;
using DescPtr = std::shared_ptr<const DescNode>;

// Certificates that a child sequence is monotone (each class contained in
// the dual of the next).  Either the sequence literally alternates duals, or
// each step names a registered translation.
struct MonotoneCertificate {
  enum Kind { AlternatingDual, TranslationFamily };
  Kind kind = AlternatingDual;
  std::vector<std::string> prefix_tokens;
  std::vector<std::string> tail_tokens;

  std::string token_at(size_t n) const {
    if (kind == AlternatingDual) return "dual";
    if (n < prefix_tokens.size()) return prefix_tokens[n];
    if (tail_tokens.empty()) raise(errc::missing_certificate, "certificate has no step token");
    return tail_tokens[(n - prefix_tokens.size()) % tail_tokens.size()];
  }
};

struct DescNode {
  bool is_leaf = true;
  int label = 0;  // leaf bit

  Ordinal xi, eta;  // inner labels
  std::vector<DescPtr> kids;
  std::vector<DescPtr> tail;  // repeated for all further child indices
  std::optional<MonotoneCertificate> cert;
};

struct ClassDescription {
  DescPtr root;
  std::string oracle_tag = "computable";
};

inline DescPtr make_leaf(int label) {
  auto n = std::make_shared<DescNode>();
  n->is_leaf = true;
  n->label = label;
  return n;
}

inline DescPtr make_inner(const Ordinal& xi, const Ordinal& eta, std::vector<DescPtr> kids,
                          std::vector<DescPtr> tail = {},
                          std::optional<MonotoneCertificate> cert = std::nullopt) {
  if (eta.is_zero()) raise(errc::bad_input, "inner node needs eta >= 1");
  if (kids.empty() && tail.empty()) raise(errc::bad_input, "inner node needs a child");
  auto n = std::make_shared<DescNode>();
  n->is_leaf = false;
  n->xi = xi;
  n->eta = eta;
  n->kids = std::move(kids);
  n->tail = std::move(tail);
  n->cert = std::move(cert);
  return n;
}

inline bool has_infinite_children(const DescNode& n) { return !n.tail.empty(); }

inline DescPtr child_at(const DescNode& n, size_t i) {
  if (n.is_leaf) raise(errc::path_not_in_tree, "leaf has no children");
  if (i < n.kids.size()) return n.kids[i];
  if (n.tail.empty()) raise(errc::path_not_in_tree, "child index beyond the finite family");
  return n.tail[(i - n.kids.size()) % n.tail.size()];
}

// Distinct children are exhausted within the prefix plus two tail periods.
inline size_t child_generator_count(const DescNode& n) {
  return n.kids.size() + 2 * n.tail.size();
}

inline Level o_of(const ClassDescription& g) {
  if (g.root->is_leaf) return Level::top();
  return Level::of(g.root->xi);
}

inline bool desc_node_equal(const DescPtr& a, const DescPtr& b) {
  if (a == b) return true;
  if (a->is_leaf != b->is_leaf) return false;
  if (a->is_leaf) return a->label == b->label;
  if (!(a->xi == b->xi) || !(a->eta == b->eta)) return false;
  if (a->kids.size() != b->kids.size() || a->tail.size() != b->tail.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!desc_node_equal(a->kids[i], b->kids[i])) return false;
  for (size_t i = 0; i < a->tail.size(); ++i)
    if (!desc_node_equal(a->tail[i], b->tail[i])) return false;
  return true;
}

inline bool desc_equal(const ClassDescription& a, const ClassDescription& b) {
  return desc_node_equal(a.root, b.root);
}

inline DescPtr dual_node(const DescPtr& n) {
  auto m = std::make_shared<DescNode>(*n);
  if (n->is_leaf) {
    m->label = 1 - n->label;
    return m;
  }
  m->kids.clear();
  m->tail.clear();
  for (const auto& k : n->kids) m->kids.push_back(dual_node(k));
  for (const auto& k : n->tail) m->tail.push_back(dual_node(k));
  if (m->cert && m->cert->kind == MonotoneCertificate::TranslationFamily) {
    auto flip = [](std::string& t) {
      if (t == "const0") t = "const1";
      else if (t == "const1") t = "const0";
    };
    for (auto& t : m->cert->prefix_tokens) flip(t);
    for (auto& t : m->cert->tail_tokens) flip(t);
  }
  return m;
}

inline ClassDescription dual(const ClassDescription& g) {
  return ClassDescription{dual_node(g.root), g.oracle_tag};
}

using Path = std::vector<uint32_t>;

inline DescPtr node_at(const ClassDescription& g, const Path& path) {
  DescPtr n = g.root;
  for (uint32_t i : path) n = child_at(*n, i);
  return n;
}

inline ClassDescription subdescription(const ClassDescription& g, const Path& path) {
  return ClassDescription{node_at(g, path), g.oracle_tag};
}

// A uniform child sequence: finite prefix, periodic tail, certificate.
struct DescSeq {
  std::vector<DescPtr> prefix;
  std::vector<DescPtr> tail;
  std::optional<MonotoneCertificate> cert;

  DescPtr at(size_t i) const {
    if (i < prefix.size()) return prefix[i];
    if (tail.empty()) raise(errc::path_not_in_tree, "sequence index beyond the finite family");
    return tail[(i - prefix.size()) % tail.size()];
  }
  size_t generators() const { return prefix.size() + 2 * tail.size(); }
  bool infinite() const { return !tail.empty(); }
};

inline DescSeq children_seq(const DescNode& n) {
  if (n.is_leaf) raise(errc::path_not_in_tree, "leaf has no child sequence");
  return DescSeq{n.kids, n.tail, n.cert};
}

// Drop the first k entries of a sequence; the certificate steps shift along.
inline DescSeq drop_seq(const DescSeq& s, size_t k) {
  DescSeq out;
  for (size_t i = 0; i < s.prefix.size(); ++i)
    if (i >= k) out.prefix.push_back(s.prefix[i]);
  size_t still = k > s.prefix.size() ? k - s.prefix.size() : 0;
  out.tail = s.tail;
  if (still > 0 && !s.tail.empty()) {
    std::vector<DescPtr> rot;
    for (size_t i = 0; i < s.tail.size(); ++i) rot.push_back(s.tail[(still + i) % s.tail.size()]);
    out.tail = rot;
  }
  if (s.cert) {
    MonotoneCertificate c = *s.cert;
    if (c.kind == MonotoneCertificate::TranslationFamily) {
      std::vector<std::string> pre;
      for (size_t i = k; i < c.prefix_tokens.size(); ++i) pre.push_back(c.prefix_tokens[i]);
      size_t tshift = k > c.prefix_tokens.size() ? k - c.prefix_tokens.size() : 0;
      std::vector<std::string> tl = c.tail_tokens;
      if (tshift > 0 && !c.tail_tokens.empty()) {
        tl.clear();
        for (size_t i = 0; i < c.tail_tokens.size(); ++i)
          tl.push_back(c.tail_tokens[(tshift + i) % c.tail_tokens.size()]);
      }
      c.prefix_tokens = std::move(pre);
      c.tail_tokens = std::move(tl);
    }
    out.cert = c;
  }
  return out;
}

// The SU operator: a new root at level xi with bound eta over the sequence.
inline ClassDescription su(const Ordinal& xi, const Ordinal& eta, const DescSeq& seq,
                           const std::string& oracle_tag = "computable") {
  for (size_t i = 0; i < seq.generators(); ++i) {
    DescPtr c = seq.at(i);
    if (!c->is_leaf && compare(xi, c->xi) == Order::Greater)
      raise(errc::level_too_high, "su level exceeds a child level");
  }
  return ClassDescription{make_inner(xi, eta, seq.prefix, seq.tail, seq.cert), oracle_tag};
}

inline ClassDescription su(const Ordinal& xi, const DescSeq& seq,
                           const std::string& oracle_tag = "computable") {
  return su(xi, Ordinal::fin(1), seq, oracle_tag);
}

// --- standard descriptions -------------------------------------------------

inline ClassDescription std_constant(int i, const std::string& tag = "computable") {
  return ClassDescription{make_leaf(i), tag};
}

// children 0,1,0,1,... : the acceptable description of Sigma^0_{1+xi}
inline ClassDescription std_sigma(const Ordinal& xi, const std::string& tag = "computable") {
  DescSeq seq;
  seq.tail = {make_leaf(0), make_leaf(1)};
  seq.cert = MonotoneCertificate{MonotoneCertificate::AlternatingDual, {}, {}};
  return su(xi, Ordinal::fin(1), seq, tag);
}

// The difference hierarchy, as an acceptable description built by recursion
// on eta.  Limit bounds use the fundamental sequence, generated out to
// `limit_width` children before the tail repeats the last stage.
inline ClassDescription std_diff(const Ordinal& eta, const Ordinal& xi,
                                 const std::string& tag = "computable", size_t limit_width = 4) {
  auto cl = classify(eta);
  if (cl.kind == OrdKind::Zero) raise(errc::bad_input, "std_diff needs eta >= 1");
  if (cl.kind == OrdKind::Successor) {
    if (cl.pred.is_zero()) return std_sigma(xi, tag);  // D_1 = Sigma
    ClassDescription inner = std_diff(cl.pred, xi, tag, limit_width);
    DescSeq seq;
    seq.prefix = {make_leaf(0)};
    seq.tail = {dual(inner).root, inner.root};
    seq.cert = MonotoneCertificate{MonotoneCertificate::TranslationFamily, {"const0"}, {"id"}};
    return su(xi, Ordinal::fin(1), seq, tag);
  }
  // limit: children D_{eta_i} along the fundamental sequence
  DescSeq seq;
  seq.prefix = {make_leaf(0)};
  std::vector<std::string> toks = {"const0"};
  ClassDescription last;
  for (size_t i = 1; i <= limit_width; ++i) {
    Ordinal ei = fundamental_seq(eta, i);
    if (ei.is_zero()) ei = Ordinal::fin(1);
    last = std_diff(ei, xi, tag, limit_width);
    seq.prefix.push_back(last.root);
    toks.push_back("diff-step");
  }
  toks.back() = "id";
  seq.tail = {dual(last).root, last.root};
  seq.cert = MonotoneCertificate{MonotoneCertificate::TranslationFamily, toks, {"id"}};
  return su(xi, Ordinal::fin(1), seq, tag);
}

// BiSep(Sigma^0_{1+xi}, Upsilon, Lambda): children Lambda, Upsilon, dual
// Upsilon; a general description, not an acceptable one.
inline ClassDescription std_bisep(const Ordinal& xi, const ClassDescription& ups,
                                  const ClassDescription& lam,
                                  const std::string& tag = "computable") {
  DescSeq seq;
  seq.prefix = {lam.root, ups.root, dual(ups).root};
  return su(xi, Ordinal::fin(1), seq, tag);
}

// Sep(D_eta(Sigma^0_{1+xi}), Upsilon): children dual Upsilon, Upsilon.
inline ClassDescription std_sep(const Ordinal& xi, const Ordinal& eta,
                                const ClassDescription& ups,
                                const std::string& tag = "computable") {
  DescSeq seq;
  seq.prefix = {dual(ups).root, ups.root};
  return su(xi, eta, seq, tag);
}

// --- structural validation and acceptability --------------------------------

inline std::optional<std::string> validate_description(const ClassDescription& g) {
  std::function<std::optional<std::string>(const DescPtr&, const Ordinal*)> walk =
      [&](const DescPtr& n, const Ordinal* parent_xi) -> std::optional<std::string> {
    if (n->is_leaf) {
      if (n->label != 0 && n->label != 1) return "leaf label out of range";
      return std::nullopt;
    }
    if (n->eta.is_zero()) return "eta must be nonzero";
    if (n->kids.empty() && n->tail.empty()) return "inner node without children";
    if (parent_xi && compare(*parent_xi, n->xi) == Order::Greater)
      return "xi decreases along the tree";
    for (size_t i = 0; i < child_generator_count(*n); ++i)
      if (auto r = walk(child_at(*n, i), &n->xi)) return r;
    return std::nullopt;
  };
  return walk(g.root, nullptr);
}

inline const std::set<std::string>& known_certificate_tokens() {
  static const std::set<std::string> toks = {"id",     "const0",   "const1",     "su-extra",
                                             "su-behead", "eta-up", "diff-step", "tower-step",
                                             "witness-step"};
  return toks;
}

// Structural spot checks for the tokens that admit one.
inline bool token_plausible(const std::string& tok, const DescPtr& a, const DescPtr& b) {
  if (tok == "id") return desc_node_equal(a, dual_node(b));
  if (tok == "const0" || tok == "const1") {
    int bit = tok == "const0" ? 0 : 1;
    if (!a->is_leaf || a->label != bit) return false;
    // the dual of b must reach a leaf with this bit
    std::function<bool(const DescPtr&)> has = [&](const DescPtr& n) {
      if (n->is_leaf) return n->label == 1 - bit;  // label flips under dual
      for (size_t i = 0; i < child_generator_count(*n); ++i)
        if (has(child_at(*n, i))) return true;
      return false;
    };
    return has(b);
  }
  return known_certificate_tokens().count(tok) > 0;
}

// Acceptable: every inner node has eta = 1, infinitely many children, and a
// monotone certificate for its child family.
inline std::optional<std::string> is_acceptable(const ClassDescription& g) {
  if (auto bad = validate_description(g)) return bad;
  std::function<std::optional<std::string>(const DescPtr&)> walk =
      [&](const DescPtr& n) -> std::optional<std::string> {
    if (n->is_leaf) return std::nullopt;
    if (!(n->eta == Ordinal::fin(1))) return "inner node with eta != 1";
    if (n->tail.empty()) return "finite child family";
    if (!n->cert) return "missing monotone certificate";
    size_t gens = child_generator_count(*n);
    if (n->cert->kind == MonotoneCertificate::AlternatingDual) {
      for (size_t i = 0; i + 1 <= gens; ++i)
        if (!desc_node_equal(child_at(*n, i + 1), dual_node(child_at(*n, i))))
          return "alternating-dual certificate does not match the children";
    } else {
      for (size_t i = 0; i + 1 <= gens; ++i) {
        std::string tok = n->cert->token_at(i);
        if (!known_certificate_tokens().count(tok)) return "unknown certificate token: " + tok;
        if (!token_plausible(tok, child_at(*n, i), child_at(*n, i + 1)))
          return "certificate step " + std::to_string(i) + " (" + tok + ") does not fit";
      }
    }
    for (size_t i = 0; i < gens; ++i)
      if (auto r = walk(child_at(*n, i))) return r;
    return std::nullopt;
  };
  return walk(g.root);
}

enum class ClassTypeKind { Zero, Countable, Uncountable };

struct ClassType {
  ClassTypeKind kind;
  // for the countable type: the witness children indices live at the root;
  // the sequence itself is assembled by the ambiguous-class machinery
};

inline ClassType classify_type(const ClassDescription& g) {
  if (g.root->is_leaf) return {ClassTypeKind::Zero};
  if (auto bad = is_acceptable(g)) raise(errc::not_acceptable, *bad);
  const Ordinal& o = g.root->xi;
  DescPtr n = g.root;
  while (!n->is_leaf) {
    if (!(n->xi == o)) return {ClassTypeKind::Uncountable};
    n = child_at(*n, 0);
  }
  return {ClassTypeKind::Countable};
}

// Replace the bound eta by 1: an acceptable description of the same class.
// The successor step interleaves the beheaded towers at eta-1; a limit eta
// climbs its fundamental sequence, generated out to `limit_width` before the
// tail repeats the top stage.
inline ClassDescription eta_eliminate(const Ordinal& xi, const Ordinal& eta, const DescSeq& seq,
                                      const std::string& tag = "computable",
                                      size_t limit_width = 4) {
  if (!seq.infinite() || !seq.cert)
    raise(errc::not_acceptable, "eta_eliminate needs a certified infinite sequence");
  auto cl = classify(eta);
  if (cl.kind == OrdKind::Zero) raise(errc::bad_input, "eta_eliminate needs eta >= 1");
  if (cl.kind == OrdKind::Successor && cl.pred.is_zero()) return su(xi, Ordinal::fin(1), seq, tag);

  DescSeq out;
  if (cl.kind == OrdKind::Successor) {
    // children: Theta_0, Lambda_0, Lambda_1, ... with
    // Lambda_n = eta_eliminate(xi, eta-1, drop_seq(seq, n)); the Lambda_n
    // repeat with the period of the input past its prefix
    out.prefix = {seq.at(0)};
    size_t period = seq.tail.size();
    size_t distinct = seq.prefix.size() + period;
    std::vector<DescPtr> lams;
    for (size_t n = 0; n < distinct + period; ++n)
      lams.push_back(eta_eliminate(xi, cl.pred, drop_seq(seq, n), tag, limit_width).root);
    for (size_t n = 0; n < distinct; ++n) out.prefix.push_back(lams[n]);
    for (size_t n = distinct; n < distinct + period; ++n) out.tail.push_back(lams[n]);
    std::vector<std::string> toks = {"su-extra"};
    for (size_t n = 0; n + 1 < distinct; ++n) toks.push_back("su-behead");
    out.cert = MonotoneCertificate{MonotoneCertificate::TranslationFamily, toks, {"su-behead"}};
  } else {
    // limit: children Theta_0, Lambda_1, Lambda_2, ... with
    // Lambda_n = eta_eliminate(xi, eta_n) and eta_n the fundamental sequence
    out.prefix = {seq.at(0)};
    std::vector<std::string> toks = {"su-extra"};
    DescPtr last;
    for (size_t n = 1; n <= limit_width; ++n) {
      Ordinal en = fundamental_seq(eta, n + 1);
      if (en.is_zero()) en = Ordinal::fin(1);
      last = eta_eliminate(xi, en, seq, tag, limit_width).root;
      out.prefix.push_back(last);
      toks.push_back("eta-up");
    }
    toks.back() = "id";
    out.tail = {dual_node(last), last};
    out.cert = MonotoneCertificate{MonotoneCertificate::TranslationFamily, toks, {"id"}};
  }
  return su(xi, Ordinal::fin(1), out, tag);
}

}  // namespace wadge
