#pragma once

#include <map>
#include <optional>
#include <vector>

#include "wadge/expr.hpp"
#include "wadge/forest.hpp"

namespace wadge {

// An approximation on a forest: a total table of guesses whose values
// stabilise along the <=_level chains of deep points.
struct Approximation {
  AlphaForest forest;
  std::map<Str, uint64_t> f;

  uint64_t at(const Str& s) const {
    auto it = f.find(s);
    if (it == f.end()) raise(errc::not_in_forest, "approximation has no value at " + str_print(s));
    return it->second;
  }
};

// A convergence witness: ordinal guesses, non-increasing along the chains
// and strictly decreasing at every value change.  The bound eta doubles as
// the default marker.
struct Witness {
  Ordinal eta;
  std::map<Str, Ordinal> beta;

  Ordinal at(const Str& s) const {
    auto it = beta.find(s);
    if (it == beta.end()) raise(errc::not_in_forest, "witness has no value at " + str_print(s));
    return it->second;
  }
};

struct WitnessViolation {
  Str below, above;
};

inline std::optional<WitnessViolation> check_witness(const Approximation& f, const Witness& w) {
  const auto& S = f.forest;
  for (const auto& t : S.members) {
    for (const auto& r : S.chain_below(t)) {
      if (r == t) continue;
      Order o = compare(w.at(t), w.at(r));
      if (o == Order::Greater) return WitnessViolation{r, t};
      if (f.at(r) != f.at(t) && o != Order::Less) return WitnessViolation{r, t};
    }
  }
  return std::nullopt;
}

// Kleene-Brouwer rank of a finite tree under <=_level: extensions first,
// otherwise leftmost first; ranks are omega times the position, so the
// resulting bound omega*|T| has computable successor/limit structure.
inline std::pair<Ordinal, std::map<Str, Ordinal>> kb_rank(const AlphaForest& T) {
  std::vector<Str> order(T.members.begin(), T.members.end());
  std::sort(order.begin(), order.end(), [](const Str& a, const Str& b) {
    if (a == b) return false;
    if (is_prefix(b, a)) return true;   // deeper first
    if (is_prefix(a, b)) return false;
    size_t i = 0;
    while (a[i] == b[i]) ++i;
    return a[i] < b[i];
  });
  std::map<Str, Ordinal> rank;
  for (size_t i = 0; i < order.size(); ++i)
    rank[order[i]] = Ordinal::w_pow(Ordinal::fin(1), uint64_t(i));
  return {Ordinal::w_pow(Ordinal::fin(1), uint64_t(std::max<size_t>(order.size(), 1))), rank};
}

// Witness synthesis: collect the change tree R (quasi-roots of S plus the
// points where f changes from the immediate predecessor), rank it by the KB
// order, and give every string the rank of its longest R-predecessor.
inline std::pair<Ordinal, Witness> synthesize_witness(const Approximation& f) {
  const auto& S = f.forest;
  AlphaForest R{S.ctx, S.level, {}, S.depth, S.alphabet};
  for (const auto& s : S.members) {
    if (s.empty()) { R.members.insert(s); continue; }
    auto preds = S.ctx->predecessors(s, S.level);
    const Str& parent = preds[preds.size() - 2];
    if (!S.contains(parent) || f.at(parent) != f.at(s)) R.members.insert(s);
  }
  auto [eta, rank] = kb_rank(R);
  Witness w;
  w.eta = eta;
  for (const auto& s : S.members) {
    auto chain = S.chain_below(s);
    const Str* longest = nullptr;
    for (const auto& r : chain)
      if (R.contains(r)) longest = &r;
    if (!longest) raise(errc::not_in_forest, "no change point below " + str_print(s));
    w.beta[s] = rank[*longest];
  }
  return {eta, w};
}

// Totalisation with a default: turn possibly partial programs into a total
// approximation/witness pair on the full forest.  The programs' convergence
// clock is the fuel bound |sigma|_level.
struct TotalizeResult {
  Approximation g;
  Witness gamma;
};

inline Ordinal beta_value(uint64_t raw, const Ordinal& eta) {
  Ordinal v = Ordinal::fin(raw);
  return compare(v, eta) == Order::Greater ? eta : v;
}

inline TotalizeResult totalize_default(const NameExpr& fprog, const NameExpr& bprog,
                                       const Ordinal& eta, uint64_t nstar,
                                       const AlphaForest& full) {
  if (eta.is_zero()) raise(errc::bad_input, "totalize_default needs eta >= 1");
  TotalizeResult out;
  out.g.forest = full;
  out.gamma.eta = eta;
  auto& ctx = *full.ctx;

  std::vector<std::pair<uint64_t, Str>> by_height;
  for (const auto& s : full.members) by_height.push_back({ctx.height(s, full.level), s});
  std::sort(by_height.begin(), by_height.end());

  for (const auto& [k, s] : by_height) {
    if (s.empty()) {
      out.g.f[s] = nstar;
      out.gamma.beta[s] = eta;
      continue;
    }
    auto preds = ctx.predecessors(s, full.level);
    const Str& parent = preds[preds.size() - 2];
    Ordinal gpar = out.gamma.beta.at(parent);
    // longest rho on the chain whose programs converge within k steps and
    // whose witness value drops below gamma(parent)
    const Str* pick = nullptr;
    uint64_t pick_f = 0;
    Ordinal pick_b;
    for (const auto& rho : preds) {
      auto fv = expr_eval(fprog, rho, ctx, k);
      auto bvr = expr_eval(bprog, rho, ctx, k);
      if (!fv || !bvr) continue;
      Ordinal bv = beta_value(*bvr, eta);
      if (compare(bv, gpar) == Order::Less) {
        pick = &rho;
        pick_f = *fv;
        pick_b = bv;
      }
    }
    if (pick) {
      out.g.f[s] = pick_f;
      out.gamma.beta[s] = pick_b;
    } else {
      out.g.f[s] = out.g.f.at(parent);
      out.gamma.beta[s] = gpar;
    }
  }
  return out;
}

// f(sigma) = n if sigma lies in V_n, 0 outside; the V_n are open one level
// up, so along the chains of a deep point the value stabilises to the index
// of the family entered.
inline Approximation from_open_family(const AlphaForest& S, const std::vector<AlphaForest>& V) {
  for (const auto& v : V)
    for (const auto& s : v.members)
      if (!S.contains(s)) raise(errc::not_a_subforest, "family member outside S");
  for (size_t i = 0; i < V.size(); ++i)
    for (size_t j = i + 1; j < V.size(); ++j)
      if (!forests_orthogonal(V[i], V[j]))
        raise(errc::not_orthogonal, "open family not pairwise orthogonal");
  Approximation f;
  f.forest = S;
  for (const auto& s : S.members) {
    uint64_t val = 0;
    for (size_t n = 0; n < V.size(); ++n)
      if (V[n].contains(s)) { val = n; break; }
    f.f[s] = val;
  }
  return f;
}

}  // namespace wadge
