#pragma once

#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "wadge/error.hpp"
#include "wadge/truestage.hpp"

namespace wadge {

// An alpha-forest: a <=_level-convex set of finite strings over a bounded
// universe (entries below `alphabet`, length at most `depth`).  Deep members
// (maximal length) stand in for the infinite points of [S].
struct AlphaForest {
  Ctx ctx;
  Ordinal level;
  std::set<Str> members;
  size_t depth = 0;
  uint64_t alphabet = 2;

  bool contains(const Str& s) const { return members.count(s) > 0; }

  bool leq(const Str& a, const Str& b) const { return ctx->leq(level, a, b); }

  std::vector<Str> deep_members() const {
    std::vector<Str> out;
    for (const auto& s : members)
      if (s.size() == depth) out.push_back(s);
    return out;
  }

  // all rho in the forest with rho <=_level s, increasing length, s included
  std::vector<Str> chain_below(const Str& s) const {
    std::vector<Str> out;
    for (const auto& r : ctx->predecessors(s, level))
      if (contains(r)) out.push_back(r);
    return out;
  }

  bool same_universe(const AlphaForest& o) const {
    return ctx == o.ctx && level == o.level && depth == o.depth && alphabet == o.alphabet;
  }
};

inline AlphaForest make_forest(Ctx ctx, const Ordinal& level, std::set<Str> members, size_t depth,
                               uint64_t alphabet) {
  return AlphaForest{std::move(ctx), level, std::move(members), depth, alphabet};
}

inline AlphaForest full_forest(Ctx ctx, const Ordinal& level, size_t depth, uint64_t alphabet) {
  AlphaForest f{std::move(ctx), level, {}, depth, alphabet};
  std::vector<Str> frontier{Str{}};
  f.members.insert(Str{});
  for (size_t len = 1; len <= depth; ++len) {
    std::vector<Str> next;
    for (const auto& s : frontier)
      for (uint64_t a = 0; a < alphabet; ++a) {
        Str t = s;
        t.push_back(a);
        f.members.insert(t);
        next.push_back(t);
      }
    frontier = std::move(next);
  }
  return f;
}

inline AlphaForest forest_from_pred(Ctx ctx, const Ordinal& level,
                                    const std::function<bool(const Str&)>& pred, size_t depth,
                                    uint64_t alphabet) {
  AlphaForest all = full_forest(ctx, level, depth, alphabet);
  AlphaForest f{all.ctx, level, {}, depth, alphabet};
  for (const auto& s : all.members)
    if (pred(s)) f.members.insert(s);
  return f;
}

struct ConvexityViolation {
  Str below, middle, above;
};

// ok (nullopt) iff the member set is <=_level-convex.
inline std::optional<ConvexityViolation> validate_forest(const AlphaForest& S) {
  for (const auto& t : S.members) {
    auto preds = S.ctx->predecessors(t, S.level);
    for (size_t j = 0; j + 1 < preds.size(); ++j) {
      if (S.contains(preds[j])) continue;
      for (size_t i = 0; i < j; ++i)
        if (S.contains(preds[i]) && S.ctx->leq(S.level, preds[i], preds[j]))
          return ConvexityViolation{preds[i], preds[j], t};
    }
  }
  return std::nullopt;
}

enum class Topology { OpenIn, ClosedIn, Both, Neither };

inline Topology relative_topology(const AlphaForest& R, const AlphaForest& S) {
  if (!R.same_universe(S)) raise(errc::forest_mismatch, "topology needs matching universes");
  for (const auto& s : R.members)
    if (!S.contains(s)) raise(errc::not_a_subforest, "R must be a subset of S");
  bool open = true, closed = true;
  for (const auto& t : S.members) {
    for (const auto& r : S.ctx->predecessors(t, S.level)) {
      if (!S.contains(r)) continue;
      bool rin = R.contains(r), tin = R.contains(t);
      if (rin && !tin) open = false;
      if (tin && !rin) closed = false;
    }
  }
  if (open && closed) return Topology::Both;
  if (open) return Topology::OpenIn;
  if (closed) return Topology::ClosedIn;
  return Topology::Neither;
}

// W: the upward closure of S in the ambient universe; V = W \ S.  Deep
// membership satisfies [S] = [W] \ [V].
inline std::pair<AlphaForest, AlphaForest> split_forest(const AlphaForest& S) {
  AlphaForest universe = full_forest(S.ctx, S.level, S.depth, S.alphabet);
  AlphaForest W{S.ctx, S.level, {}, S.depth, S.alphabet};
  AlphaForest V{S.ctx, S.level, {}, S.depth, S.alphabet};
  for (const auto& t : universe.members)
    for (const auto& r : S.ctx->predecessors(t, S.level))
      if (S.contains(r)) {
        W.members.insert(t);
        if (!S.contains(t)) V.members.insert(t);
        break;
      }
  return {W, V};
}

// Pairwise orthogonalisation of open subsets of S.  Height-trimmed inputs,
// then by induction on height: a string joins W_i unless some strictly
// smaller string already joined a different W_j with j below the string's
// height; at equal eligibility the lowest index claims it.
inline std::vector<AlphaForest> orthogonalize(const AlphaForest& S,
                                              const std::vector<AlphaForest>& U) {
  std::vector<AlphaForest> W;
  for (const auto& u : U) W.push_back(AlphaForest{S.ctx, S.level, {}, S.depth, S.alphabet});

  std::vector<std::pair<uint64_t, Str>> by_height;
  for (const auto& s : S.members) by_height.push_back({S.ctx->height(s, S.level), s});
  std::sort(by_height.begin(), by_height.end());

  for (const auto& [h, s] : by_height) {
    for (size_t i = 0; i < U.size(); ++i) {
      if (!U[i].contains(s) || h <= i) continue;
      bool blocked = false;
      for (size_t j = 0; j < U.size() && !blocked; ++j) {
        if (j == i || u128(j) >= u128(h)) continue;
        for (const auto& r : W[j].members)
          if (r != s && S.ctx->leq(S.level, r, s)) { blocked = true; break; }
      }
      if (!blocked) {
        W[i].members.insert(s);
        break;  // lowest index claims the string
      }
    }
  }
  return W;
}

// Reduction of a pair of open sets: assignment by the <=_level-minimal
// witness on each string's chain, ties to the first set.
inline std::pair<AlphaForest, AlphaForest> reduce_pair(const AlphaForest& W1,
                                                       const AlphaForest& W2,
                                                       const AlphaForest& S) {
  for (const auto* W : {&W1, &W2})
    if (relative_topology(*W, S) != Topology::OpenIn && relative_topology(*W, S) != Topology::Both)
      raise(errc::bad_input, "reduce_pair needs open subsets of S");
  AlphaForest X1{S.ctx, S.level, {}, S.depth, S.alphabet};
  AlphaForest X2{S.ctx, S.level, {}, S.depth, S.alphabet};
  for (const auto& s : S.members) {
    if (!W1.contains(s) && !W2.contains(s)) continue;
    for (const auto& r : S.chain_below(s)) {
      if (W1.contains(r)) { X1.members.insert(s); break; }
      if (W2.contains(r)) { X2.members.insert(s); break; }
    }
  }
  return {X1, X2};
}

// Opening of a stagewise enumeration: sigma joins once some predecessor was
// enumerated by stage |sigma|_level.
inline AlphaForest open_from_stagewise(const AlphaForest& S,
                                       const std::vector<std::pair<Str, uint64_t>>& staged) {
  AlphaForest W{S.ctx, S.level, {}, S.depth, S.alphabet};
  for (const auto& s : S.members) {
    uint64_t h = S.ctx->height(s, S.level);
    for (const auto& [r, stage] : staged)
      if (stage <= h && S.ctx->leq(S.level, r, s)) {
        W.members.insert(s);
        break;
      }
  }
  return W;
}

inline bool forests_orthogonal(const AlphaForest& A, const AlphaForest& B) {
  for (const auto& a : A.members)
    for (const auto& b : B.members)
      if (A.ctx->leq(A.level, a, b) || A.ctx->leq(A.level, b, a)) return false;
  return true;
}

inline std::string forest_serialize(const AlphaForest& S) {
  std::ostringstream out;
  out << "forest level=" << print(S.level) << " depth=" << S.depth << " alphabet=" << S.alphabet
      << "\n";
  std::set<u128> codes;
  for (const auto& s : S.members) codes.insert(str_code(s));
  for (u128 c : codes) out << u128_str(c) << "\n";
  return out.str();
}

inline AlphaForest forest_parse(const std::string& text, Ctx ctx) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header) || header.rfind("forest ", 0) != 0)
    raise(errc::parse_error, "missing forest header");
  std::string lev, dep, alph;
  std::istringstream hs(header.substr(7));
  hs >> lev >> dep >> alph;
  auto val = [](const std::string& kv, const char* key) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || kv.substr(0, eq) != key)
      raise(errc::parse_error, "bad forest header field: " + kv);
    return kv.substr(eq + 1);
  };
  AlphaForest S;
  S.ctx = std::move(ctx);
  S.level = parse_ordinal(val(lev, "level"));
  S.depth = std::stoul(val(dep, "depth"));
  S.alphabet = std::stoul(val(alph, "alphabet"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto c = u128_parse(line);
    if (!c) raise(errc::parse_error, "bad string code: " + line);
    auto s = str_decode(*c);
    if (!s) raise(errc::parse_error, "not a string code: " + line);
    S.members.insert(*s);
  }
  return S;
}

}  // namespace wadge
