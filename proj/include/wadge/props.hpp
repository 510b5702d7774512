#pragma once

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "wadge/jump.hpp"
#include "wadge/name.hpp"
#include "wadge/ordinal.hpp"
#include "wadge/strings.hpp"
#include "wadge/truestage.hpp"

namespace wadge::props {

struct Law {
  std::string name;
  bool pass = true;
  uint64_t checked = 0;
  std::string counterexample;

  void fail(const std::string& cx) {
    if (pass) { pass = false; counterexample = cx; }
  }
};

struct Report {
  std::deque<Law> laws;  // deque: law() hands out references that must stay valid

  Law& law(const std::string& name) {
    for (auto& l : laws)
      if (l.name == name) return l;
    laws.push_back(Law{name});
    return laws.back();
  }
  bool all_pass() const {
    for (const auto& l : laws)
      if (!l.pass) return false;
    return true;
  }
  std::string summary() const {
    std::ostringstream out;
    for (const auto& l : laws) {
      out << (l.pass ? "pass" : "FAIL") << " " << l.name << " checked=" << l.checked;
      if (!l.pass) out << " counterexample: " << l.counterexample;
      out << "\n";
    }
    return out.str();
  }
};

inline std::vector<Str> all_strings(size_t maxlen, uint64_t alphabet) {
  std::vector<Str> out{Str{}};
  size_t first = 0;
  for (size_t len = 1; len <= maxlen; ++len) {
    size_t last = out.size();
    for (size_t i = first; i < last; ++i)
      for (uint64_t a = 0; a < alphabet; ++a) {
        Str s = out[i];
        s.push_back(a);
        out.push_back(s);
      }
    first = last;
  }
  return out;
}

// Sample of levels <= delta at which the laws are asserted.  Below the
// largest string length in play the relation can only change at levels whose
// code is small, so this sample together with the cap is exhaustive in
// effect.
inline std::vector<Ordinal> level_sample(const Ordinal& delta, size_t maxlen) {
  std::vector<Ordinal> cand;
  for (u128 m = 0; m <= u128(maxlen) + 1; ++m)
    if (auto a = decode_opt(m)) cand.push_back(*a);
  Ordinal w = Ordinal::omega();
  cand.push_back(w);
  cand.push_back(succ(w));
  cand.push_back(succ(succ(w)));
  Ordinal w2 = Ordinal::w_pow(Ordinal::fin(1), 2);
  cand.push_back(w2);
  cand.push_back(Ordinal::w_pow(Ordinal::fin(2)));
  cand.push_back(delta);
  std::sort(cand.begin(), cand.end(),
            [](const Ordinal& a, const Ordinal& b) { return compare(a, b) == Order::Less; });
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  std::vector<Ordinal> out;
  for (const auto& a : cand)
    if (!(compare(a, delta) == Order::Greater)) out.push_back(a);
  return out;
}

struct TspConfig {
  std::vector<std::shared_ptr<JumpOperator>> ops;
  std::vector<Ordinal> deltas;
  size_t maxlen = 6;
  uint64_t alphabet = 3;
};

// The structural law suite: TSP1 nestedness, TSP2 tree order, diamond, club,
// one-step triviality, the successor characterisation through p_succ, and the
// TSP5 sequence agreement.
inline Report tsp_suite(const TspConfig& cfg) {
  Report rep;
  auto& nested = rep.law("tsp1-nested");
  auto& refl = rep.law("tsp2-reflexive");
  auto& trans = rep.law("tsp2-transitive");
  auto& diamond = rep.law("tsp2-diamond");
  auto& club = rep.law("club");
  auto& trivial = rep.law("triviality-one-step");
  auto& succchar = rep.law("successor-characterisation");
  auto& moniter = rep.law("monotone-iterates");
  auto& tsp5 = rep.law("tsp5-agreement");

  auto strings = all_strings(cfg.maxlen, cfg.alphabet);

  for (const auto& op : cfg.ops) {
    for (const auto& delta : cfg.deltas) {
      auto ctx = StageContext::make(delta, op);
      auto levels = level_sample(delta, cfg.maxlen);
      auto tag = [&](const Str& s, const Str& t, const Ordinal& a) {
        return "op=" + op->describe() + " delta=" + print(delta) + " alpha=" + print(a) +
               " s=" + str_print(s) + " t=" + str_print(t);
      };

      // p_succ tables per level (for levels with a successor <= delta)
      std::map<size_t, std::map<Str, int64_t>> psucc;
      for (size_t li = 0; li < levels.size(); ++li) {
        if (compare(succ(levels[li]), delta) == Order::Greater) continue;
        for (const auto& s : strings) psucc[li][s] = ctx->p_succ(levels[li], s);
      }

      for (const auto& t : strings) {
        for (size_t li = 0; li < levels.size(); ++li) {
          const Ordinal& a = levels[li];
          ++refl.checked;
          if (!ctx->leq(a, t, t)) refl.fail(tag(t, t, a));

          auto preds = ctx->predecessors(t, a);
          // nestedness against the next sampled level
          if (li + 1 < levels.size()) {
            for (const auto& s : preds) {
              ++nested.checked;
              if (ctx->leq(levels[li + 1], s, t) && !ctx->leq(a, s, t))
                nested.fail(tag(s, t, levels[li + 1]));
            }
          }
          // transitivity and diamond within the predecessor chain
          for (size_t i = 0; i < preds.size(); ++i) {
            for (size_t j = 0; j < i; ++j) {
              ++trans.checked;
              if (!ctx->leq(a, preds[j], preds[i])) {
                // diamond failure is the same thing seen from t
                diamond.fail(tag(preds[j], preds[i], a));
                trans.fail(tag(preds[j], preds[i], a));
              } else {
                ++diamond.checked;
              }
            }
          }
          // monotone iterates
          if (compare(a, delta) == Order::Less) {
            Str it_t = ctx->iterate(t, a);
            for (const auto& s : preds) {
              ++moniter.checked;
              if (!is_prefix(ctx->iterate(s, a), it_t)) moniter.fail(tag(s, t, a));
            }
          }
          // successor characterisation, club, triviality
          if (psucc.count(li)) {
            Ordinal a1 = succ(a);
            auto& table = psucc[li];
            for (const auto& s : preds) {
              if (s.size() == t.size()) continue;
              bool lhs = ctx->leq(a1, s, t);
              bool rhs = true;
              for (const auto& r : preds)
                if (s.size() <= r.size() && ctx->leq(a, s, r) && table[r] < table[s]) rhs = false;
              ++succchar.checked;
              if (lhs != rhs) succchar.fail(tag(s, t, a));
              if (lhs) {
                for (const auto& r : preds) {
                  if (r.size() < s.size() || !ctx->leq(a, s, r)) continue;
                  ++club.checked;
                  if (!ctx->leq(a1, s, r)) club.fail(tag(s, r, a));
                }
              }
              ++trivial.checked;
              if (u128(ctx->height(s, a)) <= code(a) && ctx->leq(a, s, t) && !lhs)
                trivial.fail(tag(s, t, a));
            }
          }
          // TSP5 at limit levels
          if (is_limit(a)) {
            for (const auto& s : preds) {
              uint64_t k = ctx->height(s, a);
              Ordinal lk = ctx->tsp5_seq(a, k);
              ++tsp5.checked;
              if (ctx->height(s, lk) != k) { tsp5.fail(tag(s, t, a)); continue; }
              if (ctx->leq(a, s, t) != ctx->leq(lk, s, t)) tsp5.fail(tag(s, t, a));
            }
            // the other direction: over all proper prefixes, related or not
            for (size_t i = 0; i < t.size(); ++i) {
              Str s = prefix_of(t, i);
              uint64_t k = ctx->height(s, a);
              Ordinal lk = ctx->tsp5_seq(a, k);
              ++tsp5.checked;
              if (ctx->leq(lk, s, t) != ctx->leq(a, s, t)) tsp5.fail(tag(s, t, a));
            }
          }
        }
      }
    }
  }
  return rep;
}

inline void enumerate_desc_paths(const DescPtr& node, Path& p,
                                 std::vector<std::pair<Path, DescPtr>>& out) {
  out.push_back({p, node});
  if (node->is_leaf) return;
  for (size_t i = 0; i < child_generator_count(*node); ++i) {
    p.push_back(uint32_t(i));
    enumerate_desc_paths(child_at(*node, i), p, out);
    p.pop_back();
  }
}

// A random valid name: witness values walk down along each node's chains,
// child choices move only when the witness drops.
inline GammaName random_name(const ClassDescription& g, const AlphaForest& S,
                             std::mt19937_64& rng) {
  GammaName n;
  n.desc = g;
  n.forest = S;
  std::vector<std::pair<Path, DescPtr>> nodes;
  Path p;
  enumerate_desc_paths(g.root, p, nodes);

  for (const auto& [path, node] : nodes) {
    if (node->is_leaf) continue;
    uint64_t bound = node->tail.empty() ? node->kids.size() : child_generator_count(*node);
    NodeAssign na;
    std::map<Str, std::pair<uint64_t, Ordinal>> state;
    std::vector<std::pair<uint64_t, Str>> by_height;
    for (const auto& s : S.members) by_height.push_back({S.ctx->height(s, node->xi), s});
    std::sort(by_height.begin(), by_height.end());
    for (const auto& [h, s] : by_height) {
      uint64_t fv = 0;
      Ordinal bv = node->eta;
      auto preds = S.ctx->predecessors(s, node->xi);
      for (auto it = preds.rbegin(); it != preds.rend(); ++it) {
        if (*it == s || !S.contains(*it)) continue;
        auto st = state.find(*it);
        if (st != state.end()) { fv = st->second.first; bv = st->second.second; }
        break;
      }
      if (!bv.is_zero() && rng() % 3 == 0) {
        // drop the witness, optionally changing the child
        Ordinal next = Ordinal::fin(rng() % 3);
        while (!(compare(next, bv) == Order::Less) && !next.is_zero())
          next = classify(next).pred;
        if (compare(next, bv) == Order::Less) {
          bv = next;
          fv = rng() % bound;
        }
      }
      state[s] = {fv, bv};
      if (fv != 0) na.f[s] = fv;
      if (!(bv == node->eta)) na.beta[s] = bv;
    }
    if (!na.f.empty() || !na.beta.empty()) n.assign[path] = na;
  }
  return n;
}

// With the never-halting operator every relation collapses to the prefix
// relation, exhaustively.
inline Report null_collapse_suite(const std::vector<Ordinal>& deltas, size_t maxlen,
                                  uint64_t alphabet) {
  Report rep;
  auto& law = rep.law("null-collapse");
  auto strings = all_strings(maxlen, alphabet);
  for (const auto& delta : deltas) {
    auto ctx = StageContext::make(delta, null_jump());
    for (const auto& lev : level_sample(delta, maxlen))
      for (const auto& t : strings)
        for (size_t i = 0; i <= t.size(); ++i) {
          ++law.checked;
          if (!ctx->leq(lev, prefix_of(t, i), t))
            law.fail("delta=" + print(delta) + " alpha=" + print(lev) + " t=" + str_print(t));
        }
  }
  return rep;
}

}  // namespace wadge::props
