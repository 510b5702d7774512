#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wadge/error.hpp"
#include "wadge/ordinal.hpp"
#include "wadge/truestage.hpp"

namespace wadge {

// NameExpr: the total expression language for approximation and witness
// programs.  No loops; evaluation is fuel-bounded, one unit per node, and
// reports divergence (nullopt) when the fuel runs out -- this is the
// "converges within k steps" clock used by totalisation.
struct NameExpr {
  enum Kind { Const, Entry, Length, Contains, HeightAt, If, Le, Lt, Eq, Min, Max };
  Kind kind = Const;
  uint64_t value = 0;        // Const / Entry index / Contains value
  Ordinal level;             // HeightAt
  std::vector<NameExpr> kids;

  static NameExpr con(uint64_t v) { return NameExpr{Const, v, {}, {}}; }
  static NameExpr entry(uint64_t i) { return NameExpr{Entry, i, {}, {}}; }
  static NameExpr len() { return NameExpr{Length, 0, {}, {}}; }
  static NameExpr contains(uint64_t v) { return NameExpr{Contains, v, {}, {}}; }
  static NameExpr height_at(const Ordinal& lev) { return NameExpr{HeightAt, 0, lev, {}}; }
  static NameExpr node(Kind k, std::vector<NameExpr> kids) {
    return NameExpr{k, 0, {}, std::move(kids)};
  }
};

inline size_t expr_cost(const NameExpr& e) {
  size_t c = 1;
  for (const auto& k : e.kids) c += expr_cost(k);
  return c;
}

inline uint64_t expr_eval_total(const NameExpr& e, const Str& s, StageContext& ctx) {
  switch (e.kind) {
    case NameExpr::Const: return e.value;
    case NameExpr::Entry: return e.value < s.size() && s[e.value] <= u128(UINT64_MAX)
                                     ? uint64_t(s[e.value])
                                     : 0;
    case NameExpr::Length: return s.size();
    case NameExpr::Contains:
      for (u128 x : s)
        if (x == u128(e.value)) return 1;
      return 0;
    case NameExpr::HeightAt: return ctx.height(s, e.level);
    case NameExpr::If:
      return expr_eval_total(e.kids[0], s, ctx) != 0 ? expr_eval_total(e.kids[1], s, ctx)
                                                     : expr_eval_total(e.kids[2], s, ctx);
    case NameExpr::Le: return expr_eval_total(e.kids[0], s, ctx) <= expr_eval_total(e.kids[1], s, ctx);
    case NameExpr::Lt: return expr_eval_total(e.kids[0], s, ctx) < expr_eval_total(e.kids[1], s, ctx);
    case NameExpr::Eq: return expr_eval_total(e.kids[0], s, ctx) == expr_eval_total(e.kids[1], s, ctx);
    case NameExpr::Min:
      return std::min(expr_eval_total(e.kids[0], s, ctx), expr_eval_total(e.kids[1], s, ctx));
    case NameExpr::Max:
      return std::max(expr_eval_total(e.kids[0], s, ctx), expr_eval_total(e.kids[1], s, ctx));
  }
  return 0;
}

// Fuel-bounded evaluation: diverges (nullopt) unless the whole expression
// fits in the budget.
inline std::optional<uint64_t> expr_eval(const NameExpr& e, const Str& s, StageContext& ctx,
                                         uint64_t fuel) {
  if (expr_cost(e) > fuel) return std::nullopt;
  return expr_eval_total(e, s, ctx);
}

inline std::string expr_print(const NameExpr& e) {
  switch (e.kind) {
    case NameExpr::Const: return std::to_string(e.value);
    case NameExpr::Entry: return "(entry " + std::to_string(e.value) + ")";
    case NameExpr::Length: return "(len)";
    case NameExpr::Contains: return "(contains " + std::to_string(e.value) + ")";
    case NameExpr::HeightAt: return "(height " + print(e.level) + ")";
    case NameExpr::If:
      return "(if " + expr_print(e.kids[0]) + " " + expr_print(e.kids[1]) + " " +
             expr_print(e.kids[2]) + ")";
    case NameExpr::Le: return "(le " + expr_print(e.kids[0]) + " " + expr_print(e.kids[1]) + ")";
    case NameExpr::Lt: return "(lt " + expr_print(e.kids[0]) + " " + expr_print(e.kids[1]) + ")";
    case NameExpr::Eq: return "(eq " + expr_print(e.kids[0]) + " " + expr_print(e.kids[1]) + ")";
    case NameExpr::Min: return "(min " + expr_print(e.kids[0]) + " " + expr_print(e.kids[1]) + ")";
    case NameExpr::Max: return "(max " + expr_print(e.kids[0]) + " " + expr_print(e.kids[1]) + ")";
  }
  return "0";
}

}  // namespace wadge
