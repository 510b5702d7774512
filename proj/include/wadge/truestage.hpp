#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "wadge/error.hpp"
#include "wadge/jump.hpp"
#include "wadge/ordinal.hpp"
#include "wadge/strings.hpp"

namespace wadge {

// The relations sigma <=_alpha tau on finite strings, for alpha <= delta.
//
//   <=_0        is the prefix relation;
//   <=_lambda   is the intersection of the <=_beta for beta < lambda;
//   <=_alpha+1  holds when sigma <=_alpha tau and no e < p(sigma^(alpha))
//               lies in jump(tau^(alpha)) \ jump(sigma^(alpha)),
//
// where tau^(alpha) enumerates the proper <_alpha-predecessors of tau minus
// the first n_alpha of them (n_alpha = code(alpha)).
//
// For each tau we record, per proper prefix, the maximal gamma <= delta with
// prefix <=_gamma tau.  Nestedness makes this a complete answer, and the
// relation changes only at the finitely many levels whose code is at most
// |tau|: between those, one-step triviality (|sigma|_alpha <= n_alpha) pushes
// the relation upward unchanged.  This is the stepping algorithm from the
// computability proof, run against a pluggable jump operator.
class StageContext {
 public:
  StageContext(Ordinal delta, std::shared_ptr<JumpOperator> op,
               std::optional<Str> oracle = std::nullopt)
      : delta_(std::move(delta)), op_(std::move(op)), oracle_(std::move(oracle)) {}

  static std::shared_ptr<StageContext> make(const Ordinal& delta,
                                            std::shared_ptr<JumpOperator> op,
                                            std::optional<Str> oracle = std::nullopt) {
    return std::make_shared<StageContext>(delta, std::move(op), std::move(oracle));
  }

  const Ordinal& delta() const { return delta_; }
  const JumpOperator& op() const { return *op_; }
  std::shared_ptr<JumpOperator> op_ptr() const { return op_; }
  const std::optional<Str>& oracle() const { return oracle_; }

  bool leq(const Ordinal& alpha, const Str& s, const Str& t) {
    check_level(alpha);
    if (!is_prefix(s, t)) return false;
    if (s.size() == t.size()) return true;
    return !(compare(max_level_raw(s, t), alpha) == Order::Less);
  }

  // Relativised query; the answer depends only on oracle|<=|t| (the jumps the
  // stepping algorithm takes never read past the oracle length of the string
  // they concern).
  bool leq_rel(const Ordinal& alpha, const Str& s, const Str& t) {
    if (!oracle_) raise(errc::oracle_too_short, "context has no oracle");
    if (oracle_->size() < t.size()) raise(errc::oracle_too_short, "need |z| >= |t|");
    return leq(alpha, s, t);
  }

  // max {gamma <= delta : s <=_gamma t}; requires s to be a prefix of t.
  Ordinal max_level(const Str& s, const Str& t) {
    if (!is_prefix(s, t)) raise(errc::not_a_prefix, "max_level needs s prefix of t");
    if (s.size() == t.size()) return delta_;
    return max_level_raw(s, t);
  }

  // All rho <=_alpha s, in increasing length order, s included.
  std::vector<Str> predecessors(const Str& s, const Ordinal& alpha) {
    check_level(alpha);
    const auto& ch = chain(s);
    std::vector<Str> out;
    for (size_t i = 0; i < s.size(); ++i)
      if (!(compare(ch[i], alpha) == Order::Less)) out.push_back(prefix_of(s, i));
    out.push_back(s);
    return out;
  }

  // |s|_alpha: the number of proper <_alpha-predecessors of s.
  uint64_t height(const Str& s, const Ordinal& alpha) {
    check_level(alpha);
    const auto& ch = chain(s);
    uint64_t n = 0;
    for (size_t i = 0; i < s.size(); ++i)
      if (!(compare(ch[i], alpha) == Order::Less)) ++n;
    return n;
  }

  // s^(alpha): the jump oracle built from s's proper predecessor chain at
  // alpha, coded entrywise, minus the first n_alpha entries.
  Str iterate(const Str& s, const Ordinal& alpha) {
    if (!(compare(alpha, delta_) == Order::Less))
      raise(errc::level_exceeds_delta, "iterate needs alpha < delta");
    const auto& ch = chain(s);
    std::vector<size_t> idx;
    for (size_t i = 0; i < s.size(); ++i)
      if (!(compare(ch[i], alpha) == Order::Less)) idx.push_back(i);
    Str out;
    u128 skip = code(alpha);
    for (size_t j = 0; j < idx.size(); ++j)
      if (u128(j) >= skip) out.push_back(str_code(prefix_of(s, idx[j])));
    return out;
  }

  // p_{alpha+1}(s) = p(s^(alpha)).
  int64_t p_succ(const Ordinal& alpha, const Str& s) {
    Str it = iterate(s, alpha);
    return op_->eval(it, ztrunc(it.size())).last();
  }

  // The TSP5 sequence for a limit lambda <= delta:
  //   lambda_0 = fundamental_seq(lambda, 0), bumped to 1 if that is 0;
  //   lambda_k = max { lambda_{k-1}+1 } u { alpha < lambda : n_alpha <= k }.
  Ordinal tsp5_seq(const Ordinal& lam, uint64_t k) {
    if (!is_limit(lam)) raise(errc::not_a_limit, "tsp5_seq needs a limit");
    if (compare(lam, delta_) == Order::Greater)
      raise(errc::level_exceeds_delta, "tsp5_seq needs lambda <= delta");
    auto& seq = tsp5_[lam];
    if (seq.empty()) {
      Ordinal l0 = fundamental_seq(lam, 0);
      if (l0.is_zero()) l0 = Ordinal::fin(1);
      seq.push_back(l0);
    }
    while (seq.size() <= k) {
      Ordinal best = succ(seq.back());
      for (u128 m = 0; m <= u128(seq.size()); ++m) {
        auto a = decode_opt(m);
        if (!a) continue;
        if (compare(*a, lam) == Order::Less && compare(best, *a) == Order::Less) best = *a;
      }
      seq.push_back(best);
    }
    return seq[k];
  }

 private:
  void check_level(const Ordinal& alpha) {
    if (compare(alpha, delta_) == Order::Greater)
      raise(errc::level_exceeds_delta, "level above delta: " + print(alpha));
  }

  Str ztrunc(size_t n) const {
    if (!oracle_) return Str{};
    return prefix_of(*oracle_, std::min(oracle_->size(), n));
  }

  Ordinal max_level_raw(const Str& s, const Str& t) { return chain(t)[s.size()]; }

  // Levels at which the relation below t can change: all beta < delta with
  // n_beta <= |t|, in increasing order (0 is always among them).
  std::vector<Ordinal> relevant_levels(size_t len) {
    std::vector<Ordinal> out;
    for (u128 m = 0; m <= u128(len); ++m) {
      auto a = decode_opt(m);
      if (a && compare(*a, delta_) == Order::Less) out.push_back(*a);
    }
    std::sort(out.begin(), out.end(),
              [](const Ordinal& a, const Ordinal& b) { return compare(a, b) == Order::Less; });
    if (out.empty() || !out.front().is_zero()) out.insert(out.begin(), Ordinal::zero());
    return out;
  }

  Str oracle_of_indices(const Str& t, const std::vector<size_t>& idx, u128 skip) {
    Str out;
    for (size_t j = 0; j < idx.size(); ++j)
      if (u128(j) >= skip) out.push_back(str_code(prefix_of(t, idx[j])));
    return out;
  }

  const std::vector<Ordinal>& chain(const Str& t) {
    auto it = chains_.find(t);
    if (it != chains_.end()) return it->second;
    for (size_t l = 1; l < t.size(); ++l) chain(prefix_of(t, l));

    std::vector<Ordinal> maxlev(t.size(), delta_);
    std::vector<size_t> D;  // surviving prefix lengths; |t| stands for t itself
    for (size_t i = 0; i <= t.size(); ++i) D.push_back(i);

    for (const Ordinal& beta : relevant_levels(t.size())) {
      u128 nb = code(beta);
      std::vector<size_t> proper(D.begin(), D.end() - 1);
      Str tau_or = oracle_of_indices(t, proper, nb);
      JumpResult tj = op_->eval(tau_or, ztrunc(tau_or.size()));

      std::vector<size_t> keep;
      for (size_t i : proper) {
        Str rho = prefix_of(t, i);
        Str rho_or = pred_oracle(rho, beta, nb);
        JumpResult rj = op_->eval(rho_or, ztrunc(rho_or.size()));
        int64_t p = rj.last();
        bool ok = true;
        if (p >= 0)
          for (int64_t e : tj.in_order)
            if (e < p && !rj.contains(e)) { ok = false; break; }
        if (ok) keep.push_back(i);
        else maxlev[i] = beta;
      }
      keep.push_back(t.size());
      D = std::move(keep);
    }
    return chains_.emplace(t, std::move(maxlev)).first->second;
  }

  Str pred_oracle(const Str& rho, const Ordinal& beta, u128 skip) {
    const auto& ch = chain(rho);
    std::vector<size_t> idx;
    for (size_t i = 0; i < rho.size(); ++i)
      if (!(compare(ch[i], beta) == Order::Less)) idx.push_back(i);
    return oracle_of_indices(rho, idx, skip);
  }

  Ordinal delta_;
  std::shared_ptr<JumpOperator> op_;
  std::optional<Str> oracle_;
  std::map<Str, std::vector<Ordinal>> chains_;
  std::map<Ordinal, std::vector<Ordinal>> tsp5_;
};

using Ctx = std::shared_ptr<StageContext>;

// ---------------------------------------------------------------------------
// Translation between true-stage worlds (oracles, copies, pairings).  Given
// per-string upward-closed sets U_rho over the target relation, h is built by
// recursion along the target tree: step to a candidate rho that is an
// immediate source-successor of h(parent) and whose U_rho has been entered,
// otherwise stay.  Provider samples are spot-checked for upward closure.
class Translation {
 public:
  using Provider = std::function<bool(const Str& rho, const Str& sigma)>;
  using Candidates = std::function<std::vector<Str>(const Str& sigma)>;
  // Hooks for instances whose source relation depends on the string at hand
  // (the unpairing translation reads its oracle off the even part).
  using SrcLeq = std::function<bool(const Str& a, const Str& b, const Str& at)>;

  Translation(Ctx source, Ctx target, Ordinal alpha, Provider u)
      : src_(std::move(source)), tgt_(std::move(target)), alpha_(std::move(alpha)),
        u_(std::move(u)) {
    candidates_ = [](const Str& s) {
      std::vector<Str> out;
      for (size_t i = 0; i <= s.size(); ++i) out.push_back(prefix_of(s, i));
      return out;
    };
    src_leq_ = [this](const Str& a, const Str& b, const Str&) { return src_->leq(alpha_, a, b); };
  }

  void set_candidates(Candidates c) { candidates_ = std::move(c); }
  void set_src_leq(SrcLeq f) { src_leq_ = std::move(f); }

  Str h(const Str& sigma) {
    auto it = memo_.find(sigma);
    if (it != memo_.end()) return it->second;
    Str result;
    if (!sigma.empty()) {
      Str parent = tgt_parent(sigma);
      Str hp = h(parent);
      result = hp;
      bool stepped = false;
      for (const Str& rho : candidates_(sigma)) {
        if (rho == hp || !src_leq_(hp, rho, sigma)) continue;
        if (src_height(rho, sigma) != src_height(hp, sigma) + 1) continue;
        if (!member(rho, sigma)) continue;
        result = rho;
        stepped = true;
        break;
      }
      // staying put keeps sigma inside U_{h(sigma)}; a provider that loses
      // sigma here was not upward closed
      if (!stepped && !member(hp, sigma))
        raise(errc::invalid_provider, "U_" + str_print(hp) + " lost " + str_print(sigma));
    }
    memo_.emplace(sigma, result);
    return result;
  }

 private:
  Str tgt_parent(const Str& sigma) {
    auto preds = tgt_->predecessors(sigma, alpha_);
    return preds[preds.size() - 2];  // <> is always there
  }

  size_t src_height(const Str& rho, const Str& at) {
    size_t n = 0;
    for (size_t i = 0; i < rho.size(); ++i)
      if (src_leq_(prefix_of(rho, i), rho, at)) ++n;
    return n;
  }

  bool member(const Str& rho, const Str& sigma) {
    if (rho.empty()) return true;  // U_<> is everything
    bool r = u_(rho, sigma);
    auto& seen = samples_[rho];
    for (const auto& [s2, r2] : seen) {
      if (r2 && !r && tgt_->leq(alpha_, s2, sigma))
        raise(errc::invalid_provider, "U_" + str_print(rho) + " not upward closed");
      if (r && !r2 && tgt_->leq(alpha_, sigma, s2))
        raise(errc::invalid_provider, "U_" + str_print(rho) + " not upward closed");
    }
    seen.emplace_back(sigma, r);
    return r;
  }

  Ctx src_, tgt_;
  Ordinal alpha_;
  Provider u_;
  Candidates candidates_;
  SrcLeq src_leq_;
  std::map<Str, Str> memo_;
  std::map<Str, std::vector<std::pair<Str, bool>>> samples_;
};

}  // namespace wadge
