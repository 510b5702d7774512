#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wadge/error.hpp"
#include "wadge/strings.hpp"

namespace wadge {

// Ordinal notations in Cantor normal form below epsilon_0.  A notation is a
// sum w^e1*c1 + ... + w^ek*ck with e1 > ... > ek (as notations) and ci >= 1;
// the empty sum is 0.
//
// The integer coding fixed here supplies the field elements n_alpha used by
// the true-stage machinery:
//   code(0) = 0
//   code(sum) = 1 + seqcode(<pair(code(e1),c1), ..., pair(code(ek),ck)>)
//   pair(x,y) = (x+y)(x+y+1)/2 + y
//   seqcode(<>) = 0,  seqcode(s^a) = pair(seqcode(s), a) + 1
// Values n_alpha grow quickly (n_1 = 7, n_omega = 742), which is harmless:
// levels whose code exceeds the strings in play act trivially.
struct Ordinal {
  struct Term;
  std::vector<Term> terms;

  bool is_zero() const { return terms.empty(); }

  static Ordinal zero() { return Ordinal{}; }
  static Ordinal fin(uint64_t n);
  static Ordinal omega();
  static Ordinal w_pow(const Ordinal& e, uint64_t coeff = 1);

  bool operator==(const Ordinal& o) const;
  bool operator<(const Ordinal& o) const;
  bool operator<=(const Ordinal& o) const { return *this == o || *this < o; }
};

struct Ordinal::Term {
  Ordinal exp;
  uint64_t coeff = 1;
  bool operator==(const Term& t) const { return coeff == t.coeff && exp == t.exp; }
};

enum class Order { Less, Equal, Greater };

inline Order compare(const Ordinal& a, const Ordinal& b) {
  size_t n = std::min(a.terms.size(), b.terms.size());
  for (size_t i = 0; i < n; ++i) {
    Order e = compare(a.terms[i].exp, b.terms[i].exp);
    if (e != Order::Equal) return e;
    if (a.terms[i].coeff != b.terms[i].coeff)
      return a.terms[i].coeff < b.terms[i].coeff ? Order::Less : Order::Greater;
  }
  if (a.terms.size() == b.terms.size()) return Order::Equal;
  return a.terms.size() < b.terms.size() ? Order::Less : Order::Greater;
}

inline bool Ordinal::operator==(const Ordinal& o) const { return compare(*this, o) == Order::Equal; }
inline bool Ordinal::operator<(const Ordinal& o) const { return compare(*this, o) == Order::Less; }

inline Ordinal Ordinal::fin(uint64_t n) {
  Ordinal r;
  if (n > 0) r.terms.push_back(Term{Ordinal{}, n});
  return r;
}

inline Ordinal Ordinal::omega() { return w_pow(fin(1)); }

inline Ordinal Ordinal::w_pow(const Ordinal& e, uint64_t coeff) {
  Ordinal r;
  if (coeff > 0) r.terms.push_back(Term{e, coeff});
  return r;
}

enum class OrdKind { Zero, Successor, Limit };

struct Classified {
  OrdKind kind;
  Ordinal pred;  // meaningful only for Successor
};

inline Classified classify(const Ordinal& a) {
  if (a.is_zero()) return {OrdKind::Zero, Ordinal{}};
  const auto& last = a.terms.back();
  if (!last.exp.is_zero()) return {OrdKind::Limit, Ordinal{}};
  Ordinal p = a;
  if (last.coeff == 1) p.terms.pop_back();
  else --p.terms.back().coeff;
  return {OrdKind::Successor, p};
}

inline bool is_limit(const Ordinal& a) { return classify(a).kind == OrdKind::Limit; }

inline Ordinal succ(const Ordinal& a) {
  Ordinal r = a;
  if (!r.terms.empty() && r.terms.back().exp.is_zero()) ++r.terms.back().coeff;
  else r.terms.push_back(Ordinal::Term{Ordinal{}, 1});
  return r;
}

// Fixed fundamental sequences:
//   (g + w^(b+1))[k] = g + w^b * k      (just g when k = 0)
//   (g + w^l)[k]     = g + w^(l[k])     for limit l
// where w^e*(c+1) first splits off one copy of w^e.
inline Ordinal fundamental_seq(const Ordinal& lam, uint64_t k) {
  if (!is_limit(lam)) raise(errc::not_a_limit, "fundamental_seq needs a limit notation");
  Ordinal base = lam;
  Ordinal::Term last = base.terms.back();
  base.terms.pop_back();
  if (last.coeff > 1) {
    Ordinal::Term keep = last;
    --keep.coeff;
    base.terms.push_back(keep);
  }
  auto cl = classify(last.exp);
  if (cl.kind == OrdKind::Successor) {
    if (k > 0) base.terms.push_back(Ordinal::Term{cl.pred, k});
    return base;
  }
  // limit exponent
  base.terms.push_back(Ordinal::Term{fundamental_seq(last.exp, k), 1});
  return base;
}

namespace detail {

inline u128 triangle(u128 s) {
  u128 a = (s % 2 == 0) ? s / 2 : s;
  u128 b = (s % 2 == 0) ? s + 1 : (s + 1) / 2;
  u128 t = a * b;
  if (a != 0 && t / a != b) raise(errc::invalid_code, "ordinal code overflow");
  return t;
}

inline u128 cantor_pair(u128 x, u128 y) {
  u128 s = x + y;
  if (s < x) raise(errc::invalid_code, "ordinal code overflow");
  u128 tri = triangle(s);
  u128 r = tri + y;
  if (r < tri) raise(errc::invalid_code, "ordinal code overflow");
  return r;
}

inline u128 isqrt128(u128 v) {
  if (v == 0) return 0;
  u128 lo = 0, hi = u128(1) << 64;
  while (lo + 1 < hi) {
    u128 mid = lo + (hi - lo) / 2;
    if (mid <= v / mid) lo = mid;
    else hi = mid;
  }
  return lo;
}

inline void cantor_unpair(u128 z, u128& x, u128& y) {
  if (z > (~u128(0)) / 8) raise(errc::invalid_code, "ordinal code overflow");
  u128 w = (isqrt128(8 * z + 1) - 1) / 2;
  while (w > 0 && triangle(w) > z) --w;
  while (triangle(w + 1) <= z) ++w;
  u128 tri = triangle(w);
  y = z - tri;
  x = w - y;
}

}  // namespace detail

inline u128 code(const Ordinal& a) {
  if (a.is_zero()) return 0;
  u128 s = 0;
  for (const auto& t : a.terms) {
    u128 v = detail::cantor_pair(code(t.exp), t.coeff);
    s = detail::cantor_pair(s, v) + 1;
  }
  return 1 + s;
}

inline std::optional<Ordinal> decode_opt(u128 n) {
  if (n == 0) return Ordinal::zero();
  u128 s = n - 1;
  std::vector<u128> vals;
  while (s != 0) {
    u128 prev, v;
    detail::cantor_unpair(s - 1, prev, v);
    vals.push_back(v);
    s = prev;
  }
  Ordinal r;
  for (auto it = vals.rbegin(); it != vals.rend(); ++it) {
    u128 ec, c;
    detail::cantor_unpair(*it, ec, c);
    if (c == 0 || c > UINT64_MAX) return std::nullopt;
    auto e = decode_opt(ec);
    if (!e) return std::nullopt;
    if (!r.terms.empty() && compare(*e, r.terms.back().exp) != Order::Less) return std::nullopt;
    r.terms.push_back(Ordinal::Term{*e, uint64_t(c)});
  }
  if (code(r) != n) return std::nullopt;
  return r;
}

inline Ordinal decode(u128 n, const Ordinal& bound) {
  auto r = decode_opt(n);
  if (!r) raise(errc::invalid_code, "not a valid ordinal code: " + u128_str(n));
  if (!(compare(*r, bound) == Order::Less))
    raise(errc::invalid_code, "decoded value not below the bound");
  return *r;
}

// --- text syntax: 0, naturals, w, w^E*c, sums joined by + (strict CNF) ----

inline std::string print(const Ordinal& a) {
  if (a.is_zero()) return "0";
  std::string out;
  for (size_t i = 0; i < a.terms.size(); ++i) {
    const auto& t = a.terms[i];
    if (i) out += "+";
    if (t.exp.is_zero()) {
      out += std::to_string(t.coeff);
      continue;
    }
    Ordinal one = Ordinal::fin(1);
    if (t.exp == one) out += "w";
    else {
      std::string e = print(t.exp);
      bool atomic = e.find('+') == std::string::npos && e.find('*') == std::string::npos;
      out += "w^";
      out += atomic ? e : "(" + e + ")";
    }
    if (t.coeff > 1) out += "*" + std::to_string(t.coeff);
  }
  return out;
}

namespace detail {

struct OrdParser {
  const std::string& s;
  size_t pos = 0;

  explicit OrdParser(const std::string& str) : s(str) {}

  [[noreturn]] void fail(const std::string& msg) {
    raise(errc::parse_error, msg + " at position " + std::to_string(pos) + " in '" + s + "'");
  }

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  uint64_t number() {
    skip_ws();
    if (pos >= s.size() || !isdigit(static_cast<unsigned char>(s[pos]))) fail("expected a number");
    uint64_t v = 0;
    while (pos < s.size() && isdigit(static_cast<unsigned char>(s[pos]))) {
      v = v * 10 + uint64_t(s[pos] - '0');
      ++pos;
    }
    return v;
  }

  Ordinal term_exponent() {
    skip_ws();
    if (pos < s.size() && s[pos] == '(') {
      ++pos;
      Ordinal e = sum();
      skip_ws();
      if (pos >= s.size() || s[pos] != ')') fail("expected ')'");
      ++pos;
      return e;
    }
    if (pos < s.size() && s[pos] == 'w') return atom_w();
    return Ordinal::fin(number());
  }

  Ordinal atom_w() {
    ++pos;  // consume 'w'
    Ordinal e = Ordinal::fin(1);
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      e = term_exponent();
    }
    uint64_t c = 1;
    if (pos < s.size() && s[pos] == '*') {
      ++pos;
      c = number();
      if (c == 0) fail("zero coefficient");
    }
    return Ordinal::w_pow(e, c);
  }

  Ordinal term() {
    skip_ws();
    if (pos < s.size() && s[pos] == 'w') return atom_w();
    uint64_t n = number();
    return Ordinal::fin(n);
  }

  Ordinal sum() {
    Ordinal acc = term();
    skip_ws();
    while (pos < s.size() && s[pos] == '+') {
      ++pos;
      Ordinal t = term();
      if (t.is_zero()) fail("zero summand");
      if (acc.is_zero()) { acc = t; skip_ws(); continue; }
      if (t.terms.size() != 1) fail("expected a single CNF term after '+'");
      if (compare(t.terms[0].exp, acc.terms.back().exp) != Order::Less)
        fail("exponents must strictly decrease");
      acc.terms.push_back(t.terms[0]);
      skip_ws();
    }
    return acc;
  }
};

}  // namespace detail

inline Ordinal parse_ordinal(const std::string& text) {
  detail::OrdParser p(text);
  p.skip_ws();
  if (p.pos >= text.size()) p.fail("empty ordinal");
  Ordinal r = p.sum();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return r;
}

// o(Gamma) lives in the notations extended by a single top element standing
// for omega_1; the one-leaf description gets the top value.
struct Level {
  std::optional<Ordinal> ord;  // nullopt = Top

  static Level top() { return Level{std::nullopt}; }
  static Level of(const Ordinal& o) { return Level{o}; }
  bool is_top() const { return !ord.has_value(); }

  bool operator==(const Level& o) const {
    if (is_top() != o.is_top()) return false;
    return is_top() || *ord == *o.ord;
  }
};

inline Order compare(const Level& a, const Level& b) {
  if (a.is_top() && b.is_top()) return Order::Equal;
  if (a.is_top()) return Order::Greater;
  if (b.is_top()) return Order::Less;
  return compare(*a.ord, *b.ord);
}

inline std::string print(const Level& l) { return l.is_top() ? "w1" : print(*l.ord); }

}  // namespace wadge
