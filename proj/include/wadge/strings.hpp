#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wadge/error.hpp"

namespace wadge {

// Finite strings of naturals. Entries are 128-bit because the machinery feeds
// strings whose entries are codes of other strings (sigma^(alpha) below is a
// sequence of codes of prefixes of sigma).
using u128 = unsigned __int128;
using Str = std::vector<u128>;

inline Str str_of(std::initializer_list<uint64_t> xs) {
  Str s;
  for (auto x : xs) s.push_back(x);
  return s;
}

inline bool is_prefix(const Str& a, const Str& b) {
  if (a.size() > b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

inline Str prefix_of(const Str& a, size_t n) { return Str(a.begin(), a.begin() + n); }

// String coding: a guard bit followed by the Elias-gamma codes of entry+1,
// read as a binary numeral, minus one.  Injective, and compact enough that
// every plain string at desk scale fits in 128 bits.
inline u128 str_code(const Str& s) {
  u128 acc = 1;
  int used = 1;
  for (u128 e : s) {
    u128 n = e + 1;
    int bits = 0;
    for (u128 t = n; t > 0; t >>= 1) ++bits;
    used += 2 * bits - 1;
    if (used > 127) raise(errc::invalid_code, "string code exceeds 128 bits");
    acc <<= (bits - 1);            // gamma prefix: bits-1 zeros
    acc = (acc << bits) | n;       // then n itself (leading bit 1)
  }
  return acc - 1;
}

inline std::optional<Str> str_decode(u128 code) {
  u128 v = code + 1;
  int bits = 0;
  for (u128 t = v; t > 0; t >>= 1) ++bits;
  if (bits == 0) return std::nullopt;
  // skip the guard bit, then read gamma codes msb-first
  int pos = bits - 2;  // index of next unread bit
  Str out;
  while (pos >= 0) {
    int zeros = 0;
    while (pos >= 0 && ((v >> pos) & 1) == 0) { ++zeros; --pos; }
    if (pos < 0) return std::nullopt;
    if (zeros + 1 > pos + 1) return std::nullopt;
    u128 n = 0;
    for (int i = 0; i <= zeros; ++i) { n = (n << 1) | ((v >> pos) & 1); --pos; }
    if (n == 0) return std::nullopt;
    out.push_back(n - 1);
  }
  return out;
}

inline std::string u128_str(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) { s.push_back(char('0' + int(v % 10))); v /= 10; }
  return std::string(s.rbegin(), s.rend());
}

inline std::optional<u128> u128_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  u128 v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    u128 nv = v * 10 + u128(c - '0');
    if (nv / 10 != v) return std::nullopt;
    v = nv;
  }
  return v;
}

// Bracket syntax used by the CLI: [0,1,2]; [] is the empty string.
inline std::string str_print(const Str& s) {
  std::string out = "[";
  for (size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += u128_str(s[i]);
  }
  out += "]";
  return out;
}

// Interleaved pairing of Baire space: <z,x> = z0 x0 z1 x1 ...
// Component 0 of a finite string has the entries at even positions.
inline Str pair_component(const Str& s, int which) {
  Str out;
  for (size_t i = (which == 0 ? 0 : 1); i < s.size(); i += 2) out.push_back(s[i]);
  return out;
}

inline Str pair_strings(const Str& z, const Str& x) {
  if (z.size() != x.size() && z.size() != x.size() + 1)
    raise(errc::bad_input, "pair_strings: component lengths must interleave");
  Str out;
  size_t n = z.size() + x.size();
  for (size_t i = 0; i < n; ++i) {
    if (i % 2 == 0) out.push_back(z[i / 2]);
    else out.push_back(x[i / 2]);
  }
  return out;
}

}  // namespace wadge
