#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wadge/error.hpp"
#include "wadge/strings.hpp"

namespace wadge {

// The jump of a string: the halting set of a delayed machine run with the
// string as oracle for |oracle| steps.  Laws every operator must satisfy:
//   - empty base:   jump(<>) = {}
//   - monotone:     sigma <= tau implies jump(sigma) subseteq jump(tau)
//   - delay:        |jump(sigma^a)| <= |jump(sigma)| + 1
// last_entered is the element added at the longest prefix that grew the set,
// -1 when the set is empty.
struct JumpResult {
  std::vector<int64_t> in_order;  // elements in order of entry

  bool contains(int64_t e) const {
    return std::find(in_order.begin(), in_order.end(), e) != in_order.end();
  }
  int64_t last() const { return in_order.empty() ? -1 : in_order.back(); }
  size_t size() const { return in_order.size(); }
};

struct JumpOperator {
  virtual ~JumpOperator() = default;
  // z is the relativisation oracle, already truncated by the caller to the
  // oracle length; operators that ignore the oracle tape just don't read it.
  virtual JumpResult eval(const Str& oracle, const Str& z) const = 0;
  virtual std::string describe() const = 0;

  JumpResult eval(const Str& oracle) const { return eval(oracle, Str{}); }
};

inline std::vector<int64_t> jump_set(const JumpOperator& op, const Str& s, const Str& z = {}) {
  auto r = op.eval(s, z).in_order;
  std::sort(r.begin(), r.end());
  return r;
}

inline int64_t p_of(const JumpOperator& op, const Str& s, const Str& z = {}) {
  return op.eval(s, z).last();
}

// Operators built from a step function satisfy the laws by construction:
// the set grows by at most the one returned element per oracle entry, and
// each step sees only the oracle prefix read so far.
struct StepJump : JumpOperator {
  using JumpOperator::eval;

  virtual std::optional<int64_t> step(const Str& prefix, const Str& z,
                                      const JumpResult& so_far) const = 0;

  JumpResult eval(const Str& oracle, const Str& z) const final {
    JumpResult r;
    for (size_t len = 1; len <= oracle.size(); ++len) {
      Str pre = prefix_of(oracle, len);
      Str zpre = prefix_of(z, std::min(z.size(), len));
      auto e = step(pre, zpre, r);
      if (e && !r.contains(*e)) r.in_order.push_back(*e);
    }
    return r;
  }
};

struct NullJump final : StepJump {
  std::optional<int64_t> step(const Str&, const Str&, const JumpResult&) const override {
    return std::nullopt;
  }
  std::string describe() const override { return "null"; }
};

struct ClockJump final : StepJump {
  std::optional<int64_t> step(const Str& pre, const Str&, const JumpResult&) const override {
    return int64_t(pre.size()) - 1;
  }
  std::string describe() const override { return "clock"; }
};

// ---------------------------------------------------------------------------
// The default machine.  Input e decodes to a guarded query program over the
// oracle entries: atomic pattern tests and conjunctions up to depth 3.  e is
// admitted into the jump at the first oracle length L with e < L, the program
// satisfied on the length-L prefix, and no smaller input also waiting; one
// admission per step keeps the delay law.
namespace jumpdetail {

struct Prog {
  int kind;  // 0: decoded entry i ends with v; 1: some decoded entry ends with v;
             // 2: entry i equals v; 3: conjunction
  uint64_t i = 0, v = 0;
  std::unique_ptr<Prog> lhs, rhs;
};

inline void unpair64(uint64_t z, uint64_t& x, uint64_t& y) {
  uint64_t w = uint64_t((std::sqrt(8.0 * double(z) + 1) - 1) / 2);
  while (w * (w + 1) / 2 > z) --w;
  while ((w + 1) * (w + 2) / 2 <= z) ++w;
  y = z - w * (w + 1) / 2;
  x = w - y;
}

inline Prog decode_prog(uint64_t e, int depth) {
  uint64_t k, rest;
  unpair64(e, k, rest);
  Prog p;
  int kind = int(k % (depth > 1 ? 4 : 3));
  p.kind = kind;
  if (kind == 3) {
    uint64_t a, b;
    unpair64(rest, a, b);
    p.lhs = std::make_unique<Prog>(decode_prog(a, depth - 1));
    p.rhs = std::make_unique<Prog>(decode_prog(b, depth - 1));
  } else {
    uint64_t i, v;
    unpair64(rest, i, v);
    p.i = i % 6;
    p.v = v % 5;
  }
  return p;
}

inline bool entry_ends_with(u128 entry, uint64_t v) {
  auto dec = str_decode(entry);
  return dec && !dec->empty() && dec->back() == v;
}

inline bool sat(const Prog& p, const Str& pre) {
  switch (p.kind) {
    case 0: return p.i < pre.size() && entry_ends_with(pre[p.i], p.v);
    case 1:
      for (u128 e : pre)
        if (entry_ends_with(e, p.v)) return true;
      return false;
    case 2: return p.i < pre.size() && pre[p.i] == u128(p.v);
    default: return sat(*p.lhs, pre) && sat(*p.rhs, pre);
  }
}

}  // namespace jumpdetail

struct DefaultMachine final : StepJump {
  std::optional<int64_t> step(const Str& pre, const Str&, const JumpResult& so_far) const override {
    for (uint64_t e = 0; e < pre.size(); ++e) {
      if (so_far.contains(int64_t(e))) continue;
      if (jumpdetail::sat(jumpdetail::decode_prog(e, 3), pre)) return int64_t(e);
    }
    return std::nullopt;
  }
  std::string describe() const override { return "default"; }
};

// Variant whose atomic tests may also probe the relativisation oracle; used
// to exercise the relativised relations.
struct OracleProbeMachine final : StepJump {
  std::optional<int64_t> step(const Str& pre, const Str& z, const JumpResult& so_far) const override {
    for (uint64_t e = 0; e < pre.size(); ++e) {
      if (so_far.contains(int64_t(e))) continue;
      uint64_t k, rest, i, v;
      jumpdetail::unpair64(e, k, rest);
      jumpdetail::unpair64(rest, i, v);
      bool hit;
      if (k % 2 == 0)
        hit = (i % 4) < z.size() && z[i % 4] == u128(v % 5);
      else
        hit = jumpdetail::sat(jumpdetail::decode_prog(e, 2), pre);
      if (hit) return int64_t(e);
    }
    return std::nullopt;
  }
  std::string describe() const override { return "oracle-probe"; }
};

// ---------------------------------------------------------------------------
// Scripted operators: a finite event table, completed monotonically.  Event
// (trigger, element, step) admits the element once the oracle extends the
// trigger and has length >= max(step, |trigger|); at most one admission per
// length, ties resolved by (step, element).
struct ScriptedJump final : StepJump {
  struct Event {
    Str trigger;
    int64_t element;
    uint64_t step;
  };
  std::vector<Event> events;
  std::string name = "scripted";

  std::optional<int64_t> step(const Str& pre, const Str&, const JumpResult& so_far) const override {
    std::optional<size_t> best;
    for (size_t i = 0; i < events.size(); ++i) {
      const auto& ev = events[i];
      if (so_far.contains(ev.element)) continue;
      if (std::max<uint64_t>(ev.step, ev.trigger.size()) > pre.size()) continue;
      if (!is_prefix(ev.trigger, pre)) continue;
      if (!best || events[*best].step > ev.step ||
          (events[*best].step == ev.step && events[*best].element > ev.element))
        best = i;
    }
    if (!best) return std::nullopt;
    return events[*best].element;
  }
  std::string describe() const override { return name; }
};

// Line-oriented text format: one "(string-code, element, step)" triple per
// line, sorted.
inline std::string scripted_serialize(const ScriptedJump& op) {
  std::vector<std::string> lines;
  for (const auto& ev : op.events)
    lines.push_back(u128_str(str_code(ev.trigger)) + " " + std::to_string(ev.element) + " " +
                    std::to_string(ev.step));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (auto& l : lines) out += l + "\n";
  return out;
}

inline ScriptedJump scripted_parse(const std::string& text) {
  ScriptedJump op;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string codes;
    int64_t elem;
    uint64_t step;
    if (!(ls >> codes >> elem >> step)) raise(errc::parse_error, "bad scripted event: " + line);
    auto c = u128_parse(codes);
    if (!c) raise(errc::parse_error, "bad string code: " + codes);
    auto trig = str_decode(*c);
    if (!trig) raise(errc::parse_error, "not a string code: " + codes);
    op.events.push_back(ScriptedJump::Event{*trig, elem, step});
  }
  return op;
}

// Reproducible law-abiding operator.  Triggers mix plain strings with
// prefix-code chains (the shape of sigma^(0) oracles), so scripted behaviour
// reaches into the successor-level machinery.
inline std::shared_ptr<ScriptedJump> random_scripted(uint64_t seed) {
  auto op = std::make_shared<ScriptedJump>();
  op->name = "scripted#" + std::to_string(seed);
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 1);
  auto rnd = [&](uint64_t n) { return rng() % n; };
  size_t n_events = 2 + rnd(6);
  for (size_t i = 0; i < n_events; ++i) {
    Str plain;
    size_t len = rnd(4);
    for (size_t j = 0; j < len; ++j) plain.push_back(rnd(5));
    Str trigger = plain;
    if (rnd(2) == 0) {
      // prefix-code chain of the plain string: [code(<>), code(p1), ...]
      trigger.clear();
      for (size_t j = 0; j <= plain.size(); ++j) trigger.push_back(str_code(prefix_of(plain, j)));
      if (trigger.size() > 1 && rnd(2) == 0) trigger.resize(1 + rnd(trigger.size() - 1));
    }
    op->events.push_back(ScriptedJump::Event{trigger, int64_t(rnd(8)), rnd(8)});
  }
  return op;
}

inline std::shared_ptr<JumpOperator> null_jump() { return std::make_shared<NullJump>(); }
inline std::shared_ptr<JumpOperator> clock_jump() { return std::make_shared<ClockJump>(); }
inline std::shared_ptr<JumpOperator> default_machine() { return std::make_shared<DefaultMachine>(); }
inline std::shared_ptr<JumpOperator> oracle_probe_machine() {
  return std::make_shared<OracleProbeMachine>();
}

}  // namespace wadge
