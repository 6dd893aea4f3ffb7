#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace binsos {

// ---------------------------------------------------------------------------
// Output values
// ---------------------------------------------------------------------------

enum class Bit : std::uint8_t { zero = 0, one = 1 };

/// One's complement: complement(complement(b)) == b.
constexpr Bit complement(Bit b) noexcept {
  return b == Bit::zero ? Bit::one : Bit::zero;
}

constexpr int to_int(Bit b) noexcept { return static_cast<int>(b); }

/// A process output or a picked value; std::nullopt is the "no value" sentinel.
using MaybeBit = std::optional<Bit>;

using OutputVector = std::vector<MaybeBit>;

inline std::string to_string(MaybeBit v) {
  if (!v) return "bot";
  return *v == Bit::zero ? "0" : "1";
}

inline MaybeBit parse_maybe_bit(std::string_view s) {
  if (s == "0") return Bit::zero;
  if (s == "1") return Bit::one;
  if (s == "bot" || s == "_" || s == "none" || s == "⊥") return std::nullopt;
  throw std::invalid_argument("not a value in {0,1,bot}: " + std::string(s));
}

// ---------------------------------------------------------------------------
// Output sets and sets of output sets
// ---------------------------------------------------------------------------

/// The four subsets of {0,1}. The enumerator value is the bit position used
/// by SetOfOutputSets masks: empty=0, {0}=1, {1}=2, {0,1}=3.
enum class OutputSet : std::uint8_t { empty = 0, zero = 1, one = 2, both = 3 };

inline constexpr std::array<OutputSet, 4> kAllOutputSets = {
    OutputSet::empty, OutputSet::zero, OutputSet::one, OutputSet::both};

constexpr bool contains(OutputSet s, Bit b) noexcept {
  const auto bits = static_cast<unsigned>(s);
  return b == Bit::zero ? (bits & 1u) != 0 : (bits & 2u) != 0;
}

constexpr int cardinality(OutputSet s) noexcept {
  switch (s) {
    case OutputSet::empty: return 0;
    case OutputSet::zero:
    case OutputSet::one: return 1;
    case OutputSet::both: return 2;
  }
  return 0;
}

/// Set inclusion; the four output sets form a lattice under it.
constexpr bool is_subset(OutputSet a, OutputSet b) noexcept {
  return (static_cast<unsigned>(a) & ~static_cast<unsigned>(b)) == 0;
}

constexpr OutputSet join(OutputSet a, OutputSet b) noexcept {
  return static_cast<OutputSet>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}

constexpr OutputSet meet(OutputSet a, OutputSet b) noexcept {
  return static_cast<OutputSet>(static_cast<unsigned>(a) & static_cast<unsigned>(b));
}

constexpr OutputSet singleton(Bit b) noexcept {
  return b == Bit::zero ? OutputSet::zero : OutputSet::one;
}

inline std::string to_string(OutputSet s) {
  switch (s) {
    case OutputSet::empty: return "∅";
    case OutputSet::zero: return "{0}";
    case OutputSet::one: return "{1}";
    case OutputSet::both: return "{0,1}";
  }
  return "?";
}

/// Set of distinct non-sentinel values in an output vector.
inline OutputSet output_set(std::span<const MaybeBit> v) noexcept {
  unsigned bits = 0;
  for (const auto& e : v) {
    if (e) bits |= (*e == Bit::zero) ? 1u : 2u;
  }
  return static_cast<OutputSet>(bits);
}

/// A subset of the four output sets, stored as a 4-bit mask in the order
/// (∅, {0}, {1}, {0,1}) from least to most significant bit.
class SetOfOutputSets {
 public:
  constexpr SetOfOutputSets() = default;
  constexpr explicit SetOfOutputSets(std::uint8_t mask) : mask_(mask & 0x0Fu) {
    if (mask > 0x0Fu) throw std::invalid_argument("SetOfOutputSets mask must be < 16");
  }
  constexpr SetOfOutputSets(std::initializer_list<OutputSet> members) {
    for (auto m : members) insert(m);
  }

  static constexpr SetOfOutputSets from_mask(unsigned mask) {
    return SetOfOutputSets(static_cast<std::uint8_t>(mask));
  }

  constexpr std::uint8_t mask() const noexcept { return mask_; }
  constexpr bool empty() const noexcept { return mask_ == 0; }
  constexpr bool contains(OutputSet s) const noexcept {
    return (mask_ >> static_cast<unsigned>(s)) & 1u;
  }
  constexpr void insert(OutputSet s) noexcept {
    mask_ = static_cast<std::uint8_t>(mask_ | (1u << static_cast<unsigned>(s)));
  }
  constexpr int size() const noexcept {
    int c = 0;
    for (auto s : kAllOutputSets) c += contains(s) ? 1 : 0;
    return c;
  }
  constexpr bool subset_of(SetOfOutputSets other) const noexcept {
    return (mask_ & ~other.mask_) == 0;
  }
  std::vector<OutputSet> members() const {
    std::vector<OutputSet> out;
    for (auto s : kAllOutputSets)
      if (contains(s)) out.push_back(s);
    return out;
  }

  friend constexpr SetOfOutputSets operator|(SetOfOutputSets a, SetOfOutputSets b) noexcept {
    SetOfOutputSets r;
    r.mask_ = static_cast<std::uint8_t>(a.mask_ | b.mask_);
    return r;
  }
  friend constexpr SetOfOutputSets operator-(SetOfOutputSets a, SetOfOutputSets b) noexcept {
    SetOfOutputSets r;
    r.mask_ = static_cast<std::uint8_t>(a.mask_ & ~b.mask_);
    return r;
  }
  SetOfOutputSets& operator|=(SetOfOutputSets o) noexcept {
    mask_ = static_cast<std::uint8_t>(mask_ | o.mask_);
    return *this;
  }
  friend constexpr bool operator==(SetOfOutputSets, SetOfOutputSets) = default;

 private:
  std::uint8_t mask_ = 0;
};

inline std::string to_string(SetOfOutputSets o) {
  std::string s = "{";
  bool first = true;
  for (auto m : o.members()) {
    if (!first) s += ", ";
    s += to_string(m);
    first = false;
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// Characterization table
// ---------------------------------------------------------------------------

inline constexpr int kLineCount = 16;

/// Row index (1..16) of the characterization table holding exactly `o`.
/// Rows enumerate forbidden patterns in binary order, so line = 16 - mask.
constexpr int classify_line(SetOfOutputSets o) noexcept { return 16 - o.mask(); }

constexpr SetOfOutputSets line_members(int line) {
  if (line < 1 || line > kLineCount) throw std::out_of_range("table line must be in 1..16");
  return SetOfOutputSets::from_mask(static_cast<unsigned>(16 - line));
}

enum class Timing : std::uint8_t { async, sync };

inline constexpr std::array<Timing, 2> kTimings = {Timing::async, Timing::sync};

inline std::string to_string(Timing t) { return t == Timing::async ? "async" : "sync"; }

inline Timing parse_timing(std::string_view s) {
  if (s == "async" || s == "ASYNC" || s == "Async") return Timing::async;
  if (s == "sync" || s == "SYNC" || s == "Sync") return Timing::sync;
  throw std::invalid_argument("unknown timing model: " + std::string(s));
}

struct SystemConfig {
  int n = 0;
  int t = 0;
  Timing timing = Timing::async;

  void validate() const {
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    if (t < 0 || t > n) throw std::invalid_argument("t must satisfy 0 <= t <= n");
  }
  friend bool operator==(const SystemConfig&, const SystemConfig&) = default;
};

/// Tight solvability condition of one table cell, kept in integer form.
class Condition {
 public:
  enum class Form : std::uint8_t {
    never,          // N/A
    t_le_n_n2,      // n >= t, n >= 2
    t_lt_n_n2,      // n > t, n >= 2
    async_split,    // 2n > 3t + 2, n >= 2
    sync_two_live,  // n >= t + 2, n >= 2
    t_le_n_n1,      // n >= t, n >= 1
    t_zero_n1,      // t = 0, n >= 1
    t_lt_n_n1,      // n > t, n >= 1
    t_le_n_n0,      // n >= t, n >= 0
  };

  constexpr explicit Condition(Form f) : form_(f) {}

  constexpr Form form() const noexcept { return form_; }

  constexpr bool operator()(int n, int t) const noexcept {
    if (n < 0 || t < 0) return false;
    switch (form_) {
      case Form::never: return false;
      case Form::t_le_n_n2: return n >= t && n >= 2;
      case Form::t_lt_n_n2: return n > t && n >= 2;
      case Form::async_split: return 2 * n > 3 * t + 2 && n >= 2;
      case Form::sync_two_live: return n >= t + 2 && n >= 2;
      case Form::t_le_n_n1: return n >= t && n >= 1;
      case Form::t_zero_n1: return t == 0 && n >= 1 && n >= t;
      case Form::t_lt_n_n1: return n > t && n >= 1;
      case Form::t_le_n_n0: return n >= t;
    }
    return false;
  }

  std::string text() const {
    switch (form_) {
      case Form::never: return "false";
      case Form::t_le_n_n2: return "n >= t && n >= 2";
      case Form::t_lt_n_n2: return "n > t && n >= 2";
      case Form::async_split: return "2*n > 3*t + 2 && n >= 2";
      case Form::sync_two_live: return "n >= t + 2 && n >= 2";
      case Form::t_le_n_n1: return "n >= t && n >= 1";
      case Form::t_zero_n1: return "t == 0 && n >= 1";
      case Form::t_lt_n_n1: return "n > t && n >= 1";
      case Form::t_le_n_n0: return "n >= t && n >= 0";
    }
    return "false";
  }

  friend constexpr bool operator==(Condition, Condition) = default;

 private:
  Form form_;
};

constexpr Condition tight_condition(int line, Timing timing) {
  using F = Condition::Form;
  switch (line) {
    case 1:
    case 3:
    case 5: return Condition(F::t_le_n_n2);
    case 2:
    case 4:
    case 6: return Condition(F::t_lt_n_n2);
    case 7:
    case 8: return Condition(timing == Timing::async ? F::async_split : F::sync_two_live);
    case 9:
    case 11:
    case 13: return Condition(F::t_le_n_n1);
    case 10: return Condition(timing == Timing::async ? F::t_zero_n1 : F::t_lt_n_n1);
    case 12:
    case 14: return Condition(F::t_lt_n_n1);
    case 15: return Condition(F::t_le_n_n0);
    case 16: return Condition(F::never);
    default: throw std::out_of_range("table line must be in 1..16");
  }
}

struct CardinalityBounds {
  int min_processes;  // lower bound on n
  int min_correct;    // lower bound on n - t
  friend bool operator==(const CardinalityBounds&, const CardinalityBounds&) = default;
};

/// Necessary counting bounds: n >= max |o| and n - t >= min |o| over o in `o`.
inline CardinalityBounds observation1_bounds(SetOfOutputSets o) {
  if (o.empty()) throw std::invalid_argument("bounds are undefined for the empty set of output sets");
  int lo = 2, hi = 0;
  for (auto m : o.members()) {
    lo = std::min(lo, cardinality(m));
    hi = std::max(hi, cardinality(m));
  }
  return {hi, lo};
}

inline bool satisfies(CardinalityBounds b, int n, int t) noexcept {
  return n >= b.min_processes && n - t >= b.min_correct;
}

/// Structured rendering of all 16 lines under both timing models.
inline nlohmann::json characterization_table_json() {
  nlohmann::json rows = nlohmann::json::array();
  for (int line = 1; line <= kLineCount; ++line) {
    for (auto timing : kTimings) {
      rows.push_back({{"line", line},
                      {"members_mask", line_members(line).mask()},
                      {"timing", to_string(timing)},
                      {"condition", tight_condition(line, timing).text()}});
    }
  }
  return rows;
}

}  // namespace binsos
