#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "output_sets.hpp"

namespace binsos {

/// 1-based process identity.
struct ProcessId {
  int index = 0;
  constexpr auto operator<=>(const ProcessId&) const = default;
};

inline std::string to_string(ProcessId p) { return "p" + std::to_string(p.index); }

// ---------------------------------------------------------------------------
// Failure patterns
// ---------------------------------------------------------------------------

/// Crash placement inside a process program. The process crashes when its
/// program counter reaches `slot`, before executing that statement;
/// slot == program length crashes it right after its last statement.
struct CrashPoint {
  int slot = 0;
  constexpr auto operator<=>(const CrashPoint&) const = default;
};

struct FailurePattern {
  std::map<ProcessId, CrashPoint> crashes;

  int faulty_count() const noexcept { return static_cast<int>(crashes.size()); }
  bool crashes_process(ProcessId p) const { return crashes.contains(p); }
  std::optional<CrashPoint> crash_of(ProcessId p) const {
    auto it = crashes.find(p);
    if (it == crashes.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const FailurePattern&, const FailurePattern&) = default;
  friend bool operator<(const FailurePattern& a, const FailurePattern& b) { return a.crashes < b.crashes; }
};

inline std::string to_string(const FailurePattern& fp) {
  if (fp.crashes.empty()) return "none";
  std::string s;
  for (const auto& [p, c] : fp.crashes) {
    if (!s.empty()) s += ",";
    s += std::to_string(p.index) + "@" + std::to_string(c.slot);
  }
  return s;
}

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

inline std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return (a > std::numeric_limits<std::uint64_t>::max() - b) ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace detail

/// Visits every failure pattern with at most `t` crashed processes, where
/// process i may crash at any slot in [0, slots_per_process[i-1]). Order: by
/// crash count, then process subsets lexicographically, then slots.
inline void for_each_failure_pattern(int n, int t, std::span<const int> slots_per_process,
                                     const std::function<void(const FailurePattern&)>& visit) {
  if (n < 0 || t < 0 || t > n) throw std::invalid_argument("failure patterns need 0 <= t <= n");
  if (static_cast<int>(slots_per_process.size()) != n)
    throw std::invalid_argument("one slot count per process is required");

  std::vector<int> chosen;
  std::vector<int> slot;
  FailurePattern fp;

  std::function<void(std::size_t)> assign_slots = [&](std::size_t k) {
    if (k == chosen.size()) {
      visit(fp);
      return;
    }
    const ProcessId p{chosen[k]};
    for (int s = 0; s < slots_per_process[chosen[k] - 1]; ++s) {
      fp.crashes[p] = CrashPoint{s};
      assign_slots(k + 1);
    }
    fp.crashes.erase(p);
  };

  std::function<void(int, int)> choose = [&](int next, int remaining) {
    if (remaining == 0) {
      assign_slots(0);
      return;
    }
    for (int i = next; i <= n - remaining + 1; ++i) {
      chosen.push_back(i);
      choose(i + 1, remaining - 1);
      chosen.pop_back();
    }
  };

  for (int f = 0; f <= t; ++f) choose(1, f);
}

inline std::vector<FailurePattern> enum_failure_patterns(int n, int t, std::span<const int> slots_per_process) {
  std::vector<FailurePattern> out;
  for_each_failure_pattern(n, t, slots_per_process, [&](const FailurePattern& fp) { out.push_back(fp); });
  return out;
}

/// Uniform slot count for every process.
inline std::vector<FailurePattern> enum_failure_patterns(int n, int t, int program_slots) {
  if (program_slots < 1) throw std::invalid_argument("program_slots must be positive");
  std::vector<int> slots(static_cast<std::size_t>(std::max(n, 0)), program_slots);
  return enum_failure_patterns(n, t, slots);
}

/// Σ_{f=0..t} Σ_{|S|=f} Π_{i∈S} slots_i, saturating.
inline std::uint64_t count_failure_patterns(int n, int t, std::span<const int> slots_per_process) {
  // dp[f] = sum over subsets of size f of the product of their slot counts
  std::vector<std::uint64_t> dp(static_cast<std::size_t>(t) + 1, 0);
  dp[0] = 1;
  for (int i = 0; i < n; ++i) {
    for (int f = std::min(t, i + 1); f >= 1; --f) {
      dp[f] = detail::saturating_add(dp[f], detail::saturating_mul(dp[f - 1], static_cast<std::uint64_t>(slots_per_process[i])));
    }
  }
  std::uint64_t total = 0;
  for (auto v : dp) total = detail::saturating_add(total, v);
  return total;
}

/// A uniformly drawn crash count in 0..t, then distinct processes and slots.
template <class Rng>
FailurePattern sample_failure_pattern(int n, int t, std::span<const int> slots_per_process, Rng& rng) {
  FailurePattern fp;
  if (n == 0 || t == 0) return fp;
  std::uniform_int_distribution<int> count(0, t);
  const int f = count(rng);
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[i] = i + 1;
  std::shuffle(ids.begin(), ids.end(), rng);
  for (int k = 0; k < f; ++k) {
    std::uniform_int_distribution<int> slot(0, slots_per_process[ids[k] - 1] - 1);
    fp.crashes[ProcessId{ids[k]}] = CrashPoint{slot(rng)};
  }
  return fp;
}

// ---------------------------------------------------------------------------
// Delay patterns
// ---------------------------------------------------------------------------

/// Addresses the k-th item a sender communicates (k counts from 0).
struct EmissionSlot {
  ProcessId sender;
  int index = 0;
  constexpr auto operator<=>(const EmissionSlot&) const = default;
};

struct DeliveryKey {
  EmissionSlot item;
  ProcessId receiver;
  constexpr auto operator<=>(const DeliveryKey&) const = default;
};

/// Maps each (item slot, receiver) edge to the logical step at which the
/// receiver observes the item. The effective step is never earlier than the
/// item's emission step. `same_round` is the canonical pattern in which every
/// item is observed in the step it is communicated.
struct DelayPattern {
  bool same_round = false;
  std::map<DeliveryKey, int> delivery;

  std::optional<int> step_for(const DeliveryKey& k) const {
    if (same_round) return 0;
    auto it = delivery.find(k);
    if (it == delivery.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const DelayPattern&, const DelayPattern&) = default;
  friend bool operator<(const DelayPattern& a, const DelayPattern& b) {
    if (a.same_round != b.same_round) return a.same_round < b.same_round;
    return a.delivery < b.delivery;
  }
};

/// The unique same-round delivery pattern used by every synchronous run.
inline DelayPattern sync_canonical_delay() { return DelayPattern{.same_round = true, .delivery = {}}; }

/// Three-point per-edge delivery lattice: immediate, mid-horizon, horizon.
struct DelayLattice {
  int horizon = 1;

  std::array<int, 3> points() const { return {0, (horizon + 1) / 2, horizon}; }

  /// The points with duplicates removed; horizon 1 collapses to {0, 1}.
  std::vector<int> distinct() const {
    const auto p = points();
    std::vector<int> out(p.begin(), p.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

inline DelayPattern uniform_delay_pattern(std::span<const EmissionSlot> items, int n, int step) {
  DelayPattern dp;
  for (const auto& it : items)
    for (int r = 1; r <= n; ++r) dp.delivery[{it, ProcessId{r}}] = step;
  return dp;
}

inline std::uint64_t delay_lattice_size(std::size_t items, int n, int horizon = 2) {
  std::uint64_t size = 1;
  const auto edges = items * static_cast<std::size_t>(std::max(n, 0));
  const auto values = DelayLattice{horizon}.distinct().size();
  for (std::size_t i = 0; i < edges; ++i) size = detail::saturating_mul(size, values);
  return size;
}

template <class Rng>
DelayPattern sample_delay_pattern(std::span<const EmissionSlot> items, int n, int horizon, Rng& rng) {
  const auto pts = DelayLattice{horizon}.points();
  std::uniform_int_distribution<int> pick(0, 2);
  DelayPattern dp;
  for (const auto& it : items)
    for (int r = 1; r <= n; ++r) dp.delivery[{it, ProcessId{r}}] = pts[static_cast<std::size_t>(pick(rng))];
  return dp;
}

/// Representative subset of asynchronous delay patterns over the 3-point
/// lattice: the full product when it has at most `budget` elements, otherwise
/// `budget` distinct sampled patterns plus the all-immediate and all-latest
/// extremes. Every pattern delivers every edge by `horizon`.
inline std::vector<DelayPattern> enum_delay_patterns(std::span<const EmissionSlot> items, int n, int horizon,
                                                     std::uint64_t budget, std::uint64_t sampling_seed = 0) {
  if (horizon < 1) throw std::invalid_argument("delay horizon must be >= 1");
  std::vector<DeliveryKey> edges;
  for (const auto& it : items)
    for (int r = 1; r <= n; ++r) edges.push_back({it, ProcessId{r}});
  const auto pts = DelayLattice{horizon}.distinct();
  const auto size = delay_lattice_size(items.size(), n, horizon);

  std::vector<DelayPattern> out;
  if (size <= budget) {
    const int top = static_cast<int>(pts.size()) - 1;
    std::vector<int> digit(edges.size(), 0);
    while (true) {
      DelayPattern dp;
      for (std::size_t e = 0; e < edges.size(); ++e) dp.delivery[edges[e]] = pts[static_cast<std::size_t>(digit[e])];
      out.push_back(std::move(dp));
      std::size_t e = 0;
      while (e < digit.size() && digit[e] == top) digit[e++] = 0;
      if (e == digit.size()) break;
      ++digit[e];
    }
    return out;
  }

  const DelayPattern lo = uniform_delay_pattern(items, n, pts[0]);
  const DelayPattern hi = uniform_delay_pattern(items, n, pts.back());
  std::set<DelayPattern> seen{lo, hi};
  std::mt19937_64 rng(sampling_seed);
  const auto target = std::min<std::uint64_t>(budget, size - 2);
  while (out.size() < target) {
    auto dp = sample_delay_pattern(items, n, horizon, rng);
    if (seen.insert(dp).second) out.push_back(std::move(dp));
  }
  out.push_back(lo);
  out.push_back(hi);
  return out;
}

}  // namespace binsos
