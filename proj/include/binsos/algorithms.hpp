#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "output_sets.hpp"
#include "patterns.hpp"
#include "program.hpp"

namespace binsos {

enum class AlgorithmKind : std::uint8_t {
  all_output,          // communication-less, every process picks from V
  single_output,       // communication-less, one distinguished process
  timing_adaptive,     // default value v, distinguished process may flip it
  async_disagreement,  // three-partition disagreement, asynchronous
  sync_disagreement,   // two-sequence disagreement, synchronous rounds
  sync_consensus,      // one-round synchronous binary consensus
};

inline std::string to_string(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::all_output: return "all_output";
    case AlgorithmKind::single_output: return "single_output";
    case AlgorithmKind::timing_adaptive: return "timing_adaptive";
    case AlgorithmKind::async_disagreement: return "async_disagreement";
    case AlgorithmKind::sync_disagreement: return "sync_disagreement";
    case AlgorithmKind::sync_consensus: return "sync_consensus";
  }
  return "?";
}

inline AlgorithmKind parse_algorithm_kind(std::string_view s) {
  if (s == "all_output" || s == "alg3") return AlgorithmKind::all_output;
  if (s == "single_output" || s == "alg4") return AlgorithmKind::single_output;
  if (s == "timing_adaptive" || s == "alg5") return AlgorithmKind::timing_adaptive;
  if (s == "async_disagreement" || s == "alg1") return AlgorithmKind::async_disagreement;
  if (s == "sync_disagreement" || s == "alg2") return AlgorithmKind::sync_disagreement;
  if (s == "sync_consensus" || s == "alg6") return AlgorithmKind::sync_consensus;
  throw std::invalid_argument("unknown algorithm: " + std::string(s));
}

constexpr bool supports(AlgorithmKind k, Timing timing) noexcept {
  switch (k) {
    case AlgorithmKind::async_disagreement: return timing == Timing::async;
    case AlgorithmKind::sync_disagreement:
    case AlgorithmKind::sync_consensus: return timing == Timing::sync;
    default: return true;
  }
}

/// Instantiation parameters. Each kind reads only the fields it declares:
/// all_output reads `alphabet`; single_output and the disagreement kinds
/// read `no_out`; timing_adaptive reads `value` and `no_out`.
struct AlgorithmParams {
  std::vector<MaybeBit> alphabet;
  bool no_out = false;
  Bit value = Bit::one;

  friend bool operator==(const AlgorithmParams&, const AlgorithmParams&) = default;
};

struct Algorithm {
  AlgorithmKind kind = AlgorithmKind::all_output;
  AlgorithmParams params;

  static Algorithm make(AlgorithmKind kind, std::vector<MaybeBit> alphabet = {}, bool no_out = false,
                        Bit value = Bit::one) {
    Algorithm a;
    a.kind = kind;
    a.params.alphabet = std::move(alphabet);
    a.params.no_out = no_out;
    a.params.value = value;
    return a;
  }
  static Algorithm all_output(std::vector<MaybeBit> alphabet) {
    return make(AlgorithmKind::all_output, std::move(alphabet));
  }
  static Algorithm single_output(bool no_out) { return make(AlgorithmKind::single_output, {}, no_out); }
  static Algorithm timing_adaptive(Bit v, bool no_out) { return make(AlgorithmKind::timing_adaptive, {}, no_out, v); }
  static Algorithm async_disagreement(bool no_out) { return make(AlgorithmKind::async_disagreement, {}, no_out); }
  static Algorithm sync_disagreement(bool no_out) { return make(AlgorithmKind::sync_disagreement, {}, no_out); }
  static Algorithm sync_consensus() { return make(AlgorithmKind::sync_consensus); }

  /// Keeps only the fields the kind reads, with a canonical alphabet order.
  Algorithm normalized() const {
    Algorithm a = make(kind);
    switch (kind) {
      case AlgorithmKind::all_output: {
        for (MaybeBit v : {MaybeBit(Bit::zero), MaybeBit(Bit::one), MaybeBit()}) {
          if (std::find(params.alphabet.begin(), params.alphabet.end(), v) != params.alphabet.end())
            a.params.alphabet.push_back(v);
        }
        break;
      }
      case AlgorithmKind::timing_adaptive:
        a.params.value = params.value;
        a.params.no_out = params.no_out;
        break;
      case AlgorithmKind::single_output:
      case AlgorithmKind::async_disagreement:
      case AlgorithmKind::sync_disagreement: a.params.no_out = params.no_out; break;
      case AlgorithmKind::sync_consensus: break;
    }
    return a;
  }

  friend bool operator==(const Algorithm& a, const Algorithm& b) {
    const auto x = a.normalized(), y = b.normalized();
    return x.kind == y.kind && x.params == y.params;
  }
};

inline std::string describe(const Algorithm& a) {
  const auto n = a.normalized();
  std::string s = to_string(n.kind);
  switch (n.kind) {
    case AlgorithmKind::all_output: {
      s += "(V={";
      for (std::size_t i = 0; i < n.params.alphabet.size(); ++i) s += (i ? "," : "") + to_string(n.params.alphabet[i]);
      s += "})";
      break;
    }
    case AlgorithmKind::timing_adaptive:
      s += "(v=" + to_string(MaybeBit(n.params.value)) + ", no_out=" + (n.params.no_out ? "true" : "false") + ")";
      break;
    case AlgorithmKind::single_output:
    case AlgorithmKind::async_disagreement:
    case AlgorithmKind::sync_disagreement: s += std::string("(no_out=") + (n.params.no_out ? "true" : "false") + ")"; break;
    case AlgorithmKind::sync_consensus: break;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Role assignment
// ---------------------------------------------------------------------------

struct RoleAssignment {
  std::vector<ProcessId> p0, p1, undecided;  // async disagreement partitions
  std::vector<ProcessId> s0, s1;             // sync disagreement sequences, in round order
  std::vector<ProcessId> initiators;         // processes that may communicate INIT
  std::optional<ProcessId> distinguished;    // single_output / timing_adaptive

  friend bool operator==(const RoleAssignment&, const RoleAssignment&) = default;
};

namespace detail {

inline std::vector<ProcessId> id_range(int first, int count) {
  std::vector<ProcessId> out;
  for (int i = 0; i < count; ++i) out.push_back(ProcessId{first + i});
  return out;
}

inline bool contains(const std::vector<ProcessId>& v, ProcessId p) {
  return std::find(v.begin(), v.end(), p) != v.end();
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

/// Minimal partition sizes (|P0|, |P1|, |P?|) for the async disagreement algorithm.
inline std::array<int, 3> minimal_partition(int t) {
  if (t % 2 == 0) return {t / 2 + 1, t / 2, t / 2 + 1};
  return {(t - 1) / 2 + 1, (t + 1) / 2, (t - 1) / 2 + 1};
}

inline RoleAssignment partition_roles(int n, int t, std::array<int, 3> sizes) {
  RoleAssignment r;
  r.p0 = id_range(1, sizes[0]);
  r.p1 = id_range(1 + sizes[0], sizes[1]);
  r.undecided = id_range(1 + sizes[0] + sizes[1], sizes[2]);
  r.initiators = id_range(1, std::min(t + 1, n));
  return r;
}

inline RoleAssignment distinguished_roles() {
  RoleAssignment r;
  r.distinguished = ProcessId{1};
  return r;
}

inline RoleAssignment sequence_roles(int n, int t) {
  RoleAssignment r;
  for (int i = 1; i <= n; ++i) (i % 2 == 1 ? r.s1 : r.s0).push_back(ProcessId{i});
  r.initiators = id_range(1, std::min(t + 1, n));
  return r;
}

}  // namespace detail

/// The algorithm's own operating assumption on (n, t), or nullopt when met.
inline std::optional<std::string> assumption_violation(const Algorithm& a, int n, int t) {
  if (n < 0 || t < 0 || t > n) return "0 <= t <= n";
  switch (a.kind) {
    case AlgorithmKind::all_output:
      if (a.params.alphabet.empty()) return "V must be non-empty";
      return std::nullopt;
    case AlgorithmKind::single_output:
      if (n < 1) return "n >= 1";
      return std::nullopt;
    case AlgorithmKind::timing_adaptive:
      if (n < 2) return "n >= 2";
      if (!a.params.no_out && !(t < n)) return "t < n (no_out = false)";
      return std::nullopt;
    case AlgorithmKind::async_disagreement:
      if (!(2 * n > 3 * t + 2 && n >= 2)) return "n > 3/2 t + 1 (2n > 3t + 2) and n >= 2";
      return std::nullopt;
    case AlgorithmKind::sync_disagreement:
      if (!(n >= t + 2 && n >= 2)) return "n >= t + 2 and n >= 2";
      return std::nullopt;
    case AlgorithmKind::sync_consensus:
      if (!(t < n && n >= 1)) return "t < n and n >= 1";
      return std::nullopt;
  }
  return std::nullopt;
}

/// Canonical lowest-index role assignment. Throws std::invalid_argument when
/// (n, t) cannot accommodate the roles the algorithm requires.
inline RoleAssignment make_roles(AlgorithmKind kind, int n, int t) {
  detail::require(n >= 0 && t >= 0 && t <= n, "roles need 0 <= t <= n");
  switch (kind) {
    case AlgorithmKind::all_output:
    case AlgorithmKind::sync_consensus: return {};
    case AlgorithmKind::single_output:
      detail::require(n >= 1, "single_output needs n >= 1");
      return detail::distinguished_roles();
    case AlgorithmKind::timing_adaptive:
      detail::require(n >= 2, "timing_adaptive needs n >= 2");
      return detail::distinguished_roles();
    case AlgorithmKind::async_disagreement: {
      detail::require(2 * n > 3 * t + 2 && n >= 2, "async_disagreement needs 2n > 3t + 2 and n >= 2");
      auto sizes = detail::minimal_partition(t);
      sizes[0] += n - (sizes[0] + sizes[1] + sizes[2]);
      return detail::partition_roles(n, t, sizes);
    }
    case AlgorithmKind::sync_disagreement:
      detail::require(n >= t + 2 && n >= 2, "sync_disagreement needs n >= t + 2 and n >= 2");
      return detail::sequence_roles(n, t);
  }
  return {};
}

/// Role assignment that also works outside the algorithm's validity region,
/// used to run necessity constructions against the shipped algorithms. The
/// async partitions shrink P0 first, then P?, then P1, never below what n allows.
inline RoleAssignment make_roles_permissive(AlgorithmKind kind, int n, int t) {
  detail::require(n >= 0 && t >= 0 && t <= n, "roles need 0 <= t <= n");
  switch (kind) {
    case AlgorithmKind::async_disagreement: {
      auto sizes = detail::minimal_partition(t);
      int total = sizes[0] + sizes[1] + sizes[2];
      if (total <= n) {
        sizes[0] += n - total;
        return detail::partition_roles(n, t, sizes);
      }
      for (int which : {0, 2, 1}) {
        const int floor = which == 2 ? (n >= 3 ? 1 : 0) : (n >= 1 ? 1 : 0);
        while (total > n && sizes[static_cast<std::size_t>(which)] > floor) {
          --sizes[static_cast<std::size_t>(which)];
          --total;
        }
      }
      for (int which : {2, 1, 0}) {
        while (total > n && sizes[static_cast<std::size_t>(which)] > 0) {
          --sizes[static_cast<std::size_t>(which)];
          --total;
        }
      }
      return detail::partition_roles(n, t, sizes);
    }
    case AlgorithmKind::sync_disagreement: return detail::sequence_roles(n, t);
    case AlgorithmKind::single_output:
    case AlgorithmKind::timing_adaptive:
      return n >= 1 ? detail::distinguished_roles() : RoleAssignment{};
    default: return {};
  }
}

struct AlgorithmInstance {
  Algorithm algorithm;
  int n = 0;
  RoleAssignment roles;

  AlgorithmKind kind() const noexcept { return algorithm.kind; }
  const AlgorithmParams& params() const noexcept { return algorithm.params; }

  friend bool operator==(const AlgorithmInstance&, const AlgorithmInstance&) = default;
};

inline AlgorithmInstance instantiate(const Algorithm& a, int n, int t) {
  if (a.kind == AlgorithmKind::all_output && a.params.alphabet.empty())
    throw std::invalid_argument("all_output needs a non-empty V");
  return {a.normalized(), n, make_roles(a.kind, n, t)};
}

inline AlgorithmInstance instantiate_permissive(const Algorithm& a, int n, int t) {
  return {a.normalized(), n, make_roles_permissive(a.kind, n, t)};
}

/// Number of synchronous rounds the algorithm runs.
inline int round_count(const AlgorithmInstance& inst) {
  if (inst.kind() == AlgorithmKind::sync_disagreement) return std::max(1, (inst.n + 1) / 2);
  return 1;
}

// ---------------------------------------------------------------------------
// Step programs
// ---------------------------------------------------------------------------

namespace detail {

inline Statement stmt(std::string label, Action action, Guard guard = {}, std::vector<Tag> reads = {}) {
  return Statement{std::move(label), std::move(action), std::move(guard), std::move(reads)};
}

inline bool reg_is(const ProcessView& v, Reg r, Bit b) { return v.reg(r) == b; }

inline const std::vector<MaybeBit>& binary() {
  static const std::vector<MaybeBit> values{Bit::zero, Bit::one};
  return values;
}

/// "if no_out and pick({0,1}) = 0 then communicate INIT".
inline void append_initiator(Program& prog, bool no_out) {
  if (!no_out) return;
  prog.statements.push_back(stmt("init-pick", PickStmt{Reg::gate, binary()}));
  prog.statements.push_back(stmt("init-comm", CommunicateStmt{[](const ProcessView&) { return Payload::init(); }},
                                 [](const ProcessView& v) { return reg_is(v, Reg::gate, Bit::zero); }));
}

inline Program async_disagreement_program(const AlgorithmInstance& inst, ProcessId p) {
  Program prog;
  const bool no_out = inst.params().no_out;
  const auto& roles = inst.roles;
  if (contains(roles.initiators, p)) append_initiator(prog, no_out);

  const bool in0 = contains(roles.p0, p), in1 = contains(roles.p1, p);
  if (in0 || in1) {
    const Bit v = in0 ? Bit::zero : Bit::one;
    if (no_out) prog.statements.push_back(stmt("wait-init", WaitObservedStmt{Tag::init, std::nullopt}));
    prog.statements.push_back(stmt("out-v", OutputStmt{[v](const ProcessView&) { return MaybeBit(v); }}));
    prog.statements.push_back(stmt("comm-v", CommunicateStmt{[v](const ProcessView&) { return Payload::output(v); }}));
  } else if (contains(roles.undecided, p)) {
    prog.statements.push_back(stmt("wait-v", WaitObservedStmt{Tag::output, std::nullopt}));
    prog.statements.push_back(stmt(
        "first-v", AssignStmt{Reg::seen, [](const ProcessView& v) { return v.first_observed(Tag::output); }}, {},
        {Tag::output}));
    prog.statements.push_back(stmt("out-inv", OutputStmt{[](const ProcessView& v) -> MaybeBit {
                                     return complement(*v.reg(Reg::seen));
                                   }}));
  }
  return prog;
}

inline Program sync_disagreement_program(const AlgorithmInstance& inst, ProcessId p) {
  Program prog;
  const bool no_out = inst.params().no_out;
  const auto& roles = inst.roles;
  const int rounds = round_count(inst);
  if (contains(roles.initiators, p)) append_initiator(prog, no_out);

  const bool in0 = contains(roles.s0, p);
  const auto& seq = in0 ? roles.s0 : roles.s1;
  const auto pos = std::find(seq.begin(), seq.end(), p);
  if (pos == seq.end()) return prog;
  const Bit v = in0 ? Bit::zero : Bit::one;
  const int i = static_cast<int>(pos - seq.begin()) + 1;

  prog.statements.push_back(stmt("round-i", AwaitRoundStmt{i, Phase::computation}));
  prog.statements.push_back(stmt(
      "choose",
      AssignStmt{Reg::chosen,
                 [v, no_out](const ProcessView& view) -> MaybeBit {
                   if (no_out && !view.observed_any(Tag::init)) return std::nullopt;
                   return view.observed_any(Tag::output, v) ? complement(v) : v;
                 }},
      {}, {Tag::init, Tag::output}));
  prog.statements.push_back(stmt("out", OutputStmt{[](const ProcessView& view) { return view.reg(Reg::chosen); }},
                                 [](const ProcessView& view) { return view.reg(Reg::chosen).has_value(); }));
  if (i < rounds) {
    prog.statements.push_back(stmt("round-i+1", AwaitRoundStmt{i + 1, Phase::communication}));
    prog.statements.push_back(stmt(
        "comm-v", CommunicateStmt{[](const ProcessView& view) { return Payload::output(*view.reg(Reg::chosen)); }},
        [](const ProcessView& view) { return view.reg(Reg::chosen).has_value(); }));
  }
  return prog;
}

inline Program all_output_program(const AlgorithmInstance& inst) {
  Program prog;
  prog.statements.push_back(stmt("pick", PickStmt{Reg::pick, inst.params().alphabet}));
  prog.statements.push_back(stmt("out", OutputStmt{[](const ProcessView& v) { return v.reg(Reg::pick); }},
                                 [](const ProcessView& v) { return v.reg(Reg::pick).has_value(); }));
  return prog;
}

inline Program single_output_program(const AlgorithmInstance& inst, ProcessId p) {
  Program prog;
  if (inst.roles.distinguished != p) return prog;
  std::vector<MaybeBit> values{Bit::zero, Bit::one};
  if (inst.params().no_out) values.push_back(std::nullopt);
  prog.statements.push_back(stmt("pick", PickStmt{Reg::pick, std::move(values)}));
  prog.statements.push_back(stmt("out", OutputStmt{[](const ProcessView& v) { return v.reg(Reg::pick); }},
                                 [](const ProcessView& v) { return v.reg(Reg::pick).has_value(); }));
  return prog;
}

inline Program timing_adaptive_program(const AlgorithmInstance& inst, ProcessId p, Timing timing) {
  Program prog;
  const bool no_out = inst.params().no_out;
  const Bit v = inst.params().value;
  Guard pass;
  if (no_out) {
    prog.statements.push_back(stmt("gate", PickStmt{Reg::gate, binary()}));
    pass = [](const ProcessView& view) { return reg_is(view, Reg::gate, Bit::zero); };
  }
  if (inst.roles.distinguished != p) {
    prog.statements.push_back(stmt("out-v", OutputStmt{[v](const ProcessView&) { return MaybeBit(v); }}, pass));
    prog.statements.push_back(
        stmt("comm-v", CommunicateStmt{[v](const ProcessView&) { return Payload::output(v); }}, pass));
    return prog;
  }
  if (timing == Timing::sync)
    prog.statements.push_back(stmt("wait", AwaitRoundStmt{1, Phase::computation}, pass));
  else
    prog.statements.push_back(stmt("wait", AwaitDeadlineStmt{}, pass));
  prog.statements.push_back(stmt(
      "check", AssignStmt{Reg::seen, [v](const ProcessView& view) -> MaybeBit {
                            return view.observed_any(Tag::output, v) ? MaybeBit(Bit::one) : std::nullopt;
                          }},
      pass, {Tag::output}));
  prog.statements.push_back(stmt("flip", PickStmt{Reg::pick, binary()}, [pass](const ProcessView& view) {
    return (!pass || pass(view)) && view.reg(Reg::seen).has_value();
  }));
  prog.statements.push_back(stmt("out", OutputStmt{[v](const ProcessView& view) -> MaybeBit {
                                   return view.reg(Reg::seen) ? view.reg(Reg::pick) : MaybeBit(v);
                                 }},
                                 pass));
  return prog;
}

inline Program sync_consensus_program() {
  Program prog;
  prog.statements.push_back(stmt("pick", PickStmt{Reg::pick, binary()}));
  prog.statements.push_back(
      stmt("propose", CommunicateStmt{[](const ProcessView& v) { return Payload::propose(*v.reg(Reg::pick)); }}));
  prog.statements.push_back(stmt("round-1", AwaitRoundStmt{1, Phase::computation}));
  prog.statements.push_back(stmt("out", OutputStmt{[](const ProcessView& v) -> MaybeBit {
                                   return v.observed_any(Tag::propose, Bit::zero) ? Bit::zero : Bit::one;
                                 }},
                                 {}, {Tag::propose}));
  return prog;
}

}  // namespace detail

/// The guarded statement list process `p` executes under `timing`.
inline Program step_program(const AlgorithmInstance& inst, ProcessId p, Timing timing) {
  if (p.index < 1 || p.index > inst.n) throw std::out_of_range("process id outside 1..n");
  switch (inst.kind()) {
    case AlgorithmKind::all_output: return detail::all_output_program(inst);
    case AlgorithmKind::single_output: return detail::single_output_program(inst, p);
    case AlgorithmKind::timing_adaptive: return detail::timing_adaptive_program(inst, p, timing);
    case AlgorithmKind::async_disagreement: return detail::async_disagreement_program(inst, p);
    case AlgorithmKind::sync_disagreement: return detail::sync_disagreement_program(inst, p);
    case AlgorithmKind::sync_consensus: return detail::sync_consensus_program();
  }
  return {};
}

inline std::vector<Program> step_programs(const AlgorithmInstance& inst, Timing timing) {
  std::vector<Program> out;
  out.reserve(static_cast<std::size_t>(inst.n));
  for (int i = 1; i <= inst.n; ++i) out.push_back(step_program(inst, ProcessId{i}, timing));
  return out;
}

// ---------------------------------------------------------------------------
// Table sufficiency column
// ---------------------------------------------------------------------------

/// The algorithm that implements table line `line` (1..15) under `timing`.
inline Algorithm instance_for_line(int line, Timing timing) {
  using A = Algorithm;
  const MaybeBit bot;
  switch (line) {
    case 1: return A::all_output({Bit::zero, Bit::one, bot});
    case 2: return A::all_output({Bit::zero, Bit::one});
    case 3: return A::timing_adaptive(Bit::one, true);
    case 4: return A::timing_adaptive(Bit::one, false);
    case 5: return A::timing_adaptive(Bit::zero, true);
    case 6: return A::timing_adaptive(Bit::zero, false);
    case 7: return timing == Timing::async ? A::async_disagreement(true) : A::sync_disagreement(true);
    case 8: return timing == Timing::async ? A::async_disagreement(false) : A::sync_disagreement(false);
    case 9: return A::single_output(true);
    case 10: return timing == Timing::async ? A::single_output(false) : A::sync_consensus();
    case 11: return A::all_output({Bit::one, bot});
    case 12: return A::all_output({Bit::one});
    case 13: return A::all_output({Bit::zero, bot});
    case 14: return A::all_output({Bit::zero});
    case 15: return A::all_output({bot});
    case 16: throw std::invalid_argument("line 16 (no output set) has no implementing algorithm");
    default: throw std::out_of_range("table line must be in 1..16");
  }
}

/// Set of output sets the algorithm's correctness theorem claims for (n, t),
/// or nullopt when (n, t) lies outside the theorem's hypotheses.
inline std::optional<SetOfOutputSets> claimed_output_sets(const Algorithm& a, int n, int t) {
  if (n < 0 || t < 0 || t > n) return std::nullopt;
  const auto& prm = a.params;
  switch (a.kind) {
    case AlgorithmKind::all_output: {
      const bool has_bot = std::find(prm.alphabet.begin(), prm.alphabet.end(), MaybeBit()) != prm.alphabet.end();
      if (prm.alphabet.empty() || (!has_bot && !(t < n))) return std::nullopt;
      unsigned values = 0;
      for (auto v : prm.alphabet)
        if (v) values |= (*v == Bit::zero) ? 1u : 2u;
      SetOfOutputSets o;
      for (auto s : kAllOutputSets) {
        const auto bits = static_cast<unsigned>(s);
        if ((bits & ~values) == 0 && cardinality(s) <= n) o.insert(s);
      }
      if (!has_bot) o = o - SetOfOutputSets{OutputSet::empty};
      return o;
    }
    case AlgorithmKind::single_output:
      if (n < 1) return std::nullopt;
      if (prm.no_out) return SetOfOutputSets{OutputSet::empty, OutputSet::zero, OutputSet::one};
      if (t == 0) return SetOfOutputSets{OutputSet::zero, OutputSet::one};
      return std::nullopt;
    case AlgorithmKind::timing_adaptive: {
      if (n < 2) return std::nullopt;
      SetOfOutputSets o{singleton(prm.value), OutputSet::both};
      if (prm.no_out) return o | SetOfOutputSets{OutputSet::empty};
      if (t < n) return o;
      return std::nullopt;
    }
    case AlgorithmKind::async_disagreement:
    case AlgorithmKind::sync_disagreement: {
      if (assumption_violation(a, n, t)) return std::nullopt;
      SetOfOutputSets o{OutputSet::both};
      if (prm.no_out) o.insert(OutputSet::empty);
      return o;
    }
    case AlgorithmKind::sync_consensus:
      if (assumption_violation(a, n, t)) return std::nullopt;
      return SetOfOutputSets{OutputSet::zero, OutputSet::one};
  }
  return std::nullopt;
}

}  // namespace binsos
