#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "algorithms.hpp"
#include "output_sets.hpp"
#include "patterns.hpp"
#include "program.hpp"

namespace binsos {

// ---------------------------------------------------------------------------
// Choice and delay sources
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Resolves pseudo-random picks. `counter` numbers the picks of one process.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  virtual int choose(ProcessId p, int counter, int arity) = 0;
};

/// Counter-based stream: pick k of process p depends only on (seed, p, k).
class SeededChoice final : public ChoiceSource {
 public:
  explicit SeededChoice(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t seed() const noexcept { return seed_; }

  int choose(ProcessId p, int counter, int arity) override {
    const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.index)) << 32) |
                     static_cast<std::uint32_t>(counter);
    return static_cast<int>(splitmix64(seed_ ^ splitmix64(key)) % static_cast<std::uint64_t>(arity));
  }

 private:
  std::uint64_t seed_;
};

/// Explicit pick indices per process. Strict scripts reject missing or
/// out-of-range entries; lenient ones fall back to index 0.
class ScriptedChoice final : public ChoiceSource {
 public:
  explicit ScriptedChoice(std::map<int, std::vector<int>> script, bool strict = true)
      : script_(std::move(script)), strict_(strict) {}

  int choose(ProcessId p, int counter, int arity) override {
    auto it = script_.find(p.index);
    if (it != script_.end() && counter < static_cast<int>(it->second.size())) {
      const int c = it->second[static_cast<std::size_t>(counter)];
      if (c >= 0 && c < arity) return c;
      if (strict_) throw std::invalid_argument("scripted pick out of range for " + to_string(p));
      return 0;
    }
    if (strict_) throw std::invalid_argument("scripted picks exhausted for " + to_string(p));
    return 0;
  }

 private:
  std::map<int, std::vector<int>> script_;
  bool strict_;
};

/// What the kernel knows about an edge when it asks for its delivery step.
struct EdgeInfo {
  bool relevant = true;        // false: the receiver is done, crashed, or never reads this tag again
  bool sender_output = false;  // the sender had already output when it emitted the item
};

/// Resolves the delivery step of one (item, receiver) edge at emission time.
class DelaySource {
 public:
  virtual ~DelaySource() = default;
  virtual int step_for(const DeliveryKey& key, const InfoItem& item, const EdgeInfo& info) = 0;
};

/// Looks edges up in an explicit pattern. Missing edges are an error unless a
/// fallback step is given.
class PatternDelay final : public DelaySource {
 public:
  explicit PatternDelay(const DelayPattern& dp, std::optional<int> fallback = std::nullopt)
      : dp_(dp), fallback_(fallback) {}

  int step_for(const DeliveryKey& key, const InfoItem& item, const EdgeInfo&) override {
    if (auto s = dp_.step_for(key)) return *s;
    if (fallback_) return *fallback_;
    throw std::invalid_argument("delay pattern omits delivery of item " + std::to_string(item.id) + " from " +
                                to_string(key.item.sender) + " to " + to_string(key.receiver));
  }

 private:
  const DelayPattern& dp_;
  std::optional<int> fallback_;
};

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

enum class Termination : std::uint8_t { all_done, quiescent, horizon };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::all_done: return "ALL_DONE";
    case Termination::quiescent: return "QUIESCENT";
    case Termination::horizon: return "HORIZON";
  }
  return "?";
}

inline Termination parse_termination(std::string_view s) {
  if (s == "ALL_DONE") return Termination::all_done;
  if (s == "QUIESCENT") return Termination::quiescent;
  if (s == "HORIZON") return Termination::horizon;
  throw std::invalid_argument("unknown termination reason: " + std::string(s));
}

enum class ProcStatus : std::uint8_t { running, blocked, done, crashed };

inline std::string to_string(ProcStatus s) {
  switch (s) {
    case ProcStatus::running: return "RUNNING";
    case ProcStatus::blocked: return "BLOCKED";
    case ProcStatus::done: return "DONE";
    case ProcStatus::crashed: return "CRASHED";
  }
  return "?";
}

inline ProcStatus parse_proc_status(std::string_view s) {
  if (s == "RUNNING") return ProcStatus::running;
  if (s == "BLOCKED") return ProcStatus::blocked;
  if (s == "DONE") return ProcStatus::done;
  if (s == "CRASHED") return ProcStatus::crashed;
  throw std::invalid_argument("unknown process status: " + std::string(s));
}

enum class EventKind : std::uint8_t { pick, communicate, observe, output, crash, deadline, done };

inline std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::pick: return "pick";
    case EventKind::communicate: return "communicate";
    case EventKind::observe: return "observe";
    case EventKind::output: return "output";
    case EventKind::crash: return "crash";
    case EventKind::deadline: return "deadline";
    case EventKind::done: return "done";
  }
  return "?";
}

inline EventKind parse_event_kind(std::string_view s) {
  for (auto k : {EventKind::pick, EventKind::communicate, EventKind::observe, EventKind::output, EventKind::crash,
                 EventKind::deadline, EventKind::done})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown event kind: " + std::string(s));
}

struct Event {
  int seq = 0;
  int time = 0;
  ProcessId pid;
  EventKind kind = EventKind::done;
  int item = -1;   // communicate / observe
  MaybeBit value;  // pick / output

  friend bool operator==(const Event&, const Event&) = default;
};

/// Everything needed to reproduce an execution. Picks and delays are stored
/// as materialized during the run; `seed` is kept when picks came from a
/// seeded stream.
struct TraceHeader {
  AlgorithmInstance instance;
  SystemConfig cfg;
  std::optional<std::uint64_t> seed;
  std::map<int, std::vector<int>> picks;
  FailurePattern fp;
  DelayPattern dp;
  int horizon = 0;
  int deadline = 0;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct ExecutionTrace {
  TraceHeader header;
  std::vector<InfoItem> items;
  std::vector<Event> events;
  OutputVector outputs;
  std::vector<ProcStatus> status;
  Termination termination = Termination::all_done;
  int end_time = 0;

  OutputSet output_set() const { return binsos::output_set(outputs); }
  bool complete() const noexcept { return termination != Termination::horizon; }

  friend bool operator==(const ExecutionTrace&, const ExecutionTrace&) = default;
};

struct RunOptions {
  int horizon = 0;   // async step bound H; 0 selects 4n
  int deadline = 0;  // async local deadline D; 0 selects H
  std::uint64_t max_statements = 1'000'000;
};

inline int default_horizon(int n) { return std::max(1, 4 * n); }

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

namespace detail {

enum class Wait : std::uint8_t { none, observed, round, deadline };

struct Proc {
  const Program* prog = nullptr;
  int pc = 0;
  ProcStatus status = ProcStatus::running;
  Wait wait = Wait::none;
  Registers regs{};
  std::vector<const InfoItem*> observed;
  MaybeBit output;
  int emitted = 0;
  int picks = 0;
  std::optional<int> crash_slot;
};

struct Pending {
  int eff = 0;
  int item = 0;
  int receiver = 0;
};

inline int phase_rank(int round, Phase ph) { return 2 * (round - 1) + (ph == Phase::computation ? 1 : 0); }

}  // namespace detail

/// Sequential interpreter for one algorithm instance under one configuration.
/// Construction compiles the step programs once; run() may be called many
/// times and from several threads, each run owning its own state.
class Kernel {
 public:
  Kernel(AlgorithmInstance inst, SystemConfig cfg, RunOptions opts = {})
      : inst_(std::move(inst)), cfg_(cfg), opts_(opts) {
    cfg_.validate();
    if (inst_.n != cfg_.n) throw std::invalid_argument("instance was built for a different n");
    if (!supports(inst_.kind(), cfg_.timing))
      throw std::invalid_argument(to_string(inst_.kind()) + " does not run under " + to_string(cfg_.timing));
    horizon_ = opts_.horizon > 0 ? opts_.horizon : default_horizon(cfg_.n);
    deadline_ = opts_.deadline > 0 ? opts_.deadline : horizon_;
    if (deadline_ > horizon_) throw std::invalid_argument("deadline must not exceed the horizon");
    programs_ = step_programs(inst_, cfg_.timing);
    rounds_ = round_count(inst_);
    for (const auto& prog : programs_) {
      std::array<int, 3> last{-1, -1, -1};
      for (int i = 0; i < prog.size(); ++i) {
        const auto& st = prog.statements[static_cast<std::size_t>(i)];
        if (const auto* w = std::get_if<WaitObservedStmt>(&st.action)) last[static_cast<std::size_t>(w->tag)] = i;
        for (auto tag : st.reads) last[static_cast<std::size_t>(tag)] = i;
      }
      last_read_.push_back(last);
    }
  }

  const AlgorithmInstance& instance() const noexcept { return inst_; }
  const SystemConfig& config() const noexcept { return cfg_; }
  const std::vector<Program>& programs() const noexcept { return programs_; }
  int horizon() const noexcept { return horizon_; }
  int deadline() const noexcept { return deadline_; }
  int rounds() const noexcept { return rounds_; }

  std::vector<int> crash_slots() const {
    std::vector<int> out;
    for (const auto& p : programs_) out.push_back(p.crash_slots());
    return out;
  }

  /// Every (sender, k) slot any run could emit from.
  std::vector<EmissionSlot> emission_slots() const {
    std::vector<EmissionSlot> out;
    for (int i = 0; i < cfg_.n; ++i)
      for (int k = 0; k < programs_[static_cast<std::size_t>(i)].communicate_count(); ++k)
        out.push_back({ProcessId{i + 1}, k});
    return out;
  }

  void validate(const FailurePattern& fp) const {
    if (fp.faulty_count() > cfg_.t)
      throw std::invalid_argument("failure pattern crashes " + std::to_string(fp.faulty_count()) +
                                  " processes but t = " + std::to_string(cfg_.t));
    for (const auto& [p, c] : fp.crashes) {
      if (p.index < 1 || p.index > cfg_.n) throw std::invalid_argument("failure pattern names unknown " + to_string(p));
      const int size = programs_[static_cast<std::size_t>(p.index - 1)].size();
      if (c.slot < 0 || c.slot > size)
        throw std::invalid_argument("crash slot " + std::to_string(c.slot) + " outside 0.." + std::to_string(size) +
                                    " for " + to_string(p));
    }
  }

  void validate(const DelayPattern& dp) const {
    if (dp.same_round) return;
    for (const auto& [key, step] : dp.delivery) {
      const int s = key.item.sender.index, r = key.receiver.index;
      if (s < 1 || s > cfg_.n || r < 1 || r > cfg_.n)
        throw std::invalid_argument("delay pattern names a process outside 1..n");
      if (key.item.index < 0 || key.item.index >= programs_[static_cast<std::size_t>(s - 1)].communicate_count())
        throw std::invalid_argument("delay pattern delivers item " + std::to_string(key.item.index) + " of " +
                                    to_string(key.item.sender) + ", which its program never emits");
      if (step < 0 || step > horizon_)
        throw std::invalid_argument("delay step " + std::to_string(step) + " outside 0..H");
    }
  }

  /// Runs one execution. `delays` is required for asynchronous runs and
  /// ignored for synchronous ones. With `record` off the event log and the
  /// materialized header maps are skipped.
  ExecutionTrace run(ChoiceSource& choices, const FailurePattern& fp, DelaySource* delays = nullptr,
                     bool record = true) const {
    validate(fp);
    if (cfg_.timing == Timing::async && delays == nullptr)
      throw std::invalid_argument("asynchronous runs need a delay source");
    Exec ex(*this, choices, delays, record);
    ex.trace.header.fp = fp;
    for (const auto& [p, c] : fp.crashes) ex.procs[static_cast<std::size_t>(p.index - 1)].crash_slot = c.slot;
    if (cfg_.timing == Timing::sync)
      ex.run_sync();
    else
      ex.run_async();
    return std::move(ex.trace);
  }

 private:
  struct Exec {
    const Kernel& k;
    ChoiceSource& choices;
    DelaySource* delays;
    bool record;
    ExecutionTrace trace;
    std::vector<detail::Proc> procs;
    std::vector<detail::Pending> pending;
    int now = 0;
    int round = 1;
    Phase phase = Phase::communication;
    std::uint64_t executed = 0;
    bool over_cap = false;

    Exec(const Kernel& kernel, ChoiceSource& c, DelaySource* d, bool rec)
        : k(kernel), choices(c), delays(d), record(rec) {
      const int n = k.cfg_.n;
      procs.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) procs[static_cast<std::size_t>(i)].prog = &k.programs_[static_cast<std::size_t>(i)];
      trace.header.instance = k.inst_;
      trace.header.cfg = k.cfg_;
      trace.header.horizon = k.cfg_.timing == Timing::async ? k.horizon_ : 0;
      trace.header.deadline = k.cfg_.timing == Timing::async ? k.deadline_ : 0;
      if (k.cfg_.timing == Timing::sync) trace.header.dp = sync_canonical_delay();
      if (auto* s = dynamic_cast<SeededChoice*>(&choices)) trace.header.seed = s->seed();
      trace.items.reserve(16);
    }

    void log(ProcessId p, EventKind kind, int item = -1, MaybeBit value = std::nullopt) {
      if (!record) return;
      trace.events.push_back(Event{static_cast<int>(trace.events.size()), now, p, kind, item, value});
    }

    ProcessView view(int i) const {
      const auto& pr = procs[static_cast<std::size_t>(i)];
      return ProcessView(ProcessId{i + 1}, pr.regs, pr.observed);
    }

    bool relevant(int receiver, Tag tag) const {
      const auto& pr = procs[static_cast<std::size_t>(receiver - 1)];
      if (pr.status == ProcStatus::crashed || pr.status == ProcStatus::done) return false;
      return pr.pc <= k.last_read_[static_cast<std::size_t>(receiver - 1)][static_cast<std::size_t>(tag)];
    }

    void emit(int i, const Payload& payload) {
      auto& pr = procs[static_cast<std::size_t>(i)];
      const int id = static_cast<int>(trace.items.size());
      const EmissionSlot slot{ProcessId{i + 1}, pr.emitted++};
      trace.items.push_back(InfoItem{id, slot, payload, now});
      log(ProcessId{i + 1}, EventKind::communicate, id);
      const InfoItem& item = trace.items.back();
      for (int r = 1; r <= k.cfg_.n; ++r) {
        int eff = now;
        if (k.cfg_.timing == Timing::async) {
          const DeliveryKey key{slot, ProcessId{r}};
          const EdgeInfo info{relevant(r, payload.tag), pr.output.has_value()};
          const int step = delays->step_for(key, item, info);
          if (step < 0 || step > k.horizon_)
            throw std::invalid_argument("delay step " + std::to_string(step) + " outside 0..H");
          if (record) trace.header.dp.delivery[key] = step;
          eff = std::max(step, now);
        }
        pending.push_back({eff, id, r});
      }
    }

    bool wait_satisfied(int i) const {
      const auto& pr = procs[static_cast<std::size_t>(i)];
      const auto& st = pr.prog->statements[static_cast<std::size_t>(pr.pc)];
      if (const auto* w = std::get_if<WaitObservedStmt>(&st.action)) {
        for (const auto* it : pr.observed)
          if (w->satisfied_by(it->payload)) return true;
        return false;
      }
      if (const auto* a = std::get_if<AwaitRoundStmt>(&st.action))
        return detail::phase_rank(round, phase) >= detail::phase_rank(a->round, a->phase);
      if (std::holds_alternative<AwaitDeadlineStmt>(st.action)) return now >= k.deadline_;
      return true;
    }

    /// Runs process i until it blocks, finishes or crashes.
    void advance(int i) {
      auto& pr = procs[static_cast<std::size_t>(i)];
      const ProcessId pid{i + 1};
      while (pr.status == ProcStatus::running) {
        if (++executed > k.opts_.max_statements) {
          over_cap = true;
          return;
        }
        if (pr.crash_slot && pr.pc == *pr.crash_slot) {
          pr.status = ProcStatus::crashed;
          log(pid, EventKind::crash);
          return;
        }
        if (pr.pc == pr.prog->size()) {
          pr.status = ProcStatus::done;
          log(pid, EventKind::done);
          return;
        }
        const auto& st = pr.prog->statements[static_cast<std::size_t>(pr.pc)];
        const ProcessView v = view(i);
        if (!st.enabled(v)) {
          ++pr.pc;
          continue;
        }
        std::visit(
            [&](const auto& a) {
              using T = std::decay_t<decltype(a)>;
              if constexpr (std::is_same_v<T, PickStmt>) {
                const int arity = static_cast<int>(a.candidates.size());
                const int counter = pr.picks++;
                const int c = choices.choose(pid, counter, arity);
                if (c < 0 || c >= arity) throw std::logic_error("choice source returned an out-of-range index");
                if (record && !trace.header.seed) trace.header.picks[pid.index].push_back(c);
                pr.regs[static_cast<std::size_t>(a.target)] = a.candidates[static_cast<std::size_t>(c)];
                log(pid, EventKind::pick, -1, a.candidates[static_cast<std::size_t>(c)]);
                ++pr.pc;
              } else if constexpr (std::is_same_v<T, AssignStmt>) {
                pr.regs[static_cast<std::size_t>(a.target)] = a.value(v);
                ++pr.pc;
              } else if constexpr (std::is_same_v<T, CommunicateStmt>) {
                if (k.cfg_.timing == Timing::sync && phase == Phase::computation)
                  throw std::logic_error(to_string(pid) + " communicates during a computation step");
                emit(i, a.payload(v));
                ++pr.pc;
              } else if constexpr (std::is_same_v<T, OutputStmt>) {
                if (const MaybeBit out = a.value(v)) {
                  if (pr.output) throw std::logic_error(to_string(pid) + " outputs twice");
                  pr.output = out;
                  log(pid, EventKind::output, -1, out);
                }
                ++pr.pc;
              } else {
                if constexpr (std::is_same_v<T, AwaitRoundStmt>) {
                  if (k.cfg_.timing != Timing::sync) throw std::logic_error("round wait in an asynchronous run");
                  pr.wait = detail::Wait::round;
                } else if constexpr (std::is_same_v<T, AwaitDeadlineStmt>) {
                  if (k.cfg_.timing != Timing::async) throw std::logic_error("deadline wait in a synchronous run");
                  pr.wait = detail::Wait::deadline;
                } else {
                  pr.wait = detail::Wait::observed;
                }
                if (wait_satisfied(i)) {
                  pr.wait = detail::Wait::none;
                  ++pr.pc;
                } else {
                  pr.status = ProcStatus::blocked;
                }
              }
            },
            st.action);
      }
    }

    bool run_all() {
      bool ran = false;
      for (int i = 0; i < k.cfg_.n && !over_cap; ++i) {
        if (procs[static_cast<std::size_t>(i)].status == ProcStatus::running) {
          advance(i);
          ran = true;
        }
      }
      return ran;
    }

    /// Delivers every pending edge due by `now`, ordered by (sender, payload
    /// bit, item id, receiver).
    bool deliver_due() {
      std::vector<detail::Pending> due;
      std::erase_if(pending, [&](const detail::Pending& d) {
        if (d.eff > now) return false;
        due.push_back(d);
        return true;
      });
      if (due.empty()) return false;
      auto key = [&](const detail::Pending& d) {
        const auto& it = trace.items[static_cast<std::size_t>(d.item)];
        const int bit = it.payload.value ? to_int(*it.payload.value) : -1;
        return std::make_tuple(it.sender().index, bit, d.item, d.receiver);
      };
      std::sort(due.begin(), due.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
      for (const auto& d : due) {
        auto& pr = procs[static_cast<std::size_t>(d.receiver - 1)];
        if (pr.status == ProcStatus::crashed) continue;
        pr.observed.push_back(&trace.items[static_cast<std::size_t>(d.item)]);
        log(ProcessId{d.receiver}, EventKind::observe, d.item);
        if (pr.status == ProcStatus::blocked && pr.wait == detail::Wait::observed && wait_satisfied(d.receiver - 1)) {
          pr.status = ProcStatus::running;
          pr.wait = detail::Wait::none;
          ++pr.pc;
        }
      }
      return true;
    }

    void wake(detail::Wait kind, bool log_deadline) {
      for (int i = 0; i < k.cfg_.n; ++i) {
        auto& pr = procs[static_cast<std::size_t>(i)];
        if (pr.status == ProcStatus::blocked && pr.wait == kind && wait_satisfied(i)) {
          if (log_deadline) log(ProcessId{i + 1}, EventKind::deadline);
          pr.status = ProcStatus::running;
          pr.wait = detail::Wait::none;
          ++pr.pc;
        }
      }
    }

    bool all_done() const {
      return std::all_of(procs.begin(), procs.end(), [](const detail::Proc& p) {
        return p.status == ProcStatus::done || p.status == ProcStatus::crashed;
      });
    }

    void finish(Termination why) {
      trace.termination = why;
      trace.end_time = now;
      for (const auto& p : procs) {
        trace.outputs.push_back(p.output);
        trace.status.push_back(p.status);
      }
    }

    // Write into a fixed-capacity store so observed pointers stay valid.
    void reserve_items() {
      std::size_t cap = 0;
      for (const auto& p : k.programs_) cap += static_cast<std::size_t>(p.communicate_count());
      trace.items.reserve(cap);
    }

    void run_async() {
      reserve_items();
      for (now = 0; now <= k.horizon_; ++now) {
        wake(detail::Wait::deadline, true);
        while (true) {
          bool progressed = run_all();
          if (over_cap) return finish(Termination::horizon);
          progressed = deliver_due() || progressed;
          if (!progressed) break;
        }
        // finished processes still observe what is in flight
        if (all_done() && pending.empty()) return finish(Termination::all_done);
        const bool timers = std::any_of(procs.begin(), procs.end(), [&](const detail::Proc& p) {
          return p.status == ProcStatus::blocked && p.wait == detail::Wait::deadline;
        });
        if (pending.empty() && !timers) return finish(Termination::quiescent);
      }
      now = k.horizon_;
      finish(Termination::horizon);
    }

    void run_sync() {
      reserve_items();
      for (round = 1; round <= k.rounds_; ++round) {
        phase = Phase::communication;
        now = detail::phase_rank(round, phase);
        wake(detail::Wait::round, false);
        run_all();
        if (over_cap) return finish(Termination::horizon);
        deliver_due();
        phase = Phase::computation;
        now = detail::phase_rank(round, phase);
        wake(detail::Wait::round, false);
        while (run_all()) {
          if (over_cap) return finish(Termination::horizon);
        }
      }
      now = detail::phase_rank(k.rounds_, Phase::computation);
      finish(all_done() ? Termination::all_done : Termination::quiescent);
    }
  };

  AlgorithmInstance inst_;
  SystemConfig cfg_;
  RunOptions opts_;
  int horizon_ = 1;
  int deadline_ = 1;
  int rounds_ = 1;
  std::vector<Program> programs_;
  std::vector<std::array<int, 3>> last_read_;
};

// ---------------------------------------------------------------------------
// Convenience entry points
// ---------------------------------------------------------------------------

inline ExecutionTrace run_sync(const AlgorithmInstance& inst, const SystemConfig& cfg, std::uint64_t seed,
                               const FailurePattern& fp) {
  if (cfg.timing != Timing::sync) throw std::invalid_argument("run_sync needs a synchronous configuration");
  SeededChoice choices(seed);
  return Kernel(inst, cfg).run(choices, fp);
}

inline ExecutionTrace run_async(const AlgorithmInstance& inst, const SystemConfig& cfg, std::uint64_t seed,
                                const FailurePattern& fp, const DelayPattern& dp, RunOptions opts = {}) {
  if (cfg.timing != Timing::async) throw std::invalid_argument("run_async needs an asynchronous configuration");
  Kernel kernel(inst, cfg, opts);
  kernel.validate(dp);
  SeededChoice choices(seed);
  PatternDelay delays(dp);
  return kernel.run(choices, fp, &delays);
}

/// Re-executes a trace from its header alone.
inline ExecutionTrace replay(const TraceHeader& h) {
  Kernel kernel(h.instance, h.cfg, RunOptions{.horizon = h.horizon, .deadline = h.deadline});
  std::unique_ptr<ChoiceSource> choices;
  if (h.seed)
    choices = std::make_unique<SeededChoice>(*h.seed);
  else
    choices = std::make_unique<ScriptedChoice>(h.picks, true);
  if (h.cfg.timing == Timing::sync) return kernel.run(*choices, h.fp);
  kernel.validate(h.dp);
  PatternDelay delays(h.dp);
  return kernel.run(*choices, h.fp, &delays);
}

// ---------------------------------------------------------------------------
// Medium audit
// ---------------------------------------------------------------------------

enum class MediumProperty : std::uint8_t { validity, local_termination, global_termination, synchrony };

inline std::string to_string(MediumProperty p) {
  switch (p) {
    case MediumProperty::validity: return "C-Validity";
    case MediumProperty::local_termination: return "C-Local-Termination";
    case MediumProperty::global_termination: return "C-Global-Termination";
    case MediumProperty::synchrony: return "C-Synchrony";
  }
  return "?";
}

struct MediumViolation {
  MediumProperty property;
  std::string detail;
};

/// Scans the event log for violations of the medium's properties. Only the
/// header and the events are consulted; a process is correct when the
/// failure pattern spares it and it never logs a crash.
inline std::vector<MediumViolation> medium_check(const ExecutionTrace& trace) {
  std::vector<MediumViolation> out;
  const int n = trace.header.cfg.n;
  std::vector<bool> correct(static_cast<std::size_t>(n) + 1, true);
  for (const auto& [p, c] : trace.header.fp.crashes)
    if (p.index >= 1 && p.index <= n) correct[static_cast<std::size_t>(p.index)] = false;
  for (const auto& e : trace.events)
    if (e.kind == EventKind::crash && e.pid.index >= 1 && e.pid.index <= n) correct[static_cast<std::size_t>(e.pid.index)] = false;

  struct Emission {
    int seq, time;
    ProcessId sender;
  };
  std::map<int, Emission> emitted;
  std::map<int, std::vector<std::pair<ProcessId, int>>> seen;  // item -> (receiver, time)
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::communicate) {
      if (emitted.contains(e.item))
        out.push_back({MediumProperty::validity, "item " + std::to_string(e.item) + " communicated twice"});
      emitted[e.item] = {e.seq, e.time, e.pid};
    } else if (e.kind == EventKind::observe) {
      auto it = emitted.find(e.item);
      if (it == emitted.end() || it->second.seq > e.seq) {
        out.push_back({MediumProperty::validity, to_string(e.pid) + " observes item " + std::to_string(e.item) +
                                                     " that was not previously communicated"});
        continue;
      }
      auto& obs = seen[e.item];
      if (std::any_of(obs.begin(), obs.end(), [&](const auto& o) { return o.first == e.pid; }))
        out.push_back({MediumProperty::validity, to_string(e.pid) + " observes item " + std::to_string(e.item) + " twice"});
      obs.emplace_back(e.pid, e.time);
      if (trace.header.cfg.timing == Timing::sync && (e.time != it->second.time || e.time % 2 != 0))
        out.push_back({MediumProperty::synchrony, "item " + std::to_string(e.item) + " communicated at time " +
                                                      std::to_string(it->second.time) + " observed by " +
                                                      to_string(e.pid) + " at time " + std::to_string(e.time)});
    }
  }
  if (!trace.complete()) return out;

  const bool any_correct = std::any_of(correct.begin() + 1, correct.end(), [](bool b) { return b; });
  for (const auto& [item, em] : emitted) {
    const auto& obs = seen[item];
    auto observed_by = [&](int r) {
      return std::any_of(obs.begin(), obs.end(), [&](const auto& o) { return o.first.index == r; });
    };
    if (correct[static_cast<std::size_t>(em.sender.index)] && any_correct) {
      bool some = false;
      for (int r = 1; r <= n; ++r) some = some || (correct[static_cast<std::size_t>(r)] && observed_by(r));
      if (!some)
        out.push_back({MediumProperty::local_termination,
                       "item " + std::to_string(item) + " of correct " + to_string(em.sender) + " reached no correct process"});
    }
    if (!obs.empty()) {
      for (int r = 1; r <= n; ++r)
        if (correct[static_cast<std::size_t>(r)] && !observed_by(r))
          out.push_back({MediumProperty::global_termination,
                         "item " + std::to_string(item) + " observed by some process but not by correct " +
                             to_string(ProcessId{r})});
    }
  }
  return out;
}

}  // namespace binsos
