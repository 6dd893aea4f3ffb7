#pragma once

// Brute-force reference interpreter. Each algorithm is re-encoded as a small
// local state machine and every interleaving of process steps, single
// deliveries, crashes (anywhere, up to t) and deadline firings is explored
// with state memoization. No delay lattice, no guarded-program interpreter.

#include <set>
#include <string>
#include <vector>

#include <binsos/algorithms.hpp>
#include <binsos/output_sets.hpp>

namespace oracle {

using binsos::AlgorithmInstance;
using binsos::AlgorithmKind;
using binsos::SetOfOutputSets;
using binsos::SystemConfig;
using binsos::Timing;

enum : int { INIT = 0, OUTPUT = 1, PROPOSE = 2 };

struct Item {
  int sender, tag, value;  // value -1 for INIT
};

struct Local {
  int pc = 0;
  int gate = -1, pick = -1, chosen = -1, seen_flag = -1;  // -1 = unset / bottom
  int output = -1;
  bool crashed = false, done = false, timer = false;
  std::vector<int> seen;  // item ids, observation order
};

struct State {
  std::vector<Local> ps;
  std::vector<Item> items;
  std::vector<std::pair<int, int>> pending;  // (item, receiver)
  int crashes = 0;
  int rank = 0;  // sync only: 2*(round-1) + phase
  bool finished = false;
};

class Oracle {
 public:
  Oracle(const AlgorithmInstance& inst, const SystemConfig& cfg) : inst_(inst), cfg_(cfg) {
    n_ = cfg.n;
    rounds_ = inst.kind() == AlgorithmKind::sync_disagreement ? std::max(1, (n_ + 1) / 2) : 1;
    role_.assign(static_cast<std::size_t>(n_), 'x');
    init_.assign(static_cast<std::size_t>(n_), false);
    seq_.assign(static_cast<std::size_t>(n_), 0);
    for (auto p : inst.roles.p0) role_[idx(p)] = '0';
    for (auto p : inst.roles.p1) role_[idx(p)] = '1';
    for (auto p : inst.roles.undecided) role_[idx(p)] = '?';
    for (auto p : inst.roles.initiators) init_[idx(p)] = true;
    for (std::size_t i = 0; i < inst.roles.s0.size(); ++i) {
      role_[idx(inst.roles.s0[i])] = '0';
      seq_[idx(inst.roles.s0[i])] = static_cast<int>(i) + 1;
    }
    for (std::size_t i = 0; i < inst.roles.s1.size(); ++i) {
      role_[idx(inst.roles.s1[i])] = '1';
      seq_[idx(inst.roles.s1[i])] = static_cast<int>(i) + 1;
    }
  }

  SetOfOutputSets observed() {
    State s;
    s.ps.resize(static_cast<std::size_t>(n_));
    dfs(s);
    return result_;
  }

  std::size_t states() const { return visited_.size(); }

 private:
  static std::size_t idx(binsos::ProcessId p) { return static_cast<std::size_t>(p.index - 1); }
  bool sync() const { return cfg_.timing == Timing::sync; }
  const binsos::AlgorithmParams& prm() const { return inst_.params(); }
  bool distinguished(int p) const { return inst_.roles.distinguished && inst_.roles.distinguished->index == p + 1; }

  bool saw(const State& s, int p, int tag, int value = -2) const {
    for (int id : s.ps[static_cast<std::size_t>(p)].seen) {
      const auto& it = s.items[static_cast<std::size_t>(id)];
      if (it.tag == tag && (value == -2 || it.value == value)) return true;
    }
    return false;
  }
  int first(const State& s, int p, int tag) const {
    for (int id : s.ps[static_cast<std::size_t>(p)].seen) {
      const auto& it = s.items[static_cast<std::size_t>(id)];
      if (it.tag == tag) return it.value;
    }
    return -1;
  }
  void emit(State& s, int p, int tag, int value) const {
    const int id = static_cast<int>(s.items.size());
    s.items.push_back({p, tag, value});
    for (int r = 0; r < n_; ++r) s.pending.emplace_back(id, r);
  }
  static void out(Local& l, int v) {
    if (v >= 0) l.output = v;
  }

  /// One atomic action of process p. Returns the successor states (several
  /// for picks); an empty result means p cannot act now.
  std::vector<State> act(const State& s, int p) const {
    const Local& l0 = s.ps[static_cast<std::size_t>(p)];
    if (l0.crashed || l0.done) return {};
    std::vector<State> next;
    auto fork = [&]() -> State& {
      next.push_back(s);
      return next.back();
    };
    auto L = [&](State& st) -> Local& { return st.ps[static_cast<std::size_t>(p)]; };
    const int rank = s.rank;

    switch (inst_.kind()) {
      case AlgorithmKind::all_output: {
        if (l0.pc == 0) {
          for (auto v : prm().alphabet) {
            auto& st = fork();
            L(st).pick = v ? binsos::to_int(*v) : -1;
            L(st).pc = 1;
          }
        } else {
          auto& st = fork();
          out(L(st), L(st).pick);
          L(st).done = true;
        }
        break;
      }
      case AlgorithmKind::single_output: {
        if (!distinguished(p)) {
          fork().ps[static_cast<std::size_t>(p)].done = true;
        } else if (l0.pc == 0) {
          std::vector<int> vals{0, 1};
          if (prm().no_out) vals.push_back(-1);
          for (int v : vals) {
            auto& st = fork();
            L(st).pick = v;
            L(st).pc = 1;
          }
        } else {
          auto& st = fork();
          out(L(st), L(st).pick);
          L(st).done = true;
        }
        break;
      }
      case AlgorithmKind::timing_adaptive: {
        const int v = binsos::to_int(prm().value);
        const bool pass = !prm().no_out || l0.gate == 0;
        if (l0.pc == 0) {
          if (prm().no_out) {
            for (int g : {0, 1}) {
              auto& st = fork();
              L(st).gate = g;
              L(st).pc = 1;
            }
          } else {
            fork().ps[static_cast<std::size_t>(p)].pc = 1;
          }
        } else if (!distinguished(p)) {
          auto& st = fork();
          if (!pass) {
            L(st).done = true;
          } else if (l0.pc == 1) {
            out(L(st), v);
            L(st).pc = 2;
          } else {
            emit(st, p, OUTPUT, v);
            L(st).done = true;
          }
        } else if (l0.pc == 1) {
          // wait: sync until the round-1 computation step, async until the deadline
          if (!pass) {
            fork().ps[static_cast<std::size_t>(p)].done = true;
          } else if (sync() ? rank >= 1 : l0.timer) {
            fork().ps[static_cast<std::size_t>(p)].pc = 2;
          }
        } else {
          if (saw(s, p, OUTPUT, v)) {
            for (int b : {0, 1}) {
              auto& st = fork();
              out(L(st), b);
              L(st).done = true;
            }
          } else {
            auto& st = fork();
            out(L(st), v);
            L(st).done = true;
          }
        }
        break;
      }
      case AlgorithmKind::sync_consensus: {
        if (l0.pc == 0) {
          for (int b : {0, 1}) {
            auto& st = fork();
            L(st).pick = b;
            L(st).pc = 1;
          }
        } else if (l0.pc == 1) {
          auto& st = fork();
          emit(st, p, PROPOSE, l0.pick);
          L(st).pc = 2;
        } else if (rank >= 1) {
          auto& st = fork();
          out(L(st), saw(s, p, PROPOSE, 0) ? 0 : 1);
          L(st).done = true;
        }
        break;
      }
      case AlgorithmKind::async_disagreement:
      case AlgorithmKind::sync_disagreement: {
        const bool no_out = prm().no_out;
        // pc 0: gate pick, pc 1: INIT, pc >= 2: role part
        if (l0.pc == 0) {
          if (init_[static_cast<std::size_t>(p)] && no_out) {
            for (int g : {0, 1}) {
              auto& st = fork();
              L(st).gate = g;
              L(st).pc = 1;
            }
          } else {
            fork().ps[static_cast<std::size_t>(p)].pc = 2;
          }
        } else if (l0.pc == 1) {
          auto& st = fork();
          if (l0.gate == 0) emit(st, p, INIT, -1);
          L(st).pc = 2;
        } else if (inst_.kind() == AlgorithmKind::async_disagreement) {
          const char r = role_[static_cast<std::size_t>(p)];
          if (r == '0' || r == '1') {
            const int v = r - '0';
            if (l0.pc == 2) {
              if (!no_out || saw(s, p, INIT)) fork().ps[static_cast<std::size_t>(p)].pc = 3;
            } else if (l0.pc == 3) {
              auto& st = fork();
              out(L(st), v);
              L(st).pc = 4;
            } else {
              auto& st = fork();
              emit(st, p, OUTPUT, v);
              L(st).done = true;
            }
          } else if (r == '?') {
            if (saw(s, p, OUTPUT)) {
              auto& st = fork();
              out(L(st), 1 - first(s, p, OUTPUT));
              L(st).done = true;
            }
          } else {
            fork().ps[static_cast<std::size_t>(p)].done = true;
          }
        } else {
          const int v = role_[static_cast<std::size_t>(p)] - '0';
          const int i = seq_[static_cast<std::size_t>(p)];
          if (l0.pc == 2) {
            if (rank >= 2 * (i - 1) + 1) {
              auto& st = fork();
              int chosen = -1;
              if (!no_out || saw(s, p, INIT)) chosen = saw(s, p, OUTPUT, v) ? 1 - v : v;
              L(st).chosen = chosen;
              out(L(st), chosen);
              L(st).pc = 3;
              if (i >= rounds_) L(st).done = true;
            }
          } else if (rank >= 2 * i) {
            auto& st = fork();
            if (l0.chosen >= 0) emit(st, p, OUTPUT, l0.chosen);
            L(st).done = true;
          }
        }
        break;
      }
    }
    return next;
  }

  static std::string key(const State& s) {
    std::string k;
    auto put = [&](int v) { k.push_back(static_cast<char>(v + 8)); };
    put(s.rank);
    put(s.crashes);
    put(s.finished);
    for (const auto& l : s.ps) {
      put(l.pc), put(l.gate), put(l.pick), put(l.chosen), put(l.output);
      put(l.crashed), put(l.done), put(l.timer);
      for (int id : l.seen) put(id);
      put(-5);
    }
    for (const auto& it : s.items) put(it.sender), put(it.tag), put(it.value);
    put(-6);
    auto pend = s.pending;
    std::sort(pend.begin(), pend.end());
    for (auto [i, r] : pend) put(i), put(r);
    return k;
  }

  void record(const State& s) {
    unsigned bits = 0;
    for (const auto& l : s.ps)
      if (l.output >= 0) bits |= l.output == 0 ? 1u : 2u;
    result_.insert(static_cast<binsos::OutputSet>(bits));
  }

  void dfs(const State& s) {
    if (!visited_.insert(key(s)).second) return;
    if (s.finished) {
      record(s);
      return;
    }
    bool progress = false;
    for (int p = 0; p < n_; ++p) {
      for (auto& nx : act(s, p)) {
        progress = true;
        dfs(nx);
      }
    }
    if (!sync()) {
      for (std::size_t k = 0; k < s.pending.size(); ++k) {
        const auto [item, r] = s.pending[k];
        if (s.ps[static_cast<std::size_t>(r)].crashed) continue;
        State nx = s;
        nx.pending.erase(nx.pending.begin() + static_cast<std::ptrdiff_t>(k));
        nx.ps[static_cast<std::size_t>(r)].seen.push_back(item);
        progress = true;
        dfs(nx);
      }
      for (int p = 0; p < n_; ++p) {
        const auto& l = s.ps[static_cast<std::size_t>(p)];
        if (inst_.kind() == AlgorithmKind::timing_adaptive && distinguished(p) && !l.crashed && !l.done && !l.timer &&
            l.pc == 1) {
          State nx = s;
          nx.ps[static_cast<std::size_t>(p)].timer = true;
          progress = true;
          dfs(nx);
        }
      }
    }
    if (s.crashes < cfg_.t) {
      for (int p = 0; p < n_; ++p) {
        const auto& l = s.ps[static_cast<std::size_t>(p)];
        if (l.crashed || l.done) continue;
        State nx = s;
        nx.ps[static_cast<std::size_t>(p)].crashed = true;
        ++nx.crashes;
        dfs(nx);
      }
    }
    if (progress) return;
    if (!sync()) {
      State nx = s;
      nx.finished = true;
      dfs(nx);
      return;
    }
    // sync: every process is stuck in this step, move to the next one
    State nx = s;
    if (nx.rank % 2 == 0) {
      for (auto [item, r] : nx.pending)
        if (!nx.ps[static_cast<std::size_t>(r)].crashed) nx.ps[static_cast<std::size_t>(r)].seen.push_back(item);
      nx.pending.clear();
    }
    ++nx.rank;
    if (nx.rank >= 2 * rounds_) nx.finished = true;
    dfs(nx);
  }

  AlgorithmInstance inst_;
  SystemConfig cfg_;
  int n_ = 0;
  int rounds_ = 1;
  std::vector<char> role_;
  std::vector<bool> init_;
  std::vector<int> seq_;
  std::set<std::string> visited_;
  SetOfOutputSets result_;
};

inline SetOfOutputSets observed_output_sets(const AlgorithmInstance& inst, const SystemConfig& cfg) {
  return Oracle(inst, cfg).observed();
}

}  // namespace oracle
