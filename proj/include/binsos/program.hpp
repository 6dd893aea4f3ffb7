#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "output_sets.hpp"
#include "patterns.hpp"

namespace binsos {

// ---------------------------------------------------------------------------
// Information items
// ---------------------------------------------------------------------------

enum class Tag : std::uint8_t { init, output, propose };

inline std::string to_string(Tag t) {
  switch (t) {
    case Tag::init: return "INIT";
    case Tag::output: return "OUTPUT";
    case Tag::propose: return "PROPOSE";
  }
  return "?";
}

inline Tag parse_tag(std::string_view s) {
  if (s == "INIT") return Tag::init;
  if (s == "OUTPUT") return Tag::output;
  if (s == "PROPOSE") return Tag::propose;
  throw std::invalid_argument("unknown payload tag: " + std::string(s));
}

/// INIT carries no value; OUTPUT and PROPOSE carry one bit.
struct Payload {
  Tag tag = Tag::init;
  MaybeBit value;

  static Payload init() { return {Tag::init, std::nullopt}; }
  static Payload output(Bit v) { return {Tag::output, v}; }
  static Payload propose(Bit v) { return {Tag::propose, v}; }

  friend bool operator==(const Payload&, const Payload&) = default;
};

inline std::string to_string(const Payload& p) {
  if (!p.value) return to_string(p.tag);
  return to_string(p.tag) + "(" + to_string(p.value) + ")";
}

struct InfoItem {
  int id = 0;  // global emission order within one execution
  EmissionSlot slot;
  Payload payload;
  int emit_time = 0;

  ProcessId sender() const noexcept { return slot.sender; }
  friend bool operator==(const InfoItem&, const InfoItem&) = default;
};

// ---------------------------------------------------------------------------
// Guarded step programs
// ---------------------------------------------------------------------------

/// Named process-local registers.
enum class Reg : std::uint8_t { gate, pick, chosen, seen, count_ };

using Registers = std::array<MaybeBit, static_cast<std::size_t>(Reg::count_)>;

/// Read-only view of one process offered to guards and expressions.
class ProcessView {
 public:
  ProcessView(ProcessId self, const Registers& regs, std::span<const InfoItem* const> observed)
      : self_(self), regs_(regs), observed_(observed) {}

  ProcessId self() const noexcept { return self_; }
  MaybeBit reg(Reg r) const noexcept { return regs_[static_cast<std::size_t>(r)]; }

  bool observed_any(Tag tag) const noexcept {
    for (const auto* it : observed_)
      if (it->payload.tag == tag) return true;
    return false;
  }
  bool observed_any(Tag tag, Bit value) const noexcept {
    for (const auto* it : observed_)
      if (it->payload.tag == tag && it->payload.value == value) return true;
    return false;
  }
  /// Value of the earliest observed item with `tag`, in observation order.
  MaybeBit first_observed(Tag tag) const noexcept {
    for (const auto* it : observed_)
      if (it->payload.tag == tag) return it->payload.value;
    return std::nullopt;
  }

 private:
  ProcessId self_;
  const Registers& regs_;
  std::span<const InfoItem* const> observed_;
};

using Guard = std::function<bool(const ProcessView&)>;
using ValueExpr = std::function<MaybeBit(const ProcessView&)>;
using PayloadExpr = std::function<Payload(const ProcessView&)>;

enum class Phase : std::uint8_t { communication, computation };

struct PickStmt {
  Reg target;
  std::vector<MaybeBit> candidates;
};

struct AssignStmt {
  Reg target;
  ValueExpr value;
};

struct CommunicateStmt {
  PayloadExpr payload;
};

/// Blocks until the process observed some item with `tag` (and `value`, if set).
struct WaitObservedStmt {
  Tag tag;
  MaybeBit value;

  bool satisfied_by(const Payload& p) const noexcept {
    return p.tag == tag && (!value || p.value == value);
  }
};

/// Synchronous only: blocks until the given round step starts.
struct AwaitRoundStmt {
  int round = 1;
  Phase phase = Phase::communication;
};

/// Asynchronous only: blocks until the kernel's local deadline step.
struct AwaitDeadlineStmt {};

struct OutputStmt {
  ValueExpr value;
};

using Action = std::variant<PickStmt, AssignStmt, CommunicateStmt, WaitObservedStmt, AwaitRoundStmt,
                            AwaitDeadlineStmt, OutputStmt>;

struct Statement {
  std::string label;
  Action action;
  Guard guard;  // empty: always enabled; disabled statements are skipped
  std::vector<Tag> reads;  // observation tags the guard or expression consults

  bool enabled(const ProcessView& v) const { return !guard || guard(v); }
};

struct Program {
  std::vector<Statement> statements;

  int size() const noexcept { return static_cast<int>(statements.size()); }
  /// Crash slots: before each statement plus one after the last.
  int crash_slots() const noexcept { return size() + 1; }

  int communicate_count() const noexcept {
    int c = 0;
    for (const auto& s : statements) c += std::holds_alternative<CommunicateStmt>(s.action) ? 1 : 0;
    return c;
  }

  /// Index of the (unique) output statement, if any.
  std::optional<int> output_slot() const noexcept {
    for (int i = 0; i < size(); ++i)
      if (std::holds_alternative<OutputStmt>(statements[static_cast<std::size_t>(i)].action)) return i;
    return std::nullopt;
  }

  /// Whether any statement's behaviour depends on observing items tagged `tag`.
  bool reads(Tag tag) const noexcept {
    for (const auto& s : statements) {
      if (const auto* w = std::get_if<WaitObservedStmt>(&s.action); w && w->tag == tag) return true;
      for (auto r : s.reads)
        if (r == tag) return true;
    }
    return false;
  }
};

}  // namespace binsos
