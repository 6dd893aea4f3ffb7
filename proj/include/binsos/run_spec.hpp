#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "checker.hpp"
#include "trace_io.hpp"

namespace binsos {

enum class Command : std::uint8_t { run, replay, check, table, witness };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::run: return "run";
    case Command::replay: return "replay";
    case Command::check: return "check";
    case Command::table: return "table";
    case Command::witness: return "witness";
  }
  return "?";
}

inline Command parse_command(std::string_view s) {
  for (auto c : {Command::run, Command::replay, Command::check, Command::table, Command::witness})
    if (to_string(c) == s) return c;
  throw std::invalid_argument("unknown command: " + std::string(s));
}

/// Algorithm parameters given either as a JSON object or as
/// "key=value,..." with V written as "0|1|bot".
inline AlgorithmParams parse_params(AlgorithmKind kind, std::string_view text) {
  json params = json::object();
  if (!text.empty() && text.front() == '{') {
    params = json::parse(text);
  } else if (!text.empty()) {
    for (auto part : detail::split(text, ',')) {
      const auto eq = part.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("malformed parameter: " + std::string(part));
      const std::string key(part.substr(0, eq));
      const auto value = part.substr(eq + 1);
      if (key == "V") {
        json vs = json::array();
        for (auto v : detail::split(value, '|')) vs.push_back(std::string(v));
        params[key] = vs;
      } else if (key == "no_out") {
        if (value != "true" && value != "false" && value != "1" && value != "0")
          throw std::invalid_argument("no_out must be true or false");
        params[key] = value == "true" || value == "1";
      } else {
        params[key] = std::string(value);
      }
    }
  }
  return algorithm_from_json({{"kind", to_string(kind)}, {"params", params}}).params;
}

// ---------------------------------------------------------------------------
// Budget literals
// ---------------------------------------------------------------------------

inline json to_json(const ExplorationBudget& b) {
  return {{"mode", to_string(b.mode)},
          {"size_cap", b.size_cap},
          {"samples", b.samples},
          {"max_seeds", b.max_seeds},
          {"max_failure_patterns", b.max_failure_patterns},
          {"max_delay_patterns", b.max_delay_patterns},
          {"horizon", b.horizon},
          {"deadline", b.deadline},
          {"sampling_seed", b.sampling_seed},
          {"workers", b.workers},
          {"max_violations", b.max_violations}};
}

/// Applies the fields present in `j` on top of `base`.
inline ExplorationBudget budget_from_json(const json& j, ExplorationBudget base = {}) {
  if (j.is_string()) {
    base.mode = parse_explore_mode(j.get<std::string>());
    return base;
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "mode") base.mode = parse_explore_mode(value.get<std::string>());
    else if (key == "size_cap") base.size_cap = value.get<std::uint64_t>();
    else if (key == "samples") base.samples = value.get<std::uint64_t>();
    else if (key == "max_seeds") base.max_seeds = value.get<std::uint64_t>();
    else if (key == "max_failure_patterns") base.max_failure_patterns = value.get<std::uint64_t>();
    else if (key == "max_delay_patterns") base.max_delay_patterns = value.get<std::uint64_t>();
    else if (key == "horizon") base.horizon = value.get<int>();
    else if (key == "deadline") base.deadline = value.get<int>();
    else if (key == "sampling_seed") base.sampling_seed = value.get<std::uint64_t>();
    else if (key == "workers") base.workers = value.get<unsigned>();
    else if (key == "max_violations") base.max_violations = value.get<std::size_t>();
    else throw std::invalid_argument("unknown budget field: " + key);
  }
  base.validate();
  return base;
}

/// "auto" | "exhaustive" | "sampled", a JSON object, or "key=value,...".
inline ExplorationBudget parse_budget(std::string_view text, ExplorationBudget base = {}) {
  if (text.empty()) return base;
  if (text.front() == '{') return budget_from_json(json::parse(text), base);
  if (text.find('=') == std::string_view::npos) return budget_from_json(std::string(text), base);
  json j = json::object();
  for (auto part : detail::split(text, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("malformed budget entry: " + std::string(part));
    const std::string key(part.substr(0, eq)), value(part.substr(eq + 1));
    if (key == "mode") {
      j[key] = value;
    } else {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != value.size() || v < 0) throw std::invalid_argument("malformed budget value: " + std::string(part));
      j[key] = static_cast<std::uint64_t>(v);
    }
  }
  return budget_from_json(j, base);
}

/// Default budget, overridden by the BINSOS_BUDGET environment variable.
inline ExplorationBudget default_budget() {
  if (const char* env = std::getenv("BINSOS_BUDGET"); env && *env) return parse_budget(env);
  return {};
}

// ---------------------------------------------------------------------------
// RunSpec
// ---------------------------------------------------------------------------

struct RunSpec {
  Command command = Command::run;
  std::optional<Algorithm> algorithm;
  int n = 0;
  int t = 0;
  Timing timing = Timing::async;
  std::optional<std::uint64_t> seed;
  std::string fp = "none";
  std::optional<std::string> dp;  // unset: sampled from the seed (async)
  ExplorationBudget budget;
  std::string out;
  std::string replay;   // trace to replay
  int n_max = 4;        // table
  std::string witness;  // thm2 | thm3

  SystemConfig config() const { return {n, t, timing}; }

  /// Rejects malformed literals with std::invalid_argument and domain
  /// violations with PreconditionError naming the failed condition.
  void validate() const {
    budget.validate();
    switch (command) {
      case Command::replay:
        if (replay.empty()) throw std::invalid_argument("replay needs a trace file");
        return;
      case Command::table:
        if (n_max < 2) throw std::invalid_argument("table needs n_max >= 2");
        return;
      case Command::witness:
        if (witness != "thm2" && witness != "thm3") throw std::invalid_argument("witness kind must be thm2 or thm3");
        if (n < 0 || t < 0 || t > n) throw PreconditionError("precondition failed: 0 <= t <= n");
        return;
      case Command::run:
      case Command::check: break;
    }
    if (!algorithm) throw std::invalid_argument(to_string(command) + " needs an algorithm");
    parse_failure_pattern(fp);
    if (dp) parse_delay_pattern(*dp);
    if (!supports(algorithm->kind, timing))
      throw PreconditionError("precondition failed: " + to_string(algorithm->kind) + " does not run under " +
                              to_string(timing));
    if (auto why = assumption_violation(*algorithm, n, t)) throw PreconditionError("precondition failed: " + *why);
    if (command == Command::check && !claimed_output_sets(*algorithm, n, t))
      throw PreconditionError("precondition failed: no claimed set of output sets for this (n, t)");
  }

  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

/// Flag-shaped keys, so a config file reads like the command line.
inline json to_json(const RunSpec& s) {
  json j{{"command", to_string(s.command)}, {"n", s.n}, {"t", s.t}, {"timing", to_string(s.timing)},
         {"fp", s.fp}, {"budget", to_json(s.budget)}};
  if (s.algorithm) {
    const auto a = to_json(*s.algorithm);
    j["alg"] = a.at("kind");
    j["params"] = a.at("params");
  }
  if (s.seed) j["seed"] = *s.seed;
  if (s.dp) j["dp"] = *s.dp;
  if (!s.out.empty()) j["out"] = s.out;
  if (!s.replay.empty()) j["replay"] = s.replay;
  if (s.command == Command::table) j["n_max"] = s.n_max;
  if (!s.witness.empty()) j["kind"] = s.witness;
  return j;
}

/// Reads a spec; fields absent from `j` keep the values in `base`.
inline RunSpec run_spec_from_json(const json& j, RunSpec base = {}) {
  for (const auto& [key, value] : j.items()) {
    if (key == "command") base.command = parse_command(value.get<std::string>());
    else if (key == "alg") base.algorithm = Algorithm::make(parse_algorithm_kind(value.get<std::string>()));
    else if (key == "params" || key == "n" || key == "t") continue;
    else if (key == "timing") base.timing = parse_timing(value.get<std::string>());
    else if (key == "seed") base.seed = value.get<std::uint64_t>();
    else if (key == "fp") base.fp = value.get<std::string>();
    else if (key == "dp") base.dp = value.get<std::string>();
    else if (key == "budget") base.budget = budget_from_json(value, base.budget);
    else if (key == "horizon") base.budget.horizon = value.get<int>();
    else if (key == "out") base.out = value.get<std::string>();
    else if (key == "replay") base.replay = value.get<std::string>();
    else if (key == "n_max") base.n_max = value.get<int>();
    else if (key == "kind") base.witness = value.get<std::string>();
    else throw std::invalid_argument("unknown config field: " + key);
  }
  if (j.contains("n")) base.n = j.at("n").get<int>();
  if (j.contains("t")) base.t = j.at("t").get<int>();
  if (j.contains("params")) {
    if (!base.algorithm) throw std::invalid_argument("params given without alg");
    const auto& p = j.at("params");
    base.algorithm->params = p.is_string() ? parse_params(base.algorithm->kind, p.get<std::string>())
                                           : algorithm_from_json({{"kind", to_string(base.algorithm->kind)}, {"params", p}}).params;
  }
  if (base.algorithm) base.algorithm = base.algorithm->normalized();
  return base;
}

inline std::string serialize(const RunSpec& s) { return to_json(s).dump(2) + "\n"; }
inline RunSpec parse_run_spec(std::string_view text) { return run_spec_from_json(json::parse(text)); }

// ---------------------------------------------------------------------------
// Single runs
// ---------------------------------------------------------------------------

/// Executes one run. Async delivery edges missing from the spec's dp are
/// drawn from the 3-point lattice with a stream derived from the seed.
inline ExecutionTrace execute(const RunSpec& s) {
  s.validate();
  const auto inst = instantiate(*s.algorithm, s.n, s.t);
  const Kernel kernel(inst, s.config(), RunOptions{.horizon = s.budget.horizon, .deadline = s.budget.deadline});
  const auto fp = parse_failure_pattern(s.fp);
  kernel.validate(fp);
  const std::uint64_t seed = s.seed.value_or(0);
  SeededChoice choices(seed);
  if (s.timing == Timing::sync) return kernel.run(choices, fp);

  std::mt19937_64 rng(splitmix64(seed));
  const auto items = kernel.emission_slots();
  DelayPattern dp = sample_delay_pattern(items, s.n, kernel.horizon(), rng);
  if (s.dp) {
    const auto given = parse_delay_pattern(*s.dp);
    if (given.same_round) throw std::invalid_argument("same_round delays apply to synchronous runs only");
    kernel.validate(given);
    for (const auto& [key, step] : given.delivery) dp.delivery[key] = step;
  }
  PatternDelay delays(dp);
  return kernel.run(choices, fp, &delays);
}

inline std::string summary(const ExecutionTrace& tr) {
  return "output_set=" + to_string(tr.output_set()) + " termination=" + to_string(tr.termination);
}

}  // namespace binsos
