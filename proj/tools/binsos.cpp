// Command-line front end: run, replay, check, table, witness.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <binsos/binsos.hpp>

namespace {

using namespace binsos;

enum Exit : int {
  kOk = 0,
  kVerdictFailure = 1,
  kPrecondition = 2,
  kBudgetExhausted = 3,
  kHorizon = 4,
  kUsage = 64,
  kSoftware = 70,
  kIo = 74,
};

struct Flags {
  std::string config, alg, params, timing, fp, dp, budget, out, replay, kind;
  int n = 0, t = 0, horizon = 0, n_max = 4;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON file with the same keys as the flags");
  cmd->add_option("-n", f.n, "number of processes");
  cmd->add_option("-t", f.t, "crash bound");
  cmd->add_option("--timing", f.timing, "async | sync");
  cmd->add_option("--budget", f.budget, "auto | exhaustive | sampled | key=value,... | JSON");
  cmd->add_option("--horizon", f.horizon, "async step bound (default 4n)");
  cmd->add_option("--out", f.out, "output file");
}

void add_algorithm(CLI::App* cmd, Flags& f) {
  cmd->add_option("--alg", f.alg, "algorithm kind or alg1..alg6");
  cmd->add_option("--params", f.params, "e.g. no_out=true, v=1, V=0|1|bot");
}

bool given(const CLI::App* cmd, const char* name) {
  const auto* opt = cmd->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

RunSpec build_spec(Command command, const CLI::App* cmd, const Flags& f) {
  RunSpec s;
  s.budget = default_budget();
  if (!f.config.empty()) s = run_spec_from_json(json::parse(read_file(f.config)), s);
  s.command = command;
  if (given(cmd, "--alg"))
    s.algorithm = Algorithm::make(parse_algorithm_kind(f.alg));
  if (given(cmd, "--params")) {
    if (!s.algorithm) throw std::invalid_argument("--params needs --alg");
    s.algorithm->params = parse_params(s.algorithm->kind, f.params);
  }
  if (s.algorithm) s.algorithm = s.algorithm->normalized();
  if (given(cmd, "-n")) s.n = f.n;
  if (given(cmd, "-t")) s.t = f.t;
  if (given(cmd, "--timing")) s.timing = parse_timing(f.timing);
  if (given(cmd, "--budget")) s.budget = parse_budget(f.budget, s.budget);
  if (given(cmd, "--horizon")) s.budget.horizon = f.horizon;
  if (given(cmd, "--out")) s.out = f.out;
  if (given(cmd, "--seed")) s.seed = f.seed;
  if (given(cmd, "--fp")) s.fp = f.fp;
  if (given(cmd, "--dp")) s.dp = f.dp;
  if (given(cmd, "--replay")) s.replay = f.replay;
  if (given(cmd, "--n-max")) s.n_max = f.n_max;
  if (given(cmd, "kind")) s.witness = f.kind;
  s.validate();
  return s;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

int verdict_exit(const Verdict& v) {
  if (v.safety() != SafetyStatus::ok || !v.completeness_ok()) return v.budget_exhausted ? kBudgetExhausted : kVerdictFailure;
  return v.budget_exhausted ? kBudgetExhausted : kOk;
}

int cmd_run(const RunSpec& s) {
  const auto tr = execute(s);
  const std::string path = s.out.empty() ? "trace.jsonl" : s.out;
  emit(path, serialize_trace(tr));
  std::cout << summary(tr) << " trace=" << path << "\n";
  return tr.termination == Termination::horizon ? kHorizon : kOk;
}

int cmd_replay(const RunSpec& s) {
  const std::string text = read_file(s.replay);
  const auto original = parse_trace(text);
  const auto again = replay(original.header);
  const std::string replayed = serialize_trace(again);
  if (!s.out.empty()) write_file(s.out, replayed);
  const bool identical = replayed == text;
  std::cout << summary(again) << " identical=" << (identical ? "true" : "false") << "\n";
  if (!identical) return kVerdictFailure;
  return again.termination == Termination::horizon ? kHorizon : kOk;
}

int cmd_check(const RunSpec& s) {
  const auto cfg = s.config();
  const auto v = explore(instantiate(*s.algorithm, s.n, s.t), cfg, s.budget);
  json j = to_json(v);
  j["algorithm"] = describe(*s.algorithm);
  j["n"] = s.n;
  j["t"] = s.t;
  j["timing"] = to_string(cfg.timing);
  if (!s.out.empty()) write_file(s.out, j.dump(2) + "\n");
  std::cout << "observed=" << to_string(v.observed) << " target=" << to_string(v.target)
            << " safety=" << to_string(v.safety()) << " completeness=" << to_string(v.completeness())
            << " runs=" << v.runs << (v.exhaustive ? " exhaustive" : " sampled") << "\n";
  return verdict_exit(v);
}

int cmd_table(const RunSpec& s) {
  const auto report = check_table(s.budget, s.n_max, {}, [](const TableCell& c) {
    std::cerr << c.ref() << " " << (c.passed() ? "ok" : "FAIL") << " observed=" << to_string(c.verdict.observed)
              << " runs=" << c.verdict.runs << "\n";
  });
  emit(s.out.empty() ? "table_report.json" : s.out, to_json(report).dump(2) + "\n");
  std::cout << "cells=" << report.cells.size() << " failures=" << report.failures() << "\n";
  if (report.passed()) return kOk;
  for (const auto& c : report.cells)
    if (!c.passed() && c.verdict.safety() == SafetyStatus::ok && c.verdict.budget_exhausted) return kBudgetExhausted;
  return kVerdictFailure;
}

int cmd_witness(const RunSpec& s) {
  const auto cfg = s.config();
  Algorithm alg = s.algorithm.value_or(cfg.timing == Timing::sync ? Algorithm::sync_disagreement(false)
                                                                 : Algorithm::async_disagreement(false));
  const auto outcome = s.witness == "thm2" ? witness_thm2(alg, cfg, s.budget) : witness_thm3(alg, cfg, s.budget);
  for (const auto& line : outcome.report) std::cerr << line << "\n";
  if (outcome.schedule) {
    const std::string path = s.out.empty() ? "witness.jsonl" : s.out;
    write_file(path, serialize_trace(outcome.schedule->trace));
    std::cout << to_string(outcome.schedule->kind) << " " << summary(outcome.schedule->trace) << " trace=" << path
              << "\n";
  }
  return outcome.produced ? kOk : kVerdictFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explore and check binary output-set algorithms under crash failures"};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "execute one run and write its trace");
  add_common(run, f);
  add_algorithm(run, f);
  run->add_option("--seed", f.seed, "choice seed");
  run->add_option("--fp", f.fp, "failure pattern, e.g. none or 2@3,4@0");
  run->add_option("--dp", f.dp, "delay edges sender.k>receiver=step;...");

  auto* rep = app.add_subcommand("replay", "re-execute a trace from its header");
  rep->add_option("--replay,--trace", f.replay, "trace file")->required();
  rep->add_option("--out", f.out, "write the replayed trace here");
  rep->add_option("--config", f.config, "JSON config file");

  auto* check = app.add_subcommand("check", "explore one instance against its claimed output sets");
  add_common(check, f);
  add_algorithm(check, f);

  auto* table = app.add_subcommand("table", "check every solvable table cell up to n_max");
  add_common(table, f);
  table->add_option("--n-max", f.n_max, "largest n (>= 2)");

  auto* wit = app.add_subcommand("witness", "build a necessity counterexample");
  add_common(wit, f);
  add_algorithm(wit, f);
  wit->add_option("kind", f.kind, "thm2 | thm3")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(build_spec(Command::run, run, f));
    if (rep->parsed()) return cmd_replay(build_spec(Command::replay, rep, f));
    if (check->parsed()) return cmd_check(build_spec(Command::check, check, f));
    if (table->parsed()) return cmd_table(build_spec(Command::table, table, f));
    if (wit->parsed()) return cmd_witness(build_spec(Command::witness, wit, f));
  } catch (const PreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return kPrecondition;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "io: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSoftware;
  }
  return kUsage;
}
