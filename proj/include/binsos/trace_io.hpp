#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "algorithms.hpp"
#include "kernel.hpp"

namespace binsos {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Small literals
// ---------------------------------------------------------------------------

inline Payload parse_payload(std::string_view s) {
  if (s == "INIT") return Payload::init();
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') throw std::invalid_argument("malformed payload: " + std::string(s));
  const Tag tag = parse_tag(s.substr(0, open));
  const MaybeBit v = parse_maybe_bit(s.substr(open + 1, s.size() - open - 2));
  if (!v || tag == Tag::init) throw std::invalid_argument("malformed payload: " + std::string(s));
  return {tag, v};
}

namespace detail {

inline int parse_int(std::string_view s, const char* what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(std::string(s), &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("malformed ") + what + ": " + std::string(s));
  }
  if (used != s.size()) throw std::invalid_argument(std::string("malformed ") + what + ": " + std::string(s));
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(sep);
    out.push_back(s.substr(0, pos));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace detail

/// "none" or comma-separated "pid@slot" entries, e.g. "2@3,4@0".
inline FailurePattern parse_failure_pattern(std::string_view s) {
  FailurePattern fp;
  if (s.empty() || s == "none") return fp;
  for (auto part : detail::split(s, ',')) {
    const auto at = part.find('@');
    if (at == std::string_view::npos) throw std::invalid_argument("malformed crash entry: " + std::string(part));
    const ProcessId p{detail::parse_int(part.substr(0, at), "process id")};
    if (fp.crashes.contains(p)) throw std::invalid_argument("process listed twice in failure pattern");
    fp.crashes[p] = CrashPoint{detail::parse_int(part.substr(at + 1), "crash slot")};
  }
  return fp;
}

/// "same_round" or semicolon-separated "sender.k>receiver=step" edges.
inline DelayPattern parse_delay_pattern(std::string_view s) {
  if (s == "same_round") return sync_canonical_delay();
  DelayPattern dp;
  if (s.empty() || s == "none") return dp;
  for (auto part : detail::split(s, ';')) {
    const auto dot = part.find('.'), gt = part.find('>'), eq = part.find('=');
    if (dot == std::string_view::npos || gt == std::string_view::npos || eq == std::string_view::npos || !(dot < gt && gt < eq))
      throw std::invalid_argument("malformed delay edge: " + std::string(part));
    const DeliveryKey key{{ProcessId{detail::parse_int(part.substr(0, dot), "sender")},
                           detail::parse_int(part.substr(dot + 1, gt - dot - 1), "emission index")},
                          ProcessId{detail::parse_int(part.substr(gt + 1, eq - gt - 1), "receiver")}};
    dp.delivery[key] = detail::parse_int(part.substr(eq + 1), "delay step");
  }
  return dp;
}

inline std::string to_literal(const DelayPattern& dp) {
  if (dp.same_round) return "same_round";
  if (dp.delivery.empty()) return "none";
  std::string s;
  for (const auto& [k, step] : dp.delivery) {
    if (!s.empty()) s += ";";
    s += std::to_string(k.item.sender.index) + "." + std::to_string(k.item.index) + ">" +
         std::to_string(k.receiver.index) + "=" + std::to_string(step);
  }
  return s;
}

// ---------------------------------------------------------------------------
// JSON mappings
// ---------------------------------------------------------------------------

inline json to_json(const Algorithm& a) {
  const auto na = a.normalized();
  json params = json::object();
  switch (na.kind) {
    case AlgorithmKind::all_output: {
      json vs = json::array();
      for (auto v : na.params.alphabet) vs.push_back(to_string(v));
      params["V"] = vs;
      break;
    }
    case AlgorithmKind::timing_adaptive:
      params["v"] = to_int(na.params.value);
      params["no_out"] = na.params.no_out;
      break;
    case AlgorithmKind::single_output:
    case AlgorithmKind::async_disagreement:
    case AlgorithmKind::sync_disagreement: params["no_out"] = na.params.no_out; break;
    case AlgorithmKind::sync_consensus: break;
  }
  return {{"kind", to_string(na.kind)}, {"params", params}};
}

/// Reads kind plus params; unknown parameter names are rejected.
inline Algorithm algorithm_from_json(const json& j) {
  Algorithm a;
  a.kind = parse_algorithm_kind(j.at("kind").get<std::string>());
  const json params = j.contains("params") ? j.at("params") : json::object();
  for (const auto& [key, value] : params.items()) {
    if (key == "V") {
      for (const auto& v : value) {
        if (v.is_number_integer()) {
          a.params.alphabet.push_back(parse_maybe_bit(std::to_string(v.get<int>())));
        } else if (v.is_null()) {
          a.params.alphabet.push_back(std::nullopt);
        } else {
          a.params.alphabet.push_back(parse_maybe_bit(v.get<std::string>()));
        }
      }
    } else if (key == "no_out") {
      a.params.no_out = value.get<bool>();
    } else if (key == "v") {
      const MaybeBit v = value.is_string() ? parse_maybe_bit(value.get<std::string>())
                                           : parse_maybe_bit(std::to_string(value.get<int>()));
      if (!v) throw std::invalid_argument("v must be 0 or 1");
      a.params.value = *v;
    } else {
      throw std::invalid_argument("unknown algorithm parameter: " + key);
    }
  }
  return a;
}

namespace detail {

inline json ids(const std::vector<ProcessId>& v) {
  json a = json::array();
  for (auto p : v) a.push_back(p.index);
  return a;
}

inline std::vector<ProcessId> ids_from(const json& j, const char* key) {
  std::vector<ProcessId> out;
  if (!j.contains(key)) return out;
  for (const auto& x : j.at(key)) out.push_back(ProcessId{x.get<int>()});
  return out;
}

}  // namespace detail

inline json to_json(const RoleAssignment& r) {
  json j = json::object();
  auto put = [&](const char* key, const std::vector<ProcessId>& v) {
    if (!v.empty()) j[key] = detail::ids(v);
  };
  put("P0", r.p0);
  put("P1", r.p1);
  put("P?", r.undecided);
  put("S0", r.s0);
  put("S1", r.s1);
  put("Pinit", r.initiators);
  if (r.distinguished) j["p"] = r.distinguished->index;
  return j;
}

inline RoleAssignment roles_from_json(const json& j) {
  RoleAssignment r;
  r.p0 = detail::ids_from(j, "P0");
  r.p1 = detail::ids_from(j, "P1");
  r.undecided = detail::ids_from(j, "P?");
  r.s0 = detail::ids_from(j, "S0");
  r.s1 = detail::ids_from(j, "S1");
  r.initiators = detail::ids_from(j, "Pinit");
  if (j.contains("p")) r.distinguished = ProcessId{j.at("p").get<int>()};
  return r;
}

inline json to_json(const FailurePattern& fp) {
  json j = json::object();
  for (const auto& [p, c] : fp.crashes) j[std::to_string(p.index)] = c.slot;
  return j;
}

inline FailurePattern failure_pattern_from_json(const json& j) {
  if (j.is_string()) return parse_failure_pattern(j.get<std::string>());
  FailurePattern fp;
  for (const auto& [key, value] : j.items()) fp.crashes[ProcessId{detail::parse_int(key, "process id")}] = CrashPoint{value.get<int>()};
  return fp;
}

inline json to_json(const DelayPattern& dp) {
  if (dp.same_round) return "same_round";
  json a = json::array();
  for (const auto& [k, step] : dp.delivery) a.push_back({k.item.sender.index, k.item.index, k.receiver.index, step});
  return a;
}

inline DelayPattern delay_pattern_from_json(const json& j) {
  if (j.is_string()) return parse_delay_pattern(j.get<std::string>());
  DelayPattern dp;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 4) throw std::invalid_argument("delay edges are [sender, index, receiver, step]");
    dp.delivery[{{ProcessId{e[0].get<int>()}, e[1].get<int>()}, ProcessId{e[2].get<int>()}}] = e[3].get<int>();
  }
  return dp;
}

inline json to_json(const TraceHeader& h) {
  json alg = to_json(h.instance.algorithm);
  alg["roles"] = to_json(h.instance.roles);
  json j{{"record", "header"},          {"algorithm", alg},          {"n", h.cfg.n},
         {"t", h.cfg.t},                {"timing", to_string(h.cfg.timing)}};
  if (h.seed) {
    j["seed"] = *h.seed;
  } else {
    json picks = json::object();
    for (const auto& [p, v] : h.picks) picks[std::to_string(p)] = v;
    j["picks"] = picks;
  }
  j["fp"] = to_json(h.fp);
  j["dp"] = to_json(h.dp);
  j["horizon"] = h.horizon;
  j["deadline"] = h.deadline;
  return j;
}

inline TraceHeader header_from_json(const json& j) {
  TraceHeader h;
  const auto& alg = j.at("algorithm");
  h.cfg = SystemConfig{j.at("n").get<int>(), j.at("t").get<int>(), parse_timing(j.at("timing").get<std::string>())};
  h.cfg.validate();
  h.instance.algorithm = algorithm_from_json(alg).normalized();
  h.instance.n = h.cfg.n;
  h.instance.roles = alg.contains("roles") ? roles_from_json(alg.at("roles"))
                                           : make_roles(h.instance.kind(), h.cfg.n, h.cfg.t);
  if (j.contains("seed")) h.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("picks"))
    for (const auto& [key, value] : j.at("picks").items())
      h.picks[detail::parse_int(key, "process id")] = value.get<std::vector<int>>();
  h.fp = failure_pattern_from_json(j.at("fp"));
  h.dp = delay_pattern_from_json(j.at("dp"));
  h.horizon = j.value("horizon", 0);
  h.deadline = j.value("deadline", 0);
  return h;
}

inline json to_json(const Event& e, const std::vector<InfoItem>& items) {
  json payload = json::object();
  switch (e.kind) {
    case EventKind::communicate:
    case EventKind::observe: {
      payload["item"] = e.item;
      if (e.item >= 0 && e.item < static_cast<int>(items.size())) {
        const auto& it = items[static_cast<std::size_t>(e.item)];
        if (e.kind == EventKind::observe) payload["from"] = it.sender().index;
        payload["msg"] = to_string(it.payload);
      }
      break;
    }
    case EventKind::pick:
    case EventKind::output: payload["value"] = to_string(e.value); break;
    default: break;
  }
  return {{"record", "event"}, {"seq", e.seq},       {"time", e.time},
          {"pid", e.pid.index}, {"kind", to_string(e.kind)}, {"payload", payload}};
}

// ---------------------------------------------------------------------------
// JSONL traces
// ---------------------------------------------------------------------------

/// One JSON record per line: header, events in order, then an end record.
inline std::string serialize_trace(const ExecutionTrace& tr) {
  std::string out = to_json(tr.header).dump() + "\n";
  for (const auto& e : tr.events) out += to_json(e, tr.items).dump() + "\n";
  json outputs = json::array(), status = json::array();
  for (auto v : tr.outputs) outputs.push_back(to_string(v));
  for (auto s : tr.status) status.push_back(to_string(s));
  json end{{"record", "end"},
           {"termination", to_string(tr.termination)},
           {"time", tr.end_time},
           {"output_set", to_string(tr.output_set())},
           {"outputs", outputs},
           {"status", status}};
  out += end.dump() + "\n";
  return out;
}

inline ExecutionTrace parse_trace(std::string_view text) {
  ExecutionTrace tr;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_header = false, have_end = false;
  std::map<int, int> emitted;  // sender -> next emission index
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const auto kind = j.at("record").get<std::string>();
    if (kind == "header") {
      if (have_header) throw std::invalid_argument("trace has two headers");
      tr.header = header_from_json(j);
      have_header = true;
    } else if (kind == "event") {
      if (!have_header) throw std::invalid_argument("trace event before header");
      Event e;
      e.seq = j.at("seq").get<int>();
      e.time = j.at("time").get<int>();
      e.pid = ProcessId{j.at("pid").get<int>()};
      e.kind = parse_event_kind(j.at("kind").get<std::string>());
      const auto& p = j.at("payload");
      if (p.contains("item")) e.item = p.at("item").get<int>();
      if (p.contains("value")) e.value = parse_maybe_bit(p.at("value").get<std::string>());
      if (e.kind == EventKind::communicate) {
        if (e.item != static_cast<int>(tr.items.size())) throw std::invalid_argument("items must be numbered in emission order");
        tr.items.push_back(InfoItem{e.item, {e.pid, emitted[e.pid.index]++}, parse_payload(p.at("msg").get<std::string>()), e.time});
      }
      tr.events.push_back(e);
    } else if (kind == "end") {
      tr.termination = parse_termination(j.at("termination").get<std::string>());
      tr.end_time = j.at("time").get<int>();
      for (const auto& v : j.at("outputs")) tr.outputs.push_back(parse_maybe_bit(v.get<std::string>()));
      for (const auto& s : j.at("status")) tr.status.push_back(parse_proc_status(s.get<std::string>()));
      have_end = true;
    } else {
      throw std::invalid_argument("unknown trace record: " + kind);
    }
  }
  if (!have_header) throw std::invalid_argument("trace has no header");
  if (!have_end) throw std::invalid_argument("trace has no end record");
  return tr;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace binsos
