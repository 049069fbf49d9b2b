// cbs-rv: run, reconstruct, transform and check component-based systems.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input, 3 verification failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cbsrv/cbsrv.hpp"

namespace {

using namespace cbsrv;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitFailed = 3;

/// Thrown by command handlers to end with a verification-failure status.
struct VerificationFailed {
  std::string message;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("cbs-rv");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CBS_RV_LOG")) {
    spdlog::set_level(spdlog::level::from_str(env));
  }
}

/// "builtin:task", "builtin:rw" or a path.
CompositeSystem load_system(const std::string& arg) {
  if (arg == "builtin:task") return builtin_task();
  if (arg == "builtin:rw") return builtin_readers_writers();
  return load_model(arg);
}

MonitorSpec load_monitor(const std::string& arg) {
  if (arg == "builtin:homogeneity") return builtin_task_monitor();
  return parse_monitor(read_file(arg));
}

RgtVariant variant_from(const std::string& s) {
  auto v = parse_rgt_variant(s);
  if (!v) throw CLI::ValidationError("--rgt-variant", "unknown variant '" + s + "'");
  return *v;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::invalid_argument, "cannot write " + path);
  out << text;
}

/// Transformed, monitor-attached system for the monitored mode.
CompositeSystem monitored_system(const CompositeSystem& global, const std::optional<MonitorSpec>& monitor,
                                 RgtVariant variant) {
  const CompositeSystem partial = to_partial(global);
  if (!monitor) return transform_system(partial, std::nullopt, variant);
  const auto support = monitor_support(*monitor);
  const std::vector<std::string> vars(support.begin(), support.end());
  return attach_monitor(transform_system(partial, vars, variant), *monitor);
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
  std::string model;
  std::string mode = "global";
  std::uint64_t seed = 0;
  std::size_t steps = 100;
  std::size_t threads = 1;
  bool real_time = false;
  std::int64_t delay_us = 0;
  std::string monitor;
  bool drain = true;
  std::string variant = "default";
  bool json = false;
  bool trace_json = false;
  std::string output;
};

int cmd_run(const RunOptions& o) {
  const CompositeSystem global = load_system(o.model);
  std::optional<MonitorSpec> monitor;
  if (!o.monitor.empty()) monitor = load_monitor(o.monitor);

  EngineConfig cfg;
  cfg.policy = SeededRandom{o.seed};
  cfg.max_steps = o.steps;
  cfg.drain = o.drain;
  cfg.real_time = o.real_time;
  cfg.threads = o.threads;
  cfg.busy_delay = {std::chrono::microseconds(0), std::chrono::microseconds(o.delay_us)};

  RunResult r;
  if (o.mode == "global") {
    if (monitor) cfg.monitor = std::make_shared<const MonitorSpec>(*monitor);
    r = run_global(global, cfg);
  } else if (o.mode == "partial") {
    if (monitor) throw CLI::ValidationError("--monitor", "partial mode has no monitor; use --mode monitored");
    r = run_partial_concurrent(to_partial(global), cfg);
  } else {
    r = run_partial_concurrent(monitored_system(global, monitor, variant_from(o.variant)), cfg);
  }
  spdlog::info("{} run: {} interactions, {} β, {} deliveries", o.mode, r.counts.gamma, r.counts.beta,
               r.counts.delivered);

  const std::string trace_text = o.trace_json ? write_trace_json(r.trace) + "\n" : write_run_lines(r);
  if (!o.output.empty()) write_output(o.output, trace_text);

  json verdicts = json::object();
  for (const auto& [v, n] : r.counts.verdicts) verdicts[std::string(verdict_name(v))] = n;
  const double wall_ms = std::chrono::duration<double, std::milli>(r.wall).count();
  if (o.json) {
    json rep = {{"mode", o.mode},
                {"seed", o.seed},
                {"trace", o.output},
                {"outcome", r.outcome == Outcome::completed ? "completed" : "deadlock"},
                {"interactions", r.counts.gamma},
                {"beta_events", r.counts.beta},
                {"delivered", r.counts.delivered},
                {"extra", r.counts.extra()},
                {"verdicts", verdicts},
                {"final_verdict", r.verdicts.empty() ? json(nullptr) : json(std::string(verdict_name(r.verdicts.back())))},
                {"wall_ms", wall_ms}};
    std::cout << rep.dump(2) << "\n";
  } else {
    if (o.output.empty()) std::cout << trace_text;
    std::cout << "mode " << o.mode << ", seed " << o.seed << ", outcome "
              << (r.outcome == Outcome::completed ? "completed" : "deadlock") << "\n"
              << "interactions " << r.counts.gamma << ", beta events " << r.counts.beta << ", delivered "
              << r.counts.delivered << ", extra " << r.counts.extra() << "\n";
    if (!r.verdicts.empty()) {
      std::cout << "verdicts " << verdicts.dump() << ", final " << verdict_name(r.verdicts.back()) << "\n";
    }
    std::cout << "wall " << wall_ms << " ms\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// witness

struct WitnessOptions {
  std::string trace;
  std::string model;
  bool json = false;
  std::string output;
};

int cmd_witness(const WitnessOptions& o) {
  const Trace t = read_trace(read_file(o.trace));
  const WitnessPrefix w = rgt(t);
  if (!o.model.empty()) {
    const CompositeSystem global = load_system(o.model);
    Trace oracle;
    try {
      oracle = witness_oracle(global, t);
    } catch (const Error& e) {
      if (e.code() == Errc::replay_failed) throw VerificationFailed{e.what()};
      throw;
    }
    if (strip_var(w.trace, kLocVar) != oracle.prefix(w.trace.steps.size())) {
      throw VerificationFailed{"reconstructed witness differs from the sequential replay"};
    }
    spdlog::info("witness agrees with the sequential replay of {} interactions", oracle.steps.size());
  }
  write_output(o.output, o.json ? write_witness_json(w) + "\n" : write_witness_lines(w));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// transform

struct TransformOptions {
  std::string model;
  std::string monitor;
  std::string variant = "default";
  bool json = false;
  std::string output;
};

int cmd_transform(const TransformOptions& o) {
  const CompositeSystem global = load_system(o.model);
  std::optional<MonitorSpec> monitor;
  if (!o.monitor.empty()) monitor = load_monitor(o.monitor);
  const CompositeSystem out = monitored_system(global, monitor, variant_from(o.variant));
  write_output(o.output, o.json ? render_model_json(out) : render_model(out));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify-equivalence

struct VerifyOptions {
  std::string model;
  std::string stage = "all";
  std::size_t bound = 20'000'000;
  std::string variant = "default";
  std::string monitor;
  std::string drop_delivery;
  bool json = false;
};

json check_pair(const std::string& name, const ExplicitLts& l, const ExplicitLts& r, bool& ok) {
  const auto t0 = std::chrono::steady_clock::now();
  const BisimResult res = weak_bisimilar(l, r);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ok = ok && res.equivalent;
  json out = {{"stage", name},
              {"left_states", l.num_states},
              {"right_states", r.num_states},
              {"blocks", res.blocks},
              {"equivalent", res.equivalent},
              {"seconds", secs}};
  if (!res.equivalent) {
    out["counterexample"] = res.counterexample;
    out["counterexample_side"] = res.counterexample_in_left ? "left" : "right";
  }
  return out;
}

int cmd_verify(const VerifyOptions& o) {
  const CompositeSystem global = load_system(o.model);
  const CompositeSystem partial = to_partial(global);
  std::optional<MonitorSpec> monitor;
  if (!o.monitor.empty()) monitor = load_monitor(o.monitor);

  bool ok = true;
  json stages = json::array();
  if (o.stage == "partial" || o.stage == "all") {
    spdlog::info("exploring global and partial-state systems");
    const ExplicitLts lb = explore(global, o.bound, nullptr);
    const ExplicitLts lp = explore(partial, o.bound, is_beta_label);
    stages.push_back(check_pair("partial", lb, lp, ok));
  }
  if (o.stage == "transformed" || o.stage == "all") {
    CompositeSystem transformed = partial;
    if (monitor) {
      const auto support = monitor_support(*monitor);
      transformed = transform_system(partial, std::vector<std::string>(support.begin(), support.end()),
                                     variant_from(o.variant));
    } else {
      transformed = transform_system(partial, std::nullopt, variant_from(o.variant));
    }
    if (!o.drop_delivery.empty()) {
      auto& ints = transformed.interactions;
      const std::string name = RgtSpec::out_port(o.drop_delivery);
      const auto before = ints.size();
      ints.erase(std::remove_if(ints.begin(), ints.end(), [&](const Interaction& in) { return in.name == name; }),
                 ints.end());
      if (ints.size() == before) throw CLI::ValidationError("--drop-delivery", "no interaction " + name);
      spdlog::warn("mutation: dropped {}", name);
    }
    spdlog::info("exploring partial-state and transformed systems");
    const ExplicitLts lp = explore(partial, o.bound, nullptr);
    const ExplicitLts lr = explore(transformed, o.bound, is_delivery_label);
    stages.push_back(check_pair("transformed", lp, lr, ok));
  }

  if (o.json) {
    std::cout << json{{"equivalent", ok}, {"stages", stages}}.dump(2) << "\n";
  } else {
    for (const auto& s : stages) {
      std::cout << s["stage"].get<std::string>() << ": " << (s["equivalent"].get<bool>() ? "EQUIVALENT" : "NOT EQUIVALENT")
                << " (" << s["left_states"] << " vs " << s["right_states"] << " states, " << s["blocks"]
                << " blocks)\n";
      if (s.contains("counterexample")) {
        std::cout << "  counterexample (" << s["counterexample_side"].get<std::string>() << " only):";
        for (const auto& l : s["counterexample"]) std::cout << " " << l.get<std::string>();
        std::cout << "\n";
      }
    }
    std::cout << (ok ? "EQUIVALENT" : "NOT EQUIVALENT") << "\n";
  }
  return ok ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Run, monitor and verify component-based systems under partial-state semantics"};
  app.require_subcommand(1);

  RunOptions run;
  auto* c_run = app.add_subcommand("run", "Execute a model and write its trace");
  c_run->add_option("model", run.model, "Model file, or builtin:task / builtin:rw")->required();
  c_run->add_option("--mode", run.mode, "global, partial or monitored")
      ->check(CLI::IsMember({"global", "partial", "monitored"}));
  c_run->add_option("--seed", run.seed, "Scheduler seed");
  c_run->add_option("--steps", run.steps, "Interactions to execute");
  c_run->add_option("--threads", run.threads, "Worker threads (real-time mode)")->check(CLI::PositiveNumber);
  c_run->add_flag("--real-time", run.real_time, "Run computation steps on worker threads");
  c_run->add_option("--busy-delay-us", run.delay_us, "Upper bound of the random busy delay (real-time mode)");
  c_run->add_option("--monitor", run.monitor, "Monitor file, or builtin:homogeneity");
  c_run->add_flag("--drain,!--no-drain", run.drain, "Flush pending steps and deliveries at the end");
  c_run->add_option("--rgt-variant", run.variant, "default, unguarded-new, unguarded-upd or unguarded-both");
  c_run->add_flag("--json", run.json, "Print the report as JSON");
  c_run->add_flag("--trace-json", run.trace_json, "Write the trace in compact JSON form");
  c_run->add_option("-o,--output", run.output, "Trace file");

  WitnessOptions wit;
  auto* c_wit = app.add_subcommand("witness", "Reconstruct the witness prefix of a partial-state trace");
  c_wit->add_option("trace", wit.trace, "Trace file (line or JSON form)")->required();
  c_wit->add_option("--model", wit.model, "Global model to replay the interactions against");
  c_wit->add_flag("--json", wit.json, "Write the witness in compact JSON form");
  c_wit->add_option("-o,--output", wit.output, "Output file");

  TransformOptions tr;
  auto* c_tr = app.add_subcommand("transform", "Emit the self-reconstructing system");
  c_tr->add_option("model", tr.model, "Model file, or builtin:task / builtin:rw")->required();
  c_tr->add_option("--monitor", tr.monitor, "Monitor file; restricts instrumentation to its support");
  c_tr->add_option("--rgt-variant", tr.variant, "default, unguarded-new, unguarded-upd or unguarded-both");
  c_tr->add_flag("--json", tr.json, "Emit the JSON rendering");
  c_tr->add_option("-o,--output", tr.output, "Output file");

  VerifyOptions ver;
  auto* c_ver = app.add_subcommand("verify-equivalence", "Check weak bisimilarity of the pipeline stages");
  c_ver->add_option("model", ver.model, "Model file, or builtin:task / builtin:rw")->required();
  c_ver->add_option("--stage", ver.stage, "partial, transformed or all")
      ->check(CLI::IsMember({"partial", "transformed", "all"}));
  c_ver->add_option("--bound", ver.bound, "Maximum number of states per system");
  c_ver->add_option("--rgt-variant", ver.variant, "default, unguarded-new, unguarded-upd or unguarded-both");
  c_ver->add_option("--monitor", ver.monitor, "Monitor file; restricts instrumentation to its support");
  c_ver->add_option("--drop-delivery", ver.drop_delivery, "Remove the delivery interaction of this tag");
  c_ver->add_flag("--json", ver.json, "Print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_run->parsed()) return cmd_run(run);
    if (c_wit->parsed()) return cmd_witness(wit);
    if (c_tr->parsed()) return cmd_transform(tr);
    if (c_ver->parsed()) return cmd_verify(ver);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const VerificationFailed& e) {
    std::cerr << "verification failed: " << e.message << "\n";
    return kExitFailed;
  } catch (const ValidationError& e) {
    std::cerr << "invalid model:\n";
    for (const auto& d : e.diagnostics()) std::cerr << "  " << diag_name(d.code) << ": " << d.message << "\n";
    return kExitInvalid;
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error at " << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
    switch (e.code()) {
      case Errc::invalid_argument: return kExitUsage;
      case Errc::not_enabled:
      case Errc::replay_failed:
      case Errc::bound_exceeded:
      case Errc::worker_panicked: return kExitFailed;
      default: return kExitInvalid;
    }
  }
  return kExitUsage;
}
