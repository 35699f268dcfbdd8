#include "rttforge/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <list>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rttforge/errors.hpp"
#include "rttforge/execution.hpp"
#include "rttforge/karn.hpp"
#include "rttforge/properties.hpp"
#include "rttforge/rto.hpp"
#include "rttforge/system.hpp"
#include "rttforge/tbf.hpp"

namespace rttforge::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Command-line parameters first, then the JSON config.
class Params {
 public:
  explicit Params(const RunConfig& cfg) {
    for (const auto& [k, v] : cfg.params) flags_[k] = v;
    if (!cfg.config.empty()) {
      std::ifstream in(cfg.config);
      if (!in) throw UsageError("cannot open config '" + cfg.config + "'");
      try {
        config_ = json::parse(in);
      } catch (const json::exception& e) {
        throw UsageError(std::string("bad config: ") + e.what());
      }
      if (!config_.is_object()) throw UsageError("config must be an object");
    }
  }

  std::optional<std::string> raw(const std::string& key) const {
    if (auto it = flags_.find(key); it != flags_.end()) return it->second;
    if (config_.contains(key)) {
      const json& v = config_.at(key);
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
      if (v.is_number_float()) {
        // Floats lose exactness; accept them only through their text form.
        return v.dump();
      }
      if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
      throw UsageError("config value for '" + key + "' has unsupported type");
    }
    return std::nullopt;
  }

  Rational rational(const std::string& key, std::optional<Rational> def) const {
    const auto v = raw(key);
    if (!v) {
      if (def) return *def;
      throw UsageError("missing parameter --" + key);
    }
    try {
      return Rational::parse(*v);
    } catch (const std::exception& e) {
      throw UsageError("--" + key + ": " + e.what());
    }
  }

  std::uint64_t natural(const std::string& key,
                        std::optional<std::uint64_t> def) const {
    const auto v = raw(key);
    if (!v) {
      if (def) return *def;
      throw UsageError("missing parameter --" + key);
    }
    if (v->empty() || v->find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("--" + key + ": expected a natural number");
    }
    return std::stoull(*v);
  }

 private:
  std::map<std::string, std::string> flags_;
  json config_ = json::object();
};

std::uint64_t effective_seed(const RunConfig& cfg, const Params& p,
                             std::uint64_t def) {
  if (const char* env = std::getenv("RTT_FORGE_SEED"); env && *env) {
    const std::string s(env);
    if (s.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("RTT_FORGE_SEED must be a natural number");
    }
    return std::stoull(s);
  }
  if (cfg.seed) return *cfg.seed;
  return p.natural("seed", def);
}

// Writes to the named file, or to `fallback` when path is empty.
void emit(const std::string& path, std::ostream& fallback,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  write(f);
}

std::ifstream open_input(const std::string& path) {
  if (path.empty()) throw UsageError("--input is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input '" + path + "'");
  return in;
}

json header(const std::string& command) {
  return json{{"schema", kSchema}, {"command", command}};
}

int finish(const json& report, bool ok, const RunConfig& cfg, std::ostream& err) {
  if (!cfg.report.empty()) {
    std::ofstream f(cfg.report, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + cfg.report + "'");
    f << report.dump(2) << '\n';
  }
  if (!ok) {
    err << report.dump() << '\n';
    return static_cast<int>(ExitCode::kCheckFailed);
  }
  return static_cast<int>(ExitCode::kOk);
}

int karn_run_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto in = open_input(cfg.input);
  Execution e;
  try {
    e = read_execution_csv(in);
  } catch (const std::exception& ex) {
    throw UsageError(std::string("execution csv: ") + ex.what());
  }
  json report = header("karn-run");
  report["events"] = e.size();
  const ValidityReport validity = validate(e);
  if (!validity.ok()) {
    json v = json::array();
    for (const auto& x : validity.violations) {
      v.push_back({{"index", x.index}, {"rule", x.rule}});
    }
    report["violations"] = v;
    report["ok"] = false;
    return finish(report, false, cfg, err);
  }
  KarnOptions opts;
  opts.allow_sample_at_high_zero = cfg.allow_sample_at_high_zero;
  KarnState s = karn_init();
  json failures = json::array();
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (!e[i].is_sender_event()) continue;
    karn_apply(s, e[i], i, opts);
    if (auto v = karn_invariant_violation(s)) {
      failures.push_back({{"check", "bookkeeping"}, {"index", i}, {"detail", *v}});
    }
  }
  emit(cfg.output, out, [&](std::ostream& o) { write_samples_csv(o, s.emitted); });

  report["samples"] = s.emitted.size();
  report["final_tau"] = s.tau;
  report["final_high"] = s.high;
  if (!opts.allow_sample_at_high_zero) {
    const ObsReport upper = check_sample_upper_bound(e);
    for (const auto& v : upper.violations) {
      failures.push_back({{"check", "upper-bound"}, {"detail", v}});
    }
    const bool fifo = is_fifo_ack(e);
    report["fifo_ack"] = fifo;
    if (fifo) {
      const ObsReport exact = check_sample_exact(e);
      for (const auto& v : exact.violations) {
        failures.push_back({{"check", "fifo-exact"}, {"detail", v}});
      }
    }
  }
  report["failures"] = failures;
  report["ok"] = failures.empty();
  return finish(report, failures.empty(), cfg, err);
}

RtoParams rto_params(const Params& p) {
  RtoParams rp{p.rational("alpha", Rational(1, 8)),
               p.rational("beta", Rational(1, 4)),
               p.rational("G", Rational(1, 100))};
  try {
    rp.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return rp;
}

int rto_run_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Params p(cfg);
  const RtoParams rp = rto_params(p);
  auto in = open_input(cfg.input);
  std::vector<Rational> samples;
  try {
    samples = read_samples_column(in);
  } catch (const std::exception& ex) {
    throw UsageError(std::string("samples csv: ") + ex.what());
  }
  if (samples.empty()) throw UsageError("no samples");
  for (const Rational& s : samples) {
    if (s.sign() <= 0) throw UsageError("samples must be positive");
  }
  const auto states = rto_run(samples, rp);
  emit(cfg.output, out, [&](std::ostream& o) {
    write_rto_csv(o, samples, states, cfg.decimal);
  });
  json report = header("rto-run");
  report["samples"] = samples.size();
  report["timeouts"] = detect_timeouts(samples, states);
  report["ok"] = true;
  return finish(report, true, cfg, err);
}

int rto_bounds_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Params p(cfg);
  const RtoParams rp = rto_params(p);
  const SteadyBand band{p.rational("c", std::nullopt),
                        p.rational("r", Rational(0))};
  try {
    band.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Rational srtt_prev = p.rational("srtt-prev", band.c);
  const Rational rttvar_prev = p.rational("rttvar-prev", srtt_prev / 2);
  const std::uint64_t n = p.natural("n", 0);
  const Rational eps = p.rational("eps", Rational(1, 100));
  if (eps.sign() <= 0) throw UsageError("--eps must be positive");

  const SrttBounds b = srtt_bounds(srtt_prev, band, rp.alpha, n);
  const Rational dx = delta_expr(srtt_prev, band, rp.alpha, n);
  const Rational delta = p.rational("delta", dx);
  json j = header("rto-bounds");
  j["n"] = n;
  j["L"] = b.L.to_string();
  j["H"] = b.H.to_string();
  j["L_decimal"] = b.L.to_decimal(12);
  j["H_decimal"] = b.H.to_decimal(12);
  j["delta_expr"] = dx.to_string();
  if (delta.sign() > 0) {
    j["rttvar_bound"] =
        rttvar_closed_bound(rttvar_prev, delta, rp.beta, n).to_string();
  } else {
    j["rttvar_bound"] = nullptr;
  }
  j["limit_delta_alpha"] = limit_delta(rp.alpha, eps);
  j["limit_delta_beta"] = limit_delta(rp.beta, eps);
  emit(cfg.output, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  return finish(j, true, cfg, err);
}

int scenario_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Params p(cfg);
  const RtoParams rp = rto_params(p);
  const std::string kind = cfg.mode.empty()
                               ? p.raw("kind").value_or("spike")
                               : cfg.mode;
  const SteadyBand band{p.rational("c", Rational(135, 2)),
                        p.rational("r", Rational(15, 2))};
  try {
    band.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::uint64_t n = p.natural("n", 1000);
  if (n == 0) throw UsageError("--n must be positive");
  std::vector<Rational> samples;
  if (kind == "spike") {
    const std::uint64_t period = p.natural("period", 100);
    if (period < 2) throw UsageError("--period must be at least 2");
    samples = gen_spike_steady(band, period, n);
  } else if (kind == "uniform") {
    const std::uint64_t grid = p.natural("grid", 20);
    if (grid == 0) throw UsageError("--grid must be positive");
    samples = gen_uniform_steady(band, n, grid, effective_seed(cfg, p, 1));
  } else {
    throw UsageError("unknown scenario kind '" + kind + "'");
  }
  const auto states = rto_run(samples, rp);
  emit(cfg.output, out, [&](std::ostream& o) {
    write_rto_csv(o, samples, states, cfg.decimal);
  });
  const auto timeouts = detect_timeouts(samples, states);
  json report = header("scenario");
  report["kind"] = kind;
  report["samples"] = samples.size();
  report["steady"] = steady_check(samples, band);
  report["timeouts"] = timeouts;
  if (kind == "spike") {
    report["warmup"] = spike_warmup(samples, timeouts, band);
  }
  report["ok"] = true;
  return finish(report, true, cfg, err);
}

json trace_summary(const std::string& command, const Trace& t,
                   const Rational& predicted) {
  const Rational eff = efficiency(t);
  json j = header(command);
  j["efficiency"] = eff.to_string();
  j["predicted"] = predicted.to_string();
  j["match"] = eff == predicted;
  j["steps"] = t.entries.size();
  j["receives"] = t.packets_received_by_receiver;
  j["final_digest"] = t.final_state.digest();
  return j;
}

int gbn_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Params p(cfg);
  Trace trace;
  json summary;
  try {
    if (cfg.mode == "best-case") {
      const std::uint64_t N = p.natural("window", std::nullopt);
      const std::uint64_t w = p.natural("windows", 1);
      if (N == 0 || w == 0) throw UsageError("--window/--windows must be positive");
      const Scenario sc = build_best_case(N, w);
      trace = replay(sc.initial, sc.script);
      summary = trace_summary("gbn best-case", trace, Rational(1));
      summary["windows"] = w;
    } else if (cfg.mode == "overtx") {
      const std::uint64_t N = p.natural("window", std::nullopt);
      const std::uint64_t R = p.natural("rate", std::nullopt);
      const std::uint64_t rat = p.natural("refill", std::nullopt);
      const std::uint64_t d = p.natural("dcap", std::nullopt);
      const OvertxScenario sc = build_overtx(N, R, rat, d);
      trace = replay(sc.initial, sc.script);
      summary = trace_summary(
          "gbn overtx", trace,
          predicted_overtx_eff(Rational(static_cast<long long>(R)),
                               Rational(static_cast<long long>(rat)),
                               Rational(static_cast<long long>(d)),
                               Rational(static_cast<long long>(N))));
      summary["warmup"] = sc.warmup;
    } else {
      throw UsageError("gbn needs best-case or overtx");
    }
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  if (!cfg.trace.empty()) {
    emit(cfg.trace, out, [&](std::ostream& o) { write_system_trace_csv(o, trace); });
  }
  emit(cfg.output, out, [&](std::ostream& o) { o << summary.dump(2) << '\n'; });
  const bool ok = summary["match"].get<bool>();
  return finish(summary, ok, cfg, err);
}

json suite_json(const SuiteResult& r) {
  json j{{"name", r.name},
         {"ok", r.ok()},
         {"trials", r.trials},
         {"violations", r.violations},
         {"failures", r.failures}};
  json counters = json::object();
  for (const auto& [k, v] : r.counters) counters[k] = v;
  j["counters"] = counters;
  return j;
}

int tbf_compose_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Params p(cfg);
  const std::uint64_t seed = effective_seed(cfg, p, 1);
  const std::uint64_t trials = cfg.trials.value_or(p.natural("trials", 1000));
  if (trials == 0) throw UsageError("--trials must be positive");
  const SuiteResult r = composition_suite(seed, trials);
  json j = header("tbf-compose-check");
  j["seed"] = seed;
  j["suite"] = suite_json(r);
  j["ok"] = r.ok();
  emit(cfg.output, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  return finish(j, r.ok(), cfg, err);
}

int tbf_trace_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Params p(cfg);
  const std::uint64_t seed = effective_seed(cfg, p, 1);
  Rng rng(seed);
  const TbfTrial trial = gen_tbf_trial(rng, p.natural("ops", 40));
  emit(cfg.output, out, [&](std::ostream& o) {
    write_tbf_trace_csv(o, tbf_trace(trial.start, trial.ops));
  });
  const bool ok = token_bound_check(trial.start, trial.ops);
  json j = header("tbf-trace");
  j["seed"] = seed;
  j["token_bound"] = ok;
  j["ok"] = ok;
  return finish(j, ok, cfg, err);
}

int gen_exec_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Params p(cfg);
  ExecConfig ec;
  ec.n_packets = p.natural("packets", 5);
  ec.loss_rate = p.rational("loss", Rational(0));
  if (ec.loss_rate.sign() < 0 || ec.loss_rate >= Rational(1)) {
    throw UsageError("--loss must be in [0,1)");
  }
  ec.reorder_window = p.natural("reorder", 0);
  ec.allow_ack_loss = p.natural("ack-loss", 0) != 0;
  ec.fifo_acks = p.natural("fifo", 0) != 0;
  ec.max_retransmissions = p.natural("max-retx", 0);
  ec.allow_duplication = p.natural("dup", 0) != 0;
  ec.seed = effective_seed(cfg, p, 1);
  const Execution e = gen_execution(ec);
  emit(cfg.output, out, [&](std::ostream& o) { write_execution_csv(o, e); });
  json j = header("gen-exec");
  j["events"] = e.size();
  j["ok"] = true;
  return finish(j, true, cfg, err);
}

int selftest_cmd(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Params p(cfg);
  const std::uint64_t seed = effective_seed(cfg, p, 1);
  const std::uint64_t trials = cfg.trials.value_or(p.natural("trials", 0));
  auto results = run_all_suites(seed, trials);
  // The warm-up is recomputed here; the acceptance suite pins it instead.
  {
    const SteadyBand band{Rational(135, 2), Rational(15, 2)};
    const auto samples = gen_spike_steady(band, 100, 1000);
    const auto states = rto_run(samples, RtoParams{});
    results.push_back(spike_suite(
        spike_warmup(samples, detect_timeouts(samples, states), band)));
  }
  json j = header("selftest");
  j["seed"] = seed;
  json suites = json::array();
  bool ok = true;
  for (const auto& r : results) {
    suites.push_back(suite_json(r));
    ok = ok && r.ok();
  }
  j["suites"] = suites;
  j["ok"] = ok;
  emit(cfg.output, out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  return finish(j, ok, cfg, err);
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  static const std::map<std::string,
                        std::function<int(const RunConfig&, std::ostream&,
                                          std::ostream&)>>
      commands = {{"karn-run", karn_run_cmd},
                  {"rto-run", rto_run_cmd},
                  {"rto-bounds", rto_bounds_cmd},
                  {"scenario", scenario_cmd},
                  {"gbn", gbn_cmd},
                  {"tbf-compose-check", tbf_compose_cmd},
                  {"tbf-trace", tbf_trace_cmd},
                  {"gen-exec", gen_exec_cmd},
                  {"selftest", selftest_cmd}};
  try {
    const auto it = commands.find(cfg.command);
    if (it == commands.end()) {
      throw UsageError("unknown command '" + cfg.command + "'");
    }
    return it->second(cfg, out, err);
  } catch (const UsageError& e) {
    err << json{{"schema", kSchema}, {"error", "usage"}, {"detail", e.what()}}
               .dump()
        << '\n';
    return static_cast<int>(ExitCode::kUsage);
  } catch (const std::exception& e) {
    err << json{{"schema", kSchema}, {"error", "failure"}, {"detail", e.what()}}
               .dump()
        << '\n';
    return static_cast<int>(ExitCode::kCheckFailed);
  }
}

namespace {

// Registers a string-valued parameter flag that lands in cfg.params.
struct ParamSink {
  std::vector<std::pair<std::string, std::string>> values;
  std::map<std::string, std::string> storage;

  void add(CLI::App* app, const std::string& name, const std::string& help) {
    app->add_option("--" + name, storage[name], help);
  }

  void collect(CLI::App* app) {
    for (auto& [name, value] : storage) {
      if (app->count("--" + name) > 0) values.emplace_back(name, value);
    }
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Karn sampling, RTO bounds and Go-Back-N over token buckets"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::uint64_t seed = 0, trials = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", cfg.output, "output file (default stdout)");
    sub->add_option("--report", cfg.report, "write the JSON report here");
    sub->add_option("--config", cfg.config, "JSON parameter file")
        ->check(CLI::ExistingFile);
  };

  // Options bind to strings inside each sink, so sinks must not move.
  std::list<std::pair<CLI::App*, ParamSink>> sinks;
  auto params = [&](CLI::App* sub, std::vector<std::pair<std::string, std::string>>
                                       names) -> ParamSink& {
    sinks.emplace_back(sub, ParamSink{});
    for (const auto& [n, h] : names) sinks.back().second.add(sub, n, h);
    return sinks.back().second;
  };

  auto* karn = app.add_subcommand("karn-run", "Karn samples of an execution CSV");
  common(karn);
  karn->add_option("-i,--input", cfg.input, "execution CSV")->required();
  karn->add_flag("--allow-sample-at-high-zero", cfg.allow_sample_at_high_zero,
                 "also sample on the first ACK");

  const std::vector<std::pair<std::string, std::string>> rto_flags = {
      {"alpha", "srtt gain"}, {"beta", "rttvar gain"}, {"G", "clock granularity"}};

  auto* rto = app.add_subcommand("rto-run", "RTO chain over a samples CSV");
  common(rto);
  rto->add_option("-i,--input", cfg.input, "samples CSV")->required();
  rto->add_flag("--decimal", cfg.decimal, "append a decimal rto column");
  params(rto, rto_flags);

  auto* bounds = app.add_subcommand("rto-bounds", "steady-state bound values");
  common(bounds);
  {
    auto names = rto_flags;
    names.insert(names.end(), {{"c", "band centre"},
                               {"r", "band radius"},
                               {"srtt-prev", "srtt before the window"},
                               {"rttvar-prev", "rttvar before the window"},
                               {"n", "window length minus one"},
                               {"eps", "target for the limit witness"},
                               {"delta", "deviation bound (default: formula)"}});
    params(bounds, names);
  }

  auto* scenario = app.add_subcommand("scenario", "generated sample scenarios");
  common(scenario);
  scenario->add_option("--kind", cfg.mode, "spike | uniform");
  scenario->add_flag("--decimal", cfg.decimal, "append a decimal rto column");
  scenario->add_option("--seed", seed, "seed for uniform samples");
  {
    auto names = rto_flags;
    names.insert(names.end(), {{"c", "band centre"},
                               {"r", "band radius"},
                               {"period", "spike period"},
                               {"n", "number of samples"},
                               {"grid", "uniform grid resolution"}});
    params(scenario, names);
  }

  auto* gbn = app.add_subcommand("gbn", "Go-Back-N efficiency scenarios");
  gbn->require_subcommand(1);
  auto* best = gbn->add_subcommand("best-case", "one packet per round trip");
  common(best);
  best->add_option("--trace", cfg.trace, "system trace CSV");
  params(best, {{"window", "window size N"}, {"windows", "number of windows"}});
  auto* overtx = gbn->add_subcommand("overtx", "over-transmission");
  common(overtx);
  overtx->add_option("--trace", cfg.trace, "system trace CSV");
  params(overtx, {{"window", "window size N"},
                  {"rate", "packets sent per tick R"},
                  {"refill", "tokens per tick"},
                  {"dcap", "queue capacity"}});

  auto* compose = app.add_subcommand("tbf-compose-check",
                                     "random serial/abstract TBF replays");
  common(compose);
  compose->add_option("--seed", seed, "seed");
  compose->add_option("--trials", trials, "number of scripts");

  auto* ttrace = app.add_subcommand("tbf-trace", "random TBF trace CSV");
  common(ttrace);
  ttrace->add_option("--seed", seed, "seed");
  params(ttrace, {{"ops", "maximum number of operations"}});

  auto* gen = app.add_subcommand("gen-exec", "random execution CSV");
  common(gen);
  gen->add_option("--seed", seed, "seed");
  params(gen, {{"packets", "number of packets"},
               {"loss", "loss probability"},
               {"reorder", "reorder window"},
               {"ack-loss", "1 to lose ACKs too"},
               {"fifo", "1 for FIFO ACK delivery"},
               {"max-retx", "retransmissions per packet"},
               {"dup", "1 to allow duplication"}});

  auto* self = app.add_subcommand("selftest", "run every property suite");
  common(self);
  self->add_option("--seed", seed, "seed");
  self->add_option("--trials", trials, "override every suite's trial count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return static_cast<int>(ExitCode::kUsage);
  }

  for (auto* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    if (cfg.command == "gbn") {
      for (auto* inner : sub->get_subcommands()) cfg.mode = inner->get_name();
    }
    if (auto* o = sub->get_option_no_throw("--seed"); o && o->count() > 0) {
      cfg.seed = seed;
    }
    if (auto* o = sub->get_option_no_throw("--trials"); o && o->count() > 0) {
      cfg.trials = trials;
    }
  }
  for (auto& [sub, sink] : sinks) {
    if (!sub->parsed()) continue;
    sink.collect(sub);
    cfg.params.insert(cfg.params.end(), sink.values.begin(), sink.values.end());
  }
  return dispatch(cfg, out, err);
}

}  // namespace rttforge::cli
