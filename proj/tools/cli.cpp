#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "manifest.hpp"
#include "probesched/adapt.hpp"
#include "probesched/cost.hpp"
#include "probesched/error.hpp"
#include "probesched/io.hpp"
#include "probesched/parallel.hpp"
#include "probesched/simulate.hpp"
#include "probesched/solver.hpp"

namespace probesched::cli {

namespace {

struct GraphFlags {
  std::string path;
  bool one_based = false;
  bool undirected = false;
  std::vector<std::string> bias;
};

void add_graph_flags(CLI::App& sub, GraphFlags& g, bool required) {
  auto* opt = sub.add_option("--graph", g.path, "edge list (SNAP style, '#' comments)");
  if (required) opt->required();
  sub.add_flag("--one-based", g.one_based, "shift 1-based node ids down by one");
  sub.add_flag("--undirected", g.undirected, "add the reverse of every edge");
  sub.add_option("--bias", g.bias, "head-probability band min:max:prob (max exclusive, 'inf' allowed); repeatable");
}

std::size_t parse_count(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ValidationError("bad degree '" + std::string(s) + "'");
  return v;
}

std::vector<BiasBand> parse_bands(const std::vector<std::string>& specs) {
  if (specs.empty()) return default_bias_bands();
  std::vector<BiasBand> bands;
  for (const std::string& spec : specs) {
    const std::size_t a = spec.find(':');
    const std::size_t b = a == std::string::npos ? a : spec.find(':', a + 1);
    if (b == std::string::npos) throw ValidationError("bias band must be min:max:prob, got '" + spec + "'");
    const std::string_view sv(spec);
    const std::string_view max = sv.substr(a + 1, b - a - 1);
    BiasBand band{parse_count(sv.substr(0, a)), max == "inf" ? kUnboundedDegree : parse_count(max), 0.0};
    try {
      band.head_prob = parse_double(sv.substr(b + 1), 0);
    } catch (const ParseError&) {
      throw ValidationError("bad head probability in band '" + spec + "'");
    }
    bands.push_back(band);
  }
  std::sort(bands.begin(), bands.end(), [](const BiasBand& x, const BiasBand& y) { return x.min_outdeg < y.min_outdeg; });
  validate_bands(bands);
  return bands;
}

Graph load_graph_input(const GraphFlags& g, RunManifest& m) {
  m.input("graph", g.path);
  m.param("one_based", g.one_based ? "1" : "0");
  m.param("undirected", g.undirected ? "1" : "0");
  return load_graph(read_file(g.path), {g.one_based, g.undirected});
}

CascadeSource cascade_input(const GraphFlags& g, RunManifest& m) {
  Graph graph = load_graph_input(g, m);
  std::vector<BiasBand> bands = parse_bands(g.bias);
  std::string desc;
  for (const BiasBand& b : bands) {
    if (!desc.empty()) desc += ',';
    desc += std::to_string(b.min_outdeg) + ':' +
            (b.max_outdeg == kUnboundedDegree ? std::string("inf") : std::to_string(b.max_outdeg)) + ':' +
            format_double(b.head_prob);
  }
  m.param("bias", desc);
  return CascadeSource(std::move(graph), std::move(bands));
}

GeneratingProcess process_input(const std::string& path, std::size_t nodes, RunManifest& m) {
  m.input("process", path);
  return parse_process(read_file(path), nodes == 0 ? std::nullopt : std::optional<std::size_t>(nodes));
}

void record_cost_params(RunManifest& m, double theta, unsigned c) {
  m.param("theta", format_double(theta));
  m.param("c", std::to_string(c));
}

std::string trace_csv(const SolveResult& r) {
  std::string out = "iteration,cost\n0," + format_double(r.initial_cost) + "\n";
  for (std::size_t j = 0; j < r.cost_trace.size(); ++j) {
    out += std::to_string(j + 1) + ',' + format_double(r.cost_trace[j]) + '\n';
  }
  return out;
}

std::string with_suffix(const std::string& path, const char* suffix) { return path + suffix; }

// ---------------------------------------------------------------- solve

struct SolveOpts {
  std::string process, sample, out, trace, manifest;
  std::size_t nodes = 0;
  double theta = 0.75;
  unsigned c = 1;
  std::size_t max_iters = 50;
  double tol = 1e-9;
  std::size_t workers = 0;
  bool combiner = true;
  bool random_start = false;
  std::uint64_t seed = 1;
};

int cmd_solve(const SolveOpts& o, RunManifest& m, std::ostream& out) {
  if (o.process.empty() == o.sample.empty()) throw ValidationError("give exactly one of --process or --sample");
  if (!o.sample.empty() && o.nodes == 0) throw ValidationError("--sample requires --nodes");
  if (!o.process.empty() && o.workers > 0) throw ValidationError("--workers applies to --sample input only");

  const CostParams params(o.theta, o.c);
  record_cost_params(m, o.theta, o.c);
  m.param("max_iters", std::to_string(o.max_iters));
  m.param("tol", format_double(o.tol));
  m.param("workers", std::to_string(o.workers));
  m.param("combiner", o.combiner ? "1" : "0");
  m.param("random_start", o.random_start ? "1" : "0");
  m.param("seed", std::to_string(o.seed));

  SolverConfig cfg;
  cfg.max_iters = o.max_iters;
  cfg.conv_tol = o.tol;

  const auto solve = [&]() -> SolveResult {
    if (!o.process.empty()) {
      const GeneratingProcess process = process_input(o.process, o.nodes, m);
      m.param("nodes", std::to_string(process.n()));
      if (o.random_start) {
        CounterRng rng(o.seed);
        cfg.start = random_interior_start(process.n(), rng);
      }
      return wiggins(process, params, cfg);
    }
    m.input("sample", o.sample);
    m.param("nodes", std::to_string(o.nodes));
    const Sample sample = parse_sample(read_file(o.sample));
    if (o.random_start) {
      CounterRng rng(o.seed);
      cfg.start = random_interior_start(o.nodes, rng);
    }
    return o.workers > 0 ? parallel_wiggins_apx(sample, o.nodes, params, cfg, {o.workers, o.combiner})
                         : wiggins_apx(sample, o.nodes, params, cfg);
  };
  const SolveResult result = solve();

  const std::string trace = o.trace.empty() ? with_suffix(o.out, ".trace.csv") : o.trace;
  write_file(o.out, format_schedule(result.schedule));
  write_file(trace, trace_csv(result));
  m.output("schedule", o.out);
  m.output("trace", trace);

  const double final_cost = result.cost_trace.empty() ? result.initial_cost : result.cost_trace.back();
  out << "converged=" << (result.converged ? 1 : 0) << " iterations=" << result.iterations
      << " cost=" << format_double(final_cost) << '\n';
  return result.converged ? kExitOk : kExitNotConverged;
}

// ---------------------------------------------------------------- sample

struct SampleOpts {
  GraphFlags graph;
  std::string process, out, manifest;
  std::size_t nodes = 0;
  std::size_t steps = 0;
  bool auto_steps = false;
  double epsilon = 0.1;
  double theta = 0.75;
  unsigned r = 1;
  std::uint64_t seed = 1;
};

int cmd_sample(const SampleOpts& o, RunManifest& m, std::ostream& out) {
  if (o.process.empty() == o.graph.path.empty()) throw ValidationError("give exactly one of --graph or --process");
  if (o.auto_steps == (o.steps != 0)) throw ValidationError("give exactly one of --steps (>= 1) or --auto-steps");

  const ItemSource src = o.process.empty() ? ItemSource(cascade_input(o.graph, m))
                                           : ItemSource(process_input(o.process, o.nodes, m));
  const std::size_t n = source_nodes(src);
  std::size_t steps = o.steps;
  if (o.auto_steps) {
    steps = required_sample_length({n, o.epsilon, o.theta, o.r});
    m.param("epsilon", format_double(o.epsilon));
    m.param("theta", format_double(o.theta));
    m.param("r", std::to_string(o.r));
  }
  m.param("nodes", std::to_string(n));
  m.param("steps", std::to_string(steps));
  m.param("seed", std::to_string(o.seed));

  CounterRng rng(o.seed);
  const Sample sample = collect_sample(src, steps, rng);
  write_file(o.out, format_sample(sample));
  m.output("sample", o.out);
  out << "steps=" << steps << " items=" << sample.occurrences() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
  GraphFlags graph;
  std::string schedule, process, out, manifest;
  std::size_t nodes = 0;
  double theta = 0.75;
  unsigned c = 1;
  std::size_t steps = 0;
  bool without_replacement = false;
  std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateOpts& o, RunManifest& m, std::ostream& out) {
  if (o.process.empty() == o.graph.path.empty()) throw ValidationError("give exactly one of --graph or --process");
  if (o.steps < 1) throw ValidationError("--steps must be at least 1");
  const CostParams params(o.theta, o.c);
  m.input("schedule", o.schedule);
  const Schedule p = parse_schedule(read_file(o.schedule));
  const ItemSource src = o.process.empty() ? ItemSource(cascade_input(o.graph, m))
                                           : ItemSource(process_input(o.process, o.nodes, m));
  if (p.size() != source_nodes(src)) {
    throw DimensionError("schedule has " + std::to_string(p.size()) + " nodes, source has " +
                         std::to_string(source_nodes(src)));
  }
  record_cost_params(m, o.theta, o.c);
  m.param("steps", std::to_string(o.steps));
  m.param("probe_mode", o.without_replacement ? "without_replacement" : "with_replacement");
  m.param("seed", std::to_string(o.seed));

  SimulationOptions sopts;
  sopts.mode = o.without_replacement ? ProbeMode::without_replacement : ProbeMode::with_replacement;
  CounterRng rng(o.seed);
  const LoadTrace trace = run_simulation(src, p, params, o.steps, rng, sopts);
  write_file(o.out, format_load_csv(trace));
  m.output("load", o.out);
  out << "avg_load=" << format_double(trace.average_load()) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- compare

struct CompareOpts {
  GraphFlags graph;
  std::string out, manifest;
  std::size_t samples = 10;
  double theta = 0.75;
  unsigned c = 1;
  double epsilon = 0.1;
  unsigned r = 1;
  std::size_t steps = 0;
  std::uint64_t seed = 1;
};

int cmd_compare(const CompareOpts& o, RunManifest& m, std::ostream& out) {
  if (o.samples < 1) throw ValidationError("--samples must be at least 1");
  const CostParams params(o.theta, o.c);
  const CascadeSource cascade = cascade_input(o.graph, m);
  const std::size_t n = cascade.graph().n();
  const std::size_t steps = o.steps != 0 ? o.steps : required_sample_length({n, o.epsilon, o.theta, o.r});
  record_cost_params(m, o.theta, o.c);
  m.param("samples", std::to_string(o.samples));
  m.param("epsilon", format_double(o.epsilon));
  m.param("r", std::to_string(o.r));
  m.param("steps", std::to_string(steps));
  m.param("seed", std::to_string(o.seed));

  const ItemSource src = cascade;
  const CounterRng root(o.seed);
  // Stream 0 trains; streams 1..k evaluate.
  CounterRng train_rng = root.fork(0);
  const Sample training = collect_sample(src, steps, train_rng);
  std::vector<Sample> evaluation;
  for (std::size_t k = 1; k <= o.samples; ++k) {
    CounterRng rng = root.fork(k);
    evaluation.push_back(collect_sample(src, steps, rng));
  }

  const SolveResult solved = wiggins_apx(training, n, params);
  std::vector<NamedSchedule> schedules{{"wiggins-apx", solved.schedule}};
  for (BaselineKind kind : {BaselineKind::uniform, BaselineKind::indeg, BaselineKind::outdeg, BaselineKind::totdeg}) {
    schedules.push_back({std::string(to_string(kind)), baseline_schedule(kind, cascade.graph())});
  }
  std::vector<ComparisonRow> rows = compare_schedules(schedules, evaluation, params);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ComparisonRow& a, const ComparisonRow& b) { return a.mean_cost < b.mean_cost; });

  std::string csv = "rank,schedule,mean_cost\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv += std::to_string(i + 1) + ',' + rows[i].name + ',' + format_double(rows[i].mean_cost) + '\n';
    out << (i + 1) << ' ' << rows[i].name << ' ' << format_double(rows[i].mean_cost) << '\n';
  }
  write_file(o.out, csv);
  m.output("table", o.out);
  return kExitOk;
}

// ---------------------------------------------------------------- dynamic

struct DynamicOpts {
  GraphFlags graph;
  std::string process, phases = "N,P,G,N", out, events, phase_out, manifest;
  std::size_t nodes = 0;
  std::size_t phase_length = 0;
  std::size_t resample_length = 0;
  double theta = 0.75;
  unsigned c = 1;
  double epsilon = 0.5;
  unsigned r = 1;
  double K = 3.0;
  double min_count = 10.0;
  bool detect = false;
  std::uint64_t seed = 1;
};

struct PhaseToken {
  std::string label;
  bool perturb = false;
  bool sample = false;
};

// Comma-separated tokens: N (normal), P (perturb at phase start),
// G (scheduled re-sampling at phase start), or PG for both.
std::vector<PhaseToken> parse_phases(const std::string& spec) {
  std::vector<PhaseToken> phases;
  std::size_t begin = 0;
  while (begin <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', begin), spec.size());
    PhaseToken tok{spec.substr(begin, comma - begin)};
    if (tok.label == "N") {
    } else if (tok.label == "P") {
      tok.perturb = true;
    } else if (tok.label == "G") {
      tok.sample = true;
    } else if (tok.label == "PG") {
      tok.perturb = tok.sample = true;
    } else {
      throw ValidationError("bad phase token '" + tok.label + "' (use N, P, G or PG)");
    }
    phases.push_back(std::move(tok));
    begin = comma + 1;
  }
  return phases;
}

int cmd_dynamic(const DynamicOpts& o, RunManifest& m, std::ostream& out) {
  if (o.process.empty() == o.graph.path.empty()) throw ValidationError("give exactly one of --graph or --process");
  const std::vector<PhaseToken> phases = parse_phases(o.phases);
  const CostParams params(o.theta, o.c);
  AdaptiveConfig acfg;
  acfg.staleness_factor = o.K;
  acfg.epsilon = o.epsilon;
  acfg.r = o.r;
  acfg.min_count = o.min_count;
  acfg.resample_length = o.resample_length;
  acfg.validate();

  const ItemSource src = o.process.empty() ? ItemSource(cascade_input(o.graph, m))
                                           : ItemSource(process_input(o.process, o.nodes, m));
  const std::size_t n = source_nodes(src);
  const std::size_t auto_length = required_sample_length({n, o.epsilon, o.theta, o.r});
  const std::size_t phase_length = o.phase_length != 0 ? o.phase_length : auto_length;
  const std::size_t resample_length = o.resample_length != 0 ? o.resample_length : auto_length;
  if (resample_length > phase_length) throw ValidationError("re-sampling would outlast its phase");

  record_cost_params(m, o.theta, o.c);
  m.param("phases", o.phases);
  m.param("phase_length", std::to_string(phase_length));
  m.param("resample_length", std::to_string(resample_length));
  m.param("epsilon", format_double(o.epsilon));
  m.param("r", std::to_string(o.r));
  m.param("K", format_double(o.K));
  m.param("min_count", format_double(o.min_count));
  m.param("detect", o.detect ? "1" : "0");
  m.param("nodes", std::to_string(n));
  m.param("seed", std::to_string(o.seed));

  AdaptivePlan plan;
  plan.total_steps = phases.size() * phase_length;
  plan.detect_drift = o.detect;
  for (std::size_t k = 0; k < phases.size(); ++k) {
    if (phases[k].perturb) plan.perturb_at.push_back(k * phase_length);
    if (phases[k].sample) plan.sample_at.push_back(k * phase_length);
  }

  CounterRng rng(o.seed);
  // Initial schedule: exact for an explicit process, learned from a training
  // sample for a cascade source.
  Schedule initial = Schedule::uniform(n);
  if (const auto* process = std::get_if<GeneratingProcess>(&src)) {
    initial = wiggins(*process, params).schedule;
  } else {
    CounterRng train_rng = rng.fork(4);
    initial = wiggins_apx(collect_sample(src, resample_length, train_rng), n, params).schedule;
  }
  const AdaptiveResult result = adaptive_loop(src, initial, params, acfg, {}, plan, rng);

  const std::string events = o.events.empty() ? with_suffix(o.out, ".events.log") : o.events;
  const std::string phase_out = o.phase_out.empty() ? with_suffix(o.out, ".phases.csv") : o.phase_out;
  std::string csv = "phase,label,begin,end,average_load\n";
  for (std::size_t k = 0; k < phases.size(); ++k) {
    const std::size_t b = k * phase_length;
    const std::size_t e = b + phase_length;
    const std::string avg = format_double(result.trace.average_load(b, e));
    csv += std::to_string(k) + ',' + phases[k].label + ',' + std::to_string(b) + ',' + std::to_string(e) + ',' + avg +
           '\n';
    out << "phase=" << k << " label=" << phases[k].label << " avg_load=" << avg << '\n';
  }
  write_file(o.out, format_load_csv(result.trace));
  write_file(events, format_event_log(result.events));
  write_file(phase_out, csv);
  m.output("load", o.out);
  m.output("events", events);
  m.output("phases", phase_out);
  out << "events=" << result.events.size() << '\n';
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericalError*>(&e) || dynamic_cast<const DegenerateProcessError*>(&e)) {
    return kExitNumerical;
  }
  return kExitUsage;
}

int run(const std::string& command, const std::vector<std::string>& args, const std::string& manifest_path,
        std::ostream& err, const std::function<int(RunManifest&)>& body) {
  RunManifest manifest(command);
  manifest.set_argv(args);
  manifest.start();
  int code = kExitOk;
  try {
    code = body(manifest);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    code = exit_code_for(e);
  }
  manifest.finish(code);
  try {
    manifest.write(manifest_path);
  } catch (const std::exception& e) {
    err << "error: cannot write manifest: " << e.what() << '\n';
    if (code == kExitOk) code = kExitUsage;
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probe schedules for catching new items in a network", "probesched"};
  app.require_subcommand(1);

  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "compute an optimal schedule from a process or a sample");
  solve->add_option("--process", so.process, "generating process file");
  solve->add_option("--sample", so.sample, "sample file");
  solve->add_option("--nodes", so.nodes, "node count (required with --sample)");
  solve->add_option("--theta", so.theta, "novelty decay")->capture_default_str();
  solve->add_option("--c", so.c, "probes per step")->capture_default_str();
  solve->add_option("--max-iters", so.max_iters)->capture_default_str();
  solve->add_option("--tol", so.tol, "L-infinity convergence tolerance")->capture_default_str();
  solve->add_option("--workers", so.workers, "run sample iterations on the parallel engine with this many workers");
  solve->add_flag("!--no-combiner", so.combiner, "shuffle every contribution instead of combining per worker");
  solve->add_flag("--random-start", so.random_start, "start from a random interior schedule");
  solve->add_option("--seed", so.seed)->capture_default_str();
  solve->add_option("--out", so.out, "schedule output")->required();
  solve->add_option("--trace", so.trace, "cost trace CSV (default <out>.trace.csv)");
  solve->add_option("--manifest", so.manifest, "manifest path (default <out>.manifest)");

  SampleOpts sa;
  auto* sample = app.add_subcommand("sample", "record a fully observed sample");
  add_graph_flags(*sample, sa.graph, false);
  sample->add_option("--process", sa.process, "generating process file");
  sample->add_option("--nodes", sa.nodes, "node count for the process (default: largest id + 1)");
  sample->add_option("--steps", sa.steps, "sample length");
  sample->add_flag("--auto-steps", sa.auto_steps, "use the length required for --epsilon accuracy");
  sample->add_option("--epsilon", sa.epsilon)->capture_default_str();
  sample->add_option("--theta", sa.theta)->capture_default_str();
  sample->add_option("--r", sa.r, "bound on the number of nodes an item reaches")->capture_default_str();
  sample->add_option("--seed", sa.seed)->capture_default_str();
  sample->add_option("--out", sa.out, "sample output")->required();
  sample->add_option("--manifest", sa.manifest, "manifest path (default <out>.manifest)");

  SimulateOpts si;
  auto* simulate = app.add_subcommand("simulate", "simulate probing with a fixed schedule");
  simulate->add_option("--schedule", si.schedule, "schedule file")->required();
  add_graph_flags(*simulate, si.graph, false);
  simulate->add_option("--process", si.process, "generating process file");
  simulate->add_option("--nodes", si.nodes, "node count for the process");
  simulate->add_option("--theta", si.theta)->capture_default_str();
  simulate->add_option("--c", si.c)->capture_default_str();
  simulate->add_option("--steps", si.steps)->required();
  simulate->add_flag("--without-replacement", si.without_replacement, "draw c distinct nodes per step");
  simulate->add_option("--seed", si.seed)->capture_default_str();
  simulate->add_option("--out", si.out, "load CSV output")->required();
  simulate->add_option("--manifest", si.manifest, "manifest path (default <out>.manifest)");

  CompareOpts co;
  auto* compare = app.add_subcommand("compare", "rank the learned schedule against degree baselines");
  add_graph_flags(*compare, co.graph, true);
  compare->add_option("--samples", co.samples, "evaluation samples")->capture_default_str();
  compare->add_option("--theta", co.theta)->capture_default_str();
  compare->add_option("--c", co.c)->capture_default_str();
  compare->add_option("--epsilon", co.epsilon, "sets the sample length")->capture_default_str();
  compare->add_option("--r", co.r)->capture_default_str();
  compare->add_option("--steps", co.steps, "sample length override");
  compare->add_option("--seed", co.seed)->capture_default_str();
  compare->add_option("--out", co.out, "ranked CSV output")->required();
  compare->add_option("--manifest", co.manifest, "manifest path (default <out>.manifest)");

  DynamicOpts dy;
  auto* dynamic = app.add_subcommand("dynamic", "adaptive run with perturbations and re-sampling");
  add_graph_flags(*dynamic, dy.graph, false);
  dynamic->add_option("--process", dy.process, "generating process file");
  dynamic->add_option("--nodes", dy.nodes, "node count for the process");
  dynamic->add_option("--phases", dy.phases, "comma-separated N, P, G, PG")->capture_default_str();
  dynamic->add_option("--phase-length", dy.phase_length, "steps per phase (default: sample length for --epsilon)");
  dynamic->add_option("--resample-length", dy.resample_length, "re-sampling length (default as phase length)");
  dynamic->add_option("--theta", dy.theta)->capture_default_str();
  dynamic->add_option("--c", dy.c)->capture_default_str();
  dynamic->add_option("--epsilon", dy.epsilon)->capture_default_str();
  dynamic->add_option("--r", dy.r)->capture_default_str();
  dynamic->add_option("--K", dy.K, "staleness factor")->capture_default_str();
  dynamic->add_option("--min-count", dy.min_count, "observations before a set can go stale")->capture_default_str();
  dynamic->add_flag("--detect", dy.detect, "re-sample when a set goes stale");
  dynamic->add_option("--seed", dy.seed)->capture_default_str();
  dynamic->add_option("--out", dy.out, "load CSV output")->required();
  dynamic->add_option("--events", dy.events, "event log (default <out>.events.log)");
  dynamic->add_option("--phase-out", dy.phase_out, "per-phase CSV (default <out>.phases.csv)");
  dynamic->add_option("--manifest", dy.manifest, "manifest path (default <out>.manifest)");

  std::string rerun_path;
  auto* rerun = app.add_subcommand("rerun", "repeat the command recorded in a manifest");
  rerun->add_option("manifest", rerun_path, "manifest file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // A subcommand's own --help surfaces as CallForHelp above; everything
    // else is a usage error.
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  const auto manifest_for = [](const std::string& explicit_path, const std::string& out_path) {
    return explicit_path.empty() ? out_path + ".manifest" : explicit_path;
  };

  if (solve->parsed()) {
    return run("solve", args, manifest_for(so.manifest, so.out), err,
               [&](RunManifest& m) { return cmd_solve(so, m, out); });
  }
  if (sample->parsed()) {
    return run("sample", args, manifest_for(sa.manifest, sa.out), err,
               [&](RunManifest& m) { return cmd_sample(sa, m, out); });
  }
  if (simulate->parsed()) {
    return run("simulate", args, manifest_for(si.manifest, si.out), err,
               [&](RunManifest& m) { return cmd_simulate(si, m, out); });
  }
  if (compare->parsed()) {
    return run("compare", args, manifest_for(co.manifest, co.out), err,
               [&](RunManifest& m) { return cmd_compare(co, m, out); });
  }
  if (dynamic->parsed()) {
    return run("dynamic", args, manifest_for(dy.manifest, dy.out), err,
               [&](RunManifest& m) { return cmd_dynamic(dy, m, out); });
  }
  // rerun: replay the recorded argv. The replayed command writes its own
  // manifest, so a rerun produces exactly one.
  std::vector<std::string> recorded;
  try {
    recorded = RunManifest::recorded_argv(read_file(rerun_path));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (!recorded.empty() && recorded.front() == "rerun") {
    err << "error: manifest records a rerun\n";
    return kExitUsage;
  }
  return run_cli(recorded, out, err);
}

}  // namespace probesched::cli
