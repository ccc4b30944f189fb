#include "cli_app.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "primscope/bench_descriptor.hpp"
#include "primscope/error.hpp"
#include "primscope/focal_kernel.hpp"
#include "primscope/profile_stats.hpp"
#include "primscope/projection.hpp"
#include "primscope/report.hpp"
#include "primscope/scale_planner.hpp"
#include "primscope/verbose_log.hpp"

namespace primscope::cli {

namespace {

/// Post-parse problems that are the caller's fault (exit 1, not 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt_g(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string fmt_fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return std::string(buf);
}

std::string fmt_sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return std::string(buf);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_doc(const std::string& doc, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << doc;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw Error("cannot open output file: " + out_path);
  f << doc;
  f.flush();
  if (!f) throw Error("failed writing output file: " + out_path);
}

/// One value per line; a leading literal "value" header line is allowed.
std::vector<double> read_value_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "value") continue;
    double v = 0;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw FormatError(line_no, "expected one numeric value per line, got \"" + line + "\"");
    values.push_back(v);
  }
  return values;
}

Granularity granularity_or_throw(const std::string& name) {
  auto g = granularity_from(name);
  if (!g) throw UsageError("unknown granularity \"" + name + "\"");
  return *g;
}

OutputFormat format_or_throw(const std::string& name) {
  auto f = format_from(name);
  if (!f) throw UsageError("unknown format \"" + name + "\"");
  return *f;
}

// ---------------------------------------------------------------- parse ----

struct ParseArgs {
  std::string log_path;
  bool lenient = false;
  std::string out_path;
};

void run_parse(const ParseArgs& a, std::ostream& out, std::ostream& err) {
  ProfileLog log = parse_log_file(a.log_path, a.lenient);
  write_doc(to_csv(log), a.out_path, out);
  err << log.records.size() << " records, " << log.lines_header << " header, "
      << log.lines_skipped << " skipped of " << log.lines_total << " lines\n";
}

// ---------------------------------------------------------------- stats ----

struct StatsArgs {
  std::string log_path;
  bool lenient = false;
  std::string granularity = "kind";
  std::string format = "text";
  std::string out_path;
  bool include_create = false;
  bool with_fragmentation = false;
  int top_n = 10;
  std::uint64_t color_seed = 0;
};

void run_stats(const StatsArgs& a, std::ostream& out, std::ostream&) {
  ProfileLog log = parse_log_file(a.log_path, a.lenient);
  SummarizeOptions opts;
  opts.include_create = a.include_create;
  ProfileSummary summary = summarize(log, granularity_or_throw(a.granularity), opts);
  std::optional<double> frag;
  if (a.with_fragmentation) frag = fragmentation(spans_from_log(log));

  std::string doc;
  if (a.format == "json") {
    doc = summary_json(summary, frag);
  } else {
    ReportConfig cfg;
    cfg.output_format = format_or_throw(a.format);
    cfg.top_n = a.top_n;
    cfg.color_seed = a.color_seed;
    doc = render_summary(summary, cfg);
    if (frag && a.format == "text") doc += "fragmentation " + fmt_fixed(*frag, 4) + "\n";
  }
  write_doc(doc, a.out_path, out);
}

// -------------------------------------------------------------- compare ----

struct CompareArgs {
  std::string ref_path;
  std::string target_path;
  bool lenient = false;
  std::string granularity = "kind";
  std::string format = "text";
  std::string out_path;
  bool include_create = false;
  int top_n = 10;
  std::uint64_t color_seed = 0;
  bool log_scale = false;
};

void run_compare(const CompareArgs& a, std::ostream& out, std::ostream&) {
  SummarizeOptions opts;
  opts.include_create = a.include_create;
  Granularity gran = granularity_or_throw(a.granularity);
  ProfileSummary ref = summarize(parse_log_file(a.ref_path, a.lenient), gran, opts);
  ProfileSummary target = summarize(parse_log_file(a.target_path, a.lenient), gran, opts);
  ProfileDiff diff = compare(ref, target);
  ReportConfig cfg;
  cfg.output_format = format_or_throw(a.format);
  cfg.top_n = a.top_n;
  cfg.color_seed = a.color_seed;
  cfg.log_scale = a.log_scale;
  write_doc(render_diff(diff, cfg), a.out_path, out);
}

// ------------------------------------------------------------ bench-gen ----

struct BenchGenArgs {
  std::string log_path;
  bool lenient = false;
  std::string out_path;
};

void run_bench_gen(const BenchGenArgs& a, std::ostream& out, std::ostream& err) {
  ProfileLog log = parse_log_file(a.log_path, a.lenient);
  DescriptorSet set = dedupe(log);
  write_doc(emit_batch(set), a.out_path, out);
  err << set.entries.size() << " descriptors";
  if (set.unmapped_records > 0)
    err << " (" << set.unmapped_records << " records without a driver, "
        << fmt_g(set.unmapped_time_ms) << " ms unmapped)";
  err << "\n";
}

// --------------------------------------------------------- bench-ingest ----

struct BenchIngestArgs {
  std::string results_path;
  std::string out_path;
};

void run_bench_ingest(const BenchIngestArgs& a, std::ostream& out, std::ostream& err) {
  BenchResultMap results = ingest_results(read_file(a.results_path));
  write_doc(results_csv(results), a.out_path, out);
  err << results.size() << " results\n";
}

// -------------------------------------------------------------- project ----

struct ProjectArgs {
  std::string log_path;
  bool lenient = false;
  std::string results_path;
  std::string model = "echo";
  double seconds_per_flop = 0;
  std::vector<std::string> driver_ms;
  bool use_avg = false;
  double threshold = -1;  // < 0 means unset
  std::string format = "text";
  std::string out_path;
};

CostModel model_from_args(const ProjectArgs& a) {
  CostModel model;
  if (a.model == "echo") {
    model.mode = CostModel::Mode::echo;
  } else if (a.model == "flops-linear") {
    model.mode = CostModel::Mode::flops_linear;
    model.seconds_per_flop = a.seconds_per_flop;
  } else if (a.model == "constant") {
    model.mode = CostModel::Mode::constant_per_driver;
    if (a.driver_ms.empty())
      throw UsageError("the constant model needs at least one --driver-ms entry");
    for (const std::string& pair : a.driver_ms) {
      auto eq = pair.find('=');
      double ms = 0;
      if (eq == std::string::npos ||
          std::from_chars(pair.data() + eq + 1, pair.data() + pair.size(), ms).ptr !=
              pair.data() + pair.size())
        throw UsageError("--driver-ms expects driver=ms, got \"" + pair + "\"");
      model.driver_constants_ms[pair.substr(0, eq)] = ms;
    }
  } else {
    throw UsageError("unknown cost model \"" + a.model + "\"");
  }
  return model;
}

void run_project(const ProjectArgs& a, std::ostream& out, std::ostream& err) {
  ProfileLog log = parse_log_file(a.log_path, a.lenient);
  DescriptorSet set = dedupe(log);
  BenchResultMap results;
  if (!a.results_path.empty())
    results = ingest_results(read_file(a.results_path));
  else
    results = synthetic_run(set, model_from_args(a));

  ProjectOptions popts;
  popts.use_avg_as_achievable = a.use_avg;
  ProjectionReport report = project(set, results, popts);

  std::optional<double> threshold;
  if (a.threshold >= 0) threshold = a.threshold;
  std::string doc;
  if (a.format == "json")
    doc = projection_json(report);
  else if (a.format == "text")
    doc = projection_table(report, threshold);
  else
    throw UsageError("project supports --format text or json");
  write_doc(doc, a.out_path, out);
  if (set.unmapped_records > 0)
    err << set.unmapped_records << " records had no benchmark driver ("
        << fmt_g(set.unmapped_time_ms) << " ms excluded from coverage's matched share)\n";
}

// ---------------------------------------------------------------- focal ----

struct FocalArgs {
  std::string x_path;
  std::string y_path;
  std::int64_t random_n = 0;
  std::uint64_t seed = 42;
  double xlo = -20.0;
  double xhi = 20.0;
  double alpha = 0.25;
  double gamma = 2.0;
  std::string reduction = "none";
  std::string precision = "f64";
  double binary_tol = 0.0;
  double h = 1e-5;
  std::string out_path;
};

std::string loss_repr(const ElementBuffer& buf) {
  if (buf.is_scalar()) return fmt_g(buf.values[0]);
  std::string out = "[";
  const std::size_t show = std::min<std::size_t>(buf.values.size(), 4);
  for (std::size_t i = 0; i < show; ++i) {
    if (i) out += ", ";
    out += fmt_g(buf.values[i]);
  }
  if (buf.values.size() > show) out += ", ...";
  out += "] (" + std::to_string(buf.values.size()) + " values)";
  return out;
}

double max_abs_diff(const ElementBuffer& a, const ElementBuffer& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

void run_focal(const FocalArgs& a, std::ostream& out, std::ostream&) {
  std::vector<double> xvals, yvals;
  if (a.random_n > 0) {
    if (!(a.xlo < a.xhi)) throw UsageError("--xlo must be below --xhi");
    std::mt19937_64 rng(a.seed);
    std::uniform_real_distribution<double> dist_x(a.xlo, a.xhi);
    std::uniform_int_distribution<int> dist_y(0, 1);
    xvals.reserve(std::size_t(a.random_n));
    yvals.reserve(std::size_t(a.random_n));
    for (std::int64_t i = 0; i < a.random_n; ++i) {
      xvals.push_back(dist_x(rng));
      yvals.push_back(double(dist_y(rng)));
    }
  } else if (!a.x_path.empty() && !a.y_path.empty()) {
    xvals = read_value_csv(a.x_path);
    yvals = read_value_csv(a.y_path);
  } else {
    throw UsageError("provide --x and --y files, or --random N");
  }

  Precision prec = *precision_from(a.precision);  // choices guarded by CLI
  FocalParams params;
  params.alpha = a.alpha;
  params.gamma = a.gamma;
  params.reduction = *reduction_from(a.reduction);
  params.binary_tolerance = a.binary_tol;

  auto shape = std::vector<std::int64_t>{std::int64_t(xvals.size())};
  ElementBuffer x = ElementBuffer::make(shape, xvals,
                                        prec);
  ElementBuffer y = ElementBuffer::make(std::vector<std::int64_t>{std::int64_t(yvals.size())},
                                        yvals, prec);

  std::ostringstream doc;
  doc << "n " << xvals.size() << ", alpha " << fmt_g(a.alpha) << ", gamma " << fmt_g(a.gamma)
      << ", reduction " << a.reduction << ", precision " << to_string(prec) << "\n\n";

  struct ForwardRow {
    const char* name;
    ElementBuffer result;
    EvalStats stats;
    double ms;
  };
  auto timed = [&](const char* name, auto fn) {
    EvalStats stats;
    auto t0 = std::chrono::steady_clock::now();
    ElementBuffer r = fn(&stats);
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return ForwardRow{name, std::move(r), stats, ms};
  };
  ForwardRow ref = timed("reference ", [&](EvalStats* s) {
    return focal_forward_reference(x, y, params, s);
  });
  ForwardRow gen = timed("general   ", [&](EvalStats* s) {
    return focal_forward_general(x, y, params, s);
  });
  ForwardRow sim = timed("simplified", [&](EvalStats* s) {
    return focal_forward_simplified(x, y, params, s);
  });
  for (const ForwardRow* row : {&ref, &gen, &sim}) {
    doc << "forward " << row->name << "  passes " << row->stats.elementwise_passes << "  loss "
        << loss_repr(row->result) << "\n";
  }
  doc << "max |general - reference|    " << fmt_sci(max_abs_diff(gen.result, ref.result)) << "\n";
  doc << "max |simplified - reference| " << fmt_sci(max_abs_diff(sim.result, ref.result))
      << "\n\n";

  // Gradient check always runs at f64, whatever the datapath above used.
  ElementBuffer x64 = x, y64 = y;
  x64.precision = y64.precision = Precision::f64;
  ElementBuffer upstream =
      params.reduction == Reduction::none
          ? ElementBuffer::make(x.shape, std::vector<double>(x.values.size(), 1.0))
          : ElementBuffer::scalar(1.0);
  EvalStats bwd_stats;
  ElementBuffer analytic = focal_backward(upstream, x64, y64, params, &bwd_stats);
  ElementBuffer numeric = focal_backward_numeric(x64, y64, params, a.h);
  double worst_rel = 0;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < analytic.values.size(); ++i) {
    if (std::abs(numeric.values[i]) <= 1e-10) continue;
    ++checked;
    worst_rel = std::max(worst_rel, std::abs(analytic.values[i] - numeric.values[i]) /
                                        std::abs(numeric.values[i]));
  }
  doc << "backward passes " << bwd_stats.elementwise_passes << "\n";
  doc << "gradient check vs central differences (h " << fmt_g(a.h) << "): max relative error "
      << fmt_sci(worst_rel) << " over " << checked << " of " << analytic.values.size()
      << " elements\n\n";

  // Low-precision hazard report: same math, bf16 stores after every pass.
  ElementBuffer xb = ElementBuffer::make(x.shape, x.values, Precision::bf16_emulated);
  ElementBuffer yb = ElementBuffer::make(y.shape, y.values, Precision::bf16_emulated);
  ElementBuffer x_hi = ElementBuffer::make(x.shape, x.values, Precision::f64);
  ElementBuffer y_hi = ElementBuffer::make(y.shape, y.values, Precision::f64);
  double dev_ref = max_abs_diff(focal_forward_reference(xb, yb, params),
                                focal_forward_reference(x_hi, y_hi, params));
  double dev_sim = max_abs_diff(focal_forward_simplified(xb, yb, params),
                                focal_forward_simplified(x_hi, y_hi, params));
  doc << "bf16-emulated vs f64 loss deviation: reference " << fmt_sci(dev_ref) << ", simplified "
      << fmt_sci(dev_sim) << "\n\n";

  doc << "timing (informational): reference " << fmt_fixed(ref.ms, 3) << " ms, general "
      << fmt_fixed(gen.ms, 3) << " ms, simplified " << fmt_fixed(sim.ms, 3) << " ms\n";
  write_doc(doc.str(), a.out_path, out);
}

// ----------------------------------------------------------------- plan ----

struct PlanArgs {
  std::int64_t sockets = 0;
  std::int64_t cores = 0;
  double mem_total = 0;
  double mem_per_rank = 0;
  std::int64_t local_batch = 1;
  std::int64_t max_global_batch = -1;  // < 0 means unset
  std::string format = "text";
  std::string out_path;
};

void run_plan(const PlanArgs& a, std::ostream& out, std::ostream&) {
  SystemSpec spec;
  spec.sockets = a.sockets;
  spec.cores_per_socket = a.cores;
  spec.mem_total_gb = a.mem_total;
  spec.mem_per_rank_gb = a.mem_per_rank;
  std::vector<RankPlan> plans = enumerate_plans(spec, a.local_batch);
  std::optional<std::int64_t> max_batch;
  if (a.max_global_batch >= 0) max_batch = a.max_global_batch;
  std::string doc;
  if (a.format == "json")
    doc = plans_json(spec, plans, max_batch);
  else if (a.format == "text")
    doc = plans_table(plans, max_batch);
  else
    throw UsageError("plan supports --format text or json");
  write_doc(doc, a.out_path, out);
}

// --------------------------------------------------------------- report ----

struct ReportArgs {
  std::string doc_path;
  std::string format = "text";
  std::string out_path;
  int top_n = 10;
  std::uint64_t color_seed = 0;
  bool log_scale = false;
  double threshold = -1;
};

void run_report(const ReportArgs& a, std::ostream& out, std::ostream&) {
  std::string text = read_file(a.doc_path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw FormatError(0, "input is not a JSON document");
  std::string type = j.value("type", "");

  ReportConfig cfg;
  cfg.output_format = format_or_throw(a.format);
  cfg.top_n = a.top_n;
  cfg.color_seed = a.color_seed;
  cfg.log_scale = a.log_scale;

  std::string doc;
  if (type == "summary") {
    doc = render_summary(summary_from_json(text), cfg);
  } else if (type == "diff") {
    doc = render_diff(diff_from_json(text), cfg);
  } else if (type == "projection") {
    ProjectionReport report = projection_from_json(text);
    std::optional<double> threshold;
    if (a.threshold >= 0) threshold = a.threshold;
    if (cfg.output_format == OutputFormat::text)
      doc = projection_table(report, threshold);
    else if (cfg.output_format == OutputFormat::json)
      doc = projection_json(report);
    else
      throw UsageError("projection documents render as text or json only");
  } else {
    throw FormatError(0, "unknown document type \"" + type + "\"");
  }
  write_doc(doc, a.out_path, out);
}

void add_out_option(CLI::App* cmd, std::string& out_path) {
  cmd->add_option("--out", out_path, "write to this file instead of standard output");
}

void add_lenient_flag(CLI::App* cmd, bool& lenient) {
  cmd->add_flag("--lenient,!--strict", lenient,
                "skip malformed record lines instead of failing (default: strict)");
}

void add_granularity_option(CLI::App* cmd, std::string& granularity) {
  cmd->add_option("--granularity", granularity, "grouping granularity")
      ->check(CLI::IsMember({"kind", "kind-dir", "kind-dir-dtype"}));
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"deep-learning primitive profiling, projection, and kernel verification"};
  app.name("primscope");
  app.require_subcommand(1);

  ParseArgs parse_args;
  auto* cmd_parse = app.add_subcommand("parse", "parse a verbose log and export records as CSV");
  cmd_parse->add_option("log", parse_args.log_path, "verbose log file")->required();
  add_lenient_flag(cmd_parse, parse_args.lenient);
  add_out_option(cmd_parse, parse_args.out_path);
  cmd_parse->callback([&] { run_parse(parse_args, out, err); });

  StatsArgs stats_args;
  auto* cmd_stats = app.add_subcommand("stats", "kernel-time breakdown of a verbose log");
  cmd_stats->add_option("log", stats_args.log_path, "verbose log file")->required();
  add_lenient_flag(cmd_stats, stats_args.lenient);
  add_granularity_option(cmd_stats, stats_args.granularity);
  cmd_stats->add_option("--format", stats_args.format, "text, csv, json, or svg")
      ->check(CLI::IsMember({"text", "csv", "json", "svg"}));
  cmd_stats->add_flag("--include-create", stats_args.include_create,
                      "count create events too, not only exec");
  cmd_stats->add_flag("--fragmentation", stats_args.with_fragmentation,
                      "also report the trace fragmentation score");
  cmd_stats->add_option("--top-n", stats_args.top_n, "chart segments before folding into other")
      ->check(CLI::PositiveNumber);
  cmd_stats->add_option("--color-seed", stats_args.color_seed, "chart palette seed");
  add_out_option(cmd_stats, stats_args.out_path);
  cmd_stats->callback([&] { run_stats(stats_args, out, err); });

  CompareArgs compare_args;
  auto* cmd_compare =
      app.add_subcommand("compare", "diff two verbose logs: per-group time ratios, missing ops");
  cmd_compare->add_option("reference", compare_args.ref_path, "reference log file")->required();
  cmd_compare->add_option("target", compare_args.target_path, "target log file")->required();
  add_lenient_flag(cmd_compare, compare_args.lenient);
  add_granularity_option(cmd_compare, compare_args.granularity);
  cmd_compare->add_option("--format", compare_args.format, "text, csv, json, or svg")
      ->check(CLI::IsMember({"text", "csv", "json", "svg"}));
  cmd_compare->add_flag("--include-create", compare_args.include_create,
                        "count create events too, not only exec");
  cmd_compare->add_option("--top-n", compare_args.top_n, "chart rows")->check(CLI::PositiveNumber);
  cmd_compare->add_option("--color-seed", compare_args.color_seed, "chart palette seed");
  cmd_compare->add_flag("--log-scale", compare_args.log_scale, "log-scale ratio bars in svg");
  add_out_option(cmd_compare, compare_args.out_path);
  cmd_compare->callback([&] { run_compare(compare_args, out, err); });

  BenchGenArgs bench_gen_args;
  auto* cmd_bench_gen =
      app.add_subcommand("bench-gen", "emit a deduplicated benchmark batch file from a log");
  cmd_bench_gen->add_option("log", bench_gen_args.log_path, "verbose log file")->required();
  add_lenient_flag(cmd_bench_gen, bench_gen_args.lenient);
  add_out_option(cmd_bench_gen, bench_gen_args.out_path);
  cmd_bench_gen->callback([&] { run_bench_gen(bench_gen_args, out, err); });

  BenchIngestArgs bench_ingest_args;
  auto* cmd_bench_ingest =
      app.add_subcommand("bench-ingest", "validate and normalize a benchmark results CSV");
  cmd_bench_ingest->add_option("results", bench_ingest_args.results_path, "results CSV file")
      ->required();
  add_out_option(cmd_bench_ingest, bench_ingest_args.out_path);
  cmd_bench_ingest->callback([&] { run_bench_ingest(bench_ingest_args, out, err); });

  ProjectArgs project_args;
  auto* cmd_project =
      app.add_subcommand("project", "efficiency projection: achievable vs observed kernel time");
  cmd_project->add_option("log", project_args.log_path, "verbose log file")->required();
  add_lenient_flag(cmd_project, project_args.lenient);
  auto* opt_results = cmd_project->add_option(
      "--results", project_args.results_path,
      "benchmark results CSV (omit to use a synthetic cost model)");
  cmd_project
      ->add_option("--model", project_args.model,
                   "synthetic cost model: echo, flops-linear, or constant")
      ->check(CLI::IsMember({"echo", "flops-linear", "constant"}))
      ->excludes(opt_results);
  cmd_project->add_option("--seconds-per-flop", project_args.seconds_per_flop,
                          "flops-linear model parameter");
  cmd_project->add_option("--driver-ms", project_args.driver_ms,
                          "constant model entry, driver=ms (repeatable)");
  cmd_project->add_flag("--use-avg", project_args.use_avg,
                        "use benchmark avg time as achievable instead of best");
  cmd_project->add_option("--threshold", project_args.threshold,
                          "mark entries with efficiency below this as candidates");
  cmd_project->add_option("--format", project_args.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  add_out_option(cmd_project, project_args.out_path);
  cmd_project->callback([&] { run_project(project_args, out, err); });

  FocalArgs focal_args;
  auto* cmd_focal = app.add_subcommand(
      "focal", "evaluate focal-loss kernels: losses, gradient check, pass counts");
  auto* opt_x = cmd_focal->add_option("--x", focal_args.x_path, "logits CSV, one value per line");
  auto* opt_y = cmd_focal->add_option("--y", focal_args.y_path, "targets CSV, one value per line");
  cmd_focal->add_option("--random", focal_args.random_n, "generate N random points instead")
      ->excludes(opt_x)
      ->excludes(opt_y);
  cmd_focal->add_option("--seed", focal_args.seed, "random generator seed");
  cmd_focal->add_option("--xlo", focal_args.xlo, "random logit lower bound");
  cmd_focal->add_option("--xhi", focal_args.xhi, "random logit upper bound");
  cmd_focal->add_option("--alpha", focal_args.alpha, "class weight; negative disables weighting");
  cmd_focal->add_option("--gamma", focal_args.gamma, "focusing exponent, >= 0");
  cmd_focal->add_option("--reduction", focal_args.reduction, "none, mean, or sum")
      ->check(CLI::IsMember({"none", "mean", "sum"}));
  cmd_focal->add_option("--precision", focal_args.precision, "f64, f32, or bf16_emulated")
      ->check(CLI::IsMember({"f64", "f32", "bf16_emulated", "bf16"}));
  cmd_focal->add_option("--binary-tol", focal_args.binary_tol,
                        "snap targets within this distance of 0/1");
  cmd_focal->add_option("--fd-step", focal_args.h, "finite-difference step for the gradient check");
  add_out_option(cmd_focal, focal_args.out_path);
  cmd_focal->callback([&] { run_focal(focal_args, out, err); });

  PlanArgs plan_args;
  auto* cmd_plan =
      app.add_subcommand("plan", "enumerate rank/thread placements for a multi-socket system");
  cmd_plan->add_option("--sockets", plan_args.sockets, "CPU sockets")->required();
  cmd_plan->add_option("--cores", plan_args.cores, "cores per socket")->required();
  cmd_plan->add_option("--mem-total", plan_args.mem_total, "total memory, GB")->required();
  cmd_plan->add_option("--mem-per-rank", plan_args.mem_per_rank, "memory need per rank, GB")
      ->required();
  cmd_plan->add_option("--local-batch", plan_args.local_batch, "per-rank batch size")
      ->required();
  cmd_plan->add_option("--max-global-batch", plan_args.max_global_batch,
                       "advise when a plan's global batch exceeds this");
  cmd_plan->add_option("--format", plan_args.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}));
  add_out_option(cmd_plan, plan_args.out_path);
  cmd_plan->callback([&] { run_plan(plan_args, out, err); });

  ReportArgs report_args;
  auto* cmd_report = app.add_subcommand(
      "report", "render a JSON document from stats/compare/project in another format");
  cmd_report->add_option("document", report_args.doc_path, "JSON document file")->required();
  cmd_report->add_option("--format", report_args.format, "text, csv, json, or svg")
      ->check(CLI::IsMember({"text", "csv", "json", "svg"}));
  cmd_report->add_option("--top-n", report_args.top_n, "chart segments before folding")
      ->check(CLI::PositiveNumber);
  cmd_report->add_option("--color-seed", report_args.color_seed, "chart palette seed");
  cmd_report->add_flag("--log-scale", report_args.log_scale, "log-scale ratio bars in svg");
  cmd_report->add_option("--threshold", report_args.threshold,
                         "candidate cutoff for projection tables");
  add_out_option(cmd_report, report_args.out_path);
  cmd_report->callback([&] { run_report(report_args, out, err); });

  try {
    std::reverse(args.begin(), args.end());  // CLI11's vector parse wants reversed args
    app.parse(args);
    return 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace primscope::cli
