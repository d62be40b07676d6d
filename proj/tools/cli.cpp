#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <locale>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "mrrope/diagnostics.hpp"
#include "mrrope/model_config.hpp"
#include "mrrope/plan.hpp"
#include "mrrope/plan_doc.hpp"
#include "mrrope/series_io.hpp"

namespace mrrope::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt9(double v) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(9) << v;
  return s.str();
}

// Pins '.' decimals and ungrouped digits on a stream for the current scope,
// so output stays stable under any global locale.
class ClassicLocaleGuard {
 public:
  explicit ClassicLocaleGuard(std::ostream& stream)
      : stream_(stream), saved_(stream.imbue(std::locale::classic())) {}
  ~ClassicLocaleGuard() { stream_.imbue(saved_); }
  ClassicLocaleGuard(const ClassicLocaleGuard&) = delete;
  ClassicLocaleGuard& operator=(const ClassicLocaleGuard&) = delete;

 private:
  std::ostream& stream_;
  std::locale saved_;
};

// ---- shared option blocks ----------------------------------------------

struct GeometryOpts {
  std::string config_path;
  double base = std::numeric_limits<double>::quiet_NaN();
  int head_dim = 0;
  std::int64_t trained_len = 0;
};

void add_geometry_flags(CLI::App* cmd, GeometryOpts& g) {
  cmd->add_option("--config", g.config_path, "model config JSON (rope_theta, head_dim, ...)");
  cmd->add_option("--base", g.base, "rotational base b");
  cmd->add_option("--head-dim", g.head_dim, "head dimension |D| (even)");
  cmd->add_option("--trained-len", g.trained_len, "trained context length");
}

RopeParams resolve_params(const GeometryOpts& g) {
  RopeParams params;
  bool have_base = false, have_dim = false, have_len = false;
  if (!g.config_path.empty()) {
    const ModelConfigDoc doc = load_model_config(g.config_path);
    params = doc.to_rope_params();
    have_base = have_dim = have_len = true;
  }
  if (!std::isnan(g.base)) {
    params.base = g.base;
    have_base = true;
  }
  if (g.head_dim != 0) {
    params.head_dim = g.head_dim;
    have_dim = true;
  }
  if (g.trained_len != 0) {
    params.trained_len = g.trained_len;
    have_len = true;
  }
  if (!have_base) throw UsageError("missing --base (or --config)");
  if (!have_dim) throw UsageError("missing --head-dim (or --config)");
  if (!have_len) throw UsageError("missing --trained-len (or --config)");
  params.validate();
  return params;
}

struct PlanOpts {
  std::string method = "none";
  double scale = 1.0;
  double alpha = kDefaultAlpha;
  double beta_hp = kDefaultBeta;
};

void add_plan_flags(CLI::App* cmd, PlanOpts& p, bool with_method = true) {
  if (with_method) {
    cmd->add_option("--method", p.method, "extension method")
        ->check(CLI::IsMember(known_method_names()));
  }
  cmd->add_option("--scale", p.scale, "extension factor S = L_test / L_train");
  cmd->add_option("--alpha", p.alpha, "full-interpolation rotation-progress threshold");
  cmd->add_option("--beta", p.beta_hp, "extrapolation rotation-progress threshold");
}

Method parse_method_or_throw(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw UsageError("unknown method '" + name + "'");
  return *m;
}

// ---- list / range parsing ----------------------------------------------

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
  if (used != text.size()) throw UsageError("not a number: '" + text + "'");
  return v;
}

// "a:b:c" expands to a, a+c, ..., up to and including b when it lands on the
// grid; "x,y,z" is taken verbatim.
std::vector<double> parse_positions(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError("range syntax is start:stop:step, got '" + spec + "'");
    const double start = to_double(parts[0]);
    const double stop = to_double(parts[1]);
    const double step = to_double(parts[2]);
    if (!(step > 0.0) || stop < start) {
      throw UsageError("range '" + spec + "' needs stop >= start and step > 0");
    }
    for (double x = start; x <= stop + 1e-9 * step; x += step) {
      out.push_back(x);
    }
  } else {
    for (const auto& item : split(spec, ',')) {
      out.push_back(to_double(item));
    }
  }
  if (out.empty()) throw UsageError("empty position list '" + spec + "'");
  return out;
}

std::pair<int, int> parse_int_range(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 1) {
    const int v = static_cast<int>(to_double(parts[0]));
    return {v, v};
  }
  if (parts.size() != 2) throw UsageError("range syntax is lo:hi, got '" + spec + "'");
  const int lo = static_cast<int>(to_double(parts[0]));
  const int hi = static_cast<int>(to_double(parts[1]));
  if (hi < lo) throw UsageError("range '" + spec + "' needs hi >= lo");
  return {lo, hi};
}

// ---- output helpers ------------------------------------------------------

void write_series_file_or_stream(const DiagnosticSeries& series, const std::string& out_prefix,
                                 const std::string& format, std::ostream& out) {
  const bool json = format == "json";
  if (out_prefix.empty()) {
    out << "# series " << series.label << "\n";
    json ? write_series_json(out, series) : write_series_csv(out, series);
    return;
  }
  const std::string path = out_prefix + "." + series.label + (json ? ".json" : ".csv");
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot write " + path);
  json ? write_series_json(file, series) : write_series_csv(file, series);
  if (!file) throw std::runtime_error("write to " + path + " failed");
}

// ---- subcommands ---------------------------------------------------------

struct FreqsOpts {
  GeometryOpts geometry;
  std::string out_path;
  std::string format = "csv";
};

int cmd_freqs(const FreqsOpts& opts, std::ostream& out) {
  const RopeParams params = resolve_params(opts.geometry);
  const FrequencySchedule sched = build_frequencies(params);

  std::ofstream file;
  std::ostream* dst = &out;
  if (!opts.out_path.empty()) {
    file.open(opts.out_path);
    if (!file) throw std::runtime_error("cannot write " + opts.out_path);
    dst = &file;
  }
  const ClassicLocaleGuard locale_guard(*dst);

  if (opts.format == "json") {
    nlohmann::ordered_json j;
    for (int i = 1; i <= sched.pairs(); ++i) {
      j["j"].push_back(i);
      j["theta"].push_back(sched.theta(i));
      j["wavelength"].push_back(wavelength(sched, i));
      j["progress"].push_back(rotation_progress(sched, i, params.trained_len));
    }
    *dst << j.dump(2) << '\n';
  } else {
    *dst << "j,theta,wavelength,progress\n";
    for (int i = 1; i <= sched.pairs(); ++i) {
      *dst << i << ',' << fmt9(sched.theta(i)) << ',' << fmt9(wavelength(sched, i)) << ','
           << fmt9(rotation_progress(sched, i, params.trained_len)) << '\n';
    }
  }
  return 0;
}

struct PlanCmdOpts {
  GeometryOpts geometry;
  PlanOpts plan;
  std::string out_path;
};

int cmd_plan(const PlanCmdOpts& opts, std::ostream& out, std::ostream& err) {
  const RopeParams params = resolve_params(opts.geometry);
  const Method method = parse_method_or_throw(opts.plan.method);
  const ScalePlan plan =
      compile_plan(method, params, opts.plan.scale, opts.plan.alpha, opts.plan.beta_hp);
  const ScalePlanDoc doc = make_plan_doc(plan, params);

  if (opts.out_path.empty()) {
    out << to_json(doc);
  } else {
    save_plan_doc(doc, opts.out_path);
  }

  double band_product = 1.0;
  for (int j = plan.d_low; j < plan.d_high && j <= plan.pairs(); ++j) {
    band_product *= plan.lambda(j);
  }
  err << "plan: method=" << method_name(plan.method) << " d_low=" << plan.d_low
      << " d_high=" << plan.d_high << " band_product=" << fmt9(band_product)
      << " temperature=" << fmt9(plan.temperature) << "\n";
  return 0;
}

struct BoundOpts {
  GeometryOpts geometry;
  PlanOpts plan;
  std::string methods = "none";
  std::string plan_path;
  double m_max = 0.0;
  double grid_step = 0.0;
  bool band_only = false;
  std::string out_prefix;
  std::string format = "csv";
};

FrequencySchedule band_slice(const RopeParams& params, const ScalePlan& plan) {
  if (!plan.has_band()) {
    throw std::invalid_argument("method '" + std::string(method_name(plan.method)) +
                                "' has no middle band");
  }
  const FrequencySchedule sched = scaled_frequencies(params, plan);
  std::vector<double> thetas;
  for (int j = plan.d_low; j < plan.d_high && j <= plan.pairs(); ++j) {
    thetas.push_back(sched.theta(j));
  }
  return FrequencySchedule(std::move(thetas));
}

int cmd_bound(const BoundOpts& opts, std::ostream& out) {
  const RopeParams params = resolve_params(opts.geometry);

  std::vector<ScalePlan> plans;
  if (!opts.plan_path.empty()) {
    plans.push_back(plan_from_doc(load_plan_doc(opts.plan_path)));
  } else {
    for (const auto& name : split(opts.methods, ',')) {
      plans.push_back(compile_plan(parse_method_or_throw(name), params, opts.plan.scale,
                                   opts.plan.alpha, opts.plan.beta_hp));
    }
  }
  if (plans.empty()) throw UsageError("no methods given");

  double largest_scale = 1.0;
  for (const ScalePlan& plan : plans) largest_scale = std::max(largest_scale, plan.scale);
  const double m_max = opts.m_max > 0.0
                           ? opts.m_max
                           : 16.0 * largest_scale * static_cast<double>(params.trained_len);
  const double grid_step =
      opts.grid_step > 0.0 ? opts.grid_step : static_cast<double>(params.trained_len) / 64.0;
  if (grid_step > m_max / 100.0) {
    throw UsageError("grid step " + fmt9(grid_step) + " exceeds m_max/100 = " + fmt9(m_max / 100.0));
  }

  std::vector<std::pair<std::string, std::optional<double>>> roots;
  for (const ScalePlan& plan : plans) {
    const FrequencySchedule sched =
        opts.band_only ? band_slice(params, plan) : bound_schedule(params, plan);
    BoundProfile profile = find_bound_root(sched, m_max, grid_step);
    profile.series.label = std::string(method_name(plan.method));
    roots.emplace_back(profile.series.label, profile.root);
    write_series_file_or_stream(profile.series, opts.out_prefix, opts.format, out);
  }

  out << "# roots\nmethod,root\n";
  for (const auto& [name, root] : roots) {
    out << name << ',' << (root ? fmt9(*root) : "none") << '\n';
  }
  return 0;
}

struct EstimateOpts {
  std::string bases = "100,10000,1000000";
  int head_dim = 128;
  std::int64_t trained_len = 0;
  std::string out_prefix;
  std::string format = "csv";
};

int cmd_estimate(const EstimateOpts& opts, std::ostream& out) {
  if (opts.trained_len < 16) throw UsageError("--trained-len must be >= 16");
  const auto bases = split(opts.bases, ',');
  if (bases.empty()) throw UsageError("--base needs at least one value");

  std::vector<std::pair<std::string, double>> scores;
  for (const auto& base_text : bases) {
    const double base = to_double(base_text);
    if (!(base > 0.0)) throw UsageError("base must be positive, got '" + base_text + "'");
    const RopeParams params{base, opts.head_dim, opts.trained_len};
    const FrequencySchedule sched = build_frequencies(params);
    const double beta = std::pow(base, 1.0 / params.pairs());

    DiagnosticSeries series;
    series.label = "base=" + base_text;
    for (std::int64_t m = 0; m <= opts.trained_len; ++m) {
      series.xs.push_back(static_cast<double>(m));
      series.ys.push_back(biased_estimate(sched, beta, static_cast<double>(m)));
    }
    write_series_file_or_stream(series, opts.out_prefix, opts.format, out);
    scores.emplace_back(base_text, linear_fit_r2(series.xs, series.ys));
  }

  out << "# r_squared\nbase,r_squared\n";
  for (const auto& [base_text, r2] : scores) {
    out << base_text << ',' << fmt9(r2) << '\n';
  }
  return 0;
}

struct AttnSimOpts {
  GeometryOpts geometry;
  PlanOpts plan;
  std::string plan_path;
  int pairs = 50;
  std::string positions;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "csv";
};

int cmd_attn_sim(const AttnSimOpts& opts, std::ostream& out) {
  if (opts.pairs < 1) throw UsageError("--pairs must be >= 1");
  const RopeParams params = resolve_params(opts.geometry);
  const ScalePlan plan =
      !opts.plan_path.empty()
          ? plan_from_doc(load_plan_doc(opts.plan_path))
          : compile_plan(parse_method_or_throw(opts.plan.method), params, opts.plan.scale,
                         opts.plan.alpha, opts.plan.beta_hp);

  std::vector<double> positions;
  if (opts.positions.empty()) {
    const double stop = plan.scale * static_cast<double>(params.trained_len);
    positions = parse_positions("0:" + fmt9(stop) + ":" + fmt9(std::max(1.0, stop / 64.0)));
  } else {
    positions = parse_positions(opts.positions);
  }

  const DiagnosticSeries series =
      middle_attention_sim(plan, params, opts.pairs, positions, opts.seed);

  std::ofstream file;
  std::ostream* dst = &out;
  if (!opts.out_path.empty()) {
    file.open(opts.out_path);
    if (!file) throw std::runtime_error("cannot write " + opts.out_path);
    dst = &file;
  }
  opts.format == "json" ? write_series_json(*dst, series) : write_series_csv(*dst, series);
  return 0;
}

struct SweepOpts {
  GeometryOpts geometry;
  PlanOpts plan;
  std::string dl_range;
  std::string dh_range;
  double m_max = 0.0;
  double grid_step = 0.0;
};

int cmd_sweep(const SweepOpts& opts, std::ostream& out) {
  const RopeParams params = resolve_params(opts.geometry);
  const Method method = parse_method_or_throw(opts.plan.method);
  if (method != Method::YaRN && method != Method::MrRopeUni && method != Method::MrRopePro) {
    throw UsageError("sweep needs a banded method (yarn, mrrope-uni or mrrope-pro)");
  }
  if (opts.dl_range.empty() || opts.dh_range.empty()) {
    throw UsageError("--dl-range and --dh-range are required");
  }
  const auto [dl_lo, dl_hi] = parse_int_range(opts.dl_range);
  const auto [dh_lo, dh_hi] = parse_int_range(opts.dh_range);

  const double m_max = opts.m_max > 0.0
                           ? opts.m_max
                           : 16.0 * opts.plan.scale * static_cast<double>(params.trained_len);
  const double grid_step =
      opts.grid_step > 0.0 ? opts.grid_step : static_cast<double>(params.trained_len) / 64.0;
  if (grid_step > m_max / 100.0) {
    throw UsageError("grid step " + fmt9(grid_step) + " exceeds m_max/100 = " + fmt9(m_max / 100.0));
  }

  out << "d_low,d_high,root\n";
  for (int dl = dl_lo; dl <= dl_hi; ++dl) {
    for (int dh = dh_lo; dh <= dh_hi; ++dh) {
      out << dl << ',' << dh << ',';
      if (dl >= 1 && dh <= params.pairs() + 1 && dl < dh) {
        ScalePlan plan;
        switch (method) {
          case Method::YaRN:
            plan = plan_yarn_with_band(params, opts.plan.scale, Boundaries{dl, dh});
            break;
          case Method::MrRopeUni:
            plan = plan_mrrope_uni_with_band(params, opts.plan.scale, Boundaries{dl, dh});
            break;
          default:
            plan = plan_mrrope_pro_with_band(params, opts.plan.scale, Boundaries{dl, dh});
            break;
        }
        const BoundProfile profile =
            find_bound_root(scaled_frequencies(params, plan), m_max, grid_step);
        if (profile.root) out << fmt9(*profile.root);
      }
      out << '\n';
    }
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rotary position-embedding scale-plan compiler and diagnostics"};
  app.require_subcommand(1);

  FreqsOpts freqs_opts;
  auto* freqs = app.add_subcommand("freqs", "frequency, wavelength and rotation-progress table");
  add_geometry_flags(freqs, freqs_opts.geometry);
  freqs->add_option("--out", freqs_opts.out_path, "output file (default: stdout)");
  freqs->add_option("--format", freqs_opts.format)->check(CLI::IsMember({"csv", "json"}));

  PlanCmdOpts plan_opts;
  auto* plan = app.add_subcommand("plan", "compile and serialize a scale plan");
  add_geometry_flags(plan, plan_opts.geometry);
  add_plan_flags(plan, plan_opts.plan);
  plan->add_option("--out", plan_opts.out_path, "plan JSON file (default: stdout)");

  BoundOpts bound_opts;
  auto* bound = app.add_subcommand("bound", "bound-function series and context-window roots");
  add_geometry_flags(bound, bound_opts.geometry);
  add_plan_flags(bound, bound_opts.plan, /*with_method=*/false);
  bound->add_option("--methods,--method", bound_opts.methods, "comma-separated methods");
  bound->add_option("--plan", bound_opts.plan_path, "use a saved plan document instead");
  bound->add_option("--m-max", bound_opts.m_max, "scan range (default 16*S*trained_len)");
  bound->add_option("--grid-step", bound_opts.grid_step, "scan step (default trained_len/64)");
  bound->add_flag("--band-only", bound_opts.band_only, "restrict to the middle band");
  bound->add_option("--out", bound_opts.out_prefix, "write series to <out>.<method>.<ext>");
  bound->add_option("--format", bound_opts.format)->check(CLI::IsMember({"csv", "json"}));

  EstimateOpts est_opts;
  auto* estimate = app.add_subcommand("estimate", "biased positional estimate and linearity");
  estimate->add_option("--base", est_opts.bases, "comma-separated list of bases");
  estimate->add_option("--head-dim", est_opts.head_dim);
  estimate->add_option("--trained-len", est_opts.trained_len)->required();
  estimate->add_option("--out", est_opts.out_prefix, "write series to <out>.<label>.<ext>");
  estimate->add_option("--format", est_opts.format)->check(CLI::IsMember({"csv", "json"}));

  AttnSimOpts attn_opts;
  auto* attn = app.add_subcommand("attn-sim", "seeded middle-band attention-score simulation");
  add_geometry_flags(attn, attn_opts.geometry);
  add_plan_flags(attn, attn_opts.plan);
  attn->add_option("--plan", attn_opts.plan_path, "use a saved plan document instead");
  attn->add_option("--pairs", attn_opts.pairs, "token pairs per position");
  attn->add_option("--positions", attn_opts.positions, "start:stop:step or comma list");
  attn->add_option("--seed", attn_opts.seed, "RNG seed");
  attn->add_option("--out", attn_opts.out_path, "output file (default: stdout)");
  attn->add_option("--format", attn_opts.format)->check(CLI::IsMember({"csv", "json"}));

  SweepOpts sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "bound-root grid over explicit (d_low, d_high) bands");
  add_geometry_flags(sweep, sweep_opts.geometry);
  add_plan_flags(sweep, sweep_opts.plan);
  sweep->get_option("--method")->default_str("mrrope-pro");
  sweep_opts.plan.method = "mrrope-pro";
  sweep->add_option("--dl-range", sweep_opts.dl_range, "lo:hi inclusive")->required();
  sweep->add_option("--dh-range", sweep_opts.dh_range, "lo:hi inclusive")->required();
  sweep->add_option("--m-max", sweep_opts.m_max);
  sweep->add_option("--grid-step", sweep_opts.grid_step);

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("mrrope");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const ClassicLocaleGuard out_guard(out);
  const ClassicLocaleGuard err_guard(err);
  try {
    if (freqs->parsed()) return cmd_freqs(freqs_opts, out);
    if (plan->parsed()) return cmd_plan(plan_opts, out, err);
    if (bound->parsed()) return cmd_bound(bound_opts, out);
    if (estimate->parsed()) return cmd_estimate(est_opts, out);
    if (attn->parsed()) return cmd_attn_sim(attn_opts, out);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace mrrope::cli
