#include "iterlog/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "iterlog/cmj.hpp"
#include "iterlog/dist.hpp"
#include "iterlog/gauss.hpp"
#include "iterlog/numeric.hpp"
#include "iterlog/renewal.hpp"
#include "iterlog/report.hpp"
#include "iterlog/rrt.hpp"
#include "iterlog/stats.hpp"
#include "iterlog/verify.hpp"

namespace iterlog {

using nlohmann::ordered_json;

ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["subcommand"] = c.subcommand;
  j["law"] = c.law;
  j["eta"] = c.eta ? ordered_json(*c.eta) : ordered_json(nullptr);
  j["k"] = c.k;
  j["K"] = c.K;
  j["t"] = c.t;
  j["N"] = c.N;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["grid"] = c.grid ? ordered_json(*c.grid) : ordered_json(nullptr);
  j["out"] = c.out;
  j["format"] = c.format;
  j["suite"] = c.suite;
  j["mode"] = c.mode;
  j["step"] = c.step;
  j["replica"] = c.replica;
  j["grower"] = c.grower;
  j["exact"] = c.exact;
  j["criteria"] = c.criteria;
  j["plots"] = c.plots;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("config file must hold a JSON object");
  static const char* const known[] = {"subcommand", "law",     "eta",     "k",      "K",
                                      "t",          "N",       "replicas", "seed",  "grid",
                                      "out",        "format",  "suite",   "mode",   "step",
                                      "replica",    "grower",  "exact",   "criteria", "plots"};
  for (const auto& item : j.items()) {
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
      throw Error("unknown config key: " + item.key());
    }
  }
  ExperimentConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    auto get_optional = [&](const char* key, std::optional<std::string>& field) {
      if (!j.contains(key)) return;
      if (j.at(key).is_null()) {
        field.reset();
      } else {
        field = j.at(key).get<std::string>();
      }
    };
    get("subcommand", c.subcommand);
    get("law", c.law);
    get_optional("eta", c.eta);
    get("k", c.k);
    get("K", c.K);
    get("t", c.t);
    get("N", c.N);
    get("replicas", c.replicas);
    get("seed", c.seed);
    get_optional("grid", c.grid);
    get("out", c.out);
    get("format", c.format);
    get("suite", c.suite);
    get("mode", c.mode);
    get("step", c.step);
    get("replica", c.replica);
    get("grower", c.grower);
    get("exact", c.exact);
    get("criteria", c.criteria);
    get("plots", c.plots);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad config value: ") + e.what());
  }
  return c;
}

std::vector<double> parse_grid(const std::string& spec) {
  const std::string prefix = "geometric:";
  if (spec.rfind(prefix, 0) != 0) throw Error("grid must look like geometric:base=B,count=C");
  std::optional<double> base;
  std::optional<std::size_t> count;
  double start = std::exp(2.0);
  std::stringstream fields(spec.substr(prefix.size()));
  std::string field;
  while (std::getline(fields, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw Error("bad grid field: " + field);
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "base") {
        base = std::stod(value, &used);
      } else if (key == "start") {
        start = std::stod(value, &used);
      } else if (key == "count") {
        count = std::stoul(value, &used);
      } else {
        throw Error("unknown grid field: " + key);
      }
      if (used != value.size()) throw Error("bad grid value: " + field);
    } catch (const std::logic_error&) {
      throw Error("bad grid value: " + field);
    }
  }
  if (!base || !count) throw Error("grid needs base and count");
  if (*count == 0) throw Error("grid count must be positive");
  return geometric_grid(start, *base, *count);
}

namespace {

// Usage problems discovered after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

Centering parse_mode(const std::string& mode) {
  if (mode == "formula") return Centering::formula;
  if (mode == "table") return Centering::table;
  throw UsageError("mode must be formula or table");
}

std::string pick_format(const ExperimentConfig& c, const std::string& fallback,
                        std::initializer_list<const char*> allowed) {
  const std::string format = c.format.empty() ? fallback : c.format;
  for (const char* a : allowed) {
    if (format == a) {
      if (format == "svg" && c.out.empty()) throw UsageError("svg output needs --out");
      return format;
    }
  }
  throw UsageError("format " + format + " not available for " + c.subcommand);
}

void emit(const ExperimentConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
  } else {
    write_file(c.out, text);
  }
}

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json distribution_summary(const std::vector<double>& xs) {
  if (xs.empty()) return nullptr;
  ordered_json j;
  j["mean"] = number(sample_mean(xs));
  j["variance"] = xs.size() > 1 ? number(sample_variance(xs)) : ordered_json(nullptr);
  j["q05"] = number(quantile(xs, 0.05));
  j["q50"] = number(quantile(xs, 0.5));
  j["q95"] = number(quantile(xs, 0.95));
  return j;
}

SimConfig sim_config(const ExperimentConfig& c) {
  SimConfig s;
  s.xi = parse_law(c.law);
  if (c.eta) s.eta = parse_law(*c.eta);
  s.max_generation = c.K;
  s.horizon = c.t;
  s.seed = c.seed;
  s.replicas = c.replicas;
  if (c.grid) s.grid = parse_grid(*c.grid);
  return s;
}

int cmd_moments(const ExperimentConfig& c, std::ostream& out) {
  pick_format(c, "json", {"json"});
  const Law xi = parse_law(c.law);
  const Moments m = moments(xi);
  const double eta_mean = c.eta ? moments(parse_law(*c.eta)).mean : m.mean;
  ordered_json j;
  j["mu"] = m.mean;
  j["m2"] = m.second_moment;
  j["var"] = m.variance;
  j["a"] = ordered_json::array();
  for (std::size_t k = 1; k <= c.K; ++k) {
    j["a"].push_back(m.variance > 0.0 ? ordered_json(lil_constant(k, m.mean, std::sqrt(m.variance)))
                                      : ordered_json(nullptr));
  }
  j["b"] = nonlattice_offset(m);
  if (const auto* lattice = std::get_if<LatticeLaw>(&xi)) {
    j["d"] = lattice->span();
    j["D"] = renewal_offset_limit(m, lattice->span());
    j["C"] = ordered_json::array();
    for (std::size_t k = 1; k <= c.K; ++k) {
      j["C"].push_back(lattice_offset(k, m, eta_mean, lattice->span()));
    }
  }
  emit(c, j.dump(2) + "\n", out);
  return 0;
}

int cmd_renewal(const ExperimentConfig& c, std::ostream& out) {
  const std::string format = pick_format(c, "csv", {"csv", "json"});
  const Law xi = parse_law(c.law);
  const auto* lattice = std::get_if<LatticeLaw>(&xi);
  if (lattice == nullptr) throw UsageError("renewal tables need a lattice law");
  std::optional<RenewalTable> table;
  if (c.eta) {
    const Law eta = parse_law(*c.eta);
    const auto* eta_lattice = std::get_if<LatticeLaw>(&eta);
    if (eta_lattice == nullptr) throw UsageError("perturbed tables need a lattice eta");
    table = exact_perturbed_table(*lattice, *eta_lattice, c.N, c.K);
  } else {
    table = exact_table(*lattice, c.N, c.K);
  }
  std::ostringstream text;
  if (format == "csv") {
    write_table_csv(*table, text);
  } else {
    ordered_json j;
    j["span"] = table->span();
    j["kind"] = table->kind() == TableKind::perturbed ? "perturbed" : "standard";
    j["N"] = table->horizon();
    j["levels"] = ordered_json::array();
    for (std::size_t k = 1; k <= table->levels(); ++k) {
      const auto level = table->level(k);
      j["levels"].push_back(std::vector<double>(level.begin(), level.end()));
    }
    text << j.dump(2) << '\n';
  }
  emit(c, text.str(), out);
  return 0;
}

EnsembleSummary single_replica(const SimConfig& config, const ExperimentConfig& c) {
  EnsembleSummary summary;
  summary.moments = moments(config.xi);
  summary.centering = parse_mode(c.mode);
  summary.horizon = config.horizon;
  for (std::size_t k = 1; k <= config.max_generation; ++k) {
    GenerationSummary gen;
    gen.k = k;
    gen.center = centering_value(config, k, config.horizon, summary.centering);
    summary.generations.push_back(gen);
  }
  summary.outcomes.push_back(simulate_generations(config, c.replica));
  return summary;
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& out) {
  const std::string format = pick_format(c, "json", {"json", "csv"});
  const SimConfig config = sim_config(c);
  validate(config);
  const EnsembleSummary summary = single_replica(config, c);
  std::ostringstream text;
  if (format == "csv") {
    write_cmj_csv(text, config, summary);
  } else {
    const SimOutcome& outcome = summary.outcomes.front();
    ordered_json j;
    j["law"] = c.law;
    j["eta"] = c.eta ? ordered_json(*c.eta) : ordered_json(nullptr);
    j["seed"] = c.seed;
    j["replica"] = outcome.replica;
    j["t"] = outcome.horizon;
    j["counts"] = outcome.counts;
    if (!config.grid.empty()) {
      j["path"] = ordered_json::array();
      for (std::size_t i = 0; i < config.grid.size(); ++i) {
        j["path"].push_back({{"t", config.grid[i]}, {"Y", outcome.path[i]}});
      }
    }
    text << j.dump(2) << '\n';
  }
  emit(c, text.str(), out);
  return 0;
}

PlotSpec extrema_plot(const LilExtremaReport& report) {
  PlotSpec plot;
  plot.title = "running extrema of the LIL statistic, k=" + std::to_string(report.k);
  plot.x_label = "log t";
  plot.y_label = "median running max / min";
  plot.reference_lines = {1.0, -1.0};
  Series hi{"running max (median)", {}, report.running_max_median};
  Series lo{"running min (median)", {}, report.running_min_median};
  for (double t : report.times) {
    hi.x.push_back(std::log(t));
    lo.x.push_back(std::log(t));
  }
  plot.series = {hi, lo};
  return plot;
}

int cmd_mc(const ExperimentConfig& c, std::ostream& out) {
  const std::string format = pick_format(c, "json", {"json", "csv", "svg"});
  const SimConfig config = sim_config(c);
  if ((format == "svg") && config.grid.empty()) throw UsageError("svg output needs --grid");
  if (c.k == 0 || c.k > c.K) throw UsageError("--k must lie in 1..K");
  const Centering mode = parse_mode(c.mode);
  const bool keep = format != "json" || !config.grid.empty();
  const EnsembleSummary summary = monte_carlo(config, {mode, keep});
  std::ostringstream text;
  if (format == "csv") {
    write_cmj_csv(text, config, summary);
  } else if (format == "svg") {
    text << render_svg(extrema_plot(lil_running_extrema(summary, config.grid, c.k)));
  } else {
    ordered_json j;
    j["law"] = c.law;
    j["eta"] = c.eta ? ordered_json(*c.eta) : ordered_json(nullptr);
    j["t"] = c.t;
    j["replicas"] = c.replicas;
    j["seed"] = c.seed;
    j["centering"] = c.mode;
    j["moments"] = {{"mu", summary.moments.mean},
                    {"m2", summary.moments.second_moment},
                    {"var", summary.moments.variance}};
    j["generations"] = ordered_json::array();
    for (const auto& gen : summary.generations) {
      ordered_json g;
      g["k"] = gen.k;
      g["center"] = gen.center;
      g["mean"] = gen.mean;
      g["variance"] = gen.variance;
      g["standard_error"] = gen.standard_error;
      g["clt"] = distribution_summary(gen.clt);
      g["lil"] = distribution_summary(gen.lil);
      j["generations"].push_back(std::move(g));
    }
    if (!config.grid.empty()) {
      const LilExtremaReport report = lil_running_extrema(summary, config.grid, c.k);
      ordered_json e;
      e["k"] = report.k;
      e["times"] = report.times;
      e["running_max_median"] = report.running_max_median;
      e["running_min_median"] = report.running_min_median;
      e["overall_max"] = report.overall_max;
      e["overall_min"] = report.overall_min;
      j["lil_extrema"] = std::move(e);
    }
    text << j.dump(2) << '\n';
  }
  emit(c, text.str(), out);
  return 0;
}

Grower parse_grower(const std::string& name) {
  if (name == "yule") return Grower::yule;
  if (name == "discrete") return Grower::discrete;
  throw UsageError("grower must be yule or discrete");
}

int cmd_rrt(const ExperimentConfig& c, std::ostream& out) {
  if (c.exact) {
    pick_format(c, "json", {"json"});
    ordered_json j;
    j["n"] = c.N;
    j["K"] = c.K;
    j["pmf"] = to_json(enumerate_profiles(c.N, c.K));
    emit(c, j.dump(2) + "\n", out);
    return 0;
  }
  const std::string format = pick_format(c, "csv", {"csv", "json", "svg"});
  const auto traces = grow_ensemble(parse_grower(c.grower), c.N, c.K, c.seed, c.replicas);
  std::ostringstream text;
  if (format == "csv") {
    write_rrt_csv(text, traces);
  } else {
    const bool defined = static_cast<double>(c.N) > std::exp(std::numbers::e);
    std::vector<double> means;
    ordered_json levels = ordered_json::array();
    for (std::size_t k = 1; k <= c.K; ++k) {
      std::vector<double> xs;
      std::vector<double> stats;
      for (const auto& trace : traces) {
        xs.push_back(static_cast<double>(trace.level(k)));
        if (defined) stats.push_back(rrt_lil_statistic(xs.back(), c.N, k));
      }
      means.push_back(sample_mean(xs));
      ordered_json level;
      level["k"] = k;
      level["X"] = distribution_summary(xs);
      level["statistic"] = distribution_summary(stats);
      levels.push_back(std::move(level));
    }
    if (format == "svg") {
      PlotSpec plot;
      plot.title = "mean profile, n=" + std::to_string(c.N) + " non-root vertices";
      plot.x_label = "level k";
      plot.y_label = "mean X_n(k)";
      Series series{"mean X_n(k)", {}, means};
      for (std::size_t k = 1; k <= c.K; ++k) series.x.push_back(static_cast<double>(k));
      plot.series = {series};
      text << render_svg(plot);
    } else {
      ordered_json j;
      j["n"] = c.N;
      j["grower"] = c.grower;
      j["replicas"] = c.replicas;
      j["seed"] = c.seed;
      j["levels"] = std::move(levels);
      if (c.grower == "yule") {
        std::vector<double> w;
        for (const auto& trace : traces) w.push_back(yule_limit_estimate(trace));
        j["yule_limit"] = distribution_summary(w);
      }
      text << j.dump(2) << '\n';
    }
  }
  emit(c, text.str(), out);
  return 0;
}

int cmd_gauss(const ExperimentConfig& c, std::ostream& out) {
  const std::string format = pick_format(c, "csv", {"csv", "json"});
  const Law law = parse_law(c.law);
  const auto samples = gauss_ensemble(law, c.k, c.t, c.step, c.seed, c.replicas);
  std::ostringstream text;
  if (format == "csv") {
    write_gauss_csv(text, samples);
  } else {
    std::vector<double> b1;
    std::vector<double> b2;
    for (const auto& s : samples) {
      b1.push_back(s.b1k);
      b2.push_back(s.b2k);
    }
    const double k = static_cast<double>(c.k);
    ordered_json j;
    j["law"] = c.law;
    j["k"] = c.k;
    j["t"] = c.t;
    j["step"] = c.step;
    j["replicas"] = c.replicas;
    j["seed"] = c.seed;
    j["B1k"] = {{"variance", samples.size() > 1 ? number(sample_variance(b1)) : nullptr},
                {"target", std::pow(c.t, 2.0 * k - 1.0) / (2.0 * k - 1.0)}};
    j["B2k"] = {{"variance", samples.size() > 1 ? number(sample_variance(b2)) : nullptr},
                {"target", variance_b2k(FkTable::exact(law, c.k, c.t), c.t)}};
    text << j.dump(2) << '\n';
  }
  emit(c, text.str(), out);
  return 0;
}

int cmd_verify(const ExperimentConfig& c, std::ostream& out) {
  pick_format(c, "json", {"json"});
  VerifyOptions options;
  try {
    options.suite = parse_suite(c.suite);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  options.seed = c.seed;
  options.criteria = c.criteria;
  for (int criterion : options.criteria) {
    if (criterion < 0 || criterion > 10) throw UsageError("criteria run from 0 to 10");
  }
  if (!c.plots.empty()) options.plot_dir = c.plots;
  const VerificationReport report = run_verification(options);
  emit(c, to_json(report).dump(2) + "\n", out);
  return report.passed() ? 0 : 1;
}

// Copies each option given on the command line from `flags` into the config.
struct Override {
  CLI::Option* option;
  std::function<void(ExperimentConfig&, const ExperimentConfig&)> apply;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterated random walks, CMJ generations, RRT profiles and their LIL statistics",
               args.empty() ? "iterlog" : args.front()};
  app.require_subcommand(1);
  app.fallthrough(false);

  ExperimentConfig flags;
  std::string eta;
  std::string grid;
  std::string config_path;
  bool print_config = false;
  std::vector<Override> overrides;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"moments", "exact moments and constants of a law (JSON)"},
      {"renewal", "exact lattice renewal table V_1..V_K on n = 0..N"},
      {"simulate", "one CMJ replica: generation counts Y_k(t)"},
      {"mc", "Monte Carlo ensemble of CMJ replicas with CLT/LIL statistics"},
      {"rrt", "random recursive tree profiles; --N counts non-root vertices"},
      {"gauss", "Brownian integrals B_{1,k}(t) and B_{2,k}(t)"},
      {"verify", "run the verification suite and write a JSON report"},
  };
  std::vector<CLI::App*> commands;
  for (const auto& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    commands.push_back(cmd);
    auto add = [&](CLI::Option* option, auto apply) {
      overrides.push_back({option, apply});
      return option;
    };
    add(cmd->add_option("--law", flags.law, "law of xi, e.g. exp:rate=1 or lattice:d=1;p=0.5,0.5"),
        [](auto& c, const auto& f) { c.law = f.law; });
    add(cmd->add_option("--eta", eta, "law of eta (perturbed walk)"),
        [&eta](auto& c, const auto&) { c.eta = eta; });
    add(cmd->add_option("--k", flags.k, "generation or level index"),
        [](auto& c, const auto& f) { c.k = f.k; });
    add(cmd->add_option("--K", flags.K, "largest generation or level"),
        [](auto& c, const auto& f) { c.K = f.K; });
    add(cmd->add_option("--t", flags.t, "time horizon"), [](auto& c, const auto& f) { c.t = f.t; });
    add(cmd->add_option("--N", flags.N, "lattice horizon, or tree size n (non-root vertices)"),
        [](auto& c, const auto& f) { c.N = f.N; });
    add(cmd->add_option("--replicas", flags.replicas, "number of replicas R"),
        [](auto& c, const auto& f) { c.replicas = f.replicas; });
    add(cmd->add_option("--seed", flags.seed, "master seed"),
        [](auto& c, const auto& f) { c.seed = f.seed; });
    add(cmd->add_option("--grid", grid, "geometric:base=B,count=C[,start=S]"),
        [&grid](auto& c, const auto&) { c.grid = grid; });
    add(cmd->add_option("--out", flags.out, "output file (default: standard output)"),
        [](auto& c, const auto& f) { c.out = f.out; });
    add(cmd->add_option("--format", flags.format, "csv, json or svg")
            ->check(CLI::IsMember({"csv", "json", "svg"})),
        [](auto& c, const auto& f) { c.format = f.format; });
    add(cmd->add_option("--suite", flags.suite, "fast or full")
            ->check(CLI::IsMember({"fast", "full"})),
        [](auto& c, const auto& f) { c.suite = f.suite; });
    add(cmd->add_option("--mode", flags.mode, "centering: formula or table")
            ->check(CLI::IsMember({"formula", "table"})),
        [](auto& c, const auto& f) { c.mode = f.mode; });
    add(cmd->add_option("--step", flags.step, "Brownian grid step h"),
        [](auto& c, const auto& f) { c.step = f.step; });
    add(cmd->add_option("--replica", flags.replica, "replica index for simulate"),
        [](auto& c, const auto& f) { c.replica = f.replica; });
    add(cmd->add_option("--grower", flags.grower, "rrt growth rule: yule or discrete")
            ->check(CLI::IsMember({"yule", "discrete"})),
        [](auto& c, const auto& f) { c.grower = f.grower; });
    add(cmd->add_flag("--exact", flags.exact, "rrt: exact profile law by enumeration (n <= 9)"),
        [](auto& c, const auto& f) { c.exact = f.exact; });
    add(cmd->add_option("--criterion", flags.criteria, "verify: run only these criteria"),
        [](auto& c, const auto& f) { c.criteria = f.criteria; });
    add(cmd->add_option("--plots", flags.plots, "verify: directory for report-only SVG plots"),
        [](auto& c, const auto& f) { c.plots = f.plots; });
    cmd->add_option("--config", config_path, "JSON config; flags override it");
    cmd->add_flag("--print-config", print_config, "print the effective config as JSON and exit");
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("iterlog");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    ExperimentConfig config;
    if (!config_path.empty()) {
      std::ifstream file(config_path);
      if (!file) throw UsageError("cannot read config file " + config_path);
      nlohmann::json j;
      try {
        file >> j;
      } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config file is not valid JSON: ") + e.what());
      }
      config = config_from_json(j);
    }
    for (const auto& o : overrides) {
      if (o.option->count() > 0) o.apply(config, flags);
    }
    for (CLI::App* cmd : commands) {
      if (cmd->parsed()) config.subcommand = cmd->get_name();
    }
    if (print_config) {
      out << to_json(config).dump(2) << '\n';
      return 0;
    }
    const std::string& s = config.subcommand;
    if (s == "moments") return cmd_moments(config, out);
    if (s == "renewal") return cmd_renewal(config, out);
    if (s == "simulate") return cmd_simulate(config, out);
    if (s == "mc") return cmd_mc(config, out);
    if (s == "rrt") return cmd_rrt(config, out);
    if (s == "gauss") return cmd_gauss(config, out);
    if (s == "verify") return cmd_verify(config, out);
    throw UsageError("unknown subcommand " + s);
  } catch (const std::exception& e) {
    err << "iterlog: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace iterlog
