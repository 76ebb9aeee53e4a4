#include "twoenv/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "twoenv/error.hpp"

namespace twoenv {

namespace {

const std::vector<std::string> kSubcommands = {"envelope-naive", "envelope-pure", "envelope-lln",
                                               "envelope-bayes", "stpetersburg"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
    throw UsageError(key + ": expected a finite number, got '" + v + "'");
  }
  return x;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int x{};
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) {
    throw UsageError(key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::istringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(key, trim(item)));
  if (out.empty()) throw UsageError(key + ": empty parameter list");
  return out;
}

std::string extension_format(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos) return "";
  const std::string ext = path.substr(dot + 1);
  if (ext == "csv") return "csv";
  if (ext == "json") return "json";
  return "";
}

std::string resolved_format(const RunConfig& cfg) {
  if (!cfg.format.empty()) return cfg.format;
  const std::string inferred = extension_format(cfg.output);
  if (!inferred.empty()) return inferred;
  return cfg.subcommand == "envelope-lln" ? "csv" : "json";
}

std::string timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string value_string(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw UsageError("config value has unsupported type: " + v.dump());
}

double require_alpha(const RunConfig& cfg) {
  if (!cfg.alpha) throw UsageError(cfg.subcommand + " requires --alpha");
  return *cfg.alpha;
}

StateSpace checked_grid(const RunConfig& cfg, const DyadicGrid& g) {
  StateSpace space = [&] {
    try {
      return make_dyadic_grid(g.hi, g.n, g.per_octave);
    } catch (const DomainError& e) {
      throw UsageError(std::string("impossible grid: ") + e.what());
    }
  }();
  if (space.point(0) < cfg.lo) {
    throw UsageError("impossible grid: the lowest point " + format_double(space.point(0)) +
                     " lies below lo = " + format_double(cfg.lo));
  }
  return space;
}

DyadicGrid grid_of(const RunConfig& cfg) { return DyadicGrid{cfg.hi, cfg.n, cfg.per_octave}; }

Json run_naive(const RunConfig& cfg, std::ostream& summary) {
  const NaiveExpectation naive = naive_other_expectation(require_alpha(cfg));
  const EnvelopePairModel fixed = make_fixed_pair_model(cfg.v1, cfg.v2);
  const double gain = pure_switch_gain(fixed, PureState{0});
  summary << "naive E[other] = " << format_double(naive.e_other) << " ("
          << naive.annotation << ")\n"
          << "switch gain at the pure state (" << format_double(cfg.v1) << ", "
          << format_double(cfg.v2) << ") = " << format_double(gain) << '\n';
  Json j = to_json(naive);
  j["pure_switch_gain"] = Json{{"v1", cfg.v1}, {"v2", cfg.v2}, {"gain", gain}};
  return j;
}

Json run_pure(const RunConfig& cfg, std::ostream& summary) {
  const EnvelopePairModel fixed = make_fixed_pair_model(cfg.v1, cfg.v2);
  const double gain = pure_switch_gain(fixed, PureState{0});
  Json j{{"v1", cfg.v1},
         {"v2", cfg.v2},
         {"outcome_distribution", to_json(pure_outcome_distribution(fixed.observable, {0}))},
         {"pair_distribution", to_json(pure_outcome_distribution(fixed.quasi, {0}))},
         {"switch_gain", gain}};
  summary << "switch gain at (" << format_double(cfg.v1) << ", " << format_double(cfg.v2)
          << ") = " << format_double(gain) << '\n';
  if (cfg.alpha) {
    const StateSpace space = checked_grid(cfg, grid_of(cfg));
    const EnvelopePairModel model = make_doubling_model(space);
    const MleResult mle = fisher_mle(model.observable, Outcome(*cfg.alpha));
    Json m = to_json(mle, space);
    m["alpha"] = *cfg.alpha;
    j["mle"] = m;
    summary << "maximum likelihood states for alpha = " << format_double(*cfg.alpha) << ": "
            << m["maximizers"].dump() << '\n';
  }
  return j;
}

LlnRecord lln_of(const RunConfig& cfg) {
  if (cfg.trials == 0) throw UsageError("trials must be positive");
  const EnvelopePairModel fixed = make_fixed_pair_model(cfg.v1, cfg.v2);
  return lln_experiment(fixed, PureState{0}, cfg.trials, RngStream(cfg.seed, 0));
}

Json run_bayes(const RunConfig& cfg, std::ostream& summary) {
  const double alpha = cfg.alpha.value_or(2.0);
  const Density density = make_density(cfg.density, parse_list("density_params", cfg.density_params));
  const DyadicGrid grid = grid_of(cfg);
  checked_grid(cfg, grid);
  const BayesianEnvelope env = build_bayesian_envelope(density, grid);
  const BayesianReport rep = bayesian_envelope_report(env, alpha);
  Json j = bayesian_report_json(env, rep, cfg.seed);
  if (cfg.trials > 0) {
    const MonteCarloGain mc = monte_carlo_switch_gain(env, cfg.trials, cfg.seed);
    j["monte_carlo"] = to_json(mc);
    summary << "Monte Carlo switch gain = " << format_double(mc.mean) << " +/- "
            << format_double(mc.standard_error) << '\n';
  }
  summary << "posterior at alpha = " << format_double(alpha) << ": w(alpha/2, alpha) = "
          << format_double(rep.w_small) << ", w(alpha, 2 alpha) = " << format_double(rep.w_large)
          << "\nconditional gain = " << format_double(rep.conditional_gain)
          << ", unconditional gain = " << format_double(rep.unconditional_gain.value) << '\n';
  if (rep.unconditional_gain.divergence_warning) {
    summary << "warning: " << rep.unconditional_gain.warning << '\n';
  }
  return j;
}

struct StpRun {
  StPetersburgModel model;
  std::optional<StpRecord> record;
};

StpRun stp_of(const RunConfig& cfg) {
  StpRun r{build_stp(parse_formulation(cfg.formulation), cfg.k_max), std::nullopt};
  if (cfg.trials > 0) r.record = stp_parallel_experiment(r.model, cfg.trials, cfg.seed);
  return r;
}

Json run_stp(const RunConfig& cfg, std::ostream& summary) {
  const StpRun r = stp_of(cfg);
  Json j{{"formulation", to_string(r.model.formulation)},
         {"k_max", r.model.k_max},
         {"tail_mass", r.model.tail_mass}};
  if (cfg.criterion != "probability") {
    const TruncatedExpectation e = stp_truncated_expectation(r.model);
    j["expectation"] = to_json(e);
    summary << "truncated expectation (k_max = " << e.k_max
            << ") = " << format_double(e.partial_sum)
            << (e.diverges ? ", the untruncated series diverges" : "") << '\n';
  }
  if (cfg.criterion != "expectation") {
    const ProbOtherGreater p = stp_prob_other_greater(cfg.m, cfg.k_max);
    Json pj = to_json(p);
    if (r.record) pj["empirical_frequency"] = empirical_frequency_y_greater(*r.record, cfg.m);
    j["probability"] = pj;
    summary << "P(y > 2^" << cfg.m << ") = 1/" << p.exact_denominator << '\n';
  }
  if (r.record) {
    j["simulation"] = to_json(*r.record);
    summary << r.record->expectation_criterion << '\n' << r.record->probability_criterion << '\n';
  }
  return j;
}

std::string stp_counts_csv(const StpRecord& rec) {
  std::string out = "k,amount,x_count,y_count\n";
  for (std::size_t k = 0; k < rec.x_counts.size(); ++k) {
    out += std::to_string(k + 1) + ',' + format_double(std::ldexp(1.0, static_cast<int>(k + 1))) +
           ',' + std::to_string(rec.x_counts[k]) + ',' + std::to_string(rec.y_counts[k]) + '\n';
  }
  return out;
}

std::string csv_header(const RunConfig& cfg) {
  std::string out = "# version=" + std::string(version()) + '\n';
  out += "# rng=" + std::string(RngStream::kAlgorithm) + '\n';
  const Json j = cfg.to_json();
  for (const auto& [key, v] : j.items()) {
    if (v.is_null()) continue;
    out += "# " + key + '=' + value_string(v) + '\n';
  }
  out += "# metadata.generated_at=" + timestamp() + '\n';
  return out;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file '" + path + "'");
  f << text;
  if (!f) throw UsageError("failed writing output file '" + path + "'");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string key_of_flag(std::string flag) {
  for (char& c : flag) {
    if (c == '-') c = '_';
  }
  return flag;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "subcommand", "alpha",   "v1",          "v2",        "trials", "seed",
      "lo",         "hi",      "n",           "per_octave", "density", "density_params",
      "k_max",      "criterion", "m",         "formulation", "output", "format"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "subcommand") {
    if (std::find(kSubcommands.begin(), kSubcommands.end(), v) == kSubcommands.end()) {
      throw UsageError("unknown subcommand '" + v + "'");
    }
    subcommand = v;
  } else if (key == "alpha") {
    alpha = parse_double(key, v);
  } else if (key == "v1") {
    v1 = parse_double(key, v);
  } else if (key == "v2") {
    v2 = parse_double(key, v);
  } else if (key == "trials") {
    trials = parse_int<std::size_t>(key, v);
  } else if (key == "seed") {
    seed = parse_int<std::uint64_t>(key, v);
  } else if (key == "lo") {
    lo = parse_double(key, v);
    if (lo < 0.0) throw UsageError("impossible grid: lo must be >= 0");
  } else if (key == "hi") {
    hi = parse_double(key, v);
    if (!(hi > 0.0)) throw UsageError("impossible grid: hi must be > 0");
  } else if (key == "n") {
    n = parse_int<std::size_t>(key, v);
    if (n < 2) throw UsageError("impossible grid: n must be >= 2");
  } else if (key == "per_octave") {
    per_octave = parse_int<std::size_t>(key, v);
    if (per_octave < 1) throw UsageError("impossible grid: per_octave must be >= 1");
  } else if (key == "density") {
    if (v != "exp" && v != "uniform" && v != "gamma" && v != "pareto") {
      throw UsageError("unknown density '" + v + "' (exp, uniform, gamma, pareto)");
    }
    density = v;
  } else if (key == "density_params") {
    parse_list(key, v);
    density_params = v;
  } else if (key == "k_max") {
    k_max = parse_int<int>(key, v);
  } else if (key == "criterion") {
    if (v != "expectation" && v != "probability" && v != "both") {
      throw UsageError("criterion must be expectation, probability or both");
    }
    criterion = v;
  } else if (key == "m") {
    m = parse_int<int>(key, v);
  } else if (key == "formulation") {
    if (v != "pure" && v != "statistical" && v != "pins") {
      throw UsageError("formulation must be pure, statistical or pins");
    }
    formulation = v;
  } else if (key == "output") {
    output = v;
  } else if (key == "format") {
    if (!v.empty() && v != "json" && v != "csv") throw UsageError("format must be json or csv");
    format = v;
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

Json RunConfig::to_json() const {
  Json j;
  j["subcommand"] = subcommand;
  j["alpha"] = alpha ? Json(*alpha) : Json(nullptr);
  j["v1"] = v1;
  j["v2"] = v2;
  j["trials"] = trials;
  j["seed"] = seed;
  j["lo"] = lo;
  j["hi"] = hi;
  j["n"] = n;
  j["per_octave"] = per_octave;
  j["density"] = density;
  j["density_params"] = density_params;
  j["k_max"] = k_max;
  j["criterion"] = criterion;
  j["m"] = m;
  j["formulation"] = formulation;
  j["output"] = output;
  j["format"] = format;
  return j;
}

RunConfig RunConfig::from_json(const Json& j) {
  if (!j.is_object()) throw UsageError("embedded config is not an object");
  RunConfig cfg;
  for (const auto& [key, v] : j.items()) {
    if (v.is_null()) continue;
    cfg.set(key, value_string(v));
  }
  return cfg;
}

RunConfig default_config() {
  RunConfig cfg;
  if (const char* env = std::getenv("TWOENV_SEED"); env != nullptr && *env != '\0') {
    cfg.set("seed", env);
  }
  return cfg;
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    try {
      cfg.set(key, line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

RunConfig config_from_report(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw UsageError("empty report");
  if (text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      throw UsageError(std::string("malformed report: ") + e.what());
    }
    if (!j.contains("config")) throw UsageError("report has no embedded config");
    return RunConfig::from_json(j["config"]);
  }
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line) && line.rfind("# ", 0) == 0) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(2, eq - 2);
    if (key == "version" || key == "rng" || key.rfind("metadata.", 0) == 0) continue;
    cfg.set(key, line.substr(eq + 1));
  }
  if (cfg.subcommand.empty()) throw UsageError("report has no embedded config");
  return cfg;
}

std::string render_report(RunConfig cfg, std::ostream& summary) {
  if (cfg.subcommand.empty()) throw UsageError("no subcommand");
  cfg.format = resolved_format(cfg);

  if (cfg.format == "csv") {
    if (cfg.subcommand == "envelope-lln") {
      const LlnRecord rec = lln_of(cfg);
      summary << "final averages after " << rec.trials << " rounds: you "
              << format_double(rec.avg_you.back()) << ", host "
              << format_double(rec.avg_host.back()) << " (target " << format_double(rec.target)
              << ")\n";
      return csv_header(cfg) + lln_trace_csv(rec);
    }
    if (cfg.subcommand == "stpetersburg") {
      const StpRun r = stp_of(cfg);
      if (!r.record) throw UsageError("csv output for stpetersburg needs trials > 0");
      summary << r.record->expectation_criterion << '\n'
              << r.record->probability_criterion << '\n';
      return csv_header(cfg) + stp_counts_csv(*r.record);
    }
    throw UsageError("csv output is available for envelope-lln and stpetersburg only");
  }

  Json body;
  if (cfg.subcommand == "envelope-naive") {
    body = run_naive(cfg, summary);
  } else if (cfg.subcommand == "envelope-pure") {
    body = run_pure(cfg, summary);
  } else if (cfg.subcommand == "envelope-lln") {
    const LlnRecord rec = lln_of(cfg);
    body = to_json(rec);
    summary << "final averages: you " << format_double(rec.avg_you.back()) << ", host "
            << format_double(rec.avg_host.back()) << '\n';
  } else if (cfg.subcommand == "envelope-bayes") {
    body = run_bayes(cfg, summary);
  } else {
    body = run_stp(cfg, summary);
  }
  Json j;
  j["version"] = version();
  j["rng"] = std::string(RngStream::kAlgorithm);
  j["subcommand"] = cfg.subcommand;
  j["config"] = cfg.to_json();
  j["report"] = body;
  j["metadata"] = Json{{"generated_at", timestamp()}};
  return j.dump(2) + '\n';
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-envelope and St. Petersburg measurement experiments", "twoenv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  std::map<std::string, std::string> given;
  std::string config_path;
  std::string replay_file;
  std::string replay_output;

  struct Flag {
    const char* name;
    std::string help;
  };
  const std::vector<Flag> flags = {
      {"alpha", "measured amount (envelope-naive, envelope-pure MLE; envelope-bayes default 2)"},
      {"v1", "first payout of the fixed pair (default 10)"},
      {"v2", "second payout of the fixed pair (default 20)"},
      {"trials", "number of simulated rounds (default 100000)"},
      {"seed", "master seed (default $TWOENV_SEED, else 1)"},
      {"lo", "lower bound the grid must respect (default 0)"},
      {"hi", "largest grid point is the last dyadic center below this (default 30)"},
      {"n", "number of grid points (default 30000)"},
      {"per-octave", "grid points per doubling (default 1000)"},
      {"density", "prior density: exp, uniform, gamma, pareto (default exp)"},
      {"density-params", "comma-separated density parameters (default 1)"},
      {"k-max", "St. Petersburg truncation depth, 1..60 (default 30)"},
      {"criterion", "expectation, probability or both (default both)"},
      {"m", "St. Petersburg exponent for P(y > 2^m) (default 1)"},
      {"formulation", "pure, statistical or pins (default pure)"},
      {"output", "write the report to this path (default stdout)"},
      {"format", "json or csv (default: from the output extension, csv for envelope-lln, "
                 "json otherwise)"},
  };

  for (const std::string& name : kSubcommands) {
    CLI::App* sub = app.add_subcommand(name, "run " + name);
    sub->add_option("--config", config_path, "flat key = value config file");
    for (const Flag& f : flags) {
      const std::string key = key_of_flag(f.name);
      sub->add_option_function<std::string>(
          std::string("--") + f.name, [&given, key](const std::string& v) { given[key] = v; },
          f.help);
    }
  }
  CLI::App* replay = app.add_subcommand("replay", "re-run the config embedded in a report");
  replay->add_option("file", replay_file, "JSON or CSV report")->required();
  replay->add_option("--output", replay_output, "write the regenerated report here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (replay->parsed()) {
      RunConfig cfg = config_from_report(read_text(replay_file));
      const std::string text = render_report(cfg, err);
      write_text(replay_output, text, out);
      return 0;
    }
    RunConfig cfg = default_config();
    if (!config_path.empty()) apply_config_text(cfg, read_text(config_path));
    for (const auto& [key, v] : given) cfg.set(key, v);
    cfg.subcommand = app.get_subcommands().front()->get_name();
    const std::string text = render_report(cfg, err);
    write_text(cfg.output, text, out);
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace twoenv
