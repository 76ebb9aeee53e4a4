#pragma once

// Command-line driver. `run` is the whole program minus process plumbing so
// tests can call it directly.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twoenv/report.hpp"

namespace twoenv {

/// Everything that determines a report body. Values are set through `set`,
/// which validates and is shared by flags, config files and replay.
struct RunConfig {
  std::string subcommand;
  std::optional<double> alpha;
  double v1 = 10.0;
  double v2 = 20.0;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  double lo = 0.0;
  double hi = 30.0;
  std::size_t n = 30000;
  std::size_t per_octave = 1000;
  std::string density = "exp";
  std::string density_params = "1";
  int k_max = 30;
  std::string criterion = "both";
  int m = 1;
  std::string formulation = "pure";
  std::string output;
  std::string format;  // json or csv; empty means infer

  /// Throws UsageError for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);

  Json to_json() const;
  static RunConfig from_json(const Json& j);
};

/// Keys accepted by RunConfig::set, in serialization order.
const std::vector<std::string>& config_keys();

/// Defaults, with the seed taken from TWOENV_SEED when it is set.
RunConfig default_config();

/// Flat "key = value" text; '#' starts a comment. Throws UsageError.
void apply_config_text(RunConfig& cfg, const std::string& text);

/// Recovers the RunConfig embedded in a JSON or CSV report.
RunConfig config_from_report(const std::string& report_text);

/// Produces the full report text (body plus metadata) for a config.
/// `summary` receives the human-readable lines.
std::string render_report(RunConfig cfg, std::ostream& summary);

/// Exit codes: 0 success, 1 domain or resource error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twoenv
