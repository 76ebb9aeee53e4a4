#pragma once

// Serialized report shapes shared by the CLI and tests.
//
// JSON reports are objects with keys, in order: "version", "rng",
// "subcommand", "config", "report", "metadata". Everything except "metadata"
// is the report body, which is a pure function of the config. CSV traces start
// with "# key=value" comment lines (version, rng, the config, then
// "# metadata.*" lines) followed by a header row and data rows.

#include <string>
#include <vector>

#include "json.hpp"
#include "twoenv/envelope.hpp"
#include "twoenv/stpetersburg.hpp"

namespace twoenv {

using Json = nlohmann::ordered_json;

/// Library version string embedded in every report.
const char* version();

Json to_json(const NaiveExpectation& naive);
Json to_json(const OutcomeDistribution& d);
Json to_json(const MleResult& mle, const StateSpace& space);
Json to_json(const LlnRecord& record);  // summary only; traces go to CSV
Json to_json(const SwitchGain& gain);
Json to_json(const MonteCarloGain& mc);
Json to_json(const TruncatedExpectation& e);
Json to_json(const ProbOtherGreater& p);
Json to_json(const StpRecord& record);

/// Bayesian envelope report with the documented field names (model, grid,
/// prior, alpha, p_alpha, posterior_weights, conditional_gain,
/// unconditional_gain, seed) plus supporting quantities.
Json bayesian_report_json(const BayesianEnvelope& env, const BayesianReport& report,
                          std::uint64_t seed);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

/// Running-average trace rows: n, avg_you, avg_host.
std::string lln_trace_csv(const LlnRecord& record);

/// The report body: for JSON, the object without "metadata" dumped with a
/// fixed indent; for CSV, the text without "# metadata." lines.
std::string report_body(const std::string& report_text);

}  // namespace twoenv
