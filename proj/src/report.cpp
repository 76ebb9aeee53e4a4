#include "twoenv/report.hpp"

#include <charconv>
#include <sstream>

#include "twoenv/error.hpp"

#ifndef TWOENV_VERSION
#define TWOENV_VERSION "0.0.0"
#endif

namespace twoenv {

const char* version() { return TWOENV_VERSION; }

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

namespace {

Json outcome_json(const Outcome& x) {
  if (x.arity() == 1) return x.value();
  Json arr = Json::array();
  for (double c : x.coords()) arr.push_back(c);
  return arr;
}

}  // namespace

Json to_json(const NaiveExpectation& naive) {
  return Json{{"alpha", naive.alpha},
              {"e_other", naive.e_other},
              {"naive_gain", naive.e_other - naive.alpha},
              {"annotation", naive.annotation}};
}

Json to_json(const OutcomeDistribution& d) {
  Json arr = Json::array();
  for (std::size_t k = 0; k < d.outcomes.size(); ++k) {
    if (d.probs[k] == 0.0) continue;
    arr.push_back(Json{{"outcome", outcome_json(d.outcomes[k])}, {"prob", d.probs[k]}});
  }
  return arr;
}

Json to_json(const MleResult& mle, const StateSpace& space) {
  Json maximizers = Json::array();
  for (const auto& s : mle.maximizers) {
    const double w = space.point(s.index);
    maximizers.push_back(Json::array({w, 2.0 * w}));
  }
  std::size_t excluded = 0;
  for (double f : mle.likelihood) excluded += (f == 0.0);
  return Json{{"maximizers", maximizers}, {"excluded_states", excluded}};
}

Json to_json(const LlnRecord& r) {
  return Json{{"seed", r.seed},
              {"stream", r.stream},
              {"trials", r.trials},
              {"v1", r.v1},
              {"v2", r.v2},
              {"target", r.target},
              {"final_avg_you", r.avg_you.back()},
              {"final_avg_host", r.avg_host.back()}};
}

Json to_json(const SwitchGain& g) {
  Json j{{"value", g.value}, {"error_bound", g.error_bound},
         {"divergence_warning", g.divergence_warning}};
  if (g.divergence_warning) j["warning"] = g.warning;
  return j;
}

Json to_json(const MonteCarloGain& mc) {
  return Json{{"trials", mc.trials}, {"mean", mc.mean}, {"standard_error", mc.standard_error}};
}

Json to_json(const TruncatedExpectation& e) {
  return Json{{"k_max", e.k_max},
              {"partial_sum", e.partial_sum},
              {"normalized", e.normalized},
              {"divergence_flag", e.diverges}};
}

Json to_json(const ProbOtherGreater& p) {
  return Json{{"m", p.m},
              {"prob_other_greater_exact", p.exact},
              {"prob_other_greater_exact_fraction", "1/" + std::to_string(p.exact_denominator)},
              {"prob_other_greater_truncated", p.truncated}};
}

Json to_json(const StpRecord& r) {
  Json strata = Json::array();
  for (const auto& s : r.strata) {
    strata.push_back(Json{{"m", s.m},
                          {"count", s.count},
                          {"mean_y", s.mean_y},
                          {"frac_y_greater", s.frac_y_greater},
                          {"prob_y_greater", s.prob_y_greater}});
  }
  return Json{{"seed", r.seed},
              {"streams", r.blocks},
              {"trials", r.trials},
              {"frac_y_greater", r.frac_y_greater},
              {"frac_x_greater", r.frac_x_greater},
              {"frac_equal", r.frac_equal},
              {"strata", strata},
              {"expectation_criterion", r.expectation_criterion},
              {"probability_criterion", r.probability_criterion}};
}

Json bayesian_report_json(const BayesianEnvelope& env, const BayesianReport& r,
                          std::uint64_t seed) {
  const StateSpace& space = env.model.space;
  return Json{
      {"model", "doubling envelope pair, V1(w) = w, V2(w) = 2w"},
      {"grid",
       Json{{"kind", "dyadic"},
            {"hi", env.grid.hi},
            {"n", env.grid.n},
            {"per_octave", env.grid.per_octave},
            {"lowest_point", space.point(0)},
            {"highest_point", space.point(space.size() - 1)}}},
      {"prior",
       Json{{"density", env.density.name},
            {"params", env.density.params},
            {"grid_mean", r.prior_mean},
            {"truncated_mass", env.truncated_mass},
            {"infinite_mean", env.tail == PriorTail::infinite_mean}}},
      {"alpha", r.alpha},
      {"p_alpha", r.p_alpha},
      {"p_alpha_density", r.p_alpha_density},
      {"posterior_weights",
       Json::array({Json{{"state", Json::array({r.alpha / 2.0, r.alpha})}, {"weight", r.w_small}},
                    Json{{"state", Json::array({r.alpha, 2.0 * r.alpha})},
                         {"weight", r.w_large}}})},
      {"conditional_gain", r.conditional_gain},
      {"unconditional_gain", to_json(r.unconditional_gain)},
      {"measured_value_expectation", r.measured_expectation},
      {"seed", seed}};
}

std::string lln_trace_csv(const LlnRecord& r) {
  std::string out = "n,avg_you,avg_host\n";
  out.reserve(out.size() + r.avg_you.size() * 40);
  for (std::size_t k = 0; k < r.avg_you.size(); ++k) {
    out += std::to_string(k + 1);
    out += ',';
    out += format_double(r.avg_you[k]);
    out += ',';
    out += format_double(r.avg_host[k]);
    out += '\n';
  }
  return out;
}

std::string report_body(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json j = Json::parse(text);
    j.erase("metadata");
    return j.dump(2);
  }
  std::istringstream in(text);
  std::string line;
  std::string body;
  while (std::getline(in, line)) {
    if (line.rfind("# metadata.", 0) == 0) continue;
    body += line;
    body += '\n';
  }
  return body;
}

}  // namespace twoenv
