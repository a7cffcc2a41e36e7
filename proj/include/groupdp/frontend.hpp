// Copyright 2026 The GroupDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Batch front end used by the CLI: single-point queries, sweep tables over
// the group size, and the self-validation run against the brute-force
// oracles. All output formatting is deterministic; non-finite epsilons print
// as the literal string "inf".

#ifndef GROUPDP_FRONTEND_HPP_
#define GROUPDP_FRONTEND_HPP_

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <future>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "groupdp/accountant.hpp"
#include "groupdp/baselines.hpp"
#include "groupdp/oracle.hpp"

namespace groupdp {

// Shortest decimal representation that round-trips to the same double;
// non-finite values become "inf".
inline std::string FormatReal(double value) {
  if (!std::isfinite(value)) return "inf";
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, end);
}

enum class Method { kMog, kVadhan, kLower };

inline std::optional<Method> ParseMethod(const std::string& name) {
  if (name == "mog") return Method::kMog;
  if (name == "vadhan") return Method::kVadhan;
  if (name == "lower") return Method::kLower;
  return std::nullopt;
}

struct EpsilonQuery {
  AccountantConfig config;
  Method method = Method::kMog;
  std::optional<double> delta;    // exactly one of delta/epsilon is set
  std::optional<double> epsilon;
};

struct EpsilonQueryResult {
  double epsilon = 0.0;
  double delta = 0.0;
  int group_size = 0;
  Direction dominant_direction = Direction::kAdd;
};

inline EpsilonQueryResult RunEpsilonQuery(const EpsilonQuery& query) {
  query.config.CheckValid();
  if (query.delta.has_value() == query.epsilon.has_value()) {
    throw std::invalid_argument(
        "RunEpsilonQuery: provide exactly one of delta and epsilon.");
  }
  EpsilonQueryResult result;
  result.group_size = query.config.group_size;

  if (query.epsilon.has_value()) {
    if (query.method != Method::kMog) {
      throw std::invalid_argument(
          "RunEpsilonQuery: fixed-epsilon queries support only the mog "
          "method.");
    }
    const ComposedPlds composed = ComposeForConfig(query.config);
    const double delta_add = GetDeltaForEpsilon(composed.add, *query.epsilon);
    const double delta_remove =
        GetDeltaForEpsilon(composed.remove, *query.epsilon);
    result.epsilon = *query.epsilon;
    result.delta = std::max(delta_add, delta_remove);
    result.dominant_direction =
        delta_remove >= delta_add ? Direction::kRemove : Direction::kAdd;
    return result;
  }

  const double delta = *query.delta;
  result.delta = delta;
  switch (query.method) {
    case Method::kMog: {
      const GroupEpsilonResult detail =
          GroupEpsilonDetail(ComposeForConfig(query.config), delta);
      result.epsilon = detail.epsilon;
      result.dominant_direction = detail.dominant_direction;
      break;
    }
    case Method::kVadhan:
    case Method::kLower: {
      if (query.config.group_size < 1) {
        throw std::invalid_argument(
            "RunEpsilonQuery: baselines require group_size >= 1.");
      }
      AccountantConfig example_level = query.config;
      example_level.group_size = 1;
      const ComposedPlds pair = ComposeForConfig(example_level);
      const GroupEpsilonResult detail = GroupEpsilonDetail(pair, delta);
      result.dominant_direction = detail.dominant_direction;
      result.epsilon =
          query.method == Method::kVadhan
              ? VadhanGroupEpsilon(pair, query.config.group_size, delta)
              : LinearLowerBound(pair, query.config.group_size, delta);
      break;
    }
  }
  return result;
}

inline void AppendSchemeJson(const SamplingScheme& scheme, std::string& out) {
  if (const auto* poisson = std::get_if<PoissonSampling>(&scheme)) {
    out += "\"sampling\":\"poisson\",\"poisson_q\":" +
           FormatReal(poisson->sampling_probability);
  } else {
    const auto& batch = std::get<FixedBatchSampling>(scheme);
    out += "\"sampling\":\"fixed_batch\",\"batch_size\":" +
           std::to_string(batch.batch_size) +
           ",\"dataset_size\":" + std::to_string(batch.dataset_size);
  }
}

inline std::string MethodName(Method method) {
  switch (method) {
    case Method::kMog: return "mog";
    case Method::kVadhan: return "vadhan";
    case Method::kLower: return "lower";
  }
  return "mog";
}

inline std::string FormatEpsilonJson(const EpsilonQuery& query,
                                     const EpsilonQueryResult& result) {
  std::string out = "{";
  out += "\"epsilon\":";
  out += std::isfinite(result.epsilon) ? FormatReal(result.epsilon) : "\"inf\"";
  out += ",\"delta\":" + FormatReal(result.delta);
  out += ",\"k\":" + std::to_string(result.group_size);
  out += ",\"direction_dominant\":\"";
  out += ToString(result.dominant_direction);
  out += "\",\"params\":{";
  out += "\"method\":\"" + MethodName(query.method) + "\",";
  AppendSchemeJson(query.config.scheme, out);
  out += ",\"sigma\":" + FormatReal(query.config.sigma);
  out += ",\"rounds\":" + std::to_string(query.config.rounds);
  out += ",\"grid_spacing\":" + FormatReal(query.config.grid_spacing);
  out += ",\"tail_mass\":" + FormatReal(query.config.tail_mass);
  out += "}}";
  return out;
}

struct SweepRow {
  int group_size = 0;
  double epsilon_mog = 0.0;
  double epsilon_vadhan = 0.0;
  double epsilon_lower = 0.0;
};

// One row per group size in 1..k_max. The k = 1 composed pair is built once
// and shared by the mog k=1 row and by both baselines at every k; the
// remaining rows are independent and evaluated concurrently.
inline std::vector<SweepRow> RunSweep(const AccountantConfig& base, int k_max,
                                      double delta,
                                      double epsilon_cap = kDefaultEpsilonCap) {
  if (k_max < 1) {
    throw std::invalid_argument("RunSweep: k_max must be >= 1.");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("RunSweep: delta must be in (0, 1).");
  }
  AccountantConfig example_level = base;
  example_level.group_size = 1;
  example_level.CheckValid();

  const ComposedPlds pair_k1 = ComposeForConfig(example_level);
  const double epsilon_1 = GroupEpsilonDetail(pair_k1, delta, epsilon_cap).epsilon;

  std::vector<SweepRow> rows(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    SweepRow& row = rows[static_cast<std::size_t>(k - 1)];
    row.group_size = k;
    row.epsilon_vadhan = VadhanGroupEpsilon(pair_k1, k, delta, epsilon_cap);
    row.epsilon_lower = static_cast<double>(k) * epsilon_1;
  }
  rows[0].epsilon_mog = epsilon_1;

  std::atomic<int> next_k{2};
  const auto worker = [&] {
    while (true) {
      const int k = next_k.fetch_add(1);
      if (k > k_max) return;
      AccountantConfig config = base;
      config.group_size = k;
      rows[static_cast<std::size_t>(k - 1)].epsilon_mog =
          GroupEpsilonDetail(ComposeForConfig(config), delta, epsilon_cap)
              .epsilon;
    }
  };
  const unsigned workers = std::max(
      1u, std::min({std::thread::hardware_concurrency(), 4u,
                    static_cast<unsigned>(std::max(0, k_max - 1))}));
  std::vector<std::future<void>> pending;
  for (unsigned w = 0; w < workers; ++w) {
    pending.push_back(std::async(std::launch::async, worker));
  }
  for (auto& f : pending) f.get();
  return rows;
}

inline std::string FormatSweepCsv(const std::vector<SweepRow>& rows) {
  std::string out = "k,epsilon_mog,epsilon_vadhan,epsilon_lower_lb\n";
  for (const auto& row : rows) {
    out += std::to_string(row.group_size) + "," + FormatReal(row.epsilon_mog) +
           "," + FormatReal(row.epsilon_vadhan) + "," +
           FormatReal(row.epsilon_lower) + "\n";
  }
  return out;
}

inline std::string FormatSweepJson(const AccountantConfig& base,
                                   const std::vector<SweepRow>& rows,
                                   double delta) {
  std::string out = "{\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0) out += ",";
    const auto& row = rows[i];
    out += "{\"k\":" + std::to_string(row.group_size);
    const auto epsilon_field = [](double v) {
      return std::isfinite(v) ? FormatReal(v) : "\"inf\"";
    };
    out += ",\"epsilon_mog\":" + epsilon_field(row.epsilon_mog);
    out += ",\"epsilon_vadhan\":" + epsilon_field(row.epsilon_vadhan);
    out += ",\"epsilon_lower_lb\":" + epsilon_field(row.epsilon_lower) + "}";
  }
  out += "],\"params\":{";
  AppendSchemeJson(base.scheme, out);
  out += ",\"sigma\":" + FormatReal(base.sigma);
  out += ",\"rounds\":" + std::to_string(base.rounds);
  out += ",\"delta\":" + FormatReal(delta);
  out += ",\"grid_spacing\":" + FormatReal(base.grid_spacing);
  out += ",\"tail_mass\":" + FormatReal(base.tail_mass);
  out += "}}";
  return out;
}

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double observed = 0.0;  // the measured gap or error
  double bound = 0.0;     // what it was compared against
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed = true;
};

// Tightness bound for the oracle comparison: loose enough for the default
// grid, violated immediately by a coarse one.
inline constexpr double kValidationTightnessBound = 1e-3;

// Pessimism must hold up to the quadrature tolerance.
inline constexpr double kValidationPessimismSlack = 1e-9;

// Runs the oracle suite on a fixed parameter grid: quadrature against the
// discretized PLD at T=1, the fine-grid composition oracle at T=2, and the
// Monte-Carlo simulator at T=1. Deterministic given the seed. The sample and
// spacing knobs exist for fast deterministic tests; defaults are the real
// validation strength.
inline ValidationReport RunValidation(std::uint64_t seed,
                                      double grid_spacing = 1e-4,
                                      std::int64_t mc_samples = 1000000,
                                      double oracle_spacing = 5e-6) {
  ValidationReport report;
  const auto add_check = [&](const std::string& name, double observed,
                             double bound) {
    const bool passed = observed <= bound;
    report.checks.push_back({name, passed, observed, bound});
    report.all_passed = report.all_passed && passed;
  };

  const double sigma = 1.0;
  const PldDiscretization discretization{grid_spacing, 1e-12};
  const std::vector<double> epsilons = {0.0, 0.5, 1.0};

  struct Case {
    int k;
    double q;
  };
  const std::vector<Case> cases = {{1, 0.5}, {2, 0.3}, {3, 0.1}};
  const SensitivitySpec zero = SensitivitySpec::FromEntries({{0.0, 1.0}});

  for (const auto& c : cases) {
    const SensitivitySpec spec = BinomialSensitivities(c.k, c.q);
    for (Direction direction : {Direction::kAdd, Direction::kRemove}) {
      const DiscretePld pld = MogPld(spec, sigma, direction, discretization);
      double worst_violation = -1.0;
      double worst_gap = 0.0;
      for (double eps : epsilons) {
        const double alpha = std::exp(eps);
        const double oracle =
            direction == Direction::kAdd
                ? HockeyStickQuadrature(zero, spec, sigma, alpha)
                : HockeyStickQuadrature(spec, zero, sigma, alpha);
        const double accounted = GetDeltaForEpsilon(pld, eps);
        worst_violation = std::max(worst_violation, oracle - accounted);
        worst_gap = std::max(worst_gap, accounted - oracle);
      }
      const std::string label = "binom(k=" + std::to_string(c.k) +
                                ",q=" + FormatReal(c.q) + ") " +
                                ToString(direction);
      add_check("pessimism  T=1 " + label, worst_violation,
                kValidationPessimismSlack);
      add_check("tightness  T=1 " + label, worst_gap, kValidationTightnessBound);
    }
  }

  {
    const SensitivitySpec spec = BinomialSensitivities(2, 0.3);
    for (Direction direction : {Direction::kAdd, Direction::kRemove}) {
      const DiscretePld composed = SelfCompose(
          MogPld(spec, sigma, direction, discretization), 2);
      double worst_violation = -1.0;
      double worst_gap = 0.0;
      for (double eps : epsilons) {
        const double oracle =
            ComposeOracle(spec, sigma, 2, eps, direction, oracle_spacing);
        const double accounted = GetDeltaForEpsilon(composed, eps);
        worst_violation = std::max(worst_violation, oracle - accounted);
        worst_gap = std::max(worst_gap, accounted - oracle);
      }
      const std::string label =
          std::string("binom(k=2,q=0.3) ") + ToString(direction);
      add_check("pessimism  T=2 " + label, worst_violation,
                kValidationPessimismSlack);
      add_check("tightness  T=2 " + label, worst_gap, kValidationTightnessBound);
    }
  }

  {
    const SensitivitySpec spec = BinomialSensitivities(1, 0.5);
    const SamplingScheme scheme = PoissonSampling{0.5};
    const MonteCarloEstimate mc =
        SimulateTightness(1, scheme, sigma, 1, 0.0, mc_samples, seed);
    const double oracle = HockeyStickQuadrature(zero, spec, sigma, 1.0);
    add_check("monte-carlo T=1 binom(k=1,q=0.5) add eps=0",
              std::abs(mc.estimate - oracle), 3.0 * mc.std_error);
  }

  return report;
}

inline std::string FormatValidationReport(const ValidationReport& report,
                                          std::uint64_t seed,
                                          double grid_spacing) {
  std::string out = "validation run: seed=" + std::to_string(seed) +
                    " grid_spacing=" + FormatReal(grid_spacing) + "\n";
  for (const auto& check : report.checks) {
    out += std::string(check.passed ? "PASS" : "FAIL") + "  " + check.name +
           "  observed=" + FormatReal(check.observed) +
           " bound=" + FormatReal(check.bound) + "\n";
  }
  out += report.all_passed ? "all checks passed\n" : "checks FAILED\n";
  return out;
}

}  // namespace groupdp

#endif  // GROUPDP_FRONTEND_HPP_
