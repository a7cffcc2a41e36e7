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
// groupdp: group-level (epsilon, delta) accounting for DP-SGD with Poisson
// or fixed-batch sampling.
//
//   groupdp epsilon  --poisson-q 0.01 --sigma 1 --rounds 2000 --k 4
//                    --delta 1e-6 --method mog
//   groupdp sweep    --poisson-q 0.01 --sigma 1 --rounds 2000 --delta 1e-6
//                    --k-max 12
//   groupdp validate --seed 42

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "groupdp/groupdp.hpp"

namespace {

struct CommonFlags {
  std::optional<double> poisson_q;
  std::optional<int> batch_size;
  std::optional<int> dataset_size;
  double sigma = 1.0;
  int rounds = 1;
  double grid_spacing = 1e-4;
  double tail_mass = 1e-12;
};

void AddCommonFlags(CLI::App& cmd, CommonFlags& flags) {
  cmd.add_option("--poisson-q", flags.poisson_q,
                 "Poisson sampling probability");
  cmd.add_option("--batch-size", flags.batch_size, "fixed batch size");
  cmd.add_option("--dataset-size", flags.dataset_size,
                 "dataset size for fixed-batch sampling");
  cmd.add_option("--sigma", flags.sigma, "noise multiplier")->required();
  cmd.add_option("--rounds", flags.rounds, "number of composed rounds")
      ->required();
  cmd.add_option("--grid-spacing", flags.grid_spacing,
                 "loss discretization grid, nats (default 1e-4)");
  cmd.add_option("--tail-mass", flags.tail_mass,
                 "per-PLD tail mass (default 1e-12)");
}

// Exactly one sampling scheme must be selected. Returns std::nullopt and
// reports a usage error otherwise.
std::optional<groupdp::SamplingScheme> ResolveScheme(const CommonFlags& flags) {
  const bool poisson = flags.poisson_q.has_value();
  const bool fixed = flags.batch_size.has_value() || flags.dataset_size.has_value();
  if (poisson == fixed) {
    std::cerr << "error: select exactly one sampling scheme: --poisson-q or "
                 "--batch-size with --dataset-size\n";
    return std::nullopt;
  }
  if (poisson) {
    return groupdp::SamplingScheme{groupdp::PoissonSampling{*flags.poisson_q}};
  }
  if (!flags.batch_size.has_value() || !flags.dataset_size.has_value()) {
    std::cerr << "error: fixed-batch sampling needs both --batch-size and "
                 "--dataset-size\n";
    return std::nullopt;
  }
  return groupdp::SamplingScheme{
      groupdp::FixedBatchSampling{*flags.batch_size, *flags.dataset_size}};
}

groupdp::AccountantConfig MakeConfig(const CommonFlags& flags,
                                     const groupdp::SamplingScheme& scheme,
                                     int group_size) {
  groupdp::AccountantConfig config;
  config.sigma = flags.sigma;
  config.rounds = flags.rounds;
  config.group_size = group_size;
  config.scheme = scheme;
  config.grid_spacing = flags.grid_spacing;
  config.tail_mass = flags.tail_mass;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-level (epsilon, delta) accounting for DP-SGD"};
  app.require_subcommand(1);

  CommonFlags epsilon_flags;
  int query_k = 0;
  std::optional<double> query_delta;
  std::optional<double> query_epsilon;
  std::string method_name = "mog";
  std::string epsilon_output = "json";
  CLI::App* cmd_epsilon =
      app.add_subcommand("epsilon", "single (epsilon, delta) query");
  AddCommonFlags(*cmd_epsilon, epsilon_flags);
  cmd_epsilon->add_option("--k", query_k, "group size")->required();
  cmd_epsilon->add_option("--delta", query_delta, "target delta");
  cmd_epsilon->add_option("--epsilon", query_epsilon, "target epsilon");
  cmd_epsilon->add_option("--method", method_name,
                          "mog | vadhan | lower (default mog)");
  cmd_epsilon->add_option("--output", epsilon_output, "json (default)");

  CommonFlags sweep_flags;
  int k_max = 0;
  double sweep_delta = 0.0;
  std::string sweep_output = "csv";
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "epsilon-vs-k table with baselines");
  AddCommonFlags(*cmd_sweep, sweep_flags);
  cmd_sweep->add_option("--k-max", k_max, "largest group size")->required();
  cmd_sweep->add_option("--delta", sweep_delta, "target delta")->required();
  cmd_sweep->add_option("--output", sweep_output, "csv (default) | json");

  std::uint64_t validate_seed = 42;
  double validate_grid = 1e-4;
  CLI::App* cmd_validate =
      app.add_subcommand("validate", "run the brute-force oracle suite");
  cmd_validate->add_option("--seed", validate_seed,
                           "Monte-Carlo seed (default 42)");
  cmd_validate->add_option("--grid-spacing", validate_grid,
                           "grid used by the accountant side (default 1e-4)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_epsilon->parsed()) {
      const auto scheme = ResolveScheme(epsilon_flags);
      if (!scheme) return 2;
      if (query_delta.has_value() == query_epsilon.has_value()) {
        std::cerr << "error: provide exactly one of --delta and --epsilon\n";
        return 2;
      }
      const auto method = groupdp::ParseMethod(method_name);
      if (!method) {
        std::cerr << "error: unknown --method '" << method_name << "'\n";
        return 2;
      }
      if (epsilon_output != "json") {
        std::cerr << "error: epsilon supports only --output json\n";
        return 2;
      }
      groupdp::EpsilonQuery query;
      query.config = MakeConfig(epsilon_flags, *scheme, query_k);
      query.method = *method;
      query.delta = query_delta;
      query.epsilon = query_epsilon;
      const groupdp::EpsilonQueryResult result = RunEpsilonQuery(query);
      std::cout << FormatEpsilonJson(query, result) << "\n";
      return 0;
    }

    if (cmd_sweep->parsed()) {
      const auto scheme = ResolveScheme(sweep_flags);
      if (!scheme) return 2;
      if (sweep_output != "csv" && sweep_output != "json") {
        std::cerr << "error: --output must be csv or json\n";
        return 2;
      }
      const groupdp::AccountantConfig base = MakeConfig(sweep_flags, *scheme, 1);
      const auto rows = groupdp::RunSweep(base, k_max, sweep_delta);
      std::cout << (sweep_output == "csv"
                        ? groupdp::FormatSweepCsv(rows)
                        : groupdp::FormatSweepJson(base, rows, sweep_delta));
      return 0;
    }

    const groupdp::ValidationReport report =
        groupdp::RunValidation(validate_seed, validate_grid);
    std::cout << groupdp::FormatValidationReport(report, validate_seed,
                                                 validate_grid);
    return report.all_passed ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
