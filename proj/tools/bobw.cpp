#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bobw/harness.hpp"
#include "bobw/invariants.hpp"

namespace {

void print_summary(const bobw::RunResult& result) {
  std::printf("%10s %14s %14s %14s %16s\n", "t", "mean", "q25", "q75", "mean(1-p_best)");
  for (const auto& s : result.summary)
    std::printf("%10zu %14.4f %14.4f %14.4f %16.4f\n", s.t, s.mean, s.q25, s.q75, s.mean_one_minus_p_best);
  std::printf("bonus audit: %zu checks, %zu violations, worst ratio %.4f\n", result.audit.checks,
              result.audit.violations, result.audit.worst_ratio);
}

void print_fit(const std::vector<std::pair<double, double>>& curve) {
  const auto fit = bobw::slope_fit(curve);
  std::printf("ln t fit: coefficient %.6g, R^2 %.6f\n", fit.log_coefficient, fit.log_r2);
  std::printf("sqrt t fit: coefficient %.6g, R^2 %.6f\n", fit.sqrt_coefficient, fit.sqrt_r2);
  try {
    const auto v = bobw::stochastic_verdict(curve);
    std::printf("regret/sqrt(t): %.6g at T, %.6g at T/16; stochastic verdict: %s\n", v.ratio_at_end,
                v.ratio_earlier, v.passes ? "pass" : "fail");
  } catch (const std::exception& e) {
    std::printf("no stochastic verdict: %s\n", e.what());
  }
}

bool try_fit(const std::vector<bobw::SummaryRow>& summary) {
  try {
    print_fit(bobw::mean_curve(summary));
    return true;
  } catch (const std::exception& e) {
    std::printf("no fit: %s\n", e.what());
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best-of-both-worlds bandit experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  std::size_t horizon = 0;
  std::size_t seed_count = 0;

  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Records CSV path (overrides the config)");
  run->add_option("-T,--horizon", horizon, "Horizon (overrides the config)");
  run->add_option("-n,--seeds", seed_count, "Use seeds 1..n (overrides the config)");

  std::vector<double> gaps;
  std::vector<double> budgets;
  std::vector<std::size_t> horizons;
  std::string out_dir = ".";
  auto* sweep = app.add_subcommand("sweep", "Run a config over a grid of gaps, corruption budgets and horizons");
  sweep->add_option("config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--gaps", gaps, "Gap values");
  sweep->add_option("--budgets", budgets, "Corruption budgets");
  sweep->add_option("--horizons", horizons, "Horizons");
  sweep->add_option("-d,--out-dir", out_dir, "Directory for CSV outputs");
  sweep->add_option("-n,--seeds", seed_count, "Use seeds 1..n (overrides the config)");

  std::vector<std::string> scope;
  bool verbose = false;
  auto* check = app.add_subcommand("check", "Run invariant suites");
  check->add_option("scope", scope, "Suites: unbiasedness, stability, graphs, audit, negative-control (default: all)");
  check->add_flag("-v,--verbose", verbose, "Print every check");

  std::string csv_path;
  auto* fit = app.add_subcommand("fit", "Fit ln t and sqrt t models to an existing records CSV");
  fit->add_option("csv", csv_path, "Records CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto config = bobw::load_config(config_path);
      if (!output.empty()) config.output = output;
      if (horizon > 0) config.horizon = horizon;
      if (seed_count > 0) {
        config.seeds.clear();
        for (std::size_t s = 1; s <= seed_count; ++s) config.seeds.push_back(s);
      }
      const auto result = bobw::run_experiment(config);
      print_summary(result);
      try_fit(result.summary);
      return result.audit.violations == 0 ? 0 : 1;
    }
    if (*sweep) {
      const auto base = bobw::load_config(config_path);
      if (gaps.empty()) gaps.push_back(base.gap);
      if (budgets.empty()) budgets.push_back(base.corruption_budget);
      if (horizons.empty()) horizons.push_back(base.horizon);
      std::printf("gap,budget,horizon,final_mean_regret,final_q25,final_q75,audit_violations\n");
      for (double gap : gaps)
        for (double budget : budgets)
          for (std::size_t T : horizons) {
            auto config = base;
            config.gap = gap;
            config.corruption_budget = budget;
            config.horizon = T;
            if (seed_count > 0) {
              config.seeds.clear();
              for (std::size_t s = 1; s <= seed_count; ++s) config.seeds.push_back(s);
            }
            config.output = out_dir + "/sweep_gap" + bobw::format_number(gap) + "_C" + bobw::format_number(budget) +
                            "_T" + std::to_string(T) + ".csv";
            config.summary_output.clear();
            config.switch_output.clear();
            const auto result = bobw::run_experiment(config);
            const auto& last = result.summary.back();
            std::printf("%s,%s,%zu,%s,%s,%s,%zu\n", bobw::format_number(gap).c_str(),
                        bobw::format_number(budget).c_str(), T, bobw::format_number(last.mean).c_str(),
                        bobw::format_number(last.q25).c_str(), bobw::format_number(last.q75).c_str(),
                        result.audit.violations);
          }
      return 0;
    }
    if (*check) {
      const auto report = bobw::check_invariants(scope);
      for (const auto& item : report.items)
        if (verbose || !item.passed)
          std::printf("%s %s: %s\n", item.passed ? "ok  " : "FAIL", item.name.c_str(), item.detail.c_str());
      std::printf("%zu checks, %zu failed\n", report.items.size(), report.failures());
      return report.failures() == 0 ? 0 : 1;
    }
    if (*fit) {
      std::ifstream in(csv_path);
      const auto curves = bobw::read_records_csv(in);
      if (curves.empty()) throw std::invalid_argument("no records");
      std::vector<std::pair<double, double>> mean = curves.front().second;
      for (auto& p : mean) p.second = 0.0;
      for (const auto& [seed, curve] : curves) {
        if (curve.size() != mean.size()) throw std::invalid_argument("seeds have different checkpoint grids");
        for (std::size_t i = 0; i < curve.size(); ++i) mean[i].second += curve[i].second;
      }
      for (auto& p : mean) p.second /= static_cast<double>(curves.size());
      std::printf("%zu seeds\n", curves.size());
      print_fit(mean);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
