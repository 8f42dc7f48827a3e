#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locpen/concentration.hpp"
#include "locpen/config.hpp"
#include "locpen/harness.hpp"
#include "locpen/penalties.hpp"

using namespace locpen;

namespace {

struct PenaltyFlags {
  std::size_t mc_draws = kDefaultMcDraws;
  std::uint64_t seed = 1;
  std::string profile = "paper";
  double constant_scale = 0.05;
  double gamma = 1.0;
  double gamma1 = 2.0;
  double gamma2 = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--mc-draws", mc_draws, "Monte Carlo sign draws when n > 20")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "seed for Monte Carlo signs");
    app->add_option("--profile", profile, "penalty constants")->check(CLI::IsMember({"paper", "exploratory"}));
    app->add_option("--constant-scale", constant_scale, "scale of the exploratory constants")->check(CLI::PositiveNumber);
    app->add_option("--gamma", gamma, "Vapnik penalty multiplier")->check(CLI::PositiveNumber);
    app->add_option("--gamma1", gamma1, "global Rademacher multiplier")->check(CLI::PositiveNumber);
    app->add_option("--gamma2", gamma2, "global log k multiplier")->check(CLI::PositiveNumber);
  }

  PenaltyOptions options() const {
    PenaltyOptions o;
    o.mc_draws = mc_draws;
    o.seed = seed;
    o.gamma = gamma;
    o.gamma1 = gamma1;
    o.gamma2 = gamma2;
    if (profile == "exploratory") o.profile = ConstantProfile::exploratory(constant_scale);
    return o;
  }
};

std::string terms_text(const PenaltyBreakdown& p) {
  std::string out;
  char buf[96];
  for (const auto& t : p.terms) {
    std::snprintf(buf, sizeof buf, "%s%s=%.6g", out.empty() ? "" : " ", t.name.c_str(), t.value);
    out += buf;
  }
  for (const auto& [key, value] : p.labels) out += " " + key + "=" + value;
  return out;
}

void print_selection(const SelectionResult& r, PenaltyKind kind) {
  std::printf("penalty: %s\n", to_string(kind).c_str());
  std::printf("%3s  %-14s %10s %10s %10s %10s  %s\n", "k", "class", "emp_loss", "raw", "penalty", "score", "erm");
  for (const auto& row : r.table) {
    std::printf("%3d  %-14s %10.6f %10.6f %10.6f %10.6f  %s%s\n", row.k, row.class_name.c_str(),
                row.erm.empirical_loss, row.penalty.raw_value, row.penalty.value, row.score,
                describe(row.erm.classifier).c_str(), row.k == r.chosen_k ? "  <- chosen" : "");
  }
  std::printf("chosen k = %d: %s\n", r.chosen_k, describe(r.chosen_classifier).c_str());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Penalized model selection with localized Rademacher penalties"};
  app.require_subcommand(1);

  // select
  auto* select = app.add_subcommand("select", "penalized ERM over a class hierarchy on a dataset");
  std::string data_path;
  std::string classes_text = "intervals:1..5";
  std::string penalty_name = "localized";
  PenaltyFlags select_flags;
  select->add_option("--data", data_path, "CSV with header x1,...,xd,y")->required();
  select->add_option("--classes", classes_text, "e.g. intervals:1..5, thresholds, stumps:2");
  select->add_option("--penalty", penalty_name, "vapnik|global|simple|localized");
  select_flags.attach(select);

  // penalties
  auto* penalties = app.add_subcommand("penalties", "per-class penalty breakdowns on a dataset");
  bool all_kinds = false;
  std::string penalties_kind = "localized";
  PenaltyFlags penalties_flags;
  penalties->add_option("--data", data_path, "CSV with header x1,...,xd,y")->required();
  penalties->add_option("--classes", classes_text, "class list");
  penalties->add_flag("--all", all_kinds, "every penalty kind");
  penalties->add_option("--penalty", penalties_kind, "single penalty kind when --all is absent");
  penalties_flags.attach(penalties);

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo oracle-inequality experiment");
  std::string config_path;
  std::string out_path;
  std::string svg_path;
  std::optional<unsigned> workers_override;
  experiment->add_option("--config", config_path, "key = value config file")->required();
  experiment->add_option("--out", out_path, "CSV report path")->required();
  experiment->add_option("--svg", svg_path, "SVG plot path");
  experiment->add_option("--workers", workers_override, "override the configured worker count");

  // lemma
  auto* lemma = app.add_subcommand("lemma", "empirical frequency of the penalty validity events");
  std::string lemma_penalty = "localized";
  double lemma_gamma = 11.0;
  std::string lemma_out;
  lemma->add_option("--config", config_path, "key = value config file")->required();
  lemma->add_option("--penalty", lemma_penalty, "penalty kind");
  lemma->add_option("--gamma", lemma_gamma, "constant in gamma / (n k)^2")->check(CLI::PositiveNumber);
  lemma->add_option("--out", lemma_out, "CSV output");
  lemma->add_option("--workers", workers_override, "override the configured worker count");

  // concentration
  auto* concentration = app.add_subcommand("concentration", "empirical tail and expectation checks");
  std::string prop;
  std::size_t conc_n = 100;
  std::optional<double> conc_eps;
  std::size_t conc_reps = 10000;
  std::size_t conc_expectation_reps = 0;
  std::uint64_t conc_seed = 1;
  std::string conc_class = "intervals:1";
  std::string conc_out;
  std::string target_text = "0.2-0.4, 0.6-0.8";
  double eta = 0.1;
  unsigned conc_workers = 1;
  concentration->add_option("--prop", prop, "which inequality")
      ->required()
      ->check(CLI::IsMember({"3.2", "3.3", "4.4", "4.5", "4.6"}));
  concentration->add_option("--n", conc_n, "sample size")->check(CLI::PositiveNumber);
  concentration->add_option("--eps", conc_eps, "epsilon (default depends on the check)");
  concentration->add_option("--reps", conc_reps, "replicates")->check(CLI::PositiveNumber);
  concentration->add_option("--expectation-reps", conc_expectation_reps, "replicates for expectations (default --reps)");
  concentration->add_option("--seed", conc_seed, "seed");
  concentration->add_option("--class", conc_class, "class spec, or 'target' for the Bayes rule alone");
  concentration->add_option("--out", conc_out, "CSV report path");
  concentration->add_option("--intervals", target_text, "target region, e.g. 0.2-0.4, 0.6-0.8");
  concentration->add_option("--eta", eta, "label noise");
  concentration->add_option("--workers", conc_workers, "worker threads");

  // generate
  auto* generate = app.add_subcommand("generate", "draw a synthetic dataset");
  std::size_t gen_n = 500;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  generate->add_option("--n", gen_n, "sample size")->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_seed, "seed");
  generate->add_option("--intervals", target_text, "target region");
  generate->add_option("--eta", eta, "label noise");
  generate->add_option("--out", gen_out, "CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (select->parsed()) {
      const LabeledSample s = read_sample_csv(data_path);
      const auto classes = parse_class_list(classes_text);
      const PenaltyKind kind = parse_penalty_kind(penalty_name);
      try {
        print_selection(select_model(classes, s, kind, select_flags.options()), kind);
      } catch (const SelectionError& e) {
        std::fprintf(stderr, "error: %s (%zu classes evaluated)\n", e.what(), e.partial().size());
        return 1;
      }
    } else if (penalties->parsed()) {
      const LabeledSample s = read_sample_csv(data_path);
      const auto classes = parse_class_list(classes_text);
      std::vector<PenaltyKind> kinds;
      if (all_kinds) {
        kinds = {PenaltyKind::kVapnik, PenaltyKind::kGlobalRademacher, PenaltyKind::kSimple, PenaltyKind::kLocalized};
      } else {
        kinds = {parse_penalty_kind(penalties_kind)};
      }
      const PenaltyOptions opts = penalties_flags.options();
      std::printf("%-10s %3s %-14s %10s %10s  %s\n", "penalty", "k", "class", "raw", "value", "terms");
      for (const PenaltyKind kind : kinds) {
        for (std::size_t i = 0; i < classes.size(); ++i) {
          const int k = static_cast<int>(i) + 1;
          const PenaltyBreakdown p = compute_penalty(kind, classes[i], s, k, opts);
          std::printf("%-10s %3d %-14s %10.6f %10.6f  %s\n", to_string(kind).c_str(), k, classes[i].name().c_str(),
                      p.raw_value, p.value, terms_text(p).c_str());
        }
      }
    } else if (experiment->parsed()) {
      ExperimentConfig cfg = read_experiment_config(config_path);
      if (workers_override) cfg.workers = *workers_override;
      const ExperimentReport report = run_oracle_experiment(cfg);
      emit_report(report, out_path, ReportFormat::kCsv);
      if (!svg_path.empty()) emit_report(report, svg_path, ReportFormat::kSvg);
      std::fputs(report_summary(report).c_str(), stdout);
    } else if (lemma->parsed()) {
      ExperimentConfig cfg = read_experiment_config(config_path);
      if (workers_override) cfg.workers = *workers_override;
      const LemmaCheckResult r = run_lemma_check(cfg, parse_penalty_kind(lemma_penalty), lemma_gamma);
      std::vector<TailCheckReport> rows = r.estimation;
      rows.insert(rows.end(), r.optimal.begin(), r.optimal.end());
      const std::string csv = tail_reports_csv(rows);
      if (!lemma_out.empty()) write_text(lemma_out, csv);
      std::fputs(csv.c_str(), stdout);
      if (r.structure_checks > 0) {
        std::printf("localization structure: %zu checks, %zu failures, %zu with the whole class retained\n",
                    r.structure_checks, r.structure_failures, r.structure_identical);
        if (r.structure_failures > 0) std::printf("first failure: %s\n", r.first_structure_failure.c_str());
      }
      return r.passed() ? 0 : 2;
    } else if (concentration->parsed()) {
      const NoisyRegionDistribution dist(parse_interval_list(target_text), eta);
      ModelClass model = conc_class == "target" ? ModelClass::singleton(IntervalClassifier(dist.target()))
                                                : parse_class_list(conc_class).front();
      TailCheckConfig cfg{dist, model};
      cfg.n = conc_n;
      cfg.k = 1;
      cfg.epsilon = conc_eps;
      cfg.reps = conc_reps;
      cfg.expectation_reps = conc_expectation_reps;
      cfg.seed = conc_seed;
      cfg.workers = conc_workers;
      const auto reports = run_proposition(prop, cfg);
      const std::string csv = tail_reports_csv(reports);
      if (!conc_out.empty()) write_text(conc_out, csv);
      std::fputs(csv.c_str(), stdout);
      for (const auto& r : reports) {
        if (!r.passed) return 2;
      }
    } else if (generate->parsed()) {
      const NoisyRegionDistribution dist(parse_interval_list(target_text), eta);
      write_sample_csv(generate_sample(dist, gen_n, gen_seed), gen_out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
