#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "locpen/classes.hpp"
#include "locpen/complexity.hpp"
#include "locpen/concentration.hpp"
#include "locpen/data.hpp"
#include "locpen/penalties.hpp"

namespace locpen {

struct ExperimentConfig {
  NoisyRegionDistribution dist;
  std::vector<ModelClass> hierarchy;
  std::size_t n = 500;
  std::size_t reps = 100;
  std::vector<PenaltyKind> kinds{PenaltyKind::kLocalized};
  std::uint64_t seed = 1;
  ConstantProfile profile = ConstantProfile::paper();
  std::size_t mc_draws = 1000;
  unsigned workers = 1;
  double gamma = 1.0;
  double gamma1 = 2.0;
  double gamma2 = 1.0;
  std::size_t shatter_reps = 200;  // samples behind E log S_k(X_1^n) estimates

  PenaltyOptions penalty_options(std::size_t rep) const;
};

/// Interval hierarchy intervals:1..max_k.
std::vector<ModelClass> interval_hierarchy(int max_k);

struct ClassSummary {
  int k = 1;
  std::string class_name;
  double class_loss = 0.0;  // L_k^*
  double mean_emp_loss = 0.0;
  double mean_penalty_raw = 0.0;
  double mean_penalty = 0.0;
  double se_penalty = 0.0;
  double mean_u_hat = 0.0;         // NaN unless localized
  double mean_subset_count = 0.0;  // NaN unless localized
  double selection_freq = 0.0;
  double mean_true_loss = 0.0;  // E L(f_hat_k)
  double se_true_loss = 0.0;
  double oracle_term = 0.0;     // L_k^* - L^* + mean penalty + constant / n^2
  std::size_t lemma_violations = 0;  // replicates with C_k <= (L - L_hat)(f_hat_k)
  double population_term = 0.0;      // NaN when not available
};

struct PenaltySummary {
  PenaltyKind kind = PenaltyKind::kLocalized;
  std::string label;  // kind name, suffixed with the profile when it is not the published one
  bool theorem_applies = false;  // simple, or localized with the published constants
  double mean_excess = 0.0;
  double se_excess = 0.0;
  double oracle_constant = 0.0;  // 16 (simple) or 22 per n^2
  double oracle_bound = 0.0;     // inf_k (L_k^* - L^* + mean C_k) + constant / n^2
  double oracle_slack = 0.0;     // 3 combined standard errors
  bool expectation_ok = false;
  std::size_t prob_violations = 0;
  double prob_level = 0.0;  // 4 gamma / n^2
  bool prob_vacuous = false;
  bool prob_ok = false;
  double population_bound = 0.0;  // NaN when not available
  bool population_ok = true;
  double closed_form_bound = 0.0;  // simple penalty's distribution-free bound, NaN otherwise
  bool closed_form_ok = true;
  std::vector<ClassSummary> per_k;
};

struct ExperimentReport {
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  double bayes_risk = 0.0;
  std::string profile;
  bool se_defined = true;  // false when reps == 1
  std::vector<PenaltySummary> penalties;
};

/// Draws cfg.reps samples, runs penalized selection for every penalty kind and
/// aggregates excess risks and bound checks. Results do not depend on
/// cfg.workers.
ExperimentReport run_oracle_experiment(const ExperimentConfig& cfg);

struct LemmaCheckResult {
  PenaltyKind kind = PenaltyKind::kLocalized;
  double gamma = 0.0;
  std::vector<TailCheckReport> estimation;  // per k: P{C_k <= (L - L_hat)(f_hat_k)}
  std::vector<TailCheckReport> optimal;     // per k: P{C_k <= (L_hat - L)(f_k^*)}
  // Localized penalty only: per replicate and class, the localized set
  // contains the ERM vector, is no larger than the full set, and its
  // Rademacher average does not exceed that of the full class.
  std::size_t structure_checks = 0;
  std::size_t structure_failures = 0;
  std::size_t structure_identical = 0;  // cases where the localized set is the whole class
  std::string first_structure_failure;
  bool passed() const;
};

LemmaCheckResult run_lemma_check(const ExperimentConfig& cfg, PenaltyKind kind, double gamma);

enum class ReportFormat { kCsv, kSvg };

std::string report_csv(const ExperimentReport& report);
std::string report_svg(const ExperimentReport& report);
std::string report_summary(const ExperimentReport& report);
void emit_report(const ExperimentReport& report, const std::filesystem::path& path, ReportFormat format);

}  // namespace locpen
