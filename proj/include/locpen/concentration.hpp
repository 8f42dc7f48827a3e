#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "locpen/classes.hpp"
#include "locpen/data.hpp"

namespace locpen {

/// Outcome of one empirical check of a tail or expectation inequality.
///
/// Tail checks: `value` is the observed violation frequency and `bound` the
/// right-hand side probability. Expectation checks: `value` is the Monte
/// Carlo estimate of the left-hand side and `bound` that of the right-hand
/// side. A check passes when value <= bound + 3 * combined_se().
struct TailCheckReport {
  enum class Kind { kTail, kExpectation, kChain };

  std::string proposition;  // suite id: "3.2", "3.3", "4.4", "4.5", "4.6"
  std::string statistic;    // which side or variant, e.g. "L-2Lhat", "upper", "log2:lower"
  Kind kind = Kind::kTail;
  std::string class_name;
  std::size_t n = 0;
  int k = 1;
  std::size_t reps = 0;
  double epsilon = 0.0;
  std::size_t violations = 0;  // tail checks only
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // bound - value
  double value_se = 0.0;
  double bound_se = 0.0;
  bool passed = false;
  std::string note;

  double combined_se() const;
};

std::string to_string(TailCheckReport::Kind kind);

/// Fills margin and passed. Tail checks use the binomial standard error at
/// the null frequency min(bound, 1), so zero observed violations still leave
/// room for Monte Carlo noise in the bound itself.
void finalize(TailCheckReport& r);

struct TailCheckConfig {
  NoisyRegionDistribution dist;
  ModelClass model;
  std::size_t n = 100;
  int k = 1;                       // class index entering log(nk)
  std::optional<double> epsilon;   // each check documents its default
  std::size_t reps = 10000;
  std::size_t expectation_reps = 0;  // 0 means reps
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

// Population quantities of interval classes under a NoisyRegionDistribution.

/// inf of L over the class (L_k^*).
double class_best_loss(const NoisyRegionDistribution& dist, const ModelClass& c);
/// sup of L over the class.
double class_worst_loss(const NoisyRegionDistribution& dist, const ModelClass& c);
/// sup of sqrt(L (1 - L)) over losses in [lo, hi].
double sigma_over_range(double lo, double hi);

struct ShatterMoments {
  std::size_t m = 0;
  std::size_t reps = 0;
  double mean_count = 0.0;     // E S(X_1^m)
  double se_count = 0.0;
  double mean_log = 0.0;       // E ln S(X_1^m)
  double se_log = 0.0;
  double log_mean_count = 0.0;  // ln E S(X_1^m)
};

/// Monte Carlo moments of the random shatter coefficient on m points.
ShatterMoments estimate_shatter(const NoisyRegionDistribution& dist, const ModelClass& c, std::size_t m,
                                std::size_t reps, std::uint64_t seed, unsigned workers = 1);

/// P{sup L - 2 L_hat >= 2 eps} and P{sup L_hat - 2 L >= 2 eps}, each against
/// 4 E S(X_1^{2n}) exp(-n eps / 4). Default eps: 4 (ln E S(X_1^{2n}) + 2 ln n) / n.
std::vector<TailCheckReport> check_relative_vc(const TailCheckConfig& cfg);

/// Both tails of ln S(X_1^n) around its mean against e^{-eps}, for natural and
/// base-2 logarithms, plus E log S <= log E S <= E log S / ln 2. Default eps: 2.
std::vector<TailCheckReport> check_shatter_concentration(const TailCheckConfig& cfg);

/// P{R >= 2 E R + eps} <= e^{-6 n eps / 5} and P{R <= E R / 2 - eps} <= e^{-n eps}
/// with exact Rademacher averages. Default eps: 0.05.
std::vector<TailCheckReport> check_rademacher_concentration(const TailCheckConfig& cfg);

/// P{Z >= 2 E Z + Sigma sqrt(2 eps) + 4 eps / 3} <= e^{-n eps}, where Z is
/// sup |L_hat - L| over F_k^* = {L <= 4 L_k^* + 3 u_k}. Default eps: 0.05.
TailCheckReport check_talagrand(const TailCheckConfig& cfg);

/// Expectation inequalities: E sup_{F_k^*} |L_hat - L| <= 2 E R_{F_k^*};
/// E R_{F_k} <= 2 E sup_{F_k} |L_hat - L| + sup L / sqrt(n); and the
/// Massart bound on E sup_{F_k} |L_hat - L|. Exact Rademacher averages.
std::vector<TailCheckReport> check_symmetrization_and_massart(const TailCheckConfig& cfg);

/// Dispatch by identifier: "3.2", "3.3", "4.4", "4.5", "4.6" (the last runs
/// the expectation suite).
std::vector<TailCheckReport> run_proposition(std::string_view id, const TailCheckConfig& cfg);

std::string tail_reports_csv(const std::vector<TailCheckReport>& reports);

}  // namespace locpen
