#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "locpen/class_on_sample.hpp"
#include "locpen/classes.hpp"

namespace locpen {

// Logarithms are natural throughout the library. The log-shatter
// concentration check additionally runs a base-2 variant.

/// Multiplicative constants of the localized penalty. `paper()` holds the
/// published values; `exploratory(scale)` shrinks them so that localization
/// becomes visible at desk-scale n. Exploratory results are flagged wherever
/// they are reported.
struct ConstantProfile {
  std::string name = "paper";
  double u_scale = 16.0;     // u_hat = u_scale * (u_shatter * log S + u_log * log(nk)) / n
  double u_shatter = 4.0;
  double u_log = 9.0;
  double local_emp = 16.0;   // localized class: L_hat(f) <= local_emp * L_hat(f_k) + local_u * u_hat
  double local_u = 15.0;
  double pen_rademacher = 8.0;  // C_k = pen_rademacher * R + pen_log * log(nk)/n
  double pen_log = 20.0;        //     + pen_cross * sqrt(log(nk)/n) * sqrt(pen_cross_emp * L_hat + pen_cross_u * u_hat)
  double pen_cross = 2.0;
  double pen_cross_emp = 8.0;
  double pen_cross_u = 7.0;

  static ConstantProfile paper();
  /// The leading factor of every term multiplied by `scale` (u_scale,
  /// local_u, pen_log, pen_cross); the factors on the empirical loss and on
  /// the Rademacher average become max(1, scale * value).
  static ConstantProfile exploratory(double scale);
  bool is_paper() const noexcept { return name == "paper"; }
};

enum class RademacherMode { kExact, kMonteCarlo };
std::string to_string(RademacherMode mode);

struct RademacherEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 in exact mode
  RademacherMode mode = RademacherMode::kExact;
  std::size_t draws = 0;   // 0 in exact mode
};

/// Exact mode enumerates all 2^n sign vectors.
inline constexpr std::size_t kExactRademacherCap = 20;
inline constexpr std::size_t kDefaultMcDraws = 10000;

/// |ErrorVectorSet|; throws EnumerationInfeasible above the guard.
std::uint64_t random_shatter(const ModelClass& c, const LabeledSample& s);
/// ln |ErrorVectorSet| computed by counting, with no enumeration guard.
double log_random_shatter(const ModelClass& c, const LabeledSample& s);

/// Sign vector of one Monte Carlo draw: bit i of word i/64 set means +1.
/// Shared by every estimator so that different routes see identical signs.
void draw_signs(std::uint64_t seed, std::size_t draw, std::size_t n, std::vector<std::uint64_t>& words);

/// 2^-n sum_sigma max_e (1/n) sum_i sigma_i e_i over an explicit set.
RademacherEstimate rademacher_exact(const ErrorVectorSet& ev);
RademacherEstimate rademacher_mc(const ErrorVectorSet& ev, std::size_t draws, std::uint64_t seed);

/// Same quantities with the supremum taken by the class's dynamic program
/// over error vectors with at most max_errors ones.
RademacherEstimate rademacher_exact(const ClassOnSample& view, std::size_t max_errors);
/// rademacher_exact above switches to the explicit set for small classes;
/// this one always runs the dynamic program.
RademacherEstimate rademacher_exact_dp(const ClassOnSample& view, std::size_t max_errors);
RademacherEstimate rademacher_mc(const ClassOnSample& view, std::size_t max_errors, std::size_t draws,
                                 std::uint64_t seed);
/// Exact when n <= exact_cap, Monte Carlo otherwise.
RademacherEstimate rademacher(const ClassOnSample& view, std::size_t max_errors, std::size_t draws,
                              std::uint64_t seed, std::size_t exact_cap = kExactRademacherCap);

/// u_hat = 16 (4 log S + 9 log(nk)) / n with the profile's constants.
double u_hat(std::uint64_t shatter_count, std::size_t n, int k, const ConstantProfile& profile = ConstantProfile::paper());
double u_hat_from_log(double log_shatter, std::size_t n, int k, const ConstantProfile& profile = ConstantProfile::paper());
/// u_bar = 16 (8 E log S + 17 log(nk)) / n.
double u_bar(double expected_log_shatter, std::size_t n, int k);
/// u = 8 (2 log E S + 2 log(nk)) / n, the population counterpart of u_hat.
double u_population(double log_expected_shatter, std::size_t n, int k);
/// eps_k = 2 log(nk) / n.
double epsilon_k(std::size_t n, int k);

struct LocalizationResult {
  double u_hat = 0.0;
  double threshold = 0.0;          // local_emp * L_hat(f_k) + local_u * u_hat
  std::size_t max_errors = 0;      // largest error count with mean <= threshold
  std::optional<ErrorVectorSet> subset;  // present when built from an explicit set
  double subset_count = 0.0;
};

/// Largest integer count c with c / n <= threshold, guarded against rounding
/// of thresholds that are exact multiples of 1/n.
std::size_t max_errors_for(double threshold, std::size_t n);

/// Keeps the error vectors whose mean does not exceed the threshold.
LocalizationResult localized_subclass(const ErrorVectorSet& full, double erm_loss, double uh,
                                      const ConstantProfile& profile = ConstantProfile::paper());
/// Implicit version for a class bound to a sample; the subset is described
/// by its error-count bound and counted by dynamic programming.
LocalizationResult localized_subclass(const ClassOnSample& view, double erm_loss, double uh,
                                      const ConstantProfile& profile = ConstantProfile::paper());

}  // namespace locpen
