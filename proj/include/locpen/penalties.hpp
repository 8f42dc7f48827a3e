#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "locpen/class_on_sample.hpp"
#include "locpen/classes.hpp"
#include "locpen/complexity.hpp"

namespace locpen {

enum class PenaltyKind { kVapnik, kGlobalRademacher, kSimple, kLocalized };

/// "vapnik", "global", "simple", "localized".
std::string to_string(PenaltyKind kind);
/// Accepts the names above plus "global_rademacher".
PenaltyKind parse_penalty_kind(std::string_view text);

struct PenaltyOptions {
  double gamma = 1.0;   // Vapnik multiplier
  double gamma1 = 2.0;  // global Rademacher: gamma1 * R + gamma2 * sqrt(log k / n)
  double gamma2 = 1.0;
  std::size_t mc_draws = kDefaultMcDraws;
  std::uint64_t seed = 0;
  ConstantProfile profile = ConstantProfile::paper();
  std::size_t exact_cap = kExactRademacherCap;
};

struct PenaltyTerm {
  std::string name;
  double value = 0.0;
};

struct PenaltyBreakdown {
  PenaltyKind kind = PenaltyKind::kVapnik;
  double value = 0.0;      // min(raw_value, 1)
  double raw_value = 0.0;
  std::vector<PenaltyTerm> terms;
  std::vector<std::pair<std::string, std::string>> labels;  // e.g. rademacher_mode, shatter_bound
  int k = 1;
  std::size_t n = 0;

  bool has_term(std::string_view name) const;
  /// Throws std::out_of_range for unknown names.
  double term(std::string_view name) const;
  std::string label(std::string_view name) const;
};

/// Seed of the sign vectors used for class k. Global and localized penalties
/// of one class share it, so the localized average never exceeds the global
/// one even in Monte Carlo mode.
std::uint64_t rademacher_seed(const PenaltyOptions& options, int k);

/// gamma * sqrt((log S_k(2n) + log k) / n). The exact worst-case shatter
/// count is used when the family has one, the VC cap otherwise.
PenaltyBreakdown penalty_vapnik(const ModelClass& c, std::size_t n, int k, double gamma);
PenaltyBreakdown penalty_vapnik(const ModelClass& c, std::size_t n, int k, double gamma, ShatterBound bound);

PenaltyBreakdown penalty_global_rademacher(const ModelClass& c, const LabeledSample& s, int k,
                                           const PenaltyOptions& options = {});
/// 2 sqrt(2 L_hat + 8 (log S_k(2n) + 2 log(nk)) / n) * sqrt(log S_k(2n) / n + 2 log(nk) / n).
PenaltyBreakdown penalty_simple(const ModelClass& c, const LabeledSample& s, int k, const PenaltyOptions& options = {});
PenaltyBreakdown penalty_simple(std::size_t n, int k, double erm_loss, double log_shatter_2n);
PenaltyBreakdown penalty_localized(const ModelClass& c, const LabeledSample& s, int k,
                                   const PenaltyOptions& options = {});

/// Final step of the localized penalty from its intermediate quantities:
/// pen_rademacher * R + pen_log * log(nk)/n + pen_cross * sqrt(log(nk)/n) * sqrt(pen_cross_emp * L_hat + pen_cross_u * u_hat).
PenaltyBreakdown assemble_localized(double rademacher_value, std::size_t n, int k, double erm_loss, double uh,
                                    const ConstantProfile& profile = ConstantProfile::paper());

/// Rademacher average of a whole class on one sample, kept so that several
/// penalties of the same class reuse one computation.
struct RademacherCache {
  std::optional<RademacherEstimate> full;
};

/// Full-class average with the signs of class k; fills the cache if given.
RademacherEstimate full_class_rademacher(const ClassOnSample& view, int k, const PenaltyOptions& options,
                                         RademacherCache* cache = nullptr);

/// Penalty of class k for a class already bound to the sample and its ERM.
PenaltyBreakdown compute_penalty(PenaltyKind kind, const ClassOnSample& view, const ErmResult& erm, int k,
                                 const PenaltyOptions& options, RademacherCache* cache = nullptr);
PenaltyBreakdown compute_penalty(PenaltyKind kind, const ModelClass& c, const LabeledSample& s, int k,
                                 const PenaltyOptions& options);

struct SelectionRow {
  int k = 1;
  std::string class_name;
  ErmResult erm;
  PenaltyBreakdown penalty;
  double score = 0.0;  // empirical loss of the ERM plus the clamped penalty
};

struct SelectionResult {
  int chosen_k = 1;  // 1-based index into the hierarchy
  Hypothesis chosen_classifier;
  std::vector<SelectionRow> table;
};

/// Raised when a penalty cannot be computed; carries the rows that succeeded.
class SelectionError : public std::runtime_error {
 public:
  SelectionError(const std::string& what, std::vector<SelectionRow> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<SelectionRow>& partial() const noexcept { return partial_; }

 private:
  std::vector<SelectionRow> partial_;
};

/// Penalized ERM over the hierarchy; ties go to the smallest k.
SelectionResult select_model(const std::vector<ModelClass>& classes, const LabeledSample& s, PenaltyKind kind,
                             const PenaltyOptions& options = {}, unsigned workers = 1);
/// Argmin over precomputed rows, ties to the smallest k.
int argmin_score(const std::vector<SelectionRow>& rows);

}  // namespace locpen
