#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "locpen/bit_vector.hpp"
#include "locpen/data.hpp"

namespace locpen {

enum class Family {
  kThresholds,  // 1{x >= t}
  kIntervals,   // unions of at most k closed intervals
  kStumps,      // 1{x_j >= t} or 1{x_j < t} on one coordinate of R^d
  kSingleton,   // one fixed interval classifier; a verification device
};

/// A hypothesis family F_k together with its structural metadata.
class ModelClass {
 public:
  static ModelClass thresholds();
  static ModelClass intervals(int k);
  static ModelClass stumps(int dim);
  static ModelClass singleton(IntervalClassifier f);

  Family family() const noexcept { return family_; }
  /// Interval budget for kIntervals, dimension for kStumps, otherwise 1.
  int budget() const noexcept { return budget_; }
  /// VC dimension: exact for thresholds (1) and interval unions (2k). For
  /// stumps it is the bound max{m : 2^m <= 2 + 2d(m - 1)} obtained from the
  /// dichotomy count on m points; for singletons it is reported as 1.
  int vc_dim() const noexcept;
  /// Whether hypotheses are interval unions on the real line.
  bool is_one_dimensional() const noexcept { return family_ != Family::kStumps; }
  const IntervalClassifier& fixed() const noexcept { return fixed_; }
  std::string name() const;

  bool operator==(const ModelClass&) const = default;

 private:
  ModelClass(Family family, int budget) : family_(family), budget_(budget) {}

  Family family_;
  int budget_;
  IntervalClassifier fixed_;
};

/// Axis-aligned decision stump.
struct StumpRule {
  std::size_t coord = 0;
  double threshold = 0.0;
  bool upward = true;  // true: 1{x_coord >= threshold}; false: 1{x_coord < threshold}
  bool operator==(const StumpRule&) const = default;
};

using Hypothesis = std::variant<IntervalClassifier, StumpRule>;

bool predict(const Hypothesis& f, std::span<const double> point);
std::string describe(const Hypothesis& f);

/// Number of sample points f misclassifies.
std::size_t error_count(const Hypothesis& f, const LabeledSample& s);
/// Fraction of sample points f misclassifies.
double empirical_loss(const Hypothesis& f, const LabeledSample& s);
/// e_i = 1{f(X_i) != Y_i}.
BitVector error_vector(const Hypothesis& f, const LabeledSample& s);

/// Canonically ordered set of distinct error vectors of one length.
class ErrorVectorSet {
 public:
  ErrorVectorSet(std::size_t n, std::vector<BitVector> vectors);

  std::size_t n() const noexcept { return n_; }
  std::size_t count() const noexcept { return vectors_.size(); }
  const std::vector<BitVector>& vectors() const noexcept { return vectors_; }
  bool contains(const BitVector& e) const;
  bool is_subset_of(const ErrorVectorSet& other) const;

 private:
  std::size_t n_;
  std::vector<BitVector> vectors_;
};

struct ErmResult {
  Hypothesis classifier;
  std::size_t errors = 0;
  double empirical_loss = 0.0;
  BitVector error_vector;
};

/// Thrown when an exhaustive enumeration would exceed kEnumerationGuard.
class EnumerationInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kEnumerationGuard = 16777216.0;  // 2^24 dichotomies

ErrorVectorSet enumerate_error_vectors(const ModelClass& c, const LabeledSample& s);

/// Exact empirical risk minimizer. Ties prefer fewer intervals, then the
/// lexicographically smallest endpoint sequence (stumps: the constant-zero
/// rule, then coordinate, upward before downward, smallest threshold).
ErmResult erm(const ModelClass& c, const LabeledSample& s);

enum class ShatterBound {
  kExact,  // closed form where known, Sauer's bound otherwise
  kVcCap,  // V * ln(m + 1) for every class
};

/// Natural log of the worst-case shatter coefficient on m points:
/// ln(m + 1) for thresholds, ln sum_{r<=k} C(m+1, 2r) for interval unions,
/// ln sum_{i<=V} C(m, i) otherwise; V * ln(m + 1) if a sum overflows.
double worst_case_log_shatter(const ModelClass& c, std::uint64_t m, ShatterBound bound = ShatterBound::kExact);

/// Whether worst_case_log_shatter uses a closed form for this class.
bool has_exact_worst_case_shatter(const ModelClass& c) noexcept;

}  // namespace locpen
