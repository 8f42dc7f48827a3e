#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "locpen/classes.hpp"

namespace locpen {

/// A model class bound to one sample: the sorted block structure plus the
/// dynamic programs that answer every per-sample question the library asks
/// (ERM, weighted suprema, dichotomy counts, enumeration).
///
/// Tied coordinate values form a block; every hypothesis assigns a single
/// prediction to a block, so interval-type patterns are binary strings over
/// blocks with at most k maximal runs of ones.
class ClassOnSample {
 public:
  ClassOnSample(const ModelClass& c, const LabeledSample& s);

  const ModelClass& model() const noexcept { return model_; }
  const LabeledSample& sample() const noexcept { return sample_; }
  std::size_t n() const noexcept { return sample_.n(); }

  ErmResult erm() const;

  /// max over error vectors e of the class with |e| <= max_errors of
  /// sum_i weights[i] * e_i. Empty when no error vector qualifies.
  std::optional<std::int64_t> max_gain(std::span<const std::int32_t> weights, std::size_t max_errors) const;
  /// Same without the cardinality constraint.
  std::int64_t max_gain(std::span<const std::int32_t> weights) const;

  /// Number of distinct error vectors (optionally with at most max_errors
  /// ones), as a floating-point value and as its natural log.
  double count() const;
  double log_count() const;
  double count(std::size_t max_errors) const;
  double log_count(std::size_t max_errors) const;

  /// Upper bound on count() available without enumerating; used by the
  /// enumeration guard.
  double predicted_count() const;

  /// Calls visit(regions, errors) once per distinct error vector with the
  /// canonical representative: each run of ones becomes the closed interval
  /// from its first to its last point (threshold runs extend to +infinity).
  /// One-dimensional families only; no guard is applied.
  void for_each_representative(const std::function<void(std::span<const Interval>, std::size_t)>& visit) const;

  struct Enumerated {
    BitVector error_vector;
    std::size_t errors = 0;
    Hypothesis representative;
  };
  /// All distinct error vectors with a representative each. Throws
  /// EnumerationInfeasible when predicted_count() exceeds the guard.
  std::vector<Enumerated> enumerate() const;
  ErrorVectorSet error_vectors() const;

 private:
  struct Blocks {
    std::vector<double> values;            // distinct sorted coordinate values
    std::vector<std::size_t> start;        // offsets into order, size B + 1
    std::vector<std::size_t> order;        // point indices sorted by coordinate
    std::vector<std::int32_t> zeros;       // label-0 points per block (errors if predicting 1)
    std::vector<std::int32_t> ones;        // label-1 points per block (errors if predicting 0)
    std::size_t size() const noexcept { return values.size(); }
  };
  struct Run {
    std::size_t first;
    std::size_t last;
  };

  static Blocks make_blocks(const LabeledSample& s, std::size_t coord);
  int run_budget() const noexcept;
  bool suffix_only() const noexcept { return model_.family() == Family::kThresholds; }
  void block_gains(const Blocks& blocks, std::span<const std::int32_t> weights, std::vector<std::int64_t>& g0,
                   std::vector<std::int64_t>& g1) const;
  std::vector<Interval> regions_of(std::span<const Run> runs) const;
  BitVector predictions_of(std::span<const Run> runs) const;
  void for_each_run_pattern(const std::function<void(std::span<const Run>, std::size_t)>& visit) const;
  ErmResult erm_runs() const;
  ErmResult erm_stumps() const;
  std::vector<Enumerated> stump_patterns() const;

  ModelClass model_;
  LabeledSample sample_;
  std::vector<Blocks> blocks_;  // one per coordinate used by the family
  std::size_t singleton_errors_ = 0;
  BitVector singleton_vector_;
};

}  // namespace locpen
