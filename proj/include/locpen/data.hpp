#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace locpen {

/// Closed interval [lo, hi]. hi may be +infinity (threshold rules).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

/// Checks that intervals are non-empty (lo <= hi), sorted and pairwise disjoint.
void validate_regions(std::span<const Interval> regions);

/// Lebesgue measure of a region union intersected with [0, 1].
double unit_measure(std::span<const Interval> regions);

/// Lebesgue measure of the symmetric difference of two region unions, both
/// restricted to [0, 1].
double symmetric_difference_measure(std::span<const Interval> a, std::span<const Interval> b);

/// n points in R^d with binary labels. Points are stored row-major.
class LabeledSample {
 public:
  LabeledSample(std::vector<double> coordinates, std::size_t dim, std::vector<std::uint8_t> labels);
  /// Convenience constructor for one-dimensional samples.
  LabeledSample(std::vector<double> xs, std::vector<std::uint8_t> labels);

  std::size_t n() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  double x(std::size_t i, std::size_t coord = 0) const noexcept { return coords_[i * dim_ + coord]; }
  std::span<const double> point(std::size_t i) const noexcept { return {coords_.data() + i * dim_, dim_}; }
  std::uint8_t label(std::size_t i) const noexcept { return labels_[i]; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  std::span<const double> coordinates() const noexcept { return coords_; }

  /// Sample formed by this sample followed by `other`.
  LabeledSample concat(const LabeledSample& other) const;

  bool operator==(const LabeledSample&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<std::uint8_t> labels_;
};

/// Uniform marginal on [0, 1]; Y = 1{X in target} flipped with probability eta.
class NoisyRegionDistribution {
 public:
  NoisyRegionDistribution(std::vector<Interval> target, double eta);

  const std::vector<Interval>& target() const noexcept { return target_; }
  double eta() const noexcept { return eta_; }
  bool in_target(double x) const noexcept;

 private:
  std::vector<Interval> target_;
  double eta_;
};

/// Predicts 1 inside a disjoint sorted union of closed intervals.
class IntervalClassifier {
 public:
  IntervalClassifier() = default;
  explicit IntervalClassifier(std::vector<Interval> regions);

  const std::vector<Interval>& regions() const noexcept { return regions_; }
  std::size_t interval_count() const noexcept { return regions_.size(); }
  bool predict(double x) const noexcept;

  bool operator==(const IntervalClassifier&) const = default;

 private:
  std::vector<Interval> regions_;
};

/// Draws n i.i.d. pairs. Point i depends only on derive_seed(seed, i), so the
/// output is identical for identical (dist, n, seed) regardless of how it is
/// generated.
LabeledSample generate_sample(const NoisyRegionDistribution& dist, std::size_t n, std::uint64_t seed);

/// Loss of the Bayes rule 1{x in target}; equals eta.
double bayes_risk(const NoisyRegionDistribution& dist);

/// L(f) = eta + (1 - 2 eta) * measure(A symmetric-difference target).
double true_loss(const IntervalClassifier& f, const NoisyRegionDistribution& dist);
double true_loss(std::span<const Interval> regions, const NoisyRegionDistribution& dist);

struct ClassOptimum {
  double loss = 0.0;
  IntervalClassifier classifier;
};

/// Best union of at most k intervals. Candidate endpoints are the target's
/// endpoints: the loss is piecewise linear in each endpoint with breakpoints
/// only there. Ties prefer fewer intervals, then lexicographically smaller
/// endpoint sequences.
ClassOptimum class_optimum(const NoisyRegionDistribution& dist, int k);
double class_optimal_loss(const NoisyRegionDistribution& dist, int k);

/// Best one-sided threshold rule 1{x >= t} (including the empty rule).
ClassOptimum threshold_optimum(const NoisyRegionDistribution& dist);

/// Dataset CSV: header x1,...,xd,y then one row per observation.
LabeledSample read_sample_csv(const std::filesystem::path& path);
void write_sample_csv(const LabeledSample& sample, const std::filesystem::path& path);
std::string format_sample_csv(const LabeledSample& sample);
LabeledSample parse_sample_csv(std::string_view text);

}  // namespace locpen
