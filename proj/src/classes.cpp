#include "locpen/classes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "locpen/class_on_sample.hpp"

namespace locpen {

namespace {

// C(n, j) in long double; exact while the value fits the 64-bit mantissa.
long double binomial(long double n, std::uint64_t j) {
  if (static_cast<long double>(j) > n) return 0.0L;
  long double c = 1.0L;
  for (std::uint64_t i = 1; i <= j; ++i) c = c * (n - static_cast<long double>(j) + static_cast<long double>(i)) / static_cast<long double>(i);
  return c;
}

}  // namespace

ModelClass ModelClass::thresholds() { return ModelClass(Family::kThresholds, 1); }

ModelClass ModelClass::intervals(int k) {
  if (k < 1) throw std::invalid_argument("interval budget must be at least 1");
  return ModelClass(Family::kIntervals, k);
}

ModelClass ModelClass::stumps(int dim) {
  if (dim < 1) throw std::invalid_argument("stump dimension must be at least 1");
  return ModelClass(Family::kStumps, dim);
}

ModelClass ModelClass::singleton(IntervalClassifier f) {
  ModelClass c(Family::kSingleton, 1);
  c.fixed_ = std::move(f);
  return c;
}

int ModelClass::vc_dim() const noexcept {
  switch (family_) {
    case Family::kThresholds:
      return 1;
    case Family::kIntervals:
      return 2 * budget_;
    case Family::kStumps: {
      // At most 2 + 2d(m - 1) dichotomies on m >= 1 points.
      int m = 1;
      while (std::ldexp(1.0, m + 1) <= 2.0 + 2.0 * budget_ * m) ++m;
      return m;
    }
    case Family::kSingleton:
      return 1;
  }
  return 1;
}

std::string ModelClass::name() const {
  switch (family_) {
    case Family::kThresholds:
      return "thresholds";
    case Family::kIntervals:
      return "intervals:" + std::to_string(budget_);
    case Family::kStumps:
      return "stumps:" + std::to_string(budget_);
    case Family::kSingleton:
      return "singleton";
  }
  return "?";
}

bool predict(const Hypothesis& f, std::span<const double> point) {
  if (const auto* ic = std::get_if<IntervalClassifier>(&f)) return ic->predict(point[0]);
  const auto& st = std::get<StumpRule>(f);
  const double v = point[st.coord];
  return st.upward ? v >= st.threshold : v < st.threshold;
}

std::string describe(const Hypothesis& f) {
  char buf[96];
  if (const auto* ic = std::get_if<IntervalClassifier>(&f)) {
    if (ic->regions().empty()) return "{}";
    std::string out;
    for (const auto& r : ic->regions()) {
      if (!out.empty()) out += " u ";
      std::snprintf(buf, sizeof buf, "[%.6g, %.6g]", r.lo, r.hi);
      out += buf;
    }
    return out;
  }
  const auto& st = std::get<StumpRule>(f);
  std::snprintf(buf, sizeof buf, "x%zu %s %.6g", st.coord + 1, st.upward ? ">=" : "<", st.threshold);
  return buf;
}

std::size_t error_count(const Hypothesis& f, const LabeledSample& s) {
  std::size_t errors = 0;
  for (std::size_t i = 0; i < s.n(); ++i) errors += predict(f, s.point(i)) != (s.label(i) == 1);
  return errors;
}

double empirical_loss(const Hypothesis& f, const LabeledSample& s) {
  return static_cast<double>(error_count(f, s)) / static_cast<double>(s.n());
}

BitVector error_vector(const Hypothesis& f, const LabeledSample& s) {
  BitVector e(s.n());
  for (std::size_t i = 0; i < s.n(); ++i) e.set(i, predict(f, s.point(i)) != (s.label(i) == 1));
  return e;
}

ErrorVectorSet::ErrorVectorSet(std::size_t n, std::vector<BitVector> vectors) : n_(n), vectors_(std::move(vectors)) {
  for (const auto& v : vectors_) {
    if (v.size() != n_) throw std::invalid_argument("error vector length differs from sample size");
  }
  std::sort(vectors_.begin(), vectors_.end());
  vectors_.erase(std::unique(vectors_.begin(), vectors_.end()), vectors_.end());
}

bool ErrorVectorSet::contains(const BitVector& e) const {
  return std::binary_search(vectors_.begin(), vectors_.end(), e);
}

bool ErrorVectorSet::is_subset_of(const ErrorVectorSet& other) const {
  return n_ == other.n_ && std::includes(other.vectors_.begin(), other.vectors_.end(), vectors_.begin(), vectors_.end());
}

ErrorVectorSet enumerate_error_vectors(const ModelClass& c, const LabeledSample& s) {
  return ClassOnSample(c, s).error_vectors();
}

ErmResult erm(const ModelClass& c, const LabeledSample& s) { return ClassOnSample(c, s).erm(); }

bool has_exact_worst_case_shatter(const ModelClass& c) noexcept { return c.family() != Family::kStumps; }

double worst_case_log_shatter(const ModelClass& c, std::uint64_t m, ShatterBound bound) {
  if (m == 0) throw std::invalid_argument("worst-case shatter needs m >= 1");
  const auto md = static_cast<long double>(m);
  const double vc_cap = c.vc_dim() * std::log(static_cast<double>(m) + 1.0);
  if (c.family() == Family::kSingleton) return 0.0;
  if (bound == ShatterBound::kVcCap) return vc_cap;
  long double total = 0.0L;
  switch (c.family()) {
    case Family::kThresholds:
      total = md + 1.0L;
      break;
    case Family::kIntervals:
      for (std::uint64_t r = 0; r <= static_cast<std::uint64_t>(c.budget()) && 2 * r <= m + 1; ++r) {
        total += binomial(md + 1.0L, 2 * r);
      }
      break;
    default:
      for (std::uint64_t i = 0; i <= static_cast<std::uint64_t>(c.vc_dim()) && i <= m; ++i) total += binomial(md, i);
      break;
  }
  if (!std::isfinite(static_cast<double>(std::log(total)))) return vc_cap;
  return static_cast<double>(std::log(total));
}

}  // namespace locpen
