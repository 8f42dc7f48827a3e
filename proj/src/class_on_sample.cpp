#include "locpen/class_on_sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace locpen {

namespace {

constexpr std::int64_t kNeg = std::numeric_limits<std::int64_t>::min() / 4;
constexpr double kInf = std::numeric_limits<double>::infinity();

long double binomial(long double n, std::uint64_t j) {
  if (static_cast<long double>(j) > n) return 0.0L;
  long double c = 1.0L;
  for (std::uint64_t i = 1; i <= j; ++i) c = c * (n - static_cast<long double>(j) + static_cast<long double>(i)) / static_cast<long double>(i);
  return c;
}

// Patterns over B blocks with at most k runs of ones: sum_{r<=k} C(B+1, 2r).
long double run_pattern_count(std::size_t blocks, int k) {
  long double total = 0.0L;
  for (std::uint64_t r = 0; r <= static_cast<std::uint64_t>(k) && 2 * r <= blocks + 1; ++r) {
    total += binomial(static_cast<long double>(blocks) + 1.0L, 2 * r);
  }
  return total;
}

}  // namespace

ClassOnSample::Blocks ClassOnSample::make_blocks(const LabeledSample& s, std::size_t coord) {
  Blocks b;
  b.order.resize(s.n());
  std::iota(b.order.begin(), b.order.end(), std::size_t{0});
  std::stable_sort(b.order.begin(), b.order.end(),
                   [&](std::size_t i, std::size_t j) { return s.x(i, coord) < s.x(j, coord); });
  for (std::size_t pos = 0; pos < b.order.size(); ++pos) {
    const std::size_t i = b.order[pos];
    const double v = s.x(i, coord);
    if (b.values.empty() || v != b.values.back()) {
      b.values.push_back(v);
      b.start.push_back(pos);
      b.zeros.push_back(0);
      b.ones.push_back(0);
    }
    if (s.label(i)) {
      ++b.ones.back();
    } else {
      ++b.zeros.back();
    }
  }
  b.start.push_back(b.order.size());
  return b;
}

ClassOnSample::ClassOnSample(const ModelClass& c, const LabeledSample& s) : model_(c), sample_(s) {
  if (c.is_one_dimensional()) {
    if (s.dim() != 1) throw std::invalid_argument(c.name() + " requires one-dimensional data");
    if (c.family() == Family::kSingleton) {
      singleton_vector_ = error_vector(Hypothesis(c.fixed()), s);
      singleton_errors_ = singleton_vector_.count();
    } else {
      blocks_.push_back(make_blocks(s, 0));
    }
  } else {
    if (s.dim() != static_cast<std::size_t>(c.budget())) {
      throw std::invalid_argument(c.name() + " does not match data dimension " + std::to_string(s.dim()));
    }
    for (std::size_t j = 0; j < s.dim(); ++j) blocks_.push_back(make_blocks(s, j));
  }
}

int ClassOnSample::run_budget() const noexcept {
  return model_.family() == Family::kIntervals ? model_.budget() : 1;
}

void ClassOnSample::block_gains(const Blocks& blocks, std::span<const std::int32_t> weights,
                                std::vector<std::int64_t>& g0, std::vector<std::int64_t>& g1) const {
  const std::size_t nb = blocks.size();
  g0.assign(nb, 0);
  g1.assign(nb, 0);
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t pos = blocks.start[b]; pos < blocks.start[b + 1]; ++pos) {
      const std::size_t i = blocks.order[pos];
      // Predicting 1 errs on label-0 points, predicting 0 errs on label-1 points.
      if (sample_.label(i)) {
        g0[b] += weights[i];
      } else {
        g1[b] += weights[i];
      }
    }
  }
}

std::vector<Interval> ClassOnSample::regions_of(std::span<const Run> runs) const {
  const Blocks& b = blocks_.front();
  std::vector<Interval> regions;
  regions.reserve(runs.size());
  for (const auto& r : runs) {
    regions.push_back({b.values[r.first], suffix_only() ? kInf : b.values[r.last]});
  }
  return regions;
}

BitVector ClassOnSample::predictions_of(std::span<const Run> runs) const {
  const Blocks& b = blocks_.front();
  BitVector pred(sample_.n());
  for (const auto& r : runs) {
    for (std::size_t pos = b.start[r.first]; pos < b.start[r.last + 1]; ++pos) pred.set(b.order[pos]);
  }
  return pred;
}

// ---------------------------------------------------------------------------
// ERM

ErmResult ClassOnSample::erm() const {
  ErmResult result;
  switch (model_.family()) {
    case Family::kSingleton:
      result.classifier = model_.fixed();
      result.error_vector = singleton_vector_;
      result.errors = singleton_errors_;
      break;
    case Family::kStumps:
      return erm_stumps();
    default:
      return erm_runs();
  }
  result.empirical_loss = static_cast<double>(result.errors) / static_cast<double>(n());
  return result;
}

ErmResult ClassOnSample::erm_runs() const {
  const Blocks& b = blocks_.front();
  const std::size_t nb = b.size();
  const int k = run_budget();
  const bool suffix = suffix_only();
  const std::size_t width = static_cast<std::size_t>(k + 1) * 2;
  // best[(pos * (k+1) + r) * 2 + s]: fewest errors on blocks pos.. given r
  // runs may still be opened and the previous block predicted s.
  std::vector<std::int64_t> best((nb + 1) * width, 0);
  auto at = [&](std::size_t pos, int r, int s) -> std::int64_t& {
    return best[(pos * static_cast<std::size_t>(k + 1) + static_cast<std::size_t>(r)) * 2 + static_cast<std::size_t>(s)];
  };
  constexpr std::int64_t kBig = std::numeric_limits<std::int64_t>::max() / 4;
  for (std::size_t pos = nb; pos-- > 0;) {
    for (int r = 0; r <= k; ++r) {
      for (int s = 0; s <= 1; ++s) {
        std::int64_t v = kBig;
        if (s == 0 || !suffix) v = b.ones[pos] + at(pos + 1, r, 0);
        if (s == 1) {
          v = std::min(v, b.zeros[pos] + at(pos + 1, r, 1));
        } else if (r >= 1) {
          v = std::min(v, b.zeros[pos] + at(pos + 1, r - 1, 1));
        }
        at(pos, r, s) = v;
      }
    }
  }
  const std::int64_t optimum = at(0, k, 0);
  int budget = 0;
  while (at(0, budget, 0) != optimum) ++budget;

  // Forward reconstruction. With the run count fixed at its minimum, starting
  // a run as early as possible and closing it as early as possible yields the
  // lexicographically smallest endpoint sequence.
  std::vector<Run> runs;
  int r = budget;
  int s = 0;
  std::int64_t remaining = optimum;
  for (std::size_t pos = 0; pos < nb; ++pos) {
    const bool can_zero = s == 0 || !suffix;
    const bool zero_ok = can_zero && b.ones[pos] + at(pos + 1, r, 0) == remaining;
    const int r_if_one = s == 1 ? r : r - 1;
    const bool one_ok = r_if_one >= 0 && b.zeros[pos] + at(pos + 1, r_if_one, 1) == remaining;
    const bool choose_one = s == 0 ? one_ok : !zero_ok;
    if (choose_one) {
      if (s == 0) runs.push_back({pos, pos});
      runs.back().last = pos;
      remaining -= b.zeros[pos];
      r = r_if_one;
      s = 1;
    } else {
      remaining -= b.ones[pos];
      s = 0;
    }
  }

  ErmResult result;
  result.classifier = IntervalClassifier(regions_of(runs));
  result.error_vector = predictions_of(runs);
  for (std::size_t i = 0; i < n(); ++i) {
    result.error_vector.set(i, result.error_vector.test(i) != (sample_.label(i) == 1));
  }
  result.errors = static_cast<std::size_t>(optimum);
  result.empirical_loss = static_cast<double>(optimum) / static_cast<double>(n());
  return result;
}

ErmResult ClassOnSample::erm_stumps() const {
  std::size_t total_ones = 0;
  for (std::size_t i = 0; i < n(); ++i) total_ones += sample_.label(i);
  StumpRule best_rule{0, kInf, true};  // constant zero
  std::size_t best_errors = total_ones;
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const Blocks& b = blocks_[j];
    const std::size_t nb = b.size();
    // Upward rule at split a predicts 1 on blocks >= a.
    std::size_t errors = n() - total_ones;  // a = 0: everything predicted 1
    std::vector<std::size_t> up(nb + 1);
    for (std::size_t a = 0; a <= nb; ++a) {
      up[a] = errors;
      if (a < nb) errors = errors - static_cast<std::size_t>(b.zeros[a]) + static_cast<std::size_t>(b.ones[a]);
    }
    for (std::size_t a = 0; a < nb; ++a) {
      if (up[a] < best_errors) {
        best_errors = up[a];
        best_rule = {j, b.values[a], true};
      }
    }
    // Downward rule at split a predicts 1 on blocks < a; it is the complement
    // of the upward rule at a.
    for (std::size_t a = 1; a <= nb; ++a) {
      const std::size_t down = n() - up[a];
      if (down < best_errors) {
        best_errors = down;
        best_rule = {j, a < nb ? b.values[a] : kInf, false};
      }
    }
  }
  ErmResult result;
  result.classifier = best_rule;
  result.error_vector = error_vector(result.classifier, sample_);
  result.errors = best_errors;
  result.empirical_loss = static_cast<double>(best_errors) / static_cast<double>(n());
  return result;
}

// ---------------------------------------------------------------------------
// Weighted suprema

std::int64_t ClassOnSample::max_gain(std::span<const std::int32_t> weights) const {
  if (weights.size() != n()) throw std::invalid_argument("weight vector length differs from sample size");
  if (model_.family() == Family::kSingleton) {
    std::int64_t g = 0;
    for (std::size_t i = 0; i < n(); ++i) {
      if (singleton_vector_.test(i)) g += weights[i];
    }
    return g;
  }
  return *max_gain(weights, n());
}

std::optional<std::int64_t> ClassOnSample::max_gain(std::span<const std::int32_t> weights,
                                                     std::size_t max_errors) const {
  if (weights.size() != n()) throw std::invalid_argument("weight vector length differs from sample size");
  std::vector<std::int64_t> g0;
  std::vector<std::int64_t> g1;

  if (model_.family() == Family::kSingleton) {
    if (singleton_errors_ > max_errors) return std::nullopt;
    return max_gain(weights);
  }

  if (model_.family() == Family::kStumps) {
    std::int64_t all_zero_gain = 0;
    std::size_t total_ones = 0;
    for (std::size_t i = 0; i < n(); ++i) {
      if (sample_.label(i)) {
        all_zero_gain += weights[i];
        ++total_ones;
      }
    }
    std::optional<std::int64_t> best;
    auto offer = [&](std::int64_t gain, std::size_t errors) {
      if (errors <= max_errors && (!best || gain > *best)) best = gain;
    };
    offer(all_zero_gain, total_ones);
    for (const Blocks& b : blocks_) {
      block_gains(b, weights, g0, g1);
      std::int64_t total_g0 = 0;
      std::int64_t total_g1 = 0;
      for (std::size_t a = 0; a < b.size(); ++a) {
        total_g0 += g0[a];
        total_g1 += g1[a];
      }
      // Walk the split a upward; prefix blocks < a predict 0 under the upward
      // rule and 1 under the downward rule.
      std::int64_t prefix_g0 = 0;
      std::int64_t prefix_g1 = 0;
      std::size_t prefix_ones = 0;
      std::size_t prefix_zeros = 0;
      const std::size_t total_zeros = n() - total_ones;
      for (std::size_t a = 0; a <= b.size(); ++a) {
        offer(prefix_g0 + (total_g1 - prefix_g1), prefix_ones + (total_zeros - prefix_zeros));
        offer(prefix_g1 + (total_g0 - prefix_g0), prefix_zeros + (total_ones - prefix_ones));
        if (a < b.size()) {
          prefix_g0 += g0[a];
          prefix_g1 += g1[a];
          prefix_ones += static_cast<std::size_t>(b.ones[a]);
          prefix_zeros += static_cast<std::size_t>(b.zeros[a]);
        }
      }
    }
    return best;
  }

  const Blocks& b = blocks_.front();
  block_gains(b, weights, g0, g1);
  const std::size_t nb = b.size();
  const int k = run_budget();
  const bool suffix = suffix_only();
  const auto kk = static_cast<std::size_t>(k + 1);

  if (max_errors >= n()) {
    // f[r * 2 + s]: best gain so far with r runs opened and current state s.
    std::vector<std::int64_t> f(kk * 2, kNeg);
    std::vector<std::int64_t> next(kk * 2, kNeg);
    f[0] = 0;
    for (std::size_t pos = 0; pos < nb; ++pos) {
      for (std::size_t r = 0; r < kk; ++r) {
        const std::int64_t from0 = f[r * 2];
        const std::int64_t from1 = f[r * 2 + 1];
        const std::int64_t stay0 = suffix ? from0 : std::max(from0, from1);
        next[r * 2] = stay0 == kNeg ? kNeg : stay0 + g0[pos];
        const std::int64_t open = r >= 1 ? f[(r - 1) * 2] : kNeg;
        const std::int64_t to1 = std::max(from1, open);
        next[r * 2 + 1] = to1 == kNeg ? kNeg : to1 + g1[pos];
      }
      f.swap(next);
    }
    return *std::max_element(f.begin(), f.end());
  }

  // Constrained version carries the error count e in [0, T] as a third index.
  const std::size_t t1 = max_errors + 1;
  std::vector<std::int64_t> f(kk * 2 * t1, kNeg);
  std::vector<std::int64_t> next(kk * 2 * t1, kNeg);
  auto idx = [t1](std::size_t r, std::size_t s, std::size_t e) { return (r * 2 + s) * t1 + e; };
  f[idx(0, 0, 0)] = 0;
  for (std::size_t pos = 0; pos < nb; ++pos) {
    std::fill(next.begin(), next.end(), kNeg);
    const auto c0 = static_cast<std::size_t>(b.ones[pos]);
    const auto c1 = static_cast<std::size_t>(b.zeros[pos]);
    for (std::size_t r = 0; r < kk; ++r) {
      const std::int64_t* in0 = &f[idx(r, 0, 0)];
      const std::int64_t* in1 = &f[idx(r, 1, 0)];
      const std::int64_t* open = r >= 1 ? &f[idx(r - 1, 0, 0)] : nullptr;
      std::int64_t* out0 = &next[idx(r, 0, 0)];
      std::int64_t* out1 = &next[idx(r, 1, 0)];
      if (c0 < t1) {
        for (std::size_t e = 0; e + c0 < t1; ++e) {
          const std::int64_t v = suffix ? in0[e] : std::max(in0[e], in1[e]);
          if (v != kNeg) out0[e + c0] = v + g0[pos];
        }
      }
      if (c1 < t1) {
        for (std::size_t e = 0; e + c1 < t1; ++e) {
          const std::int64_t v = open ? std::max(in1[e], open[e]) : in1[e];
          if (v != kNeg) out1[e + c1] = v + g1[pos];
        }
      }
    }
    f.swap(next);
  }
  const std::int64_t best = *std::max_element(f.begin(), f.end());
  if (best == kNeg) return std::nullopt;
  return best;
}

// ---------------------------------------------------------------------------
// Counting

double ClassOnSample::count() const {
  switch (model_.family()) {
    case Family::kSingleton:
      return 1.0;
    case Family::kStumps:
      return static_cast<double>(stump_patterns().size());
    case Family::kThresholds:
      return static_cast<double>(blocks_.front().size() + 1);
    case Family::kIntervals:
      break;
  }
  return static_cast<double>(run_pattern_count(blocks_.front().size(), model_.budget()));
}

double ClassOnSample::log_count() const {
  if (model_.family() == Family::kIntervals) {
    return static_cast<double>(std::log(run_pattern_count(blocks_.front().size(), model_.budget())));
  }
  return std::log(count());
}

double ClassOnSample::count(std::size_t max_errors) const {
  if (max_errors >= n()) return count();
  switch (model_.family()) {
    case Family::kSingleton:
      return singleton_errors_ <= max_errors ? 1.0 : 0.0;
    case Family::kStumps: {
      double c = 0.0;
      for (const auto& p : stump_patterns()) c += p.errors <= max_errors ? 1.0 : 0.0;
      return c;
    }
    default:
      break;
  }
  const Blocks& b = blocks_.front();
  const auto kk = static_cast<std::size_t>(run_budget() + 1);
  const bool suffix = suffix_only();
  const std::size_t t1 = max_errors + 1;
  std::vector<double> f(kk * 2 * t1, 0.0);
  std::vector<double> next(kk * 2 * t1, 0.0);
  auto idx = [t1](std::size_t r, std::size_t s, std::size_t e) { return (r * 2 + s) * t1 + e; };
  f[idx(0, 0, 0)] = 1.0;
  for (std::size_t pos = 0; pos < b.size(); ++pos) {
    std::fill(next.begin(), next.end(), 0.0);
    const auto c0 = static_cast<std::size_t>(b.ones[pos]);
    const auto c1 = static_cast<std::size_t>(b.zeros[pos]);
    for (std::size_t r = 0; r < kk; ++r) {
      for (std::size_t e = 0; e < t1; ++e) {
        if (e + c0 < t1) next[idx(r, 0, e + c0)] += f[idx(r, 0, e)] + (suffix ? 0.0 : f[idx(r, 1, e)]);
        if (e + c1 < t1) next[idx(r, 1, e + c1)] += f[idx(r, 1, e)] + (r >= 1 ? f[idx(r - 1, 0, e)] : 0.0);
      }
    }
    f.swap(next);
  }
  return std::accumulate(f.begin(), f.end(), 0.0);
}

double ClassOnSample::log_count(std::size_t max_errors) const {
  if (max_errors >= n()) return log_count();
  return std::log(count(max_errors));
}

double ClassOnSample::predicted_count() const {
  switch (model_.family()) {
    case Family::kSingleton:
      return 1.0;
    case Family::kStumps: {
      double total = 2.0;
      for (const auto& b : blocks_) total += 2.0 * static_cast<double>(b.size());
      return total;
    }
    default:
      return count();
  }
}

// ---------------------------------------------------------------------------
// Enumeration

void ClassOnSample::for_each_run_pattern(const std::function<void(std::span<const Run>, std::size_t)>& visit) const {
  const Blocks& b = blocks_.front();
  const std::size_t nb = b.size();
  std::size_t base_errors = 0;  // the all-zero pattern errs on every label-1 point
  for (std::size_t i = 0; i < n(); ++i) base_errors += sample_.label(i);
  // delta[a..b] = sum over blocks of (zeros - ones): error change when turned on.
  std::vector<std::int64_t> prefix(nb + 1, 0);
  for (std::size_t pos = 0; pos < nb; ++pos) prefix[pos + 1] = prefix[pos] + b.zeros[pos] - b.ones[pos];

  std::vector<Run> runs;
  if (suffix_only()) {
    visit(runs, base_errors);
    for (std::size_t a = 0; a < nb; ++a) {
      runs.assign(1, Run{a, nb - 1});
      visit(runs, static_cast<std::size_t>(static_cast<std::int64_t>(base_errors) + prefix[nb] - prefix[a]));
    }
    return;
  }
  const int k = run_budget();
  std::function<void(std::size_t, int, std::int64_t)> extend = [&](std::size_t from, int left, std::int64_t errors) {
    visit(runs, static_cast<std::size_t>(errors));
    if (left == 0) return;
    for (std::size_t a = from; a < nb; ++a) {
      for (std::size_t last = a; last < nb; ++last) {
        runs.push_back({a, last});
        extend(last + 2, left - 1, errors + prefix[last + 1] - prefix[a]);
        runs.pop_back();
      }
    }
  };
  extend(0, k, static_cast<std::int64_t>(base_errors));
}

void ClassOnSample::for_each_representative(
    const std::function<void(std::span<const Interval>, std::size_t)>& visit) const {
  if (!model_.is_one_dimensional()) throw std::invalid_argument("representatives exist for one-dimensional classes only");
  if (model_.family() == Family::kSingleton) {
    visit(model_.fixed().regions(), singleton_errors_);
    return;
  }
  const Blocks& b = blocks_.front();
  std::vector<Interval> regions;
  for_each_run_pattern([&](std::span<const Run> runs, std::size_t errors) {
    regions.clear();
    for (const auto& r : runs) regions.push_back({b.values[r.first], suffix_only() ? kInf : b.values[r.last]});
    visit(regions, errors);
  });
}

std::vector<ClassOnSample::Enumerated> ClassOnSample::stump_patterns() const {
  std::vector<Enumerated> out;
  auto add = [&](const StumpRule& rule) {
    Enumerated item;
    item.representative = rule;
    item.error_vector = error_vector(item.representative, sample_);
    item.errors = item.error_vector.count();
    out.push_back(std::move(item));
  };
  add({0, kInf, true});
  add({0, kInf, false});
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const Blocks& b = blocks_[j];
    for (std::size_t a = 1; a < b.size(); ++a) {
      add({j, b.values[a], true});
      add({j, b.values[a], false});
    }
  }
  // Keep the first rule per error vector in the order above.
  std::stable_sort(out.begin(), out.end(),
                   [](const Enumerated& x, const Enumerated& y) { return x.error_vector < y.error_vector; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Enumerated& x, const Enumerated& y) { return x.error_vector == y.error_vector; }),
            out.end());
  return out;
}

std::vector<ClassOnSample::Enumerated> ClassOnSample::enumerate() const {
  if (predicted_count() > kEnumerationGuard) {
    throw EnumerationInfeasible("enumeration infeasible: " + model_.name() + " induces more than 2^24 dichotomies on " +
                                std::to_string(n()) + " points");
  }
  if (model_.family() == Family::kStumps) return stump_patterns();
  std::vector<Enumerated> out;
  if (model_.family() == Family::kSingleton) {
    out.push_back({singleton_vector_, singleton_errors_, model_.fixed()});
    return out;
  }
  for_each_run_pattern([&](std::span<const Run> runs, std::size_t errors) {
    BitVector e = predictions_of(runs);
    for (std::size_t i = 0; i < n(); ++i) e.set(i, e.test(i) != (sample_.label(i) == 1));
    out.push_back({std::move(e), errors, IntervalClassifier(regions_of(runs))});
  });
  return out;
}

ErrorVectorSet ClassOnSample::error_vectors() const {
  auto items = enumerate();
  std::vector<BitVector> vectors;
  vectors.reserve(items.size());
  for (auto& item : items) vectors.push_back(std::move(item.error_vector));
  return ErrorVectorSet(n(), std::move(vectors));
}

}  // namespace locpen
