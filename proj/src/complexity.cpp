#include "locpen/complexity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "locpen/rng.hpp"

namespace locpen {

namespace {

RademacherEstimate summarize(const std::vector<double>& per_draw, RademacherMode mode) {
  RademacherEstimate est;
  est.mode = mode;
  est.draws = per_draw.size();
  double sum = 0.0;
  for (double v : per_draw) sum += v;
  est.value = sum / static_cast<double>(per_draw.size());
  if (per_draw.size() > 1) {
    double ss = 0.0;
    for (double v : per_draw) ss += (v - est.value) * (v - est.value);
    est.std_error = std::sqrt(ss / static_cast<double>(per_draw.size() - 1)) / std::sqrt(static_cast<double>(per_draw.size()));
  }
  return est;
}

void check_draws(std::size_t draws) {
  if (draws == 0) throw std::invalid_argument("Monte Carlo Rademacher estimate needs at least one draw");
}

void check_exact_cap(std::size_t n) {
  if (n > kExactRademacherCap) {
    throw std::invalid_argument("exact Rademacher average limited to n <= " + std::to_string(kExactRademacherCap) +
                                " (got " + std::to_string(n) + ")");
  }
}

}  // namespace

ConstantProfile ConstantProfile::paper() { return ConstantProfile{}; }

ConstantProfile ConstantProfile::exploratory(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("exploratory constant scale must be positive");
  ConstantProfile p;
  p.name = "exploratory";
  p.u_scale *= scale;
  p.local_emp = std::max(1.0, p.local_emp * scale);
  p.local_u *= scale;
  p.pen_rademacher = std::max(1.0, p.pen_rademacher * scale);
  p.pen_log *= scale;
  p.pen_cross *= scale;
  return p;
}

std::string to_string(RademacherMode mode) { return mode == RademacherMode::kExact ? "exact" : "monte_carlo"; }

std::uint64_t random_shatter(const ModelClass& c, const LabeledSample& s) {
  const ClassOnSample view(c, s);
  if (view.predicted_count() > kEnumerationGuard) {
    throw EnumerationInfeasible("enumeration infeasible: " + c.name() + " on " + std::to_string(s.n()) + " points");
  }
  return static_cast<std::uint64_t>(std::llround(view.count()));
}

double log_random_shatter(const ModelClass& c, const LabeledSample& s) { return ClassOnSample(c, s).log_count(); }

void draw_signs(std::uint64_t seed, std::size_t draw, std::size_t n, std::vector<std::uint64_t>& words) {
  const std::size_t nw = (n + 63) / 64;
  words.resize(nw);
  const std::uint64_t base = derive_seed(seed, draw);
  for (std::size_t w = 0; w < nw; ++w) words[w] = derive_seed(base, w);
  if (n % 64 != 0) words[nw - 1] &= (1ULL << (n % 64)) - 1;
}

RademacherEstimate rademacher_exact(const ErrorVectorSet& ev) {
  const std::size_t n = ev.n();
  check_exact_cap(n);
  if (ev.count() == 0) throw std::invalid_argument("Rademacher average of an empty set");
  std::vector<std::uint64_t> masks;
  std::vector<int> weights;
  for (const auto& e : ev.vectors()) {
    masks.push_back(e.words().empty() ? 0 : e.words()[0]);
    weights.push_back(std::popcount(masks.back()));
  }
  const std::uint64_t patterns = 1ULL << n;
  std::int64_t total = 0;
  for (std::uint64_t sigma = 0; sigma < patterns; ++sigma) {
    int best = std::numeric_limits<int>::min();
    for (std::size_t j = 0; j < masks.size(); ++j) {
      best = std::max(best, 2 * std::popcount(masks[j] & sigma) - weights[j]);
    }
    total += best;
  }
  RademacherEstimate est;
  est.value = static_cast<double>(total) / (static_cast<double>(patterns) * static_cast<double>(n));
  return est;
}

RademacherEstimate rademacher_mc(const ErrorVectorSet& ev, std::size_t draws, std::uint64_t seed) {
  check_draws(draws);
  if (ev.count() == 0) throw std::invalid_argument("Rademacher average of an empty set");
  const std::size_t n = ev.n();
  std::vector<std::int64_t> ones;
  for (const auto& e : ev.vectors()) ones.push_back(static_cast<std::int64_t>(e.count()));
  std::vector<double> per_draw(draws);
  std::vector<std::uint64_t> signs;
  for (std::size_t d = 0; d < draws; ++d) {
    draw_signs(seed, d, n, signs);
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    for (std::size_t j = 0; j < ev.count(); ++j) {
      const auto words = ev.vectors()[j].words();
      std::int64_t plus = 0;
      for (std::size_t w = 0; w < words.size(); ++w) plus += std::popcount(words[w] & signs[w]);
      best = std::max(best, 2 * plus - ones[j]);
    }
    per_draw[d] = static_cast<double>(best) / static_cast<double>(n);
  }
  return summarize(per_draw, RademacherMode::kMonteCarlo);
}

RademacherEstimate rademacher_exact(const ClassOnSample& view, std::size_t max_errors) {
  const std::size_t n = view.n();
  check_exact_cap(n);
  // One pass of the dynamic program costs about as much as scanning 16 n (k + 1)
  // explicit error vectors.
  const double dp_cost = 16.0 * static_cast<double>(n) * (view.model().budget() + 1);
  if (view.predicted_count() <= dp_cost) {
    std::vector<BitVector> kept;
    for (auto& item : view.enumerate()) {
      if (item.errors <= max_errors) kept.push_back(std::move(item.error_vector));
    }
    return rademacher_exact(ErrorVectorSet(n, std::move(kept)));
  }
  return rademacher_exact_dp(view, max_errors);
}

RademacherEstimate rademacher_exact_dp(const ClassOnSample& view, std::size_t max_errors) {
  const std::size_t n = view.n();
  check_exact_cap(n);
  const std::uint64_t patterns = 1ULL << n;
  std::vector<std::int32_t> weights(n);
  std::int64_t total = 0;
  for (std::uint64_t sigma = 0; sigma < patterns; ++sigma) {
    for (std::size_t i = 0; i < n; ++i) weights[i] = ((sigma >> i) & 1ULL) ? 1 : -1;
    const auto best = view.max_gain(weights, max_errors);
    if (!best) throw std::invalid_argument("Rademacher average of an empty set");
    total += *best;
  }
  RademacherEstimate est;
  est.value = static_cast<double>(total) / (static_cast<double>(patterns) * static_cast<double>(n));
  return est;
}

RademacherEstimate rademacher_mc(const ClassOnSample& view, std::size_t max_errors, std::size_t draws,
                                 std::uint64_t seed) {
  check_draws(draws);
  const std::size_t n = view.n();
  std::vector<double> per_draw(draws);
  std::vector<std::uint64_t> signs;
  std::vector<std::int32_t> weights(n);
  for (std::size_t d = 0; d < draws; ++d) {
    draw_signs(seed, d, n, signs);
    for (std::size_t i = 0; i < n; ++i) weights[i] = ((signs[i / 64] >> (i % 64)) & 1ULL) ? 1 : -1;
    const auto best = view.max_gain(weights, max_errors);
    if (!best) throw std::invalid_argument("Rademacher average of an empty set");
    per_draw[d] = static_cast<double>(*best) / static_cast<double>(n);
  }
  return summarize(per_draw, RademacherMode::kMonteCarlo);
}

RademacherEstimate rademacher(const ClassOnSample& view, std::size_t max_errors, std::size_t draws,
                              std::uint64_t seed, std::size_t exact_cap) {
  if (view.n() <= std::min(exact_cap, kExactRademacherCap)) return rademacher_exact(view, max_errors);
  return rademacher_mc(view, max_errors, draws, seed);
}

double u_hat(std::uint64_t shatter_count, std::size_t n, int k, const ConstantProfile& profile) {
  if (shatter_count == 0) throw std::invalid_argument("shatter coefficient must be at least 1");
  return u_hat_from_log(std::log(static_cast<double>(shatter_count)), n, k, profile);
}

double u_hat_from_log(double log_shatter, std::size_t n, int k, const ConstantProfile& profile) {
  if (n == 0 || k < 1) throw std::invalid_argument("u_hat needs n >= 1 and k >= 1");
  const double nd = static_cast<double>(n);
  return profile.u_scale * (profile.u_shatter * log_shatter + profile.u_log * std::log(nd * k)) / nd;
}

double u_bar(double expected_log_shatter, std::size_t n, int k) {
  const double nd = static_cast<double>(n);
  return 16.0 * (8.0 * expected_log_shatter + 17.0 * std::log(nd * k)) / nd;
}

double u_population(double log_expected_shatter, std::size_t n, int k) {
  const double nd = static_cast<double>(n);
  return 8.0 * (2.0 * log_expected_shatter + 2.0 * std::log(nd * k)) / nd;
}

double epsilon_k(std::size_t n, int k) {
  const double nd = static_cast<double>(n);
  return 2.0 * std::log(nd * k) / nd;
}

std::size_t max_errors_for(double threshold, std::size_t n) {
  if (threshold >= 1.0) return n;
  if (!(threshold >= 0.0)) return 0;
  const double scaled = threshold * static_cast<double>(n);
  return std::min(n, static_cast<std::size_t>(std::floor(scaled + 1e-9 * std::max(1.0, scaled))));
}

LocalizationResult localized_subclass(const ErrorVectorSet& full, double erm_loss, double uh,
                                      const ConstantProfile& profile) {
  LocalizationResult out;
  out.u_hat = uh;
  out.threshold = profile.local_emp * erm_loss + profile.local_u * uh;
  out.max_errors = max_errors_for(out.threshold, full.n());
  std::vector<BitVector> kept;
  for (const auto& e : full.vectors()) {
    if (e.count() <= out.max_errors) kept.push_back(e);
  }
  out.subset = ErrorVectorSet(full.n(), std::move(kept));
  out.subset_count = static_cast<double>(out.subset->count());
  return out;
}

LocalizationResult localized_subclass(const ClassOnSample& view, double erm_loss, double uh,
                                      const ConstantProfile& profile) {
  LocalizationResult out;
  out.u_hat = uh;
  out.threshold = profile.local_emp * erm_loss + profile.local_u * uh;
  out.max_errors = max_errors_for(out.threshold, view.n());
  out.subset_count = view.count(out.max_errors);
  return out;
}

}  // namespace locpen
