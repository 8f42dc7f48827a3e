#include "locpen/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "locpen/class_on_sample.hpp"
#include "locpen/complexity.hpp"
#include "locpen/parallel.hpp"
#include "locpen/rng.hpp"

namespace locpen {

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  double sum = 0.0;
  for (double x : v) sum += x;
  m.mean = sum / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  }
  return m;
}

void require_interval_model(const ModelClass& c) {
  if (!c.is_one_dimensional()) {
    throw std::invalid_argument("true losses are available for one-dimensional classes only (got " + c.name() + ")");
  }
}

std::size_t expectation_reps(const TailCheckConfig& cfg) {
  return cfg.expectation_reps == 0 ? cfg.reps : cfg.expectation_reps;
}

void check_config(const TailCheckConfig& cfg) {
  if (cfg.n == 0) throw std::invalid_argument("sample size must be positive");
  if (cfg.reps == 0) throw std::invalid_argument("replicate count must be positive");
  if (cfg.k < 1) throw std::invalid_argument("class index must be at least 1");
  if (cfg.epsilon && !(*cfg.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
}

std::uint64_t batch_seed(std::uint64_t seed, Stream stream, std::size_t rep) {
  return derive_seed(derive_seed(seed, stream), rep);
}

TailCheckReport base_report(const TailCheckConfig& cfg, std::string prop, std::string statistic,
                            TailCheckReport::Kind kind, double eps) {
  TailCheckReport r;
  r.proposition = std::move(prop);
  r.statistic = std::move(statistic);
  r.kind = kind;
  r.class_name = cfg.model.name();
  r.n = cfg.n;
  r.k = cfg.k;
  r.reps = cfg.reps;
  r.epsilon = eps;
  return r;
}

TailCheckReport tail_report(const TailCheckConfig& cfg, std::string prop, std::string statistic, double eps,
                            const std::vector<char>& violated, double bound, double bound_se) {
  TailCheckReport r = base_report(cfg, std::move(prop), std::move(statistic), TailCheckReport::Kind::kTail, eps);
  r.violations = static_cast<std::size_t>(std::count(violated.begin(), violated.end(), 1));
  r.value = static_cast<double>(r.violations) / static_cast<double>(violated.size());
  r.bound = bound;
  r.bound_se = bound_se;
  finalize(r);
  return r;
}

TailCheckReport expectation_report(const TailCheckConfig& cfg, std::string prop, std::string statistic,
                                   Moments lhs, double rhs, double rhs_se) {
  TailCheckReport r =
      base_report(cfg, std::move(prop), std::move(statistic), TailCheckReport::Kind::kExpectation, 0.0);
  r.value = lhs.mean;
  r.value_se = lhs.se;
  r.bound = rhs;
  r.bound_se = rhs_se;
  finalize(r);
  return r;
}

// Per-sample extremes over the canonical representatives of the class.
struct SampleExtremes {
  double sup_l_minus_2lhat = -std::numeric_limits<double>::infinity();
  double sup_lhat_minus_2l = -std::numeric_limits<double>::infinity();
  double sup_abs_dev = 0.0;        // over the whole class
  double sup_abs_dev_local = 0.0;  // over members with L <= cap
};

SampleExtremes extremes(const ClassOnSample& view, const NoisyRegionDistribution& dist, double cap) {
  SampleExtremes out;
  const double nd = static_cast<double>(view.n());
  view.for_each_representative([&](std::span<const Interval> regions, std::size_t errors) {
    const double l = true_loss(regions, dist);
    const double lhat = static_cast<double>(errors) / nd;
    out.sup_l_minus_2lhat = std::max(out.sup_l_minus_2lhat, l - 2.0 * lhat);
    out.sup_lhat_minus_2l = std::max(out.sup_lhat_minus_2l, lhat - 2.0 * l);
    const double dev = std::abs(lhat - l);
    out.sup_abs_dev = std::max(out.sup_abs_dev, dev);
    if (l <= cap) out.sup_abs_dev_local = std::max(out.sup_abs_dev_local, dev);
  });
  return out;
}

// Exact Rademacher averages of the whole class and of its members with L <= cap.
struct SampleRademacher {
  double full = 0.0;
  double local = 0.0;
};

SampleRademacher exact_rademacher_pair(const ClassOnSample& view, const NoisyRegionDistribution& dist, double cap,
                                       bool local_is_full) {
  SampleRademacher out;
  out.full = rademacher_exact(view, view.n()).value;
  if (local_is_full) {
    out.local = out.full;
    return out;
  }
  std::vector<BitVector> kept;
  for (auto& item : view.enumerate()) {
    const auto& f = std::get<IntervalClassifier>(item.representative);
    if (true_loss(f, dist) <= cap) kept.push_back(std::move(item.error_vector));
  }
  out.local = kept.empty() ? 0.0 : rademacher_exact(ErrorVectorSet(view.n(), std::move(kept))).value;
  return out;
}

double population_u(const TailCheckConfig& cfg, std::uint64_t seed) {
  const ShatterMoments s = estimate_shatter(cfg.dist, cfg.model, cfg.n, expectation_reps(cfg), seed, cfg.workers);
  return u_population(s.log_mean_count, cfg.n, cfg.k);
}

}  // namespace

double TailCheckReport::combined_se() const {
  if (kind == Kind::kChain) return 0.0;
  if (kind == Kind::kTail) {
    const double p = std::clamp(bound, 0.0, 1.0);
    const double binomial = std::sqrt(p * (1.0 - p) / static_cast<double>(std::max<std::size_t>(reps, 1)));
    return std::sqrt(binomial * binomial + bound_se * bound_se);
  }
  return std::sqrt(value_se * value_se + bound_se * bound_se);
}

std::string to_string(TailCheckReport::Kind kind) {
  switch (kind) {
    case TailCheckReport::Kind::kTail:
      return "tail";
    case TailCheckReport::Kind::kExpectation:
      return "expectation";
    case TailCheckReport::Kind::kChain:
      return "chain";
  }
  return "unknown";
}

void finalize(TailCheckReport& r) {
  r.margin = r.bound - r.value;
  if (r.kind == TailCheckReport::Kind::kChain) {
    r.passed = r.value <= r.bound + 1e-9 * std::max(1.0, std::abs(r.bound));
  } else {
    r.passed = r.value <= r.bound + 3.0 * r.combined_se();
  }
}

double class_best_loss(const NoisyRegionDistribution& dist, const ModelClass& c) {
  switch (c.family()) {
    case Family::kIntervals:
      return class_optimal_loss(dist, c.budget());
    case Family::kThresholds:
      return threshold_optimum(dist).loss;
    case Family::kSingleton:
      return true_loss(c.fixed(), dist);
    case Family::kStumps:
      break;
  }
  throw std::invalid_argument("class losses are available for one-dimensional classes only");
}

double class_worst_loss(const NoisyRegionDistribution& dist, const ModelClass& c) {
  switch (c.family()) {
    case Family::kIntervals: {
      // max measure(A sym-diff target) = 1 - min measure(A sym-diff complement).
      std::vector<Interval> complement;
      double cursor = 0.0;
      for (const auto& r : dist.target()) {
        const double lo = std::clamp(r.lo, 0.0, 1.0);
        if (lo > cursor) complement.push_back({cursor, lo});
        cursor = std::max(cursor, std::clamp(r.hi, 0.0, 1.0));
      }
      if (cursor < 1.0) complement.push_back({cursor, 1.0});
      const NoisyRegionDistribution flipped(complement, 0.0);
      const double worst_measure = 1.0 - class_optimal_loss(flipped, c.budget());
      return dist.eta() + (1.0 - 2.0 * dist.eta()) * worst_measure;
    }
    case Family::kThresholds: {
      const double inf = std::numeric_limits<double>::infinity();
      double worst = true_loss(std::span<const Interval>{}, dist);
      std::vector<double> cuts{0.0};
      for (const auto& r : dist.target()) {
        cuts.push_back(r.lo);
        cuts.push_back(r.hi);
      }
      for (double t : cuts) {
        const Interval region{t, inf};
        worst = std::max(worst, true_loss(std::span<const Interval>(&region, 1), dist));
      }
      return worst;
    }
    case Family::kSingleton:
      return true_loss(c.fixed(), dist);
    case Family::kStumps:
      break;
  }
  throw std::invalid_argument("class losses are available for one-dimensional classes only");
}

double sigma_over_range(double lo, double hi) {
  if (lo > hi) throw std::invalid_argument("empty loss range");
  const double v = std::clamp(0.5, lo, hi);
  return std::sqrt(v * (1.0 - v));
}

ShatterMoments estimate_shatter(const NoisyRegionDistribution& dist, const ModelClass& c, std::size_t m,
                                std::size_t reps, std::uint64_t seed, unsigned workers) {
  if (m == 0 || reps == 0) throw std::invalid_argument("shatter moments need m >= 1 and reps >= 1");
  std::vector<double> logs(reps);
  parallel_for(reps, workers, [&](std::size_t i) {
    const LabeledSample s = generate_sample(dist, m, derive_seed(seed, i));
    logs[i] = ClassOnSample(c, s).log_count();
  });
  ShatterMoments out;
  out.m = m;
  out.reps = reps;
  const Moments lm = moments(logs);
  out.mean_log = lm.mean;
  out.se_log = lm.se;
  // ln E S through a shifted sum so very large counts do not overflow.
  const double top = *std::max_element(logs.begin(), logs.end());
  std::vector<double> scaled(reps);
  for (std::size_t i = 0; i < reps; ++i) scaled[i] = std::exp(logs[i] - top);
  const Moments sm = moments(scaled);
  out.log_mean_count = top + std::log(sm.mean);
  out.mean_count = std::exp(out.log_mean_count);
  out.se_count = sm.se * std::exp(top);
  return out;
}

std::vector<TailCheckReport> check_relative_vc(const TailCheckConfig& cfg) {
  check_config(cfg);
  require_interval_model(cfg.model);
  const ShatterMoments s2n = estimate_shatter(cfg.dist, cfg.model, 2 * cfg.n, expectation_reps(cfg),
                                              derive_seed(cfg.seed, Stream::kShatterBatch), cfg.workers);
  const double nd = static_cast<double>(cfg.n);
  const double eps = cfg.epsilon ? *cfg.epsilon : 4.0 * (s2n.log_mean_count + 2.0 * std::log(nd)) / nd;
  const double factor = 4.0 * std::exp(-nd * eps / 4.0);
  const double bound = factor * s2n.mean_count;
  const double bound_se = factor * s2n.se_count;

  std::vector<char> upper(cfg.reps);
  std::vector<char> lower(cfg.reps);
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t i) {
    const LabeledSample s = generate_sample(cfg.dist, cfg.n, batch_seed(cfg.seed, Stream::kStatisticBatch, i));
    const SampleExtremes e = extremes(ClassOnSample(cfg.model, s), cfg.dist, 1.0);
    upper[i] = e.sup_l_minus_2lhat >= 2.0 * eps ? 1 : 0;
    lower[i] = e.sup_lhat_minus_2l >= 2.0 * eps ? 1 : 0;
  });
  std::vector<TailCheckReport> out;
  out.push_back(tail_report(cfg, "3.2", "L-2Lhat", eps, upper, bound, bound_se));
  out.push_back(tail_report(cfg, "3.2", "Lhat-2L", eps, lower, bound, bound_se));
  char note[128];
  std::snprintf(note, sizeof note, "E S(2n)=%.6g from %zu samples", s2n.mean_count, s2n.reps);
  for (auto& r : out) r.note = note;
  return out;
}

std::vector<TailCheckReport> check_shatter_concentration(const TailCheckConfig& cfg) {
  check_config(cfg);
  const double eps = cfg.epsilon ? *cfg.epsilon : 2.0;
  const ShatterMoments ex = estimate_shatter(cfg.dist, cfg.model, cfg.n, expectation_reps(cfg),
                                             derive_seed(cfg.seed, Stream::kExpectationBatch), cfg.workers);
  std::vector<double> logs(cfg.reps);
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t i) {
    const LabeledSample s = generate_sample(cfg.dist, cfg.n, batch_seed(cfg.seed, Stream::kStatisticBatch, i));
    logs[i] = ClassOnSample(cfg.model, s).log_count();
  });

  std::vector<TailCheckReport> out;
  const double bound = std::exp(-eps);
  for (const bool base2 : {false, true}) {
    const double scale = base2 ? 1.0 / std::numbers::ln2 : 1.0;
    const std::string prefix = base2 ? "log2:" : "ln:";
    const double mean_log = ex.mean_log * scale;
    std::vector<char> upper(cfg.reps);
    std::vector<char> lower(cfg.reps);
    for (std::size_t i = 0; i < cfg.reps; ++i) {
      const double v = logs[i] * scale;
      upper[i] = v > 2.0 * mean_log + 2.0 * eps ? 1 : 0;
      lower[i] = mean_log > 2.0 * v + 2.0 * eps ? 1 : 0;
    }
    out.push_back(tail_report(cfg, "3.3", prefix + "upper", eps, upper, bound, 0.0));
    out.push_back(tail_report(cfg, "3.3", prefix + "lower", eps, lower, bound, 0.0));

    const double log_mean = ex.log_mean_count * scale;
    TailCheckReport jensen = base_report(cfg, "3.3", prefix + "E log S <= log E S", TailCheckReport::Kind::kChain, 0.0);
    jensen.reps = ex.reps;
    jensen.value = mean_log;
    jensen.bound = log_mean;
    finalize(jensen);
    out.push_back(jensen);
    TailCheckReport self = base_report(cfg, "3.3", prefix + "log E S <= E log S / ln 2", TailCheckReport::Kind::kChain, 0.0);
    self.reps = ex.reps;
    self.value = log_mean;
    self.bound = mean_log / std::numbers::ln2;
    finalize(self);
    out.push_back(self);
  }
  return out;
}

std::vector<TailCheckReport> check_rademacher_concentration(const TailCheckConfig& cfg) {
  check_config(cfg);
  if (cfg.n > kExactRademacherCap) {
    throw std::invalid_argument("Rademacher concentration check needs exact averages (n <= " +
                                std::to_string(kExactRademacherCap) + ")");
  }
  const double eps = cfg.epsilon ? *cfg.epsilon : 0.05;
  auto batch = [&](Stream stream, std::size_t reps) {
    std::vector<double> values(reps);
    parallel_for(reps, cfg.workers, [&](std::size_t i) {
      const LabeledSample s = generate_sample(cfg.dist, cfg.n, batch_seed(cfg.seed, stream, i));
      values[i] = rademacher_exact(ClassOnSample(cfg.model, s), cfg.n).value;
    });
    return values;
  };
  const Moments ex = moments(batch(Stream::kExpectationBatch, expectation_reps(cfg)));
  const std::vector<double> stat = batch(Stream::kStatisticBatch, cfg.reps);
  const double nd = static_cast<double>(cfg.n);
  std::vector<char> upper(cfg.reps);
  std::vector<char> lower(cfg.reps);
  for (std::size_t i = 0; i < cfg.reps; ++i) {
    upper[i] = stat[i] >= 2.0 * ex.mean + eps ? 1 : 0;
    lower[i] = stat[i] <= 0.5 * ex.mean - eps ? 1 : 0;
  }
  std::vector<TailCheckReport> out;
  out.push_back(tail_report(cfg, "4.4", "upper", eps, upper, std::exp(-6.0 * nd * eps / 5.0), 0.0));
  out.push_back(tail_report(cfg, "4.4", "lower", eps, lower, std::exp(-nd * eps), 0.0));
  char note[96];
  std::snprintf(note, sizeof note, "E R=%.6g (se %.3g)", ex.mean, ex.se);
  for (auto& r : out) r.note = note;
  return out;
}

TailCheckReport check_talagrand(const TailCheckConfig& cfg) {
  check_config(cfg);
  require_interval_model(cfg.model);
  const double eps = cfg.epsilon ? *cfg.epsilon : 0.05;
  const double u = population_u(cfg, derive_seed(cfg.seed, Stream::kShatterBatch));
  const double best = class_best_loss(cfg.dist, cfg.model);
  const double worst = class_worst_loss(cfg.dist, cfg.model);
  const double cap = 4.0 * best + 3.0 * u;
  const double sigma = sigma_over_range(best, std::min(cap, worst));

  auto batch = [&](Stream stream, std::size_t reps) {
    std::vector<double> values(reps);
    parallel_for(reps, cfg.workers, [&](std::size_t i) {
      const LabeledSample s = generate_sample(cfg.dist, cfg.n, batch_seed(cfg.seed, stream, i));
      values[i] = extremes(ClassOnSample(cfg.model, s), cfg.dist, cap).sup_abs_dev_local;
    });
    return values;
  };
  const Moments ex = moments(batch(Stream::kExpectationBatch, expectation_reps(cfg)));
  const std::vector<double> stat = batch(Stream::kStatisticBatch, cfg.reps);
  const double level = 2.0 * ex.mean + sigma * std::sqrt(2.0 * eps) + 4.0 * eps / 3.0;
  std::vector<char> violated(cfg.reps);
  for (std::size_t i = 0; i < cfg.reps; ++i) violated[i] = stat[i] >= level ? 1 : 0;
  TailCheckReport r = tail_report(cfg, "4.5", "sup|Lhat-L| over F*", eps, violated,
                                  std::exp(-static_cast<double>(cfg.n) * eps), 0.0);
  char note[160];
  std::snprintf(note, sizeof note, "u=%.6g cap=%.6g Sigma=%.6g E sup=%.6g (se %.3g)", u, cap, sigma, ex.mean, ex.se);
  r.note = note;
  return r;
}

std::vector<TailCheckReport> check_symmetrization_and_massart(const TailCheckConfig& cfg) {
  check_config(cfg);
  require_interval_model(cfg.model);
  if (cfg.n > kExactRademacherCap) {
    throw std::invalid_argument("symmetrization checks need exact averages (n <= " +
                                std::to_string(kExactRademacherCap) + ")");
  }
  const double nd = static_cast<double>(cfg.n);
  const std::uint64_t shatter_seed = derive_seed(cfg.seed, Stream::kShatterBatch);
  const double u = population_u(cfg, derive_seed(shatter_seed, 1));
  const ShatterMoments s2n =
      estimate_shatter(cfg.dist, cfg.model, 2 * cfg.n, expectation_reps(cfg), derive_seed(shatter_seed, 2), cfg.workers);
  const double best = class_best_loss(cfg.dist, cfg.model);
  const double worst = class_worst_loss(cfg.dist, cfg.model);
  const double cap = 4.0 * best + 3.0 * u;
  const bool local_is_full = cap >= worst;

  struct Row {
    double dev_full = 0.0;
    double dev_local = 0.0;
    double rad_full = 0.0;
    double rad_local = 0.0;
  };
  auto batch = [&](Stream stream, std::size_t reps) {
    std::vector<Row> rows(reps);
    parallel_for(reps, cfg.workers, [&](std::size_t i) {
      const LabeledSample s = generate_sample(cfg.dist, cfg.n, batch_seed(cfg.seed, stream, i));
      const ClassOnSample view(cfg.model, s);
      const SampleExtremes e = extremes(view, cfg.dist, cap);
      const SampleRademacher r = exact_rademacher_pair(view, cfg.dist, cap, local_is_full);
      rows[i] = {e.sup_abs_dev, e.sup_abs_dev_local, r.full, r.local};
    });
    return rows;
  };
  const std::vector<Row> lhs_rows = batch(Stream::kStatisticBatch, cfg.reps);
  const std::vector<Row> rhs_rows = batch(Stream::kExpectationBatch, expectation_reps(cfg));
  auto column = [](const std::vector<Row>& rows, double Row::*field) {
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.*field);
    return moments(v);
  };

  std::vector<TailCheckReport> out;
  {
    const Moments rhs = column(rhs_rows, &Row::rad_local);
    out.push_back(expectation_report(cfg, "4.6", "symmetrization: E sup|Lhat-L| <= 2 E R (F*)", column(lhs_rows, &Row::dev_local),
                                     2.0 * rhs.mean, 2.0 * rhs.se));
  }
  {
    const Moments rhs = column(rhs_rows, &Row::dev_full);
    out.push_back(expectation_report(cfg, "4.6", "desymmetrization: E R <= 2 E sup|Lhat-L| + sup L / sqrt(n)",
                                     column(lhs_rows, &Row::rad_full), 2.0 * rhs.mean + worst / std::sqrt(nd),
                                     2.0 * rhs.se));
  }
  {
    const double sigma = sigma_over_range(best, worst);
    const double m = std::log(2.0) + s2n.mean_log;  // E ln 2S(X_1^{2n})
    const double rhs = 8.0 * m / nd + 4.0 * std::sqrt(2.0 * sigma * sigma * m / nd);
    const double slope = 8.0 / nd + 4.0 * std::sqrt(2.0 * sigma * sigma / nd) / (2.0 * std::sqrt(m));
    out.push_back(expectation_report(cfg, "4.6", "Massart: E sup|Lhat-L| over F", column(lhs_rows, &Row::dev_full), rhs, slope * s2n.se_log));
  }
  char note[128];
  std::snprintf(note, sizeof note, "u=%.6g cap=%.6g sup L=%.6g F*%sF", u, cap, worst, local_is_full ? "=" : "!=");
  for (auto& r : out) r.note = note;
  return out;
}

std::vector<TailCheckReport> run_proposition(std::string_view id, const TailCheckConfig& cfg) {
  if (id == "3.2") return check_relative_vc(cfg);
  if (id == "3.3") return check_shatter_concentration(cfg);
  if (id == "4.4") return check_rademacher_concentration(cfg);
  if (id == "4.5") return {check_talagrand(cfg)};
  if (id == "4.6") return check_symmetrization_and_massart(cfg);
  throw std::invalid_argument("unknown proposition '" + std::string(id) + "' (expected 3.2, 3.3, 4.4, 4.5 or 4.6)");
}

std::string tail_reports_csv(const std::vector<TailCheckReport>& reports) {
  std::string out = "proposition,statistic,kind,class,n,k,reps,epsilon,violations,value,bound,margin,value_se,bound_se,passed,note\n";
  char buf[512];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,\"%s\",%s,%s,%zu,%d,%zu,%.10g,%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%s,\"%s\"\n",
                  r.proposition.c_str(), r.statistic.c_str(), to_string(r.kind).c_str(), r.class_name.c_str(), r.n,
                  r.k, r.reps, r.epsilon, r.violations, r.value, r.bound, r.margin, r.value_se, r.bound_se,
                  r.passed ? "true" : "false", r.note.c_str());
    out += buf;
  }
  return out;
}

}  // namespace locpen
