#include "locpen/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "locpen/class_on_sample.hpp"
#include "locpen/parallel.hpp"
#include "locpen/rng.hpp"

namespace locpen {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  double mean = 0.0;
  double se = kNaN;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
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

double zero_if_nan(double v) { return std::isnan(v) ? 0.0 : v; }

void validate(const ExperimentConfig& cfg) {
  if (cfg.n == 0) throw std::invalid_argument("experiment needs n >= 1");
  if (cfg.reps == 0) throw std::invalid_argument("experiment needs reps >= 1");
  if (cfg.hierarchy.empty()) throw std::invalid_argument("experiment needs a nonempty hierarchy");
  if (cfg.kinds.empty()) throw std::invalid_argument("experiment needs at least one penalty kind");
  for (const auto& c : cfg.hierarchy) {
    if (!c.is_one_dimensional()) {
      throw std::invalid_argument("experiments need closed-form true losses; " + c.name() + " is not one-dimensional");
    }
  }
}

std::uint64_t sample_seed(const ExperimentConfig& cfg, std::size_t rep) {
  return derive_seed(derive_seed(cfg.seed, Stream::kSample), rep);
}

double true_loss_of(const Hypothesis& f, const NoisyRegionDistribution& dist) {
  return true_loss(std::get<IntervalClassifier>(f), dist);
}

IntervalClassifier class_minimizer(const NoisyRegionDistribution& dist, const ModelClass& c) {
  switch (c.family()) {
    case Family::kIntervals:
      return class_optimum(dist, c.budget()).classifier;
    case Family::kThresholds:
      return threshold_optimum(dist).classifier;
    case Family::kSingleton:
      return c.fixed();
    case Family::kStumps:
      break;
  }
  throw std::invalid_argument("class minimizer needs a one-dimensional class");
}

// gamma in the penalty validity bound gamma / (n k)^2 for a penalty kind.
double lemma_gamma(PenaltyKind kind) { return kind == PenaltyKind::kSimple ? 8.0 : 11.0; }

struct ClassRecord {
  double emp_loss = 0.0;
  double true_loss = 0.0;
  double full_rademacher = kNaN;
};

struct KindClassRecord {
  double raw = 0.0;
  double value = 0.0;
  double u_hat = kNaN;
  double subset_count = kNaN;
  bool lemma_violation = false;
};

struct KindRecord {
  int chosen_k = 1;
  double selected_loss = 0.0;
  bool prob_violation = false;
  std::vector<KindClassRecord> per_k;
};

struct RepRecord {
  std::vector<ClassRecord> classes;
  std::vector<KindRecord> kinds;
};

}  // namespace

PenaltyOptions ExperimentConfig::penalty_options(std::size_t rep) const {
  PenaltyOptions o;
  o.gamma = gamma;
  o.gamma1 = gamma1;
  o.gamma2 = gamma2;
  o.mc_draws = mc_draws;
  o.profile = profile;
  o.seed = derive_seed(derive_seed(seed, Stream::kSigns), rep);
  return o;
}

std::vector<ModelClass> interval_hierarchy(int max_k) {
  if (max_k < 1) throw std::invalid_argument("hierarchy needs at least one class");
  std::vector<ModelClass> out;
  for (int k = 1; k <= max_k; ++k) out.push_back(ModelClass::intervals(k));
  return out;
}

ExperimentReport run_oracle_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t classes = cfg.hierarchy.size();
  const double nd = static_cast<double>(cfg.n);
  const double bayes = bayes_risk(cfg.dist);

  std::vector<double> class_loss(classes);
  std::vector<double> worst_loss(classes);
  for (std::size_t i = 0; i < classes; ++i) {
    class_loss[i] = class_best_loss(cfg.dist, cfg.hierarchy[i]);
    worst_loss[i] = class_worst_loss(cfg.dist, cfg.hierarchy[i]);
  }

  // The localized bound through the population class {L <= 64 L_k^* + 63 u_bar_k}
  // is evaluated when that class is all of F_k, so its Rademacher average is
  // the full-class one computed on every replicate.
  const bool localized_paper =
      cfg.profile.is_paper() &&
      std::find(cfg.kinds.begin(), cfg.kinds.end(), PenaltyKind::kLocalized) != cfg.kinds.end();
  std::vector<double> ubar(classes, kNaN);
  std::vector<char> population_class_full(classes, 0);
  if (localized_paper) {
    for (std::size_t i = 0; i < classes; ++i) {
      const int k = static_cast<int>(i) + 1;
      const ShatterMoments sm =
          estimate_shatter(cfg.dist, cfg.hierarchy[i], cfg.n, std::max<std::size_t>(cfg.shatter_reps, 1),
                           derive_seed(derive_seed(cfg.seed, Stream::kShatterBatch), i), cfg.workers);
      ubar[i] = u_bar(sm.mean_log, cfg.n, k);
      population_class_full[i] = 64.0 * class_loss[i] + 63.0 * ubar[i] >= worst_loss[i] ? 1 : 0;
    }
  }

  std::vector<RepRecord> records(cfg.reps);
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t rep) {
    const LabeledSample s = generate_sample(cfg.dist, cfg.n, sample_seed(cfg, rep));
    const PenaltyOptions opts = cfg.penalty_options(rep);
    RepRecord rec;
    rec.classes.resize(classes);
    std::vector<ClassOnSample> views;
    std::vector<ErmResult> erms;
    std::vector<RademacherCache> caches(classes);
    views.reserve(classes);
    for (std::size_t i = 0; i < classes; ++i) {
      views.emplace_back(cfg.hierarchy[i], s);
      erms.push_back(views[i].erm());
      rec.classes[i].emp_loss = erms[i].empirical_loss;
      rec.classes[i].true_loss = true_loss_of(erms[i].classifier, cfg.dist);
    }
    for (const PenaltyKind kind : cfg.kinds) {
      KindRecord kr;
      kr.per_k.resize(classes);
      double best_score = std::numeric_limits<double>::infinity();
      double oracle_side = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < classes; ++i) {
        const int k = static_cast<int>(i) + 1;
        const PenaltyBreakdown p = compute_penalty(kind, views[i], erms[i], k, opts, &caches[i]);
        KindClassRecord& c = kr.per_k[i];
        c.raw = p.raw_value;
        c.value = p.value;
        if (kind == PenaltyKind::kLocalized) {
          c.u_hat = p.term("u_hat");
          c.subset_count = p.term("subset_count");
        }
        c.lemma_violation = p.value <= rec.classes[i].true_loss - rec.classes[i].emp_loss;
        const double score = erms[i].empirical_loss + p.value;
        if (score < best_score) {
          best_score = score;
          kr.chosen_k = k;
        }
        oracle_side = std::min(oracle_side, class_loss[i] - bayes + 2.0 * p.value);
      }
      kr.selected_loss = rec.classes[static_cast<std::size_t>(kr.chosen_k) - 1].true_loss;
      kr.prob_violation = kr.selected_loss - bayes >= oracle_side;
      rec.kinds.push_back(std::move(kr));
    }
    for (std::size_t i = 0; i < classes; ++i) {
      if (population_class_full[i]) {
        rec.classes[i].full_rademacher = full_class_rademacher(views[i], static_cast<int>(i) + 1, opts, &caches[i]).value;
      }
    }
    records[rep] = std::move(rec);
  });

  ExperimentReport report;
  report.n = cfg.n;
  report.reps = cfg.reps;
  report.seed = cfg.seed;
  report.bayes_risk = bayes;
  report.profile = cfg.profile.name;
  report.se_defined = cfg.reps > 1;

  std::vector<Moments> emp(classes);
  std::vector<Moments> truth(classes);
  std::vector<Moments> full_rad(classes);
  for (std::size_t i = 0; i < classes; ++i) {
    std::vector<double> e;
    std::vector<double> t;
    std::vector<double> r;
    for (const auto& rec : records) {
      e.push_back(rec.classes[i].emp_loss);
      t.push_back(rec.classes[i].true_loss);
      r.push_back(rec.classes[i].full_rademacher);
    }
    emp[i] = moments(e);
    truth[i] = moments(t);
    full_rad[i] = moments(r);
  }

  for (std::size_t j = 0; j < cfg.kinds.size(); ++j) {
    const PenaltyKind kind = cfg.kinds[j];
    PenaltySummary ps;
    ps.kind = kind;
    ps.label = to_string(kind);
    if (kind == PenaltyKind::kLocalized && !cfg.profile.is_paper()) ps.label += "[" + cfg.profile.name + "]";
    ps.theorem_applies = kind == PenaltyKind::kSimple || (kind == PenaltyKind::kLocalized && cfg.profile.is_paper());
    ps.oracle_constant = kind == PenaltyKind::kSimple ? 16.0 : 22.0;

    std::vector<double> excess;
    std::size_t prob_violations = 0;
    std::vector<std::size_t> chosen(classes, 0);
    for (const auto& rec : records) {
      excess.push_back(rec.kinds[j].selected_loss - bayes);
      prob_violations += rec.kinds[j].prob_violation ? 1 : 0;
      ++chosen[static_cast<std::size_t>(rec.kinds[j].chosen_k) - 1];
    }
    const Moments ex = moments(excess);
    ps.mean_excess = ex.mean;
    ps.se_excess = ex.se;

    std::vector<Moments> penalty_moments(classes);
    for (std::size_t i = 0; i < classes; ++i) {
      ClassSummary cs;
      cs.k = static_cast<int>(i) + 1;
      cs.class_name = cfg.hierarchy[i].name();
      cs.class_loss = class_loss[i];
      std::vector<double> raw;
      std::vector<double> value;
      std::vector<double> uh;
      std::vector<double> subset;
      for (const auto& rec : records) {
        const KindClassRecord& c = rec.kinds[j].per_k[i];
        raw.push_back(c.raw);
        value.push_back(c.value);
        uh.push_back(c.u_hat);
        subset.push_back(c.subset_count);
        cs.lemma_violations += c.lemma_violation ? 1 : 0;
      }
      penalty_moments[i] = moments(value);
      cs.mean_emp_loss = emp[i].mean;
      cs.mean_penalty_raw = moments(raw).mean;
      cs.mean_penalty = penalty_moments[i].mean;
      cs.se_penalty = penalty_moments[i].se;
      cs.mean_u_hat = moments(uh).mean;
      cs.mean_subset_count = moments(subset).mean;
      cs.selection_freq = static_cast<double>(chosen[i]) / static_cast<double>(cfg.reps);
      cs.mean_true_loss = truth[i].mean;
      cs.se_true_loss = truth[i].se;
      cs.oracle_term = class_loss[i] - bayes + cs.mean_penalty + ps.oracle_constant / (nd * nd);
      cs.population_term = kNaN;
      if (kind == PenaltyKind::kLocalized && population_class_full[i]) {
        const double eps = epsilon_k(cfg.n, cs.k);
        cs.population_term = class_loss[i] - bayes + 8.0 * full_rad[i].mean + 15.0 * eps +
                        16.0 * std::sqrt(class_loss[i] + ubar[i]) * std::sqrt(2.0 * eps);
      }
      ps.per_k.push_back(cs);
    }

    std::size_t arg = 0;
    for (std::size_t i = 1; i < classes; ++i) {
      if (ps.per_k[i].oracle_term < ps.per_k[arg].oracle_term) arg = i;
    }
    ps.oracle_bound = ps.per_k[arg].oracle_term;
    ps.oracle_slack =
        3.0 * std::sqrt(zero_if_nan(ex.se) * zero_if_nan(ex.se) +
                        zero_if_nan(penalty_moments[arg].se) * zero_if_nan(penalty_moments[arg].se));
    ps.expectation_ok = ps.mean_excess <= ps.oracle_bound + ps.oracle_slack;

    ps.prob_violations = prob_violations;
    ps.prob_level = 4.0 * lemma_gamma(kind) / (nd * nd);
    ps.prob_vacuous = ps.prob_level >= 1.0;
    {
      const double p = std::min(ps.prob_level, 1.0);
      const double rate = static_cast<double>(prob_violations) / static_cast<double>(cfg.reps);
      ps.prob_ok = ps.prob_vacuous || rate <= p + 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.reps));
    }

    ps.population_bound = kNaN;
    ps.population_ok = true;
    if (kind == PenaltyKind::kLocalized) {
      std::size_t best = classes;
      for (std::size_t i = 0; i < classes; ++i) {
        if (!std::isnan(ps.per_k[i].population_term) && (best == classes || ps.per_k[i].population_term < ps.per_k[best].population_term)) {
          best = i;
        }
      }
      if (best < classes) {
        ps.population_bound = ps.per_k[best].population_term + 22.0 / (nd * nd);
        const double se_r = 8.0 * zero_if_nan(full_rad[best].se);
        ps.population_ok = ps.mean_excess <= ps.population_bound + 3.0 * std::sqrt(zero_if_nan(ex.se) * zero_if_nan(ex.se) + se_r * se_r);
      }
    }

    ps.closed_form_bound = kNaN;
    ps.closed_form_ok = true;
    if (kind == PenaltyKind::kSimple) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < classes; ++i) {
        const int k = static_cast<int>(i) + 1;
        const double log_s = worst_case_log_shatter(cfg.hierarchy[i], 2 * static_cast<std::uint64_t>(cfg.n));
        const double log_nk = std::log(nd * k);
        const double term = class_loss[i] - bayes +
                            4.0 * std::sqrt(class_loss[i] + 2.0 / nd * (log_s + 2.0 * log_nk)) *
                                std::sqrt(log_s / nd + 2.0 * log_nk / nd);
        best = std::min(best, term);
      }
      ps.closed_form_bound = best + 16.0 / (nd * nd);
      ps.closed_form_ok = ps.mean_excess <= ps.closed_form_bound + 3.0 * zero_if_nan(ex.se);
    }
    report.penalties.push_back(std::move(ps));
  }
  return report;
}

bool LemmaCheckResult::passed() const {
  if (structure_failures != 0) return false;
  for (const auto& r : estimation) {
    if (!r.passed) return false;
  }
  for (const auto& r : optimal) {
    if (!r.passed) return false;
  }
  return true;
}

LemmaCheckResult run_lemma_check(const ExperimentConfig& cfg, PenaltyKind kind, double gamma) {
  validate(cfg);
  if (!(gamma > 0.0)) throw std::invalid_argument("lemma check needs gamma > 0");
  const std::size_t classes = cfg.hierarchy.size();
  const double nd = static_cast<double>(cfg.n);
  std::vector<IntervalClassifier> minimizers;
  std::vector<double> class_loss;
  for (const auto& c : cfg.hierarchy) {
    minimizers.push_back(class_minimizer(cfg.dist, c));
    class_loss.push_back(true_loss(minimizers.back(), cfg.dist));
  }

  struct Cell {
    bool estimation = false;
    bool optimal = false;
    bool checked = false;
    bool identical = false;
    std::string failure;
  };
  std::vector<std::vector<Cell>> cells(cfg.reps, std::vector<Cell>(classes));
  parallel_for(cfg.reps, cfg.workers, [&](std::size_t rep) {
    const LabeledSample s = generate_sample(cfg.dist, cfg.n, sample_seed(cfg, rep));
    const PenaltyOptions opts = cfg.penalty_options(rep);
    for (std::size_t i = 0; i < classes; ++i) {
      const int k = static_cast<int>(i) + 1;
      const ClassOnSample view(cfg.hierarchy[i], s);
      const ErmResult erm = view.erm();
      RademacherCache cache;
      const PenaltyBreakdown p = compute_penalty(kind, view, erm, k, opts, &cache);
      Cell& cell = cells[rep][i];
      cell.estimation = p.value <= true_loss_of(erm.classifier, cfg.dist) - erm.empirical_loss;
      cell.optimal = p.value <= empirical_loss(Hypothesis(minimizers[i]), s) - class_loss[i];
      if (kind != PenaltyKind::kLocalized) continue;

      cell.checked = true;
      const auto max_errors = static_cast<std::size_t>(p.term("max_errors"));
      cell.identical = max_errors >= view.n();
      const RademacherEstimate full = full_class_rademacher(view, k, opts, &cache);
      char buf[256];
      if (erm.errors > max_errors) {
        std::snprintf(buf, sizeof buf, "rep %zu k=%d: ERM has %zu errors, localized bound %zu", rep, k, erm.errors,
                      max_errors);
        cell.failure = buf;
      } else if (p.term("subset_count") > view.count() + 0.5) {
        std::snprintf(buf, sizeof buf, "rep %zu k=%d: localized count %.0f exceeds %.0f", rep, k,
                      p.term("subset_count"), view.count());
        cell.failure = buf;
      } else if (p.term("rademacher") > full.value + 1e-12) {
        std::snprintf(buf, sizeof buf, "rep %zu k=%d: localized R %.6g exceeds full R %.6g", rep, k,
                      p.term("rademacher"), full.value);
        cell.failure = buf;
      } else if (view.n() <= kExactRademacherCap && view.predicted_count() <= 1e5) {
        // Small samples: repeat the check on explicit error-vector sets.
        const ErrorVectorSet all = view.error_vectors();
        const LocalizationResult loc = localized_subclass(all, erm.empirical_loss, p.term("u_hat"), cfg.profile);
        const bool ok = loc.subset->contains(erm.error_vector) && loc.subset->is_subset_of(all) &&
                        loc.subset->count() == static_cast<std::size_t>(p.term("subset_count")) &&
                        rademacher_exact(*loc.subset).value <= rademacher_exact(all).value + 1e-12;
        if (!ok) {
          std::snprintf(buf, sizeof buf, "rep %zu k=%d: explicit localized set check failed", rep, k);
          cell.failure = buf;
        }
      }
    }
  });

  LemmaCheckResult out;
  out.kind = kind;
  out.gamma = gamma;
  for (std::size_t i = 0; i < classes; ++i) {
    const int k = static_cast<int>(i) + 1;
    std::vector<char> est(cfg.reps);
    std::vector<char> opt(cfg.reps);
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      const Cell& cell = cells[rep][i];
      est[rep] = cell.estimation ? 1 : 0;
      opt[rep] = cell.optimal ? 1 : 0;
      if (cell.checked) {
        ++out.structure_checks;
        out.structure_identical += cell.identical ? 1 : 0;
        if (!cell.failure.empty()) {
          if (out.structure_failures == 0) out.first_structure_failure = cell.failure;
          ++out.structure_failures;
        }
      }
    }
    const double bound = gamma / (nd * nd * k * k);
    for (const bool estimation : {true, false}) {
      TailCheckReport r;
      r.proposition = estimation ? "lemma:estimation" : "lemma:optimal";
      r.statistic = to_string(kind) + (estimation ? ": C_k <= (L-Lhat)(f_hat_k)" : ": C_k <= (Lhat-L)(f_k*)");
      r.class_name = cfg.hierarchy[i].name();
      r.n = cfg.n;
      r.k = k;
      r.reps = cfg.reps;
      const auto& flags = estimation ? est : opt;
      r.violations = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), 1));
      r.value = static_cast<double>(r.violations) / static_cast<double>(cfg.reps);
      r.bound = bound;
      finalize(r);
      (estimation ? out.estimation : out.optimal).push_back(r);
    }
  }
  return out;
}

}  // namespace locpen
