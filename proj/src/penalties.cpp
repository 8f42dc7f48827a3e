#include "locpen/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "locpen/parallel.hpp"
#include "locpen/rng.hpp"

namespace locpen {

namespace {

void check_nk(std::size_t n, int k) {
  if (n == 0 || k < 1) throw std::invalid_argument("penalties need n >= 1 and k >= 1");
}

void finish(PenaltyBreakdown& p) {
  if (!std::isfinite(p.raw_value) || p.raw_value < 0.0) {
    throw std::logic_error(to_string(p.kind) + " penalty produced a non-finite or negative value");
  }
  p.value = std::min(p.raw_value, 1.0);
}

std::string shatter_label(const ModelClass& c, ShatterBound bound) {
  if (bound == ShatterBound::kVcCap) return "vc_cap";
  return has_exact_worst_case_shatter(c) ? "exact" : "sauer";
}

void record_rademacher(PenaltyBreakdown& p, const RademacherEstimate& r) {
  p.terms.push_back({"rademacher", r.value});
  p.terms.push_back({"rademacher_se", r.std_error});
  p.terms.push_back({"rademacher_draws", static_cast<double>(r.draws)});
  p.labels.emplace_back("rademacher_mode", to_string(r.mode));
}

}  // namespace

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::kVapnik:
      return "vapnik";
    case PenaltyKind::kGlobalRademacher:
      return "global";
    case PenaltyKind::kSimple:
      return "simple";
    case PenaltyKind::kLocalized:
      return "localized";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view text) {
  if (text == "vapnik") return PenaltyKind::kVapnik;
  if (text == "global" || text == "global_rademacher") return PenaltyKind::kGlobalRademacher;
  if (text == "simple") return PenaltyKind::kSimple;
  if (text == "localized") return PenaltyKind::kLocalized;
  throw std::invalid_argument("unknown penalty '" + std::string(text) + "' (expected vapnik|global|simple|localized)");
}

bool PenaltyBreakdown::has_term(std::string_view name) const {
  return std::any_of(terms.begin(), terms.end(), [&](const PenaltyTerm& t) { return t.name == name; });
}

double PenaltyBreakdown::term(std::string_view name) const {
  for (const auto& t : terms) {
    if (t.name == name) return t.value;
  }
  throw std::out_of_range("penalty has no term '" + std::string(name) + "'");
}

std::string PenaltyBreakdown::label(std::string_view name) const {
  for (const auto& [key, value] : labels) {
    if (key == name) return value;
  }
  return "";
}

std::uint64_t rademacher_seed(const PenaltyOptions& options, int k) {
  return derive_seed(derive_seed(options.seed, Stream::kSigns), static_cast<std::uint64_t>(k));
}

PenaltyBreakdown penalty_vapnik(const ModelClass& c, std::size_t n, int k, double gamma) {
  return penalty_vapnik(c, n, k, gamma, ShatterBound::kExact);
}

PenaltyBreakdown penalty_vapnik(const ModelClass& c, std::size_t n, int k, double gamma, ShatterBound bound) {
  check_nk(n, k);
  if (!(gamma > 0.0)) throw std::invalid_argument("vapnik penalty needs gamma > 0");
  PenaltyBreakdown p;
  p.kind = PenaltyKind::kVapnik;
  p.k = k;
  p.n = n;
  const double log_shatter = worst_case_log_shatter(c, 2 * static_cast<std::uint64_t>(n), bound);
  p.terms.push_back({"log_shatter_2n", log_shatter});
  p.terms.push_back({"log_k", std::log(static_cast<double>(k))});
  p.terms.push_back({"gamma", gamma});
  p.labels.emplace_back("shatter_bound", shatter_label(c, bound));
  p.raw_value = gamma * std::sqrt((log_shatter + std::log(static_cast<double>(k))) / static_cast<double>(n));
  finish(p);
  return p;
}

PenaltyBreakdown penalty_simple(std::size_t n, int k, double erm_loss, double log_shatter_2n) {
  check_nk(n, k);
  const double nd = static_cast<double>(n);
  const double log_nk = std::log(nd * k);
  PenaltyBreakdown p;
  p.kind = PenaltyKind::kSimple;
  p.k = k;
  p.n = n;
  const double first = 2.0 * erm_loss + 8.0 * (log_shatter_2n + 2.0 * log_nk) / nd;
  const double second = log_shatter_2n / nd + 2.0 * log_nk / nd;
  p.terms.push_back({"erm_loss", erm_loss});
  p.terms.push_back({"log_shatter_2n", log_shatter_2n});
  p.terms.push_back({"log_nk", log_nk});
  p.raw_value = 2.0 * std::sqrt(first) * std::sqrt(second);
  finish(p);
  return p;
}

PenaltyBreakdown assemble_localized(double rademacher_value, std::size_t n, int k, double erm_loss, double uh,
                                    const ConstantProfile& profile) {
  check_nk(n, k);
  const double nd = static_cast<double>(n);
  const double log_nk = std::log(nd * k);
  PenaltyBreakdown p;
  p.kind = PenaltyKind::kLocalized;
  p.k = k;
  p.n = n;
  const double rademacher_term = profile.pen_rademacher * rademacher_value;
  const double log_term = profile.pen_log * log_nk / nd;
  const double cross_term = profile.pen_cross * std::sqrt(log_nk / nd) *
                            std::sqrt(profile.pen_cross_emp * erm_loss + profile.pen_cross_u * uh);
  p.terms.push_back({"erm_loss", erm_loss});
  p.terms.push_back({"u_hat", uh});
  p.terms.push_back({"rademacher_term", rademacher_term});
  p.terms.push_back({"log_term", log_term});
  p.terms.push_back({"cross_term", cross_term});
  p.labels.emplace_back("profile", profile.name);
  p.raw_value = rademacher_term + log_term + cross_term;
  finish(p);
  return p;
}

RademacherEstimate full_class_rademacher(const ClassOnSample& view, int k, const PenaltyOptions& options,
                                         RademacherCache* cache) {
  if (cache && cache->full) return *cache->full;
  const auto r = rademacher(view, view.n(), options.mc_draws, rademacher_seed(options, k), options.exact_cap);
  if (cache) cache->full = r;
  return r;
}

PenaltyBreakdown compute_penalty(PenaltyKind kind, const ClassOnSample& view, const ErmResult& erm, int k,
                                 const PenaltyOptions& options, RademacherCache* cache) {
  const std::size_t n = view.n();
  check_nk(n, k);
  switch (kind) {
    case PenaltyKind::kVapnik:
      return penalty_vapnik(view.model(), n, k, options.gamma);
    case PenaltyKind::kSimple: {
      const double log_shatter = worst_case_log_shatter(view.model(), 2 * static_cast<std::uint64_t>(n));
      PenaltyBreakdown p = penalty_simple(n, k, erm.empirical_loss, log_shatter);
      p.labels.emplace_back("shatter_bound", shatter_label(view.model(), ShatterBound::kExact));
      return p;
    }
    case PenaltyKind::kGlobalRademacher: {
      if (!(options.gamma1 > 0.0) || !(options.gamma2 > 0.0)) {
        throw std::invalid_argument("global Rademacher penalty needs gamma1, gamma2 > 0");
      }
      const auto r = full_class_rademacher(view, k, options, cache);
      PenaltyBreakdown p;
      p.kind = kind;
      p.k = k;
      p.n = n;
      record_rademacher(p, r);
      const double log_k_term = options.gamma2 * std::sqrt(std::log(static_cast<double>(k)) / static_cast<double>(n));
      p.terms.push_back({"rademacher_term", options.gamma1 * r.value});
      p.terms.push_back({"log_k_term", log_k_term});
      p.raw_value = options.gamma1 * r.value + log_k_term;
      finish(p);
      return p;
    }
    case PenaltyKind::kLocalized: {
      const double log_shatter = view.log_count();
      const double uh = u_hat_from_log(log_shatter, n, k, options.profile);
      const LocalizationResult loc = localized_subclass(view, erm.empirical_loss, uh, options.profile);
      const auto r = loc.max_errors >= n
                         ? full_class_rademacher(view, k, options, cache)
                         : rademacher(view, loc.max_errors, options.mc_draws, rademacher_seed(options, k), options.exact_cap);
      PenaltyBreakdown p = assemble_localized(r.value, n, k, erm.empirical_loss, uh, options.profile);
      record_rademacher(p, r);
      p.terms.push_back({"log_shatter", log_shatter});
      p.terms.push_back({"threshold", loc.threshold});
      p.terms.push_back({"max_errors", static_cast<double>(loc.max_errors)});
      p.terms.push_back({"subset_count", loc.subset_count});
      return p;
    }
  }
  throw std::logic_error("unhandled penalty kind");
}

PenaltyBreakdown compute_penalty(PenaltyKind kind, const ModelClass& c, const LabeledSample& s, int k,
                                 const PenaltyOptions& options) {
  const ClassOnSample view(c, s);
  return compute_penalty(kind, view, view.erm(), k, options);
}

PenaltyBreakdown penalty_global_rademacher(const ModelClass& c, const LabeledSample& s, int k,
                                           const PenaltyOptions& options) {
  return compute_penalty(PenaltyKind::kGlobalRademacher, c, s, k, options);
}

PenaltyBreakdown penalty_simple(const ModelClass& c, const LabeledSample& s, int k, const PenaltyOptions& options) {
  return compute_penalty(PenaltyKind::kSimple, c, s, k, options);
}

PenaltyBreakdown penalty_localized(const ModelClass& c, const LabeledSample& s, int k, const PenaltyOptions& options) {
  return compute_penalty(PenaltyKind::kLocalized, c, s, k, options);
}

int argmin_score(const std::vector<SelectionRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("cannot select from an empty table");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].score < rows[best].score) best = i;
  }
  return rows[best].k;
}

SelectionResult select_model(const std::vector<ModelClass>& classes, const LabeledSample& s, PenaltyKind kind,
                             const PenaltyOptions& options, unsigned workers) {
  if (classes.empty()) throw std::invalid_argument("select_model needs at least one class");
  std::vector<std::optional<SelectionRow>> rows(classes.size());
  std::vector<std::string> errors(classes.size());
  parallel_for(classes.size(), workers, [&](std::size_t i) {
    const int k = static_cast<int>(i) + 1;
    try {
      const ClassOnSample view(classes[i], s);
      SelectionRow row;
      row.k = k;
      row.class_name = classes[i].name();
      row.erm = view.erm();
      row.penalty = compute_penalty(kind, view, row.erm, k, options);
      row.score = row.erm.empirical_loss + row.penalty.value;
      rows[i] = std::move(row);
    } catch (const std::exception& e) {
      errors[i] = classes[i].name() + ": " + e.what();
    }
  });

  SelectionResult result;
  std::string failure;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (rows[i]) {
      result.table.push_back(std::move(*rows[i]));
    } else if (failure.empty()) {
      failure = errors[i];
    }
  }
  if (!failure.empty()) throw SelectionError(to_string(kind) + " penalty failed for " + failure, std::move(result.table));
  result.chosen_k = argmin_score(result.table);
  result.chosen_classifier = result.table[static_cast<std::size_t>(result.chosen_k) - 1].erm.classifier;
  return result;
}

}  // namespace locpen
