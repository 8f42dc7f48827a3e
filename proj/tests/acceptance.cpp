// Acceptance run: one PASS/FAIL line per criterion, detail lines indented.
// Usage: locpen_acceptance [criterion numbers...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "locpen/complexity.hpp"
#include "locpen/concentration.hpp"
#include "locpen/harness.hpp"
#include "locpen/rng.hpp"
#include "oracles.hpp"

using namespace locpen;

namespace {

// Pinned tolerances.
constexpr double kSeFactor = 3.0;        // tail and expectation checks (applied inside finalize)
constexpr double kMcAgreementSe = 4.0;   // Monte Carlo vs exact Rademacher
constexpr std::size_t kMcDraws = 100000;
constexpr std::size_t kLemmaReps = 10000;
constexpr std::size_t kLemmaMcDraws = 100;
constexpr std::size_t kOracleReps = 500;
constexpr std::size_t kOracleN = 2000;
constexpr std::size_t kOracleMcDraws = 500;

const NoisyRegionDistribution kTwoCluster({{0.2, 0.4}, {0.6, 0.8}}, 0.1);

void detail(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

LabeledSample random_sample(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> xs(n);
  std::vector<std::uint8_t> ys(n);
  const double p = 0.2 + 0.6 * rng.uniform();
  const bool ties = rng.below(4) == 0;
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = ties ? static_cast<double>(rng.below(n / 2 + 1)) / static_cast<double>(n) : rng.uniform();
    ys[i] = rng.uniform() < p ? 1 : 0;
  }
  return LabeledSample(xs, ys);
}

std::set<std::string> as_strings(const ErrorVectorSet& ev) {
  std::set<std::string> out;
  for (const auto& v : ev.vectors()) out.insert(v.to_string());
  return out;
}

void print_report(const TailCheckReport& r) {
  detail("%s %-22s %-5s n=%zu k=%d reps=%zu eps=%.4g value=%.6g bound=%.6g se=%.3g %s", r.proposition.c_str(),
         r.statistic.c_str(), r.class_name.c_str(), r.n, r.k, r.reps, r.epsilon, r.value, r.bound, r.combined_se(),
         r.passed ? "ok" : "VIOLATED");
}

// ---------------------------------------------------------------------------

bool erm_equivalence() {
  std::size_t mismatches = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const std::size_t n = 4 + seed % 13;
    const int k = 1 + static_cast<int>(seed % 3);
    const LabeledSample s = random_sample(n, derive_seed(101, seed));
    const ModelClass c = ModelClass::intervals(k);
    const auto fit = erm(c, s);
    std::size_t enumerated = n;
    const ErrorVectorSet ev = enumerate_error_vectors(c, s);
    for (const auto& e : ev.vectors()) enumerated = std::min(enumerated, e.count());
    const std::size_t grid = oracle::min_errors(oracle::error_patterns(c, s));
    if (fit.errors != enumerated || fit.errors != grid || error_vector(fit.classifier, s) != fit.error_vector) {
      ++mismatches;
      detail("mismatch seed=%llu n=%zu k=%d dp=%zu enum=%zu grid=%zu", static_cast<unsigned long long>(seed), n, k,
             fit.errors, enumerated, grid);
    }
  }
  detail("500 samples, n in [4,16], k in {1,2,3}: %zu mismatches", mismatches);
  return mismatches == 0;
}

bool shatter_counting() {
  std::size_t mismatches = 0;
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 1 + seed % 10;
    const LabeledSample s = random_sample(n, derive_seed(202, seed));
    for (const ModelClass& c : {ModelClass::thresholds(), ModelClass::intervals(1), ModelClass::intervals(2),
                                ModelClass::intervals(3)}) {
      const auto expected = oracle::error_patterns(c, s);
      ++checked;
      if (random_shatter(c, s) != expected.size() || as_strings(enumerate_error_vectors(c, s)) != expected) {
        ++mismatches;
      }
    }
  }
  detail("random shatter vs grid dichotomies: %zu cases, %zu mismatches", checked, mismatches);
  std::size_t closed_mismatches = 0;
  for (std::size_t m = 1; m <= 8; ++m) {
    for (const ModelClass& c : {ModelClass::thresholds(), ModelClass::intervals(1), ModelClass::intervals(2),
                                ModelClass::intervals(3)}) {
      const double closed = std::exp(worst_case_log_shatter(c, m));
      const std::size_t searched = oracle::worst_case_patterns(c, m);
      if (std::llround(closed) != static_cast<long long>(searched)) {
        ++closed_mismatches;
        detail("closed form %s m=%zu: %.1f vs search %zu", c.name().c_str(), m, closed, searched);
      }
    }
  }
  detail("worst-case closed forms vs configuration search, m <= 8: %zu mismatches", closed_mismatches);
  return mismatches == 0 && closed_mismatches == 0;
}

bool rademacher_checks() {
  auto set_of = [](std::size_t n, std::vector<std::string> bits) {
    std::vector<BitVector> v;
    for (const auto& b : bits) v.push_back(BitVector::from_string(b));
    return ErrorVectorSet(n, v);
  };
  std::vector<std::string> all;
  for (int code = 0; code < 8; ++code) {
    std::string b(3, '0');
    for (int i = 0; i < 3; ++i) b[i] = (code >> i) & 1 ? '1' : '0';
    all.push_back(b);
  }
  const double r0 = rademacher_exact(set_of(3, {"000"})).value;
  const double r1 = rademacher_exact(set_of(3, all)).value;
  const double r2 = rademacher_exact(set_of(3, {"000", "111"})).value;
  detail("worked sets: %.17g %.17g %.17g (expected 0, 0.5, 0.25)", r0, r1, r2);
  bool ok = r0 == 0.0 && r1 == 0.5 && r2 == 0.25;

  std::size_t outside = 0;
  double worst_z = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 3 + seed % 10;
    const ModelClass c = seed % 4 == 3 ? ModelClass::thresholds() : ModelClass::intervals(1 + static_cast<int>(seed % 3));
    const LabeledSample s = random_sample(n, derive_seed(303, seed));
    const ClassOnSample view(c, s);
    const double exact = rademacher_exact(view, n).value;
    const auto mc = rademacher_mc(view, n, kMcDraws, derive_seed(304, seed));
    const double z = mc.std_error > 0 ? std::abs(mc.value - exact) / mc.std_error : (mc.value == exact ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, z);
    outside += z > kMcAgreementSe;
  }
  detail("Monte Carlo (%zu draws) vs exact on 50 classes: %zu outside %.0f SE, largest |z| = %.3f", kMcDraws, outside,
         kMcAgreementSe, worst_z);
  return ok && outside == 0;
}

ExperimentConfig lemma_config(std::size_t n) {
  ExperimentConfig cfg{kTwoCluster, interval_hierarchy(3)};
  cfg.n = n;
  cfg.reps = kLemmaReps;
  cfg.mc_draws = kLemmaMcDraws;
  cfg.seed = 4000 + n;
  return cfg;
}

std::size_t g_structure_checks = 0;
std::size_t g_structure_failures = 0;
bool g_lemma_ran = false;

bool lemma_checks() {
  bool ok = true;
  for (std::size_t n : {200, 500}) {
    const auto cfg = lemma_config(n);
    for (auto [kind, gamma] : {std::pair{PenaltyKind::kSimple, 8.0}, std::pair{PenaltyKind::kLocalized, 11.0}}) {
      const auto r = run_lemma_check(cfg, kind, gamma);
      for (const auto& rep : r.estimation) print_report(rep);
      for (const auto& rep : r.optimal) print_report(rep);
      if (kind == PenaltyKind::kLocalized) {
        g_structure_checks += r.structure_checks;
        g_structure_failures += r.structure_failures;
        detail("localized structure n=%zu: %zu checks, %zu failures, %zu with the whole class kept", n,
               r.structure_checks, r.structure_failures, r.structure_identical);
        if (!r.first_structure_failure.empty()) detail("first failure: %s", r.first_structure_failure.c_str());
      }
      bool tails = true;
      for (const auto& rep : r.estimation) tails = tails && rep.passed;
      for (const auto& rep : r.optimal) tails = tails && rep.passed;
      ok = ok && tails;
    }
  }
  g_lemma_ran = true;
  return ok;
}

bool oracle_bounds() {
  ExperimentConfig cfg{kTwoCluster, interval_hierarchy(5)};
  cfg.n = kOracleN;
  cfg.reps = kOracleReps;
  cfg.mc_draws = kOracleMcDraws;
  cfg.seed = 5005;
  cfg.kinds = {PenaltyKind::kVapnik, PenaltyKind::kGlobalRademacher, PenaltyKind::kSimple, PenaltyKind::kLocalized};
  const auto report = run_oracle_experiment(cfg);
  bool ok = true;
  for (const auto& p : report.penalties) {
    detail("%-10s excess %.5f (se %.5f) bound %.5f slack %.5f expectation %s%s", p.label.c_str(), p.mean_excess,
           p.se_excess, p.oracle_bound, p.oracle_slack, p.expectation_ok ? "ok" : "VIOLATED",
           p.theorem_applies ? "" : " [reference constants]");
    detail("%-10s probability: %zu violations, level %.3g%s -> %s", p.label.c_str(), p.prob_violations, p.prob_level,
           p.prob_vacuous ? " (vacuous)" : "", p.prob_ok ? "ok" : "VIOLATED");
    if (!std::isnan(p.population_bound)) {
      detail("%-10s population-class bound %.5f %s", p.label.c_str(), p.population_bound, p.population_ok ? "ok" : "VIOLATED");
    }
    std::string freq;
    for (const auto& c : p.per_k) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " k%d:%.3f", c.k, c.selection_freq);
      freq += buf;
    }
    detail("%-10s selection frequencies%s", p.label.c_str(), freq.c_str());
    if (p.kind == PenaltyKind::kSimple) ok = ok && p.expectation_ok;
    if (p.kind == PenaltyKind::kLocalized) ok = ok && p.expectation_ok && (p.prob_vacuous || p.prob_ok) && p.population_ok;
  }
  return ok;
}

bool concentration_suites() {
  std::vector<TailCheckReport> all;
  auto run = [&](std::string_view id, TailCheckConfig cfg) {
    for (auto& r : run_proposition(id, cfg)) all.push_back(std::move(r));
  };
  {
    TailCheckConfig cfg{kTwoCluster, ModelClass::intervals(1)};
    cfg.n = 200;
    cfg.reps = 10000;
    cfg.seed = 6001;
    run("3.2", cfg);
  }
  {
    TailCheckConfig cfg{kTwoCluster, ModelClass::intervals(2)};
    cfg.n = 100;
    cfg.epsilon = 2.0;
    cfg.reps = 10000;
    cfg.seed = 6002;
    run("3.3", cfg);
  }
  {
    TailCheckConfig cfg{kTwoCluster, ModelClass::intervals(1)};
    cfg.n = 12;
    cfg.epsilon = 0.05;
    cfg.reps = 10000;
    cfg.seed = 6003;
    run("4.4", cfg);
  }
  {
    TailCheckConfig cfg{kTwoCluster, ModelClass::singleton(IntervalClassifier(kTwoCluster.target()))};
    cfg.n = 100;
    cfg.epsilon = 0.05;
    cfg.reps = 10000;
    cfg.seed = 6004;
    run("4.5", cfg);
    TailCheckConfig cls{kTwoCluster, ModelClass::intervals(1)};
    cls.n = 100;
    cls.epsilon = 0.05;
    cls.reps = 10000;
    cls.seed = 6005;
    run("4.5", cls);
  }
  for (int k = 1; k <= 3; ++k) {
    TailCheckConfig cfg{kTwoCluster, ModelClass::intervals(k)};
    cfg.n = 12;
    cfg.k = k;
    cfg.reps = 5000;
    cfg.seed = 6010 + static_cast<std::uint64_t>(k);
    run("4.6", cfg);
  }
  bool ok = true;
  for (const auto& r : all) {
    print_report(r);
    ok = ok && r.passed;
  }
  return ok;
}

bool localization_structure() {
  if (!g_lemma_ran) lemma_checks();
  detail("%zu per-replicate checks over n in {200, 500}, k <= 3: %zu failures", g_structure_checks,
         g_structure_failures);
  // With the published constants the localized set is the whole class at
  // these n, so repeat with shrunken constants where it is a strict subset.
  // n = 12 keeps the explicit-set comparison in play.
  std::size_t strict = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  for (auto [n, scale, reps] : {std::tuple{std::size_t{12}, 0.01, std::size_t{300}},
                                std::tuple{std::size_t{200}, 0.05, std::size_t{1000}}}) {
    ExperimentConfig cfg{kTwoCluster, interval_hierarchy(3)};
    cfg.n = n;
    cfg.reps = reps;
    cfg.mc_draws = 50;
    cfg.seed = 7007 + n;
    cfg.profile = ConstantProfile::exploratory(scale);
    const auto r = run_lemma_check(cfg, PenaltyKind::kLocalized, 11.0);
    checks += r.structure_checks;
    failures += r.structure_failures;
    strict += r.structure_checks - r.structure_identical;
    if (!r.first_structure_failure.empty()) detail("first failure: %s", r.first_structure_failure.c_str());
  }
  detail("exploratory constants, n in {12, 200}: %zu checks, %zu with a strict subset, %zu failures", checks, strict,
         failures);
  return g_structure_checks > 0 && g_structure_failures == 0 && strict > 0 && failures == 0;
}

bool determinism() {
  ExperimentConfig cfg{kTwoCluster, interval_hierarchy(5)};
  cfg.n = 400;
  cfg.reps = 40;
  cfg.mc_draws = 200;
  cfg.seed = 8008;
  cfg.kinds = {PenaltyKind::kVapnik, PenaltyKind::kGlobalRademacher, PenaltyKind::kSimple, PenaltyKind::kLocalized};
  cfg.workers = 1;
  const std::string a = report_csv(run_oracle_experiment(cfg));
  const std::string b = report_csv(run_oracle_experiment(cfg));
  cfg.workers = 8;
  const std::string c = report_csv(run_oracle_experiment(cfg));
  cfg.profile = ConstantProfile::exploratory(0.05);
  cfg.workers = 1;
  const std::string d = report_csv(run_oracle_experiment(cfg));
  cfg.workers = 8;
  const std::string e = report_csv(run_oracle_experiment(cfg));
  detail("paper profile: rerun %s, workers 1 vs 8 %s (%zu bytes)", a == b ? "identical" : "DIFFERS",
         a == c ? "identical" : "DIFFERS", a.size());
  detail("exploratory profile: workers 1 vs 8 %s (%zu bytes)", d == e ? "identical" : "DIFFERS", d.size());
  return a == b && a == c && d == e;
}

struct Criterion {
  int id;
  const char* name;
  std::function<bool()> run;
};

}  // namespace

int main(int argc, char** argv) {
  static_assert(kSeFactor == 3.0);
  const std::vector<Criterion> criteria{
      {1, "ERM oracle equivalence", erm_equivalence},
      {2, "shatter counting", shatter_counting},
      {3, "Rademacher averages", rademacher_checks},
      {4, "penalty deviation lemmas", lemma_checks},
      {5, "oracle inequalities", oracle_bounds},
      {6, "concentration suites", concentration_suites},
      {7, "localization structure", localization_structure},
      {8, "determinism and parallel invariance", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      detail("exception: %s", e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", c.id, c.name, secs);
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
