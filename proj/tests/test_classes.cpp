#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "locpen/class_on_sample.hpp"
#include "locpen/classes.hpp"
#include "locpen/rng.hpp"
#include "oracles.hpp"

using namespace locpen;

namespace {

std::set<std::string> as_strings(const ErrorVectorSet& ev) {
  std::set<std::string> out;
  for (const auto& v : ev.vectors()) out.insert(v.to_string());
  return out;
}

// Random 1-D sample with occasional ties.
LabeledSample random_sample(std::size_t n, std::uint64_t seed, bool ties) {
  CounterRng rng(seed);
  std::vector<double> xs(n);
  std::vector<std::uint8_t> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = ties ? static_cast<double>(rng.below(n / 2 + 1)) / static_cast<double>(n) : rng.uniform();
    ys[i] = rng.uniform() < 0.5 ? 1 : 0;
  }
  return LabeledSample(xs, ys);
}

const LabeledSample kThree({0.1, 0.2, 0.3}, {1, 0, 1});

}  // namespace

TEST_SUITE("classes") {
  TEST_CASE("class metadata") {
    CHECK(ModelClass::thresholds().vc_dim() == 1);
    CHECK(ModelClass::intervals(3).vc_dim() == 6);
    CHECK(ModelClass::intervals(3).budget() == 3);
    CHECK(ModelClass::stumps(1).vc_dim() == 2);
    CHECK_FALSE(ModelClass::stumps(2).is_one_dimensional());
    CHECK(ModelClass::intervals(2).name() != ModelClass::intervals(3).name());
    CHECK_THROWS(ModelClass::intervals(0));
    CHECK_THROWS(ModelClass::stumps(0));
  }

  TEST_CASE("empirical loss of fixed rules") {
    const Hypothesis f = IntervalClassifier({{0.05, 0.35}});
    CHECK(empirical_loss(f, kThree) == doctest::Approx(1.0 / 3));
    CHECK(error_vector(f, kThree).to_string() == "010");
    const Hypothesis perfect = IntervalClassifier({{0.05, 0.15}, {0.25, 0.35}});
    CHECK(error_count(perfect, kThree) == 0);
    const Hypothesis inverse = IntervalClassifier({{0.15, 0.25}});
    CHECK(empirical_loss(inverse, kThree) == 1.0);
    const Hypothesis stump = StumpRule{0, 0.25, false};
    CHECK(error_vector(stump, kThree).to_string() == "011");
    CHECK_FALSE(describe(stump).empty());
  }

  TEST_CASE("worked error vector sets") {
    const LabeledSample zeros({0.1, 0.2, 0.3}, {0, 0, 0});
    CHECK(enumerate_error_vectors(ModelClass::thresholds(), zeros).count() == 4);
    CHECK(as_strings(enumerate_error_vectors(ModelClass::thresholds(), zeros)) ==
          std::set<std::string>{"000", "001", "011", "111"});
    const auto one = enumerate_error_vectors(ModelClass::intervals(1), zeros);
    CHECK(one.count() == 7);
    CHECK_FALSE(one.contains(BitVector::from_string("101")));
    CHECK(enumerate_error_vectors(ModelClass::intervals(2), zeros).count() == 8);
  }

  TEST_CASE("worked ERM values") {
    CHECK(erm(ModelClass::intervals(1), kThree).empirical_loss == doctest::Approx(1.0 / 3));
    CHECK(erm(ModelClass::intervals(2), kThree).empirical_loss == 0.0);
    const LabeledSample zeros({0.4, 0.1, 0.9, 0.3}, {0, 0, 0, 0});
    for (int k = 1; k <= 3; ++k) {
      const auto r = erm(ModelClass::intervals(k), zeros);
      CHECK(r.errors == 0);
      CHECK(std::get<IntervalClassifier>(r.classifier).interval_count() == 0);
    }
  }

  TEST_CASE("error vector sets match the grid oracle") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const std::size_t n = 2 + seed % 9;
      const LabeledSample s = random_sample(n, seed, seed % 3 == 0);
      for (const ModelClass& c : {ModelClass::thresholds(), ModelClass::intervals(1), ModelClass::intervals(2),
                                  ModelClass::intervals(3)}) {
        const auto expected = oracle::error_patterns(c, s);
        const auto ev = enumerate_error_vectors(c, s);
        REQUIRE(as_strings(ev) == expected);
        const ClassOnSample view(c, s);
        CHECK(view.count() == doctest::Approx(static_cast<double>(expected.size())));
        CHECK(view.log_count() == doctest::Approx(std::log(static_cast<double>(expected.size()))));
        CHECK(view.predicted_count() >= view.count());
        CHECK(erm(c, s).errors == oracle::min_errors(expected));
        for (std::size_t t = 0; t <= n; ++t) {
          std::size_t within = 0;
          for (const auto& p : expected) within += std::count(p.begin(), p.end(), '1') <= static_cast<long>(t);
          CHECK(view.count(t) == doctest::Approx(static_cast<double>(within)));
        }
      }
    }
  }

  TEST_CASE("stumps in two dimensions match the grid oracle") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      CounterRng rng(seed + 100);
      const std::size_t n = 3 + seed % 7;
      std::vector<double> coords(2 * n);
      std::vector<std::uint8_t> ys(n);
      for (auto& v : coords) v = rng.uniform();
      for (auto& y : ys) y = rng.uniform() < 0.5;
      const LabeledSample s(coords, 2, ys);
      const auto c = ModelClass::stumps(2);
      const auto expected = oracle::error_patterns(c, s);
      CHECK(as_strings(enumerate_error_vectors(c, s)) == expected);
      const auto r = erm(c, s);
      CHECK(r.errors == oracle::min_errors(expected));
      CHECK(error_vector(r.classifier, s) == r.error_vector);
    }
  }

  TEST_CASE("nesting and ERM membership") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const LabeledSample s = random_sample(10, seed + 7, seed % 2 == 0);
      for (int k = 1; k <= 3; ++k) {
        const auto small = enumerate_error_vectors(ModelClass::intervals(k), s);
        const auto big = enumerate_error_vectors(ModelClass::intervals(k + 1), s);
        CHECK(small.is_subset_of(big));
        const auto r = erm(ModelClass::intervals(k), s);
        CHECK(small.contains(r.error_vector));
        CHECK(error_vector(r.classifier, s) == r.error_vector);
        CHECK(r.empirical_loss == doctest::Approx(static_cast<double>(r.errors) / 10));
      }
    }
  }

  TEST_CASE("representatives reproduce their error vectors") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const LabeledSample s = random_sample(9, seed + 50, seed % 2 == 1);
      for (const ModelClass& c : {ModelClass::thresholds(), ModelClass::intervals(2)}) {
        const ClassOnSample view(c, s);
        std::set<std::string> seen;
        view.for_each_representative([&](std::span<const Interval> regions, std::size_t errors) {
          const IntervalClassifier f(std::vector<Interval>(regions.begin(), regions.end()));
          const BitVector e = error_vector(Hypothesis(f), s);
          CHECK(e.count() == errors);
          seen.insert(e.to_string());
        });
        CHECK(seen == oracle::error_patterns(c, s));
        for (const auto& item : view.enumerate()) {
          CHECK(error_vector(item.representative, s) == item.error_vector);
          CHECK(item.errors == item.error_vector.count());
        }
      }
    }
  }

  TEST_CASE("max_gain matches a scan over the explicit set") {
    CounterRng rng(99);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const LabeledSample s = random_sample(11, seed + 300, seed % 4 == 0);
      for (int k = 1; k <= 3; ++k) {
        const ClassOnSample view(ModelClass::intervals(k), s);
        const auto ev = view.error_vectors();
        std::vector<std::int32_t> w(11);
        for (auto& x : w) x = static_cast<std::int32_t>(rng.below(7)) - 3;
        for (std::size_t t = 0; t <= 11; t += 2) {
          std::optional<std::int64_t> best;
          for (const auto& e : ev.vectors()) {
            if (e.count() > t) continue;
            std::int64_t g = 0;
            for (std::size_t i = 0; i < 11; ++i) g += e.test(i) ? w[i] : 0;
            best = best ? std::max(*best, g) : g;
          }
          CHECK(view.max_gain(w, t) == best);
        }
      }
    }
  }

  TEST_CASE("singleton class") {
    const IntervalClassifier f({{0.15, 0.25}});
    const auto c = ModelClass::singleton(f);
    const auto ev = enumerate_error_vectors(c, kThree);
    CHECK(ev.count() == 1);
    CHECK(ev.vectors().front().to_string() == "111");
    CHECK(erm(c, kThree).errors == 3);
  }

  TEST_CASE("worst-case shatter closed forms") {
    CHECK(worst_case_log_shatter(ModelClass::thresholds(), 3) == doctest::Approx(std::log(4.0)));
    CHECK(worst_case_log_shatter(ModelClass::intervals(1), 3) == doctest::Approx(std::log(7.0)));
    CHECK(worst_case_log_shatter(ModelClass::intervals(2), 1) == doctest::Approx(std::log(2.0)));
    CHECK(worst_case_log_shatter(ModelClass::intervals(1), 2000) == doctest::Approx(std::log(2001001.0)));
    CHECK(worst_case_log_shatter(ModelClass::intervals(1), 2000, ShatterBound::kVcCap) ==
          doctest::Approx(2 * std::log(2001.0)));
    CHECK(has_exact_worst_case_shatter(ModelClass::intervals(4)));
    CHECK_FALSE(has_exact_worst_case_shatter(ModelClass::stumps(2)));
    for (std::size_t m = 1; m <= 6; ++m) {
      CHECK(std::exp(worst_case_log_shatter(ModelClass::thresholds(), m)) ==
            doctest::Approx(oracle::worst_case_patterns(ModelClass::thresholds(), m)));
      for (int k = 1; k <= 2; ++k) {
        CHECK(std::exp(worst_case_log_shatter(ModelClass::intervals(k), m)) ==
              doctest::Approx(oracle::worst_case_patterns(ModelClass::intervals(k), m)));
      }
    }
  }

  TEST_CASE("enumeration guard") {
    CounterRng rng(5);
    std::vector<double> xs(400);
    std::vector<std::uint8_t> ys(400, 0);
    for (auto& x : xs) x = rng.uniform();
    const LabeledSample s(xs, ys);
    CHECK_THROWS_AS(enumerate_error_vectors(ModelClass::intervals(4), s), EnumerationInfeasible);
    // Counting and ERM do not need enumeration.
    const ClassOnSample view(ModelClass::intervals(4), s);
    CHECK(view.log_count() > std::log(kEnumerationGuard));
    CHECK(view.erm().errors == 0);
  }
}
