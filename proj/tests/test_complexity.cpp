#include <cmath>

#include "doctest.h"
#include "locpen/complexity.hpp"
#include "locpen/rng.hpp"
#include "oracles.hpp"

using namespace locpen;

namespace {

ErrorVectorSet parse_set(std::size_t n, std::initializer_list<const char*> bits) {
  std::vector<BitVector> v;
  for (const char* b : bits) v.push_back(BitVector::from_string(b));
  return ErrorVectorSet(n, v);
}

ErrorVectorSet all_vectors(std::size_t n) {
  std::vector<BitVector> v;
  for (std::uint64_t code = 0; code < (1ULL << n); ++code) {
    BitVector b(n);
    for (std::size_t i = 0; i < n; ++i) b.set(i, (code >> i) & 1);
    v.push_back(b);
  }
  return ErrorVectorSet(n, v);
}

LabeledSample random_sample(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> xs(n);
  std::vector<std::uint8_t> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = rng.uniform();
    ys[i] = rng.uniform() < 0.3 ? 1 : 0;
  }
  return LabeledSample(xs, ys);
}

}  // namespace

TEST_SUITE("complexity") {
  TEST_CASE("worked Rademacher averages") {
    CHECK(rademacher_exact(parse_set(3, {"000"})).value == 0.0);
    CHECK(rademacher_exact(all_vectors(3)).value == doctest::Approx(0.5));
    CHECK(rademacher_exact(parse_set(3, {"000", "111"})).value == doctest::Approx(0.25));
    const auto e = rademacher_exact(all_vectors(3));
    CHECK(e.mode == RademacherMode::kExact);
    CHECK(e.std_error == 0.0);
    CHECK(to_string(RademacherMode::kMonteCarlo) == "monte_carlo");
    CHECK_THROWS(rademacher_exact(ErrorVectorSet(21, {BitVector(21)})));
  }

  TEST_CASE("Monte Carlo estimates") {
    const auto zero = rademacher_mc(parse_set(3, {"000"}), 1000, 4);
    CHECK(zero.value == 0.0);
    CHECK(zero.std_error == 0.0);
    CHECK(zero.draws == 1000);
    const auto mc = rademacher_mc(all_vectors(3), 100000, 17);
    CHECK(std::abs(mc.value - 0.5) <= 4 * mc.std_error);
    CHECK(mc.std_error > 0.0);
    const auto again = rademacher_mc(all_vectors(3), 100000, 17);
    CHECK(again.value == mc.value);
    CHECK(again.std_error == mc.std_error);
  }

  TEST_CASE("class routes agree with the explicit set and the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const std::size_t n = 4 + seed % 7;
      const LabeledSample s = random_sample(n, seed + 1000);
      for (int k = 1; k <= 2; ++k) {
        const ClassOnSample view(ModelClass::intervals(k), s);
        const auto ev = view.error_vectors();
        const double expected = oracle::rademacher(oracle::error_patterns(ModelClass::intervals(k), s), n);
        CHECK(rademacher_exact(ev).value == doctest::Approx(expected).epsilon(1e-12));
        CHECK(rademacher_exact(view, n).value == doctest::Approx(expected).epsilon(1e-12));
        CHECK(rademacher_exact_dp(view, n).value == doctest::Approx(expected).epsilon(1e-12));
        // Monte Carlo sees the same signs on both routes.
        const auto a = rademacher_mc(ev, 300, seed);
        const auto b = rademacher_mc(view, n, 300, seed);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
        // Restricting the error count never increases the average.
        double prev = -1.0;
        if (view.erm().errors > 0) CHECK_THROWS(rademacher_exact_dp(view, view.erm().errors - 1));
        for (std::size_t t = view.erm().errors; t <= n; ++t) {
          const double v = rademacher_exact_dp(view, t).value;
          CHECK(v >= prev - 1e-15);
          CHECK(v <= 0.5 + 1e-15);
          prev = v;
        }
      }
    }
  }

  TEST_CASE("rademacher dispatches on the exact cap") {
    const ClassOnSample wide(ModelClass::intervals(1), random_sample(25, 3));
    CHECK(rademacher(wide, 25, 200, 1).mode == RademacherMode::kMonteCarlo);
    CHECK(rademacher(wide, 25, 200, 1, 30).mode == RademacherMode::kMonteCarlo);
    const ClassOnSample narrow(ModelClass::intervals(1), random_sample(12, 3));
    CHECK(rademacher(narrow, 12, 200, 1).mode == RademacherMode::kExact);
    CHECK(rademacher(narrow, 12, 200, 1, 10).mode == RademacherMode::kMonteCarlo);
  }

  TEST_CASE("monotone under inclusion") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const LabeledSample s = random_sample(8, seed + 77);
      const double r1 = rademacher_exact(enumerate_error_vectors(ModelClass::intervals(1), s)).value;
      const double r2 = rademacher_exact(enumerate_error_vectors(ModelClass::intervals(2), s)).value;
      CHECK(r1 <= r2 + 1e-15);
      CHECK(r1 >= 0.0);
    }
  }

  TEST_CASE("shatter counts") {
    const LabeledSample s({0.1, 0.2, 0.3}, {0, 1, 0});
    CHECK(random_shatter(ModelClass::thresholds(), s) == 4);
    CHECK(random_shatter(ModelClass::intervals(1), s) == 7);
    CHECK(random_shatter(ModelClass::intervals(2), s) == 8);
    CHECK(log_random_shatter(ModelClass::intervals(1), s) == doctest::Approx(std::log(7.0)));
  }

  TEST_CASE("closed-form quantities") {
    CHECK(u_hat(1, 1, 1) == 0.0);
    CHECK(u_hat(50, 1000, 2) == doctest::Approx(1.344899).epsilon(1e-6));
    CHECK(u_hat(201, 100000, 1) == doctest::Approx(0.019973).epsilon(1e-4));
    CHECK(u_hat_from_log(std::log(50.0), 1000, 2) == doctest::Approx(u_hat(50, 1000, 2)));
    CHECK(epsilon_k(1, 1) == 0.0);
    CHECK(epsilon_k(100, 3) == doctest::Approx(0.1140757).epsilon(1e-6));
    CHECK(u_bar(0.0, 1, 1) == 0.0);
    CHECK(u_bar(2.0, 100, 2) == doctest::Approx(16 * (16 + 17 * std::log(200.0)) / 100));
    CHECK(u_population(2.0, 100, 2) == doctest::Approx(8 * (4 + 2 * std::log(200.0)) / 100));
  }

  TEST_CASE("profiles") {
    const auto p = ConstantProfile::paper();
    CHECK(p.is_paper());
    const auto e = ConstantProfile::exploratory(0.05);
    CHECK_FALSE(e.is_paper());
    CHECK(e.u_scale == doctest::Approx(0.8));
    CHECK(e.local_u == doctest::Approx(0.75));
    CHECK(e.local_emp == 1.0);
    CHECK(e.pen_rademacher == 1.0);
    CHECK(e.pen_log == doctest::Approx(1.0));
    CHECK(e.pen_cross == doctest::Approx(0.1));
    CHECK_THROWS(ConstantProfile::exploratory(0.0));
  }

  TEST_CASE("max_errors_for handles exact multiples") {
    CHECK(max_errors_for(0.3, 10) == 3);
    CHECK(max_errors_for(0.29, 10) == 2);
    CHECK(max_errors_for(0.0, 10) == 0);
    CHECK(max_errors_for(1.5, 10) == 10);
    CHECK(max_errors_for(0.15, 3) == 0);
  }

  TEST_CASE("localized subclass") {
    const auto full = all_vectors(3);
    const auto r = localized_subclass(full, 0.0, 0.01);
    CHECK(r.threshold == doctest::Approx(0.15));
    REQUIRE(r.subset.has_value());
    CHECK(r.subset->count() == 1);
    CHECK(r.subset_count == 1.0);
    CHECK(localized_subclass(full, 0.0, 1.0 / 15).subset->count() == 8);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const LabeledSample s = random_sample(10, seed + 500);
      const ClassOnSample view(ModelClass::intervals(2), s);
      const auto ev = view.error_vectors();
      const auto fit = view.erm();
      const auto profile = ConstantProfile::exploratory(0.02);
      const double uh = u_hat_from_log(view.log_count(), 10, 2, profile);
      const auto explicit_r = localized_subclass(ev, fit.empirical_loss, uh, profile);
      const auto implicit_r = localized_subclass(view, fit.empirical_loss, uh, profile);
      CHECK(explicit_r.max_errors == implicit_r.max_errors);
      CHECK(explicit_r.subset_count == implicit_r.subset_count);
      CHECK(explicit_r.subset->contains(fit.error_vector));
      CHECK(explicit_r.subset->is_subset_of(ev));
      CHECK(rademacher_exact(*explicit_r.subset).value ==
            doctest::Approx(rademacher_exact_dp(view, implicit_r.max_errors).value).epsilon(1e-12));
    }
  }

  TEST_CASE("draw_signs masks trailing bits") {
    std::vector<std::uint64_t> w;
    draw_signs(1, 0, 70, w);
    REQUIRE(w.size() == 2);
    CHECK((w[1] >> 6) == 0);
    std::vector<std::uint64_t> w2;
    draw_signs(1, 0, 70, w2);
    CHECK(w == w2);
    draw_signs(1, 1, 70, w2);
    CHECK(w != w2);
  }
}
