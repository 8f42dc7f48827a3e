#include <atomic>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "locpen/bit_vector.hpp"
#include "locpen/parallel.hpp"
#include "locpen/rng.hpp"

using namespace locpen;

TEST_SUITE("core") {
  TEST_CASE("derived seeds are stable and spread out") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, Stream::kSample) != derive_seed(5, Stream::kSigns));

    CounterRng rng(42);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double u = rng.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      sum += u;
    }
    CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
  }

  TEST_CASE("bit vectors") {
    const BitVector a = BitVector::from_string("0110");
    CHECK(a.size() == 4);
    CHECK(a.count() == 2);
    CHECK(a.test(1));
    CHECK_FALSE(a.test(0));
    CHECK(a.to_string() == "0110");
    const BitVector b = BitVector::from_string("0011");
    CHECK((a ^ b).to_string() == "0101");
    CHECK(a != b);
    CHECK(BitVector::from_string("0110") == a);
    CHECK(a.hash() == BitVector::from_string("0110").hash());

    BitVector wide(130);
    wide.set(129);
    wide.set(64);
    CHECK(wide.count() == 2);
    wide.set(64, false);
    CHECK(wide.count() == 1);
    CHECK(wide.words().size() == 3);
    CHECK_THROWS(BitVector::from_string("01x"));
  }

  TEST_CASE("bit vector ordering is total and consistent") {
    std::vector<BitVector> v{BitVector::from_string("100"), BitVector::from_string("001"),
                             BitVector::from_string("000"), BitVector::from_string("010")};
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i - 1] < v[i]);
    CHECK(BitVector::from_string("00") < BitVector::from_string("000"));
  }

  TEST_CASE("parallel_for covers every index once and reports the first failure") {
    for (unsigned workers : {1u, 3u, 8u}) {
      std::vector<int> hits(257, 0);
      parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i] += 1; });
      for (int h : hits) CHECK(h == 1);
    }
    try {
      parallel_for(50, 4, [](std::size_t i) {
        if (i == 17 || i == 31) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
}
