#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "frz/rng.hpp"

TEST_CASE("splitmix64 matches the published seed-0 vector") {
  frz::rng r(0);
  CHECK(r.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(r.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(r.next_u64() == 0x06c45d188009454fULL);
  CHECK(r.next_u64() == 0xf88bb8a8724c81ecULL);
}

TEST_CASE("splitmix64 reference vectors for other seeds") {
  frz::rng a(42);
  CHECK(a.next_u64() == 0xbdd732262feb6e95ULL);
  CHECK(a.next_u64() == 0x28efe333b266f103ULL);
  CHECK(a.next_u64() == 0x47526757130f9f52ULL);
  CHECK(a.next_u64() == 0x581ce1ff0e4ae394ULL);

  frz::rng b(0x123456789ABCDEFULL);
  CHECK(b.next_u64() == 0x157a3807a48faa9dULL);
  CHECK(b.next_u64() == 0xd573529b34a1d093ULL);
  CHECK(b.next_u64() == 0x2f90b72e996dccbeULL);
  CHECK(b.next_u64() == 0xa2d419334c4667ecULL);
}

TEST_CASE("counter form agrees with the sequential generator") {
  frz::rng r(12345);
  for (std::uint64_t i = 0; i < 100; ++i)
    CHECK(r.next_u64() == frz::splitmix64_at(12345, i));
}

TEST_CASE("replica seeds are the finalizer of seed xor replica") {
  CHECK(frz::replica_seed(42, 0) == 0xa759ea27d4727622ULL);
  CHECK(frz::replica_seed(42, 1) == 0x4f0a61d9c798d8caULL);
  CHECK(frz::replica_seed(42, 7) == 0xbdbfb556329aee83ULL);
  CHECK(frz::replica_seed(1234567, 3) == 0x2e740092499fce9cULL);
}

TEST_CASE("uniform doubles stay inside their half-open ranges") {
  frz::rng r(7);
  double mn = 1.0, mx = 0.0;
  for (int i = 0; i < 200000; ++i) {
    const double u = r.next_u01();
    mn = std::min(mn, u);
    mx = std::max(mx, u);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(mn < 0.01);
  CHECK(mx > 0.99);

  frz::rng r2(8);
  for (int i = 0; i < 200000; ++i) {
    const double u = r2.next_u01_open0();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("bounded draw is in range and roughly uniform") {
  frz::rng r(99);
  int counts[10] = {0};
  for (int i = 0; i < 100000; ++i) {
    const std::uint64_t v = r.next_below(10);
    REQUIRE(v < 10);
    ++counts[v];
  }
  for (int c : counts) {
    CHECK(c > 9500);
    CHECK(c < 10500);
  }
}

TEST_CASE("exponential draws have the right mean and are finite") {
  frz::rng r(5);
  double sum = 0.0;
  for (int i = 0; i < 400000; ++i) {
    const double e = r.next_exponential(2.0);
    REQUIRE(std::isfinite(e));
    REQUIRE(e >= 0.0);
    sum += e;
  }
  CHECK(std::abs(sum / 400000 - 0.5) < 0.005);
}
