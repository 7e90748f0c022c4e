#include <cmath>
#include <vector>

#include "doctest.h"
#include "riscf/rng.hpp"

using riscf::CounterRng;
using riscf::StreamKind;

TEST_CASE("identical stream ids reproduce the same sequence") {
  CounterRng a(42, StreamKind::ris_user, 1, 2, 0);
  CounterRng b(42, StreamKind::ris_user, 1, 2, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams with different ids are decoupled") {
  CounterRng a(42, StreamKind::ris_user, 1, 2, 0);
  CounterRng b(42, StreamKind::ris_user, 1, 3, 0);
  CounterRng c(42, StreamKind::ris_eve, 1, 2, 0);
  CounterRng d(42, StreamKind::ris_user, 1, 2, 1);
  int equal_ab = 0, equal_ac = 0, equal_ad = 0;
  for (int i = 0; i < 64; ++i) {
    const auto va = a.next_u64();
    equal_ab += (va == b.next_u64());
    equal_ac += (va == c.next_u64());
    equal_ad += (va == d.next_u64());
  }
  CHECK(equal_ab == 0);
  CHECK(equal_ac == 0);
  CHECK(equal_ad == 0);
}

TEST_CASE("uniform01 stays inside (0, 1]") {
  CounterRng rng(7, StreamKind::generic);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
  }
}

TEST_CASE("normal draws have the right first two moments") {
  CounterRng rng(11, StreamKind::generic);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("complex normal draws have unit second moment") {
  CounterRng rng(13, StreamKind::generic);
  const int n = 100000;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) sum2 += std::norm(rng.cnormal());
  CHECK(std::abs(sum2 / n - 1.0) < 0.02);
}

TEST_CASE("uniform phases cover [0, 2pi)") {
  CounterRng rng(17, StreamKind::generic);
  double lo = 10.0, hi = -10.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = rng.uniform_phase();
    lo = std::min(lo, p);
    hi = std::max(hi, p);
    CHECK(p >= 0.0);
    CHECK(p < 2.0 * M_PI);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 2.0 * M_PI - 0.01);
}
