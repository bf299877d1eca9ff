#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "bidep/rng.hpp"

using namespace bidep;

TEST_CASE("same seed reproduces the stream, different seeds diverge") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next_u64();
    all_equal = all_equal && (va == b.next_u64());
    any_diff = any_diff || (va != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays in [0,1) with a plausible mean") {
  Rng rng(7);
  double sum = 0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 20000 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform_int covers the range") {
  Rng rng(11);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.uniform_int(5);
    REQUIRE(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
}

TEST_CASE("gaussian draws have standard-normal moments") {
  Rng rng(3);
  const int n = 50000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    sum += g;
    sumsq += g * g;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(0.0).epsilon(1).scale(0.02));
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("shuffle permutes deterministically per seed") {
  std::vector<int> v1(20), v2(20);
  for (int i = 0; i < 20; ++i) v1[i] = v2[i] = i;
  Rng a(5), b(5);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
  CHECK(std::is_permutation(v1.begin(), v1.end(), std::vector<int>{
      0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19}
      .begin()));

  std::vector<int> v3(20);
  for (int i = 0; i < 20; ++i) v3[i] = i;
  Rng c(6);
  c.shuffle(v3);
  CHECK(v3 != v1);  // a different seed produces a different order
}

TEST_CASE("shuffle visits many orders across seeds") {
  // With 4 elements there are 24 permutations; 200 seeds should hit most.
  std::set<std::vector<int>> orders;
  for (int seed = 0; seed < 200; ++seed) {
    std::vector<int> v{0, 1, 2, 3};
    Rng rng(static_cast<std::uint64_t>(seed));
    rng.shuffle(v);
    orders.insert(v);
  }
  CHECK(orders.size() >= 20);
}
