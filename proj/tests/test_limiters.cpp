#include <array>
#include <cmath>
#include <random>

#include "doctest.h"
#include "noflow/limiters.hpp"

using noflow::LimiterKind;
using noflow::mm2;
using noflow::mm3;
using noflow::slope;

namespace {

using Window = std::array<double, 5>;

// Plain comparison-based MinMod, written independently of the sign formula.
double minmod_ref(double a, double b) {
  if (a > 0 && b > 0) return a < b ? a : b;
  if (a < 0 && b < 0) return a > b ? a : b;
  return 0.0;
}

double uno_ref(const Window& u) {
  const double dp = u[3] - u[2], dm = u[2] - u[1];
  const double d2 = u[1] - 2 * u[2] + u[3];
  const double d2p = u[2] - 2 * u[3] + u[4];
  const double d2m = u[0] - 2 * u[1] + u[2];
  return minmod_ref(dp - 0.5 * minmod_ref(d2p, d2), dm + 0.5 * minmod_ref(d2, d2m));
}

Window random_window(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  std::uniform_int_distribution<int> zero(0, 9);
  Window w;
  for (double& x : w) x = zero(rng) == 0 ? 0.0 : d(rng);
  return w;
}

double l1_dist(const Window& a, const Window& b) {
  double s = 0;
  for (int i = 0; i < 5; ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace

TEST_CASE("mm2 examples") {
  for (double a : {-2.5, -1.0, 0.0, 0.3, 7.0}) CHECK(mm2(a, a) == a);
  CHECK(mm2(1.0, -1.0) == 0.0);
  CHECK(mm2(3.0, 2.0) == 2.0);
  CHECK(mm2(-3.0, -2.0) == -2.0);
  CHECK(mm2(0.0, 5.0) == 0.0);
  CHECK(mm2(5.0, 0.0) == 0.0);
}

TEST_CASE("mm3 examples") {
  for (double a : {-2.0, 0.0, 1.5}) CHECK(mm3(a, a, a) == a);
  CHECK(mm3(1.0, 2.0, -1.0) == 0.0);
  CHECK(mm3(4.0, 3.0, 2.0) == 2.0);
  CHECK(mm3(-4.0, -3.0, -2.0) == -2.0);
}

TEST_CASE("mm3 nested form agrees with the pairwise sign formula") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::uniform_int_distribution<int> zero(0, 7);
  for (int i = 0; i < 100000; ++i) {
    const double x = zero(rng) ? d(rng) : 0.0;
    const double y = zero(rng) ? d(rng) : 0.0;
    const double z = zero(rng) ? d(rng) : 0.0;
    REQUIRE(mm3(x, y, z) == noflow::mm3_literal(x, y, z));
    REQUIRE(mm3(x, y, z) == minmod_ref(minmod_ref(x, y), z));
  }
}

TEST_CASE("mm2 matches comparison minmod and is 1-Lipschitz in l1") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 100000; ++i) {
    const double x1 = d(rng), y1 = d(rng), x2 = d(rng), y2 = d(rng);
    REQUIRE(mm2(x1, y1) == minmod_ref(x1, y1));
    REQUIRE(std::abs(mm2(x1, y1) - mm2(x2, y2)) <= std::abs(x1 - x2) + std::abs(y1 - y2) + 1e-15);
    REQUIRE(std::abs(mm2(x1, y1)) <= std::min(std::abs(x1), std::abs(y1)));
  }
}

TEST_CASE("mm3 is 1-Lipschitz in l1") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 100000; ++i) {
    const double a[3] = {d(rng), d(rng), d(rng)};
    const double b[3] = {d(rng), d(rng), d(rng)};
    const double lhs = std::abs(mm3(a[0], a[1], a[2]) - mm3(b[0], b[1], b[2]));
    REQUIRE(lhs <= std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]) + 1e-15);
  }
}

TEST_CASE("slope of constant and linear windows") {
  const Window c{1.7, 1.7, 1.7, 1.7, 1.7};
  const Window lin{0, 1, 2, 3, 4};
  for (const LimiterKind& k : {LimiterKind::mm2(), LimiterKind::mm3(), LimiterKind::uno()}) {
    CHECK(slope(k, c) == 0.0);
    CHECK(slope(k, lin) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("UNO hand evaluations") {
  // d+ = 0 kills the slope regardless of the second differences.
  CHECK(slope(LimiterKind::uno(), Window{0, 0, 1, 1, 1}) == 0.0);
  // d+ = 3, d- = 2, second differences (1, -2, 1): delta1 = 0, delta2 = 1/2.
  CHECK(slope(LimiterKind::uno(), Window{0, 1, 3, 6, 7}) == 2.5);
  // second differences (1, 1, 1): delta1 = delta2 = 1/2, both arguments 2.5.
  CHECK(slope(LimiterKind::uno(), Window{0, 1, 3, 6, 10}) == 2.5);
}

TEST_CASE("MM3 hand evaluation") {
  // alpha d+ = 4.2, centred 2.5, alpha d- = 2.8
  CHECK(slope(LimiterKind::mm3(1.4), Window{0, 1, 3, 6, 7}) == doctest::Approx(2.5));
  CHECK(slope(LimiterKind::mm3(0.5), Window{0, 1, 3, 6, 7}) == doctest::Approx(1.0));
}

TEST_CASE("UNO matches the reference on random windows") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100000; ++i) {
    const Window w = random_window(rng);
    REQUIRE(slope(LimiterKind::uno(), w) == doctest::Approx(uno_ref(w)).epsilon(1e-14));
  }
}

TEST_CASE("slope maps obey their Lipschitz bounds") {
  std::mt19937_64 rng(8);
  const LimiterKind kinds[] = {LimiterKind::mm2(), LimiterKind::mm3(1.4), LimiterKind::mm3(2.0), LimiterKind::uno()};
  const double bounds[] = {2.0, 3.4, 4.0, 5.0};
  for (int k = 0; k < 4; ++k) CHECK(kinds[k].slope_lipschitz() == bounds[k]);
  for (int i = 0; i < 100000; ++i) {
    const Window a = random_window(rng);
    Window b = a;
    // Nearby and far-away partners both.
    std::uniform_real_distribution<double> d(i % 2 ? -0.1 : -3.0, i % 2 ? 0.1 : 3.0);
    for (double& x : b) x += d(rng);
    const double dist = l1_dist(a, b);
    for (int k = 0; k < 4; ++k) {
      REQUIRE(std::abs(slope(kinds[k], a) - slope(kinds[k], b)) <= bounds[k] * dist + 1e-13);
    }
  }
}

TEST_CASE("slopes are bounded by the largest adjacent difference") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100000; ++i) {
    const Window w = random_window(rng);
    double m = 0;
    for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(w[j + 1] - w[j]));
    for (const LimiterKind& k : {LimiterKind::mm2(), LimiterKind::mm3(), LimiterKind::uno()}) {
      REQUIRE(std::abs(slope(k, w)) <= m * (1 + 1e-14));
    }
  }
}

TEST_CASE("long double instantiation") {
  using W = std::array<long double, 5>;
  CHECK(noflow::slope(LimiterKind::uno(), W{0, 1, 3, 6, 10}) == 2.5L);
  CHECK(noflow::mm2(3.0L, 2.0L) == 2.0L);
}

TEST_CASE("limiter parsing and validation") {
  CHECK(noflow::parse_limiter("mm2").type == noflow::LimiterType::MM2);
  CHECK(noflow::parse_limiter("mm3", 1.2).alpha == 1.2);
  CHECK(noflow::parse_limiter("uno").type == noflow::LimiterType::UNO);
  CHECK_THROWS_AS(noflow::parse_limiter("superbee"), noflow::SolverError);
  CHECK_THROWS_AS(LimiterKind::mm3(0.0), noflow::SolverError);
  CHECK(LimiterKind::mm2().variation_bound() == 0.625);
}
