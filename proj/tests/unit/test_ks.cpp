#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpmbrw/ks.hpp"
#include "lpmbrw/random.hpp"

using namespace lpmbrw;

TEST_CASE("kolmogorov survival function") {
  CHECK(kolmogorov_sf(0.0) == 1.0);
  // Reference values of the Kolmogorov distribution.
  CHECK(kolmogorov_sf(1.3580986) == doctest::Approx(0.05).epsilon(1e-5));
  CHECK(kolmogorov_sf(1.6276236) == doctest::Approx(0.01).epsilon(1e-5));
  CHECK(kolmogorov_sf(0.8275735) == doctest::Approx(0.5).epsilon(1e-5));
  // The two series agree where they switch.
  const double lo = kolmogorov_sf(1.18 - 1e-9), hi = kolmogorov_sf(1.18 + 1e-9);
  CHECK(std::abs(lo - hi) < 1e-8);
  for (double l = 0.1; l < 3.0; l += 0.05) CHECK(kolmogorov_sf(l) >= kolmogorov_sf(l + 0.05));
}

TEST_CASE("identical samples") {
  const std::vector<double> xs{3.0, 1.0, 2.0, 2.0, 5.0};
  const auto r = ks_two_sample(xs, xs);
  CHECK(r.stat == 0.0);
  CHECK(r.p == 1.0);
}

TEST_CASE("statistic on small samples") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{4.0, 5.0, 6.0, 7.0};
  CHECK(ks_two_sample(a, b).stat == 1.0);
  const std::vector<double> c{1.0, 3.0};
  const std::vector<double> d{2.0, 4.0};
  CHECK(ks_two_sample(c, d).stat == doctest::Approx(0.5));
  // Ties across samples do not open a gap.
  const std::vector<double> e{1.0, 2.0};
  const std::vector<double> f{1.0, 2.0, 2.0, 1.0};
  CHECK(ks_two_sample(e, f).stat == 0.0);
  // Shifting b by s equals shifting a by -s.
  const std::vector<double> g{0.1, 0.5, 0.9, 1.4};
  const std::vector<double> h{0.3, 0.4, 1.0, 1.2, 2.0};
  CHECK(ks_statistic_sorted(g, h, 0.25) == doctest::Approx(ks_statistic_sorted(
                                               std::vector<double>{-0.15, 0.25, 0.65, 1.15}, h, 0.0)));
}

TEST_CASE("gumbel versus minus log exponential") {
  Stream a(1), b(2);
  std::vector<double> xs(10'000), ys(10'000);
  // Standard Gumbel by inversion: -log(-log U).
  for (auto& x : xs) x = -std::log(-std::log(a.uniform()));
  for (auto& y : ys) y = -std::log(b.exponential());
  CHECK(ks_two_sample(xs, ys).p > 0.01);
}

TEST_CASE("power against a unit shift") {
  Stream a(3), b(4);
  std::vector<double> xs(10'000), ys(10'000);
  for (auto& x : xs) x = a.normal();
  for (auto& y : ys) y = b.normal() + 1.0;
  CHECK(ks_two_sample(xs, ys).p < 1e-6);
}

TEST_CASE("null p-values exceed 0.01 in at least 95 of 100 repetitions") {
  int ok = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    Stream a(r, 0, StreamTag::Limit), b(r, 1, StreamTag::Limit);
    std::vector<double> xs(2000), ys(2000);
    for (auto& x : xs) x = a.exponential();
    for (auto& y : ys) y = b.exponential();
    ok += ks_two_sample(xs, ys).p > 0.01;
  }
  CHECK(ok >= 95);
}
