#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lpmbrw/error.hpp"
#include "lpmbrw/model.hpp"

using namespace lpmbrw;

namespace {

BranchingSpec binary_gaussian() {
  return {OffspringLaw::deterministic(2), DisplacementLaw::gaussian(0.0, 1.0)};
}

// Composite Simpson rule for log E[e^{theta xi}], xi ~ N(m, s^2).
double gaussian_log_mgf_quadrature(double theta, double m, double s) {
  const double lo = m - 40.0 * s, hi = m + 40.0 * s;
  const int steps = 200000;
  const double h = (hi - lo) / steps;
  double acc = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double x = lo + i * h;
    const double z = (x - m) / s;
    const double f = std::exp(theta * x - 0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * f;
  }
  return std::log(acc * h / 3.0);
}

// Plain bisection on a sign change, written independently of the library.
template <class F>
double bisect(F f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("nu: closed forms and quadrature oracle") {
  const auto bg = binary_gaussian();
  CHECK(nu(bg, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(nu(bg, 1.0) == doctest::Approx(std::log(2.0) + gaussian_log_mgf_quadrature(1.0, 0.0, 1.0)).epsilon(1e-10));
  CHECK(nu(bg, 1.0) == doctest::Approx(std::log(2.0) + 0.5).epsilon(1e-14));

  const BranchingSpec pm{OffspringLaw::deterministic(3), DisplacementLaw::point_mass(0.5)};
  CHECK(nu(pm, 2.0) == doctest::Approx(std::log(3.0) + 1.0).epsilon(1e-14));

  const BranchingSpec shifted{OffspringLaw::deterministic(2), DisplacementLaw::gaussian(0.3, 1.7)};
  CHECK(nu(shifted, 0.8) ==
        doctest::Approx(std::log(2.0) + gaussian_log_mgf_quadrature(0.8, 0.3, 1.7)).epsilon(1e-9));
}

TEST_CASE("nu_prime: closed form, tilted mean and finite differences") {
  const auto bg = binary_gaussian();
  CHECK(nu_prime(bg, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

  const BranchingSpec pm{OffspringLaw::deterministic(3), DisplacementLaw::point_mass(-0.7)};
  for (double t : {0.1, 1.0, 5.0}) CHECK(nu_prime(pm, t) == doctest::Approx(-0.7));

  const BranchingSpec tp{OffspringLaw::deterministic(2), DisplacementLaw::two_point(1.0, -1.0, 0.3)};
  const double e = std::exp(1.0);
  const double direct = (0.3 * e - 0.7 / e) / (0.3 * e + 0.7 / e);
  CHECK(nu_prime(tp, 1.0) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(direct == doctest::Approx(0.5200).epsilon(1e-3));

  const DisplacementLaw laws[] = {
      DisplacementLaw::gaussian(0.2, 0.9), DisplacementLaw::two_point(1.0, -1.0, 0.3),
      DisplacementLaw::finite_support({{-1.0, 0.2}, {0.5, 0.5}, {2.0, 0.3}}),
      DisplacementLaw::point_mass(0.4)};
  const double h = 1e-5;
  for (const auto& d : laws) {
    const BranchingSpec s{OffspringLaw::from_pmf({{1, 0.25}, {3, 0.75}}), d};
    for (double t = -2.0; t <= 4.0; t += 0.25) {
      const double fd = (nu(s, t + h) - nu(s, t - h)) / (2.0 * h);
      CHECK(std::abs(nu_prime(s, t) - fd) <= 1e-6);
      const double fd2 = (nu_prime(s, t + h) - nu_prime(s, t - h)) / (2.0 * h);
      CHECK(std::abs(nu_second(s, t) - fd2) <= 1e-5);
    }
  }
}

TEST_CASE("nu is convex and h is nondecreasing on a grid") {
  const BranchingSpec specs[] = {
      binary_gaussian(),
      {OffspringLaw::deterministic(2), DisplacementLaw::two_point(1.0, -1.0, 0.3)},
      {OffspringLaw::from_pmf({{1, 0.5}, {4, 0.5}}),
       DisplacementLaw::finite_support({{-2.0, 0.1}, {0.0, 0.6}, {1.5, 0.3}})}};
  for (const auto& s : specs) {
    double prev_h = -INFINITY;
    for (double a = 0.05; a <= 6.0; a += 0.05) {
      for (double b = a + 0.1; b <= 6.0; b += 0.7) {
        CHECK(nu(s, 0.5 * (a + b)) <= 0.5 * (nu(s, a) + nu(s, b)) + 1e-12);
      }
      const double h = a * nu_prime(s, a) - nu(s, a);
      CHECK(h >= prev_h - 1e-12);
      prev_h = h;
    }
  }
}

TEST_CASE("theta0: binary gaussian, point mass, two point") {
  const auto bg = binary_gaussian();
  const auto t0 = theta0(bg);
  REQUIRE(t0.has_value());
  CHECK(std::abs(*t0 - std::sqrt(2.0 * std::log(2.0))) < 1e-9);
  const double oracle = bisect([](double t) { return 0.5 * t * t - std::log(2.0); }, 0.0, 10.0);
  CHECK(std::abs(*t0 - oracle) < 1e-9);
  CHECK(*t0 == doctest::Approx(1.177410).epsilon(1e-6));

  const BranchingSpec pm{OffspringLaw::deterministic(2), DisplacementLaw::point_mass(0.3)};
  CHECK_FALSE(theta0(pm).has_value());

  const BranchingSpec tp{OffspringLaw::deterministic(2), DisplacementLaw::two_point(1.0, -1.0, 0.3)};
  const auto h = [](double t) {
    const double a = 0.3 * std::exp(t), b = 0.7 * std::exp(-t);
    return t * (a - b) / (a + b) - std::log(2.0 * (a + b));
  };
  CHECK(h(1.35) < 0.0);
  CHECK(h(1.36) > 0.0);
  const auto t_tp = theta0(tp);
  REQUIRE(t_tp.has_value());
  CHECK(std::abs(*t_tp - bisect(h, 1.0, 2.0)) < 1e-9);
  CHECK(*t_tp == doctest::Approx(1.351).epsilon(1e-3));
}

TEST_CASE("theta0 root certificate and argmin of nu/theta") {
  const BranchingSpec specs[] = {
      binary_gaussian(),
      {OffspringLaw::deterministic(2), DisplacementLaw::two_point(1.0, -1.0, 0.3)},
      {OffspringLaw::from_pmf({{1, 0.3}, {2, 0.3}, {5, 0.4}}), DisplacementLaw::gaussian(-0.4, 0.6)}};
  for (const auto& s : specs) {
    const double tol = 1e-10;
    const auto t0 = theta0(s, tol);
    REQUIRE(t0.has_value());
    CHECK(std::abs(*t0 * nu_prime(s, *t0) - nu(s, *t0)) <= tol);
    const double best = nu(s, *t0) / *t0;
    for (double t = 0.05; t < 20.0; t += 0.01) CHECK(best <= nu(s, t) / t + tol);
  }
}

TEST_CASE("sigma^2 and c_inf") {
  const auto bg = binary_gaussian();
  const auto sc = sigma_sq_cinf(bg);
  CHECK(std::abs(sc.sigma_sq - 2.0 * std::log(2.0)) < 1e-9);
  CHECK(std::abs(sc.c_inf - 1.0 / std::sqrt(std::numbers::pi * std::log(2.0))) < 1e-9);
  CHECK(sc.c_inf == doctest::Approx(0.67766).epsilon(1e-5));
  CHECK(sc.c_inf == std::sqrt(2.0 / (std::numbers::pi * sc.sigma_sq)));

  // Monte Carlo oracle for E[sum (theta0 xi - nu)^2 e^{theta0 xi - nu}].
  const double t0 = std::sqrt(2.0 * std::log(2.0));
  const double nu0 = nu(bg, t0);
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> nd;
  const int draws = 1'000'000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double u = t0 * nd(gen) - nu0;
    const double v = 2.0 * u * u * std::exp(u);
    s += v;
    s2 += v * v;
  }
  const double m = s / draws;
  const double se = std::sqrt((s2 / draws - m * m) / draws);
  CHECK(std::abs(m - sc.sigma_sq) < 4.0 * se);

  const BranchingSpec pm{OffspringLaw::deterministic(2), DisplacementLaw::point_mass(0.0)};
  try {
    sigma_sq_cinf(pm);
    FAIL("expected a model error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Model);
  }
}

TEST_CASE("cumulant report slope is the minimum of nu/theta") {
  const auto cr = cumulants(binary_gaussian());
  REQUIRE(cr.theta0.has_value());
  CHECK(cr.slope == doctest::Approx(std::sqrt(2.0 * std::log(2.0))).epsilon(1e-10));
  for (double t = 0.1; t < 10.0; t += 0.1) CHECK(cr.slope <= nu(binary_gaussian(), t) / t + 1e-10);
}

TEST_CASE("audit examples") {
  const auto bg = binary_gaussian();
  const auto rep = audit(bg, PerturbationLaw::pareto(0.5, 1.0), 3.0);
  for (const char* f : {flag::kH, flag::kL1, flag::kL2, flag::kNonLattice, flag::kSurvival,
                        flag::kMuPositiveSupport}) {
    CHECK_MESSAGE(rep.get(f).state == FlagState::Holds, f);
  }
  // Every flag is reported.
  CHECK(rep.flags.size() == 9);

  const BranchingSpec tp{OffspringLaw::deterministic(2), DisplacementLaw::two_point(1.0, -1.0, 0.5)};
  CHECK(audit(tp, PerturbationLaw::point_mass(1.0), 1.0).get(flag::kNonLattice).state ==
        FlagState::Fails);

  CHECK(audit(bg, PerturbationLaw::point_mass(1.0), 2.0).get(flag::kMuNonDegenerate).state ==
        FlagState::Fails);
  CHECK(audit(bg, PerturbationLaw::exponential(1.0), 2.0).get(flag::kH).state == FlagState::Fails);
  CHECK_THROWS(rep.get("no_such_flag"));
}

TEST_CASE("lattice detection") {
  const auto state = [](DisplacementLaw d) {
    return audit({OffspringLaw::deterministic(2), std::move(d)}, PerturbationLaw::pareto(0.5, 1.0), 1.0)
        .get(flag::kNonLattice)
        .state;
  };
  CHECK(state(DisplacementLaw::finite_support({{0.5, 0.5}, {1.25, 0.5}})) == FlagState::Fails);
  CHECK(state(DisplacementLaw::point_mass(0.7)) == FlagState::Fails);
  CHECK(state(DisplacementLaw::two_point(1.0, std::sqrt(2.0), 0.5)) == FlagState::Unknown);
  CHECK(state(DisplacementLaw::gaussian(0.0, 2.0)) == FlagState::Holds);
}

TEST_CASE("classify_regime examples") {
  const auto bg = binary_gaussian();
  const auto mu = PerturbationLaw::pareto(0.5, 1.0);
  const double t0 = std::sqrt(2.0 * std::log(2.0));

  const auto below = classify_regime(bg, mu, 1.0);
  CHECK(below.regime == Regime::Below);
  CHECK(below.alpha == doctest::Approx(nu(bg, 0.5) / 0.5).epsilon(1e-14));
  CHECK(below.alpha == doctest::Approx(2.0 * std::log(2.0) + 0.25).epsilon(1e-12));
  CHECK(below.c_log == 0.0);

  const auto boundary = classify_regime(bg, mu, t0 / 0.5);
  CHECK(boundary.regime == Regime::Boundary);
  CHECK(boundary.c_log == doctest::Approx(-1.0 / (2.0 * t0)).epsilon(1e-9));
  CHECK(boundary.c_log == doctest::Approx(-0.4247).epsilon(1e-3));
  CHECK(boundary.alpha == doctest::Approx(t0).epsilon(1e-9));
  // Within the relative tolerance still counts as the boundary.
  CHECK(classify_regime(bg, mu, 2.0 * t0 * (1.0 + 1e-11)).regime == Regime::Boundary);

  const auto above = classify_regime(bg, mu, 4.0);
  CHECK(above.regime == Regime::Above);
  CHECK(above.c_log == doctest::Approx(-1.5 / t0).epsilon(1e-9));
  CHECK(above.c_log == doctest::Approx(-1.2740).epsilon(1e-4));
  CHECK(above.vartheta == doctest::Approx(0.2944).epsilon(1e-3));

  // Finite moments: above iff theta > theta0, otherwise not classifiable.
  const auto ln = PerturbationLaw::lognormal(0.0, 1.0);
  CHECK(classify_regime(bg, ln, 2.0).regime == Regime::Above);
  CHECK_THROWS_AS(classify_regime(bg, ln, 1.0), Error);

  const BranchingSpec pm{OffspringLaw::deterministic(2), DisplacementLaw::point_mass(0.0)};
  try {
    classify_regime(pm, mu, 1.0);
    FAIL("expected a model error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Model);
    CHECK(std::string(e.what()).find("theta0 infinite") != std::string::npos);
  }
}

TEST_CASE("regime classifier partitions theta") {
  const auto bg = binary_gaussian();
  const auto mu = PerturbationLaw::pareto(0.7, 2.0);
  const double t0 = *theta0(bg);
  Regime prev = Regime::Below;
  for (double t = 0.05; t < 6.0; t += 0.01) {
    const auto r = classify_regime(bg, mu, t).regime;
    CHECK(static_cast<int>(r) >= static_cast<int>(prev));
    CHECK((r == Regime::Below) == (0.7 * t < t0));
    prev = r;
  }
}

TEST_CASE("offspring and displacement validation") {
  CHECK_THROWS(OffspringLaw::deterministic(0));
  CHECK_THROWS(OffspringLaw::from_pmf({{1, 0.5}, {2, 0.4}}));
  CHECK_THROWS(OffspringLaw::from_pmf({{0, 0.5}, {2, 0.5}}));
  CHECK_NOTHROW(OffspringLaw::from_pmf({{1, 0.5}, {2, 0.5 + 1e-13}}));
  CHECK_THROWS(DisplacementLaw::gaussian(0.0, 0.0));
  CHECK_THROWS(DisplacementLaw::two_point(0.0, 1.0, 1.5));
  CHECK(OffspringLaw::from_pmf({{1, 0.25}, {3, 0.75}}).mean() == doctest::Approx(2.5));
}
