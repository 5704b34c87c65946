// Links only against the shared library.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "lpmbrw/lpmbrw.h"

namespace {

const char* kConfig = R"({
  "offspring": {"deterministic": 2},
  "displacement": {"gaussian": {"mean": 0, "sd": 1}},
  "perturbation": {"pareto": {"gamma": 0.5}},
  "theta": 1.0,
  "replicas": 200,
  "seed": 5
})";

}  // namespace

TEST_CASE("configuration lifecycle and errors") {
  CHECK(std::strlen(lpmbrw_version()) > 0);
  lpmbrw_config* cfg = nullptr;
  REQUIRE(lpmbrw_config_from_json(kConfig, &cfg) == LPMBRW_OK);
  CHECK(std::string(lpmbrw_last_error()).empty());
  CHECK(lpmbrw_config_set_seed(cfg, 6) == LPMBRW_OK);
  CHECK(lpmbrw_config_set_threads(cfg, 2) == LPMBRW_OK);
  CHECK(lpmbrw_config_set_replicas(cfg, 3) == LPMBRW_ERR_PARSE);
  CHECK(std::string(lpmbrw_last_error()).rfind("replicas:", 0) == 0);
  lpmbrw_config_free(cfg);

  lpmbrw_config* bad = nullptr;
  CHECK(lpmbrw_config_from_json("{", &bad) == LPMBRW_ERR_PARSE);
  CHECK(bad == nullptr);
  CHECK(lpmbrw_config_from_file("/nonexistent.json", &bad) == LPMBRW_ERR_IO);
  CHECK(lpmbrw_config_from_json(nullptr, &bad) == LPMBRW_ERR_INVALID_ARGUMENT);
}

TEST_CASE("analytic quantities") {
  lpmbrw_config* cfg = nullptr;
  REQUIRE(lpmbrw_config_from_json(kConfig, &cfg) == LPMBRW_OK);
  double v = 0.0;
  REQUIRE(lpmbrw_nu(cfg, 1.0, &v) == LPMBRW_OK);
  CHECK(v == doctest::Approx(std::log(2.0) + 0.5));
  int found = 0;
  REQUIRE(lpmbrw_theta0(cfg, &v, &found) == LPMBRW_OK);
  CHECK(found == 1);
  CHECK(v == doctest::Approx(std::sqrt(2.0 * std::log(2.0))).epsilon(1e-9));

  char* table = nullptr;
  char* json = nullptr;
  REQUIRE(lpmbrw_constants(cfg, &table, &json) == LPMBRW_OK);
  CHECK(std::string(table).find("regime") != std::string::npos);
  CHECK(std::string(json).find("\"c_inf\"") != std::string::npos);
  lpmbrw_string_free(table);
  lpmbrw_string_free(json);

  double re = 0, im = 0;
  REQUIRE(lpmbrw_stable_cf(0.5, 1.0, 1.0, &re, &im) == LPMBRW_OK);
  CHECK(re == doctest::Approx(std::exp(-1.0) * std::cos(1.0)));
  CHECK(lpmbrw_k_constant(1.5, 1.0, &v) == LPMBRW_ERR_INVALID_ARGUMENT);
  REQUIRE(lpmbrw_k_constant(0.5, 1.0, &v) == LPMBRW_OK);
  CHECK(v == doctest::Approx(std::sqrt(M_PI / 2.0)));

  const double xs[] = {1, 2, 3};
  double stat = 0, p = 0;
  REQUIRE(lpmbrw_ks_two_sample(xs, 3, xs, 3, &stat, &p) == LPMBRW_OK);
  CHECK(stat == 0.0);
  CHECK(p == 1.0);
  lpmbrw_config_free(cfg);
}

TEST_CASE("sampling is seeded and thread independent") {
  lpmbrw_config* cfg = nullptr;
  REQUIRE(lpmbrw_config_from_json(kConfig, &cfg) == LPMBRW_OK);
  std::vector<double> a(64), b(64), c(64);
  lpmbrw_config_set_threads(cfg, 1);
  REQUIRE(lpmbrw_sample_rstar(cfg, 6, a.size(), 0, a.data()) == LPMBRW_OK);
  lpmbrw_config_set_threads(cfg, 3);
  REQUIRE(lpmbrw_sample_rstar(cfg, 6, b.size(), 0, b.data()) == LPMBRW_OK);
  CHECK(a == b);
  lpmbrw_config_set_seed(cfg, 7);
  REQUIRE(lpmbrw_sample_rstar(cfg, 6, c.size(), 0, c.data()) == LPMBRW_OK);
  CHECK(a != c);
  for (double x : a) CHECK(std::isfinite(x));
  lpmbrw_config_free(cfg);
}

TEST_CASE("model errors") {
  lpmbrw_config* cfg = nullptr;
  REQUIRE(lpmbrw_config_from_json(R"({
    "offspring": {"deterministic": 2},
    "displacement": {"point_mass": {"a": 0}},
    "perturbation": {"pareto": {"gamma": 0.5}},
    "theta": 1.0})", &cfg) == LPMBRW_OK);
  int found = 1;
  double t0 = -1.0;
  REQUIRE(lpmbrw_theta0(cfg, &t0, &found) == LPMBRW_OK);
  CHECK(found == 0);
  CHECK(t0 == -1.0);
  char* table = nullptr;
  CHECK(lpmbrw_constants(cfg, &table, nullptr) == LPMBRW_ERR_MODEL);
  CHECK(table == nullptr);
  CHECK(std::string(lpmbrw_last_error()).find("theta0 infinite") != std::string::npos);
  lpmbrw_config_free(cfg);
}
