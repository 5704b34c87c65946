#include <doctest.h>

#include <string>

#include "lpmbrw/config.hpp"

using namespace lpmbrw;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "offspring": {"deterministic": 2},
    "displacement": {"gaussian": {}},
    "perturbation": {"pareto": {"gamma": 0.5}},
    "theta": 1.0,
    "replicas": 200
  })");
}

std::pair<ErrorKind, std::string> error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return {e.kind(), e.what()};
  }
  return {ErrorKind::Verification, ""};
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config(base());
  CHECK(c.experiment.theta == 1.0);
  CHECK(c.experiment.n_grid == std::vector<unsigned>{8, 12, 16, 20});
  CHECK(c.experiment.replicas == 200);
  CHECK(c.experiment.surrogate == MixingSurrogate::NormalizedAdditive);
  CHECK(c.experiment.sampler == RstarSampler::Coupled);
  CHECK(!c.experiment.expected_regime);
  CHECK(!c.theta_is_boundary);
}

TEST_CASE("boundary theta") {
  auto d = base();
  d["theta"] = "boundary";
  const auto c = parse_config(d);
  CHECK(c.theta_is_boundary);
  CHECK(c.experiment.theta == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-9));

  d["perturbation"] = {{"exponential", {{"rate", 1.0}}}};
  CHECK(error_of(d).first == ErrorKind::Parse);
  d["perturbation"] = {{"pareto", {{"gamma", 0.5}}}};
  d["displacement"] = {{"point_mass", {{"a", 0.0}}}};
  const auto [kind, msg] = error_of(d);
  CHECK(kind == ErrorKind::Model);
  CHECK(msg.find("theta0 infinite") != std::string::npos);
}

TEST_CASE("parse errors carry the field path") {
  auto d = base();
  d["perturbation"]["pareto"]["gamma"] = 1.5;
  CHECK(error_of(d) == std::pair{ErrorKind::Parse, std::string("perturbation.pareto.gamma: must lie in (0,1)")});

  d = base();
  d["bogus"] = 1;
  CHECK(error_of(d).second == "bogus: unknown field");

  d = base();
  d.erase("theta");
  CHECK(error_of(d).second == "theta: missing");

  d = base();
  d["replicas"] = 10;
  CHECK(error_of(d).first == ErrorKind::Parse);
  CHECK(error_of(d).second.rfind("replicas:", 0) == 0);

  d = base();
  d["displacement"] = {{"two_point", {{"a", 0.0}, {"b", 1.0}}}};
  CHECK(error_of(d).second == "displacement.two_point.p: missing");

  d = base();
  d["offspring"] = {{"pmf", {{"x", 1.0}}}};
  CHECK(error_of(d).second.rfind("offspring.pmf.x:", 0) == 0);

  d = base();
  d["budget"] = {{"max_nodes", 5}};
  CHECK(error_of(d).second == "budget.max_nodes: unknown field");

  d = base();
  d["surrogate"] = "other";
  CHECK(error_of(d).second.rfind("surrogate:", 0) == 0);

  CHECK_THROWS_AS(parse_config_text("{not json"), Error);
  CHECK_THROWS_AS(load_config_file("/nonexistent/cfg.json"), Error);
  try {
    load_config_file("/nonexistent/cfg.json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("variants") {
  auto d = base();
  d["offspring"] = {{"pmf", json::array({json::array({1, 0.25}), json::array({3, 0.75})})}};
  d["displacement"] = {{"finite_support", {{"atoms", json::array({json::array({-1.0, 0.5}), json::array({0.5, 0.5})})}}}};
  d["perturbation"] = {{"lognormal", {{"m", 0.0}, {"s", 1.0}}}};
  d["regime"] = "below";
  d["budget"] = {{"max_population", 1000000}, {"max_depth", 30}};
  d["sampler"] = "direct";
  d["surrogate"] = "derivative";
  d["force"] = true;
  const auto c = parse_config(d);
  CHECK(c.experiment.spec.offspring.mean() == doctest::Approx(2.5));
  CHECK(c.experiment.expected_regime == Regime::Below);
  CHECK(c.experiment.budget.max_depth == 30);
  CHECK(c.experiment.sampler == RstarSampler::Direct);
  CHECK(c.experiment.surrogate == MixingSurrogate::DerivativeMartingale);
  CHECK(c.experiment.force);
}

TEST_CASE("overrides and hash") {
  auto c = parse_config(base());
  const std::string h0 = config_hash(c.doc);
  CHECK(h0.size() == 16);
  override_threads(c, 3);
  CHECK(config_hash(c.doc) == h0);
  override_seed(c, 99);
  CHECK(c.experiment.seed == 99);
  CHECK(config_hash(c.doc) != h0);
  override_replicas(c, 500);
  CHECK(c.experiment.replicas == 500);
  CHECK_THROWS_AS(override_replicas(c, 5), Error);
  // Key order in the source text does not change the hash.
  const auto a = parse_config_text(R"({"theta": 1, "offspring": {"deterministic": 2},
    "displacement": {"gaussian": {}}, "perturbation": {"pareto": {"gamma": 0.5}}})");
  const auto b = parse_config_text(R"({"perturbation": {"pareto": {"gamma": 0.5}},
    "displacement": {"gaussian": {}}, "offspring": {"deterministic": 2}, "theta": 1})");
  CHECK(config_hash(a.doc) == config_hash(b.doc));
}
