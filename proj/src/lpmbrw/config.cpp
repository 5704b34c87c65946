#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "error.hpp"
#include "model.hpp"

namespace lpmbrw {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::Parse, path + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& field(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(join(path, key), "missing");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

double number_at(const json& obj, const std::string& path, const char* key) {
  return number(field(obj, path, key), join(path, key));
}

std::uint64_t count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0)) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

unsigned small_count(const json& v, const std::string& path) {
  const std::uint64_t x = count(v, path);
  if (x > 1'000'000) fail(path, "value too large");
  return static_cast<unsigned>(x);
}

// A record with exactly one key naming the variant, e.g. {"gaussian": {...}}.
std::pair<std::string, const json*> tagged(const json& v, const std::string& path) {
  if (!v.is_object() || v.size() != 1) {
    fail(path, "expected an object with exactly one variant key");
  }
  return {v.begin().key(), &v.begin().value()};
}

// Runs a factory and relabels its argument errors with the field path.
template <class F>
auto build(const std::string& path, F&& make) {
  try {
    return make();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidArgument) throw;
    fail(path, e.what());
  }
}

OffspringLaw parse_offspring(const json& v) {
  const std::string path = "offspring";
  const auto [tag, body] = tagged(v, path);
  const std::string p = join(path, tag);
  if (tag == "deterministic") {
    const unsigned k = small_count(*body, p);
    return build(p, [&] { return OffspringLaw::deterministic(k); });
  }
  if (tag == "pmf") {
    // Either {"1": 0.5, "2": 0.5} or [[1, 0.5], [2, 0.5]].
    std::vector<OffspringLaw::Atom> atoms;
    if (body->is_object()) {
      for (const auto& [key, prob] : body->items()) {
        unsigned k = 0;
        try {
          std::size_t used = 0;
          const unsigned long parsed = std::stoul(key, &used);
          if (used != key.size() || parsed > 1'000'000) throw std::invalid_argument(key);
          k = static_cast<unsigned>(parsed);
        } catch (const std::exception&) {
          fail(join(p, key), "offspring count must be an integer");
        }
        atoms.emplace_back(k, number(prob, join(p, key)));
      }
    } else if (body->is_array()) {
      for (std::size_t i = 0; i < body->size(); ++i) {
        const auto& a = (*body)[i];
        const std::string ap = p + "[" + std::to_string(i) + "]";
        if (!a.is_array() || a.size() != 2) fail(ap, "expected [count, probability]");
        atoms.emplace_back(small_count(a[0], ap), number(a[1], ap));
      }
    } else {
      fail(p, "expected an object or an array of pairs");
    }
    return build(p, [&] { return OffspringLaw::from_pmf(std::move(atoms)); });
  }
  fail(p, "unknown offspring law (deterministic, pmf)");
}

DisplacementLaw parse_displacement(const json& v) {
  const std::string path = "displacement";
  const auto [tag, body] = tagged(v, path);
  const std::string p = join(path, tag);
  if (!body->is_object()) fail(p, "expected an object");
  if (tag == "gaussian") {
    const double m = body->contains("mean") ? number_at(*body, p, "mean") : 0.0;
    const double sd = body->contains("sd") ? number_at(*body, p, "sd") : 1.0;
    return build(p, [&] { return DisplacementLaw::gaussian(m, sd); });
  }
  if (tag == "point_mass") {
    const double a = number_at(*body, p, "a");
    return build(p, [&] { return DisplacementLaw::point_mass(a); });
  }
  if (tag == "two_point") {
    const double a = number_at(*body, p, "a");
    const double b = number_at(*body, p, "b");
    const double q = number_at(*body, p, "p");
    return build(p, [&] { return DisplacementLaw::two_point(a, b, q); });
  }
  if (tag == "finite_support") {
    const json& list = field(*body, p, "atoms");
    const std::string lp = join(p, "atoms");
    if (!list.is_array()) fail(lp, "expected an array of [value, probability]");
    std::vector<std::pair<double, double>> atoms;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string ap = lp + "[" + std::to_string(i) + "]";
      if (!list[i].is_array() || list[i].size() != 2) {
        fail(ap, "expected [value, probability]");
      }
      atoms.emplace_back(number(list[i][0], ap), number(list[i][1], ap));
    }
    return build(p, [&] { return DisplacementLaw::finite_support(std::move(atoms)); });
  }
  fail(p, "unknown displacement law (gaussian, point_mass, two_point, finite_support)");
}

PerturbationLaw parse_perturbation(const json& v) {
  const std::string path = "perturbation";
  const auto [tag, body] = tagged(v, path);
  const std::string p = join(path, tag);
  if (!body->is_object()) fail(p, "expected an object");
  if (tag == "pareto") {
    const double g = number_at(*body, p, "gamma");
    const double xm = body->contains("x_m") ? number_at(*body, p, "x_m") : 1.0;
    if (!(g > 0.0 && g < 1.0)) fail(join(p, "gamma"), "must lie in (0,1)");
    return build(p, [&] { return PerturbationLaw::pareto(g, xm); });
  }
  if (tag == "point_mass") {
    const double a = number_at(*body, p, "a");
    return build(p, [&] { return PerturbationLaw::point_mass(a); });
  }
  if (tag == "exponential") {
    const double r = body->contains("rate") ? number_at(*body, p, "rate") : 1.0;
    return build(p, [&] { return PerturbationLaw::exponential(r); });
  }
  if (tag == "lognormal") {
    const double m = number_at(*body, p, "m");
    const double s = number_at(*body, p, "s");
    return build(p, [&] { return PerturbationLaw::lognormal(m, s); });
  }
  fail(p, "unknown perturbation law (pareto, point_mass, exponential, lognormal)");
}

Regime parse_regime(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "below") return Regime::Below;
    if (s == "boundary") return Regime::Boundary;
    if (s == "above") return Regime::Above;
  }
  fail("regime", "expected one of below, boundary, above");
}

const std::set<std::string> kKnownKeys = {
    "offspring", "displacement", "perturbation", "theta",   "regime",
    "n_grid",    "replicas",     "seed",         "budget",  "n_mart",
    "ks_n",      "ks_replicas",  "mixing_replicas", "surrogate", "sampler",
    "force",     "name",         "description"};

}  // namespace

LoadedConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("<root>", "expected a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!kKnownKeys.contains(key)) fail(key, "unknown field");
  }
  LoadedConfig out{
      ExperimentConfig(BranchingSpec{parse_offspring(field(doc, "", "offspring")),
                                     parse_displacement(field(doc, "", "displacement"))},
                       parse_perturbation(field(doc, "", "perturbation"))),
      doc};
  ExperimentConfig& cfg = out.experiment;

  const json& th = field(doc, "", "theta");
  if (th.is_string()) {
    if (th.get<std::string>() != "boundary") {
      fail("theta", "expected a number or \"boundary\"");
    }
    const TailReport tail = tail_params(cfg.mu);
    if (!tail.regularly_varying()) {
      fail("theta", "\"boundary\" needs a regularly varying perturbation");
    }
    const auto t0 = theta0(cfg.spec);
    if (!t0) throw Error(ErrorKind::Model, "theta0 infinite: no boundary for this law");
    cfg.theta = *t0 / tail.gamma;
    out.theta_is_boundary = true;
  } else {
    cfg.theta = number(th, "theta");
    if (!(cfg.theta > 0.0 && std::isfinite(cfg.theta))) fail("theta", "must be positive");
  }

  if (doc.contains("regime")) cfg.expected_regime = parse_regime(doc["regime"]);
  if (doc.contains("n_grid")) {
    const json& g = doc["n_grid"];
    if (!g.is_array() || g.empty()) fail("n_grid", "expected a non-empty array");
    for (std::size_t i = 0; i < g.size(); ++i) {
      cfg.n_grid.push_back(small_count(g[i], "n_grid[" + std::to_string(i) + "]"));
    }
  } else {
    cfg.n_grid = {8, 12, 16, 20};
  }
  if (doc.contains("replicas")) cfg.replicas = count(doc["replicas"], "replicas");
  if (doc.contains("seed")) cfg.seed = count(doc["seed"], "seed");
  if (doc.contains("n_mart")) cfg.n_mart = small_count(doc["n_mart"], "n_mart");
  if (doc.contains("ks_n")) cfg.ks_n = small_count(doc["ks_n"], "ks_n");
  if (doc.contains("ks_replicas")) {
    cfg.ks_replicas = count(doc["ks_replicas"], "ks_replicas");
  }
  if (doc.contains("mixing_replicas")) {
    cfg.mixing_replicas = count(doc["mixing_replicas"], "mixing_replicas");
  }
  if (doc.contains("budget")) {
    const json& b = doc["budget"];
    if (!b.is_object()) fail("budget", "expected an object");
    for (const auto& [key, _] : b.items()) {
      if (key != "max_population" && key != "max_depth") {
        fail(join("budget", key), "unknown field");
      }
    }
    if (b.contains("max_population")) {
      cfg.budget.max_population = count(b["max_population"], "budget.max_population");
    }
    if (b.contains("max_depth")) {
      cfg.budget.max_depth = small_count(b["max_depth"], "budget.max_depth");
    }
  }
  if (doc.contains("surrogate")) {
    const json& s = doc["surrogate"];
    if (s == "normalized_additive") {
      cfg.surrogate = MixingSurrogate::NormalizedAdditive;
    } else if (s == "derivative") {
      cfg.surrogate = MixingSurrogate::DerivativeMartingale;
    } else {
      fail("surrogate", "expected normalized_additive or derivative");
    }
  }
  if (doc.contains("sampler")) {
    const json& s = doc["sampler"];
    if (s == "coupled") {
      cfg.sampler = RstarSampler::Coupled;
    } else if (s == "direct") {
      cfg.sampler = RstarSampler::Direct;
    } else {
      fail("sampler", "expected coupled or direct");
    }
  }
  if (doc.contains("force")) {
    if (!doc["force"].is_boolean()) fail("force", "expected true or false");
    cfg.force = doc["force"].get<bool>();
  }

  try {
    validate(cfg);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidArgument) throw;
    throw Error(ErrorKind::Parse, e.what());
  }
  return out;
}

LoadedConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("<root>", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

LoadedConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void override_seed(LoadedConfig& c, std::uint64_t seed) {
  c.experiment.seed = seed;
  c.doc["seed"] = seed;
}

void override_replicas(LoadedConfig& c, std::size_t replicas) {
  c.experiment.replicas = replicas;
  c.doc["replicas"] = replicas;
  try {
    validate(c.experiment);
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
}

void override_threads(LoadedConfig& c, unsigned threads) {
  c.experiment.threads = threads;
}

std::string config_hash(const json& doc) {
  // nlohmann::json stores objects in a sorted map, so dump() is canonical.
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

}  // namespace lpmbrw
