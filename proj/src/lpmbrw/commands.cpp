#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"

#ifndef LPMBRW_VERSION
#define LPMBRW_VERSION "0.0.0"
#endif

namespace lpmbrw {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version() noexcept { return LPMBRW_VERSION; }

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fixed(double x, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

void row(std::ostringstream& os, const std::string& key, const std::string& value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%-22s", key.c_str());
  os << buf << value << '\n';
}

const char* tail_kind(const TailReport& t) {
  return t.regularly_varying() ? "regularly_varying" : "all_moments_finite";
}

json regime_json(const RegimeSpec& r) {
  return {{"regime", to_string(r.regime)}, {"alpha", r.alpha}, {"c_log", r.c_log},
          {"theta", r.theta},              {"theta0", r.theta0}, {"vartheta", r.vartheta},
          {"gamma", r.gamma}};
}

json audit_json(const AssumptionReport& a) {
  json out = json::array();
  for (const auto& f : a.flags) {
    out.push_back({{"name", f.name}, {"state", to_string(f.state)}, {"reason", f.reason}});
  }
  return out;
}

std::string timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void prepare_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw Error(ErrorKind::Io, "cannot create output directory " + out.string());
  }
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
  f.close();
  if (!f) throw Error(ErrorKind::Io, "cannot write " + p.string());
}

void write_manifest(const LoadedConfig& cfg, const fs::path& out,
                    const std::string& command, std::vector<fs::path>& files) {
  json outputs = json::array();
  for (const auto& f : files) outputs.push_back(f.generic_string());
  const json m = {{"tool", "lpmbrw"},
                  {"version", version()},
                  {"command", command},
                  {"config_hash", config_hash(cfg.doc)},
                  {"seed", cfg.experiment.seed},
                  {"timestamp", timestamp()},
                  {"outputs", outputs}};
  const fs::path p = out / "manifest.json";
  write_file(p, m.dump(2) + "\n");
  files.push_back(p);
}

}  // namespace

ConstantsOutput cmd_constants(const LoadedConfig& cfg) {
  const ExperimentConfig& e = cfg.experiment;
  const RegimeSpec reg = classify_regime(e.spec, e.mu, e.theta);
  const CumulantReport cr = cumulants(e.spec);
  const TailReport tail = tail_params(e.mu);

  ConstantsOutput out;
  std::ostringstream os;
  row(os, "offspring mean", fixed(e.spec.offspring.mean()));
  row(os, "displacement", e.spec.displacement.describe());
  row(os, "perturbation", e.mu.describe());
  row(os, "theta0", fixed(*cr.theta0));
  row(os, "nu(theta0)", fixed(cr.nu_at_theta0));
  row(os, "nu(theta0)/theta0", fixed(cr.slope));
  row(os, "sigma^2", fixed(cr.sigma_sq));
  row(os, "c_inf", fixed(cr.c_inf));
  row(os, "tail", tail_kind(tail));
  json tail_j = {{"kind", tail_kind(tail)}};
  if (tail.regularly_varying()) {
    const double k = k_constant(tail.gamma, tail.c_plus);
    row(os, "gamma", fixed(tail.gamma));
    row(os, "c_plus", fixed(tail.c_plus));
    row(os, "k", fixed(k));
    tail_j["gamma"] = tail.gamma;
    tail_j["c_plus"] = tail.c_plus;
    tail_j["k"] = k;
    tail_j["finite_moment_sup"] = tail.finite_moment_sup;
  } else {
    row(os, "finite moments", "all r > 0");
    tail_j["finite_moment_sup"] = "inf";
  }
  row(os, "theta", fixed(reg.theta));
  row(os, "regime", to_string(reg.regime));
  row(os, "alpha", fixed(reg.alpha));
  row(os, "c_log", fixed(reg.c_log));
  row(os, "vartheta", fixed(reg.vartheta));
  out.table = os.str();

  out.json = {{"cumulants",
               {{"theta0", *cr.theta0},
                {"nu_at_theta0", cr.nu_at_theta0},
                {"slope", cr.slope},
                {"sigma_sq", cr.sigma_sq},
                {"c_inf", cr.c_inf}}},
              {"tail", tail_j},
              {"regime", regime_json(reg)}};
  return out;
}

CommandOutput cmd_simulate(const LoadedConfig& cfg, const fs::path& out) {
  const ExperimentConfig& e = cfg.experiment;
  const RegimeSpec reg = classify_regime(e.spec, e.mu, e.theta);
  const Simulator sim(e.spec, e.mu, e.budget);
  prepare_dir(out);
  CommandOutput res;

  // Per-replica statistics on the same streams the verifier uses.
  std::ostringstream gs;
  gs << "replica,n,population,r_n,theta,log_y_n,w_n,d_n,rstar_direct,rstar_coupled\n";
  const std::vector<double> thetas{e.theta};
  for (unsigned n : e.n_grid) {
    const std::uint64_t base = grid_seed(e.seed, n);
    const auto rows = parallel_map<GenStats>(e.replicas, e.threads, [&](std::size_t i) {
      return sim.run_generation(thetas, n, replica_seed(base, i));
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const GenStats& g = rows[i];
      gs << i << ',' << g.n << ',' << g.population << ',' << num(g.r_n) << ','
         << num(e.theta) << ',' << num(g.log_y_n[0]) << ',' << num(g.w_n[0]) << ','
         << (g.d_n ? num(*g.d_n) : "") << ',' << num(*g.rstar_direct) << ','
         << num(*g.rstar_coupled) << '\n';
    }
  }
  res.files.push_back(out / "genstats.csv");
  write_file(res.files.back(), gs.str());

  const auto test = ks_test_sample(sim, e, reg);
  std::ostringstream cs;
  cs << "replica,n,centered\n";
  for (std::size_t i = 0; i < test.size(); ++i) {
    cs << i << ',' << e.effective_ks_n() << ',' << num(test[i]) << '\n';
  }
  res.files.push_back(out / "centered.csv");
  write_file(res.files.back(), cs.str());

  const auto ld = limit_draws(sim, reg, e.effective_ks_n(), e.n_mart,
                              e.effective_ks_replicas(), e.effective_mixing_replicas(),
                              e.surrogate, e.seed, e.threads);
  std::ostringstream ls;
  const bool alt = !ld.alternate.empty();
  ls << (alt ? "index,limit,limit_gamma_exponent\n" : "index,limit\n");
  for (std::size_t i = 0; i < ld.draws.size(); ++i) {
    ls << i << ',' << num(ld.draws[i]);
    if (alt) ls << ',' << num(ld.alternate[i]);
    ls << '\n';
  }
  res.files.push_back(out / "limit.csv");
  write_file(res.files.back(), ls.str());

  write_manifest(cfg, out, "simulate", res.files);
  std::ostringstream sum;
  sum << "regime " << to_string(reg.regime) << ", " << e.replicas
      << " replicas per generation, " << test.size() << " centred samples at n = "
      << e.effective_ks_n() << "\n";
  for (const auto& f : res.files) sum << "wrote " << f.generic_string() << "\n";
  res.summary = sum.str();
  return res;
}

json report_to_json(const VerificationReport& rep, const LoadedConfig& cfg) {
  json verdicts = json::array();
  for (const auto& v : rep.verdicts) {
    verdicts.push_back({{"criterion", v.criterion}, {"pass", v.pass}, {"detail", v.detail}});
  }
  json ks = {{"stat", rep.ks.stat},
             {"p", rep.ks.p},
             {"n", rep.ks_n},
             {"mixing_exponent", rep.mixing_exponent},
             {"surrogate", to_string(rep.surrogate)},
             {"mixing_discarded", rep.mixing_discarded}};
  if (rep.ks_alternate) {
    ks["alternate"] = {{"stat", rep.ks_alternate->stat}, {"p", rep.ks_alternate->p}};
  }
  if (rep.above_scale) ks["above_scale"] = *rep.above_scale;
  return {{"tool", "lpmbrw"},
          {"version", version()},
          {"config_hash", config_hash(cfg.doc)},
          {"seed", cfg.experiment.seed},
          {"regime", regime_json(rep.regime)},
          {"audit", audit_json(rep.audit)},
          {"slope",
           {{"value", rep.slope.value},
            {"stderr", rep.slope.stderr_},
            {"target", rep.slope_target},
            {"tolerance", rep.slope_tolerance}}},
          {"c_log_hat",
           {{"value", rep.log_fit.c.value},
            {"stderr", rep.log_fit.c.stderr_},
            {"intercept", rep.log_fit.b}}},
          {"n_grid", rep.n_grid},
          {"medians", rep.medians},
          {"ks", ks},
          {"verdicts", verdicts},
          {"passed", rep.passed()}};
}

VerifyOutput cmd_verify(const LoadedConfig& cfg, const fs::path& out) {
  const VerificationReport rep = run_experiment(cfg.experiment);
  prepare_dir(out);
  VerifyOutput res;
  res.report_json = report_to_json(rep, cfg).dump(2) + "\n";
  res.files.push_back(out / "report.json");
  write_file(res.files.back(), res.report_json);
  write_manifest(cfg, out, "verify", res.files);
  res.passed = rep.passed();

  std::ostringstream sum;
  sum << "regime " << to_string(rep.regime.regime) << " (theta = " << fixed(rep.regime.theta)
      << ", alpha = " << fixed(rep.regime.alpha) << ", c_log = " << fixed(rep.regime.c_log)
      << ")\n";
  std::string failed;
  for (const auto& v : rep.verdicts) {
    sum << (v.pass ? "PASS " : "FAIL ") << v.criterion << ": " << v.detail << "\n";
    if (!v.pass) failed += (failed.empty() ? "" : ", ") + v.criterion;
  }
  if (rep.ks_alternate) {
    sum << "other mixing exponent: KS p = " << rep.ks_alternate->p << "\n";
  }
  sum << (failed.empty() ? std::string("all criteria passed\n")
                         : "failed criteria: " + failed + "\n");
  res.summary = sum.str();
  return res;
}

}  // namespace lpmbrw
