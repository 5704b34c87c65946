// Command line front end. Everything goes through the C interface.
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lpmbrw/lpmbrw.h"

namespace {

struct ConfigDeleter {
  void operator()(lpmbrw_config* c) const { lpmbrw_config_free(c); }
};
using ConfigPtr = std::unique_ptr<lpmbrw_config, ConfigDeleter>;

struct CString {
  char* p = nullptr;
  ~CString() { lpmbrw_string_free(p); }
};

int report(lpmbrw_status s) {
  if (s != LPMBRW_OK) std::fprintf(stderr, "lpmbrw: %s\n", lpmbrw_last_error());
  return static_cast<int>(s);
}

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> replicas;
};

// Loads the config and applies the overrides; LPMBRW_THREADS backs --threads.
lpmbrw_status load(const Options& o, ConfigPtr& cfg) {
  lpmbrw_config* raw = nullptr;
  lpmbrw_status s = lpmbrw_config_from_file(o.config.c_str(), &raw);
  if (s != LPMBRW_OK) return s;
  cfg.reset(raw);
  if (o.seed && (s = lpmbrw_config_set_seed(raw, *o.seed)) != LPMBRW_OK) return s;
  if (o.replicas && (s = lpmbrw_config_set_replicas(raw, *o.replicas)) != LPMBRW_OK) {
    return s;
  }
  std::optional<unsigned> threads = o.threads;
  if (!threads) {
    if (const char* env = std::getenv("LPMBRW_THREADS"); env && *env) {
      char* end = nullptr;
      const unsigned long v = std::strtoul(env, &end, 10);
      if (*end != '\0') {
        std::fprintf(stderr, "lpmbrw: ignoring invalid LPMBRW_THREADS=%s\n", env);
      } else {
        threads = static_cast<unsigned>(v);
      }
    }
  }
  if (threads) s = lpmbrw_config_set_threads(raw, *threads);
  return s;
}

int run_constants(const Options& o, bool json_only) {
  ConfigPtr cfg;
  if (auto s = load(o, cfg); s != LPMBRW_OK) return report(s);
  CString table, json;
  if (auto s = lpmbrw_constants(cfg.get(), &table.p, &json.p); s != LPMBRW_OK) {
    return report(s);
  }
  if (!json_only) std::printf("%s\n", table.p);
  std::printf("%s", json.p);
  return 0;
}

int run_simulate(const Options& o) {
  ConfigPtr cfg;
  if (auto s = load(o, cfg); s != LPMBRW_OK) return report(s);
  CString summary;
  const lpmbrw_status s = lpmbrw_simulate(cfg.get(), o.out.c_str(), &summary.p);
  if (summary.p) std::printf("%s", summary.p);
  return report(s);
}

int run_verify(const Options& o) {
  ConfigPtr cfg;
  if (auto s = load(o, cfg); s != LPMBRW_OK) return report(s);
  CString summary;
  const lpmbrw_status s = lpmbrw_verify(cfg.get(), o.out.c_str(), &summary.p, nullptr);
  if (summary.p) std::printf("%s", summary.p);
  return report(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Last-progeny-modified branching random walk laboratory"};
  app.set_version_flag("--version", std::string(lpmbrw_version()));
  app.require_subcommand(1);

  Options o;
  bool json_only = false;
  auto common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("--config,-c", o.config, "Experiment file (JSON)")->required();
    sub->add_option("--seed", o.seed, "Override the configured seed");
    sub->add_option("--threads", o.threads,
                    "Worker threads, 0 = all cores (env LPMBRW_THREADS)");
    sub->add_option("--replicas", o.replicas, "Override the configured replica count");
    if (with_out) sub->add_option("--out,-o", o.out, "Output directory")->capture_default_str();
  };

  auto* constants = app.add_subcommand("constants", "Analytic constants and regime");
  common(constants, false);
  constants->add_flag("--json", json_only, "Print only the JSON document");
  auto* simulate = app.add_subcommand("simulate", "Write raw samples as CSV");
  common(simulate, true);
  auto* verify = app.add_subcommand("verify", "Run the verification experiment");
  common(verify, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    // Usage errors share the parse exit code.
    return rc == 0 ? 0 : LPMBRW_ERR_PARSE;
  }

  if (*constants) return run_constants(o, json_only);
  if (*simulate) return run_simulate(o);
  return run_verify(o);
}
