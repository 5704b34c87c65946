#include "lpmbrw/lpmbrw.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "lpmbrw/commands.hpp"
#include "lpmbrw/config.hpp"
#include "lpmbrw/error.hpp"
#include "lpmbrw/ks.hpp"
#include "lpmbrw/limitlaw.hpp"
#include "lpmbrw/stats.hpp"

struct lpmbrw_config {
  lpmbrw::LoadedConfig inner;
};

namespace {

thread_local std::string g_last_error;

lpmbrw_status fail(lpmbrw_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs fn, mapping exceptions to status codes and recording the message.
template <class F>
lpmbrw_status guarded(F&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const lpmbrw::Error& e) {
    return fail(static_cast<lpmbrw_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LPMBRW_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LPMBRW_ERR_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* lpmbrw_version(void) { return lpmbrw::version(); }

const char* lpmbrw_last_error(void) { return g_last_error.c_str(); }

lpmbrw_status lpmbrw_config_from_json(const char* text, lpmbrw_config** out) {
  if (!text || !out) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lpmbrw_config{lpmbrw::parse_config_text(text)};
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_config_from_file(const char* path, lpmbrw_config** out) {
  if (!path || !out) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new lpmbrw_config{lpmbrw::load_config_file(path)};
    return LPMBRW_OK;
  });
}

void lpmbrw_config_free(lpmbrw_config* cfg) { delete cfg; }

lpmbrw_status lpmbrw_config_set_seed(lpmbrw_config* cfg, uint64_t seed) {
  if (!cfg) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    lpmbrw::override_seed(cfg->inner, seed);
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_config_set_replicas(lpmbrw_config* cfg, size_t replicas) {
  if (!cfg) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    lpmbrw::override_replicas(cfg->inner, replicas);
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_config_set_threads(lpmbrw_config* cfg, unsigned threads) {
  if (!cfg) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    lpmbrw::override_threads(cfg->inner, threads);
    return LPMBRW_OK;
  });
}

void lpmbrw_string_free(char* s) { std::free(s); }

lpmbrw_status lpmbrw_constants(const lpmbrw_config* cfg, char** table, char** json) {
  if (!cfg) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    const auto out = lpmbrw::cmd_constants(cfg->inner);
    if (table) *table = dup(out.table);
    if (json) *json = dup(out.json.dump(2) + "\n");
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_simulate(const lpmbrw_config* cfg, const char* out_dir,
                              char** summary) {
  if (!cfg || !out_dir) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto out = lpmbrw::cmd_simulate(cfg->inner, out_dir);
    if (summary) *summary = dup(out.summary);
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_verify(const lpmbrw_config* cfg, const char* out_dir,
                            char** summary, char** report_json) {
  if (!cfg || !out_dir) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto out = lpmbrw::cmd_verify(cfg->inner, out_dir);
    if (summary) *summary = dup(out.summary);
    if (report_json) *report_json = dup(out.report_json);
    if (!out.passed) return fail(LPMBRW_ERR_VERIFICATION, "verification failed");
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_nu(const lpmbrw_config* cfg, double theta, double* out) {
  if (!cfg || !out) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = lpmbrw::nu(cfg->inner.experiment.spec, theta);
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_theta0(const lpmbrw_config* cfg, double* out, int* found) {
  if (!cfg || !out || !found) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto t0 = lpmbrw::theta0(cfg->inner.experiment.spec);
    *found = t0.has_value() ? 1 : 0;
    if (t0) *out = *t0;
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_sample_rstar(const lpmbrw_config* cfg, unsigned n, size_t count,
                                  int direct, double* out) {
  if (!cfg || (!out && count > 0)) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto& e = cfg->inner.experiment;
    const lpmbrw::Simulator sim(e.spec, e.mu, e.budget);
    const auto xs = lpmbrw::sample_rstar(
        sim, e.theta, n, count, e.seed,
        direct ? lpmbrw::RstarSampler::Direct : lpmbrw::RstarSampler::Coupled, e.threads);
    std::copy(xs.begin(), xs.end(), out);
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_stable_cf(double gamma, double k, double t, double* re, double* im) {
  if (!re || !im) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto z = lpmbrw::stable_cf({gamma, k}, t);
    *re = z.real();
    *im = z.imag();
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_k_constant(double gamma, double c_plus, double* out) {
  if (!out) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = lpmbrw::k_constant(gamma, c_plus);
    return LPMBRW_OK;
  });
}

lpmbrw_status lpmbrw_ks_two_sample(const double* xs, size_t nx, const double* ys,
                                   size_t ny, double* stat, double* p) {
  if (!xs || !ys || !stat || !p) return fail(LPMBRW_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = lpmbrw::ks_two_sample({xs, nx}, {ys, ny});
    *stat = r.stat;
    *p = r.p;
    return LPMBRW_OK;
  });
}

}  // extern "C"
