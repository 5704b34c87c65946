#include "limitlaw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "descriptive.hpp"
#include "error.hpp"
#include "ks.hpp"
#include "parallel.hpp"

namespace lpmbrw {

namespace {
constexpr double kPi = std::numbers::pi;

void check_index(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "stable index must lie in (0,1)");
  }
}
}  // namespace

double k_constant(double gamma, double c_plus) {
  check_index(gamma);
  require(c_plus > 0.0, "c_plus must be positive");
  return kPi * c_plus / (2.0 * std::tgamma(gamma) * std::sin(kPi * gamma / 2.0));
}

StableSpec stable_from_tail(const TailReport& tail) {
  if (!tail.regularly_varying()) {
    throw Error(ErrorKind::Model, "mark law has no stable domain of attraction");
  }
  return {tail.gamma, k_constant(tail.gamma, tail.c_plus)};
}

std::complex<double> stable_cf(const StableSpec& s, double t) {
  check_index(s.gamma);
  if (t == 0.0) return {1.0, 0.0};
  const double mag = s.k * std::pow(std::abs(t), s.gamma);
  const double sgn = t > 0.0 ? 1.0 : -1.0;
  const double phase = mag * std::tan(kPi * s.gamma / 2.0) * sgn;
  return std::polar(std::exp(-mag), phase);
}

double log_sample_stable(const StableSpec& s, Stream& rng) {
  check_index(s.gamma);
  require(s.k > 0.0, "stable scale must be positive");
  const double a = s.gamma;
  // With skewness 1 and index below 1 the CMS shift is pi/2, which keeps
  // every factor below strictly positive.
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double shifted = a * (v + kPi / 2.0);
  const double log_unit =
      -std::log(std::cos(kPi * a / 2.0)) / a + std::log(std::sin(shifted)) -
      std::log(std::cos(v)) / a +
      (1.0 - a) / a * (std::log(std::cos(v - shifted)) - std::log(w));
  // Scaling by sigma multiplies the exponent of the CF by sigma^gamma.
  return log_unit + std::log(s.k) / a;
}

double sample_stable(const StableSpec& s, Stream& rng) {
  return std::exp(log_sample_stable(s, rng));
}

MixingSource MixingSource::explicit_samples(std::vector<double> values) {
  require(!values.empty(), "mixing source needs at least one value");
  for (double v : values) {
    require(std::isfinite(v) && v > 0.0, "mixing values must be positive");
  }
  return MixingSource{std::move(values), 0};
}

const char* to_string(MixingExponent e) noexcept {
  return e == MixingExponent::InverseGamma ? "1/gamma" : "gamma";
}

const char* to_string(MixingSurrogate s) noexcept {
  return s == MixingSurrogate::NormalizedAdditive ? "normalized_additive"
                                                  : "derivative";
}

MixingSource mixing_from_martingale(const Simulator& sim, const RegimeSpec& reg,
                                    unsigned n_mart, std::size_t replicas,
                                    std::uint64_t seed, unsigned threads,
                                    MixingSurrogate surrogate) {
  require(replicas > 0, "mixing needs at least one replica");
  require(n_mart >= 1, "n_mart must be at least 1");
  double c_inf = 1.0;
  if (reg.regime != Regime::Below) c_inf = sigma_sq_cinf(sim.spec()).c_inf;
  const double root_n = std::sqrt(static_cast<double>(n_mart));
  // Boundary targets c_inf D_inf, above targets D_inf itself.
  const double d_factor = reg.regime == Regime::Boundary ? c_inf : 1.0;
  const double w_factor = reg.regime == Regime::Boundary ? root_n : root_n / c_inf;

  const auto raw = parallel_map<double>(replicas, threads, [&](std::size_t i) {
    const std::uint64_t s = derive_seed(seed, i, StreamTag::Mixing);
    if (reg.regime == Regime::Below) {
      return sim.additive_martingale(reg.gamma * reg.theta, n_mart, s);
    }
    if (surrogate == MixingSurrogate::DerivativeMartingale) {
      return d_factor * sim.derivative_martingale(n_mart, s);
    }
    return w_factor * sim.additive_martingale(reg.theta0, n_mart, s);
  });

  MixingSource out;
  out.values.reserve(raw.size());
  for (double v : raw) {
    if (std::isfinite(v) && v > 0.0) {
      out.values.push_back(v);
    } else {
      ++out.discarded;
    }
  }
  if (out.values.empty()) {
    throw Error(ErrorKind::Model, "mixing source produced no positive values");
  }
  return out;
}

LimitSampleSpec make_limit_spec(const RegimeSpec& reg, const PerturbationLaw& mu,
                                MixingSource mixing, double above_scale,
                                MixingExponent exponent) {
  require(!mixing.values.empty(), "mixing source is empty");
  LimitSampleSpec ls{reg, {}, std::move(mixing), exponent};
  if (reg.regime == Regime::Above) {
    require(above_scale > 0.0, "above-boundary stable scale must be positive");
    ls.stable = {reg.theta0 / reg.theta, above_scale};
  } else {
    ls.stable = stable_from_tail(tail_params(mu));
  }
  return ls;
}

namespace {
double mixing_power(const LimitSampleSpec& ls) {
  if (ls.regime.regime == Regime::Above) return ls.regime.theta / ls.regime.theta0;
  return ls.exponent == MixingExponent::InverseGamma ? 1.0 / ls.stable.gamma
                                                     : ls.stable.gamma;
}
}  // namespace

double sample_limit_rstar(const LimitSampleSpec& ls, Stream& rng) {
  require(!ls.mixing.values.empty(), "mixing source is empty");
  const double a = ls.mixing.values[rng.index(ls.mixing.values.size())];
  const double log_h = mixing_power(ls) * std::log(a) + log_sample_stable(ls.stable, rng);
  return (log_h - std::log(rng.exponential())) / ls.regime.theta;
}

std::vector<std::complex<double>> limit_cf_mixture(
    const LimitSampleSpec& ls, const std::vector<double>& t_grid) {
  require(!ls.mixing.values.empty(), "mixing source is empty");
  const double p = mixing_power(ls);
  std::vector<std::complex<double>> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    std::complex<double> acc{0.0, 0.0};
    for (double a : ls.mixing.values) acc += stable_cf(ls.stable, t * std::pow(a, p));
    out.push_back(acc / static_cast<double>(ls.mixing.values.size()));
  }
  return out;
}

double calibrate_above_scale(const LimitSampleSpec& ls,
                             std::span<const double> centered,
                             std::size_t draws, std::uint64_t seed) {
  require(ls.regime.regime == Regime::Above,
          "scale calibration applies to the above-boundary regime only");
  require(!centered.empty() && draws > 0, "calibration needs samples");
  LimitSampleSpec unit = ls;
  unit.stable.k = 1.0;
  Stream rng(seed, 0, StreamTag::Calibration);
  std::vector<double> limit(draws);
  for (auto& x : limit) x = sample_limit_rstar(unit, rng);
  std::sort(limit.begin(), limit.end());
  std::vector<double> target(centered.begin(), centered.end());
  std::sort(target.begin(), target.end());

  // Coarse grid around the median offset, then a fine grid around the best.
  const double start = median(target) - median(limit);
  double best = start;
  double best_d = ks_statistic_sorted(target, limit, start);
  const auto scan = [&](double lo, double hi, double step) {
    for (double s = lo; s <= hi + 0.5 * step; s += step) {
      const double d = ks_statistic_sorted(target, limit, s);
      if (d < best_d) {
        best_d = d;
        best = s;
      }
    }
  };
  scan(start - 1.0, start + 1.0, 0.01);
  const double centre = best;
  scan(centre - 0.01, centre + 0.01, 0.0005);
  // Z = sigma Z_1 shifts the limit by log(sigma) / theta; k = sigma^vartheta.
  return std::exp(unit.stable.gamma * ls.regime.theta * best);
}

}  // namespace lpmbrw
