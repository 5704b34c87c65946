#ifndef LPMBRW_LIMITLAW_HPP
#define LPMBRW_LIMITLAW_HPP

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "engine.hpp"
#include "model.hpp"
#include "perturbation.hpp"
#include "random.hpp"

namespace lpmbrw {

/// Totally skewed strictly stable law with characteristic function
///   exp(-k |t|^gamma (1 - i tan(pi gamma / 2) sign t)),  0 < gamma < 1.
struct StableSpec {
  double gamma;
  double k;
};

/// pi c_plus / (2 Gamma(gamma) sin(pi gamma / 2)).
double k_constant(double gamma, double c_plus);

/// The stable law attracting a regularly varying mark law.
StableSpec stable_from_tail(const TailReport& tail);

std::complex<double> stable_cf(const StableSpec& s, double t);

/// Chambers-Mallows-Stuck draw, returned as log S to keep the extreme right
/// tail representable.
double log_sample_stable(const StableSpec& s, Stream& rng);
double sample_stable(const StableSpec& s, Stream& rng);

/// Finite-n surrogate for an almost-sure martingale limit: positive values
/// drawn uniformly with replacement.
struct MixingSource {
  std::vector<double> values;
  /// Martingale draws that were not positive and therefore excluded.
  std::size_t discarded = 0;

  static MixingSource explicit_samples(std::vector<double> values);
};

/// Exponent p in H = A^p S. Lemma-style mixing uses p = 1/gamma; the
/// alternative reading of the limit statements uses p = gamma.
enum class MixingExponent { InverseGamma, Gamma };
const char* to_string(MixingExponent e) noexcept;

struct LimitSampleSpec {
  RegimeSpec regime;
  /// Below/Boundary: (gamma, k) of the mark law. Above: (vartheta, scale).
  StableSpec stable;
  MixingSource mixing;
  MixingExponent exponent = MixingExponent::InverseGamma;
};

/// Finite-n stand-in for c_inf D_inf (boundary) and D_inf (above).
enum class MixingSurrogate {
  NormalizedAdditive,    // n^{1/2} W_n(theta0), divided by c_inf above
  DerivativeMartingale,  // c_inf D_n on the boundary, D_n above
};
const char* to_string(MixingSurrogate s) noexcept;

/// Mixing variable for the regime from `replicas` fresh trees at depth
/// n_mart. Below the boundary this is W_n(gamma theta); on and above it the
/// surrogate decides. Non-positive draws (possible for D_n) are discarded
/// and counted.
MixingSource mixing_from_martingale(
    const Simulator& sim, const RegimeSpec& reg, unsigned n_mart,
    std::size_t replicas, std::uint64_t seed, unsigned threads = 0,
    MixingSurrogate surrogate = MixingSurrogate::NormalizedAdditive);

/// Assembles the limit recipe. For the above-boundary regime the stable
/// scale is not determined by the model and must be supplied.
LimitSampleSpec make_limit_spec(const RegimeSpec& reg, const PerturbationLaw& mu,
                                MixingSource mixing, double above_scale = 1.0,
                                MixingExponent exponent =
                                    MixingExponent::InverseGamma);

double sample_limit_rstar(const LimitSampleSpec& ls, Stream& rng);

/// Monte Carlo average of stable_cf(t A^p) over the mixing values.
std::vector<std::complex<double>> limit_cf_mixture(
    const LimitSampleSpec& ls, const std::vector<double>& t_grid);

/// Stable scale k for the above-boundary limit. Changing k only translates
/// the limit law, so the translation minimising the KS distance to
/// `centered` (simulated centred R*_n, independent of any later test data)
/// is found on a grid and converted back to k.
double calibrate_above_scale(const LimitSampleSpec& ls,
                             std::span<const double> centered,
                             std::size_t draws, std::uint64_t seed);

}  // namespace lpmbrw

#endif  // LPMBRW_LIMITLAW_HPP
