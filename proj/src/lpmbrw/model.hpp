#ifndef LPMBRW_MODEL_HPP
#define LPMBRW_MODEL_HPP

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "perturbation.hpp"
#include "random.hpp"

namespace lpmbrw {

/// Law of the brood size N. Zero children is structurally excluded, so the
/// process survives with probability one.
class OffspringLaw {
 public:
  using Atom = std::pair<unsigned, double>;  // (k, p_k), k >= 1

  static OffspringLaw deterministic(unsigned k);
  static OffspringLaw from_pmf(std::vector<Atom> pmf);

  const std::vector<Atom>& pmf() const noexcept { return pmf_; }
  double mean() const noexcept { return mean_; }
  unsigned max_count() const noexcept { return max_; }
  bool deterministic() const noexcept { return pmf_.size() == 1; }

  /// Consumes no randomness when the law is deterministic.
  unsigned sample(Stream& rng) const;

 private:
  explicit OffspringLaw(std::vector<Atom> pmf);
  std::vector<Atom> pmf_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
  unsigned max_ = 0;
};

/// Displacement law of a single child. Every variant has a closed-form
/// moment generating function, defined for all real theta.
class DisplacementLaw {
 public:
  struct PointMass { double a; };
  struct TwoPoint { double a; double b; double p; };  // P(xi = a) = p
  struct Gaussian { double mean; double sd; };
  struct FiniteSupport { std::vector<std::pair<double, double>> atoms; };
  using Variant = std::variant<PointMass, TwoPoint, Gaussian, FiniteSupport>;

  static DisplacementLaw point_mass(double a);
  static DisplacementLaw two_point(double a, double b, double p);
  static DisplacementLaw gaussian(double mean, double sd);
  static DisplacementLaw finite_support(
      std::vector<std::pair<double, double>> atoms);

  const Variant& variant() const noexcept { return v_; }
  std::string describe() const;

  /// log E[exp(theta xi)]
  double log_mgf(double theta) const;
  /// First and second derivatives of log_mgf, i.e. mean and variance of xi
  /// under the exponentially tilted law.
  double tilted_mean(double theta) const;
  double tilted_variance(double theta) const;

  /// Consumes no randomness for a point mass.
  double sample(Stream& rng) const;

  /// Atoms with positive probability; empty for the Gaussian.
  std::vector<std::pair<double, double>> atoms() const;

 private:
  explicit DisplacementLaw(Variant v);
  Variant v_;
  std::vector<double> cdf_;  // FiniteSupport only
};

struct BranchingSpec {
  OffspringLaw offspring;
  DisplacementLaw displacement;
};

double nu(const BranchingSpec& spec, double theta);
double nu_prime(const BranchingSpec& spec, double theta);
double nu_second(const BranchingSpec& spec, double theta);

inline constexpr double kTheta0Tolerance = 1e-10;
inline constexpr double kTheta0BracketCap = 1e6;

/// Smallest theta > 0 with theta nu'(theta) = nu(theta). std::nullopt means
/// the critical parameter is infinite.
std::optional<double> theta0(const BranchingSpec& spec,
                             double tol = kTheta0Tolerance);

struct SigmaCinf {
  double sigma_sq;
  double c_inf;
};

/// Throws ErrorKind::Model when theta0 is infinite.
SigmaCinf sigma_sq_cinf(const BranchingSpec& spec);

struct CumulantReport {
  std::optional<double> theta0;
  double nu_at_theta0 = 0.0;
  double slope = 0.0;  // nu(theta0) / theta0
  double sigma_sq = 0.0;
  double c_inf = 0.0;
};

CumulantReport cumulants(const BranchingSpec& spec,
                         double tol = kTheta0Tolerance);

enum class FlagState { Holds, Fails, Unknown };
const char* to_string(FlagState s) noexcept;

struct AssumptionFlag {
  std::string name;
  FlagState state;
  std::string reason;
};

struct AssumptionReport {
  std::vector<AssumptionFlag> flags;

  /// Throws std::out_of_range for a name that was never evaluated.
  const AssumptionFlag& get(const std::string& name) const;
};

// Flag names, in report order.
namespace flag {
inline constexpr const char* kH = "H";
inline constexpr const char* kFiniteRMoment = "finite_r_moment";
inline constexpr const char* kL1 = "L1";
inline constexpr const char* kL2 = "L2";
inline constexpr const char* kNonLattice = "non_lattice";
inline constexpr const char* kMuPositiveSupport = "mu_positive_support";
inline constexpr const char* kMuNonDegenerate = "mu_not_single_point";
inline constexpr const char* kSurvival = "survival";
inline constexpr const char* kBigginsLlog = "biggins_llogl";
}  // namespace flag

AssumptionReport audit(const BranchingSpec& spec, const PerturbationLaw& mu,
                       double theta);

enum class Regime { Below, Boundary, Above };
const char* to_string(Regime r) noexcept;

struct RegimeSpec {
  Regime regime;
  double alpha;     // linear centering per generation
  double c_log;     // coefficient of log n in the centering
  double theta;
  double vartheta;  // min(1, theta0 / theta)
  double theta0;
  double gamma;     // tail index of mu; 0 when mu has all moments
};

inline constexpr double kBoundaryRelTolerance = 1e-9;

/// Throws ErrorKind::Model when the pair (theta, mu) falls outside the
/// three regimes handled here.
RegimeSpec classify_regime(const BranchingSpec& spec, const PerturbationLaw& mu,
                           double theta);

}  // namespace lpmbrw

#endif  // LPMBRW_MODEL_HPP
