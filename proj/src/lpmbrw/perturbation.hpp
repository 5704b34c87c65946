#ifndef LPMBRW_PERTURBATION_HPP
#define LPMBRW_PERTURBATION_HPP

#include <limits>
#include <string>
#include <variant>

#include "random.hpp"

namespace lpmbrw {

/// The law mu of the leaf marks Y_v. Support is always inside (0, inf).
class PerturbationLaw {
 public:
  struct PointMass { double a; };
  struct Exponential { double rate; };
  struct LogNormal { double m; double s; };
  /// F(x) = 1 - (x_m / x)^gamma for x >= x_m.
  struct Pareto { double gamma; double x_m; };
  using Variant = std::variant<PointMass, Exponential, LogNormal, Pareto>;

  static PerturbationLaw point_mass(double a);
  static PerturbationLaw exponential(double rate);
  static PerturbationLaw lognormal(double m, double s);
  static PerturbationLaw pareto(double gamma, double x_m);

  const Variant& variant() const noexcept { return v_; }
  bool is_point_mass() const noexcept {
    return std::holds_alternative<PointMass>(v_);
  }
  std::string describe() const;

  double sample(Stream& rng) const;
  /// log of one draw; same stream consumption as sample().
  double log_sample(Stream& rng) const;

 private:
  explicit PerturbationLaw(Variant v) : v_(v) {}
  Variant v_;
};

/// Inverse CDF of the Pareto law at u in (0, 1]: x_m * u^(-1/gamma).
double pareto_quantile(double gamma, double x_m, double u);

/// One draw of the full perturbation (1/theta) log(Y / E).
double sample_perturbation(const PerturbationLaw& law, double theta,
                           Stream& marks, Stream& exps);

struct TailReport {
  enum class Kind { RegularlyVarying, AllPolynomialMomentsFinite };
  Kind kind;
  double gamma = 0.0;   // RegularlyVarying only
  double c_plus = 0.0;  // RegularlyVarying only
  /// sup{r : E[Y^r] < inf}; +inf when every moment is finite.
  double finite_moment_sup = std::numeric_limits<double>::infinity();

  bool regularly_varying() const noexcept {
    return kind == Kind::RegularlyVarying;
  }
};

TailReport tail_params(const PerturbationLaw& law);

}  // namespace lpmbrw

#endif  // LPMBRW_PERTURBATION_HPP
