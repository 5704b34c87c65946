#include "perturbation.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "overloaded.hpp"

namespace lpmbrw {

namespace {
bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }
}  // namespace

PerturbationLaw PerturbationLaw::point_mass(double a) {
  require(positive_finite(a), "point mass location must be positive");
  return PerturbationLaw(PointMass{a});
}

PerturbationLaw PerturbationLaw::exponential(double rate) {
  require(positive_finite(rate), "exponential rate must be positive");
  return PerturbationLaw(Exponential{rate});
}

PerturbationLaw PerturbationLaw::lognormal(double m, double s) {
  require(std::isfinite(m), "lognormal m must be finite");
  require(positive_finite(s), "lognormal s must be positive");
  return PerturbationLaw(LogNormal{m, s});
}

PerturbationLaw PerturbationLaw::pareto(double gamma, double x_m) {
  require(std::isfinite(gamma) && gamma > 0.0 && gamma < 1.0,
          "pareto gamma must lie in (0,1)");
  require(positive_finite(x_m), "pareto x_m must be positive");
  return PerturbationLaw(Pareto{gamma, x_m});
}

std::string PerturbationLaw::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PointMass& p) { os << "PointMass(" << p.a << ")"; },
                 [&](const Exponential& e) {
                   os << "Exponential(" << e.rate << ")";
                 },
                 [&](const LogNormal& l) {
                   os << "LogNormal(" << l.m << ", " << l.s << ")";
                 },
                 [&](const Pareto& p) {
                   os << "Pareto(" << p.gamma << ", " << p.x_m << ")";
                 },
             },
             v_);
  return os.str();
}

double pareto_quantile(double gamma, double x_m, double u) {
  return x_m * std::pow(u, -1.0 / gamma);
}

double PerturbationLaw::sample(Stream& rng) const {
  return std::visit(
      Overloaded{
          [](const PointMass& p) { return p.a; },
          [&](const Exponential& e) { return rng.exponential() / e.rate; },
          [&](const LogNormal& l) { return std::exp(l.m + l.s * rng.normal()); },
          [&](const Pareto& p) {
            return pareto_quantile(p.gamma, p.x_m, rng.uniform());
          },
      },
      v_);
}

double PerturbationLaw::log_sample(Stream& rng) const {
  return std::visit(
      Overloaded{
          [](const PointMass& p) { return std::log(p.a); },
          [&](const Exponential& e) {
            return std::log(rng.exponential()) - std::log(e.rate);
          },
          [&](const LogNormal& l) { return l.m + l.s * rng.normal(); },
          [&](const Pareto& p) {
            return std::log(p.x_m) - std::log(rng.uniform()) / p.gamma;
          },
      },
      v_);
}

double sample_perturbation(const PerturbationLaw& law, double theta,
                           Stream& marks, Stream& exps) {
  require(theta > 0.0, "theta must be positive");
  const double y = law.sample(marks);
  const double e = exps.exponential();
  return (std::log(y) - std::log(e)) / theta;
}

TailReport tail_params(const PerturbationLaw& law) {
  if (const auto* p = std::get_if<PerturbationLaw::Pareto>(&law.variant())) {
    return TailReport{TailReport::Kind::RegularlyVarying, p->gamma,
                      std::pow(p->x_m, p->gamma), p->gamma};
  }
  return TailReport{TailReport::Kind::AllPolynomialMomentsFinite};
}

}  // namespace lpmbrw
