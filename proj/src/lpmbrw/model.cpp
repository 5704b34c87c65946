#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "error.hpp"
#include "overloaded.hpp"

namespace lpmbrw {

// ---------------------------------------------------------------- offspring

OffspringLaw::OffspringLaw(std::vector<Atom> pmf) : pmf_(std::move(pmf)) {
  require(!pmf_.empty(), "offspring pmf is empty");
  std::sort(pmf_.begin(), pmf_.end());
  double total = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    const auto [k, p] = pmf_[i];
    require(k >= 1, "offspring count 0 is not allowed (survival)");
    require(std::isfinite(p) && p >= 0.0, "offspring probability invalid");
    require(i == 0 || pmf_[i - 1].first != k, "duplicate offspring count");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "offspring pmf must sum to 1");
  std::erase_if(pmf_, [](const Atom& a) { return a.second == 0.0; });
  double acc = 0.0;
  for (const auto& [k, p] : pmf_) {
    acc += p;
    cdf_.push_back(acc);
    mean_ += k * p;
    max_ = std::max(max_, k);
  }
  cdf_.back() = 1.0;
}

OffspringLaw OffspringLaw::deterministic(unsigned k) {
  return OffspringLaw({{k, 1.0}});
}

OffspringLaw OffspringLaw::from_pmf(std::vector<Atom> pmf) {
  return OffspringLaw(std::move(pmf));
}

unsigned OffspringLaw::sample(Stream& rng) const {
  if (pmf_.size() == 1) return pmf_.front().first;
  const double u = rng.uniform();
  const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return pmf_[static_cast<std::size_t>(it - cdf_.begin())].first;
}

// ------------------------------------------------------------- displacement

namespace {

std::vector<std::pair<double, double>> atoms_of(
    const DisplacementLaw::Variant& v) {
  return std::visit(
      Overloaded{
          [](const DisplacementLaw::PointMass& p) {
            return std::vector<std::pair<double, double>>{{p.a, 1.0}};
          },
          [](const DisplacementLaw::TwoPoint& t) {
            std::vector<std::pair<double, double>> out;
            if (t.p > 0.0) out.emplace_back(t.a, t.p);
            if (t.p < 1.0) out.emplace_back(t.b, 1.0 - t.p);
            return out;
          },
          [](const DisplacementLaw::Gaussian&) {
            return std::vector<std::pair<double, double>>{};
          },
          [](const DisplacementLaw::FiniteSupport& f) { return f.atoms; },
      },
      v);
}

// Tilted moments of a discrete law: returns {log mgf, mean, variance}.
struct Tilted {
  double log_mgf;
  double mean;
  double variance;
};

Tilted tilt(const std::vector<std::pair<double, double>>& atoms,
            double theta) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& [x, p] : atoms) top = std::max(top, theta * x);
  double z = 0.0, m1 = 0.0;
  for (const auto& [x, p] : atoms) {
    const double w = p * std::exp(theta * x - top);
    z += w;
    m1 += w * x;
  }
  const double mean = m1 / z;
  double var = 0.0;
  for (const auto& [x, p] : atoms) {
    const double w = p * std::exp(theta * x - top);
    var += w * (x - mean) * (x - mean);
  }
  return {top + std::log(z), mean, var / z};
}

}  // namespace

DisplacementLaw::DisplacementLaw(Variant v) : v_(std::move(v)) {
  if (const auto* f = std::get_if<FiniteSupport>(&v_)) {
    double acc = 0.0;
    for (const auto& a : f->atoms) {
      acc += a.second;
      cdf_.push_back(acc);
    }
    cdf_.back() = 1.0;
  }
}

DisplacementLaw DisplacementLaw::point_mass(double a) {
  require(std::isfinite(a), "displacement point mass must be finite");
  return DisplacementLaw(PointMass{a});
}

DisplacementLaw DisplacementLaw::two_point(double a, double b, double p) {
  require(std::isfinite(a) && std::isfinite(b), "two-point atoms must be finite");
  require(p >= 0.0 && p <= 1.0, "two-point probability must lie in [0,1]");
  return DisplacementLaw(TwoPoint{a, b, p});
}

DisplacementLaw DisplacementLaw::gaussian(double mean, double sd) {
  require(std::isfinite(mean), "gaussian mean must be finite");
  require(std::isfinite(sd) && sd > 0.0, "gaussian sd must be positive");
  return DisplacementLaw(Gaussian{mean, sd});
}

DisplacementLaw DisplacementLaw::finite_support(
    std::vector<std::pair<double, double>> atoms) {
  require(!atoms.empty(), "finite support needs at least one atom");
  double total = 0.0;
  for (const auto& [x, p] : atoms) {
    require(std::isfinite(x), "finite support atom must be finite");
    require(std::isfinite(p) && p >= 0.0, "finite support probability invalid");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "finite support must sum to 1");
  std::erase_if(atoms, [](const auto& a) { return a.second == 0.0; });
  return DisplacementLaw(FiniteSupport{std::move(atoms)});
}

std::string DisplacementLaw::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PointMass& p) { os << "PointMass(" << p.a << ")"; },
                 [&](const TwoPoint& t) {
                   os << "TwoPoint(" << t.a << ", " << t.b << ", " << t.p
                      << ")";
                 },
                 [&](const Gaussian& g) {
                   os << "Gaussian(" << g.mean << ", " << g.sd << ")";
                 },
                 [&](const FiniteSupport& f) {
                   os << "FiniteSupport(" << f.atoms.size() << " atoms)";
                 },
             },
             v_);
  return os.str();
}

std::vector<std::pair<double, double>> DisplacementLaw::atoms() const {
  return atoms_of(v_);
}

double DisplacementLaw::log_mgf(double theta) const {
  if (const auto* g = std::get_if<Gaussian>(&v_)) {
    return theta * g->mean + 0.5 * theta * theta * g->sd * g->sd;
  }
  if (const auto* p = std::get_if<PointMass>(&v_)) return theta * p->a;
  return tilt(atoms_of(v_), theta).log_mgf;
}

double DisplacementLaw::tilted_mean(double theta) const {
  if (const auto* g = std::get_if<Gaussian>(&v_)) {
    return g->mean + theta * g->sd * g->sd;
  }
  if (const auto* p = std::get_if<PointMass>(&v_)) return p->a;
  return tilt(atoms_of(v_), theta).mean;
}

double DisplacementLaw::tilted_variance(double theta) const {
  if (const auto* g = std::get_if<Gaussian>(&v_)) return g->sd * g->sd;
  if (std::holds_alternative<PointMass>(v_)) return 0.0;
  return tilt(atoms_of(v_), theta).variance;
}

double DisplacementLaw::sample(Stream& rng) const {
  return std::visit(
      Overloaded{
          [](const PointMass& p) { return p.a; },
          [&](const TwoPoint& t) { return rng.uniform() < t.p ? t.a : t.b; },
          [&](const Gaussian& g) { return g.mean + g.sd * rng.normal(); },
          [&](const FiniteSupport& f) {
            const double u = rng.uniform();
            const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
            return f.atoms[static_cast<std::size_t>(it - cdf_.begin())].first;
          },
      },
      v_);
}

// -------------------------------------------------------------- cumulants

double nu(const BranchingSpec& spec, double theta) {
  return std::log(spec.offspring.mean()) + spec.displacement.log_mgf(theta);
}

double nu_prime(const BranchingSpec& spec, double theta) {
  return spec.displacement.tilted_mean(theta);
}

double nu_second(const BranchingSpec& spec, double theta) {
  return spec.displacement.tilted_variance(theta);
}

std::optional<double> theta0(const BranchingSpec& spec, double tol) {
  require(tol > 0.0, "theta0 tolerance must be positive");
  // h is nondecreasing because h'(theta) = theta nu''(theta) >= 0.
  const auto h = [&](double t) { return t * nu_prime(spec, t) - nu(spec, t); };

  double lo = 0.0;
  double hi = 1.0;
  while (h(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kTheta0BracketCap) return std::nullopt;
  }
  double best = hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = h(mid);
    if (hm <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(hm) <= std::abs(h(best))) best = mid;
  }
  if (std::abs(h(best)) > tol) {
    std::ostringstream os;
    os << "theta0 bisection did not reach |h| <= " << tol;
    throw Error(ErrorKind::Model, os.str());
  }
  return best;
}

SigmaCinf sigma_sq_cinf(const BranchingSpec& spec) {
  const auto t0 = theta0(spec);
  if (!t0) throw Error(ErrorKind::Model, "theta0 infinite: sigma^2 undefined");
  // Under the tilt at theta0 the centred quantity theta0 xi - nu(theta0) has
  // mean zero, so the expectation reduces to theta0^2 times the tilted
  // variance of xi.
  const double sigma_sq = (*t0) * (*t0) * nu_second(spec, *t0);
  if (!(sigma_sq > 0.0)) throw Error(ErrorKind::Model, "sigma^2 is not positive");
  return {sigma_sq, std::sqrt(2.0 / (std::numbers::pi * sigma_sq))};
}

CumulantReport cumulants(const BranchingSpec& spec, double tol) {
  CumulantReport r;
  r.theta0 = theta0(spec, tol);
  if (!r.theta0) return r;
  r.nu_at_theta0 = nu(spec, *r.theta0);
  r.slope = r.nu_at_theta0 / *r.theta0;
  const auto sc = sigma_sq_cinf(spec);
  r.sigma_sq = sc.sigma_sq;
  r.c_inf = sc.c_inf;
  return r;
}

// ------------------------------------------------------------------ audit

const char* to_string(FlagState s) noexcept {
  switch (s) {
    case FlagState::Holds: return "holds";
    case FlagState::Fails: return "fails";
    case FlagState::Unknown: return "unknown";
  }
  return "unknown";
}

const AssumptionFlag& AssumptionReport::get(const std::string& name) const {
  for (const auto& f : flags) {
    if (f.name == name) return f;
  }
  throw std::out_of_range("no assumption flag named " + name);
}

namespace {

// Best rational approximation p/q of x with q <= max_den, by continued
// fractions. Returns q, or 0 when no such q reproduces x to rel_tol.
long rational_denominator(double x, long max_den, double rel_tol) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long p2 = static_cast<long>(a) * p1 + p0;
    const long q2 = static_cast<long>(a) * q1 + q0;
    if (q2 > max_den) return 0;
    if (std::abs(x - static_cast<double>(p2) / static_cast<double>(q2)) <=
        rel_tol * std::max(1.0, std::abs(x))) {
      return q2;
    }
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    const double frac = r - a;
    if (frac == 0.0) return 0;
    r = 1.0 / frac;
  }
  return 0;
}

AssumptionFlag lattice_flag(const DisplacementLaw& law) {
  using FS = FlagState;
  if (std::holds_alternative<DisplacementLaw::Gaussian>(law.variant())) {
    return {flag::kNonLattice, FS::Holds, "gaussian displacement has a density"};
  }
  const auto atoms = law.atoms();
  double span = 0.0;
  for (const auto& [x, p] : atoms) {
    if (x != 0.0 && (span == 0.0 || std::abs(x) < span)) span = std::abs(x);
  }
  if (span == 0.0) {
    return {flag::kNonLattice, FS::Fails, "all atoms at 0"};
  }
  constexpr long kMaxDen = 1000;
  long lcm = 1;
  for (const auto& [x, p] : atoms) {
    const long q = rational_denominator(x / span, kMaxDen, 1e-12);
    if (q == 0) {
      return {flag::kNonLattice, FS::Unknown,
              "atom ratios not resolvable as small rationals in floating point"};
    }
    lcm = std::lcm(lcm, q);
  }
  std::ostringstream os;
  os << "atoms lie in s*Z with s = " << span / static_cast<double>(lcm);
  return {flag::kNonLattice, FS::Fails, os.str()};
}

}  // namespace

AssumptionReport audit(const BranchingSpec& spec, const PerturbationLaw& mu,
                       double theta) {
  using FS = FlagState;
  require(theta > 0.0, "theta must be positive");
  AssumptionReport rep;
  const auto t0 = theta0(spec);
  const auto tail = tail_params(mu);

  if (tail.regularly_varying()) {
    std::ostringstream os;
    os << "pareto tail, x^gamma (1 - F(x)) = " << tail.c_plus
       << " for x >= x_m";
    rep.flags.push_back({flag::kH, FS::Holds, os.str()});
  } else {
    rep.flags.push_back({flag::kH, FS::Fails, "all polynomial moments finite"});
  }

  if (!t0) {
    rep.flags.push_back(
        {flag::kFiniteRMoment, FS::Fails, "theta0 infinite, ratio undefined"});
  } else {
    const double ratio = *t0 / theta;
    std::ostringstream os;
    os << "moment supremum " << tail.finite_moment_sup << " vs theta0/theta = "
       << ratio;
    rep.flags.push_back({flag::kFiniteRMoment,
                         tail.finite_moment_sup > ratio ? FS::Holds : FS::Fails,
                         os.str()});
  }

  const char* exp_reason =
      "catalog displacement has finite exponential moments of every order";
  if (t0) {
    rep.flags.push_back({flag::kL1, FS::Holds, exp_reason});
    rep.flags.push_back({flag::kL2, FS::Holds, exp_reason});
  } else {
    rep.flags.push_back({flag::kL1, FS::Fails, "theta0 infinite"});
    rep.flags.push_back({flag::kL2, FS::Fails, "theta0 infinite"});
  }

  rep.flags.push_back(lattice_flag(spec.displacement));
  rep.flags.push_back({flag::kMuPositiveSupport, FS::Holds,
                       "catalog perturbation laws live on (0, inf)"});
  if (mu.is_point_mass()) {
    rep.flags.push_back({flag::kMuNonDegenerate, FS::Fails,
                         "mu is concentrated on a single point"});
  } else {
    rep.flags.push_back(
        {flag::kMuNonDegenerate, FS::Holds, "mu has a continuous law"});
  }
  rep.flags.push_back(
      {flag::kSurvival, FS::Holds, "offspring law has no mass at 0"});
  rep.flags.push_back({flag::kBigginsLlog, FS::Holds,
                       "bounded brood size and finite exponential moments"});
  return rep;
}

// ---------------------------------------------------------------- regimes

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Below: return "below";
    case Regime::Boundary: return "boundary";
    case Regime::Above: return "above";
  }
  return "?";
}

RegimeSpec classify_regime(const BranchingSpec& spec, const PerturbationLaw& mu,
                           double theta) {
  require(std::isfinite(theta) && theta > 0.0, "theta must be positive");
  const auto t0 = theta0(spec);
  if (!t0) {
    throw Error(ErrorKind::Model,
                "theta0 infinite: no regime is defined for this branching law");
  }
  const double th0 = *t0;
  const double slope0 = nu(spec, th0) / th0;
  const auto tail = tail_params(mu);

  RegimeSpec r{};
  r.theta = theta;
  r.theta0 = th0;
  r.vartheta = std::min(1.0, th0 / theta);
  r.gamma = tail.regularly_varying() ? tail.gamma : 0.0;

  if (tail.regularly_varying()) {
    const double gt = tail.gamma * theta;
    if (std::abs(gt - th0) <= kBoundaryRelTolerance * th0) {
      r.regime = Regime::Boundary;
      r.alpha = slope0;
      r.c_log = -1.0 / (2.0 * th0);
    } else if (gt < th0) {
      r.regime = Regime::Below;
      r.alpha = nu(spec, gt) / gt;
      r.c_log = 0.0;
    } else {
      r.regime = Regime::Above;
      r.alpha = slope0;
      r.c_log = -3.0 / (2.0 * th0);
    }
    return r;
  }

  if (theta > th0 * (1.0 + kBoundaryRelTolerance)) {
    r.regime = Regime::Above;
    r.alpha = slope0;
    r.c_log = -3.0 / (2.0 * th0);
    return r;
  }
  throw Error(ErrorKind::Model,
              "finite-moment perturbation with theta <= theta0 is outside the "
              "regimes handled here");
}

}  // namespace lpmbrw
