#include "engine.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "logsum.hpp"

namespace lpmbrw {

std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) noexcept {
  return mix64(mix64(seed) + mix64(replica + 0x51ed270b2d3c61a7ULL));
}

namespace {

// Depth-first walk over one realisation of the tree. For every node the
// brood size is drawn first, then all child displacements, then the children
// are visited in order; the tree stream is consumed identically whichever
// statistics are collected.
class Walker {
 public:
  Walker(const BranchingSpec& spec, unsigned n, std::uint64_t seed,
         const SimBudget& budget)
      : spec_(spec),
        tree_(seed, 0, StreamTag::Tree),
        n_(n),
        budget_(budget),
        paths_(n) {}

  // on_leaf(position) for generation-n nodes only.
  template <class F>
  void leaves(F&& on_leaf) {
    leaves_from(0, 0.0, on_leaf);
  }

  // on_node(depth, position) for every node with 1 <= depth <= n.
  template <class F>
  void nodes(F&& on_node) {
    nodes_from(0, 0.0, on_node);
  }

  std::uint64_t population() const noexcept { return population_; }

 private:
  void count_leaf() {
    if (++population_ > budget_.max_population) {
      std::ostringstream os;
      os << "population at generation " << n_ << " exceeds budget "
         << budget_.max_population;
      throw BudgetExceeded(n_, os.str());
    }
  }

  std::vector<double>& brood(unsigned depth, double pos) {
    const unsigned k = spec_.offspring.sample(tree_);
    auto& kids = paths_[depth];
    kids.resize(k);
    for (auto& x : kids) x = pos + spec_.displacement.sample(tree_);
    return kids;
  }

  template <class F>
  void leaves_from(unsigned depth, double pos, F& on_leaf) {
    if (depth == n_) {
      count_leaf();
      on_leaf(pos);
      return;
    }
    const auto& kids = brood(depth, pos);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      leaves_from(depth + 1, kids[i], on_leaf);
    }
  }

  template <class F>
  void nodes_from(unsigned depth, double pos, F& on_node) {
    if (depth > 0) on_node(depth, pos);
    if (depth == n_) {
      count_leaf();
      return;
    }
    const auto& kids = brood(depth, pos);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      nodes_from(depth + 1, kids[i], on_node);
    }
  }

  const BranchingSpec& spec_;
  Stream tree_;
  unsigned n_;
  const SimBudget& budget_;
  std::vector<std::vector<double>> paths_;
  std::uint64_t population_ = 0;
};

}  // namespace

Simulator::Simulator(BranchingSpec spec, PerturbationLaw mu, SimBudget budget)
    : spec_(std::move(spec)), mu_(std::move(mu)), budget_(budget) {
  require(budget_.max_population > 0 && budget_.max_depth > 0,
          "simulation budget must be positive");
  theta0_ = lpmbrw::theta0(spec_);
  if (theta0_) nu_theta0_ = nu(spec_, *theta0_);
}

void Simulator::check_budget(unsigned n) const {
  if (n > budget_.max_depth) {
    std::ostringstream os;
    os << "generation " << n << " exceeds max_depth " << budget_.max_depth;
    throw BudgetExceeded(n, os.str());
  }
  if (spec_.offspring.deterministic()) {
    const double projected =
        std::pow(static_cast<double>(spec_.offspring.max_count()), n);
    if (projected > static_cast<double>(budget_.max_population)) {
      std::ostringstream os;
      os << "projected population " << projected << " at generation " << n
         << " exceeds budget " << budget_.max_population;
      throw BudgetExceeded(n, os.str());
    }
  }
}

GenStats Simulator::run_generation(const std::vector<double>& thetas,
                                   unsigned n, std::uint64_t seed) const {
  require(!thetas.empty(), "thetas must be non-empty");
  for (double t : thetas) require(t > 0.0, "thetas must be positive");
  check_budget(n);

  const std::size_t m = thetas.size();
  std::vector<LogSumExp> plain(m), marked(m);
  SignedScaledSum deriv;
  double r_n = -std::numeric_limits<double>::infinity();
  double direct = -std::numeric_limits<double>::infinity();
  const double shift0 = static_cast<double>(n) * nu_theta0_;
  const double th0 = theta0_.value_or(0.0);

  Stream marks(seed, 0, StreamTag::Marks);
  Stream leaf_exp(seed, 0, StreamTag::LeafExp);
  Walker walk(spec_, n, seed, budget_);
  walk.leaves([&](double s) {
    r_n = std::max(r_n, s);
    const double log_mark = mu_.log_sample(marks);
    const double log_e = std::log(leaf_exp.exponential());
    for (std::size_t j = 0; j < m; ++j) {
      plain[j].add(thetas[j] * s);
      marked[j].add(thetas[j] * s + log_mark);
    }
    direct = std::max(direct, s + (log_mark - log_e) / thetas[0]);
    if (theta0_) {
      const double u = th0 * s - shift0;
      deriv.add(-u, u);
    }
  });

  GenStats g;
  g.n = n;
  g.population = walk.population();
  g.r_n = r_n;
  g.thetas = thetas;
  for (std::size_t j = 0; j < m; ++j) {
    g.log_y_n.push_back(marked[j].value());
    g.log_w_n.push_back(plain[j].value() - n * nu(spec_, thetas[j]));
    g.w_n.push_back(std::exp(g.log_w_n.back()));
  }
  if (theta0_) g.d_n = deriv.value();
  g.rstar_direct = direct;
  Stream coupled_exp(seed, 0, StreamTag::CoupledExp);
  g.rstar_coupled =
      (g.log_y_n[0] - std::log(coupled_exp.exponential())) / thetas[0];
  return g;
}

double Simulator::sample_rstar_direct(double theta, unsigned n,
                                      std::uint64_t seed) const {
  require(theta > 0.0, "theta must be positive");
  check_budget(n);
  double best = -std::numeric_limits<double>::infinity();
  Stream marks(seed, 0, StreamTag::Marks);
  Stream leaf_exp(seed, 0, StreamTag::LeafExp);
  Walker walk(spec_, n, seed, budget_);
  walk.leaves([&](double s) {
    const double log_mark = mu_.log_sample(marks);
    const double log_e = std::log(leaf_exp.exponential());
    best = std::max(best, s + (log_mark - log_e) / theta);
  });
  return best;
}

double Simulator::log_y(double theta, unsigned n, std::uint64_t seed) const {
  require(theta > 0.0, "theta must be positive");
  check_budget(n);
  LogSumExp acc;
  Stream marks(seed, 0, StreamTag::Marks);
  Walker walk(spec_, n, seed, budget_);
  walk.leaves([&](double s) { acc.add(theta * s + mu_.log_sample(marks)); });
  return acc.value();
}

double Simulator::sample_rstar_coupled(double theta, unsigned n,
                                       std::uint64_t seed) const {
  const double ly = log_y(theta, n, seed);
  Stream coupled_exp(seed, 0, StreamTag::CoupledExp);
  return (ly - std::log(coupled_exp.exponential())) / theta;
}

double Simulator::additive_martingale(double theta, unsigned n,
                                      std::uint64_t seed) const {
  require(theta > 0.0, "theta must be positive");
  check_budget(n);
  LogSumExp acc;
  Walker walk(spec_, n, seed, budget_);
  walk.leaves([&](double s) { acc.add(theta * s); });
  return std::exp(acc.value() - n * nu(spec_, theta));
}

double Simulator::derivative_martingale(unsigned n, std::uint64_t seed) const {
  if (!theta0_) {
    throw Error(ErrorKind::Model, "theta0 infinite: derivative martingale undefined");
  }
  check_budget(n);
  SignedScaledSum acc;
  const double th0 = *theta0_;
  const double shift = n * nu_theta0_;
  Walker walk(spec_, n, seed, budget_);
  walk.leaves([&](double s) {
    const double u = th0 * s - shift;
    acc.add(-u, u);
  });
  return acc.value();
}

std::vector<GenStats> Simulator::martingale_trajectory(
    const std::vector<double>& thetas, unsigned n_max,
    std::uint64_t seed) const {
  require(!thetas.empty(), "thetas must be non-empty");
  require(n_max >= 1, "n_max must be at least 1");
  for (double t : thetas) require(t > 0.0, "thetas must be positive");
  check_budget(n_max);

  const std::size_t m = thetas.size();
  std::vector<std::vector<LogSumExp>> plain(n_max + 1,
                                            std::vector<LogSumExp>(m));
  std::vector<SignedScaledSum> deriv(n_max + 1);
  std::vector<double> r(n_max + 1, -std::numeric_limits<double>::infinity());
  std::vector<std::uint64_t> pop(n_max + 1, 0);
  const double th0 = theta0_.value_or(0.0);

  Walker walk(spec_, n_max, seed, budget_);
  walk.nodes([&](unsigned d, double s) {
    ++pop[d];
    r[d] = std::max(r[d], s);
    for (std::size_t j = 0; j < m; ++j) plain[d][j].add(thetas[j] * s);
    if (theta0_) {
      const double u = th0 * s - d * nu_theta0_;
      deriv[d].add(-u, u);
    }
  });

  std::vector<GenStats> out;
  out.reserve(n_max);
  for (unsigned d = 1; d <= n_max; ++d) {
    GenStats g;
    g.n = d;
    g.population = pop[d];
    g.r_n = r[d];
    g.thetas = thetas;
    for (std::size_t j = 0; j < m; ++j) {
      g.log_w_n.push_back(plain[d][j].value() - d * nu(spec_, thetas[j]));
      g.w_n.push_back(std::exp(g.log_w_n.back()));
    }
    if (theta0_) g.d_n = deriv[d].value();
    out.push_back(std::move(g));
  }
  return out;
}

GenStats run_generation(const BranchingSpec& spec, const PerturbationLaw& mu,
                        const std::vector<double>& thetas, unsigned n,
                        std::uint64_t seed, const SimBudget& budget) {
  return Simulator(spec, mu, budget).run_generation(thetas, n, seed);
}

double sample_rstar_direct(const BranchingSpec& spec, const PerturbationLaw& mu,
                           double theta, unsigned n, std::uint64_t seed,
                           const SimBudget& budget) {
  return Simulator(spec, mu, budget).sample_rstar_direct(theta, n, seed);
}

double sample_rstar_coupled(const BranchingSpec& spec, const PerturbationLaw& mu,
                            double theta, unsigned n, std::uint64_t seed,
                            const SimBudget& budget) {
  return Simulator(spec, mu, budget).sample_rstar_coupled(theta, n, seed);
}

std::vector<GenStats> martingale_trajectory(const BranchingSpec& spec,
                                            const std::vector<double>& thetas,
                                            unsigned n_max, std::uint64_t seed,
                                            const SimBudget& budget) {
  return Simulator(spec, PerturbationLaw::point_mass(1.0), budget)
      .martingale_trajectory(thetas, n_max, seed);
}

}  // namespace lpmbrw
