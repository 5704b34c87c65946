#ifndef LPMBRW_ENGINE_HPP
#define LPMBRW_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "model.hpp"
#include "perturbation.hpp"

namespace lpmbrw {

struct SimBudget {
  std::uint64_t max_population = std::uint64_t{1} << 24;
  unsigned max_depth = 64;
};

/// Generation-n summary of one replica. Vectors indexed like `thetas`.
struct GenStats {
  unsigned n = 0;
  std::uint64_t population = 0;
  double r_n = 0.0;
  std::vector<double> thetas;
  std::vector<double> log_y_n;  // log sum e^{theta S_v} Y_v; empty without marks
  std::vector<double> log_w_n;  // log W_n(theta)
  std::vector<double> w_n;      // W_n(theta)
  std::optional<double> d_n;    // derivative martingale, when theta0 is finite
  std::optional<double> rstar_direct;   // for thetas[0]
  std::optional<double> rstar_coupled;  // for thetas[0]
};

/// Per-replica seed from an experiment seed and a replica index.
std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) noexcept;

/// Depth-first simulator for one branching law and one mark law. Only the
/// root-to-current path is held in memory. Every public call is a pure
/// function of its arguments and the seed; instances may be shared between
/// threads.
class Simulator {
 public:
  Simulator(BranchingSpec spec, PerturbationLaw mu, SimBudget budget = {});

  const BranchingSpec& spec() const noexcept { return spec_; }
  const PerturbationLaw& mu() const noexcept { return mu_; }
  const SimBudget& budget() const noexcept { return budget_; }
  std::optional<double> theta0() const noexcept { return theta0_; }

  /// Full statistics at generation n. The seed is split into tree, mark and
  /// exponential streams; rstar_direct and rstar_coupled share the tree and
  /// the marks.
  GenStats run_generation(const std::vector<double>& thetas, unsigned n,
                          std::uint64_t seed) const;

  /// max over leaves of S_v + (1/theta) log(Y_v / E_v).
  double sample_rstar_direct(double theta, unsigned n, std::uint64_t seed) const;

  /// (1/theta)(log Y_n(theta) - log E) with a single fresh E.
  double sample_rstar_coupled(double theta, unsigned n,
                              std::uint64_t seed) const;

  /// log Y_n(theta) alone; the quantity behind the coupled sampler.
  double log_y(double theta, unsigned n, std::uint64_t seed) const;

  /// W_n(theta) alone, without marks.
  double additive_martingale(double theta, unsigned n, std::uint64_t seed) const;

  /// D_n alone. Throws ErrorKind::Model when theta0 is infinite.
  double derivative_martingale(unsigned n, std::uint64_t seed) const;

  /// Statistics at every generation 1..n_max of a single tree. No marks are
  /// drawn, so log_y_n is empty.
  std::vector<GenStats> martingale_trajectory(const std::vector<double>& thetas,
                                              unsigned n_max,
                                              std::uint64_t seed) const;

 private:
  void check_budget(unsigned n) const;

  BranchingSpec spec_;
  PerturbationLaw mu_;
  SimBudget budget_;
  std::optional<double> theta0_;
  double nu_theta0_ = 0.0;
};

// Free-function forms of the simulator operations.
GenStats run_generation(const BranchingSpec& spec, const PerturbationLaw& mu,
                        const std::vector<double>& thetas, unsigned n,
                        std::uint64_t seed, const SimBudget& budget = {});
double sample_rstar_direct(const BranchingSpec& spec, const PerturbationLaw& mu,
                           double theta, unsigned n, std::uint64_t seed,
                           const SimBudget& budget = {});
double sample_rstar_coupled(const BranchingSpec& spec, const PerturbationLaw& mu,
                            double theta, unsigned n, std::uint64_t seed,
                            const SimBudget& budget = {});
std::vector<GenStats> martingale_trajectory(const BranchingSpec& spec,
                                            const std::vector<double>& thetas,
                                            unsigned n_max, std::uint64_t seed,
                                            const SimBudget& budget = {});

}  // namespace lpmbrw

#endif  // LPMBRW_ENGINE_HPP
