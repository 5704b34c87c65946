#ifndef LPMBRW_KS_HPP
#define LPMBRW_KS_HPP

#include <span>

namespace lpmbrw {

struct KsResult {
  double stat;
  double p;
};

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_sf(double lambda);

/// Two-sample KS distance between sorted samples, with `shift_b` added to
/// every element of b.
double ks_statistic_sorted(std::span<const double> a, std::span<const double> b,
                           double shift_b = 0.0);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (Stephens' small-sample correction on the effective size nm/(n+m)).
KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys);

}  // namespace lpmbrw

#endif  // LPMBRW_KS_HPP
