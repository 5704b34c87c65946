#ifndef LPMBRW_LOGSUM_HPP
#define LPMBRW_LOGSUM_HPP

#include <cmath>
#include <limits>

namespace lpmbrw {

// Streaming log(sum exp(x_i)). The running sum is kept relative to the
// largest exponent seen so far, so it never overflows.
class LogSumExp {
 public:
  void add(double x) noexcept {
    if (x <= max_) {
      scaled_ += std::exp(x - max_);
    } else {
      scaled_ = scaled_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }

  void merge(const LogSumExp& other) noexcept {
    if (other.empty()) return;
    if (empty()) {
      *this = other;
      return;
    }
    if (other.max_ <= max_) {
      scaled_ += other.scaled_ * std::exp(other.max_ - max_);
    } else {
      scaled_ = scaled_ * std::exp(max_ - other.max_) + other.scaled_;
      max_ = other.max_;
    }
  }

  bool empty() const noexcept { return scaled_ == 0.0; }

  /// -inf when nothing was added.
  double value() const noexcept {
    if (empty()) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(scaled_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_ = 0.0;
};

// Sum of c_i * exp(x_i) with signed coefficients. Stored as a signed
// mantissa times exp(max exponent), since the terms of the derivative
// martingale change sign and span hundreds of orders of magnitude.
class SignedScaledSum {
 public:
  void add(double coeff, double x) noexcept {
    if (x <= max_) {
      mantissa_ += coeff * std::exp(x - max_);
    } else {
      mantissa_ = mantissa_ * std::exp(max_ - x) + coeff;
      max_ = x;
    }
  }

  double mantissa() const noexcept { return mantissa_; }
  double exponent() const noexcept { return max_; }

  double value() const noexcept {
    if (mantissa_ == 0.0) return 0.0;
    return mantissa_ * std::exp(max_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double mantissa_ = 0.0;
};

}  // namespace lpmbrw

#endif  // LPMBRW_LOGSUM_HPP
