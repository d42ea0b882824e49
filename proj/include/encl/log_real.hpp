#pragma once

#include <cmath>
#include <limits>

namespace encl {

/// Signed magnitude stored as (sign, log|x|).  All indicator arithmetic
/// involving exponentially growing probes runs through this type so that
/// intermediate products like e^{sqrt(tau)R} * e^{sqrt(tau)R} never leave
/// the representable range.
class LogReal {
public:
  LogReal() : log_abs_(-std::numeric_limits<double>::infinity()), sign_(0) {}

  LogReal(int sign, double log_abs) : log_abs_(log_abs), sign_(sign) {
    if (sign_ == 0) log_abs_ = -std::numeric_limits<double>::infinity();
  }

  static LogReal from_double(double x) {
    if (x == 0.0) return LogReal();
    return LogReal(x > 0 ? 1 : -1, std::log(std::abs(x)));
  }

  static LogReal zero() { return LogReal(); }

  double log_abs() const { return log_abs_; }
  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }

  double to_double() const {
    if (sign_ == 0) return 0.0;
    return sign_ * std::exp(log_abs_);
  }

  LogReal operator*(const LogReal& o) const {
    if (sign_ == 0 || o.sign_ == 0) return LogReal();
    return LogReal(sign_ * o.sign_, log_abs_ + o.log_abs_);
  }

  LogReal operator/(const LogReal& o) const {
    return LogReal(sign_ * o.sign_, log_abs_ - o.log_abs_);
  }

  LogReal operator-() const { return LogReal(-sign_, log_abs_); }

  LogReal operator+(const LogReal& o) const {
    if (sign_ == 0) return o;
    if (o.sign_ == 0) return *this;
    const double hi = std::max(log_abs_, o.log_abs_);
    const double lo = std::min(log_abs_, o.log_abs_);
    const int hi_sign = (log_abs_ >= o.log_abs_) ? sign_ : o.sign_;
    const int lo_sign = (log_abs_ >= o.log_abs_) ? o.sign_ : sign_;
    const double r = std::exp(lo - hi);
    if (hi_sign == lo_sign) return LogReal(hi_sign, hi + std::log1p(r));
    if (r == 1.0) return LogReal();
    return LogReal(hi_sign, hi + std::log1p(-r));
  }

  LogReal operator-(const LogReal& o) const { return *this + (-o); }

private:
  double log_abs_;
  int sign_;
};

inline LogReal log_scaled_exp(double exponent, double factor) {
  // factor * e^{exponent} without forming e^{exponent}
  if (factor == 0.0) return LogReal::zero();
  return LogReal(factor > 0 ? 1 : -1, exponent + std::log(std::abs(factor)));
}

}  // namespace encl
