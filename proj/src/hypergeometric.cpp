#include "feedresp/hypergeometric.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "feedresp/types.hpp"

namespace feedresp {
namespace {

struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;  // 0 means exact zero
};

long terminating_order(double b) {
  if (!std::isfinite(b) || b > 0.0 || std::floor(b) != b)
    throw DomainError("hyp2f1_terminating: b = " + std::to_string(b) +
                      " is not a nonpositive integer; series does not terminate");
  return static_cast<long>(-b);
}

void check_denominator(double c, long order) {
  if (c <= 0.0 && std::floor(c) == c && static_cast<long>(-c) < order)
    throw DomainError("hyp2f1_terminating: c = " + std::to_string(c) +
                      " makes (c)_k vanish before the series terminates");
}

// log of (c)_n / (d)_n for positive c and d.
double log_pochhammer_ratio(double c, double d, long n) {
  return std::lgamma(c + n) - std::lgamma(c) - std::lgamma(d + n) + std::lgamma(d);
}

SignedLog evaluate(double a, double b, double c, double z) {
  const long order = terminating_order(b);
  check_denominator(c, order);
  if (order == 0 || z == 0.0) return {0.0, 1};

  if (z == 1.0 && c > 0.0 && c - a > 0.0) {
    // Chu-Vandermonde: 2F1(a, -n; c; 1) = (c - a)_n / (c)_n
    return {log_pochhammer_ratio(c - a, c, order), 1};
  }

  if (z > 0.0 && z < 1.0 && c > 0.0 && c - a > 0.0) {
    // Pfaff: terms of 2F1(c - a, -n; c; w), w = z / (z - 1) < 0, are all >= 0.
    // Summed in linear space with periodic rescaling; stops once the
    // remaining terms are provably below 1e-17 of the partial sum.
    const double abs_w = z / (1.0 - z);
    const double ca = c - a;
    const double n = static_cast<double>(order);
    constexpr double kRescale = 1e200;
    double log_scale = 0.0;
    double term = 1.0;
    double sum = 1.0;
    for (long k = 0; k < order; ++k) {
      const double kk = static_cast<double>(k);
      term *= (ca + kk) * (n - kk) / ((c + kk) * (kk + 1.0)) * abs_w;
      sum += term;
      if (sum > kRescale) {
        sum /= kRescale;
        term /= kRescale;
        log_scale += std::log(kRescale);
      }
      // Later ratios are at most |w| (n - j) / (j + 1) * max(1, ca / c).
      const double bound = abs_w * (n - kk - 1.0) / (kk + 2.0) * std::max(1.0, ca / c);
      if (bound < 0.5 && term * bound / (1.0 - bound) < 1e-17 * sum) break;
    }
    return {n * std::log1p(-z) + log_scale + std::log(sum), 1};
  }

  // Direct series with Neumaier compensation.
  double sum = 1.0;
  double comp = 0.0;
  double term = 1.0;
  for (long k = 0; k < order; ++k) {
    const double kk = static_cast<double>(k);
    term *= (a + kk) * (b + kk) / ((c + kk) * (kk + 1.0)) * z;
    const double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  const double value = sum + comp;
  if (value == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
  return {std::log(std::fabs(value)), value > 0.0 ? 1 : -1};
}

}  // namespace

double hyp2f1_terminating(double a, double b, double c, double z) {
  const SignedLog r = evaluate(a, b, c, z);
  if (r.sign == 0) return 0.0;
  return r.sign * std::exp(r.log_abs);
}

double log_hyp2f1_terminating(double a, double b, double c, double z) {
  const SignedLog r = evaluate(a, b, c, z);
  if (r.sign <= 0) throw DomainError("log_hyp2f1_terminating: value is not positive");
  return r.log_abs;
}

}  // namespace feedresp
