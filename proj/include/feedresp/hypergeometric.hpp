#pragma once

namespace feedresp {

/// Terminating Gauss hypergeometric series 2F1(a, b; c; z) for b a
/// nonpositive integer, so the sum stops after |b|+1 terms.
///
/// For z in (0, 1) with c > 0 and c - a > 0 (always the case for the
/// response likelihood) the Pfaff transformation
///   2F1(a, b; c; z) = (1 - z)^{-b} 2F1(c - a, b; c; z / (z - 1))
/// turns the alternating series into one with nonnegative terms, which is
/// summed with rescaling. z = 1 uses the Chu-Vandermonde identity. Other
/// arguments fall back to the direct compensated series.
///
/// Throws DomainError if b is not a nonpositive integer or if c is a
/// nonpositive integer that would make a denominator vanish.
double hyp2f1_terminating(double a, double b, double c, double z);

/// Natural log of hyp2f1_terminating. Throws DomainError if the value is
/// not positive.
double log_hyp2f1_terminating(double a, double b, double c, double z);

}  // namespace feedresp
