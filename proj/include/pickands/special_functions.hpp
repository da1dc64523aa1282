#pragma once

namespace pickands {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kE = 2.718281828459045235360287471352662498;
inline constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

/// Standard normal density.
double normal_pdf(double x) noexcept;

/// Standard normal distribution function, via erfc so both tails keep
/// full relative precision. Saturates to 0/1 far in the tails.
double normal_cdf(double x) noexcept;

/// log Phi(x). Uses log1p on the upper side and a Mills-ratio continued
/// fraction below x = -10, so it stays finite far past where Phi underflows.
double log_normal_cdf(double x) noexcept;

/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// log Gamma(x) for x > 0. Throws DomainError otherwise.
double log_gamma(double x);

/// log(exp(a) - exp(b)) for a >= b; -inf when a == b.
double log_diff_exp(double a, double b) noexcept;

/// log(1 - exp(x)) for x <= 0.
double log1m_exp(double x) noexcept;

}  // namespace pickands
