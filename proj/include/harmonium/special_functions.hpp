#pragma once

namespace harmonium {

/// ln of the unnormalized unit-interval gamma integral, ln ∫_0^1 t^{a-1} e^{-z t} dt.
/// Valid for a > 0 and any real z (negative rates included).
double log_gamma_integral(double a, double z);

/// ln ∫_lower^1 t^{a-1} e^{-z t} dt for lower in [0, 1).
double log_gamma_tail_integral(double a, double z, double lower);

/// ln ∫_0^upper t^{a-1} e^{-z t} dt for upper in (0, 1].
double log_gamma_head_integral(double a, double z, double upper);

/// Normalized incomplete gamma over the unit interval,
/// γ*(a, z) = (1/Γ(a)) ∫_0^1 t^{a-1} e^{-z t} dt.
/// Throws NumericalError when the result is not representable as a double;
/// use log_gamma_integral in that regime.
double lower_incomplete_gamma_star(double a, double z);

/// Numerically stable ln(1 + e^x).
double softplus(double x);

/// Logistic sigmoid 1 / (1 + e^{-x}).
double sigmoid(double x);

}  // namespace harmonium
