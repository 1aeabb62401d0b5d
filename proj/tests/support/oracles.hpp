#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "harmonium/model.hpp"
#include "harmonium/rng.hpp"

namespace oracle {

using harmonium::GammaParams;
using harmonium::ModelParameters;
using harmonium::VisibleState;

/// Tanh-sinh quadrature on [a, b], split into `pieces` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b, std::size_t pieces = 8,
                 double tol = 1e-13);

/// Unnormalized gamma integrand x^{α-1} e^{-βx} scaled by e^{-shift} to stay representable.
double gamma_kernel(double x, const GammaParams& p, double shift = 0.0);
/// Log of the peak of the unnormalized gamma kernel over [lo, 1].
double gamma_kernel_log_peak(const GammaParams& p, double lo = 0.0);
/// CDF of the gamma density renormalized to [lo, 1], by quadrature.
double interval_gamma_cdf(double x, const GammaParams& p, double lo = 0.0);

/// KS p-value of draws against the [lo, 1]-renormalized gamma law, integrating the density
/// cumulatively between consecutive sorted draws.
double ks_test_interval_gamma(std::vector<double> draws, const GammaParams& p, double lo = 0.0);

/// One-sample KS statistic of `sample` against `cdf`.
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);
/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
double ks_pvalue(double statistic, double n_effective);
double ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Upper tail of the χ² distribution.
double chi_square_pvalue(double statistic, double dof);

/// Energy written out term by term, independent of the library's grouping into φ.
double reference_energy(const VisibleState& x, const std::vector<double>& h, const ModelParameters& theta);
/// All 2^n binary vectors, in counting order.
std::vector<std::vector<double>> latent_states(std::size_t n);
/// ln Σ_h e^{-E(x,h)} by enumeration.
double enumerate_log_marginal(const VisibleState& x, const ModelParameters& theta);
/// p(h_j = 1 | x) by enumeration.
std::vector<double> enumerate_latent_posterior(const VisibleState& x, const ModelParameters& theta);

ModelParameters random_parameters(std::size_t na, std::size_t nb, std::size_t nc, std::size_t nh,
                                  harmonium::RngStream& rng, double scale = 1.0);
VisibleState random_visible(std::size_t na, std::size_t nb, std::size_t nc, harmonium::RngStream& rng);

/// Kendall's τ between index order and values.
double kendall_tau_trend(const std::vector<double>& values);

}  // namespace oracle
