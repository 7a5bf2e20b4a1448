#ifndef DELAYSTAB_ANALYSIS_HPP
#define DELAYSTAB_ANALYSIS_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

#include "delaystab/integrator.hpp"
#include "delaystab/system.hpp"

namespace delaystab {

struct DecayEstimate {
    double mu_hat = 0.0;    // fitted rate: E(t) ~ k_hat * exp(-mu_hat * t)
    double k_hat = 0.0;
    double r_squared = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    std::size_t n_points = 0;
};

// Least-squares line through (t, ln E) at the local maxima of the total
// energy inside [window_start, window_end]. Monotone traces have no
// interior maxima; the fit then uses every sample in the window.
DecayEstimate fit_decay(const EnergyTrace& trace, double window_start, double window_end);

struct ObservabilityEstimate {
    double c_hat = 0.0;  // max over the ensemble of E_S(0) / integral
    double t_horizon = 0.0;
    int n_samples = 0;
    bool is_lower_bound = true;  // finite ensemble: the true constant is >= c_hat
};

// Estimates the observability constant of the damped, delay-free system by
// simulating an ensemble: the lowest ceil(n/2) stiffness eigenmodes plus
// seeded random data, all normalized to E_S(0) = 1. Requires B2 = 0.
// A trajectory with zero feedback integral yields c_hat = +inf.
ObservabilityEstimate estimate_observability(const SemiDiscreteSystem& sys, double t_horizon,
                                             int n_samples, std::uint64_t seed);

struct SpectralReport {
    std::vector<std::complex<double>> eigenvalues;
    double abscissa = 0.0;  // max real part
    int n_rho = 0;
};

// Dense generator of the augmented first-order system (u, v, z) with the
// delayed trace carried by n_rho upwind cells on (0, 1]; the inflow value
// z(0) = B2^T v is eliminated into a coupling block. Size 2N + n_rho*m2.
Eigen::MatrixXd assemble_generator(const SemiDiscreteSystem& sys, int n_rho);

// All eigenvalues of a real dense matrix via the QR algorithm.
SpectralReport spectral_abscissa(const Eigen::MatrixXd& matrix, int n_rho = 0);

}  // namespace delaystab

#endif  // DELAYSTAB_ANALYSIS_HPP
