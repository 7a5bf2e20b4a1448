#ifndef DELAYSTAB_CONSTANTS_HPP
#define DELAYSTAB_CONSTANTS_HPP

namespace delaystab::decay {

// Explicit constants of the exponential-decay estimate
//     F(t) <= K exp(-mu_tilde t) F(0)
// for the auxiliary damped system, and the perturbation bound that carries
// it over to the delayed system with rate mu = mu_tilde - K*xi*c2^2. All
// formulas take the observability constant c (over a horizon T) and the
// energy weight xi > 1 as inputs.

// C0 = max{ 2c, (32cTC2^2 + xi)/(xi - 1), 32cC2^2 T xi^2/(xi - 1) }.
double c_zero(double c_obs, double t_horizon, double xi, double c2);

// K = (C0 + 1)/C0.
double decay_k(double c_zero);

// mu_tilde = (1/2T) ln((C0 + 1)/C0).
double decay_mu_tilde(double c_zero, double t_horizon);

// h(s) = (s/(s+1)) ln((s+1)/s); positive, maximal value 1/e at s = 1/(e-1).
double h(double s);

// Largest delay-feedback norm beta for which the small-gain condition holds:
// solves 2*xi*beta^2*T = h(C0(beta)) by bisection to residual < 1e-12.
double beta_threshold(double c_obs, double t_horizon, double xi);

// True iff xi*c2^2 < h(C0)/(2T), i.e. the effective rate is positive.
bool check_small_gain(double xi, double c2, double t_horizon, double c_zero);

// mu = mu_tilde - K*xi*c2^2.
double effective_mu(double mu_tilde, double big_k, double xi, double c2);

struct DecayConstants {
    double c_obs = 0.0;
    double t_horizon = 0.0;
    double xi = 0.0;
    double c2 = 0.0;
    double c_zero = 0.0;
    double big_k = 0.0;
    double mu_tilde = 0.0;
    double mu_effective = 0.0;
    bool stable = false;
};

DecayConstants compute_decay_constants(double c_obs, double t_horizon, double xi, double c2);

}  // namespace delaystab::decay

#endif  // DELAYSTAB_CONSTANTS_HPP
