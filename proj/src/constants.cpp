#include "delaystab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delaystab::decay {

namespace {

void check_domain(double c_obs, double t_horizon, double xi) {
    if (!(c_obs > 0.0)) {
        throw std::domain_error("decay: observability constant must be positive");
    }
    if (!(t_horizon > 0.0)) {
        throw std::domain_error("decay: horizon T must be positive");
    }
    if (!(xi > 1.0)) {
        throw std::domain_error("decay: xi must exceed 1");
    }
}

}  // namespace

double c_zero(double c_obs, double t_horizon, double xi, double c2) {
    check_domain(c_obs, t_horizon, xi);
    if (c2 < 0.0) {
        throw std::domain_error("decay: C2 must be nonnegative");
    }
    const double c2sq = c2 * c2;
    const double first = 2.0 * c_obs;
    const double second = (32.0 * c_obs * t_horizon * c2sq + xi) / (xi - 1.0);
    const double third = 32.0 * c_obs * c2sq * t_horizon * xi * xi / (xi - 1.0);
    return std::max({first, second, third});
}

double decay_k(double c_zero) {
    if (!(c_zero > 0.0)) {
        throw std::domain_error("decay: C0 must be positive");
    }
    return (c_zero + 1.0) / c_zero;
}

double decay_mu_tilde(double c_zero, double t_horizon) {
    if (!(c_zero > 0.0) || !(t_horizon > 0.0)) {
        throw std::domain_error("decay: C0 and T must be positive");
    }
    return std::log((c_zero + 1.0) / c_zero) / (2.0 * t_horizon);
}

double h(double s) {
    if (!(s > 0.0)) {
        throw std::domain_error("decay: h is defined for s > 0");
    }
    return s / (s + 1.0) * std::log((s + 1.0) / s);
}

double beta_threshold(double c_obs, double t_horizon, double xi) {
    check_domain(c_obs, t_horizon, xi);
    // C0(0) = max{2c, xi/(xi-1)} > 1/(e-1), so h(C0(beta)) is nonincreasing
    // in beta while the left side 2*xi*beta^2*T grows from zero: exactly one
    // sign change on the bracket.
    const double c0_at_zero = c_zero(c_obs, t_horizon, xi, 0.0);
    auto residual = [&](double beta) {
        return 2.0 * xi * beta * beta * t_horizon - h(c_zero(c_obs, t_horizon, xi, beta));
    };
    double lo = 0.0;
    double hi = std::sqrt(h(c0_at_zero) / (2.0 * xi * t_horizon));
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (residual(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

bool check_small_gain(double xi, double c2, double t_horizon, double c_zero) {
    if (!(xi > 1.0)) {
        throw std::domain_error("decay: xi must exceed 1");
    }
    return xi * c2 * c2 < h(c_zero) / (2.0 * t_horizon);
}

double effective_mu(double mu_tilde, double big_k, double xi, double c2) {
    return mu_tilde - big_k * xi * c2 * c2;
}

DecayConstants compute_decay_constants(double c_obs, double t_horizon, double xi, double c2) {
    DecayConstants out;
    out.c_obs = c_obs;
    out.t_horizon = t_horizon;
    out.xi = xi;
    out.c2 = c2;
    out.c_zero = c_zero(c_obs, t_horizon, xi, c2);
    out.big_k = decay_k(out.c_zero);
    out.mu_tilde = decay_mu_tilde(out.c_zero, t_horizon);
    out.mu_effective = effective_mu(out.mu_tilde, out.big_k, xi, c2);
    out.stable = check_small_gain(xi, c2, t_horizon, out.c_zero);
    return out;
}

}  // namespace delaystab::decay
