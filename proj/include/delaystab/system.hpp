#ifndef DELAYSTAB_SYSTEM_HPP
#define DELAYSTAB_SYSTEM_HPP

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "delaystab/delayline.hpp"

namespace delaystab {

// Semi-discretization of the second-order evolution equation
//
//     u_tt + A u + B1 B1^T u_t + B2 B2^T u_t(t - tau) = 0
//
// on R^N with identity mass. `stiffness` is the discretization of the
// positive self-adjoint operator A; the damping maps act through their
// transposes on the velocity. States carry sqrt(mass)-scaled nodal values,
// so Euclidean norms approximate the continuous L2 norms and the energies
// below approximate their continuous counterparts directly.
class SemiDiscreteSystem {
public:
    // Validates: stiffness symmetric positive definite, tau > 0, xi > 1,
    // consistent map dimensions. ||B2|| is computed once from the largest
    // singular value of b2_map.
    SemiDiscreteSystem(Eigen::MatrixXd stiffness, Eigen::MatrixXd b1_map,
                       Eigen::MatrixXd b2_map, double tau, double xi);

    int n_dof() const { return static_cast<int>(stiffness_.rows()); }
    const Eigen::MatrixXd& stiffness() const { return stiffness_; }
    const Eigen::MatrixXd& b1_map() const { return b1_map_; }
    const Eigen::MatrixXd& b2_map() const { return b2_map_; }
    double tau() const { return tau_; }
    double xi() const { return xi_; }
    double b2_norm() const { return b2_norm_; }

    int m1() const { return static_cast<int>(b1_map_.cols()); }
    int m2() const { return static_cast<int>(b2_map_.cols()); }

    // B_i^T v, the U_i-space traces of a velocity vector.
    Eigen::VectorXd b1_trace(const Eigen::VectorXd& v) const;
    Eigen::VectorXd b2_trace(const Eigen::VectorXd& v) const;

private:
    Eigen::MatrixXd stiffness_;
    Eigen::MatrixXd b1_map_;
    Eigen::MatrixXd b2_map_;
    double tau_;
    double xi_;
    double b2_norm_;
};

// Displacement and velocity at one time level.
struct State {
    double t = 0.0;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
};

struct EnergyBreakdown {
    double e_total = 0.0;       // E(t) = E_S + delay term
    double e_standard = 0.0;    // E_S(t)
    double e_delay = 0.0;       // (xi/2) * integral of ||B2^T v||^2 over [t-tau, t]
    double p_b1 = 0.0;          // ||B1^T v(t)||^2
    double p_b2_now = 0.0;      // ||B2^T v(t)||^2
    double p_b2_delayed = 0.0;  // ||B2^T v(t - tau)||^2
};

// Uniformly spaced time series of EnergyBreakdown rows.
class EnergyTrace {
public:
    struct Row {
        double t;
        EnergyBreakdown e;
    };

    explicit EnergyTrace(double dt);

    // Appends a row; the timestamp must extend the uniform grid within 1e-12.
    void append(double t, const EnergyBreakdown& e);

    double dt() const { return dt_; }
    std::size_t size() const { return rows_.size(); }
    const Row& operator[](std::size_t i) const { return rows_[i]; }
    const std::vector<Row>& rows() const { return rows_; }

private:
    double dt_;
    std::vector<Row> rows_;
};

// E_S = (1/2)(u^T A u + v^T v).
double standard_energy(const SemiDiscreteSystem& sys, const State& s);

// Full energy with the delay term integrated by the trapezoid rule over the
// squared trace norms `window_sq` sampled uniformly at `spacing`, oldest
// first. The window must span exactly [t - tau, t].
EnergyBreakdown total_energy_from_window(const SemiDiscreteSystem& sys, const State& s,
                                         std::span<const double> window_sq, double spacing);

// Same, reading the window from a history buffer positioned at s.t.
EnergyBreakdown total_energy(const SemiDiscreteSystem& sys, const State& s,
                             const HistoryBuffer& hist);

// Upper bound for E'(t): -p_b1 + ((1+xi)/2) p_b2_now - ((xi-1)/2) p_b2_delayed.
// Can be positive; the delayed term injects energy in general.
double dissipation_bound(const SemiDiscreteSystem& sys, const State& s,
                         const Eigen::VectorXd& delayed);
double dissipation_bound_from_powers(double xi, double p_b1, double p_b2_now,
                                     double p_b2_delayed);

// Upper bound for F'(t) on the auxiliary system with the extra xi*B2*B2^T
// damping: -p_b1 - ((xi-1)/2)(p_b2_now + p_b2_delayed). Nonpositive for xi > 1.
double aux_dissipation_bound(const SemiDiscreteSystem& sys, const State& s,
                             const Eigen::VectorXd& delayed);
double aux_dissipation_bound_from_powers(double xi, double p_b1, double p_b2_now,
                                         double p_b2_delayed);

}  // namespace delaystab

#endif  // DELAYSTAB_SYSTEM_HPP
