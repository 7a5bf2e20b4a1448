#ifndef DELAYSTAB_DELAYLINE_HPP
#define DELAYSTAB_DELAYLINE_HPP

#include <Eigen/Dense>

#include <vector>

namespace delaystab {

// Two interchangeable carriers for the delayed velocity trace on the moving
// window [t - tau, t]: a ring buffer sampling the trace at grid times, and a
// transport field z(rho, t) advected on rho in [0, 1] by an upwind scheme.
// When the CFL number dt / (tau * d_rho) equals 1 the upwind update is a pure
// copy and both carriers produce identical samples, bit for bit.

class HistoryBuffer {
public:
    // f0 holds exactly round(tau/dt)+1 samples of the trace at the grid
    // times -tau, -tau+dt, ..., 0, oldest first. tau/dt must be an integer
    // within 1e-9.
    HistoryBuffer(const std::vector<Eigen::VectorXd>& f0, double dt, double tau);

    // Sample at head_time() - tau (the oldest entry).
    const Eigen::VectorXd& delayed() const;

    // Sample at (head_time() + dt) - tau: the value the equation of motion
    // at the next time level needs. Known before the next push.
    const Eigen::VectorXd& upcoming_delayed() const;

    // Advances the window by dt, stores `current` as the newest sample,
    // evicts the oldest and returns the sample now exactly tau in the past.
    Eigen::VectorXd push_and_sample(const Eigen::VectorXd& current);

    // Squared U2-norms of the window samples, oldest first (size capacity()).
    void window_squared_norms(std::vector<double>& out) const;

    double head_time() const { return head_time_; }
    double dt() const { return dt_; }
    double tau() const { return tau_; }
    int capacity() const { return static_cast<int>(ring_.size()); }
    int trace_dim() const { return trace_dim_; }

private:
    const Eigen::VectorXd& at_lag(int k) const;  // sample k steps in the past

    std::vector<Eigen::VectorXd> ring_;
    std::vector<double> sq_norms_;  // cached squaredNorm per ring slot
    int head_ = 0;                  // index of the newest sample
    int trace_dim_ = 0;
    double dt_ = 0.0;
    double tau_ = 0.0;
    double head_time_ = 0.0;
};

class TransportField {
public:
    // Zero field with m_rho grid points on [0, 1] for an m2-dimensional trace.
    TransportField(int m_rho, int m2);

    // Field initialized from history samples: row j carries the trace value
    // at -tau*rho_j, i.e. f0[K - j] with f0 ordered oldest first. Requires
    // f0.size() == m_rho.
    static TransportField from_history(const std::vector<Eigen::VectorXd>& f0);

    // One upwind step of tau * z_t + z_rho = 0 with inflow z(0) = `inflow`.
    // nu = dt / (tau * d_rho) must satisfy nu <= 1; |nu - 1| <= 1e-9 is
    // treated as the exact shift (rows copied, no arithmetic).
    void step(const Eigen::VectorXd& inflow, double dt, double tau);

    // z(1, t), the approximation of the delayed trace.
    Eigen::VectorXd tail() const;

    int m_rho() const { return static_cast<int>(values_.rows()); }
    int trace_dim() const { return static_cast<int>(values_.cols()); }
    double d_rho() const { return 1.0 / (m_rho() - 1); }

    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::MatrixXd& values() { return values_; }

private:
    Eigen::MatrixXd values_;  // m_rho x m2, row 0 = inflow end
};

// Functional forms of the stepping operations.
Eigen::VectorXd push_and_sample(HistoryBuffer& buf, const Eigen::VectorXd& current);
TransportField step_transport(const TransportField& field, const Eigen::VectorXd& inflow,
                              double dt, double tau);
Eigen::VectorXd tail(const TransportField& field);

}  // namespace delaystab

#endif  // DELAYSTAB_DELAYLINE_HPP
