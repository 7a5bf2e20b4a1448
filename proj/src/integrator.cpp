#include "delaystab/integrator.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace delaystab {

namespace {

void check_params(const SchemeParams& p, const SemiDiscreteSystem& sys) {
    if (!(p.dt > 0.0)) {
        throw std::invalid_argument("SchemeParams: dt must be positive");
    }
    if (p.newmark_gamma < 0.5) {
        throw std::invalid_argument("SchemeParams: newmark_gamma must be >= 1/2");
    }
    const double ratio = sys.tau() / p.dt;
    if (std::abs(ratio - std::llround(ratio)) > 1e-9) {
        throw std::invalid_argument("SchemeParams: dt must divide tau (integer ratio)");
    }
}

}  // namespace

NewmarkStepper::NewmarkStepper(const SemiDiscreteSystem& sys, const SchemeParams& params,
                               const State& init, const Eigen::VectorXd& delayed0)
    : sys_(sys), params_(params), state_(init) {
    check_params(params_, sys_);
    if (init.u.size() != sys.n_dof() || init.v.size() != sys.n_dof()) {
        throw std::invalid_argument("NewmarkStepper: initial state dimension mismatch");
    }
    if (delayed0.size() != sys.m2()) {
        throw std::invalid_argument("NewmarkStepper: delayed trace dimension mismatch");
    }
    const int n = sys.n_dof();
    damping_ = sys.b1_map() * sys.b1_map().transpose();
    if (params_.mode == SystemMode::Auxiliary) {
        damping_ += sys.xi() * sys.b2_map() * sys.b2_map().transpose();
    }
    has_damping_ = sys.m1() > 0 || (params_.mode == SystemMode::Auxiliary && sys.m2() > 0);
    has_delay_ = sys.m2() > 0;

    Eigen::MatrixXd system_matrix = params_.newmark_beta * params_.dt * params_.dt *
                                    sys.stiffness();
    if (has_damping_) {
        system_matrix += params_.newmark_gamma * params_.dt * damping_;
    }
    system_matrix += Eigen::MatrixXd::Identity(n, n);
    solver_.compute(system_matrix);
    if (solver_.info() != Eigen::Success) {
        throw std::runtime_error("NewmarkStepper: system matrix factorization failed");
    }
    accel_ = force(state_.u, state_.v, delayed0);
}

Eigen::VectorXd NewmarkStepper::force(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                                      const Eigen::VectorXd& delayed) const {
    Eigen::VectorXd f = -(sys_.stiffness() * u);
    if (has_damping_) {
        f.noalias() -= damping_ * v;
    }
    if (has_delay_) {
        f.noalias() -= sys_.b2_map() * delayed;
    }
    return f;
}

void NewmarkStepper::advance(const Eigen::VectorXd& delayed_next) {
    if (delayed_next.size() != sys_.m2()) {
        throw std::invalid_argument("NewmarkStepper: delayed trace dimension mismatch");
    }
    const double dt = params_.dt;
    const double beta = params_.newmark_beta;
    const double gamma = params_.newmark_gamma;

    const Eigen::VectorXd u_pred = state_.u + dt * state_.v + dt * dt * (0.5 - beta) * accel_;
    const Eigen::VectorXd v_pred = state_.v + dt * (1.0 - gamma) * accel_;

    accel_ = solver_.solve(force(u_pred, v_pred, delayed_next));
    state_.u = u_pred + beta * dt * dt * accel_;
    state_.v = v_pred + gamma * dt * accel_;
    state_.t += dt;
}

namespace {

// Uniform access to the two delay-trace carriers during a run. The
// window-norm bookkeeping is shared so both mechanisms feed the energy
// quadrature identical numbers.
class DelayChannel {
public:
    virtual ~DelayChannel() = default;
    virtual const Eigen::VectorXd& current_delayed() const = 0;
    virtual Eigen::VectorXd upcoming_delayed() const = 0;
    virtual void advance(const Eigen::VectorXd& inflow) = 0;
    virtual void window_squared_norms(std::vector<double>& out) const = 0;
};

class BufferChannel final : public DelayChannel {
public:
    BufferChannel(const std::vector<Eigen::VectorXd>& f0, double dt, double tau)
        : buf_(f0, dt, tau) {}

    const Eigen::VectorXd& current_delayed() const override { return buf_.delayed(); }
    Eigen::VectorXd upcoming_delayed() const override { return buf_.upcoming_delayed(); }
    void advance(const Eigen::VectorXd& inflow) override { buf_.push_and_sample(inflow); }
    void window_squared_norms(std::vector<double>& out) const override {
        buf_.window_squared_norms(out);
    }

private:
    HistoryBuffer buf_;
};

class TransportChannel final : public DelayChannel {
public:
    TransportChannel(const std::vector<Eigen::VectorXd>& f0, double dt, double tau)
        : field_(TransportField::from_history(f0)), dt_(dt), tau_(tau) {
        // m_rho = round(tau/dt)+1 makes the CFL number exactly 1.
        sq_norms_.reserve(f0.size());
        for (const auto& sample : f0) {
            sq_norms_.push_back(sample.squaredNorm());
        }
        delayed_ = field_.tail();
    }

    const Eigen::VectorXd& current_delayed() const override { return delayed_; }

    Eigen::VectorXd upcoming_delayed() const override {
        // The exact shift moves row m-2 into the tail on the next step.
        return field_.values().row(field_.m_rho() - 2).transpose();
    }

    void advance(const Eigen::VectorXd& inflow) override {
        field_.step(inflow, dt_, tau_);
        delayed_ = field_.tail();
        sq_norms_.erase(sq_norms_.begin());
        sq_norms_.push_back(inflow.squaredNorm());
    }

    void window_squared_norms(std::vector<double>& out) const override { out = sq_norms_; }

private:
    TransportField field_;
    Eigen::VectorXd delayed_;
    std::vector<double> sq_norms_;  // oldest first, tracks the rho grid
    double dt_;
    double tau_;
};

double bound_from_breakdown(SystemMode mode, double xi, const EnergyBreakdown& e) {
    return mode == SystemMode::Plain
               ? dissipation_bound_from_powers(xi, e.p_b1, e.p_b2_now, e.p_b2_delayed)
               : aux_dissipation_bound_from_powers(xi, e.p_b1, e.p_b2_now, e.p_b2_delayed);
}

}  // namespace

std::vector<Eigen::VectorXd> constant_history(const Eigen::VectorXd& sample, double dt,
                                              double tau) {
    const double ratio = tau / dt;
    const long long k = std::llround(ratio);
    if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9) {
        throw std::invalid_argument("constant_history: tau/dt must be an integer");
    }
    return std::vector<Eigen::VectorXd>(static_cast<std::size_t>(k) + 1, sample);
}

SimulationResult simulate(const SemiDiscreteSystem& sys, const State& init,
                          const std::vector<Eigen::VectorXd>& f0, double t_final,
                          const SchemeParams& params, DelayMechanism mechanism,
                          bool keep_trajectory) {
    check_params(params, sys);
    if (!(t_final > 0.0)) {
        throw std::invalid_argument("simulate: t_final must be positive");
    }
    const long long n_steps = std::llround(t_final / params.dt);
    if (n_steps < 1) {
        throw std::invalid_argument("simulate: t_final shorter than one step");
    }

    std::unique_ptr<DelayChannel> channel;
    if (mechanism == DelayMechanism::Buffer) {
        channel = std::make_unique<BufferChannel>(f0, params.dt, sys.tau());
    } else {
        channel = std::make_unique<TransportChannel>(f0, params.dt, sys.tau());
    }

    NewmarkStepper stepper(sys, params, init, channel->current_delayed());

    SimulationResult result{EnergyTrace(params.dt), {}, init, {}};
    result.bounds.reserve(static_cast<std::size_t>(n_steps) + 1);
    if (keep_trajectory) {
        result.trajectory.reserve(static_cast<std::size_t>(n_steps) + 1);
    }

    std::vector<double> window;
    auto record = [&](const State& s) {
        channel->window_squared_norms(window);
        const EnergyBreakdown e = total_energy_from_window(sys, s, window, params.dt);
        if (!std::isfinite(e.e_total)) {
            throw std::runtime_error("simulate: non-finite energy (diverged)");
        }
        result.trace.append(s.t, e);
        result.bounds.push_back(bound_from_breakdown(params.mode, sys.xi(), e));
        if (keep_trajectory) {
            result.trajectory.push_back(s);
        }
    };

    record(stepper.state());
    for (long long step = 0; step < n_steps; ++step) {
        stepper.advance(channel->upcoming_delayed());
        channel->advance(sys.b2_trace(stepper.state().v));
        record(stepper.state());
    }
    result.final_state = stepper.state();
    return result;
}

DissipationReport verify_dissipation(const EnergyTrace& trace, std::span<const double> bounds,
                                     double slack) {
    if (trace.size() < 2) {
        throw std::invalid_argument("verify_dissipation: trace needs at least two rows");
    }
    if (bounds.size() + 1 < trace.size()) {
        throw std::invalid_argument("verify_dissipation: one bound per step required");
    }
    DissipationReport report;
    report.slack = slack;
    report.max_excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        const double derivative = (trace[k + 1].e.e_total - trace[k].e.e_total) / trace.dt();
        const double excess = derivative - bounds[k];
        report.max_excess = std::max(report.max_excess, excess);
        if (excess > slack) {
            ++report.violations;
        }
        ++report.checked;
    }
    return report;
}

double estimate_slack_coefficient(const EnergyTrace& coarse, std::span<const double> bounds) {
    const DissipationReport report = verify_dissipation(coarse, bounds, 0.0);
    return 2.0 * std::max(report.max_excess, 0.0) / coarse.dt();
}

}  // namespace delaystab
