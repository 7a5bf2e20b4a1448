#include "delaystab/system.hpp"

#include <cmath>
#include <stdexcept>

namespace delaystab {

SemiDiscreteSystem::SemiDiscreteSystem(Eigen::MatrixXd stiffness, Eigen::MatrixXd b1_map,
                                       Eigen::MatrixXd b2_map, double tau, double xi)
    : stiffness_(std::move(stiffness)),
      b1_map_(std::move(b1_map)),
      b2_map_(std::move(b2_map)),
      tau_(tau),
      xi_(xi) {
    const auto n = stiffness_.rows();
    if (n < 1 || stiffness_.cols() != n) {
        throw std::invalid_argument("SemiDiscreteSystem: stiffness must be square and nonempty");
    }
    const double scale = stiffness_.cwiseAbs().maxCoeff();
    const double asym = (stiffness_ - stiffness_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1.0)) {
        throw std::invalid_argument("SemiDiscreteSystem: stiffness is not symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(stiffness_);
    if (llt.info() != Eigen::Success) {
        throw std::invalid_argument("SemiDiscreteSystem: stiffness is not positive definite");
    }
    if (b1_map_.size() == 0) b1_map_.resize(n, 0);
    if (b2_map_.size() == 0) b2_map_.resize(n, 0);
    if (b1_map_.rows() != n || b2_map_.rows() != n) {
        throw std::invalid_argument("SemiDiscreteSystem: damping map row count must equal n_dof");
    }
    if (!(tau_ > 0.0)) {
        throw std::invalid_argument("SemiDiscreteSystem: tau must be positive");
    }
    if (!(xi_ > 1.0)) {
        throw std::invalid_argument("SemiDiscreteSystem: xi must exceed 1");
    }
    if (b2_map_.cols() > 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b2_map_);
        b2_norm_ = svd.singularValues()(0);
    } else {
        b2_norm_ = 0.0;
    }
}

Eigen::VectorXd SemiDiscreteSystem::b1_trace(const Eigen::VectorXd& v) const {
    if (v.size() != n_dof()) {
        throw std::invalid_argument("b1_trace: velocity dimension mismatch");
    }
    return b1_map_.transpose() * v;
}

Eigen::VectorXd SemiDiscreteSystem::b2_trace(const Eigen::VectorXd& v) const {
    if (v.size() != n_dof()) {
        throw std::invalid_argument("b2_trace: velocity dimension mismatch");
    }
    return b2_map_.transpose() * v;
}

EnergyTrace::EnergyTrace(double dt) : dt_(dt) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("EnergyTrace: dt must be positive");
    }
}

void EnergyTrace::append(double t, const EnergyBreakdown& e) {
    if (!rows_.empty()) {
        const double expected = rows_.back().t + dt_;
        if (std::abs(t - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
            throw std::invalid_argument("EnergyTrace: timestamp breaks the uniform grid");
        }
    }
    rows_.push_back(Row{t, e});
}

double standard_energy(const SemiDiscreteSystem& sys, const State& s) {
    if (s.u.size() != sys.n_dof() || s.v.size() != sys.n_dof()) {
        throw std::invalid_argument("standard_energy: state dimension mismatch");
    }
    return 0.5 * (s.u.dot(sys.stiffness() * s.u) + s.v.squaredNorm());
}

namespace {

double trapezoid(std::span<const double> samples, double spacing) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        sum += 0.5 * (samples[k] + samples[k + 1]);
    }
    return sum * spacing;
}

}  // namespace

EnergyBreakdown total_energy_from_window(const SemiDiscreteSystem& sys, const State& s,
                                         std::span<const double> window_sq, double spacing) {
    if (window_sq.size() < 2) {
        throw std::invalid_argument("total_energy: delay window needs at least two samples");
    }
    const double span = spacing * static_cast<double>(window_sq.size() - 1);
    if (std::abs(span - sys.tau()) > 1e-9 * std::max(1.0, sys.tau())) {
        throw std::invalid_argument("total_energy: delay window does not span tau");
    }
    EnergyBreakdown e;
    e.e_standard = standard_energy(sys, s);
    e.e_delay = 0.5 * sys.xi() * trapezoid(window_sq, spacing);
    e.e_total = e.e_standard + e.e_delay;
    e.p_b1 = sys.b1_trace(s.v).squaredNorm();
    e.p_b2_now = sys.b2_trace(s.v).squaredNorm();
    e.p_b2_delayed = window_sq.front();
    return e;
}

EnergyBreakdown total_energy(const SemiDiscreteSystem& sys, const State& s,
                             const HistoryBuffer& hist) {
    if (hist.trace_dim() != sys.m2()) {
        throw std::invalid_argument("total_energy: history trace dimension mismatch");
    }
    if (std::abs(hist.tau() - sys.tau()) > 1e-9 * std::max(1.0, sys.tau())) {
        throw std::invalid_argument("total_energy: history window does not span tau");
    }
    if (std::abs(hist.head_time() - s.t) > 1e-9 * std::max(1.0, std::abs(s.t))) {
        throw std::invalid_argument("total_energy: history is not positioned at the state time");
    }
    std::vector<double> window;
    hist.window_squared_norms(window);
    return total_energy_from_window(sys, s, window, hist.dt());
}

double dissipation_bound_from_powers(double xi, double p_b1, double p_b2_now,
                                     double p_b2_delayed) {
    return -p_b1 + 0.5 * (1.0 + xi) * p_b2_now - 0.5 * (xi - 1.0) * p_b2_delayed;
}

double aux_dissipation_bound_from_powers(double xi, double p_b1, double p_b2_now,
                                         double p_b2_delayed) {
    return -p_b1 - 0.5 * (xi - 1.0) * (p_b2_now + p_b2_delayed);
}

double dissipation_bound(const SemiDiscreteSystem& sys, const State& s,
                         const Eigen::VectorXd& delayed) {
    if (delayed.size() != sys.m2()) {
        throw std::invalid_argument("dissipation_bound: delayed trace dimension mismatch");
    }
    return dissipation_bound_from_powers(sys.xi(), sys.b1_trace(s.v).squaredNorm(),
                                         sys.b2_trace(s.v).squaredNorm(), delayed.squaredNorm());
}

double aux_dissipation_bound(const SemiDiscreteSystem& sys, const State& s,
                             const Eigen::VectorXd& delayed) {
    if (delayed.size() != sys.m2()) {
        throw std::invalid_argument("aux_dissipation_bound: delayed trace dimension mismatch");
    }
    return aux_dissipation_bound_from_powers(sys.xi(), sys.b1_trace(s.v).squaredNorm(),
                                             sys.b2_trace(s.v).squaredNorm(),
                                             delayed.squaredNorm());
}

}  // namespace delaystab
