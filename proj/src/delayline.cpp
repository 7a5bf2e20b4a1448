#include "delaystab/delayline.hpp"

#include <cmath>
#include <stdexcept>

namespace delaystab {

namespace {

int steps_per_delay(double dt, double tau) {
    if (!(dt > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("delayline: dt and tau must be positive");
    }
    const double ratio = tau / dt;
    const long long k = std::llround(ratio);
    if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9) {
        throw std::invalid_argument("delayline: tau/dt must be an integer (within 1e-9)");
    }
    return static_cast<int>(k);
}

}  // namespace

HistoryBuffer::HistoryBuffer(const std::vector<Eigen::VectorXd>& f0, double dt, double tau)
    : dt_(dt), tau_(tau) {
    const int k = steps_per_delay(dt, tau);
    const std::size_t capacity = static_cast<std::size_t>(k) + 1;
    if (f0.size() != capacity) {
        throw std::invalid_argument("HistoryBuffer: f0 must hold exactly round(tau/dt)+1 samples");
    }
    trace_dim_ = static_cast<int>(f0.front().size());
    ring_.reserve(capacity);
    sq_norms_.reserve(capacity);
    for (const auto& sample : f0) {
        if (sample.size() != trace_dim_) {
            throw std::invalid_argument("HistoryBuffer: inconsistent sample dimensions in f0");
        }
        ring_.push_back(sample);
        sq_norms_.push_back(sample.squaredNorm());
    }
    head_ = static_cast<int>(capacity) - 1;  // f0 is ordered oldest first
    head_time_ = 0.0;
}

const Eigen::VectorXd& HistoryBuffer::at_lag(int k) const {
    const int cap = capacity();
    return ring_[static_cast<std::size_t>(((head_ - k) % cap + cap) % cap)];
}

const Eigen::VectorXd& HistoryBuffer::delayed() const { return at_lag(capacity() - 1); }

const Eigen::VectorXd& HistoryBuffer::upcoming_delayed() const { return at_lag(capacity() - 2); }

Eigen::VectorXd HistoryBuffer::push_and_sample(const Eigen::VectorXd& current) {
    if (current.size() != trace_dim_) {
        throw std::invalid_argument("HistoryBuffer: pushed sample has wrong dimension");
    }
    const int cap = capacity();
    head_ = (head_ + 1) % cap;  // overwrites the slot holding the oldest sample
    ring_[static_cast<std::size_t>(head_)] = current;
    sq_norms_[static_cast<std::size_t>(head_)] = current.squaredNorm();
    head_time_ += dt_;
    return delayed();
}

void HistoryBuffer::window_squared_norms(std::vector<double>& out) const {
    const int cap = capacity();
    out.resize(static_cast<std::size_t>(cap));
    for (int k = 0; k < cap; ++k) {
        out[static_cast<std::size_t>(cap - 1 - k)] =
            sq_norms_[static_cast<std::size_t>(((head_ - k) % cap + cap) % cap)];
    }
}

TransportField::TransportField(int m_rho, int m2) {
    if (m_rho < 2) {
        throw std::invalid_argument("TransportField: m_rho must be >= 2");
    }
    if (m2 < 0) {
        throw std::invalid_argument("TransportField: trace dimension must be >= 0");
    }
    values_ = Eigen::MatrixXd::Zero(m_rho, m2);
}

TransportField TransportField::from_history(const std::vector<Eigen::VectorXd>& f0) {
    if (f0.size() < 2) {
        throw std::invalid_argument("TransportField: need at least two history samples");
    }
    const int m_rho = static_cast<int>(f0.size());
    const int m2 = static_cast<int>(f0.front().size());
    TransportField field(m_rho, m2);
    // z(rho_j, 0) = f0(-tau * rho_j); f0 is ordered oldest first.
    for (int j = 0; j < m_rho; ++j) {
        const auto& sample = f0[static_cast<std::size_t>(m_rho - 1 - j)];
        if (sample.size() != m2) {
            throw std::invalid_argument("TransportField: inconsistent sample dimensions in f0");
        }
        field.values_.row(j) = sample.transpose();
    }
    return field;
}

void TransportField::step(const Eigen::VectorXd& inflow, double dt, double tau) {
    if (inflow.size() != trace_dim()) {
        throw std::invalid_argument("TransportField: inflow has wrong dimension");
    }
    if (!(dt > 0.0) || !(tau > 0.0)) {
        throw std::invalid_argument("TransportField: dt and tau must be positive");
    }
    const double nu = dt / (tau * d_rho());
    if (nu > 1.0 + 1e-12) {
        throw std::invalid_argument("TransportField: CFL number dt/(tau*d_rho) exceeds 1");
    }
    const int m = m_rho();
    if (std::abs(nu - 1.0) <= 1e-9) {
        // Exact shift: each row takes its upstream neighbor, no arithmetic.
        for (int j = m - 1; j >= 1; --j) {
            values_.row(j) = values_.row(j - 1);
        }
    } else {
        for (int j = m - 1; j >= 1; --j) {
            values_.row(j) -= nu * (values_.row(j) - values_.row(j - 1));
        }
    }
    values_.row(0) = inflow.transpose();
}

Eigen::VectorXd TransportField::tail() const { return values_.row(m_rho() - 1).transpose(); }

Eigen::VectorXd push_and_sample(HistoryBuffer& buf, const Eigen::VectorXd& current) {
    return buf.push_and_sample(current);
}

TransportField step_transport(const TransportField& field, const Eigen::VectorXd& inflow,
                              double dt, double tau) {
    TransportField out = field;
    out.step(inflow, dt, tau);
    return out;
}

Eigen::VectorXd tail(const TransportField& field) { return field.tail(); }

}  // namespace delaystab
