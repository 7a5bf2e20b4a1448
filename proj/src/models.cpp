#include "delaystab/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace delaystab {

DampingProfile DampingProfile::constant(double v) {
    DampingProfile p;
    p.kind = Kind::Constant;
    p.value = v;
    return p;
}

DampingProfile DampingProfile::indicator(double v, double from, double to) {
    DampingProfile p;
    p.kind = Kind::Indicator;
    p.value = v;
    p.from = from;
    p.to = to;
    return p;
}

DampingProfile DampingProfile::from_samples(std::vector<double> values) {
    DampingProfile p;
    p.kind = Kind::Samples;
    p.samples = std::move(values);
    return p;
}

double DampingProfile::at(double x, int index) const {
    switch (kind) {
        case Kind::Constant:
            return value;
        case Kind::Indicator:
            return (x >= from && x <= to) ? value : 0.0;
        case Kind::Samples:
            if (index < 0 || static_cast<std::size_t>(index) >= samples.size()) {
                throw std::invalid_argument("DampingProfile: sample index out of range");
            }
            return samples[static_cast<std::size_t>(index)];
    }
    throw std::invalid_argument("DampingProfile: invalid kind");
}

namespace {

// Diagonal-rectangular map with columns for the nodes where the profile is
// positive; entry sqrt(coefficient). A zero profile yields zero columns.
Eigen::MatrixXd damping_map(const DampingProfile& profile, int n,
                            const std::vector<double>& coords) {
    std::vector<std::pair<int, double>> support;
    support.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double b = profile.at(coords[static_cast<std::size_t>(j)], j);
        if (b < 0.0) {
            throw std::invalid_argument("DampingProfile: negative coefficient sample");
        }
        if (b > 0.0) {
            support.emplace_back(j, b);
        }
    }
    Eigen::MatrixXd map = Eigen::MatrixXd::Zero(n, static_cast<int>(support.size()));
    for (std::size_t c = 0; c < support.size(); ++c) {
        map(support[c].first, static_cast<int>(c)) = std::sqrt(support[c].second);
    }
    return map;
}

void check_samples_length(const DampingProfile& p, int n, const char* name) {
    if (p.kind == DampingProfile::Kind::Samples &&
        p.samples.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument(std::string(name) + ": sample count must equal grid size");
    }
}

}  // namespace

SemiDiscreteSystem build_wave1d_interior(int n, double length, const DampingProfile& b1,
                                         const DampingProfile& b2, double tau, double xi) {
    if (n < 3) {
        throw std::invalid_argument("build_wave1d_interior: need n >= 3");
    }
    if (!(length > 0.0)) {
        throw std::invalid_argument("build_wave1d_interior: length must be positive");
    }
    check_samples_length(b1, n, "b1");
    check_samples_length(b2, n, "b2");

    const double h = length / (n + 1);
    const double inv_h2 = 1.0 / (h * h);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        a(j, j) = 2.0 * inv_h2;
        if (j > 0) a(j, j - 1) = -inv_h2;
        if (j + 1 < n) a(j, j + 1) = -inv_h2;
    }

    std::vector<double> coords(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        coords[static_cast<std::size_t>(j)] = (j + 1) * h;
    }
    return SemiDiscreteSystem(std::move(a), damping_map(b1, n, coords),
                              damping_map(b2, n, coords), tau, xi);
}

SemiDiscreteSystem build_wave1d_boundary(int n, double length, double k_coeff,
                                         const DampingProfile& b, double tau, double xi) {
    if (n < 3) {
        throw std::invalid_argument("build_wave1d_boundary: need n >= 3");
    }
    if (!(length > 0.0)) {
        throw std::invalid_argument("build_wave1d_boundary: length must be positive");
    }
    if (!(k_coeff > 0.0)) {
        throw std::invalid_argument("build_wave1d_boundary: k must be positive");
    }
    check_samples_length(b, n, "b");

    const double h = length / n;
    const double inv_h2 = 1.0 / (h * h);
    const double sqrt2 = std::sqrt(2.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j + 1 < n; ++j) {
        a(j, j) = 2.0 * inv_h2;
        if (j > 0) a(j, j - 1) = -inv_h2;
        a(j, j + 1) = -inv_h2;
    }
    // Half-cell row at the flux boundary node.
    a(n - 1, n - 1) = 2.0 * inv_h2;
    a(n - 1, n - 2) = -sqrt2 * inv_h2;
    a(n - 2, n - 1) = -sqrt2 * inv_h2;

    Eigen::MatrixXd b1_map = Eigen::MatrixXd::Zero(n, 1);
    b1_map(n - 1, 0) = std::sqrt(2.0 * k_coeff / h);

    std::vector<double> coords(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        coords[static_cast<std::size_t>(j)] = (j + 1) * h;
    }
    return SemiDiscreteSystem(std::move(a), std::move(b1_map), damping_map(b, n, coords), tau,
                              xi);
}

SemiDiscreteSystem build_beam1d(int n, double length, BeamBC bc, const DampingProfile& b1,
                                const DampingProfile& b2, double tau, double xi) {
    if (n < 5) {
        throw std::invalid_argument("build_beam1d: need n >= 5");
    }
    if (!(length > 0.0)) {
        throw std::invalid_argument("build_beam1d: length must be positive");
    }
    check_samples_length(b1, n, "b1");
    check_samples_length(b2, n, "b2");

    const double h = length / (n + 1);
    const double inv_h2 = 1.0 / (h * h);
    const double inv_h4 = inv_h2 * inv_h2;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        a(j, j) = 6.0 * inv_h4;
        if (j > 0) {
            a(j, j - 1) = -4.0 * inv_h4;
            a(j - 1, j) = -4.0 * inv_h4;
        }
        if (j > 1) {
            a(j, j - 2) = inv_h4;
            a(j - 2, j) = inv_h4;
        }
    }
    // Ghost closure at the first and last interior nodes: odd reflection for
    // hinged ends (u = u_xx = 0), even reflection for clamped ends
    // (u = u_x = 0).
    const double corner = (bc == BeamBC::Hinged) ? 5.0 : 7.0;
    a(0, 0) = corner * inv_h4;
    a(n - 1, n - 1) = corner * inv_h4;

    std::vector<double> coords(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        coords[static_cast<std::size_t>(j)] = (j + 1) * h;
    }
    return SemiDiscreteSystem(std::move(a), damping_map(b1, n, coords),
                              damping_map(b2, n, coords), tau, xi);
}

}  // namespace delaystab
