#include "delaystab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include "delaystab/rng.hpp"

namespace delaystab {

DecayEstimate fit_decay(const EnergyTrace& trace, double window_start, double window_end) {
    if (trace.size() < 2) {
        throw std::invalid_argument("fit_decay: trace needs at least two rows");
    }
    if (!(window_end > window_start)) {
        throw std::invalid_argument("fit_decay: empty fit window");
    }
    const double t0 = trace[0].t;
    const double t1 = trace[trace.size() - 1].t;
    const double tol = 1e-9 * std::max(1.0, std::abs(t1));
    if (window_start < t0 - tol || window_end > t1 + tol) {
        throw std::invalid_argument("fit_decay: window outside the trace");
    }

    std::size_t lo = trace.size(), hi = 0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace[i].t >= window_start - tol && trace[i].t <= window_end + tol) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    if (lo >= hi) {
        throw std::invalid_argument("fit_decay: window contains fewer than two samples");
    }
    for (std::size_t i = lo; i <= hi; ++i) {
        if (!(trace[i].e.e_total > 0.0)) {
            throw std::invalid_argument("fit_decay: energy must be positive on the window");
        }
    }

    // Envelope points: interior local maxima of E. Strictly monotone data has
    // none; fall back to every sample in the window.
    std::vector<std::size_t> picks;
    for (std::size_t i = std::max(lo, std::size_t{1}); i + 1 <= hi && i + 1 < trace.size();
         ++i) {
        const double e = trace[i].e.e_total;
        if (e >= trace[i - 1].e.e_total && e >= trace[i + 1].e.e_total) {
            picks.push_back(i);
        }
    }
    if (picks.size() < 10) {
        picks.clear();
        for (std::size_t i = lo; i <= hi; ++i) {
            picks.push_back(i);
        }
    }
    if (picks.size() < 10) {
        throw std::invalid_argument("fit_decay: fewer than 10 envelope points");
    }

    double sx = 0.0, sy = 0.0;
    for (std::size_t i : picks) {
        sx += trace[i].t;
        sy += std::log(trace[i].e.e_total);
    }
    const double n = static_cast<double>(picks.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i : picks) {
        const double dx = trace[i].t - mx;
        const double dy = std::log(trace[i].e.e_total) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;

    DecayEstimate est;
    est.mu_hat = -slope;
    est.k_hat = std::exp(intercept);
    est.window_start = window_start;
    est.window_end = window_end;
    est.n_points = picks.size();
    if (syy <= 0.0) {
        est.r_squared = 1.0;  // zero-variance data: the flat line is exact
    } else {
        const double ss_res = syy - sxy * sxy / sxx;
        est.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    }
    return est;
}

namespace {

// Integral of ||B1^T w_t||^2 over the run, by the trapezoid rule.
double feedback_integral(const EnergyTrace& trace) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        sum += 0.5 * (trace[k].e.p_b1 + trace[k + 1].e.p_b1);
    }
    return sum * trace.dt();
}

int env_thread_cap() {
    if (const char* env = std::getenv("DELAYSTAB_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

ObservabilityEstimate estimate_observability(const SemiDiscreteSystem& sys, double t_horizon,
                                             int n_samples, std::uint64_t seed) {
    if (sys.b2_norm() != 0.0) {
        throw std::invalid_argument("estimate_observability: system must have B2 = 0");
    }
    if (!(t_horizon > 0.0)) {
        throw std::invalid_argument("estimate_observability: horizon must be positive");
    }
    if (n_samples < 1) {
        throw std::invalid_argument("estimate_observability: need at least one sample");
    }
    const int n = sys.n_dof();

    // Step size: fine enough for the horizon, adjusted to divide tau.
    const double dt_target = std::min(t_horizon / 2000.0, 2e-3);
    const long long sub = std::max(1LL, std::llround(sys.tau() / dt_target));
    const double dt = sys.tau() / static_cast<double>(sub);
    const double t_run = static_cast<double>(std::llround(std::ceil(t_horizon / dt))) * dt;

    // Even slots hold the lowest eigenmodes, odd slots random data with a
    // per-slot seed, so sample k does not depend on n_samples and growing
    // the ensemble can only raise the max.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.stiffness());
    if (eig.info() != Eigen::Success) {
        throw std::runtime_error("estimate_observability: eigendecomposition failed");
    }
    std::vector<State> inits;
    inits.reserve(static_cast<std::size_t>(n_samples));
    for (int s = 0; s < n_samples; ++s) {
        State st;
        st.t = 0.0;
        const int mode = s / 2;
        if (s % 2 == 0 && mode < n) {
            st.u = eig.eigenvectors().col(mode) * std::sqrt(2.0 / eig.eigenvalues()(mode));
            st.v = Eigen::VectorXd::Zero(n);
        } else {
            SplitMix64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(s + 1)));
            st.u.resize(n);
            st.v.resize(n);
            for (int j = 0; j < n; ++j) st.u(j) = rng.symmetric();
            for (int j = 0; j < n; ++j) st.v(j) = rng.symmetric();
            const double e0 = standard_energy(sys, st);
            const double scale = 1.0 / std::sqrt(e0);
            st.u *= scale;
            st.v *= scale;
        }
        inits.push_back(std::move(st));
    }

    SchemeParams params;
    params.dt = dt;
    const std::vector<Eigen::VectorXd> f0 =
        constant_history(Eigen::VectorXd::Zero(sys.m2()), dt, sys.tau());

    std::vector<double> ratios(static_cast<std::size_t>(n_samples), 0.0);
    auto worker = [&](int begin, int end) {
        for (int s = begin; s < end; ++s) {
            const auto& init = inits[static_cast<std::size_t>(s)];
            const double e0 = standard_energy(sys, init);
            const SimulationResult run = simulate(sys, init, f0, t_run, params);
            const double integral = feedback_integral(run.trace);
            ratios[static_cast<std::size_t>(s)] =
                integral > 0.0 ? e0 / integral : std::numeric_limits<double>::infinity();
        }
    };

    const int n_threads = std::min(env_thread_cap(), n_samples);
    if (n_threads <= 1) {
        worker(0, n_samples);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_samples + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(n_samples, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    ObservabilityEstimate out;
    out.c_hat = *std::max_element(ratios.begin(), ratios.end());
    out.t_horizon = t_horizon;
    out.n_samples = n_samples;
    out.is_lower_bound = true;
    return out;
}

Eigen::MatrixXd assemble_generator(const SemiDiscreteSystem& sys, int n_rho) {
    if (n_rho < 2) {
        throw std::invalid_argument("assemble_generator: need n_rho >= 2");
    }
    const int n = sys.n_dof();
    const int m2 = sys.m2();
    const int dim = 2 * n + n_rho * m2;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);

    // u' = v
    gen.block(0, n, n, n).setIdentity();
    // v' = -A u - B1 B1^T v - B2 z(1)
    gen.block(n, 0, n, n) = -sys.stiffness();
    gen.block(n, n, n, n) = -(sys.b1_map() * sys.b1_map().transpose());
    if (m2 > 0) {
        gen.block(n, 2 * n + (n_rho - 1) * m2, n, m2) = -sys.b2_map();

        // z' = -(1/tau) D_rho z on rho_j = j/n_rho, j = 1..n_rho, with the
        // inflow value z(0) = B2^T v substituted into the first cell.
        const double rate = static_cast<double>(n_rho) / sys.tau();
        for (int j = 0; j < n_rho; ++j) {
            const int row = 2 * n + j * m2;
            gen.block(row, row, m2, m2) -= rate * Eigen::MatrixXd::Identity(m2, m2);
            if (j == 0) {
                gen.block(row, n, m2, n) = rate * sys.b2_map().transpose();
            } else {
                gen.block(row, row - m2, m2, m2) =
                    rate * Eigen::MatrixXd::Identity(m2, m2);
            }
        }
    }
    return gen;
}

SpectralReport spectral_abscissa(const Eigen::MatrixXd& matrix, int n_rho) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1) {
        throw std::invalid_argument("spectral_abscissa: matrix must be square");
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(matrix, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectral_abscissa: QR iteration did not converge");
    }
    SpectralReport report;
    report.n_rho = n_rho;
    report.eigenvalues.reserve(static_cast<std::size_t>(matrix.rows()));
    report.abscissa = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const std::complex<double> ev = solver.eigenvalues()(i);
        report.eigenvalues.push_back(ev);
        report.abscissa = std::max(report.abscissa, ev.real());
    }
    return report;
}

}  // namespace delaystab
