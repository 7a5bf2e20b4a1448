#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "delaystab/integrator.hpp"
#include "delaystab/models.hpp"

using namespace delaystab;

namespace {

SemiDiscreteSystem scalar_oscillator(double omega2, double tau = 1.0, double xi = 2.0) {
    Eigen::MatrixXd a(1, 1);
    a << omega2;
    return SemiDiscreteSystem(a, Eigen::MatrixXd(), Eigen::MatrixXd(), tau, xi);
}

State eigenmode_state(const SemiDiscreteSystem& sys, int mode) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.stiffness());
    REQUIRE(eig.info() == Eigen::Success);
    return State{0.0, eig.eigenvectors().col(mode), Eigen::VectorXd::Zero(sys.n_dof())};
}

}  // namespace

TEST_CASE("one average-acceleration step on the unit oscillator") {
    const double dt = 0.1;
    auto sys = scalar_oscillator(1.0);
    State init{0.0, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1)};

    SchemeParams params;
    params.dt = dt;
    NewmarkStepper stepper(sys, params, init, Eigen::VectorXd::Zero(0));
    stepper.advance(Eigen::VectorXd::Zero(0));

    const double expected = (1.0 - dt * dt / 4.0) / (1.0 + dt * dt / 4.0);
    CHECK(stepper.state().u(0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(stepper.state().t == doctest::Approx(dt).epsilon(1e-15));

    const double e1 =
        0.5 * (stepper.state().u.squaredNorm() + stepper.state().v.squaredNorm());
    CHECK(e1 == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("zero state stays zero") {
    auto sys = scalar_oscillator(4.0, 0.5);
    SchemeParams params;
    params.dt = 0.05;
    State init{0.0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};
    const auto f0 = constant_history(Eigen::VectorXd::Zero(0), params.dt, sys.tau());
    const auto run = simulate(sys, init, f0, 2.0, params);
    for (const auto& row : run.trace.rows()) {
        CHECK(row.e.e_total == 0.0);
    }
}

TEST_CASE("parameter validation") {
    auto sys = scalar_oscillator(1.0, 1.0);
    State init{0.0, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)};

    SchemeParams bad_gamma;
    bad_gamma.newmark_gamma = 0.4;
    CHECK_THROWS_AS(NewmarkStepper(sys, bad_gamma, init, Eigen::VectorXd::Zero(0)),
                    std::invalid_argument);

    SchemeParams bad_dt;
    bad_dt.dt = 0.3;  // does not divide tau = 1
    CHECK_THROWS_AS(NewmarkStepper(sys, bad_dt, init, Eigen::VectorXd::Zero(0)),
                    std::invalid_argument);
}

TEST_CASE("undamped wave eigenmode conserves the standard energy") {
    const int n = 50;
    const auto sys = build_wave1d_interior(n, 1.0, DampingProfile::constant(0.0),
                                           DampingProfile::constant(0.0), 1.0, 2.0);
    const State init = eigenmode_state(sys, 0);

    SchemeParams params;
    params.dt = 2e-3;
    const auto f0 = constant_history(Eigen::VectorXd::Zero(0), params.dt, sys.tau());
    // First mode period is about 2; ten periods.
    const auto run = simulate(sys, init, f0, 20.0, params);
    const double e0 = run.trace[0].e.e_standard;
    for (const auto& row : run.trace.rows()) {
        CHECK(std::abs(row.e.e_standard / e0 - 1.0) <= 1e-10);
    }
}

TEST_CASE("second-order accuracy on the scalar oscillator") {
    auto sys = scalar_oscillator(1.0);
    State init{0.0, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1)};
    const double t_final = 2.0;

    auto global_error = [&](double dt) {
        SchemeParams params;
        params.dt = dt;
        NewmarkStepper stepper(sys, params, init, Eigen::VectorXd::Zero(0));
        const long long steps = std::llround(t_final / dt);
        for (long long k = 0; k < steps; ++k) {
            stepper.advance(Eigen::VectorXd::Zero(0));
        }
        return std::abs(stepper.state().u(0) - std::cos(t_final));
    };

    const double e1 = global_error(0.02);
    const double e2 = global_error(0.01);
    const double eoc = std::log2(e1 / e2);
    CHECK(eoc > 1.8);
    CHECK(eoc < 2.2);
}

TEST_CASE("delayed term is inert on the first window with zero history") {
    const int n = 30;
    const auto delayed = build_wave1d_interior(n, 1.0, DampingProfile::constant(0.0),
                                               DampingProfile::constant(1.0), 0.5, 2.0);
    const auto undamped = build_wave1d_interior(n, 1.0, DampingProfile::constant(0.0),
                                                DampingProfile::constant(0.0), 0.5, 2.0);
    const State init = eigenmode_state(delayed, 0);

    SchemeParams params;
    params.dt = 2.5e-3;
    const auto f0_delayed =
        constant_history(Eigen::VectorXd::Zero(delayed.m2()), params.dt, delayed.tau());
    const auto f0_none = constant_history(Eigen::VectorXd::Zero(0), params.dt, undamped.tau());

    const auto run_delayed =
        simulate(delayed, init, f0_delayed, 1.0, params, DelayMechanism::Buffer, true);
    const auto run_undamped =
        simulate(undamped, init, f0_none, 1.0, params, DelayMechanism::Buffer, true);

    bool diverged = false;
    for (std::size_t k = 0; k < run_delayed.trajectory.size(); ++k) {
        const auto& a = run_delayed.trajectory[k];
        const auto& b = run_undamped.trajectory[k];
        if (a.t <= delayed.tau() + 1e-12) {
            CHECK(a.u == b.u);
            CHECK(a.v == b.v);
        } else if ((a.u - b.u).cwiseAbs().maxCoeff() > 0.0) {
            diverged = true;
        }
    }
    CHECK(diverged);  // the feedback switches on after one delay
}

TEST_CASE("buffer and transport mechanisms produce identical traces") {
    const int n = 30;
    const auto sys = build_wave1d_interior(n, 1.0, DampingProfile::constant(0.3),
                                           DampingProfile::constant(0.4), 0.5, 2.0);
    State init = eigenmode_state(sys, 1);
    init.v = 0.2 * init.u;

    SchemeParams params;
    params.dt = 2.5e-3;
    const auto f0 = constant_history(sys.b2_trace(init.v), params.dt, sys.tau());

    const auto a = simulate(sys, init, f0, 2.0, params, DelayMechanism::Buffer);
    const auto b = simulate(sys, init, f0, 2.0, params, DelayMechanism::Transport);

    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t k = 0; k < a.trace.size(); ++k) {
        CHECK(a.trace[k].e.e_total == b.trace[k].e.e_total);
        CHECK(a.trace[k].e.e_standard == b.trace[k].e.e_standard);
        CHECK(a.trace[k].e.e_delay == b.trace[k].e.e_delay);
        CHECK(a.trace[k].e.p_b1 == b.trace[k].e.p_b1);
        CHECK(a.trace[k].e.p_b2_now == b.trace[k].e.p_b2_now);
        CHECK(a.trace[k].e.p_b2_delayed == b.trace[k].e.p_b2_delayed);
    }
}

TEST_CASE("auxiliary energy is nonincreasing for xi > 1") {
    const int n = 40;
    const auto sys = build_wave1d_interior(n, 1.0, DampingProfile::constant(1.0),
                                           DampingProfile::constant(0.3), 0.5, 2.0);
    State init = eigenmode_state(sys, 0);
    init.v = -0.5 * eigenmode_state(sys, 2).u;

    SchemeParams params;
    params.dt = 2.5e-3;
    params.mode = SystemMode::Auxiliary;
    const auto f0 = constant_history(sys.b2_trace(init.v), params.dt, sys.tau());
    const auto run = simulate(sys, init, f0, 3.0, params);

    const double f_initial = run.trace[0].e.e_total;
    for (std::size_t k = 0; k + 1 < run.trace.size(); ++k) {
        CHECK(run.trace[k + 1].e.e_total <= run.trace[k].e.e_total + 1e-12 * f_initial);
    }
    // Bounds recorded by the run are the auxiliary ones: all nonpositive.
    for (double bound : run.bounds) {
        CHECK(bound <= 0.0);
    }
}

TEST_CASE("verify_dissipation: conservative run and usage errors") {
    auto sys = scalar_oscillator(1.0);
    State init{0.0, Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Zero(1)};
    SchemeParams params;
    params.dt = 0.01;
    const auto f0 = constant_history(Eigen::VectorXd::Zero(0), params.dt, sys.tau());
    const auto run = simulate(sys, init, f0, 5.0, params);

    const double e0 = run.trace[0].e.e_total;
    const auto report = verify_dissipation(run.trace, run.bounds, 1e-10 * e0);
    CHECK(report.violations == 0);
    CHECK(report.max_excess <= 1e-10 * e0);
    CHECK(report.checked == run.trace.size() - 1);

    EnergyTrace tiny(0.01);
    tiny.append(0.0, EnergyBreakdown{});
    CHECK_THROWS_AS(verify_dissipation(tiny, run.bounds, 0.0), std::invalid_argument);

    std::vector<double> short_bounds(3, 0.0);
    CHECK_THROWS_AS(verify_dissipation(run.trace, short_bounds, 0.0), std::invalid_argument);
}

TEST_CASE("simulate records a uniform trace with matching bounds") {
    auto sys = scalar_oscillator(2.0, 0.4);
    State init{0.0, Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Constant(1, -0.1)};
    SchemeParams params;
    params.dt = 0.02;
    const auto f0 = constant_history(Eigen::VectorXd::Zero(0), params.dt, sys.tau());
    const auto run = simulate(sys, init, f0, 1.0, params);
    CHECK(run.trace.size() == 51);
    CHECK(run.bounds.size() == run.trace.size());
    CHECK(run.final_state.t == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 0; k < run.trace.size(); ++k) {
        CHECK(run.trace[k].t == doctest::Approx(k * params.dt).epsilon(1e-12));
    }
}
