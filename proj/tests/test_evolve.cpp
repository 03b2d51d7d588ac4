#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qforge/evolve.hpp"

using namespace qforge;

TEST_CASE("zero schedule returns the initial state", "[evolve]") {
    const GraphInstance g = oracle::k4();
    AngleSchedule s(3);
    const StateVector psi = evolve_digitized(g, s);
    const StateVector ref = initial_state(4);
    for (std::size_t b = 0; b < psi.dim(); ++b) REQUIRE(psi.amp[b] == ref.amp[b]);
}

TEST_CASE("single layer matches the dense 4x4 oracle", "[evolve]") {
    const GraphInstance g = oracle::single_edge(1.0);
    AngleSchedule s(1);
    s.theta_z[0] = 0.3;
    s.theta_x[0] = 0.4;
    const StateVector psi = evolve_digitized(g, s);
    const Eigen::VectorXcd ref = oracle::dense_evolution(g, s);
    for (std::size_t b = 0; b < psi.dim(); ++b) REQUIRE(std::abs(psi.amp[b] - ref[b]) < 1e-12);

    const ProblemDiagonal diag = problem_diagonal(g);
    double e_ref = 0.0;
    for (std::size_t b = 0; b < 4; ++b) e_ref += diag.values[b] * std::norm(ref[b]);
    REQUIRE(schedule_energy(diag, s) == Catch::Approx(e_ref).margin(1e-12));
}

TEST_CASE("random evolutions match the dense unitary chain", "[evolve]") {
    Rng rng(20);
    const int sizes[] = {3, 4, 6, 4, 6, 3};
    for (int trial = 0; trial < 6; ++trial) {
        const int n = sizes[trial];
        const GraphInstance g =
            (n >= 4) ? generate_regular_graph(n, 3, 100 + trial) : oracle::triangle();
        const AngleSchedule s = oracle::random_schedule(5, rng);
        const StateVector psi = evolve_digitized(g, s);
        const Eigen::VectorXcd ref = oracle::dense_evolution(g, s);
        for (std::size_t b = 0; b < psi.dim(); ++b)
            REQUIRE(std::abs(psi.amp[b] - ref[b]) < 1e-10);
    }
}

TEST_CASE("recording returns P + 1 consistent states", "[evolve]") {
    const GraphInstance g = oracle::triangle();
    const ProblemDiagonal diag = problem_diagonal(g);
    Rng rng(8);
    const AngleSchedule s = oracle::random_schedule(4, rng);
    const auto states = evolve_digitized_recorded(diag, s);
    REQUIRE(states.size() == 5);
    const StateVector final = evolve_digitized(diag, s);
    for (std::size_t b = 0; b < final.dim(); ++b)
        REQUIRE(std::abs(states.back().amp[b] - final.amp[b]) < 1e-14);
}

TEST_CASE("norm drift stays below 1e-10 over deep circuits", "[evolve]") {
    const GraphInstance g = generate_regular_graph(6, 3, 3);
    Rng rng(33);
    const AngleSchedule s = oracle::random_schedule(256, rng);
    const StateVector psi = evolve_digitized(g, s);
    REQUIRE(std::abs(norm(psi) - 1.0) < 1e-10);
}

TEST_CASE("evolution conserves global-flip parity", "[evolve]") {
    const GraphInstance g = generate_regular_graph(6, 3, 5);
    Rng rng(41);
    const AngleSchedule s = oracle::random_schedule(24, rng);
    const StateVector psi = evolve_digitized(g, s);
    const std::uint64_t mask = (1ULL << 6) - 1;
    // Overlap with any parity-odd vector stays zero: check the antisymmetric
    // component amplitude-wise.
    for (std::uint64_t b = 0; b < psi.dim(); ++b)
        REQUIRE(std::abs(psi.amp[b] - psi.amp[~b & mask]) < 1e-10);
}

TEST_CASE("pure-phase schedules leave the probabilities unchanged", "[evolve]") {
    const GraphInstance g = oracle::k4();
    AngleSchedule s(6);
    Rng rng(2);
    for (int m = 0; m < 6; ++m) s.theta_z[m] = rng.uniform();
    const StateVector psi = evolve_digitized(g, s);
    for (const auto& a : psi.amp)
        REQUIRE(std::norm(a) == Catch::Approx(1.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("first-order Trotter error decays as 1/P", "[evolve]") {
    const GraphInstance g = generate_regular_graph(6, 3, 9);
    const ProblemDiagonal diag = problem_diagonal(g);
    const double tx_tot = 0.9, tz_tot = 1.1;

    // Continuum limit: the constant Hamiltonian tx Hx + tz Hz applied once.
    const Eigen::MatrixXcd h =
        tx_tot * oracle::dense_hx(6) + tz_tot * oracle::dense_hz(g);
    Eigen::VectorXcd ref = Eigen::VectorXcd::Constant(64, std::pow(64.0, -0.5));
    ref = oracle::expm_unitary(h, 1.0) * ref;
    double e_ref = 0.0;
    for (std::size_t b = 0; b < 64; ++b) e_ref += diag.values[b] * std::norm(ref[b]);

    auto digitized_error = [&](int p) {
        AngleSchedule s(p);
        for (int m = 0; m < p; ++m) {
            s.theta_x[m] = tx_tot / p;
            s.theta_z[m] = tz_tot / p;
        }
        return std::abs(schedule_energy(diag, s) - e_ref);
    };
    const double e16 = digitized_error(16);
    const double e32 = digitized_error(32);
    const double e64 = digitized_error(64);
    REQUIRE(e16 / e32 == Catch::Approx(2.0).margin(0.35));
    REQUIRE(e32 / e64 == Catch::Approx(2.0).margin(0.35));
}
