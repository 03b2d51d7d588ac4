#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qforge/statevector.hpp"

using namespace qforge;

TEST_CASE("initial state is the uniform superposition", "[statevector]") {
    const StateVector psi1 = initial_state(1);
    REQUIRE(psi1.amp[0].real() == Catch::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    REQUIRE(psi1.amp[1] == psi1.amp[0]);

    const StateVector psi = initial_state(14);
    REQUIRE(psi.dim() == 16384);
    for (const auto& a : psi.amp) REQUIRE(a == cx(std::pow(2.0, -7), 0.0));

    REQUIRE_THROWS_AS(initial_state(0), std::invalid_argument);
    REQUIRE_THROWS_AS(initial_state(25), std::invalid_argument);
}

TEST_CASE("initial state is an H_x eigenstate with eigenvalue -n", "[statevector]") {
    for (int n : {1, 3, 6}) {
        const StateVector psi = initial_state(n);
        StateVector hpsi(n);
        apply_hx(psi, hpsi);
        const cx e = inner(psi, hpsi);
        REQUIRE(e.real() == Catch::Approx(-n).margin(1e-12));
        REQUIRE(e.imag() == Catch::Approx(0.0).margin(1e-14));
    }
}

TEST_CASE("phase application", "[statevector]") {
    const GraphInstance g = oracle::single_edge(1.0);
    const ProblemDiagonal diag = problem_diagonal(g);

    StateVector psi = initial_state(2);
    StateVector orig = psi;
    apply_phase(psi, 0.0, diag);
    for (std::size_t b = 0; b < psi.dim(); ++b) REQUIRE(psi.amp[b] == orig.amp[b]);

    // Basis state |01> has diagonal value -1, so it picks up e^{+i theta}.
    StateVector basis(2);
    basis.amp[0b01] = 1.0;
    apply_phase(basis, 0.7, diag);
    REQUIRE(basis.amp[0b01].real() == Catch::Approx(std::cos(0.7)).epsilon(1e-14));
    REQUIRE(basis.amp[0b01].imag() == Catch::Approx(std::sin(0.7)).epsilon(1e-14));

    Rng rng(1);
    StateVector random(2);
    for (auto& a : random.amp) a = cx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    const double before = norm(random);
    apply_phase(random, 1.234, diag);
    REQUIRE(norm(random) == Catch::Approx(before).epsilon(1e-14));

    StateVector wrong(3);
    REQUIRE_THROWS_AS(apply_phase(wrong, 0.1, diag), std::invalid_argument);
}

TEST_CASE("mixer is the product of single-qubit x rotations", "[statevector]") {
    StateVector psi(1);
    psi.amp[0] = 1.0;
    apply_mixer(psi, 3.14159265358979323846 / 2.0);
    REQUIRE(std::abs(psi.amp[0]) < 1e-15);
    REQUIRE(psi.amp[1].real() == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(psi.amp[1].imag() == Catch::Approx(1.0).epsilon(1e-14));

    // The uniform state only acquires the global phase e^{+i n theta}.
    const int n = 5;
    const double theta = 0.37;
    StateVector uni = initial_state(n);
    apply_mixer(uni, theta);
    const cx expected = std::exp(cx(0.0, n * theta)) * std::pow(2.0, -0.5 * n);
    for (const auto& a : uni.amp) {
        REQUIRE(a.real() == Catch::Approx(expected.real()).margin(1e-13));
        REQUIRE(a.imag() == Catch::Approx(expected.imag()).margin(1e-13));
    }
}

TEST_CASE("mixer matches the dense exponential on random states", "[statevector]") {
    const int n = 4;
    Rng rng(9);
    StateVector psi(n);
    for (auto& a : psi.amp) a = cx(rng.uniform() - 0.5, rng.uniform() - 0.5);
    Eigen::VectorXcd v(psi.dim());
    for (std::size_t b = 0; b < psi.dim(); ++b) v[b] = psi.amp[b];

    const double theta = 0.61;
    apply_mixer(psi, theta);
    const Eigen::VectorXcd w = oracle::expm_unitary(oracle::dense_hx(n), theta) * v;
    for (std::size_t b = 0; b < psi.dim(); ++b)
        REQUIRE(std::abs(psi.amp[b] - w[b]) < 1e-13);
}

TEST_CASE("expectation of the problem diagonal", "[statevector]") {
    const GraphInstance g = oracle::single_edge(1.0);
    const ProblemDiagonal diag = problem_diagonal(g);

    StateVector basis(2);
    basis.amp[0b10] = 1.0;
    REQUIRE(expectation_z(basis, diag) == -1.0);

    REQUIRE(expectation_z(initial_state(2), diag) == Catch::Approx(-0.5).epsilon(1e-15));

    const GraphInstance big = generate_regular_graph(8, 3, 2);
    const ProblemDiagonal dbig = problem_diagonal(big);
    const ExactSolution sol = exact_extrema(big);
    Rng rng(4);
    StateVector random(8);
    double nrm = 0.0;
    for (auto& a : random.amp) {
        a = cx(rng.uniform() - 0.5, rng.uniform() - 0.5);
        nrm += std::norm(a);
    }
    for (auto& a : random.amp) a /= std::sqrt(nrm);
    const double e = expectation_z(random, dbig);
    REQUIRE(e >= sol.e_min - 1e-12);
    REQUIRE(e <= sol.e_max + 1e-12);
}

TEST_CASE("fidelity is the ground-manifold projection", "[statevector]") {
    const GraphInstance g = oracle::triangle();
    const ExactSolution sol = exact_extrema(g);

    StateVector ground(3);
    ground.amp[sol.ground_bitstrings.front()] = 1.0;
    REQUIRE(fidelity(ground, sol) == 1.0);

    REQUIRE(fidelity(initial_state(3), sol) ==
            Catch::Approx(double(sol.degeneracy) / 8.0).epsilon(1e-14));
}
