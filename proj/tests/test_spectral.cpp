#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qforge/spectral.hpp"

using namespace qforge;

TEST_CASE("annealing Hamiltonian endpoints", "[spectral]") {
    const GraphInstance g = oracle::k4();
    const ProblemDiagonal diag = problem_diagonal(g);

    const Eigen::MatrixXd h1 = annealing_hamiltonian(g, 1.0, Sector::Full);
    for (int b = 0; b < 16; ++b)
        for (int c = 0; c < 16; ++c)
            REQUIRE(h1(b, c) == (b == c ? diag.values[b] : 0.0));

    const Eigen::MatrixXd h0 = annealing_hamiltonian(g, 0.0, Sector::Full);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0);
    REQUIRE(es.eigenvalues()[0] == Catch::Approx(-4.0).margin(1e-12));

    const Eigen::MatrixXd h = annealing_hamiltonian(g, 0.37, Sector::Full);
    REQUIRE((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("even-sector block agrees with the full spectrum on even levels", "[spectral]") {
    const GraphInstance g = generate_regular_graph(8, 3, 3);
    const double s = 0.55;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(
        annealing_hamiltonian(g, s, Sector::Full));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> even(
        annealing_hamiltonian(g, s, Sector::ParityEven));
    // Every even-sector level appears in the full spectrum.
    for (int j = 0; j < 8; ++j) {
        double best = 1e300;
        for (int i = 0; i < full.eigenvalues().size(); ++i)
            best = std::min(best, std::abs(full.eigenvalues()[i] - even.eigenvalues()[j]));
        REQUIRE(best < 1e-10);
    }
}

TEST_CASE("two-qubit driver spectrum by sector", "[spectral]") {
    const GraphInstance g = oracle::single_edge(1.0);
    // Full spectrum of -sx1 - sx2 is {-2, 0, 0, +2}; the two 0 levels are
    // parity-odd (|+-> and |-+> flip sign under sx sx), so the even block
    // holds {-2, +2}.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(
        annealing_hamiltonian(g, 0.0, Sector::Full));
    const std::vector<double> expected{-2.0, 0.0, 0.0, 2.0};
    for (int i = 0; i < 4; ++i)
        REQUIRE(full.eigenvalues()[i] == Catch::Approx(expected[i]).margin(1e-12));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> even(
        annealing_hamiltonian(g, 0.0, Sector::ParityEven));
    REQUIRE(even.eigenvalues()[0] == Catch::Approx(-2.0).margin(1e-12));
    REQUIRE(even.eigenvalues()[1] == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("min gap scan refines against a brute-force fine grid", "[spectral]") {
    const GraphInstance g = generate_regular_graph(8, 3, 1234);
    const SpectralScan scan = min_gap_scan(g, 24, true);

    // Oracle: a 10x finer grid plus the same golden refinement.
    const SpectralScan fine = min_gap_scan(g, 240, true);
    REQUIRE(scan.min_gap == Catch::Approx(fine.min_gap).margin(1e-8));
    REQUIRE(scan.levels.size() == 24);
    for (const auto& lv : scan.levels) REQUIRE(lv[0] <= lv[1]);
    REQUIRE(scan.min_gap >= 0.0);
    REQUIRE_THROWS_AS(min_gap_scan(g, 8, false), std::invalid_argument);
}

TEST_CASE("effective Hamiltonian reductions", "[spectral]") {
    const GraphInstance g = oracle::triangle();
    // theta_z = 0 leaves only the driver term at every order.
    for (int order : {1, 2, 3}) {
        const Eigen::MatrixXcd h = effective_hamiltonian(g, 0.4, 0.0, order, Sector::Full);
        const Eigen::MatrixXcd ref = 0.4 * oracle::dense_hx(3);
        REQUIRE((h - ref).cwiseAbs().maxCoeff() < 1e-14);
    }
    // Order 1 is the plain linear combination.
    const Eigen::MatrixXcd h1 = effective_hamiltonian(g, 0.3, 0.7, 1, Sector::Full);
    const Eigen::MatrixXcd ref = 0.3 * oracle::dense_hx(3) + 0.7 * oracle::dense_hz(g);
    REQUIRE((h1 - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("effective Hamiltonian is Hermitian at every order", "[spectral]") {
    const GraphInstance g = generate_regular_graph(6, 3, 10);
    for (int order : {1, 2, 3}) {
        const Eigen::MatrixXcd h = effective_hamiltonian(g, 0.31, 0.47, order, Sector::Full);
        REQUIRE((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("third-order BCH defect shrinks sixteen-fold under angle halving", "[spectral]") {
    Rng rng(77);
    for (int trial = 0; trial < 3; ++trial) {
        const GraphInstance g = generate_regular_graph(5, 2, 60 + trial);
        const double tx = 0.1 + 0.1 * rng.uniform();
        const double tz = 0.1 + 0.1 * rng.uniform();
        auto defect = [&](double ax, double az) {
            const Eigen::MatrixXcd heff = effective_hamiltonian(g, ax, az, 3, Sector::Full);
            const Eigen::MatrixXcd u = oracle::dense_layer(g, ax, az);
            return (oracle::expm_unitary(heff, 1.0) - u).norm();
        };
        const double shrink = defect(tx, tz) / defect(0.5 * tx, 0.5 * tz);
        REQUIRE(shrink > 12.0);
        REQUIRE(shrink < 20.0);
    }
}

TEST_CASE("matrix-free effective operator matches the dense build", "[spectral]") {
    const GraphInstance g = generate_regular_graph(8, 3, 21);
    const ProblemDiagonal diag = problem_diagonal(g);
    const std::vector<double> ed = even_diagonal(diag);
    const EvenSector sec(8);
    for (int order : {1, 2, 3}) {
        EffectiveEvenOp op(sec, ed, 0.52, 0.37, order);
        const Eigen::MatrixXcd dense =
            effective_hamiltonian(g, 0.52, 0.37, order, Sector::ParityEven);
        Rng rng(order);
        Eigen::VectorXcd v(sec.dim());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            v[i] = cx(rng.uniform() - 0.5, rng.uniform() - 0.5);
        Eigen::VectorXcd out;
        op(v, out);
        REQUIRE((out - dense * v).norm() < 1e-11 * dense.norm());
    }
}

TEST_CASE("population trace sums to one and flags zero layers", "[spectral]") {
    const GraphInstance g = generate_regular_graph(8, 3, 30);
    const AngleSchedule s = linear_dqa_angles(12, 0.8);
    const PopulationTrace trace = digital_population_trace(g, s, 3);
    REQUIRE(trace.m_grid.size() == 13);
    for (std::size_t i = 0; i < trace.m_grid.size(); ++i) {
        double total = trace.residual_tail[i];
        for (const double p : trace.populations[i]) {
            total += p;
            REQUIRE(p >= -1e-12);
            REQUIRE(p <= 1.0 + 1e-12);
        }
        REQUIRE(total == Catch::Approx(1.0).margin(1e-10));
    }
    REQUIRE(trace.min_gap_marker >= 1);
    REQUIRE(trace.min_gap_marker <= 12);

    REQUIRE_THROWS_AS(digital_population_trace(g, AngleSchedule(3), 3),
                      std::invalid_argument);
}

TEST_CASE("a gentle linear ramp starts in the effective ground state", "[spectral]") {
    const GraphInstance g = generate_regular_graph(8, 3, 31);
    const AngleSchedule s = linear_dqa_angles(16, 0.3);
    const PopulationTrace trace = digital_population_trace(g, s, 3);
    // At m = 0 the state is the driver ground state and H_eff_1 is nearly
    // pure driver, so p_0 is close to 1.
    REQUIRE(trace.populations[0][0] > 0.9);
}

TEST_CASE("full population set is complete", "[spectral]") {
    const GraphInstance g = oracle::k4();
    AngleSchedule s = linear_dqa_angles(4, 0.9);
    const EvenSector sec(4);
    const PopulationTrace trace =
        digital_population_trace(g, s, static_cast<int>(sec.dim()));
    for (std::size_t i = 0; i < trace.m_grid.size(); ++i)
        REQUIRE(trace.residual_tail[i] == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("hardness screening is deterministic and threshold-consistent", "[spectral]") {
    const auto a = hardness_screen(6, 8, 3, 1e9, 2024, 16, false);
    const auto b = hardness_screen(6, 8, 3, 1e9, 2024, 16, false);
    REQUIRE(a.gaps == b.gaps);
    REQUIRE(a.hard_indices.size() == 6);  // threshold larger than all gaps
    // Hard set sorted by gap.
    for (std::size_t i = 1; i < a.hard_indices.size(); ++i)
        REQUIRE(a.gaps[a.hard_indices[i - 1]] <= a.gaps[a.hard_indices[i]]);
}
