#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qforge/drivers.hpp"

using namespace qforge;

namespace {

BfgsOptions fast_opts() {
    BfgsOptions o;
    o.max_iter = 400;
    return o;
}

}  // namespace

TEST_CASE("ccrab with nc=0 is a pure time-step search", "[drivers]") {
    const GraphInstance g = generate_regular_graph(6, 3, 19);
    const OptimizationResult r = run_ccrab_direct(g, 8, 0, 1, 0, fast_opts());
    REQUIRE(r.crab_coeffs.has_value());
    REQUIRE(r.crab_coeffs->nc() == 0);
    // Optimizing C0 only can never do worse than the dt = 1 linear schedule.
    const ProblemDiagonal diag = problem_diagonal(g);
    REQUIRE(r.energy <= schedule_energy(diag, linear_dqa_angles(8, 1.0)) + 1e-12);
    // And the recomputed energy agrees with the reported one.
    REQUIRE(schedule_energy(diag, r.final_angles) == Catch::Approx(r.energy).margin(1e-10));
}

TEST_CASE("ccrab improves on the linear schedule", "[drivers]") {
    const GraphInstance g = generate_regular_graph(8, 3, 4);
    const ProblemDiagonal diag = problem_diagonal(g);
    const OptimizationResult r = run_ccrab_direct(g, 8, 4, 3, 11, fast_opts());
    REQUIRE(r.energy <= schedule_energy(diag, linear_dqa_angles(8, 1.0)) + 1e-12);
    const ExactSolution sol = exact_extrema(g);
    REQUIRE(r.energy >= sol.e_min - 1e-10);
    REQUIRE(r.energy <= sol.e_max + 1e-10);
    REQUIRE(r.residual == Catch::Approx(residual_energy(r.energy, sol)).margin(1e-14));
}

TEST_CASE("fcrab with a single round is plain best-of CRAB", "[drivers]") {
    const GraphInstance g = generate_regular_graph(6, 3, 8);
    const OptimizationResult r = run_fcrab_iterative(g, 6, 2, 10, 3, 5, fast_opts());
    REQUIRE(r.crab_coeffs->nc() == 2);
    REQUIRE(r.seed_ledger.size() == 3);
}

TEST_CASE("fcrab rounds never increase the energy", "[drivers]") {
    const GraphInstance g = generate_regular_graph(8, 3, 6);
    BfgsOptions opts = fast_opts();
    opts.max_iter = 150;
    const OptimizationResult r2 = run_fcrab_iterative(g, 8, 2, 2, 2, 9, opts);
    const OptimizationResult r4 = run_fcrab_iterative(g, 8, 4, 2, 2, 9, opts);
    // The warm start reproduces the old schedule exactly (zero padding), so
    // each later round starts at the previous optimum.
    REQUIRE(r4.energy <= r2.energy + 1e-12);
}

TEST_CASE("fcrab runs are deterministic per seed", "[drivers]") {
    const GraphInstance g = generate_regular_graph(6, 3, 8);
    const OptimizationResult a = run_fcrab_iterative(g, 6, 4, 2, 2, 123, fast_opts());
    const OptimizationResult b = run_fcrab_iterative(g, 6, 4, 2, 2, 123, fast_opts());
    REQUIRE(a.energy == b.energy);
    REQUIRE(a.final_angles.theta_x == b.final_angles.theta_x);
    REQUIRE(a.seed_ledger == b.seed_ledger);
    REQUIRE(a.trace == b.trace);
}

TEST_CASE("interp seeding formula and endpoints", "[drivers]") {
    // P=2 optimum (a, b) seeds P=3 as (a, (a+b)/2, b).
    const std::vector<double> prev{0.4, 0.9};
    const std::vector<double> out = detail::interp_seed(prev);
    REQUIRE(out.size() == 3);
    REQUIRE(out[0] == Catch::Approx(0.4));
    REQUIRE(out[1] == Catch::Approx(0.65));
    REQUIRE(out[2] == Catch::Approx(0.9));

    // A constant schedule is a fixed point of the interpolation.
    const std::vector<double> cst{0.7, 0.7, 0.7, 0.7};
    for (const double v : detail::interp_seed(cst)) REQUIRE(v == Catch::Approx(0.7));
}

TEST_CASE("loginterp seeding formulas", "[drivers]") {
    const std::vector<double> prev{0.3, 0.8};  // (a, b)
    const std::vector<double> z = detail::loginterp_seed_z(prev);
    REQUIRE(z == std::vector<double>{0.15, 0.3, 0.55, 0.8});
    const std::vector<double> x = detail::loginterp_seed_x(prev);
    REQUIRE(x == std::vector<double>{0.3, 0.55, 0.8, 0.4});

    // Monotone input stays monotone (midpoint insertion).
    const std::vector<double> mono{0.1, 0.4, 0.6, 0.9};
    const std::vector<double> seeded = detail::loginterp_seed_z(mono);
    for (std::size_t i = 1; i < seeded.size(); ++i) REQUIRE(seeded[i] >= seeded[i - 1]);
}

TEST_CASE("interp ladder returns one result per depth", "[drivers]") {
    const GraphInstance g = generate_regular_graph(6, 3, 77);
    BfgsOptions opts = fast_opts();
    opts.max_iter = 120;
    const auto ladder = run_interp(g, 5, opts);
    REQUIRE(ladder.size() == 4);
    for (std::size_t i = 0; i < ladder.size(); ++i)
        REQUIRE(ladder[i].final_angles.p == static_cast<int>(i) + 2);
}

TEST_CASE("loginterp ladder doubles the depth", "[drivers]") {
    const GraphInstance g = generate_regular_graph(6, 3, 78);
    BfgsOptions opts = fast_opts();
    opts.max_iter = 120;
    const auto ladder = run_loginterp(g, 8, opts);
    REQUIRE(ladder.size() == 3);
    REQUIRE(ladder[0].final_angles.p == 2);
    REQUIRE(ladder[1].final_angles.p == 4);
    REQUIRE(ladder[2].final_angles.p == 8);
    REQUIRE_THROWS_AS(run_loginterp(g, 6, opts), std::invalid_argument);
}

TEST_CASE("fourier variant a pads with zeros and keeps improving", "[drivers]") {
    const GraphInstance g = generate_regular_graph(6, 3, 55);
    FourierZhouConfig cfg;
    cfg.variant = 'a';
    cfg.bfgs = fast_opts();
    cfg.bfgs.max_iter = 150;
    const auto ladder = run_fourier_zhou(g, 4, cfg, 7);
    REQUIRE(ladder.size() == 4);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        REQUIRE(ladder[i].final_angles.p == static_cast<int>(i) + 1);
        REQUIRE(ladder[i].fourier_coeffs->nc() == static_cast<int>(i) + 1);
    }
    // Zero padding preserves the previous schedule, so the seed energy at
    // depth P equals the depth P-1 optimum and BFGS can only improve it.
    for (std::size_t i = 1; i < ladder.size(); ++i)
        REQUIRE(ladder[i].energy <= ladder[i - 1].energy + 1e-10);
}

TEST_CASE("zero-padded fourier coefficients reproduce the previous angles", "[drivers]") {
    FourierZhouCoefficients c;
    c.p = 3;
    c.cx = {0.4, -0.2, 0.1};
    c.cz = {0.5, 0.3, -0.1};
    const AngleSchedule before = fourier_zhou_angles(c);
    FourierZhouCoefficients padded = c;
    padded.p = 3;
    padded.cx.push_back(0.0);
    padded.cz.push_back(0.0);
    // Same depth with one more (zeroed) mode: identical angles.
    padded.cx.resize(3);  // Nc <= P constraint at same depth
    padded.cz.resize(3);
    const AngleSchedule after = fourier_zhou_angles(padded);
    for (int m = 0; m < 3; ++m) {
        REQUIRE(after.theta_x[m] == Catch::Approx(before.theta_x[m]).margin(1e-15));
        REQUIRE(after.theta_z[m] == Catch::Approx(before.theta_z[m]).margin(1e-15));
    }
}

TEST_CASE("fourier variant c caps the mode count", "[drivers]") {
    const GraphInstance g = generate_regular_graph(6, 3, 56);
    FourierZhouConfig cfg;
    cfg.variant = 'c';
    cfg.nc_fixed = 2;
    cfg.n_random = 2;
    cfg.bfgs = fast_opts();
    cfg.bfgs.max_iter = 100;
    const auto ladder = run_fourier_zhou(g, 4, cfg, 11);
    REQUIRE(ladder[3].fourier_coeffs->nc() == 2);
    REQUIRE(ladder[1].fourier_coeffs->nc() == 2);
}

TEST_CASE("refine_angles never ends above its warm start", "[drivers]") {
    const GraphInstance g = generate_regular_graph(6, 3, 57);
    const ProblemDiagonal diag = problem_diagonal(g);
    const AngleSchedule start = linear_dqa_angles(6, 0.9);
    const OptimizationResult r = refine_angles(g, start, fast_opts());
    REQUIRE(r.energy <= schedule_energy(diag, start) + 1e-12);
}
