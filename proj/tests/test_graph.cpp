#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qforge/graph.hpp"

using namespace qforge;

TEST_CASE("K4 is the unique 3-regular graph on 4 vertices", "[graph]") {
    const GraphInstance g = generate_regular_graph(4, 3, 7);
    REQUIRE(g.edges.size() == 6);
    for (const int d : vertex_degrees(g)) REQUIRE(d == 3);
}

TEST_CASE("handshake lemma fixes the edge count", "[graph]") {
    const GraphInstance g = generate_regular_graph(14, 3, 42);
    REQUIRE(g.edges.size() == 21);
    for (const int d : vertex_degrees(g)) REQUIRE(d == 3);
    for (const auto& e : g.edges) {
        REQUIRE(e.w > 0.0);
        REQUIRE(e.w <= 1.0);
    }
}

TEST_CASE("infeasible degree sequences are rejected", "[graph]") {
    REQUIRE_THROWS_AS(generate_regular_graph(5, 3, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(generate_regular_graph(4, 4, 1), std::invalid_argument);
}

TEST_CASE("generation is deterministic per seed", "[graph]") {
    const GraphInstance a = generate_regular_graph(14, 3, 123);
    const GraphInstance b = generate_regular_graph(14, 3, 123);
    const GraphInstance c = generate_regular_graph(14, 3, 124);
    REQUIRE(a.edges.size() == b.edges.size());
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        same = same && a.edges[i].i == b.edges[i].i && a.edges[i].j == b.edges[i].j &&
               a.edges[i].w == b.edges[i].w;
        if (i < c.edges.size())
            differs = differs || a.edges[i].i != c.edges[i].i || a.edges[i].w != c.edges[i].w;
    }
    REQUIRE(same);
    REQUIRE(differs);
}

TEST_CASE("classical energy on hand cases", "[graph]") {
    const GraphInstance edge = oracle::single_edge(1.0);
    REQUIRE(classical_energy(edge, 0b01) == -1.0);
    REQUIRE(classical_energy(edge, 0b00) == 0.0);
    REQUIRE(classical_energy(oracle::k4(), 0b0011) == -4.0);
    REQUIRE_THROWS_AS(classical_energy(edge, 0b100), std::invalid_argument);
}

TEST_CASE("exact extrema on hand cases", "[graph]") {
    const ExactSolution edge = exact_extrema(oracle::single_edge(0.5));
    REQUIRE(edge.e_min == -0.5);
    REQUIRE(edge.e_max == 0.0);
    REQUIRE(edge.degeneracy == 2);

    const ExactSolution tri = exact_extrema(oracle::triangle());
    REQUIRE(tri.e_min == -2.0);
    REQUIRE(tri.degeneracy == 6);

    const ExactSolution k4 = exact_extrema(oracle::k4());
    REQUIRE(k4.e_min == -4.0);
    REQUIRE(k4.e_max == 0.0);
}

TEST_CASE("ground bitstrings evaluate to e_min and appear in flip pairs", "[graph]") {
    const GraphInstance g = generate_regular_graph(10, 3, 5);
    const ExactSolution sol = exact_extrema(g);
    REQUIRE(sol.degeneracy % 2 == 0);
    const std::uint64_t mask = (1ULL << g.n_vertices) - 1;
    for (const auto b : sol.ground_bitstrings) {
        REQUIRE(classical_energy(g, b) == sol.e_min);
        REQUIRE(std::count(sol.ground_bitstrings.begin(), sol.ground_bitstrings.end(),
                           ~b & mask) == 1);
    }
}

TEST_CASE("spin-flip symmetry of the energy", "[graph]") {
    const GraphInstance g = generate_regular_graph(8, 3, 11);
    const std::uint64_t mask = (1ULL << g.n_vertices) - 1;
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const std::uint64_t b = rng.uniform_int(mask + 1);
        REQUIRE(classical_energy(g, b) == classical_energy(g, ~b & mask));
    }
}

TEST_CASE("vertex relabeling leaves the extrema unchanged", "[graph]") {
    const GraphInstance g = generate_regular_graph(8, 3, 17);
    // A fixed permutation of the vertices.
    std::vector<int> perm{3, 1, 7, 0, 6, 2, 5, 4};
    GraphInstance h = g;
    for (auto& e : h.edges) {
        e.i = perm[e.i];
        e.j = perm[e.j];
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(h.edges.begin(), h.edges.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    const ExactSolution sa = exact_extrema(g);
    const ExactSolution sb = exact_extrema(h);
    // Edge reordering reassociates the weight sums, hence the tiny margin.
    REQUIRE(sa.e_min == Catch::Approx(sb.e_min).margin(1e-12));
    REQUIRE(sa.e_max == sb.e_max);
    REQUIRE(sa.degeneracy == sb.degeneracy);
}

TEST_CASE("half-space enumeration matches the full scan exactly", "[graph]") {
    const GraphInstance g = generate_regular_graph(10, 3, 23);
    const auto [lo, hi] = oracle::full_scan_extrema(g);
    const ExactSolution sol = exact_extrema(g);
    REQUIRE(sol.e_min == lo);
    REQUIRE(sol.e_max == hi);
    REQUIRE(sol.e_max == 0.0);  // positive weights: the uncut state attains 0
}

TEST_CASE("residual energy rescaling", "[graph]") {
    ExactSolution sol;
    sol.e_min = -1.0;
    sol.e_max = 0.0;
    REQUIRE(residual_energy(-1.0, sol) == 0.0);
    REQUIRE(residual_energy(0.0, sol) == 1.0);
    REQUIRE(residual_energy(-0.5, sol) == 0.5);
    sol.e_max = sol.e_min;
    REQUIRE_THROWS_AS(residual_energy(-0.5, sol), std::invalid_argument);
}

TEST_CASE("instance JSON round trip", "[graph]") {
    const GraphInstance g = generate_regular_graph(12, 3, 99, "trip");
    const GraphInstance h = graph_from_json(to_json(g));
    REQUIRE(h.label == g.label);
    REQUIRE(h.seed == g.seed);
    REQUIRE(h.edges.size() == g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        REQUIRE(h.edges[i].i == g.edges[i].i);
        REQUIRE(h.edges[i].j == g.edges[i].j);
        REQUIRE(h.edges[i].w == g.edges[i].w);  // full double precision
    }
}
