#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "qforge/common.hpp"

#include <json.hpp>

namespace qforge {

struct Edge {
    int i = 0;
    int j = 0;
    double w = 0.0;
};

/// Weighted graph defining a MaxCut problem. Edges are stored with i < j,
/// sorted lexicographically; weights lie in (0, 1].
struct GraphInstance {
    int n_vertices = 0;
    std::vector<Edge> edges;
    std::string label;
    std::uint64_t seed = 0;
};

inline void validate(const GraphInstance& g) {
    if (g.n_vertices < 1 || g.n_vertices > kMaxQubits)
        throw std::invalid_argument("GraphInstance: vertex count out of range");
    for (const auto& e : g.edges) {
        if (!(0 <= e.i && e.i < e.j && e.j < g.n_vertices))
            throw std::invalid_argument("GraphInstance: bad edge endpoints");
        if (!(e.w > 0.0 && e.w <= 1.0))
            throw std::invalid_argument("GraphInstance: weight outside (0,1]");
    }
    for (std::size_t k = 1; k < g.edges.size(); ++k) {
        const auto& a = g.edges[k - 1];
        const auto& b = g.edges[k];
        if (a.i == b.i && a.j == b.j)
            throw std::invalid_argument("GraphInstance: duplicate edge");
    }
}

inline std::vector<int> vertex_degrees(const GraphInstance& g) {
    std::vector<int> deg(g.n_vertices, 0);
    for (const auto& e : g.edges) {
        ++deg[e.i];
        ++deg[e.j];
    }
    return deg;
}

/// Uniformly sampled simple d-regular graph (configuration model with full
/// restart on self-loops or multi-edges), i.i.d. uniform(0,1] weights.
/// Deterministic for a given seed.
inline GraphInstance generate_regular_graph(int n, int degree, std::uint64_t seed,
                                            std::string label = {},
                                            int max_restarts = 20000) {
    if (degree < 1 || degree >= n || (static_cast<long>(n) * degree) % 2 != 0)
        throw std::invalid_argument("generate_regular_graph: infeasible (n, degree)");
    Rng rng(seed);
    const int n_stubs = n * degree;
    std::vector<int> stubs(n_stubs);
    for (int restart = 0; restart < max_restarts; ++restart) {
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < degree; ++k) stubs[v * degree + k] = v;
        // Fisher-Yates, spelled out so the draw sequence is pinned.
        for (int k = n_stubs - 1; k > 0; --k) {
            const auto r = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k) + 1));
            std::swap(stubs[k], stubs[r]);
        }
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(n_stubs / 2);
        bool ok = true;
        for (int k = 0; k < n_stubs; k += 2) {
            int a = stubs[k], b = stubs[k + 1];
            if (a == b) {
                ok = false;
                break;
            }
            if (a > b) std::swap(a, b);
            pairs.emplace_back(a, b);
        }
        if (!ok) continue;
        std::sort(pairs.begin(), pairs.end());
        if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) continue;

        GraphInstance g;
        g.n_vertices = n;
        g.seed = seed;
        g.label = label.empty() ? ("r" + std::to_string(degree) + "n" + std::to_string(n) +
                                   "s" + std::to_string(seed))
                                : std::move(label);
        g.edges.reserve(pairs.size());
        for (const auto& [a, b] : pairs) g.edges.push_back({a, b, rng.uniform_pos()});
        validate(g);
        return g;
    }
    throw std::runtime_error("generate_regular_graph: retry budget exceeded at seed " +
                             std::to_string(seed));
}

/// Classical MaxCut energy of a bit configuration (bit v of `bits` is the
/// spin of vertex v; 0 <-> sigma_z = +1). Each cut edge contributes -w.
inline double classical_energy(const GraphInstance& g, std::uint64_t bits) {
    if (g.n_vertices < 64 && (bits >> g.n_vertices) != 0)
        throw std::invalid_argument("classical_energy: configuration wider than graph");
    double e = 0.0;
    for (const auto& edge : g.edges) {
        const bool cut = (((bits >> edge.i) ^ (bits >> edge.j)) & 1ULL) != 0;
        if (cut) e -= edge.w;
    }
    return e;
}

struct ExactSolution {
    double e_min = 0.0;
    double e_max = 0.0;
    std::vector<std::uint64_t> ground_bitstrings;
    std::int64_t degeneracy = 0;
};

/// Exhaustive extrema of the classical energy. Enumerates the half-space
/// with bit 0 fixed to 0 (the global spin flip maps it onto the rest) and
/// mirrors every minimizer.
inline ExactSolution exact_extrema(const GraphInstance& g) {
    if (g.n_vertices > kMaxQubits)
        throw std::invalid_argument("exact_extrema: instance too large for enumeration");
    const std::uint64_t mask = (g.n_vertices == 64) ? ~0ULL : ((1ULL << g.n_vertices) - 1);
    ExactSolution sol;
    sol.e_min = std::numeric_limits<double>::infinity();
    sol.e_max = -std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> mins;
    for (std::uint64_t b = 0; b <= mask; b += 2) {
        const double e = classical_energy(g, b);
        if (e < sol.e_min) {
            sol.e_min = e;
            mins.clear();
            mins.push_back(b);
        } else if (e == sol.e_min) {
            mins.push_back(b);
        }
        if (e > sol.e_max) sol.e_max = e;
    }
    sol.ground_bitstrings.reserve(2 * mins.size());
    for (const auto b : mins) {
        sol.ground_bitstrings.push_back(b);
        sol.ground_bitstrings.push_back(~b & mask);
    }
    std::sort(sol.ground_bitstrings.begin(), sol.ground_bitstrings.end());
    sol.degeneracy = static_cast<std::int64_t>(sol.ground_bitstrings.size());
    return sol;
}

/// (e_fin - e_min) / (e_max - e_min).
inline double residual_energy(double e_fin, const ExactSolution& sol) {
    if (!(sol.e_min < sol.e_max))
        throw std::invalid_argument("residual_energy: degenerate energy range");
    return (e_fin - sol.e_min) / (sol.e_max - sol.e_min);
}

inline nlohmann::json to_json(const GraphInstance& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges) edges.push_back({e.i, e.j, e.w});
    return {{"label", g.label}, {"n", g.n_vertices}, {"seed", g.seed}, {"edges", edges}};
}

inline GraphInstance graph_from_json(const nlohmann::json& j) {
    GraphInstance g;
    g.label = j.at("label").get<std::string>();
    g.n_vertices = j.at("n").get<int>();
    g.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& e : j.at("edges"))
        g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    std::sort(g.edges.begin(), g.edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    validate(g);
    return g;
}

}  // namespace qforge
