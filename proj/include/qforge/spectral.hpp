#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qforge/evolve.hpp"
#include "qforge/lanczos.hpp"
#include "qforge/parity.hpp"

namespace qforge {

enum class Sector { Full, ParityEven };

inline std::string to_string(Sector s) {
    return s == Sector::Full ? "full" : "parity_even";
}

/// Dense annealing Hamiltonian s H_z + (1-s) H_x (real symmetric), either in
/// the full basis or restricted to the parity-even sector.
inline Eigen::MatrixXd annealing_hamiltonian(const GraphInstance& inst, double s,
                                             Sector sector = Sector::ParityEven) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("annealing_hamiltonian: s outside [0,1]");
    const int n = inst.n_vertices;
    if ((sector == Sector::Full && n > 16) || (sector == Sector::ParityEven && n > 17))
        throw std::invalid_argument("annealing_hamiltonian: dense size guard exceeded");
    const ProblemDiagonal diag = problem_diagonal(inst);
    if (sector == Sector::Full) {
        const std::size_t dim = diag.dim();
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
        for (std::size_t b = 0; b < dim; ++b) {
            h(b, b) = s * diag.values[b];
            for (int j = 0; j < n; ++j) h(b, b ^ (std::size_t(1) << j)) -= (1.0 - s);
        }
        return h;
    }
    const EvenSector sec(n);
    const std::vector<double> d = even_diagonal(diag);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(sec.dim(), sec.dim());
    for (std::size_t r = 0; r < sec.dim(); ++r) {
        h(r, r) += s * d[r];
        for (int j = 0; j < n - 1; ++j) h(r, r ^ (std::size_t(1) << j)) -= (1.0 - s);
        h(r, sec.flip_low(r)) -= (1.0 - s);
    }
    return h;
}

/// Dense third-order BCH generator of one digitized layer (see
/// EffectiveEvenOp for the matrix-free version and the sign convention).
inline Eigen::MatrixXcd effective_hamiltonian(const GraphInstance& inst, double theta_x,
                                              double theta_z, int order = 3,
                                              Sector sector = Sector::ParityEven) {
    if (order < 1 || order > 3)
        throw std::invalid_argument("effective_hamiltonian: order must be in 1..3");
    if (inst.n_vertices > 12)
        throw std::invalid_argument("effective_hamiltonian: dense size guard exceeded");
    const int n = inst.n_vertices;
    const ProblemDiagonal diag = problem_diagonal(inst);

    Eigen::MatrixXcd hx, hz;
    if (sector == Sector::Full) {
        const std::size_t dim = diag.dim();
        hx = Eigen::MatrixXcd::Zero(dim, dim);
        hz = Eigen::MatrixXcd::Zero(dim, dim);
        for (std::size_t b = 0; b < dim; ++b) {
            hz(b, b) = diag.values[b];
            for (int j = 0; j < n; ++j) hx(b, b ^ (std::size_t(1) << j)) -= 1.0;
        }
    } else {
        const EvenSector sec(n);
        const std::vector<double> d = even_diagonal(diag);
        hx = Eigen::MatrixXcd::Zero(sec.dim(), sec.dim());
        hz = Eigen::MatrixXcd::Zero(sec.dim(), sec.dim());
        for (std::size_t r = 0; r < sec.dim(); ++r) {
            hz(r, r) = d[r];
            for (int j = 0; j < n - 1; ++j) hx(r, r ^ (std::size_t(1) << j)) -= 1.0;
            hx(r, sec.flip_low(r)) -= 1.0;
        }
    }

    Eigen::MatrixXcd h = theta_x * hx + theta_z * hz;
    if (order >= 2) {
        const Eigen::MatrixXcd comm = hx * hz - hz * hx;
        h += std::complex<double>(0.0, -0.5 * theta_x * theta_z) * comm;
        if (order >= 3) {
            const Eigen::MatrixXcd xxz = hx * comm - comm * hx;
            const Eigen::MatrixXcd zxz = hz * comm - comm * hz;
            h += (-theta_x * theta_x * theta_z / 12.0) * xxz +
                 (theta_x * theta_z * theta_z / 12.0) * zxz;
        }
    }
    return h;
}

struct SpectralScan {
    std::vector<double> grid;
    std::vector<std::vector<double>> levels;  // ascending, per grid point
    double min_gap = 0.0;
    double s_at_min = 0.0;
    Sector sector = Sector::ParityEven;
};

struct ScanOptions {
    double s_lo = 0.02;
    double s_hi = 0.98;
    int k_levels = 2;
    Sector sector = Sector::ParityEven;
    double ds_tol = 1e-4;  // refinement resolution in s
    EigsOptions eigs;
};

namespace detail {

/// Lowest levels of the annealing Hamiltonian at fixed s, sector-aware,
/// warm-startable with the previous point's eigenvectors.
struct AnnealingLevelSolver {
    const GraphInstance* inst;
    ProblemDiagonal diag;
    std::vector<double> even_diag;
    ScanOptions opts;
    std::vector<Eigen::VectorXd> warm;

    AnnealingLevelSolver(const GraphInstance& g, const ScanOptions& o)
        : inst(&g), diag(problem_diagonal(g)), even_diag(even_diagonal(diag)), opts(o) {}

    std::vector<double> levels_at(double s) {
        EigsOptions eo = opts.eigs;
        eo.k = opts.k_levels;
        if (opts.sector == Sector::ParityEven) {
            const EvenSector sec(inst->n_vertices);
            AnnealingEvenOp op(sec, even_diag, s);
            auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) { op(in, out); };
            auto r = lowest_eigenpairs<double>(sec.dim(), apply, eo,
                                               warm.empty() ? nullptr : &warm);
            warm = std::move(r.vectors);
            return r.values;
        }
        const std::size_t dim = diag.dim();
        auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
            out.resize(dim);
            for (std::size_t b = 0; b < dim; ++b) out[b] = s * diag.values[b] * in[b];
            Eigen::VectorXd hx;
            // Full-space H_x via the even kernel's pattern, all n qubits.
            hx.setZero(dim);
            for (std::size_t b = 0; b < dim; ++b) {
                double acc = 0.0;
                for (int j = 0; j < inst->n_vertices; ++j)
                    acc += in[b ^ (std::size_t(1) << j)];
                hx[b] = -acc;
            }
            out += (1.0 - s) * hx;
        };
        auto r = lowest_eigenpairs<double>(dim, apply, eo, warm.empty() ? nullptr : &warm);
        warm = std::move(r.vectors);
        return r.values;
    }

    double gap_at(double s) {
        const auto lv = levels_at(s);
        return lv[1] - lv[0];
    }
};

}  // namespace detail

/// Coarse scan of the two lowest levels over s, optionally refined with a
/// golden-section search of the bracketed minimum gap.
inline SpectralScan min_gap_scan(const GraphInstance& inst, int n_grid, bool refine = true,
                                 const ScanOptions& opts = {}) {
    if (n_grid < 16) throw std::invalid_argument("min_gap_scan: n_grid must be >= 16");
    if (opts.k_levels < 2) throw std::invalid_argument("min_gap_scan: need at least 2 levels");
    detail::AnnealingLevelSolver solver(inst, opts);

    SpectralScan scan;
    scan.sector = opts.sector;
    scan.grid.resize(n_grid);
    scan.levels.resize(n_grid);
    std::size_t i_min = 0;
    for (int i = 0; i < n_grid; ++i) {
        const double s = opts.s_lo + (opts.s_hi - opts.s_lo) * i / (n_grid - 1);
        scan.grid[i] = s;
        scan.levels[i] = solver.levels_at(s);
        if (scan.levels[i][1] - scan.levels[i][0] <
            scan.levels[i_min][1] - scan.levels[i_min][0])
            i_min = i;
    }
    scan.min_gap = scan.levels[i_min][1] - scan.levels[i_min][0];
    scan.s_at_min = scan.grid[i_min];

    if (refine) {
        double a = scan.grid[i_min > 0 ? i_min - 1 : 0];
        double b = scan.grid[std::min<std::size_t>(i_min + 1, n_grid - 1)];
        const double gr = 0.61803398874989484820458683436564;
        double x1 = b - gr * (b - a);
        double x2 = a + gr * (b - a);
        double f1 = solver.gap_at(x1);
        double f2 = solver.gap_at(x2);
        auto consider = [&](double s, double g) {
            if (g < scan.min_gap) {
                scan.min_gap = g;
                scan.s_at_min = s;
            }
        };
        consider(x1, f1);
        consider(x2, f2);
        while (b - a > opts.ds_tol) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = solver.gap_at(x1);
                consider(x1, f1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = solver.gap_at(x2);
                consider(x2, f2);
            }
        }
    }
    return scan;
}

struct PopulationTrace {
    std::vector<double> m_grid;                  // layer index (digital) or time
    std::vector<std::vector<double>> populations;  // k values per point
    std::vector<double> residual_tail;           // 1 - sum of tracked populations
    double min_gap_marker = 0.0;                 // where H_eff attains its minimum gap
    double min_gap_value = 0.0;
};

/// Populations of the k lowest instantaneous eigenstates of the third-order
/// effective Hamiltonian along a digitized schedule, in the even sector (the
/// dynamics never leaves it). Point m = 0 is scored against H_eff of layer 1.
/// Levels degenerate within a relative tolerance of 1e-9 are merged: the
/// cluster's total weight is reported on its lowest index.
inline PopulationTrace digital_population_trace(const GraphInstance& inst,
                                                const AngleSchedule& schedule, int k = 3,
                                                int order = 3,
                                                const EigsOptions& eigs_in = {}) {
    if (k < 2) throw std::invalid_argument("digital_population_trace: k must be >= 2");
    for (int m = 0; m < schedule.p; ++m)
        if (schedule.theta_x[m] == 0.0 && schedule.theta_z[m] == 0.0)
            throw std::invalid_argument(
                "digital_population_trace: zero layer has no effective Hamiltonian");

    const ProblemDiagonal diag = problem_diagonal(inst);
    const std::vector<double> ediag = even_diagonal(diag);
    const EvenSector sec(inst.n_vertices);
    const std::vector<StateVector> states = evolve_digitized_recorded(diag, schedule);
    const int p = schedule.p;

    PopulationTrace trace;
    trace.m_grid.resize(p + 1);
    trace.populations.resize(p + 1);
    trace.residual_tail.resize(p + 1);
    std::vector<double> gaps(p + 1, 0.0);

    // Layer chunks run in parallel; each chunk warm-starts its own sweep.
    const unsigned n_threads = std::min<unsigned>(max_threads(), 4);
    const int chunk = (p + 1 + n_threads - 1) / n_threads;
    parallel_for_index(n_threads, [&](std::size_t t) {
        const int lo = static_cast<int>(t) * chunk;
        const int hi = std::min(lo + chunk, p + 1);
        std::vector<Eigen::VectorXcd> warm;
        for (int m = lo; m < hi; ++m) {
            const int layer = std::max(m, 1);
            EffectiveEvenOp op(sec, ediag, schedule.theta_x[layer - 1],
                               schedule.theta_z[layer - 1], order);
            auto apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { op(in, out); };
            EigsOptions eo = eigs_in;
            eo.k = k + 1;  // one extra level so the top tracked gap is meaningful
            auto eig = lowest_eigenpairs<std::complex<double>>(sec.dim(), apply, eo,
                                                               warm.empty() ? nullptr : &warm);
            warm = eig.vectors;

            const Eigen::VectorXcd psi = even_project(states[m]);
            std::vector<double> q(k, 0.0);
            for (int j = 0; j < k; ++j)
                q[j] = std::norm(eig.vectors[j].dot(psi));
            // Merge degenerate clusters onto the lowest member.
            const double scale = std::max(std::abs(eig.values.front()),
                                          std::abs(eig.values.back()));
            int base = 0;
            for (int j = 1; j < k; ++j) {
                if (std::abs(eig.values[j] - eig.values[base]) <= 1e-9 * scale) {
                    q[base] += q[j];
                    q[j] = 0.0;
                } else {
                    base = j;
                }
            }
            double tracked = 0.0;
            for (const double v : q) tracked += v;
            trace.m_grid[m] = m;
            trace.populations[m] = std::move(q);
            trace.residual_tail[m] = 1.0 - tracked;
            gaps[m] = eig.values[1] - eig.values[0];
        }
    });

    int m_star = 1;
    for (int m = 2; m <= p; ++m)
        if (gaps[m] < gaps[m_star]) m_star = m;
    trace.min_gap_marker = m_star;
    trace.min_gap_value = gaps[m_star];
    return trace;
}

struct ScreenResult {
    std::vector<GraphInstance> instances;
    std::vector<SpectralScan> scans;  // per instance
    std::vector<double> gaps;      // per instance
    std::vector<double> s_at_min;  // per instance
    std::vector<std::size_t> hard_indices;  // gap <= threshold, sorted by gap
    double gap_threshold = 0.0;
};

/// Generate `count` seeded instances, scan each for its minimum gap, and
/// label the subset at or below the threshold as hard.
inline ScreenResult hardness_screen(int count, int n, int degree, double gap_threshold,
                                    std::uint64_t seed, int n_grid = 33, bool refine = true,
                                    const ScanOptions& opts = {}) {
    if (count < 1) throw std::invalid_argument("hardness_screen: count must be >= 1");
    ScreenResult out;
    out.gap_threshold = gap_threshold;
    out.instances.resize(count);
    out.scans.resize(count);
    out.gaps.resize(count);
    out.s_at_min.resize(count);
    for (int i = 0; i < count; ++i) {
        char label[16];
        std::snprintf(label, sizeof(label), "g%03d", i);
        out.instances[i] = generate_regular_graph(n, degree, child_seed(seed, i), label);
    }
    parallel_for_index(count, [&](std::size_t i) {
        out.scans[i] = min_gap_scan(out.instances[i], n_grid, refine, opts);
        out.gaps[i] = out.scans[i].min_gap;
        out.s_at_min[i] = out.scans[i].s_at_min;
    });
    std::vector<std::size_t> order(count);
    for (int i = 0; i < count; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out.gaps[a] < out.gaps[b]; });
    for (const auto i : order)
        if (out.gaps[i] <= gap_threshold) out.hard_indices.push_back(i);
    return out;
}

inline nlohmann::json to_json(const SpectralScan& scan) {
    return {{"grid", scan.grid},
            {"levels", scan.levels},
            {"min_gap", scan.min_gap},
            {"s_at_min", scan.s_at_min},
            {"sector", to_string(scan.sector)}};
}

}  // namespace qforge
