#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qforge/bfgs.hpp"
#include "qforge/common.hpp"
#include "qforge/gradient.hpp"

namespace qforge {

enum class Method { Lin, FCrab, CCrab, Interp, LogInterp, FourierA, FourierB, FourierC };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::Lin: return "lin";
        case Method::FCrab: return "fcrab";
        case Method::CCrab: return "ccrab";
        case Method::Interp: return "interp";
        case Method::LogInterp: return "loginterp";
        case Method::FourierA: return "fourier-a";
        case Method::FourierB: return "fourier-b";
        case Method::FourierC: return "fourier-c";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    for (Method m : {Method::Lin, Method::FCrab, Method::CCrab, Method::Interp,
                     Method::LogInterp, Method::FourierA, Method::FourierB, Method::FourierC})
        if (method_name(m) == s) return m;
    throw std::invalid_argument("unknown method: " + s);
}

struct OptimizationResult {
    Method method = Method::Lin;
    AngleSchedule final_angles;
    std::optional<CrabCoefficients> crab_coeffs;
    std::optional<FourierZhouCoefficients> fourier_coeffs;
    double energy = 0.0;
    double residual = 0.0;
    double grad_norm = 0.0;
    long n_evaluations = 0;
    bool degraded = false;  // a line search gave up somewhere along the way
    std::vector<std::pair<int, double>> trace;
    std::vector<std::uint64_t> seed_ledger;
};

namespace detail {

inline Eigen::VectorXd pack_crab(const CrabCoefficients& c) {
    Eigen::VectorXd x(2 * c.nc() + 1);
    x[0] = c.c0;
    for (int n = 0; n < c.nc(); ++n) {
        x[1 + n] = c.cx[n];
        x[1 + c.nc() + n] = c.cz[n];
    }
    return x;
}

inline CrabCoefficients unpack_crab(const Eigen::VectorXd& x, const CrabCoefficients& proto) {
    CrabCoefficients c = proto;
    c.c0 = x[0];
    for (int n = 0; n < c.nc(); ++n) {
        c.cx[n] = x[1 + n];
        c.cz[n] = x[1 + c.nc() + n];
    }
    return c;
}

inline Eigen::VectorXd pack_fourier(const FourierZhouCoefficients& c) {
    Eigen::VectorXd x(2 * c.nc());
    for (int n = 0; n < c.nc(); ++n) {
        x[n] = c.cx[n];
        x[c.nc() + n] = c.cz[n];
    }
    return x;
}

inline FourierZhouCoefficients unpack_fourier(const Eigen::VectorXd& x, int p) {
    FourierZhouCoefficients c;
    c.p = p;
    const int nc = static_cast<int>(x.size()) / 2;
    c.cx.assign(x.data(), x.data() + nc);
    c.cz.assign(x.data() + nc, x.data() + 2 * nc);
    return c;
}

inline Eigen::VectorXd pack_angles(const AngleSchedule& s) {
    Eigen::VectorXd x(2 * s.p);
    for (int m = 0; m < s.p; ++m) {
        x[m] = s.theta_x[m];
        x[s.p + m] = s.theta_z[m];
    }
    return x;
}

inline AngleSchedule unpack_angles(const Eigen::VectorXd& x) {
    const int p = static_cast<int>(x.size()) / 2;
    AngleSchedule s(p);
    for (int m = 0; m < p; ++m) {
        s.theta_x[m] = x[m];
        s.theta_z[m] = x[p + m];
    }
    return s;
}

/// Deterministic argmin over branch results: energy, then gradient norm,
/// then branch index.
inline std::size_t select_best(const std::vector<BfgsResult>& branches) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < branches.size(); ++i) {
        const auto& a = branches[i];
        const auto& b = branches[best];
        if (a.f < b.f || (a.f == b.f && a.grad_norm < b.grad_norm)) best = i;
    }
    return best;
}

}  // namespace detail

namespace detail {

/// Objective for any linear angle parameterization theta = J x: the basis
/// functions live entirely in the precomputed Jacobian, and the adjoint
/// workspace is reused across evaluations.
inline ObjectiveWithGradient linear_map_objective(const ProblemDiagonal& diag,
                                                  Eigen::MatrixXd jacobian) {
    auto ws = std::make_shared<AdjointWorkspace>();
    const int p = static_cast<int>(jacobian.rows()) / 2;
    return [&diag, jacobian = std::move(jacobian), ws, p](const Eigen::VectorXd& x,
                                                          Eigen::VectorXd& grad) {
        const Eigen::VectorXd theta = jacobian * x;
        const EnergyGradient g =
            energy_and_angle_gradient(diag, unpack_angles(theta), ws.get());
        Eigen::VectorXd gtheta(2 * p);
        for (int m = 0; m < p; ++m) {
            gtheta[m] = g.grad_x[m];
            gtheta[p + m] = g.grad_z[m];
        }
        grad = jacobian.transpose() * gtheta;
        return g.energy;
    };
}

}  // namespace detail

/// BFGS over CRAB coefficients with fixed noise and basis.
inline BfgsResult minimize_crab(const ProblemDiagonal& diag, const CrabCoefficients& start,
                                const BfgsOptions& opts) {
    return bfgs_minimize(detail::linear_map_objective(diag, crab_angle_jacobian(start)),
                         detail::pack_crab(start), opts);
}

/// BFGS over the raw 2P angles.
inline BfgsResult minimize_angles(const ProblemDiagonal& diag, const AngleSchedule& start,
                                  const BfgsOptions& opts) {
    auto ws = std::make_shared<AdjointWorkspace>();
    const ObjectiveWithGradient fg = [&diag, ws](const Eigen::VectorXd& x,
                                                 Eigen::VectorXd& grad) {
        const EnergyGradient g =
            energy_and_angle_gradient(diag, detail::unpack_angles(x), ws.get());
        grad.resize(x.size());
        const int p = static_cast<int>(x.size()) / 2;
        for (int m = 0; m < p; ++m) {
            grad[m] = g.grad_x[m];
            grad[p + m] = g.grad_z[m];
        }
        return g.energy;
    };
    return bfgs_minimize(fg, detail::pack_angles(start), opts);
}

inline BfgsResult minimize_fourier(const ProblemDiagonal& diag,
                                   const FourierZhouCoefficients& start,
                                   const BfgsOptions& opts) {
    return bfgs_minimize(detail::linear_map_objective(diag, fourier_zhou_jacobian(start)),
                         detail::pack_fourier(start), opts);
}

namespace detail {

inline OptimizationResult make_result(Method method, const ProblemDiagonal& diag,
                                      const ExactSolution& sol, const AngleSchedule& angles,
                                      const BfgsResult& bfgs) {
    OptimizationResult r;
    r.method = method;
    r.final_angles = angles;
    r.energy = bfgs.f;
    r.residual = residual_energy(bfgs.f, sol);
    r.grad_norm = bfgs.grad_norm;
    r.n_evaluations = bfgs.n_evaluations;
    r.degraded = bfgs.line_search_failed;
    r.trace = bfgs.trace;
    (void)diag;
    return r;
}

}  // namespace detail

/// Best-of-n_r CRAB with a fresh noise draw per branch, each branch BFGS-
/// minimized from the linear-dQA initial point (C0 = 1, C = 0). nc = 0
/// degenerates to a pure time-step search.
inline OptimizationResult run_ccrab_direct(const GraphInstance& inst, int p, int nc, int n_r,
                                           std::uint64_t seed, const BfgsOptions& opts = {},
                                           CrabBasis basis = CrabBasis::ChebyshevSignomial,
                                           Method tag = Method::CCrab) {
    if (p < 1 || nc < 0 || n_r < 1) throw std::invalid_argument("run_ccrab_direct: bad inputs");
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);

    const int branches = (nc == 0) ? 1 : n_r;
    std::vector<std::uint64_t> seeds(branches);
    for (int b = 0; b < branches; ++b) seeds[b] = child_seed(seed, static_cast<std::uint64_t>(b));

    std::vector<BfgsResult> results(branches);
    std::vector<CrabCoefficients> coeffs(branches);
    parallel_for_index(branches, [&](std::size_t b) {
        CrabCoefficients c;
        c.p = p;
        c.basis = basis;
        c.c0 = 1.0;
        c.cx.assign(nc, 0.0);
        c.cz.assign(nc, 0.0);
        c.noise = sample_noise(nc, seeds[b]);
        results[b] = minimize_crab(diag, c, opts);
        coeffs[b] = detail::unpack_crab(results[b].x, c);
    });

    const std::size_t best = detail::select_best(results);
    OptimizationResult out = detail::make_result(tag, diag, sol, crab_angles(coeffs[best]),
                                                 results[best]);
    out.crab_coeffs = coeffs[best];
    out.seed_ledger = seeds;
    long total = 0;
    for (const auto& r : results) total += r.n_evaluations;
    out.n_evaluations = total;
    return out;
}

/// Linear-schedule dQA with the time step as the only variational parameter.
inline OptimizationResult run_lin(const GraphInstance& inst, int p,
                                  const BfgsOptions& opts = {}) {
    return run_ccrab_direct(inst, p, 0, 1, 0, opts, CrabBasis::ChebyshevSignomial, Method::Lin);
}

/// Iterative F-CRAB: start at Nc = 2 with n_r noise redraws, then grow the
/// basis in steps, keeping previous frequencies fixed, zero-padding the new
/// coefficients and warm-starting from the previous optimum.
inline OptimizationResult run_fcrab_iterative(const GraphInstance& inst, int p, int nc_max,
                                              int nc_step, int n_r, std::uint64_t seed,
                                              const BfgsOptions& opts = {},
                                              CrabBasis basis = CrabBasis::FourierSine,
                                              Method tag = Method::FCrab) {
    if (p < 1 || nc_max < 0 || nc_step < 1 || n_r < 1)
        throw std::invalid_argument("run_fcrab_iterative: bad inputs");
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);

    std::vector<int> rounds{std::min(2, nc_max)};
    while (rounds.back() < nc_max) rounds.push_back(std::min(rounds.back() + nc_step, nc_max));

    CrabCoefficients current;
    current.p = p;
    current.basis = basis;
    current.c0 = 1.0;
    BfgsResult current_bfgs;
    std::vector<std::uint64_t> ledger;
    long total_evals = 0;
    bool degraded = false;
    std::uint64_t stream = 0;

    for (std::size_t round = 0; round < rounds.size(); ++round) {
        const int nc_new = rounds[round];
        const int nc_old = current.nc();
        const int n_fresh = nc_new - nc_old;
        const int branches = (n_fresh > 0) ? n_r : 1;

        std::vector<std::uint64_t> seeds(branches);
        for (int b = 0; b < branches; ++b) seeds[b] = child_seed(seed, stream++);
        ledger.insert(ledger.end(), seeds.begin(), seeds.end());

        std::vector<BfgsResult> results(branches);
        std::vector<CrabCoefficients> starts(branches);
        parallel_for_index(branches, [&](std::size_t b) {
            CrabCoefficients c = current;
            c.cx.resize(nc_new, 0.0);
            c.cz.resize(nc_new, 0.0);
            const std::vector<double> fresh = sample_noise(n_fresh, seeds[b]);
            c.noise.insert(c.noise.end(), fresh.begin(), fresh.end());
            starts[b] = c;
            results[b] = minimize_crab(diag, c, opts);
        });

        const std::size_t best = detail::select_best(results);
        current = detail::unpack_crab(results[best].x, starts[best]);
        current_bfgs = results[best];
        for (const auto& r : results) {
            total_evals += r.n_evaluations;
            degraded = degraded || r.line_search_failed;
        }
    }

    OptimizationResult out = detail::make_result(tag, diag, sol, crab_angles(current),
                                                 current_bfgs);
    out.crab_coeffs = current;
    out.seed_ledger = ledger;
    out.n_evaluations = total_evals;
    out.degraded = degraded;
    return out;
}

/// BFGS refinement of an explicit angle schedule (used by the QAOA-style
/// iterations and by warm-started transfer).
inline OptimizationResult refine_angles(const GraphInstance& inst, const AngleSchedule& start,
                                        const BfgsOptions& opts = {},
                                        Method tag = Method::Interp) {
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);
    const BfgsResult r = minimize_angles(diag, start, opts);
    return detail::make_result(tag, diag, sol, detail::unpack_angles(r.x), r);
}

namespace detail {

/// theta^(0,P+1)_m = ((m-1)/P) theta_{m-1} + ((P-m+1)/P) theta_m, endpoints kept.
inline std::vector<double> interp_seed(const std::vector<double>& prev) {
    const int p = static_cast<int>(prev.size());
    std::vector<double> out(p + 1);
    auto at = [&](int m1) { return (m1 >= 1 && m1 <= p) ? prev[m1 - 1] : 0.0; };
    for (int m = 1; m <= p + 1; ++m) {
        const double a = static_cast<double>(m - 1) / p;
        out[m - 1] = a * at(m - 1) + (1.0 - a) * at(m);
    }
    return out;
}

/// Doubling seed with the vanishing-at-start boundary (theta_0 = 0):
/// even slots copy, odd slots take midpoints.
inline std::vector<double> loginterp_seed_z(const std::vector<double>& prev) {
    const int p = static_cast<int>(prev.size());
    std::vector<double> out(2 * p);
    for (int m = 1; m <= p; ++m) {
        out[2 * m - 1] = prev[m - 1];
        const double left = (m >= 2) ? prev[m - 2] : 0.0;
        out[2 * m - 2] = 0.5 * (left + prev[m - 1]);
    }
    return out;
}

/// Doubling seed with the vanishing-at-end boundary (theta_{P+1} = 0).
inline std::vector<double> loginterp_seed_x(const std::vector<double>& prev) {
    const int p = static_cast<int>(prev.size());
    std::vector<double> out(2 * p);
    for (int m = 1; m <= p; ++m) {
        out[2 * m - 2] = prev[m - 1];
        const double right = (m < p) ? prev[m] : 0.0;
        out[2 * m - 1] = 0.5 * (prev[m - 1] + right);
    }
    return out;
}

}  // namespace detail

/// QAOA-INTERP: optimize P = 2 from linear dQA angles, then grow one layer
/// at a time through the interpolation seed. Returns one result per depth.
inline std::vector<OptimizationResult> run_interp(const GraphInstance& inst, int p_max,
                                                  const BfgsOptions& opts = {}) {
    if (p_max < 2) throw std::invalid_argument("run_interp: p_max must be >= 2");
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);

    std::vector<OptimizationResult> ladder;
    BfgsResult r = minimize_angles(diag, linear_dqa_angles(2, 1.0), opts);
    ladder.push_back(detail::make_result(Method::Interp, diag, sol,
                                         detail::unpack_angles(r.x), r));
    for (int p = 3; p <= p_max; ++p) {
        const AngleSchedule& prev = ladder.back().final_angles;
        AngleSchedule start(p);
        start.theta_x = detail::interp_seed(prev.theta_x);
        start.theta_z = detail::interp_seed(prev.theta_z);
        r = minimize_angles(diag, start, opts);
        ladder.push_back(detail::make_result(Method::Interp, diag, sol,
                                             detail::unpack_angles(r.x), r));
    }
    return ladder;
}

/// QAOA-LogINTERP: depth-doubling ladder 2, 4, ..., p_max (p_max a power of
/// two), with asymmetric seeds for the two angle families.
inline std::vector<OptimizationResult> run_loginterp(const GraphInstance& inst, int p_max,
                                                     const BfgsOptions& opts = {}) {
    if (p_max < 2 || (p_max & (p_max - 1)) != 0)
        throw std::invalid_argument("run_loginterp: p_max must be a power of two >= 2");
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);

    std::vector<OptimizationResult> ladder;
    BfgsResult r = minimize_angles(diag, linear_dqa_angles(2, 1.0), opts);
    ladder.push_back(detail::make_result(Method::LogInterp, diag, sol,
                                         detail::unpack_angles(r.x), r));
    for (int p = 4; p <= p_max; p *= 2) {
        const AngleSchedule& prev = ladder.back().final_angles;
        AngleSchedule start(p);
        start.theta_x = detail::loginterp_seed_x(prev.theta_x);
        start.theta_z = detail::loginterp_seed_z(prev.theta_z);
        r = minimize_angles(diag, start, opts);
        ladder.push_back(detail::make_result(Method::LogInterp, diag, sol,
                                             detail::unpack_angles(r.x), r));
    }
    return ladder;
}

struct FourierZhouConfig {
    char variant = 'b';     // 'a': Nc = P, no randomness; 'b': Nc = P with
                            // random restarts; 'c': Nc capped at nc_fixed
    int nc_fixed = 0;       // only used by variant 'c'
    int n_random = 10;      // R
    double alpha = 0.6;
    BfgsOptions bfgs;
};

/// FOURIER iteration: grows the depth one layer at a time keeping the star
/// lineage C^(*,P) (zero-padded warm start) and, for the randomized
/// variants, a best lineage C^(B,P) refreshed from R+2 candidates per depth.
inline std::vector<OptimizationResult> run_fourier_zhou(const GraphInstance& inst, int p_max,
                                                        const FourierZhouConfig& cfg,
                                                        std::uint64_t seed) {
    if (p_max < 1) throw std::invalid_argument("run_fourier_zhou: p_max must be >= 1");
    if (cfg.variant != 'a' && cfg.variant != 'b' && cfg.variant != 'c')
        throw std::invalid_argument("run_fourier_zhou: variant must be a, b or c");
    if (cfg.variant == 'c' && cfg.nc_fixed < 1)
        throw std::invalid_argument("run_fourier_zhou: variant c needs nc_fixed >= 1");
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);
    const Method tag = cfg.variant == 'a'   ? Method::FourierA
                       : cfg.variant == 'b' ? Method::FourierB
                                            : Method::FourierC;

    auto nc_at = [&](int p) {
        return (cfg.variant == 'c') ? std::min(p, cfg.nc_fixed) : p;
    };

    std::vector<OptimizationResult> ladder;
    std::vector<std::uint64_t> ledger;
    std::uint64_t stream = 0;

    // P = 1 seed reproducing the linear-dQA angles (0.5, 0.5).
    FourierZhouCoefficients start1;
    start1.p = 1;
    const double inv_sqrt2 = 0.70710678118654752440084436210485;
    start1.cx = {0.5 / inv_sqrt2};
    start1.cz = {0.5 / inv_sqrt2};
    BfgsResult r1 = minimize_fourier(diag, start1, cfg.bfgs);
    FourierZhouCoefficients star = detail::unpack_fourier(r1.x, 1);
    FourierZhouCoefficients best = star;
    BfgsResult best_bfgs = r1;
    {
        OptimizationResult res = detail::make_result(tag, diag, sol, fourier_zhou_angles(star), r1);
        res.fourier_coeffs = star;
        ladder.push_back(std::move(res));
    }

    for (int p = 2; p <= p_max; ++p) {
        const int nc_new = nc_at(p);
        const int nc_old = star.nc();
        auto padded = [&](const FourierZhouCoefficients& c) {
            FourierZhouCoefficients out = c;
            out.p = p;
            out.cx.resize(nc_new, 0.0);
            out.cz.resize(nc_new, 0.0);
            return out;
        };

        if (cfg.variant == 'a') {
            const BfgsResult r = minimize_fourier(diag, padded(star), cfg.bfgs);
            star = detail::unpack_fourier(r.x, p);
            OptimizationResult res = detail::make_result(tag, diag, sol,
                                                         fourier_zhou_angles(star), r);
            res.fourier_coeffs = star;
            ladder.push_back(std::move(res));
            continue;
        }

        // Candidates: R perturbed best-lineage points, the unperturbed
        // best-lineage point (r = 0), and the padded star lineage.
        const int n_candidates = cfg.n_random + 2;
        std::vector<std::uint64_t> seeds(cfg.n_random);
        for (int i = 0; i < cfg.n_random; ++i) seeds[i] = child_seed(seed, stream++);
        ledger.insert(ledger.end(), seeds.begin(), seeds.end());

        std::vector<BfgsResult> results(n_candidates);
        std::vector<FourierZhouCoefficients> finals(n_candidates);
        parallel_for_index(n_candidates, [&](std::size_t idx) {
            FourierZhouCoefficients c;
            if (idx < std::size_t(cfg.n_random)) {
                c = best;
                Rng rng(seeds[idx]);
                // Gaussian perturbation, zero mean, variance (C^(*,P-1)_n)^2.
                for (int n = 0; n < nc_old; ++n)
                    c.cx[n] += cfg.alpha * rng.gaussian() * std::abs(star.cx[n]);
                for (int n = 0; n < nc_old; ++n)
                    c.cz[n] += cfg.alpha * rng.gaussian() * std::abs(star.cz[n]);
                c = padded(c);
            } else if (idx == std::size_t(cfg.n_random)) {
                c = padded(best);
            } else {
                c = padded(star);
            }
            results[idx] = minimize_fourier(diag, c, cfg.bfgs);
            finals[idx] = detail::unpack_fourier(results[idx].x, p);
        });

        star = finals[n_candidates - 1];
        const std::size_t win = detail::select_best(results);
        best = finals[win];
        best_bfgs = results[win];

        OptimizationResult res = detail::make_result(tag, diag, sol,
                                                     fourier_zhou_angles(best), best_bfgs);
        res.fourier_coeffs = best;
        long total = 0;
        for (const auto& r : results) total += r.n_evaluations;
        res.n_evaluations = total;
        res.seed_ledger = ledger;
        ladder.push_back(std::move(res));
    }
    return ladder;
}

}  // namespace qforge
