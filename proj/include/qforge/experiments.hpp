#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qforge/continuum.hpp"
#include "qforge/drivers.hpp"
#include "qforge/io.hpp"
#include "qforge/spectral.hpp"

namespace qforge {

/// Total quadratic variation sum_m (theta_{m+1} - theta_m)^2 of one angle
/// family; the quantitative proxy used for "smoothness" of a solution.
inline double quadratic_variation(const std::vector<double>& theta) {
    double q = 0.0;
    for (std::size_t m = 1; m < theta.size(); ++m) {
        const double d = theta[m] - theta[m - 1];
        q += d * d;
    }
    return q;
}

inline double schedule_roughness(const AngleSchedule& s) {
    return quadratic_variation(s.theta_x) + quadratic_variation(s.theta_z);
}

/// Spearman rank correlation with average ranks on ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: need two equally sized samples");
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * (i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= ra.size();
    mb /= rb.size();
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(va * vb);
}

struct MethodRunConfig {
    int n_r = 10;
    int nc_step = 10;
    BfgsOptions bfgs;
    FourierZhouConfig fourier;
};

/// Run one method on one instance at the requested depths. CRAB methods use
/// Nc = P/2 (at least 1); the ladder methods run once up to max(p_list) and
/// report the visited depths.
inline std::map<int, OptimizationResult> run_method_at_depths(
    const GraphInstance& inst, Method method, const std::vector<int>& p_list,
    std::uint64_t seed, const MethodRunConfig& cfg = {}) {
    std::map<int, OptimizationResult> out;
    const int p_max = *std::max_element(p_list.begin(), p_list.end());
    switch (method) {
        case Method::Lin:
            for (const int p : p_list) out[p] = run_lin(inst, p, cfg.bfgs);
            break;
        case Method::FCrab:
            for (const int p : p_list)
                out[p] = run_fcrab_iterative(inst, p, std::max(1, p / 2), cfg.nc_step, cfg.n_r,
                                             child_seed(seed, p), cfg.bfgs);
            break;
        case Method::CCrab:
            for (const int p : p_list)
                out[p] = run_ccrab_direct(inst, p, std::max(1, p / 2), cfg.n_r,
                                          child_seed(seed, p), cfg.bfgs);
            break;
        case Method::Interp: {
            const auto ladder = run_interp(inst, p_max, cfg.bfgs);
            for (const auto& r : ladder)
                if (std::find(p_list.begin(), p_list.end(), r.final_angles.p) != p_list.end())
                    out[r.final_angles.p] = r;
            break;
        }
        case Method::LogInterp: {
            const auto ladder = run_loginterp(inst, p_max, cfg.bfgs);
            for (const auto& r : ladder)
                if (std::find(p_list.begin(), p_list.end(), r.final_angles.p) != p_list.end())
                    out[r.final_angles.p] = r;
            break;
        }
        case Method::FourierA:
        case Method::FourierB:
        case Method::FourierC: {
            FourierZhouConfig fc = cfg.fourier;
            fc.variant = method == Method::FourierA ? 'a' : method == Method::FourierB ? 'b' : 'c';
            fc.bfgs = cfg.bfgs;
            const auto ladder = run_fourier_zhou(inst, p_max, fc, seed);
            for (const auto& r : ladder)
                if (std::find(p_list.begin(), p_list.end(), r.final_angles.p) != p_list.end())
                    out[r.final_angles.p] = r;
            break;
        }
    }
    return out;
}

struct ComparisonRow {
    std::string method;
    int p = 0;
    double eps_res = 0.0;
    double infidelity = 0.0;
};

struct MethodComparison {
    std::string instance_label;
    std::vector<ComparisonRow> rows;
    std::map<std::string, std::map<int, OptimizationResult>> results;
    double spearman_eps_vs_infidelity = 0.0;
};

/// Residual energy and infidelity of every (method, P) pair on one instance,
/// both figures computed from the same final state.
inline MethodComparison compare_methods(const GraphInstance& inst,
                                        const std::vector<int>& p_list,
                                        const std::vector<Method>& methods, std::uint64_t seed,
                                        const MethodRunConfig& cfg = {}) {
    MethodComparison cmp;
    cmp.instance_label = inst.label;
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const Method method = methods[mi];
        auto per_p = run_method_at_depths(inst, method, p_list, child_seed(seed, 7919 + mi), cfg);
        for (const auto& [p, res] : per_p) {
            const StateVector psi = evolve_digitized(diag, res.final_angles);
            ComparisonRow row;
            row.method = method_name(method);
            row.p = p;
            row.eps_res = residual_energy(expectation_z(psi, diag), sol);
            row.infidelity = 1.0 - fidelity(psi, sol);
            cmp.rows.push_back(row);
        }
        cmp.results[method_name(method)] = std::move(per_p);
    }
    std::vector<double> eps, inf;
    for (const auto& r : cmp.rows) {
        eps.push_back(r.eps_res);
        inf.push_back(r.infidelity);
    }
    cmp.spearman_eps_vs_infidelity = spearman(eps, inf);
    return cmp;
}

inline std::string comparison_csv(const MethodComparison& cmp) {
    CsvWriter csv("method,p,eps_res,infidelity");
    for (const auto& r : cmp.rows) csv.row(r.method, r.p, r.eps_res, r.infidelity);
    return csv.str();
}

struct TransferRow {
    std::string target_label;
    double eps_native = 0.0;
    double eps_trans = 0.0;
    double eps_lo = 0.0;
};

struct TransferReport {
    std::string source_label;
    std::string method;
    int p = 0;
    std::vector<TransferRow> rows;
    double d_eps_trans = 0.0;  // mean(eps_trans - eps_native)
    double d_eps_lo = 0.0;     // mean(eps_lo - eps_native)
    double sem_trans = 0.0;    // standard error of the mean, n-1 denominator
    double sem_lo = 0.0;
};

/// Evaluate one instance's optimal schedule on other instances, bare
/// (eps_trans) and as a warm start for local optimization (eps_lo), against
/// each target's natively optimized residual.
inline TransferReport run_transferability(
    const OptimizationResult& source, const std::string& source_label,
    const std::vector<GraphInstance>& targets,
    const std::function<OptimizationResult(const GraphInstance&)>& native_runner,
    const BfgsOptions& lo_opts = {}) {
    TransferReport report;
    report.source_label = source_label;
    report.method = method_name(source.method);
    report.p = source.final_angles.p;

    std::vector<TransferRow> rows(targets.size());
    parallel_for_index(targets.size(), [&](std::size_t i) {
        const GraphInstance& target = targets[i];
        const ProblemDiagonal diag = problem_diagonal(target);
        const ExactSolution sol = exact_extrema(target);
        TransferRow row;
        row.target_label = target.label;
        row.eps_native = native_runner(target).residual;
        row.eps_trans = residual_energy(schedule_energy(diag, source.final_angles), sol);
        row.eps_lo = refine_angles(target, source.final_angles, lo_opts, source.method).residual;
        rows[i] = std::move(row);
    });
    report.rows = std::move(rows);

    const double n = static_cast<double>(report.rows.size());
    for (const auto& r : report.rows) {
        report.d_eps_trans += (r.eps_trans - r.eps_native) / n;
        report.d_eps_lo += (r.eps_lo - r.eps_native) / n;
    }
    if (report.rows.size() > 1) {
        double vt = 0.0, vl = 0.0;
        for (const auto& r : report.rows) {
            vt += std::pow(r.eps_trans - r.eps_native - report.d_eps_trans, 2);
            vl += std::pow(r.eps_lo - r.eps_native - report.d_eps_lo, 2);
        }
        report.sem_trans = std::sqrt(vt / (n - 1.0) / n);
        report.sem_lo = std::sqrt(vl / (n - 1.0) / n);
    }
    return report;
}

inline std::string transfer_csv(const std::vector<TransferReport>& reports) {
    CsvWriter csv("method,p,target,eps_native,eps_trans,eps_lo");
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            csv.row(rep.method, rep.p, r.target_label, r.eps_native, r.eps_trans, r.eps_lo);
    return csv.str();
}

struct HessianReport {
    std::string method;
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    double max_asymmetry = 0.0;  // max |H_ij - H_ji| before symmetrization
    std::vector<double> mu_grid, eps_mu;  // scan along the max-curvature direction
    std::vector<double> nu_grid, eps_nu;  // scan along the min-curvature direction
};

struct ConvexPathScan {
    std::string method_a, method_b;
    std::vector<double> lambda_grid, eps_path;
};

/// Central finite differences of the analytic angle gradient: column j of
/// the Hessian is (g(x + h e_j) - g(x - h e_j)) / 2h.
inline Eigen::MatrixXd angle_hessian(const ProblemDiagonal& diag, const AngleSchedule& at,
                                     double fd_step = 1e-4, double* max_asym = nullptr) {
    const Eigen::VectorXd x0 = detail::pack_angles(at);
    const int dim = static_cast<int>(x0.size());
    Eigen::MatrixXd h(dim, dim);
    std::vector<Eigen::VectorXd> cols(dim);
    parallel_for_index(dim, [&](std::size_t j) {
        Eigen::VectorXd xp = x0, xm = x0;
        xp[j] += fd_step;
        xm[j] -= fd_step;
        const EnergyGradient gp = energy_and_angle_gradient(diag, detail::unpack_angles(xp));
        const EnergyGradient gm = energy_and_angle_gradient(diag, detail::unpack_angles(xm));
        Eigen::VectorXd col(dim);
        const int p = dim / 2;
        for (int m = 0; m < p; ++m) {
            col[m] = (gp.grad_x[m] - gm.grad_x[m]) / (2.0 * fd_step);
            col[p + m] = (gp.grad_z[m] - gm.grad_z[m]) / (2.0 * fd_step);
        }
        cols[j] = std::move(col);
    });
    for (int j = 0; j < dim; ++j) h.col(j) = cols[j];
    if (max_asym) *max_asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    return 0.5 * (h + h.transpose());
}

struct HessianAnalysis {
    std::vector<HessianReport> reports;
    std::vector<ConvexPathScan> paths;
};

/// Landscape analysis around >= 2 optimized solutions: extreme-curvature
/// directions of the finite-difference Hessian, 1-D residual scans along
/// them, and residual profiles along the pairwise convex combinations.
inline HessianAnalysis run_hessian_analysis(const GraphInstance& inst,
                                            const std::vector<OptimizationResult>& results,
                                            double fd_step = 1e-4, double scan_half_width = 0.5,
                                            int scan_points = 41, int path_points = 51) {
    if (results.size() < 2)
        throw std::invalid_argument("run_hessian_analysis: need at least two minima");
    const ProblemDiagonal diag = problem_diagonal(inst);
    const ExactSolution sol = exact_extrema(inst);
    auto eps_at = [&](const Eigen::VectorXd& x) {
        return residual_energy(schedule_energy(diag, detail::unpack_angles(x)), sol);
    };

    HessianAnalysis out;
    for (const auto& res : results) {
        HessianReport rep;
        rep.method = method_name(res.method);
        const Eigen::MatrixXd h = angle_hessian(diag, res.final_angles, fd_step,
                                                &rep.max_asymmetry);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        const int dim = static_cast<int>(h.rows());
        rep.lambda_min = es.eigenvalues()[0];
        rep.lambda_max = es.eigenvalues()[dim - 1];
        const Eigen::VectorXd v_min = es.eigenvectors().col(0);
        const Eigen::VectorXd v_max = es.eigenvectors().col(dim - 1);
        const Eigen::VectorXd x0 = detail::pack_angles(res.final_angles);
        for (int i = 0; i < scan_points; ++i) {
            const double u = -scan_half_width + 2.0 * scan_half_width * i / (scan_points - 1);
            rep.mu_grid.push_back(u);
            rep.eps_mu.push_back(eps_at(x0 + u * v_max));
            rep.nu_grid.push_back(u);
            rep.eps_nu.push_back(eps_at(x0 + u * v_min));
        }
        out.reports.push_back(std::move(rep));
    }
    for (std::size_t a = 0; a < results.size(); ++a)
        for (std::size_t b = a + 1; b < results.size(); ++b) {
            ConvexPathScan path;
            path.method_a = method_name(results[a].method);
            path.method_b = method_name(results[b].method);
            const Eigen::VectorXd xa = detail::pack_angles(results[a].final_angles);
            const Eigen::VectorXd xb = detail::pack_angles(results[b].final_angles);
            for (int i = 0; i < path_points; ++i) {
                const double lam = static_cast<double>(i) / (path_points - 1);
                path.lambda_grid.push_back(lam);
                path.eps_path.push_back(eps_at(lam * xa + (1.0 - lam) * xb));
            }
            out.paths.push_back(std::move(path));
        }
    return out;
}

struct SmoothVsIrregularReport {
    OptimizationResult smooth;     // iterative F-CRAB, Nc = P/2
    OptimizationResult irregular;  // direct F-CRAB, Nc = P, no warm start
    double smooth_roughness = 0.0;
    double irregular_roughness = 0.0;
    double smooth_digital_eps = 0.0;
    double irregular_digital_eps = 0.0;
    double smooth_continuum_eps = 0.0;
    double irregular_continuum_eps = 0.0;
    PopulationTrace smooth_digital_trace;
    PopulationTrace irregular_digital_trace;
    PopulationTrace smooth_continuum_trace;
    PopulationTrace irregular_continuum_trace;
};

/// The digital-vs-continuum transfer study: a smooth (iterative, Nc = P/2)
/// and an irregular (direct, Nc = P) F-CRAB solution, their digital and
/// continuum residuals, and the population traces in both frameworks.
inline SmoothVsIrregularReport run_smooth_vs_irregular(const GraphInstance& inst, int p,
                                                       int n_r, std::uint64_t seed,
                                                       double dt_c = 0.1,
                                                       const BfgsOptions& opts = {},
                                                       bool with_traces = true, int k = 3) {
    SmoothVsIrregularReport rep;
    rep.smooth = run_fcrab_iterative(inst, p, std::max(1, p / 2), 10, n_r,
                                     child_seed(seed, 1), opts);
    rep.irregular = run_ccrab_direct(inst, p, p, n_r, child_seed(seed, 2), opts,
                                     CrabBasis::FourierSine, Method::FCrab);
    rep.smooth_roughness = schedule_roughness(rep.smooth.final_angles);
    rep.irregular_roughness = schedule_roughness(rep.irregular.final_angles);
    rep.smooth_digital_eps = rep.smooth.residual;
    rep.irregular_digital_eps = rep.irregular.residual;

    const ContinuumControls smooth_ctl = interpolate_controls(rep.smooth.final_angles);
    const ContinuumControls irr_ctl = interpolate_controls(rep.irregular.final_angles);
    ContinuumOptions copts;
    copts.dt_c = dt_c;
    copts.k_levels = with_traces ? k : 0;
    const ContinuumResult smooth_run = integrate_schrodinger(inst, smooth_ctl, copts);
    const ContinuumResult irr_run = integrate_schrodinger(inst, irr_ctl, copts);
    const ExactSolution sol = exact_extrema(inst);
    rep.smooth_continuum_eps = residual_energy(smooth_run.final_energy, sol);
    rep.irregular_continuum_eps = residual_energy(irr_run.final_energy, sol);
    if (with_traces) {
        rep.smooth_continuum_trace = smooth_run.trace;
        rep.irregular_continuum_trace = irr_run.trace;
        rep.smooth_digital_trace = digital_population_trace(inst, rep.smooth.final_angles, k);
        rep.irregular_digital_trace = digital_population_trace(inst, rep.irregular.final_angles, k);
    }
    return rep;
}

inline std::string population_csv(const PopulationTrace& trace) {
    CsvWriter csv("m,p0,p1,p2,tail");
    for (std::size_t i = 0; i < trace.m_grid.size(); ++i) {
        const auto& q = trace.populations[i];
        csv.row(trace.m_grid[i], q.size() > 0 ? q[0] : 0.0, q.size() > 1 ? q[1] : 0.0,
                q.size() > 2 ? q[2] : 0.0, trace.residual_tail[i]);
    }
    return csv.str();
}

inline std::string continuum_trace_csv(const PopulationTrace& trace,
                                       const std::vector<double>& energies,
                                       const std::vector<double>& norm_defects) {
    CsvWriter csv("t,p0,p1,energy,norm_defect");
    for (std::size_t i = 0; i < trace.m_grid.size(); ++i) {
        const auto& q = trace.populations[i];
        csv.row(trace.m_grid[i], q.size() > 0 ? q[0] : 0.0, q.size() > 1 ? q[1] : 0.0,
                energies[i], norm_defects[i]);
    }
    return csv.str();
}

inline std::string gap_cdf_csv(const std::vector<double>& gaps) {
    std::vector<double> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());
    CsvWriter csv("gap,fraction");
    for (std::size_t i = 0; i < sorted.size(); ++i)
        csv.row(sorted[i], static_cast<double>(i + 1) / sorted.size());
    return csv.str();
}

inline nlohmann::json to_json(const OptimizationResult& r) {
    nlohmann::json j{{"method", method_name(r.method)},
                     {"energy", r.energy},
                     {"residual", r.residual},
                     {"grad_norm", r.grad_norm},
                     {"n_evaluations", r.n_evaluations},
                     {"degraded", r.degraded},
                     {"schedule", to_json(r.final_angles)},
                     {"seed_ledger", r.seed_ledger}};
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& [it, e] : r.trace) trace.push_back({it, e});
    j["trace"] = trace;
    if (r.crab_coeffs) j["coeffs"] = to_json(*r.crab_coeffs);
    if (r.fourier_coeffs) j["coeffs"] = to_json(*r.fourier_coeffs);
    return j;
}

}  // namespace qforge
