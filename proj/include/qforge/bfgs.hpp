#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qforge {

/// Objective callback: fills `grad` and returns the value at `x`.
using ObjectiveWithGradient =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BfgsOptions {
    double gtol = 1e-8;    // stop when ||grad||_2 <= gtol
    double ftol = 1e-12;   // stop when relative energy change <= ftol
    int max_iter = 1000;
    int max_line_search = 50;
    double c1 = 1e-4;      // Armijo
    double c2 = 0.9;       // Wolfe curvature
    double step_max = 1e3;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd grad;
    double grad_norm = 0.0;
    long n_evaluations = 0;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
    std::vector<std::pair<int, double>> trace;  // (iteration, f) at accepted iterates
};

namespace detail {

struct LinePoint {
    double a = 0.0, f = 0.0, df = 0.0;
};

}  // namespace detail

/// Dense quasi-Newton BFGS with a strong-Wolfe line search. Always returns
/// the best point seen across all evaluations; a failed line search sets
/// `line_search_failed` instead of aborting.
inline BfgsResult bfgs_minimize(const ObjectiveWithGradient& fg, Eigen::VectorXd x0,
                                const BfgsOptions& opts = {}) {
    const auto n = x0.size();
    BfgsResult res;
    long n_eval = 0;

    Eigen::VectorXd g(n), g_trial(n);
    auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
        ++n_eval;
        return fg(x, grad);
    };

    Eigen::VectorXd x = std::move(x0);
    double f = eval(x, g);

    Eigen::VectorXd best_x = x, best_g = g;
    double best_f = f;
    auto consider_best = [&](const Eigen::VectorXd& xx, double ff, const Eigen::VectorXd& gg) {
        if (std::isfinite(ff) && ff < best_f) {
            best_f = ff;
            best_x = xx;
            best_g = gg;
        }
    };

    res.trace.emplace_back(0, f);
    if (g.norm() <= opts.gtol) {
        res.converged = true;
        res.x = x;
        res.f = f;
        res.grad = g;
        res.grad_norm = g.norm();
        res.n_evaluations = n_eval;
        return res;
    }

    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd x_trial(n);

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        res.iterations = iter;
        Eigen::VectorXd dir = -(h_inv * g);
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            h_inv.setIdentity();
            dir = -g;
            slope = g.dot(dir);
        }

        // Strong Wolfe line search (bracket, then bisection zoom).
        const double f0 = f;
        const double df0 = slope;
        detail::LinePoint lo{0.0, f0, df0};
        detail::LinePoint cur{};
        double a = 1.0;
        double a_prev = 0.0, f_prev = f0, df_prev = df0;
        bool found = false;
        bool bracketed = false;
        detail::LinePoint blo, bhi;
        int ls_evals = 0;

        auto probe = [&](double step) {
            x_trial = x + step * dir;
            const double ft = eval(x_trial, g_trial);
            ++ls_evals;
            consider_best(x_trial, ft, g_trial);
            return detail::LinePoint{step, ft, g_trial.dot(dir)};
        };

        while (ls_evals < opts.max_line_search) {
            cur = probe(a);
            if (!std::isfinite(cur.f) || cur.f > f0 + opts.c1 * a * df0 ||
                (ls_evals > 1 && cur.f >= f_prev)) {
                blo = {a_prev, f_prev, df_prev};
                bhi = cur;
                bracketed = true;
                break;
            }
            if (std::abs(cur.df) <= -opts.c2 * df0) {
                found = true;
                break;
            }
            if (cur.df >= 0.0) {
                blo = cur;
                bhi = {a_prev, f_prev, df_prev};
                bracketed = true;
                break;
            }
            a_prev = a;
            f_prev = cur.f;
            df_prev = cur.df;
            a = std::min(2.0 * a, opts.step_max);
            if (a >= opts.step_max && a_prev >= opts.step_max) break;
        }
        if (bracketed && !found) {
            while (ls_evals < opts.max_line_search) {
                const double am = 0.5 * (blo.a + bhi.a);
                cur = probe(am);
                if (!std::isfinite(cur.f) || cur.f > f0 + opts.c1 * am * df0 || cur.f >= blo.f) {
                    bhi = cur;
                } else {
                    if (std::abs(cur.df) <= -opts.c2 * df0) {
                        found = true;
                        break;
                    }
                    if (cur.df * (bhi.a - blo.a) >= 0.0) bhi = blo;
                    blo = cur;
                }
                if (std::abs(bhi.a - blo.a) < 1e-14 * std::max(1.0, std::abs(blo.a))) break;
            }
            // Fall back on the sufficient-decrease endpoint when the
            // curvature condition is out of reach in the budget.
            if (!found && blo.a > 0.0 && blo.f < f0 + opts.c1 * blo.a * df0) {
                cur = probe(blo.a);
                found = std::isfinite(cur.f) && cur.f <= blo.f + 1e-15;
            }
        }

        if (!found) {
            res.line_search_failed = true;
            break;
        }

        x_trial = x + cur.a * dir;
        const Eigen::VectorXd s = cur.a * dir;
        const Eigen::VectorXd y = g_trial - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::VectorXd hy = h_inv * y;
            // Sherman-Morrison form of the inverse-Hessian update.
            h_inv.noalias() -= rho * (hy * s.transpose() + s * hy.transpose());
            h_inv.noalias() += (rho * rho * (y.dot(hy)) + rho) * (s * s.transpose());
        }
        x = x_trial;
        const double f_old = f;
        f = cur.f;
        g = g_trial;
        res.trace.emplace_back(iter, f);

        if (g.norm() <= opts.gtol) {
            res.converged = true;
            break;
        }
        if (std::abs(f_old - f) <= opts.ftol * std::max(1.0, std::abs(f_old))) {
            res.converged = true;
            break;
        }
    }

    consider_best(x, f, g);
    res.x = best_x;
    res.f = best_f;
    res.grad = best_g;
    res.grad_norm = best_g.norm();
    res.n_evaluations = n_eval;
    return res;
}

}  // namespace qforge
