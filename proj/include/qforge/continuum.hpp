#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qforge/lanczos.hpp"
#include "qforge/parity.hpp"
#include "qforge/schedule.hpp"
#include "qforge/spectral.hpp"

namespace qforge {

/// Piecewise-linear continuous-time controls derived from a digitized
/// schedule. Knot m sits at t_m = (m - 1/2) tau / P with the angle values as
/// field strengths, constant extension outside [t_1, t_P], and total
/// annealing time tau = sum_m (theta_x_m + theta_z_m). The generator is
/// H(t) = (P / tau) [theta_x(t) H_x + theta_z(t) H_z]; the P/tau rate makes
/// each layer-wide slice integrate to exactly the digitized angles, and the
/// annealing fraction is s(t) = theta_z(t) / (theta_x(t) + theta_z(t)).
struct ContinuumControls {
    double tau = 0.0;
    int p = 0;
    std::vector<double> t_knots;
    std::vector<double> theta_x_knots;
    std::vector<double> theta_z_knots;

    double eval(const std::vector<double>& knots, double t) const {
        if (t <= t_knots.front()) return knots.front();
        if (t >= t_knots.back()) return knots.back();
        const auto it = std::upper_bound(t_knots.begin(), t_knots.end(), t);
        const std::size_t hi = it - t_knots.begin();
        const double w = (t - t_knots[hi - 1]) / (t_knots[hi] - t_knots[hi - 1]);
        return (1.0 - w) * knots[hi - 1] + w * knots[hi];
    }
    double theta_x_at(double t) const { return eval(theta_x_knots, t); }
    double theta_z_at(double t) const { return eval(theta_z_knots, t); }
    double s_at(double t) const {
        const double tx = theta_x_at(t), tz = theta_z_at(t);
        const double sum = tx + tz;
        if (sum <= 0.0) throw std::runtime_error("ContinuumControls: theta_x + theta_z <= 0");
        return tz / sum;
    }
    double rate() const { return p / tau; }
};

inline ContinuumControls interpolate_controls(const AngleSchedule& s) {
    validate(s);
    if (s.p < 2) throw std::invalid_argument("interpolate_controls: need P >= 2");
    ContinuumControls c;
    c.p = s.p;
    for (int m = 0; m < s.p; ++m) c.tau += s.theta_x[m] + s.theta_z[m];
    if (!(c.tau > 0.0))
        throw std::invalid_argument("interpolate_controls: schedule has no duration");
    c.t_knots.resize(s.p);
    for (int m = 1; m <= s.p; ++m) c.t_knots[m - 1] = (m - 0.5) * c.tau / s.p;
    c.theta_x_knots = s.theta_x;
    c.theta_z_knots = s.theta_z;
    // Piecewise-linear interpolation of positive knot sums stays positive,
    // so checking the knots covers the whole interval.
    for (int m = 0; m < s.p; ++m)
        if (s.theta_x[m] + s.theta_z[m] <= 0.0)
            throw std::invalid_argument("interpolate_controls: degenerate schedule, s(t) undefined");
    return c;
}

/// Apply exp(-i (a_x H_x + a_z H_z)) to the state via scaling-and-squaring
/// with a truncated Taylor series: the generator is halved until its norm
/// bound is <= 1, the series is cut when the next term falls below 1e-14 of
/// the running sum, and the sub-propagator is applied 2^squarings times.
inline void apply_expm_step(StateVector& psi, double a_x, double a_z,
                            const ProblemDiagonal& diag, int max_terms = 64) {
    double dmax = 0.0;
    for (const double v : diag.values) dmax = std::max(dmax, std::abs(v));
    const double anorm = std::abs(a_x) * psi.n_qubits + std::abs(a_z) * dmax;
    int squarings = 0;
    while (anorm / double(1ULL << squarings) > 1.0 && squarings < 40) ++squarings;
    const double scale = 1.0 / double(1ULL << squarings);
    const double bx = a_x * scale, bz = a_z * scale;

    StateVector term(psi.n_qubits), tmp(psi.n_qubits);
    const std::size_t dim = psi.dim();
    for (int rep = 0; rep < (1 << squarings); ++rep) {
        term = psi;
        double psi_norm2 = norm_squared(psi);
        bool done = false;
        for (int k = 1; k <= max_terms; ++k) {
            // term <- (-i/k) (bx H_x + bz H_z) term
            apply_hx(term, tmp);
            for (std::size_t b = 0; b < dim; ++b) {
                const cx v = bx * tmp.amp[b] + bz * diag.values[b] * term.amp[b];
                term.amp[b] = cx(v.imag(), -v.real()) / double(k);
            }
            double t2 = 0.0;
            for (std::size_t b = 0; b < dim; ++b) {
                psi.amp[b] += term.amp[b];
                t2 += std::norm(term.amp[b]);
            }
            if (t2 < 1e-28 * psi_norm2) {
                done = true;
                break;
            }
        }
        if (!done) throw std::runtime_error("apply_expm_step: Taylor series did not converge");
    }
}

struct ContinuumOptions {
    double dt_c = 0.1;
    int k_levels = 2;        // instantaneous levels tracked (0 disables sampling)
    double sample_every = 0.5;  // physical-time stride between population samples
    EigsOptions eigs;
};

struct ContinuumResult {
    StateVector final_state;
    PopulationTrace trace;              // populations vs time
    std::vector<double> energies;       // <H_z> at the sample times
    std::vector<double> norm_defects;   // | ||psi|| - 1 | at the sample times
    double final_energy = 0.0;
};

/// Trotter-free Schrodinger integration of the interpolated controls with
/// midpoint Hamiltonian sampling per step (second order in dt_c).
/// Populations are scored against the instantaneous annealing Hamiltonian
/// (1 - s(t)) H_x + s(t) H_z in the even sector.
inline ContinuumResult integrate_schrodinger(const GraphInstance& inst,
                                             const ContinuumControls& controls,
                                             const ContinuumOptions& opts = {}) {
    if (opts.dt_c <= 0.0) throw std::invalid_argument("integrate_schrodinger: dt_c must be > 0");
    const ProblemDiagonal diag = problem_diagonal(inst);
    const std::vector<double> ediag = even_diagonal(diag);
    const EvenSector sec(inst.n_vertices);

    ContinuumResult out;
    out.final_state = initial_state(inst.n_vertices);
    StateVector& psi = out.final_state;

    std::vector<Eigen::VectorXd> warm;
    std::vector<double> sample_gaps;
    double next_sample = 0.0;
    auto sample = [&](double t) {
        if (opts.k_levels < 1) return;
        const double s = controls.s_at(t);
        AnnealingEvenOp op(sec, ediag, s);
        auto apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& vout) { op(in, vout); };
        EigsOptions eo = opts.eigs;
        eo.k = std::max(opts.k_levels, 2);
        auto eig = lowest_eigenpairs<double>(sec.dim(), apply, eo,
                                             warm.empty() ? nullptr : &warm);
        warm = eig.vectors;
        const Eigen::VectorXcd u = even_project(psi);
        std::vector<double> q(opts.k_levels, 0.0);
        double tracked = 0.0;
        for (int j = 0; j < opts.k_levels; ++j) {
            q[j] = std::norm(eig.vectors[j].cast<std::complex<double>>().dot(u));
            tracked += q[j];
        }
        out.trace.m_grid.push_back(t);
        out.trace.populations.push_back(std::move(q));
        out.trace.residual_tail.push_back(1.0 - tracked);
        out.energies.push_back(expectation_z(psi, diag));
        out.norm_defects.push_back(std::abs(norm(psi) - 1.0));
        sample_gaps.push_back(eig.values[1] - eig.values[0]);
    };

    sample(0.0);
    next_sample = opts.sample_every;

    const double rate = controls.rate();
    double t = 0.0;
    while (t < controls.tau - 1e-12) {
        const double dt = std::min(opts.dt_c, controls.tau - t);
        const double tm = t + 0.5 * dt;
        const double ax = rate * dt * controls.theta_x_at(tm);
        const double az = rate * dt * controls.theta_z_at(tm);
        try {
            apply_expm_step(psi, ax, az, diag);
        } catch (const std::runtime_error&) {
            // One level of step bisection before giving up.
            const double tq = t + 0.25 * dt;
            const double t3q = t + 0.75 * dt;
            apply_expm_step(psi, 0.5 * rate * dt * controls.theta_x_at(tq),
                            0.5 * rate * dt * controls.theta_z_at(tq), diag);
            apply_expm_step(psi, 0.5 * rate * dt * controls.theta_x_at(t3q),
                            0.5 * rate * dt * controls.theta_z_at(t3q), diag);
        }
        t += dt;
        if (opts.k_levels >= 1 && (t >= next_sample - 1e-12 || t >= controls.tau - 1e-12)) {
            sample(std::min(t, controls.tau));
            next_sample += opts.sample_every;
        }
    }
    out.final_energy = expectation_z(psi, diag);
    if (!sample_gaps.empty()) {
        std::size_t i_min = 0;
        for (std::size_t i = 1; i < sample_gaps.size(); ++i)
            if (sample_gaps[i] < sample_gaps[i_min]) i_min = i;
        out.trace.min_gap_marker = out.trace.m_grid[i_min];
        out.trace.min_gap_value = sample_gaps[i_min];
    }
    return out;
}

/// Residual energy of the continuum evolution.
inline double continuum_residual(const GraphInstance& inst, const ContinuumControls& controls,
                                 double dt_c = 0.1) {
    ContinuumOptions opts;
    opts.dt_c = dt_c;
    opts.k_levels = 0;
    const ContinuumResult r = integrate_schrodinger(inst, controls, opts);
    return residual_energy(r.final_energy, exact_extrema(inst));
}

inline nlohmann::json to_json(const ContinuumControls& c) {
    nlohmann::json knots = nlohmann::json::array();
    for (std::size_t m = 0; m < c.t_knots.size(); ++m)
        knots.push_back({c.t_knots[m], c.theta_x_knots[m], c.theta_z_knots[m]});
    return {{"tau", c.tau}, {"p", c.p}, {"knots", knots}};
}

}  // namespace qforge
