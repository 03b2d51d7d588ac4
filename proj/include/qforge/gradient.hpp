#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qforge/evolve.hpp"

namespace qforge {

struct EnergyGradient {
    double energy = 0.0;
    std::vector<double> grad_x;  // dE / d theta_x_m, m = 1..P
    std::vector<double> grad_z;  // dE / d theta_z_m
};

/// Reusable buffers for the adjoint sweep; one per optimizer run keeps the
/// hot path allocation-free.
struct AdjointWorkspace {
    std::vector<StateVector> states;
    StateVector lambda;
    std::vector<cx> phase;
};

/// Analytic gradient of the variational energy with respect to all 2P angles
/// via one forward sweep (storing the P+1 intermediate states) and one
/// backward costate sweep: O(P) gate applications in total.
///
/// With |Lambda_m> = U^+_{m+1}..U^+_P H_z |Psi_P>:
///   dE/d theta_x_m = 2 Im <Lambda_m| H_x |Psi_m>
///   dE/d theta_z_m = 2 Im <e^{+i theta_x_m H_x} Lambda_m| H_z |e^{-i theta_z_m H_z} Psi_{m-1}>
inline EnergyGradient energy_and_angle_gradient(const ProblemDiagonal& diag,
                                                const AngleSchedule& s,
                                                AdjointWorkspace* ws = nullptr) {
    validate(s);
    const int p = s.p;
    AdjointWorkspace local;
    AdjointWorkspace& w = ws ? *ws : local;

    w.states.resize(p + 1);
    if (w.states[0].dim() != (std::size_t(1) << diag.n_qubits))
        for (auto& st : w.states) st = StateVector(diag.n_qubits);
    w.states[0] = initial_state(diag.n_qubits);
    for (int m = 0; m < p; ++m) {
        w.states[m + 1] = w.states[m];
        apply_layer(w.states[m + 1], s.theta_x[m], s.theta_z[m], diag);
    }
    const std::vector<StateVector>& psi = w.states;

    EnergyGradient out;
    out.energy = expectation_z(psi[p], diag);
    out.grad_x.assign(p, 0.0);
    out.grad_z.assign(p, 0.0);

    // Costate: Lambda = H_z |Psi_P>, then pulled back through the layers.
    w.lambda = psi[p];
    StateVector& lambda = w.lambda;
    for (std::size_t b = 0; b < lambda.dim(); ++b) lambda.amp[b] *= diag.values[b];

    const std::size_t dim = lambda.dim();
    w.phase.resize(dim);
    cx* phase = w.phase.data();
    for (int m = p; m >= 1; --m) {
        out.grad_x[m - 1] = 2.0 * inner_with_hx(lambda, psi[m]).imag();
        apply_mixer(lambda, -s.theta_x[m - 1]);
        // Shared phase table: phi = e^{-i theta_z H_z} Psi_{m-1}, and the
        // conjugate phases advance the costate one layer back.
        const double tz = s.theta_z[m - 1];
        for (std::size_t b = 0; b < dim; ++b)
            phase[b] = detail::phase_factor(-tz * diag.values[b]);
        const cx* src = psi[m - 1].amp.data();
        cx acc(0.0, 0.0);
        for (std::size_t b = 0; b < dim; ++b) {
            const cx f = phase[b] * src[b];
            acc += std::conj(lambda.amp[b]) * diag.values[b] * f;
        }
        out.grad_z[m - 1] = 2.0 * acc.imag();
        for (std::size_t b = 0; b < dim; ++b) lambda.amp[b] *= std::conj(phase[b]);
    }
    return out;
}

struct CoeffGradient {
    double energy = 0.0;
    Eigen::VectorXd grad;  // layout matches the parameterization's Jacobian columns
};

/// Chain rule through the CRAB parameterization: grad_C = J^T grad_theta,
/// with grad_theta stacked as (theta_x block, theta_z block).
inline CoeffGradient energy_and_coeff_gradient(const ProblemDiagonal& diag,
                                               const CrabCoefficients& c) {
    const AngleSchedule s = crab_angles(c);
    const EnergyGradient g = energy_and_angle_gradient(diag, s);
    Eigen::VectorXd gtheta(2 * c.p);
    for (int m = 0; m < c.p; ++m) {
        gtheta[m] = g.grad_x[m];
        gtheta[c.p + m] = g.grad_z[m];
    }
    CoeffGradient out;
    out.energy = g.energy;
    out.grad = crab_angle_jacobian(c).transpose() * gtheta;
    return out;
}

inline CoeffGradient energy_and_coeff_gradient(const ProblemDiagonal& diag,
                                               const FourierZhouCoefficients& c) {
    const AngleSchedule s = fourier_zhou_angles(c);
    const EnergyGradient g = energy_and_angle_gradient(diag, s);
    Eigen::VectorXd gtheta(2 * c.p);
    for (int m = 0; m < c.p; ++m) {
        gtheta[m] = g.grad_x[m];
        gtheta[c.p + m] = g.grad_z[m];
    }
    CoeffGradient out;
    out.energy = g.energy;
    out.grad = fourier_zhou_jacobian(c).transpose() * gtheta;
    return out;
}

}  // namespace qforge
