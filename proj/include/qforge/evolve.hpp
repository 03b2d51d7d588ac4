#pragma once

#include <vector>

#include "qforge/schedule.hpp"
#include "qforge/statevector.hpp"

namespace qforge {

/// One digitized layer: exp(-i theta_x H_x) exp(-i theta_z H_z).
inline void apply_layer(StateVector& psi, double theta_x, double theta_z,
                        const ProblemDiagonal& diag) {
    apply_phase(psi, theta_z, diag);
    apply_mixer(psi, theta_x);
}

/// Digitized evolution of the uniform initial state through all P layers.
inline StateVector evolve_digitized(const ProblemDiagonal& diag, const AngleSchedule& s) {
    validate(s);
    StateVector psi = initial_state(diag.n_qubits);
    for (int m = 0; m < s.p; ++m) apply_layer(psi, s.theta_x[m], s.theta_z[m], diag);
    return psi;
}

inline StateVector evolve_digitized(const GraphInstance& g, const AngleSchedule& s) {
    return evolve_digitized(problem_diagonal(g), s);
}

/// Same evolution, returning all intermediate states |Psi_0> .. |Psi_P>.
inline std::vector<StateVector> evolve_digitized_recorded(const ProblemDiagonal& diag,
                                                          const AngleSchedule& s) {
    validate(s);
    std::vector<StateVector> states;
    states.reserve(s.p + 1);
    states.push_back(initial_state(diag.n_qubits));
    for (int m = 0; m < s.p; ++m) {
        StateVector psi = states.back();
        apply_layer(psi, s.theta_x[m], s.theta_z[m], diag);
        states.push_back(std::move(psi));
    }
    return states;
}

/// Variational energy <Psi_P| H_z |Psi_P> of a schedule.
inline double schedule_energy(const ProblemDiagonal& diag, const AngleSchedule& s) {
    const StateVector psi = evolve_digitized(diag, s);
    return expectation_z(psi, diag);
}

}  // namespace qforge
