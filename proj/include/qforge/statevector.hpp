#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "qforge/graph.hpp"

namespace qforge {

using cx = std::complex<double>;

/// Dense state vector over n qubits. Basis index b is the bitstring read as
/// an integer with qubit 0 as the least significant bit.
struct StateVector {
    int n_qubits = 0;
    std::vector<cx> amp;

    StateVector() = default;
    explicit StateVector(int n) : n_qubits(n), amp(std::size_t(1) << n, cx(0.0, 0.0)) {
        if (n < 1 || n > kMaxQubits)
            throw std::invalid_argument("StateVector: qubit count out of range");
    }
    std::size_t dim() const { return amp.size(); }
};

/// Diagonal of the problem Hamiltonian: values[b] = classical_energy(g, b).
struct ProblemDiagonal {
    int n_qubits = 0;
    std::vector<double> values;
    std::size_t dim() const { return values.size(); }
};

inline ProblemDiagonal problem_diagonal(const GraphInstance& g) {
    if (g.n_vertices > kMaxQubits)
        throw std::invalid_argument("problem_diagonal: instance too large");
    ProblemDiagonal d;
    d.n_qubits = g.n_vertices;
    d.values.resize(std::size_t(1) << g.n_vertices);
    // Incremental update over a Gray-code walk would be faster; the direct
    // scan is O(2^n * edges) and is built once per instance.
    for (std::size_t b = 0; b < d.values.size(); ++b)
        d.values[b] = classical_energy(g, static_cast<std::uint64_t>(b));
    return d;
}

/// Uniform superposition, the ground state of H_x = -sum_j sigma^x_j.
inline StateVector initial_state(int n) {
    StateVector psi(n);
    const double a = std::pow(2.0, -0.5 * n);
    for (auto& v : psi.amp) v = cx(a, 0.0);
    return psi;
}

namespace detail {
inline cx phase_factor(double ph) {
#if defined(__GNUC__) && defined(__linux__)
    double s, c;
    ::sincos(ph, &s, &c);
    return {c, s};
#else
    return {std::cos(ph), std::sin(ph)};
#endif
}
}  // namespace detail

/// amp_b <- exp(-i * theta_z * diag_b) * amp_b.
inline void apply_phase(StateVector& psi, double theta_z, const ProblemDiagonal& diag) {
    if (diag.dim() != psi.dim())
        throw std::invalid_argument("apply_phase: dimension mismatch");
    cx* a = psi.amp.data();
    const double* d = diag.values.data();
    const std::size_t dim = psi.dim();
    for (std::size_t b = 0; b < dim; ++b) a[b] *= detail::phase_factor(-theta_z * d[b]);
}

/// exp(-i * theta_x * H_x) with H_x = -sum_j sigma^x_j, i.e. per qubit
/// (a, b) -> (cos*a + i sin*b, i sin*a + cos*b). No global-phase stripping.
inline void apply_mixer(StateVector& psi, double theta_x) {
    const double c = std::cos(theta_x);
    const cx is(0.0, std::sin(theta_x));
    cx* a = psi.amp.data();
    const std::size_t dim = psi.dim();
    for (int q = 0; q < psi.n_qubits; ++q) {
        const std::size_t stride = std::size_t(1) << q;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off;
                const std::size_t i1 = i0 + stride;
                const cx a0 = a[i0];
                const cx a1 = a[i1];
                a[i0] = c * a0 + is * a1;
                a[i1] = is * a0 + c * a1;
            }
        }
    }
}

/// dst <- H_x src = -sum_j sigma^x_j src (dst is overwritten).
inline void apply_hx(const StateVector& src, StateVector& dst) {
    if (dst.dim() != src.dim()) dst = StateVector(src.n_qubits);
    const cx* s = src.amp.data();
    cx* d = dst.amp.data();
    const std::size_t dim = src.dim();
    for (std::size_t b = 0; b < dim; ++b) d[b] = cx(0.0, 0.0);
    for (int q = 0; q < src.n_qubits; ++q) {
        const std::size_t stride = std::size_t(1) << q;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off;
                const std::size_t i1 = i0 + stride;
                d[i0] -= s[i1];
                d[i1] -= s[i0];
            }
        }
    }
}

inline double norm_squared(const StateVector& psi) {
    double s = 0.0;
    for (const auto& v : psi.amp) s += std::norm(v);
    return s;
}

inline double norm(const StateVector& psi) { return std::sqrt(norm_squared(psi)); }

inline cx inner(const StateVector& bra, const StateVector& ket) {
    if (bra.dim() != ket.dim()) throw std::invalid_argument("inner: dimension mismatch");
    cx s(0.0, 0.0);
    for (std::size_t b = 0; b < bra.dim(); ++b) s += std::conj(bra.amp[b]) * ket.amp[b];
    return s;
}

/// <bra| H_x |ket> without materializing H_x |ket>.
inline cx inner_with_hx(const StateVector& bra, const StateVector& ket) {
    if (bra.dim() != ket.dim()) throw std::invalid_argument("inner_with_hx: dimension mismatch");
    const cx* l = bra.amp.data();
    const cx* r = ket.amp.data();
    const std::size_t dim = bra.dim();
    cx s(0.0, 0.0);
    for (int q = 0; q < bra.n_qubits; ++q) {
        const std::size_t stride = std::size_t(1) << q;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off;
                const std::size_t i1 = i0 + stride;
                s -= std::conj(l[i0]) * r[i1] + std::conj(l[i1]) * r[i0];
            }
        }
    }
    return s;
}

/// <psi| H_z |psi> = sum_b diag_b |amp_b|^2.
inline double expectation_z(const StateVector& psi, const ProblemDiagonal& diag) {
    if (diag.dim() != psi.dim())
        throw std::invalid_argument("expectation_z: dimension mismatch");
    double e = 0.0;
    for (std::size_t b = 0; b < psi.dim(); ++b) e += diag.values[b] * std::norm(psi.amp[b]);
    return e;
}

/// Ground-manifold projection: sum of |amp|^2 over all degenerate ground
/// configurations.
inline double fidelity(const StateVector& psi, const ExactSolution& sol) {
    double f = 0.0;
    for (const auto b : sol.ground_bitstrings) f += std::norm(psi.amp[b]);
    return f;
}

}  // namespace qforge
