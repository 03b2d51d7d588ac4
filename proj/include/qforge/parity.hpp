#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qforge/statevector.hpp"

namespace qforge {

/// The digitized dynamics commutes with the global spin flip G = prod_j
/// sigma^x_j and starts in its +1 eigenspace. That even sector has dimension
/// 2^(n-1); representative r keeps bit n-1 clear and stands for
/// (|r> + |~r>)/sqrt(2).
struct EvenSector {
    int n_qubits = 0;

    explicit EvenSector(int n) : n_qubits(n) {
        if (n < 1 || n > kMaxQubits)
            throw std::invalid_argument("EvenSector: qubit count out of range");
    }
    std::size_t dim() const { return std::size_t(1) << (n_qubits - 1); }
    std::size_t low_mask() const { return dim() - 1; }
    /// Partner representative reached by flipping the top qubit of |r>.
    std::size_t flip_low(std::size_t r) const { return ~r & low_mask(); }
};

/// Reduced problem diagonal on representatives (E(r) = E(~r)).
inline std::vector<double> even_diagonal(const ProblemDiagonal& diag) {
    const EvenSector sec(diag.n_qubits);
    return {diag.values.begin(), diag.values.begin() + static_cast<std::ptrdiff_t>(sec.dim())};
}

/// u[r] = (psi[r] + psi[~r]) / sqrt(2).
inline Eigen::VectorXcd even_project(const StateVector& psi) {
    const EvenSector sec(psi.n_qubits);
    const std::uint64_t mask = (std::uint64_t(1) << psi.n_qubits) - 1;
    Eigen::VectorXcd u(sec.dim());
    const double inv_sqrt2 = 0.70710678118654752440084436210485;
    for (std::size_t r = 0; r < sec.dim(); ++r)
        u[r] = inv_sqrt2 * (psi.amp[r] + psi.amp[~r & mask]);
    return u;
}

/// dst = H_x src in the even-sector representation:
/// dst[r] = -( sum_{j<n-1} src[r ^ 2^j] + src[~r & low_mask] ).
template <class Scalar>
inline void even_hx_apply(const EvenSector& sec,
                          const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& src,
                          Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& dst) {
    const std::size_t dim = sec.dim();
    dst.resize(dim);
    for (std::size_t r = 0; r < dim; ++r) {
        Scalar acc = src[sec.flip_low(r)];
        for (int j = 0; j < sec.n_qubits - 1; ++j) acc += src[r ^ (std::size_t(1) << j)];
        dst[r] = -acc;
    }
}

/// s H_z + (1 - s) H_x restricted to the even sector; real symmetric.
struct AnnealingEvenOp {
    EvenSector sector;
    const std::vector<double>* diag;  // even_diagonal values, dim entries
    double s = 0.0;

    AnnealingEvenOp(const EvenSector& sec, const std::vector<double>& d, double s_val)
        : sector(sec), diag(&d), s(s_val) {}

    void operator()(const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
        even_hx_apply(sector, in, out);
        out *= (1.0 - s);
        for (std::size_t r = 0; r < sector.dim(); ++r) out[r] += s * (*diag)[r] * in[r];
    }
};

/// BCH effective generator of one digitized layer, restricted to the even
/// sector and applied matrix-free:
///   H_eff = tx H_x + tz H_z - (i/2) tx tz [H_x, H_z]
///           - (1/12) tx^2 tz [H_x,[H_x,H_z]] + (1/12) tx tz^2 [H_z,[H_x,H_z]]
/// truncated at `order`.
struct EffectiveEvenOp {
    EvenSector sector;
    const std::vector<double>* diag;
    double tx = 0.0, tz = 0.0;
    int order = 3;
    mutable Eigen::VectorXcd a, b, c, d, e, w, t1;

    EffectiveEvenOp(const EvenSector& sec, const std::vector<double>& dd, double theta_x,
                    double theta_z, int bch_order)
        : sector(sec), diag(&dd), tx(theta_x), tz(theta_z), order(bch_order) {
        if (order < 1 || order > 3)
            throw std::invalid_argument("EffectiveEvenOp: order must be in 1..3");
    }

    void mul_diag(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
        out.resize(in.size());
        for (Eigen::Index r = 0; r < in.size(); ++r) out[r] = (*diag)[r] * in[r];
    }

    void operator()(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
        mul_diag(in, a);                 // a = Hz v
        even_hx_apply(sector, in, b);    // b = Hx v
        out = tx * b + tz * a;
        if (order < 2) return;
        even_hx_apply(sector, a, c);     // c = Hx Hz v
        mul_diag(b, d);                  // d = Hz Hx v
        w = c - d;                       // [Hx, Hz] v
        out += std::complex<double>(0.0, -0.5 * tx * tz) * w;
        if (order < 3) return;
        even_hx_apply(sector, b, e);     // e = Hx Hx v
        even_hx_apply(sector, w, t1);    // Hx [Hx,Hz] v
        Eigen::VectorXcd xxz = t1;
        even_hx_apply(sector, d, t1);
        xxz -= t1;
        mul_diag(e, t1);
        xxz += t1;                       // [Hx,[Hx,Hz]] v
        mul_diag(w, t1);
        Eigen::VectorXcd zxz = t1;
        mul_diag(a, t1);
        even_hx_apply(sector, t1, e);    // Hx Hz Hz v (e reused)
        zxz -= e;
        mul_diag(c, t1);
        zxz += t1;                       // [Hz,[Hx,Hz]] v
        out += (-tx * tx * tz / 12.0) * xxz + (tx * tz * tz / 12.0) * zxz;
    }
};

}  // namespace qforge
