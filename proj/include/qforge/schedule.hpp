#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qforge/common.hpp"

namespace qforge {

/// The 2P digitized control angles, common to every method.
struct AngleSchedule {
    int p = 0;
    std::vector<double> theta_x;
    std::vector<double> theta_z;

    AngleSchedule() = default;
    explicit AngleSchedule(int depth) : p(depth), theta_x(depth, 0.0), theta_z(depth, 0.0) {
        if (depth < 1) throw std::invalid_argument("AngleSchedule: depth must be >= 1");
    }
};

inline void validate(const AngleSchedule& s) {
    if (s.p < 1 || s.theta_x.size() != std::size_t(s.p) || s.theta_z.size() != std::size_t(s.p))
        throw std::invalid_argument("AngleSchedule: inconsistent sizes");
    for (int m = 0; m < s.p; ++m)
        if (!std::isfinite(s.theta_x[m]) || !std::isfinite(s.theta_z[m]))
            throw std::invalid_argument("AngleSchedule: non-finite angle");
}

enum class CrabBasis { FourierSine, ChebyshevSignomial };

inline std::string to_string(CrabBasis b) {
    return b == CrabBasis::FourierSine ? "fourier_sine" : "chebyshev_signomial";
}

inline CrabBasis crab_basis_from_string(const std::string& s) {
    if (s == "fourier_sine") return CrabBasis::FourierSine;
    if (s == "chebyshev_signomial") return CrabBasis::ChebyshevSignomial;
    throw std::invalid_argument("unknown CRAB basis: " + s);
}

/// f_n(t): sin(omega_n t) with omega_n = (pi n / tau)(1 + r_n), or the
/// signomial cos(n (1 + r_n) arccos(t / tau)), which is T_n(t/tau) at r_n = 0.
inline double basis_value(CrabBasis basis, int n, double r_n, double t, double tau) {
    if (n < 1) throw std::invalid_argument("basis_value: mode index must be >= 1");
    if (t < 0.0 || t > tau) throw std::invalid_argument("basis_value: t outside [0, tau]");
    const double pi = 3.14159265358979323846264338327950288;
    if (basis == CrabBasis::FourierSine) {
        const double omega = pi * n * (1.0 + r_n) / tau;
        return std::sin(omega * t);
    }
    return std::cos(n * (1.0 + r_n) * std::acos(t / tau));
}

/// CRAB search space: common amplitude C0 (plays the role of the time step)
/// plus Nc expansion coefficients per field and one shared noise vector.
struct CrabCoefficients {
    double c0 = 1.0;
    std::vector<double> cx;
    std::vector<double> cz;
    std::vector<double> noise;  // r_n in [-1/2, 1/2], shared by both fields
    CrabBasis basis = CrabBasis::FourierSine;
    int p = 1;

    int nc() const { return static_cast<int>(cx.size()); }
};

inline void validate(const CrabCoefficients& c) {
    if (c.p < 1) throw std::invalid_argument("CrabCoefficients: depth must be >= 1");
    if (c.cx.size() != c.cz.size() || c.cx.size() != c.noise.size())
        throw std::invalid_argument("CrabCoefficients: cx, cz, noise must have equal length");
    for (const double r : c.noise)
        if (std::abs(r) > 0.5) throw std::invalid_argument("CrabCoefficients: |r_n| > 1/2");
}

/// i.i.d. uniform on [-1/2, 1/2], deterministic per seed.
inline std::vector<double> sample_noise(int nc, std::uint64_t seed) {
    if (nc < 0) throw std::invalid_argument("sample_noise: negative count");
    Rng rng(seed);
    std::vector<double> r(nc);
    for (auto& v : r) v = rng.uniform() - 0.5;
    return r;
}

namespace detail {
// Ramp prefactors of the CRAB/dQA parameterization on the grid t_m = m - 1/2,
// with tau identified with P.
inline double ramp_z(double m, int p) { return (m - 0.5) / p; }
inline double ramp_x(double m, int p) { return (p - (m - 0.5)) / p; }
}  // namespace detail

/// theta^x_m = ramp_x * (C0 + sum_n Cx_n f_n(t_m)),
/// theta^z_m = ramp_z * (C0 + sum_n Cz_n f_n(t_m)), with t_m = m - 1/2, tau = P.
inline AngleSchedule crab_angles(const CrabCoefficients& c) {
    validate(c);
    AngleSchedule s(c.p);
    const double tau = c.p;
    for (int m = 1; m <= c.p; ++m) {
        const double t = m - 0.5;
        double fx = c.c0, fz = c.c0;
        for (int n = 1; n <= c.nc(); ++n) {
            const double f = basis_value(c.basis, n, c.noise[n - 1], t, tau);
            fx += c.cx[n - 1] * f;
            fz += c.cz[n - 1] * f;
        }
        s.theta_x[m - 1] = detail::ramp_x(m, c.p) * fx;
        s.theta_z[m - 1] = detail::ramp_z(m, c.p) * fz;
    }
    return s;
}

/// Exact Jacobian d theta / d C of crab_angles, a (2P) x (2Nc + 1) matrix.
/// Rows: theta_x_1..theta_x_P then theta_z_1..theta_z_P; columns: C0, Cx, Cz.
/// The map is linear in C, so the matrix does not depend on the C values.
inline Eigen::MatrixXd crab_angle_jacobian(const CrabCoefficients& c) {
    validate(c);
    const int p = c.p, nc = c.nc();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * p, 2 * nc + 1);
    const double tau = p;
    for (int m = 1; m <= p; ++m) {
        const double t = m - 0.5;
        const double rx = detail::ramp_x(m, p);
        const double rz = detail::ramp_z(m, p);
        jac(m - 1, 0) = rx;
        jac(p + m - 1, 0) = rz;
        for (int n = 1; n <= nc; ++n) {
            const double f = basis_value(c.basis, n, c.noise[n - 1], t, tau);
            jac(m - 1, n) = rx * f;
            jac(p + m - 1, nc + n) = rz * f;
        }
    }
    return jac;
}

/// Fixed-frequency Fourier parameterization without the dQA ramp:
/// theta^z_m = sum_n Cz_n sin((n-1/2)(m-1/2) pi / P),
/// theta^x_m = sum_n Cx_n cos((n-1/2)(m-1/2) pi / P).
struct FourierZhouCoefficients {
    std::vector<double> cx;
    std::vector<double> cz;
    int p = 1;

    int nc() const { return static_cast<int>(cx.size()); }
};

inline void validate(const FourierZhouCoefficients& c) {
    if (c.p < 1) throw std::invalid_argument("FourierZhouCoefficients: depth must be >= 1");
    if (c.cx.size() != c.cz.size())
        throw std::invalid_argument("FourierZhouCoefficients: cx and cz must have equal length");
    if (c.nc() > c.p)
        throw std::invalid_argument("FourierZhouCoefficients: Nc must not exceed P");
}

inline AngleSchedule fourier_zhou_angles(const FourierZhouCoefficients& c) {
    validate(c);
    const double pi = 3.14159265358979323846264338327950288;
    AngleSchedule s(c.p);
    for (int m = 1; m <= c.p; ++m) {
        double tx = 0.0, tz = 0.0;
        for (int n = 1; n <= c.nc(); ++n) {
            const double arg = (n - 0.5) * (m - 0.5) * pi / c.p;
            tz += c.cz[n - 1] * std::sin(arg);
            tx += c.cx[n - 1] * std::cos(arg);
        }
        s.theta_x[m - 1] = tx;
        s.theta_z[m - 1] = tz;
    }
    return s;
}

/// Jacobian d theta / d C for the fixed-frequency Fourier map, (2P) x (2Nc).
/// Columns: Cx then Cz.
inline Eigen::MatrixXd fourier_zhou_jacobian(const FourierZhouCoefficients& c) {
    validate(c);
    const double pi = 3.14159265358979323846264338327950288;
    const int p = c.p, nc = c.nc();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * p, 2 * nc);
    for (int m = 1; m <= p; ++m) {
        for (int n = 1; n <= nc; ++n) {
            const double arg = (n - 0.5) * (m - 0.5) * pi / p;
            jac(m - 1, n - 1) = std::cos(arg);
            jac(p + m - 1, nc + n - 1) = std::sin(arg);
        }
    }
    return jac;
}

/// Linear-schedule dQA angles: theta^z_m = dt (m-1/2)/P, theta^x_m = dt (P-m+1/2)/P.
inline AngleSchedule linear_dqa_angles(int p, double dt) {
    AngleSchedule s(p);
    for (int m = 1; m <= p; ++m) {
        s.theta_z[m - 1] = dt * detail::ramp_z(m, p);
        s.theta_x[m - 1] = dt * detail::ramp_x(m, p);
    }
    return s;
}

inline nlohmann::json to_json(const AngleSchedule& s) {
    return {{"p", s.p}, {"theta_x", s.theta_x}, {"theta_z", s.theta_z}};
}

inline AngleSchedule schedule_from_json(const nlohmann::json& j) {
    AngleSchedule s;
    s.p = j.at("p").get<int>();
    s.theta_x = j.at("theta_x").get<std::vector<double>>();
    s.theta_z = j.at("theta_z").get<std::vector<double>>();
    validate(s);
    return s;
}

inline nlohmann::json to_json(const CrabCoefficients& c) {
    return {{"c0", c.c0},     {"cx", c.cx},
            {"cz", c.cz},     {"noise", c.noise},
            {"basis", to_string(c.basis)}, {"p", c.p}};
}

inline CrabCoefficients crab_from_json(const nlohmann::json& j) {
    CrabCoefficients c;
    c.c0 = j.at("c0").get<double>();
    c.cx = j.at("cx").get<std::vector<double>>();
    c.cz = j.at("cz").get<std::vector<double>>();
    c.noise = j.at("noise").get<std::vector<double>>();
    c.basis = crab_basis_from_string(j.at("basis").get<std::string>());
    c.p = j.at("p").get<int>();
    validate(c);
    return c;
}

inline nlohmann::json to_json(const FourierZhouCoefficients& c) {
    return {{"cx", c.cx}, {"cz", c.cz}, {"p", c.p}, {"basis", "fourier_zhou"}};
}

}  // namespace qforge
