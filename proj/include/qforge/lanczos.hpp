#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qforge/common.hpp"

namespace qforge {

struct EigsOptions {
    int k = 2;               // number of lowest eigenpairs wanted
    int block = 0;           // expansion block size; 0 means max(k, 2)
    int max_basis = 160;     // basis cap before a thick restart
    int max_rounds = 400;    // expansion rounds across restarts
    double tol = 1e-11;      // residual tolerance relative to the Ritz scale
    std::uint64_t seed = 0x9e3779b9ULL;
};

template <class Scalar>
struct EigsResult {
    std::vector<double> values;  // ascending
    std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> vectors;
    bool converged = false;
    int n_apply = 0;
};

namespace detail {

template <class Scalar>
double real_part(Scalar v) {
    if constexpr (std::is_same_v<Scalar, double>)
        return v;
    else
        return v.real();
}

template <class Scalar>
void fill_random(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v, Rng& rng) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if constexpr (std::is_same_v<Scalar, double>)
            v[i] = rng.uniform() - 0.5;
        else
            v[i] = Scalar(rng.uniform() - 0.5, rng.uniform() - 0.5);
    }
}

}  // namespace detail

/// Lowest eigenpairs of a Hermitian operator given only its action, via a
/// block Krylov iteration with full reorthogonalization, Rayleigh-Ritz
/// extraction, residual-vector expansion and thick restarts. Scalar is
/// double (symmetric) or std::complex<double> (Hermitian).
template <class Scalar, class Apply>
EigsResult<Scalar> lowest_eigenpairs_iterative(
    std::size_t dim, Apply&& apply, const EigsOptions& opts,
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>* warm = nullptr) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    const int k = std::min<int>(opts.k, static_cast<int>(dim));
    const int block = std::min<int>(opts.block > 0 ? opts.block : std::max(k, 2),
                                    static_cast<int>(dim));
    const int max_basis = std::min<int>(std::max(opts.max_basis, 2 * k + 2 * block),
                                        static_cast<int>(dim));

    EigsResult<Scalar> res;
    Rng rng(opts.seed);
    Mat basis(dim, max_basis);       // orthonormal columns
    Mat image(dim, max_basis);       // H * basis
    Mat tmat = Mat::Zero(max_basis, max_basis);
    int ncols = 0;
    int pending = 0;  // columns appended but not yet multiplied through

    Vec cand(dim), scratch(dim);

    // Two-pass modified Gram-Schmidt against the current basis; returns
    // false when the candidate is (numerically) dependent.
    auto orthonormalize = [&](Vec& v) {
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < ncols; ++j) {
                const Scalar proj = basis.col(j).dot(v);
                v -= proj * basis.col(j);
            }
        const double nrm = v.norm();
        if (nrm < 1e-10) return false;
        v /= nrm;
        return true;
    };

    auto append_column = [&](const Vec& v) {
        basis.col(ncols) = v;
        ++ncols;
        ++pending;
    };

    auto append_or_random = [&](Vec v) {
        if (ncols >= max_basis) return;
        const double nrm = v.norm();
        if (nrm > 1e-300) v /= nrm;
        if (!orthonormalize(v)) {
            for (int attempt = 0; attempt < 8; ++attempt) {
                detail::fill_random(v, rng);
                if (orthonormalize(v)) break;
                if (attempt == 7) return;
            }
        }
        append_column(v);
    };

    if (warm)
        for (const auto& wv : *warm) {
            if (ncols >= block) break;
            if (wv.size() == static_cast<Eigen::Index>(dim)) append_or_random(wv);
        }
    while (ncols < block) {
        detail::fill_random(cand, rng);
        append_or_random(cand);
    }

    Eigen::VectorXd ritz;
    Mat ritz_vec;
    std::vector<Vec> result_vectors;

    for (int round = 0; round < opts.max_rounds; ++round) {
        // Multiply new columns and extend the projected matrix.
        for (int i = ncols - pending; i < ncols; ++i) {
            Vec vin = basis.col(i);
            apply(vin, scratch);
            ++res.n_apply;
            image.col(i) = scratch;
            for (int j = 0; j <= i; ++j) {
                const Scalar t = basis.col(j).dot(image.col(i));
                tmat(j, i) = t;
                if constexpr (std::is_same_v<Scalar, double>)
                    tmat(i, j) = t;
                else
                    tmat(i, j) = std::conj(t);
            }
        }
        pending = 0;

        Eigen::SelfAdjointEigenSolver<Mat> es(tmat.topLeftCorner(ncols, ncols));
        ritz = es.eigenvalues();
        ritz_vec = es.eigenvectors();

        const double scale =
            std::max({std::abs(ritz[0]), std::abs(ritz[ncols - 1]), 1e-30});
        const int k_eff = std::min(k, ncols);
        bool all_converged = ncols >= k;
        std::vector<Vec> residuals;
        residuals.reserve(block);
        for (int j = 0; j < k_eff; ++j) {
            Vec y = basis.leftCols(ncols) * ritz_vec.col(j);
            Vec r = image.leftCols(ncols) * ritz_vec.col(j) - Scalar(ritz[j]) * y;
            const double rn = r.norm();
            if (rn > opts.tol * scale) {
                all_converged = false;
                if (static_cast<int>(residuals.size()) < block) residuals.push_back(r);
            }
        }

        if (all_converged || round == opts.max_rounds - 1 ||
            (ncols >= static_cast<int>(dim) && residuals.empty())) {
            res.values.assign(ritz.data(), ritz.data() + k_eff);
            res.vectors.clear();
            for (int j = 0; j < k_eff; ++j)
                res.vectors.emplace_back(basis.leftCols(ncols) * ritz_vec.col(j));
            res.converged = all_converged;
            return res;
        }

        // Thick restart: compress to the lowest Ritz vectors, keep images.
        if (ncols + std::max<int>(1, residuals.size()) > max_basis) {
            const int keep = std::min(std::max(2 * k, block + k), ncols);
            Mat vk = basis.leftCols(ncols) * ritz_vec.leftCols(keep);
            Mat wk = image.leftCols(ncols) * ritz_vec.leftCols(keep);
            basis.leftCols(keep) = vk;
            image.leftCols(keep) = wk;
            tmat.setZero();
            for (int j = 0; j < keep; ++j) tmat(j, j) = ritz[j];
            ncols = keep;
        }

        if (residuals.empty()) {
            detail::fill_random(cand, rng);
            append_or_random(cand);
        } else {
            for (auto& r : residuals) append_or_random(std::move(r));
        }
        if (pending == 0) {
            // Basis saturated the space; accept the current Ritz data.
            res.values.assign(ritz.data(), ritz.data() + k_eff);
            res.vectors.clear();
            for (int j = 0; j < k_eff; ++j)
                res.vectors.emplace_back(basis.leftCols(ncols) * ritz_vec.col(j));
            res.converged = all_converged;
            return res;
        }
    }
    return res;
}

/// Dense fallback: materialize the operator column by column and call the
/// direct symmetric/Hermitian solver. Intended for small dimensions and for
/// validating the iterative path.
template <class Scalar, class Apply>
EigsResult<Scalar> lowest_eigenpairs_dense(std::size_t dim, Apply&& apply, int k) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat h(dim, dim);
    Vec e = Vec::Zero(dim), col(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        e[j] = Scalar(1.0);
        apply(e, col);
        h.col(j) = col;
        e[j] = Scalar(0.0);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    EigsResult<Scalar> res;
    const int k_eff = std::min<int>(k, static_cast<int>(dim));
    res.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + k_eff);
    for (int j = 0; j < k_eff; ++j) res.vectors.emplace_back(es.eigenvectors().col(j));
    res.converged = true;
    res.n_apply = static_cast<int>(dim);
    return res;
}

/// Size-dispatching front end.
template <class Scalar, class Apply>
EigsResult<Scalar> lowest_eigenpairs(
    std::size_t dim, Apply&& apply, const EigsOptions& opts,
    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>* warm = nullptr) {
    if (dim <= 512) return lowest_eigenpairs_dense<Scalar>(dim, apply, opts.k);
    return lowest_eigenpairs_iterative<Scalar>(dim, apply, opts, warm);
}

}  // namespace qforge
