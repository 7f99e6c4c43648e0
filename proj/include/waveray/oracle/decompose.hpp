// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <numeric>

#include "wdf.hpp"

namespace waveray::oracle {

struct Decomposition {
    std::vector<GaussianPhasePoint> rays;
    Float relative_residual = 0;
};

/// Evaluate a generalized ray's phase-space footprint (unit total power).
inline Float ray_wdf(const GaussianPhasePoint &p, Float r, Float k) {
    Float nrm = 1 / (TwoPi * p.sigma_r * p.sigma_k);
    return p.weight * nrm *
           std::exp(-sqr(r - p.mean_r) / (2 * p.sigma_r * p.sigma_r) -
                    sqr(k - p.mean_k) / (2 * p.sigma_k * p.sigma_k));
}

inline WDFGrid render_rays(const std::vector<GaussianPhasePoint> &rays, const WDFGrid &like) {
    WDFGrid out = like;
    std::fill(out.w.begin(), out.w.end(), Float(0));
    for (auto &p : rays)
        for (std::size_t s = 0; s < out.nr; ++s)
            for (std::size_t q = 0; q < out.nk; ++q)
                out.at(s, q) += ray_wdf(p, out.r(s), out.k(q));
    return out;
}

namespace detail {

/// Lawson-Hanson non-negative least squares: min ||A x - b||, x >= 0.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd &a, const Eigen::VectorXd &b,
                            int max_iter = 2000) {
    const Eigen::Index n = a.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(n, false);
    Eigen::VectorXd w(n);
    const Float tol = 1e-12 * a.cwiseAbs().maxCoeff() * b.cwiseAbs().maxCoeff();

    for (int iter = 0; iter < max_iter; ++iter) {
        w = a.transpose() * (b - a * x);
        Eigen::Index best = -1;
        Float best_w = tol;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[j] && w[j] > best_w) {
                best_w = w[j];
                best = j;
            }
        if (best < 0) break;
        passive[(std::size_t)best] = true;

        for (;;) {
            std::vector<Eigen::Index> idx;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[(std::size_t)j]) idx.push_back(j);
            Eigen::MatrixXd ap(a.rows(), (Eigen::Index)idx.size());
            for (std::size_t c = 0; c < idx.size(); ++c) ap.col((Eigen::Index)c) = a.col(idx[c]);
            Eigen::VectorXd z =
                (ap.transpose() * ap).ldlt().solve(ap.transpose() * b);

            bool all_pos = true;
            for (Eigen::Index c = 0; c < z.size(); ++c)
                if (z[c] <= 0) { all_pos = false; break; }
            if (all_pos) {
                x.setZero();
                for (std::size_t c = 0; c < idx.size(); ++c) x[idx[c]] = z[(Eigen::Index)c];
                break;
            }
            // step toward z until the first passive variable hits zero
            Float alpha = 1;
            for (std::size_t c = 0; c < idx.size(); ++c)
                if (z[(Eigen::Index)c] <= 0) {
                    Float xi = x[idx[c]];
                    Float step = xi / (xi - z[(Eigen::Index)c]);
                    alpha = std::min(alpha, step);
                }
            for (std::size_t c = 0; c < idx.size(); ++c)
                x[idx[c]] += alpha * (z[(Eigen::Index)c] - x[idx[c]]);
            for (std::size_t c = 0; c < idx.size(); ++c)
                if (x[idx[c]] <= 1e-14) {
                    x[idx[c]] = 0;
                    passive[(std::size_t)idx[c]] = false;
                }
        }
    }
    return x;
}

} // namespace detail

/// Fit <= n_max minimum-uncertainty Gaussians, centered on a lattice of
/// phase-space cells spaced (sigma_r, sigma_k), to a non-negative grid.
/// Weights are returned for cells with positive fitted intensity.
inline Decomposition decompose_into_rays(const WDFGrid &g, std::size_t n_max,
                                         const GaussianPhasePoint &cell) {
    if (!cell.minimum_uncertainty(1e-9))
        throw std::invalid_argument("decompose_into_rays: cell must be minimum-uncertainty");
    Float mn = g.min_value(), mx = g.max_value();
    if (mn < -1e-9 * std::max(mx, Float(0)))
        throw std::invalid_argument("decompose_into_rays: input grid has negative values");
    if (n_max == 0) throw std::invalid_argument("decompose_into_rays: n_max must be positive");

    // lattice of candidate cells, deterministic r-major order
    std::vector<GaussianPhasePoint> cells;
    Float r_lo = g.r0, r_hi = g.r(g.nr - 1);
    Float k_lo = g.k0, k_hi = g.k(g.nk - 1);
    for (Float rc = r_lo; rc <= r_hi + 1e-12 * std::abs(r_hi - r_lo); rc += cell.sigma_r)
        for (Float kc = k_lo; kc <= k_hi + 1e-12 * std::abs(k_hi - k_lo); kc += cell.sigma_k) {
            GaussianPhasePoint p = cell;
            p.mean_r = rc;
            p.mean_k = kc;
            p.weight = 1;
            cells.push_back(p);
        }

    const std::size_t rows = g.nr * g.nk;
    Eigen::VectorXd b(rows);
    for (std::size_t s = 0; s < g.nr; ++s)
        for (std::size_t q = 0; q < g.nk; ++q)
            b[(Eigen::Index)(s * g.nk + q)] = std::max(Float(0), g.at(s, q));

    auto column = [&](const GaussianPhasePoint &p, Eigen::VectorXd &col) {
        for (std::size_t s = 0; s < g.nr; ++s)
            for (std::size_t q = 0; q < g.nk; ++q)
                col[(Eigen::Index)(s * g.nk + q)] = ray_wdf(p, g.r(s), g.k(q));
    };

    // keep the n_max candidates with the largest overlap, stable in lattice order
    if (cells.size() > n_max) {
        std::vector<Float> score(cells.size());
        Eigen::VectorXd col(rows);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            column(cells[i], col);
            score[i] = col.dot(b);
        }
        std::vector<std::size_t> order(cells.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return score[x] > score[y]; });
        order.resize(n_max);
        std::sort(order.begin(), order.end());
        std::vector<GaussianPhasePoint> kept;
        kept.reserve(n_max);
        for (auto i : order) kept.push_back(cells[i]);
        cells.swap(kept);
    }

    Eigen::MatrixXd a(rows, (Eigen::Index)cells.size());
    {
        Eigen::VectorXd col(rows);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            column(cells[i], col);
            a.col((Eigen::Index)i) = col;
        }
    }

    Eigen::VectorXd x = detail::nnls(a, b);

    Decomposition out;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (x[(Eigen::Index)i] > 0) {
            GaussianPhasePoint p = cells[i];
            p.weight = x[(Eigen::Index)i];
            out.rays.push_back(p);
        }
    Float bn = b.norm();
    out.relative_residual = bn > 0 ? (a * x - b).norm() / bn : 0;
    return out;
}

} // namespace waveray::oracle
