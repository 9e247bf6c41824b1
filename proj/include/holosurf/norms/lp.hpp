#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "holosurf/core/errors.hpp"

namespace holosurf::norms::lp {

struct SparseColumn {
    std::vector<std::pair<int, double>> entries;
    double cost = 0.0;
};

/// min c^T x subject to A x = rhs, x >= 0, started from a feasible basis.
struct Problem {
    int rows = 0;
    std::vector<double> rhs;
    std::vector<SparseColumn> columns;
    std::vector<int> initial_basis;  ///< one column per row; B^{-1} rhs must be >= 0
};

struct Result {
    std::string status;  ///< "optimal", "unbounded", "iteration_limit"
    std::vector<double> x;
    std::vector<double> dual;  ///< y with c_B = B^T y
    double objective = 0.0;
    double dual_objective = 0.0;
    long iterations = 0;
    long bland_iterations = 0;
};

/// Revised primal simplex with an explicit dense basis inverse, Dantzig pricing, a perturbed
/// right-hand side against stalling and Bland's rule as anti-cycling fallback.
inline Result solve(const Problem& p, long max_iterations = 1000000) {
    const int m = p.rows;
    const int ncol = static_cast<int>(p.columns.size());
    if (static_cast<int>(p.initial_basis.size()) != m || static_cast<int>(p.rhs.size()) != m)
        throw InternalError("LPShape", "initial basis or rhs size differs from the row count");
    if (m > 6000) throw ValidationError("LPTooLarge", "LP has more rows than the dense basis inverse supports");
    Result res;
    std::vector<int> basis = p.initial_basis;
    std::vector<char> is_basic(static_cast<std::size_t>(ncol), 0);
    for (int j : basis) is_basic[static_cast<std::size_t>(j)] = 1;
    Eigen::Map<const Eigen::VectorXd> b(p.rhs.data(), m);

    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor binv(m, m);
    Eigen::VectorXd xb(m);
    // Sparse LU of the current basis; recomputes x_B (and B^{-1} when `full`). The basis inverse
    // is otherwise maintained by rank-one updates, which stay accurate here because basis entries
    // are small integers.
    auto refactor = [&](bool full, const Eigen::VectorXd& rhs) {
        Eigen::SparseMatrix<double> bm(m, m);
        std::vector<Eigen::Triplet<double>> trip;
        for (int r = 0; r < m; ++r)
            for (auto [i, v] : p.columns[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)])].entries) trip.emplace_back(i, r, v);
        bm.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(bm);
        if (lu.info() != Eigen::Success) throw InternalError("LPSingularBasis", "simplex basis became singular");
        xb = lu.solve(rhs);
        if (full) binv = Eigen::MatrixXd(lu.solve(Eigen::MatrixXd::Identity(m, m)));
        for (int r = 0; r < m; ++r)
            if (xb[r] < 0 && xb[r] > -1e-8) xb[r] = 0;
    };
    // Degeneracy (most right-hand sides are zero) makes plain pivoting stall; iterate on a
    // right-hand side perturbed inside the initial basis cone, then re-solve the final basis
    // against the true one. Reduced costs do not depend on the right-hand side.
    Eigen::VectorXd bp = b;
    if (m > 0) {
        double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
        std::mt19937_64 rng(0x5eed);
        std::uniform_real_distribution<double> u(1.0, 2.0);
        for (int r = 0; r < m; ++r) {
            const double e = 1e-10 * bscale * u(rng);
            for (auto [i, v] : p.columns[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)])].entries) bp[i] += v * e;
        }
        refactor(true, bp);
    }

    double scale = 1.0;
    for (const auto& c : p.columns) scale = std::max(scale, std::fabs(c.cost));
    const double rc_tol = 1e-12 * scale;
    const double pivot_tol = 1e-11;
    int degenerate_run = 0;
    Eigen::VectorXd cb(m), y(m), d(m);
    auto compute_dual = [&] {
        for (int r = 0; r < m; ++r) cb[r] = p.columns[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)])].cost;
        y.setZero();
        for (int r = 0; r < m; ++r)
            if (cb[r] != 0.0) y += cb[r] * binv.row(r).transpose();
    };
    auto reduced_cost = [&](int j) {
        const auto& c = p.columns[static_cast<std::size_t>(j)];
        double v = c.cost;
        for (auto [i, a] : c.entries) v -= y[i] * a;
        return v;
    };

    res.status = "iteration_limit";
    compute_dual();
    while (res.iterations < max_iterations) {
        const bool bland = degenerate_run > 50;
        int enter = -1;
        double best = -rc_tol;
        for (int j = 0; j < ncol; ++j) {
            if (is_basic[static_cast<std::size_t>(j)]) continue;
            const double rc = reduced_cost(j);
            if (rc < best) {
                enter = j;
                best = rc;
                if (bland) break;
            }
        }
        if (enter < 0) {
            res.status = "optimal";
            break;
        }
        d.setZero();
        for (auto [i, a] : p.columns[static_cast<std::size_t>(enter)].entries) d += a * binv.col(i);
        int leave = -1;
        double theta = std::numeric_limits<double>::infinity();
        for (int r = 0; r < m; ++r) {
            if (d[r] <= pivot_tol) continue;
            const double t = std::max(0.0, xb[r]) / d[r];
            if (t < theta - 1e-15 ||
                (t <= theta + 1e-15 && leave >= 0 && basis[static_cast<std::size_t>(r)] < basis[static_cast<std::size_t>(leave)])) {
                theta = t;
                leave = r;
            }
        }
        if (leave < 0) {
            res.status = "unbounded";
            break;
        }
        degenerate_run = theta <= 1e-14 ? degenerate_run + 1 : 0;
        if (bland) ++res.bland_iterations;
        xb -= theta * d;
        xb[leave] = theta;
        const double piv = d[leave];
        binv.row(leave) /= piv;
        for (int r = 0; r < m; ++r)
            if (r != leave && d[r] != 0.0) binv.row(r) -= d[r] * binv.row(leave);
        // Dual update: y' = y + rc_enter * (row `leave` of the new inverse).
        y += best * binv.row(leave).transpose();
        is_basic[static_cast<std::size_t>(basis[static_cast<std::size_t>(leave)])] = 0;
        basis[static_cast<std::size_t>(leave)] = enter;
        is_basic[static_cast<std::size_t>(enter)] = 1;
        ++res.iterations;
        if (res.iterations % 500 == 0) compute_dual();
    }
    if (m > 0) refactor(false, b);
    compute_dual();
    res.x.assign(static_cast<std::size_t>(ncol), 0.0);
    for (int r = 0; r < m; ++r) res.x[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)])] = std::max(0.0, xb[r]);
    res.dual.assign(y.data(), y.data() + m);
    for (int j = 0; j < ncol; ++j) res.objective += p.columns[static_cast<std::size_t>(j)].cost * res.x[static_cast<std::size_t>(j)];
    res.dual_objective = y.dot(b);
    return res;
}

}  // namespace holosurf::norms::lp
