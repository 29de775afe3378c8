#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "torres/grid.hpp"

namespace torres {

struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyResonanceSetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpectrumSource {
    int mode_n = 0;
    double theta = 0.0;
    double nu = 0.0;
    int grid_n = 0;
};

/// Eigenvalues with per-pair residual certificates ||M v - lambda v|| / ||M||_F
/// (unit eigenvectors, Frobenius matrix norm). certified is false when any
/// residual exceeds the tolerance the decomposition was asked for; the
/// offending indices are listed.
struct Spectrum {
    ComplexVector eigenvalues;
    Eigen::VectorXd residuals;
    SpectrumSource source;
    double tol = 1e-8;
    bool certified = true;
    std::vector<int> uncertified;
};

inline bool eig_less(const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

/// Dense eigendecomposition with residual certification. The solver is a
/// balanced Hessenberg reduction with implicitly shifted QR (iteration
/// budget 30 sweeps per row); the certificate, not the algorithm, is the
/// contract. Eigenvalues are reported in ascending (Re, Im) order.
inline Spectrum eigendecompose(const ComplexMatrix& m, double tol = 1e-8) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigendecompose: matrix must be square");
    if (m.rows() > 2048) throw std::invalid_argument("eigendecompose: size limit is 2048");
    Eigen::ComplexEigenSolver<ComplexMatrix> solver;
    solver.compute(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw NonConvergenceError("eigendecompose: QR iteration did not converge within budget");
    const Eigen::Index n = m.rows();
    const double scale = std::max(m.norm(), 1e-300);
    std::vector<int> order(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<size_t>(i)] = static_cast<int>(i);
    const auto& vals = solver.eigenvalues();
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return eig_less(vals[a], vals[b]); });
    Spectrum sp;
    sp.eigenvalues.resize(n);
    sp.residuals.resize(n);
    sp.tol = tol;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int j = order[static_cast<size_t>(i)];
        sp.eigenvalues[i] = vals[j];
        const ComplexVector v = solver.eigenvectors().col(j);
        sp.residuals[i] = (m * v - vals[j] * v).norm() / (scale * v.norm());
        if (!(sp.residuals[i] <= tol)) {
            sp.certified = false;
            sp.uncertified.push_back(static_cast<int>(i));
        }
    }
    return sp;
}

/// The region (-omega0, omega0) + i*(-omega0*theta, inf).
struct SpectralWindow {
    double omega0 = 0.0;
    double theta = 0.0;

    bool contains(const Complex& z) const {
        return std::abs(z.real()) < omega0 && z.imag() > -omega0 * theta;
    }
};

inline Spectrum filter_window(const Spectrum& s, const SpectralWindow& w) {
    Spectrum out;
    out.source = s.source;
    out.tol = s.tol;
    out.certified = s.certified;
    std::vector<Complex> vals;
    std::vector<double> res;
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        if (w.contains(s.eigenvalues[i])) {
            vals.push_back(s.eigenvalues[i]);
            res.push_back(s.residuals[i]);
        }
    }
    out.eigenvalues = Eigen::Map<const ComplexVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    out.residuals = Eigen::Map<const Eigen::VectorXd>(res.data(), static_cast<Eigen::Index>(res.size()));
    return out;
}

/// Minimum-cost assignment (Hungarian algorithm with potentials) for a
/// dense cost matrix, rows <= cols. Returns for each row the assigned
/// column. O(rows^2 * cols).
inline std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost) {
    const int rows = static_cast<int>(cost.rows());
    const int cols = static_cast<int>(cost.cols());
    if (rows == 0) return {};
    if (rows > cols) throw std::invalid_argument("min_cost_assignment: needs rows <= cols");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<size_t>(rows) + 1, 0.0), v(static_cast<size_t>(cols) + 1, 0.0);
    std::vector<int> way(static_cast<size_t>(cols) + 1, 0), match(static_cast<size_t>(cols) + 1, 0);
    for (int i = 1; i <= rows; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(cols) + 1, inf);
        std::vector<char> used(static_cast<size_t>(cols) + 1, 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            const int i0 = match[static_cast<size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= cols; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= cols; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<size_t>(j0)];
            match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> assign(static_cast<size_t>(rows), -1);
    for (int j = 1; j <= cols; ++j)
        if (match[static_cast<size_t>(j)] != 0) assign[static_cast<size_t>(match[static_cast<size_t>(j)] - 1)] = j - 1;
    return assign;
}

/// One eigenvalue trajectory across a decreasing nu sweep.
struct EigenPath {
    int path_id = 0;
    std::vector<double> nus;
    std::vector<Complex> values;
    Complex limit_candidate{0.0, 0.0};
    std::optional<Complex> matched_resonance;
    double matched_distance = std::numeric_limits<double>::quiet_NaN();
    bool broken = false;
    int first_sweep_index = 0;
};

struct MatchOptions {
    /// Continuity budget between consecutive sweep values; a step larger
    /// than this flags the path broken (it is kept either way).
    std::function<double(double, double)> continuity_budget = [](double nu_a, double nu_b) {
        return 0.5 * std::sqrt(std::abs(nu_a - nu_b)) + 0.05;
    };
};

/// Tracks eigenvalues across a strictly decreasing nu sweep by
/// minimum-total-displacement assignment between consecutive spectra.
/// Unmatched eigenvalues start or terminate paths. Eigenvalues inside
/// each spectrum are taken in ascending (Re, Im) order, which fixes every
/// tie deterministically.
inline std::vector<EigenPath> match_paths(const std::vector<std::pair<double, Spectrum>>& sweeps,
                                          const MatchOptions& opts = {}) {
    if (sweeps.size() < 2)
        throw std::invalid_argument("match_paths: need at least two sweep points");
    for (size_t i = 1; i < sweeps.size(); ++i)
        if (!(sweeps[i].first < sweeps[i - 1].first))
            throw std::invalid_argument("match_paths: nu values must be strictly decreasing");

    std::vector<EigenPath> paths;
    std::vector<int> active;  // path index per eigenvalue of the previous spectrum
    auto sorted_vals = [](const Spectrum& s) {
        std::vector<Complex> v(s.eigenvalues.data(), s.eigenvalues.data() + s.eigenvalues.size());
        std::sort(v.begin(), v.end(), eig_less);
        return v;
    };

    std::vector<Complex> prev = sorted_vals(sweeps[0].second);
    for (size_t i = 0; i < prev.size(); ++i) {
        EigenPath p;
        p.path_id = static_cast<int>(paths.size());
        p.nus.push_back(sweeps[0].first);
        p.values.push_back(prev[i]);
        p.first_sweep_index = 0;
        active.push_back(p.path_id);
        paths.push_back(std::move(p));
    }

    for (size_t step = 1; step < sweeps.size(); ++step) {
        const std::vector<Complex> next = sorted_vals(sweeps[step].second);
        const int m = static_cast<int>(prev.size());
        const int k = static_cast<int>(next.size());
        std::vector<int> next_active(static_cast<size_t>(k), -1);
        if (m > 0 && k > 0) {
            // Pad the smaller side with zero-cost dummies; the dummy total is
            // a constant so real pairs are still matched at minimum cost.
            const int dim = std::max(m, k);
            Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(dim, dim);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < k; ++b) cost(a, b) = std::abs(prev[static_cast<size_t>(a)] - next[static_cast<size_t>(b)]);
            const std::vector<int> assign = min_cost_assignment(cost);
            for (int a = 0; a < m; ++a) {
                const int b = assign[static_cast<size_t>(a)];
                if (a < m && b < k && active[static_cast<size_t>(a)] >= 0) {
                    EigenPath& p = paths[static_cast<size_t>(active[static_cast<size_t>(a)])];
                    const double budget =
                        opts.continuity_budget(sweeps[step - 1].first, sweeps[step].first);
                    if (std::abs(next[static_cast<size_t>(b)] - prev[static_cast<size_t>(a)]) > budget) p.broken = true;
                    p.nus.push_back(sweeps[step].first);
                    p.values.push_back(next[static_cast<size_t>(b)]);
                    next_active[static_cast<size_t>(b)] = p.path_id;
                }
            }
        }
        for (int b = 0; b < k; ++b) {
            if (next_active[static_cast<size_t>(b)] >= 0) continue;
            EigenPath p;
            p.path_id = static_cast<int>(paths.size());
            p.nus.push_back(sweeps[step].first);
            p.values.push_back(next[static_cast<size_t>(b)]);
            p.first_sweep_index = static_cast<int>(step);
            next_active[static_cast<size_t>(b)] = p.path_id;
            paths.push_back(std::move(p));
        }
        prev = next;
        active = next_active;
    }
    for (auto& p : paths) p.limit_candidate = p.values.back();
    return paths;
}

/// Fills matched_resonance/matched_distance on paths that survive to the
/// final sweep point, matching each limit candidate to its nearest
/// window-filtered resonance.
inline void match_to_resonances(std::vector<EigenPath>& paths, const Spectrum& resonances,
                                const SpectralWindow& window, size_t sweep_count) {
    std::vector<Complex> rs;
    for (Eigen::Index i = 0; i < resonances.eigenvalues.size(); ++i)
        if (window.contains(resonances.eigenvalues[i])) rs.push_back(resonances.eigenvalues[i]);
    for (auto& p : paths) {
        const bool at_end = p.first_sweep_index + static_cast<int>(p.nus.size()) ==
                            static_cast<int>(sweep_count);
        if (!at_end || rs.empty()) continue;
        double best = std::numeric_limits<double>::infinity();
        Complex arg{};
        for (const Complex& r : rs) {
            const double dd = std::abs(p.limit_candidate - r);
            if (dd < best) {
                best = dd;
                arg = r;
            }
        }
        p.matched_resonance = arg;
        p.matched_distance = best;
    }
}

/// Directed distance from the viscous limit candidates into the resonance
/// set, restricted to the window: max over candidates of the distance to
/// the nearest resonance. Deliberately not symmetric.
inline double resonance_distance(const std::vector<Complex>& viscous_limits,
                                 const Spectrum& resonances, const SpectralWindow& window) {
    std::vector<Complex> rs;
    for (Eigen::Index i = 0; i < resonances.eigenvalues.size(); ++i)
        if (window.contains(resonances.eigenvalues[i])) rs.push_back(resonances.eigenvalues[i]);
    std::vector<Complex> ls;
    for (const Complex& z : viscous_limits)
        if (window.contains(z)) ls.push_back(z);
    if (ls.empty()) return 0.0;
    if (rs.empty())
        throw EmptyResonanceSetError(
            "resonance_distance: no resonances inside a window that contains viscous limits");
    double worst = 0.0;
    for (const Complex& z : ls) {
        double best = std::numeric_limits<double>::infinity();
        for (const Complex& r : rs) best = std::min(best, std::abs(z - r));
        worst = std::max(worst, best);
    }
    return worst;
}

/// Sizes of eigenvalue clusters at the given radius (multiset view of
/// multiplicities; no Jordan structure is attempted).
inline std::vector<int> cluster_sizes(const ComplexVector& vals, double radius = 1e-6) {
    std::vector<Complex> v(vals.data(), vals.data() + vals.size());
    std::sort(v.begin(), v.end(), eig_less);
    std::vector<int> sizes;
    size_t i = 0;
    while (i < v.size()) {
        size_t j = i + 1;
        while (j < v.size() && std::abs(v[j] - v[j - 1]) <= radius) ++j;
        sizes.push_back(static_cast<int>(j - i));
        i = j;
    }
    return sizes;
}

}  // namespace torres
