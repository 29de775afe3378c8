#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "torres/deformation.hpp"
#include "torres/grid.hpp"
#include "torres/symbols.hpp"

namespace torres {

struct BranchCutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IllConditionedEigenbasisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fourier-side matrix of multiplication by 1/(contour derivative):
/// F * Diag(1/gamma'(x1)) * F^adj. Identity when theta = 0.
inline ComplexMatrix contour_jacobian_matrix(const GridSpec& g, const DeformationSpec& d) {
    const ComplexMatrix f = dft_matrix(g);
    ComplexVector diag(g.n);
    for (int j = 0; j < g.n; ++j) diag[j] = 1.0 / d.contour_derivative(g.x1[j]);
    return f * diag.asDiagonal() * f.adjoint();
}

/// Deformed (1 + n^2 + D^2) on one Fourier mode:
/// (1 + n^2) Id + (Gamma K)^2 with K = Diag(k).
inline ComplexMatrix deformed_bracket_squared(const GridSpec& g, const DeformationSpec& d, int n) {
    const ComplexMatrix gamma = contour_jacobian_matrix(g, d);
    ComplexMatrix gk = gamma;
    for (int c = 0; c < g.n; ++c) gk.col(c) *= static_cast<double>(g.k[c]);
    ComplexMatrix out = gk * gk;
    out.diagonal().array() += 1.0 + static_cast<double>(n) * n;
    return out;
}

/// Inverse of the principal matrix square root.
///
/// Computed through the complex Schur form with the square root of the
/// triangular factor built by the standard recurrence; the principal
/// branch places every eigenvalue of sqrt(M) in the closed right half
/// plane. Raises BranchCutError when an eigenvalue lies within
/// branch_margin of (-inf, 0], and IllConditionedEigenbasisError when the
/// computed root fails its residual certificate
///   ||sqrt(M)^2 - M||_F <= eps * cond_limit * ||M||_F,
/// which with the default cond_limit corresponds to the contract
/// ||inv_sqrt(M)^-2 - M|| <~ 1e-8 ||M||.
inline ComplexMatrix inverse_sqrt(const ComplexMatrix& m, double cond_limit = 1e8,
                                  double branch_margin = 1e-10) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse_sqrt: matrix must be square");
    const Eigen::Index n = m.rows();
    Eigen::ComplexSchur<ComplexMatrix> schur(m, /*computeU=*/true);
    if (schur.info() != Eigen::Success)
        throw std::runtime_error("inverse_sqrt: Schur decomposition failed to converge");
    const ComplexMatrix& t = schur.matrixT();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex ev = t(i, i);
        const double dist = ev.real() > 0.0 ? std::abs(ev) : std::abs(ev.imag());
        if (dist <= branch_margin)
            throw BranchCutError("inverse_sqrt: eigenvalue " + std::to_string(ev.real()) + "+" +
                                 std::to_string(ev.imag()) + "i lies on the branch cut");
    }
    ComplexMatrix u = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) u(i, i) = std::sqrt(t(i, i));
    for (Eigen::Index off = 1; off < n; ++off) {
        for (Eigen::Index i = 0; i + off < n; ++i) {
            const Eigen::Index j = i + off;
            Complex s = t(i, j);
            for (Eigen::Index k = i + 1; k < j; ++k) s -= u(i, k) * u(k, j);
            u(i, j) = s / (u(i, i) + u(j, j));
        }
    }
    const ComplexMatrix root = schur.matrixU() * u * schur.matrixU().adjoint();
    const double scale = std::max(m.norm(), 1e-300);
    const double resid = (root * root - m).norm() / scale;
    if (!(resid <= std::numeric_limits<double>::epsilon() * cond_limit))
        throw IllConditionedEigenbasisError(
            "inverse_sqrt: residual " + std::to_string(resid) +
            " exceeds the certificate eps*cond_limit");
    return root.partialPivLu().solve(ComplexMatrix::Identity(n, n));
}

/// Truncation order for the k-sums: all dropped terms of the Gaussian
/// tail are below 1e-16, and at least the resolved band N/2 is kept.
inline int default_k_max(const MultiplierFn& v, int grid_n) {
    const int from_tail = static_cast<int>(std::ceil(std::sqrt(37.0 / v.tail_c)));
    return std::max(grid_n / 2, from_tail);
}

/// Deformed multiplier V(D) on the Fourier side. The physical-side kernel
///
///   Vhat_{ij} = (1/N) sum_k V(k) e^{i k (gamma(x_i) - gamma(x_j))} gamma'(x_j)
///
/// carries the contour Jacobian gamma'(y) of the deformed integral; at
/// theta = 0 it collapses to Diag(V(k)) after conjugation. The k-sum uses
/// rank-one accumulation with V(k) folded into the growing factor so no
/// intermediate overflows.
inline ComplexMatrix deformed_multiplier_matrix(const MultiplierFn& v, const GridSpec& g,
                                                const DeformationSpec& d, int k_max = -1) {
    const int n = g.n;
    if (k_max < 0) k_max = default_k_max(v, n);
    ComplexVector gam(n), gamp(n);
    for (int j = 0; j < n; ++j) {
        gam[j] = d.contour(g.x1[j]);
        gamp[j] = d.contour_derivative(g.x1[j]);
    }
    ComplexMatrix vhat = ComplexMatrix::Zero(n, n);
    ComplexVector a(n), b(n);
    for (int k = -k_max; k <= k_max; ++k) {
        const double vk = v(static_cast<double>(k));
        if (vk == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            a[j] = vk * std::exp(kI * static_cast<double>(k) * gam[j]);
            b[j] = std::exp(-kI * static_cast<double>(k) * gam[j]) * gamp[j];
        }
        vhat.noalias() += a * b.transpose();
    }
    vhat /= static_cast<double>(n);
    const ComplexMatrix f = dft_matrix(g);
    return f * vhat * f.adjoint();
}

/// F * Diag(sin(gamma(x1))) * F^adj.
inline ComplexMatrix deformed_sine_matrix(const GridSpec& g, const DeformationSpec& d) {
    const ComplexMatrix f = dft_matrix(g);
    ComplexVector diag(g.n);
    for (int j = 0; j < g.n; ++j) diag[j] = std::sin(d.contour(g.x1[j]));
    return f * diag.asDiagonal() * f.adjoint();
}

enum class Provenance { Deformed, Viscous };

/// Dense matrix of the operator family on one Fourier mode, with the
/// parameters it was assembled from.
struct ModeMatrix {
    ComplexMatrix matrix;
    int mode_n = 0;
    double theta = 0.0;
    double nu = 0.0;
    GridSpec grid;
    Provenance provenance = Provenance::Deformed;
};

/// Contour-deformed operator on mode n:
///   n (sqrt(bracket))^-1 + S (Id - Vm) + (Id - Vm) S + Va
/// with every factor evaluated on the deformed contour.
inline ModeMatrix assemble_deformed(const GridSpec& g, const DeformationSpec& d,
                                    const SymbolFamily& s, int n) {
    const ComplexMatrix r = inverse_sqrt(deformed_bracket_squared(g, d, n));
    const ComplexMatrix vm = deformed_multiplier_matrix(s.v_m, g, d);
    const ComplexMatrix va = deformed_multiplier_matrix(s.v_a, g, d);
    const ComplexMatrix st = deformed_sine_matrix(g, d);
    const ComplexMatrix one_minus_vm = ComplexMatrix::Identity(g.n, g.n) - vm;
    ModeMatrix out;
    out.matrix = static_cast<double>(n) * r + st * one_minus_vm + one_minus_vm * st + va;
    out.mode_n = n;
    out.theta = d.theta;
    out.nu = 0.0;
    out.grid = g;
    out.provenance = Provenance::Deformed;
    return out;
}

/// Viscous operator on mode n:
///   n Diag((1+n^2+k^2)^-1/2) + S (Id - Vm) + (Id - Vm) S + Va - i nu K^2,
/// all multipliers diagonal in the Fourier basis. The bracket includes
/// the n^2 shift on this side too, so nu = 0 reproduces the undeformed
/// assembly exactly. With full_mode_laplacian the dissipative term is
/// -i nu (K^2 + n^2 Id).
inline ModeMatrix assemble_viscous(const GridSpec& g, const SymbolFamily& s, int n, double nu,
                                   bool full_mode_laplacian = false) {
    if (nu < 0.0) throw std::invalid_argument("assemble_viscous: nu must be >= 0");
    const int sz = g.n;
    const ComplexMatrix f = dft_matrix(g);
    ComplexVector sine(sz);
    for (int j = 0; j < sz; ++j) sine[j] = std::sin(g.x1[j]);
    const ComplexMatrix smat = f * sine.asDiagonal() * f.adjoint();
    ComplexVector bracket(sz), vm(sz), va(sz), dissip(sz);
    for (int r = 0; r < sz; ++r) {
        const double k = static_cast<double>(g.k[r]);
        bracket[r] = static_cast<double>(n) / std::sqrt(1.0 + static_cast<double>(n) * n + k * k);
        vm[r] = s.v_m(k);
        va[r] = s.v_a(k);
        const double lap = k * k + (full_mode_laplacian ? static_cast<double>(n) * n : 0.0);
        dissip[r] = -kI * nu * lap;
    }
    const ComplexMatrix one_minus_vm =
        ComplexMatrix::Identity(sz, sz) - ComplexMatrix(vm.asDiagonal());
    ModeMatrix out;
    out.matrix = ComplexMatrix(bracket.asDiagonal()) + smat * one_minus_vm + one_minus_vm * smat +
                 ComplexMatrix(va.asDiagonal()) + ComplexMatrix(dissip.asDiagonal());
    out.mode_n = n;
    out.theta = 0.0;
    out.nu = nu;
    out.grid = g;
    out.provenance = Provenance::Viscous;
    return out;
}

}  // namespace torres
