#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>

namespace torres {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Uniform grid on [0, 2*pi) together with the signed Fourier index set.
///
/// x1(j) = 2*pi*j/n for j = 0..n-1, and k runs over the fixed order
/// -n/2, -n/2+1, ..., n/2-1. Every matrix produced by the operator
/// assembly is indexed in this order on the Fourier side; there is no
/// fftshift ambiguity anywhere in the library.
struct GridSpec {
    int n = 0;
    RealVector x1;
    Eigen::VectorXi k;
};

inline GridSpec make_grid(int n) {
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("make_grid: grid size must be even and >= 4");
    GridSpec g;
    g.n = n;
    g.x1.resize(n);
    g.k.resize(n);
    for (int j = 0; j < n; ++j) {
        g.x1[j] = 2.0 * kPi * static_cast<double>(j) / n;
        g.k[j] = -n / 2 + j;
    }
    return g;
}

/// Unitary DFT matrix with rows indexed by k = -n/2..n/2-1 and columns by
/// the grid index j. Entries -exp(-2*pi*i*j*k/n)/sqrt(n).
///
/// The leading minus sign is kept so that intermediate matrices match the
/// convention used throughout the assembly; it is a global unimodular
/// phase and cancels in every conjugation F * Diag(.) * F^adj.
inline ComplexMatrix dft_matrix(const GridSpec& g) {
    const int n = g.n;
    ComplexMatrix f(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (int r = 0; r < n; ++r) {
        const double kk = static_cast<double>(g.k[r]);
        for (int j = 0; j < n; ++j) {
            const double phase = -2.0 * kPi * j * kk / n;
            f(r, j) = -s * std::exp(kI * phase);
        }
    }
    return f;
}

}  // namespace torres
