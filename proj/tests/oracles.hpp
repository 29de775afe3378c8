#pragma once

// Test-side oracles, independent of the library's eigensolver path:
// an LU determinant with scaled mantissa/exponent bookkeeping, a
// Faddeev-LeVerrier characteristic polynomial, and a Durand-Kerner root
// finder for small degrees.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracles {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Determinant as mantissa * 2^exponent, via partial-pivot Gaussian
/// elimination written out here (not Eigen's determinant()).
struct ScaledComplex {
    Complex mantissa{1.0, 0.0};
    long exponent = 0;

    void multiply(Complex f) {
        mantissa *= f;
        normalize();
    }
    void normalize() {
        const double a = std::abs(mantissa);
        if (a == 0.0) return;
        int e = 0;
        std::frexp(a, &e);
        if (e > 60 || e < -60) {
            mantissa = std::ldexp(mantissa.real(), -e) + Complex(0, 1) * std::ldexp(mantissa.imag(), -e);
            exponent += e;
        }
    }
    /// |this - other| / |other| with exponents folded in.
    double rel_diff(const ScaledComplex& other) const {
        const long de = exponent - other.exponent;
        if (std::abs(de) > 500) return 1.0;
        const Complex a = std::ldexp(1.0, static_cast<int>(de)) * mantissa;
        return std::abs(a - other.mantissa) / std::abs(other.mantissa);
    }
};

inline ScaledComplex lu_determinant(Matrix m) {
    const Eigen::Index n = m.rows();
    ScaledComplex det;
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index piv = col;
        double best = std::abs(m(col, col));
        for (Eigen::Index r = col + 1; r < n; ++r) {
            if (std::abs(m(r, col)) > best) {
                best = std::abs(m(r, col));
                piv = r;
            }
        }
        if (best == 0.0) return {Complex{0.0, 0.0}, 0};
        if (piv != col) {
            m.row(piv).swap(m.row(col));
            det.multiply(Complex{-1.0, 0.0});
        }
        det.multiply(m(col, col));
        for (Eigen::Index r = col + 1; r < n; ++r) {
            const Complex f = m(r, col) / m(col, col);
            m.row(r).tail(n - col) -= f * m.row(col).tail(n - col);
        }
    }
    return det;
}

inline ScaledComplex product(const Eigen::VectorXcd& vals) {
    ScaledComplex p;
    for (Eigen::Index i = 0; i < vals.size(); ++i) p.multiply(vals[i]);
    return p;
}

/// Coefficients c of det(zI - M) = z^n + c[n-1] z^{n-1} + ... + c[0],
/// by the Faddeev-LeVerrier recurrence.
inline std::vector<Complex> char_poly(const Matrix& m) {
    const Eigen::Index n = m.rows();
    std::vector<Complex> c(static_cast<size_t>(n) + 1);
    c[static_cast<size_t>(n)] = 1.0;
    Matrix mk = Matrix::Zero(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        mk = m * mk;
        mk.diagonal().array() += c[static_cast<size_t>(n - k + 1)];
        c[static_cast<size_t>(n - k)] = -(m * mk).trace() / static_cast<double>(k);
    }
    c.pop_back();
    return c;  // size n: c[0..n-1]
}

/// Durand-Kerner simultaneous iteration for a monic polynomial given by
/// its low-order coefficients c[0..n-1].
inline std::vector<Complex> poly_roots(const std::vector<Complex>& c, int iters = 500) {
    const int n = static_cast<int>(c.size());
    auto eval = [&](Complex z) {
        Complex p{1.0, 0.0};
        for (int k = n - 1; k >= 0; --k) p = p * z + c[static_cast<size_t>(k)];
        return p;
    };
    double scale = 1.0;
    for (int k = 0; k < n; ++k)
        scale = std::max(scale, std::pow(std::abs(c[static_cast<size_t>(k)]), 1.0 / (n - k)));
    std::vector<Complex> z(static_cast<size_t>(n));
    const Complex seed{0.4, 0.9};
    Complex w{1.0, 0.0};
    for (int j = 0; j < n; ++j) {
        w *= seed;
        z[static_cast<size_t>(j)] = 1.3 * scale * w;
    }
    for (int it = 0; it < iters; ++it) {
        double moved = 0.0;
        for (int j = 0; j < n; ++j) {
            Complex denom{1.0, 0.0};
            for (int k = 0; k < n; ++k)
                if (k != j) denom *= z[static_cast<size_t>(j)] - z[static_cast<size_t>(k)];
            const Complex step = eval(z[static_cast<size_t>(j)]) / denom;
            z[static_cast<size_t>(j)] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14 * scale) break;
    }
    return z;
}

/// Greedy best-first multiset distance: repeatedly pairs the globally
/// closest remaining (a, b) and returns the largest paired distance.
inline double multiset_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    while (!a.empty()) {
        size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < a.size(); ++i)
            for (size_t j = 0; j < b.size(); ++j)
                if (std::abs(a[i] - b[j]) < best) {
                    best = std::abs(a[i] - b[j]);
                    bi = i;
                    bj = j;
                }
        worst = std::max(worst, best);
        a.erase(a.begin() + static_cast<long>(bi));
        b.erase(b.begin() + static_cast<long>(bj));
    }
    return worst;
}

inline Matrix random_complex_matrix(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex{gauss(rng), gauss(rng)};
    return m;
}

}  // namespace oracles
