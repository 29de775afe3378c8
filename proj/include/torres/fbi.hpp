#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "torres/grid.hpp"

namespace torres {

inline double jap(double xi) { return std::sqrt(1.0 + xi * xi); }

/// Finitely supported Fourier series sum_{|m| <= deg} c_m e^{i m y};
/// coefficient of mode m sits at index m + deg.
struct TrigPoly {
    Eigen::VectorXcd coeff;
    int deg = 0;

    static TrigPoly zero(int deg) {
        TrigPoly p;
        p.deg = deg;
        p.coeff = Eigen::VectorXcd::Zero(2 * deg + 1);
        return p;
    }
    static TrigPoly mode(int m) {
        TrigPoly p = zero(std::abs(m));
        p.coeff[m + p.deg] = 1.0;
        return p;
    }
    Complex operator()(double y) const {
        Complex acc{0.0, 0.0};
        for (int m = -deg; m <= deg; ++m) acc += coeff[m + deg] * std::exp(kI * (m * y));
        return acc;
    }
    TrigPoly translated(double s) const {
        TrigPoly p = *this;
        for (int m = -deg; m <= deg; ++m) p.coeff[m + deg] *= std::exp(-kI * (m * s));
        return p;
    }
    double l2_norm() const {
        // ||u||_{L^2(0,2pi)} = sqrt(2 pi) * ||c||_2
        return std::sqrt(2.0 * kPi) * coeff.norm();
    }
};

/// Quadrature layout of the phase-space transform: n_y trapezoid points in
/// y over [0, 2*pi), a symmetric xi grid [-xi_max, xi_max] with n_xi
/// points, and the periodization sum truncated at |k| <= k_max.
struct FbiConfig {
    double h = 0.1;
    int n_y = 96;
    int n_xi = 97;
    double xi_max = 6.0;
    int k_max = 3;

    void validate() const {
        if (!(h > 0.0)) throw std::invalid_argument("fbi: h must be positive");
        if (n_y < 16 || n_xi < 16) throw std::invalid_argument("fbi: n_y and n_xi must be >= 16");
        if (!(xi_max >= 4.0)) throw std::invalid_argument("fbi: xi_max must be >= 4");
        const double arg = 2.0 * kPi * k_max - 4.0 * kPi;
        if (!(arg > 0.0) || !(std::exp(-jap(xi_max) * arg * arg / (2.0 * h)) < 1e-16))
            throw std::invalid_argument("fbi: k_max too small for the periodization tail");
    }
};

/// Defaults calibrated by the quadrature convergence study (see
/// docs/calibration.md): resolve the xi-side Gaussian of width
/// sqrt(h*<xi>) with ~2.5 points and the y-side width sqrt(h/<xi>) with
/// ~2 points, and truncate xi where the transform of a degree <= max_degree
/// input has decayed far below the target tolerances.
inline FbiConfig default_fbi_config(double h, int max_degree) {
    FbiConfig cfg;
    cfg.h = h;
    const double peak = h * max_degree;
    cfg.xi_max = std::max(4.0, peak + 18.0 * std::sqrt(h * jap(peak)));
    cfg.n_xi = 2 * static_cast<int>(std::ceil(cfg.xi_max / (0.4 * std::sqrt(h)))) + 1;
    cfg.n_y = std::max(16, 2 * static_cast<int>(std::ceil(2.0 * kPi * std::sqrt(jap(cfg.xi_max) / h))));
    cfg.k_max = 3;
    cfg.validate();
    return cfg;
}

namespace detail {

/// exp(i w xi / h - <xi> w^2 / (2h)), the common phase factor of the
/// transform pair.
inline Complex gauss_phase(double w, double xi, double h) {
    return std::exp(Complex{-jap(xi) * w * w / (2.0 * h), w * xi / h});
}

inline Complex b_amplitude(double w, double xi) {
    const double j = jap(xi);
    return std::sqrt(2.0) * std::pow(2.0 * kPi, -1.5) * std::pow(j, 0.25) *
           (1.0 + Complex{0.0, 0.5} * w * xi / j);
}

inline RealVector xi_grid(const FbiConfig& cfg) {
    RealVector xs(cfg.n_xi);
    for (int j = 0; j < cfg.n_xi; ++j)
        xs[j] = -cfg.xi_max + 2.0 * cfg.xi_max * j / (cfg.n_xi - 1);
    return xs;
}

inline RealVector xi_weights(const FbiConfig& cfg) {
    const double dxi = 2.0 * cfg.xi_max / (cfg.n_xi - 1);
    RealVector w = RealVector::Constant(cfg.n_xi, dxi);
    w[0] *= 0.5;
    w[cfg.n_xi - 1] *= 0.5;
    return w;
}

inline RealVector y_grid(const FbiConfig& cfg) {
    RealVector ys(cfg.n_y);
    for (int r = 0; r < cfg.n_y; ++r) ys[r] = 2.0 * kPi * r / cfg.n_y;
    return ys;
}

}  // namespace detail

/// Periodized phase-space transform of u at one point:
///   T u(x, xi) = h^{-3/4} <xi>^{1/4} int sum_k
///                e^{(i/h)((x-y+2 pi k) xi + (i/2)<xi>(x-y+2 pi k)^2)} u(y) dy,
/// trapezoid quadrature in y.
inline Complex fbi_transform(const TrigPoly& u, const FbiConfig& cfg, double x, double xi) {
    const RealVector ys = detail::y_grid(cfg);
    Complex acc{0.0, 0.0};
    for (int r = 0; r < cfg.n_y; ++r) {
        Complex ker{0.0, 0.0};
        for (int k = -cfg.k_max; k <= cfg.k_max; ++k)
            ker += detail::gauss_phase(x - ys[r] + 2.0 * kPi * k, xi, cfg.h);
        acc += ker * u(ys[r]);
    }
    return std::pow(cfg.h, -0.75) * std::pow(jap(xi), 0.25) * acc * (2.0 * kPi / cfg.n_y);
}

/// Samples of a phase-space function on the config's (x, xi) grid; the x
/// grid coincides with the y quadrature grid.
struct PhaseSpaceGrid {
    RealVector xs;
    RealVector xis;
    Eigen::MatrixXcd values;  // (x index, xi index)
};

/// T u on the whole grid. The kernel depends on x - y only through the
/// difference index, so one kernel table per xi row serves all points.
inline PhaseSpaceGrid fbi_transform_grid(const TrigPoly& u, const FbiConfig& cfg) {
    cfg.validate();
    const RealVector ys = detail::y_grid(cfg);
    const RealVector xis = detail::xi_grid(cfg);
    const int m = cfg.n_y;
    Eigen::VectorXcd uy(m);
    for (int r = 0; r < m; ++r) uy[r] = u(ys[r]);
    PhaseSpaceGrid out;
    out.xs = ys;
    out.xis = xis;
    out.values.resize(m, cfg.n_xi);
    Eigen::VectorXcd table(m);
    for (int j = 0; j < cfg.n_xi; ++j) {
        const double xi = xis[j];
        for (int d = 0; d < m; ++d) {
            const double w = 2.0 * kPi * d / m;
            Complex ker{0.0, 0.0};
            for (int k = -cfg.k_max; k <= cfg.k_max; ++k)
                ker += detail::gauss_phase(w + 2.0 * kPi * k, xi, cfg.h);
            table[d] = ker;
        }
        const Complex pref =
            std::pow(cfg.h, -0.75) * std::pow(jap(xi), 0.25) * (2.0 * kPi / m);
        for (int i = 0; i < m; ++i) {
            Complex acc{0.0, 0.0};
            for (int r = 0; r < m; ++r) acc += table[(i - r + m) % m] * uy[r];
            out.values(i, j) = pref * acc;
        }
    }
    return out;
}

/// Left-inverse quadrature at one output point:
///   S v(y) = h^{-3/4} int int sum_k e^{(i/h) phi(y-x+2 pi k, xi)}
///            b(y-x+2 pi k, xi) v(x, xi) dx dxi,
/// with b(w, xi) = sqrt(2) (2 pi)^{-3/2} <xi>^{1/4} (1 + (i/2) w xi/<xi>).
inline Complex fbi_inverse(const PhaseSpaceGrid& v, const FbiConfig& cfg, double y) {
    const RealVector wxi = detail::xi_weights(cfg);
    const double dx = 2.0 * kPi / static_cast<double>(v.xs.size());
    Complex acc{0.0, 0.0};
    for (int j = 0; j < v.xis.size(); ++j) {
        const double xi = v.xis[j];
        Complex col{0.0, 0.0};
        for (int i = 0; i < v.xs.size(); ++i) {
            Complex ker{0.0, 0.0};
            for (int k = -cfg.k_max; k <= cfg.k_max; ++k) {
                const double w = y - v.xs[i] + 2.0 * kPi * k;
                ker += detail::gauss_phase(w, xi, cfg.h) * detail::b_amplitude(w, xi);
            }
            col += ker * v.values(i, j);
        }
        acc += wxi[j] * col;
    }
    return std::pow(cfg.h, -0.75) * acc * dx;
}

/// S v on the y quadrature grid, using per-xi kernel tables as in
/// fbi_transform_grid.
inline Eigen::VectorXcd fbi_inverse_grid(const PhaseSpaceGrid& v, const FbiConfig& cfg) {
    const RealVector wxi = detail::xi_weights(cfg);
    const int m = static_cast<int>(v.xs.size());
    const double dx = 2.0 * kPi / m;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(m);
    Eigen::VectorXcd table(m);
    for (int j = 0; j < v.xis.size(); ++j) {
        const double xi = v.xis[j];
        for (int d = 0; d < m; ++d) {
            Complex ker{0.0, 0.0};
            for (int k = -cfg.k_max; k <= cfg.k_max; ++k) {
                const double w = 2.0 * kPi * d / m + 2.0 * kPi * k;
                ker += detail::gauss_phase(w, xi, cfg.h) * detail::b_amplitude(w, xi);
            }
            table[d] = ker;
        }
        for (int l = 0; l < m; ++l) {
            Complex acc{0.0, 0.0};
            for (int i = 0; i < m; ++i) acc += table[(l - i + m) % m] * v.values(i, j);
            out[l] += wxi[j] * acc;
        }
    }
    return std::pow(cfg.h, -0.75) * dx * out;
}

struct InversionReport {
    double rel_error = 0.0;
    FbiConfig cfg;
};

/// Relative L2 error of S(T u) against u on the y grid.
inline InversionReport check_inversion(const TrigPoly& u, const FbiConfig& cfg) {
    const PhaseSpaceGrid v = fbi_transform_grid(u, cfg);
    const Eigen::VectorXcd stu = fbi_inverse_grid(v, cfg);
    const RealVector ys = detail::y_grid(cfg);
    Eigen::VectorXcd uy(cfg.n_y);
    for (int r = 0; r < cfg.n_y; ++r) uy[r] = u(ys[r]);
    InversionReport rep;
    rep.cfg = cfg;
    rep.rel_error = (stu - uy).norm() / std::max(uy.norm(), 1e-300);
    return rep;
}

struct LebeauParams {
    double y_halfwidth = 4.0;
    int n_y = 800;
    int n_xi = 400;
    double xi_max = 16.0;
};

struct LebeauReport {
    double rel_error = 0.0;
    Complex value_center{0.0, 0.0};
    Complex want_center{0.0, 0.0};
};

/// Direct 2D quadrature of the reproducing identity
///   u(x) = (2 pi h)^{-1} int int e^{(i/h)(x-y)(xi + i a <xi>(x-y))}
///          (1 + i a (x-y) xi/<xi>) u(y) dy dxi,  a > 0,
/// for u(y) = p(y) * exp(-(y-center)^2/(2 sigma^2)), evaluated at the
/// window center and one sigma to each side.
inline LebeauReport check_lebeau(const TrigPoly& p, double center, double sigma, double h,
                                 double a, const LebeauParams& par = {}) {
    if (!(a > 0.0)) throw std::invalid_argument("check_lebeau: a must be positive");
    auto u = [&](double y) { return p(y) * std::exp(-(y - center) * (y - center) / (2.0 * sigma * sigma)); };
    const int ny = par.n_y, nxi = par.n_xi;
    std::vector<double> ys(static_cast<size_t>(ny)), wy(static_cast<size_t>(ny));
    for (int r = 0; r < ny; ++r) {
        ys[static_cast<size_t>(r)] = center - par.y_halfwidth + 2.0 * par.y_halfwidth * r / (ny - 1);
        wy[static_cast<size_t>(r)] = 2.0 * par.y_halfwidth / (ny - 1);
    }
    wy.front() *= 0.5;
    wy.back() *= 0.5;
    std::vector<double> xis(static_cast<size_t>(nxi)), wxi(static_cast<size_t>(nxi));
    for (int j = 0; j < nxi; ++j) {
        xis[static_cast<size_t>(j)] = -par.xi_max + 2.0 * par.xi_max * j / (nxi - 1);
        wxi[static_cast<size_t>(j)] = 2.0 * par.xi_max / (nxi - 1);
    }
    wxi.front() *= 0.5;
    wxi.back() *= 0.5;

    auto reproduce = [&](double x) {
        Complex acc{0.0, 0.0};
        for (int j = 0; j < nxi; ++j) {
            const double xi = xis[static_cast<size_t>(j)];
            const double jx = jap(xi);
            Complex inner{0.0, 0.0};
            for (int r = 0; r < ny; ++r) {
                const double w = x - ys[static_cast<size_t>(r)];
                const Complex phase =
                    std::exp(Complex{-a * jx * w * w / h, w * xi / h});
                inner += wy[static_cast<size_t>(r)] * phase *
                         (1.0 + Complex{0.0, a} * w * xi / jx) * u(ys[static_cast<size_t>(r)]);
            }
            acc += wxi[static_cast<size_t>(j)] * inner;
        }
        return acc / (2.0 * kPi * h);
    };

    LebeauReport rep;
    double worst = 0.0;
    for (double x : {center, center - sigma, center + sigma}) {
        const Complex got = reproduce(x);
        const Complex want = u(x);
        if (x == center) {
            rep.value_center = got;
            rep.want_center = want;
        }
        const double denom = std::max(std::abs(want), 1e-300);
        if (std::abs(want) > 1e-12)
            worst = std::max(worst, std::abs(got - want) / denom);
        else
            worst = std::max(worst, std::abs(got));
    }
    rep.rel_error = worst;
    return rep;
}

}  // namespace torres
