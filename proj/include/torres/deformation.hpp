#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "torres/expr.hpp"
#include "torres/grid.hpp"
#include "torres/symbols.hpp"

namespace torres {

/// Contour deformation of the circle: the deformed contour is
/// { x + i*theta*g0(x) : x in [0, 2*pi) }, with g0 a 2*pi-periodic real
/// field. The default field g0(x) = -2*cos(x) keeps |contour derivative|
/// >= 1 for every theta >= 0.
struct DeformationSpec {
    double theta = 0.0;
    std::function<double(double)> g0;
    std::function<double(double)> g0_prime;
    std::string g0_text;

    Complex contour(double x) const { return Complex{x, theta * g0(x)}; }
    Complex contour_derivative(double x) const { return Complex{1.0, theta * g0_prime(x)}; }
};

inline DeformationSpec default_deformation(double theta) {
    if (theta < 0.0) throw std::invalid_argument("deformation: theta must be >= 0");
    DeformationSpec d;
    d.theta = theta;
    d.g0 = [](double x) { return -2.0 * std::cos(x); };
    d.g0_prime = [](double x) { return 2.0 * std::sin(x); };
    d.g0_text = "-2*cos(x)";
    return d;
}

/// Field supplied as an expression in "x"; the derivative is obtained by
/// differentiating the parsed form. Periodicity is checked on a sample.
inline DeformationSpec deformation_from_expression(double theta, std::string_view g0_text) {
    if (theta < 0.0) throw std::invalid_argument("deformation: theta must be >= 0");
    auto g = std::make_shared<Expression>(Expression::parse(g0_text, "x"));
    auto gp = std::make_shared<Expression>(g->derivative());
    for (int i = 0; i < 64; ++i) {
        const double x = 2.0 * kPi * i / 64.0;
        if (std::abs((*g)(x + 2.0 * kPi) - (*g)(x)) > 1e-12)
            throw std::invalid_argument("deformation field '" + std::string(g0_text) +
                                        "' is not 2*pi-periodic");
    }
    DeformationSpec d;
    d.theta = theta;
    d.g0 = [g](double x) { return (*g)(x); };
    d.g0_prime = [gp](double x) { return (*gp)(x); };
    d.g0_text = std::string(g0_text);
    return d;
}

/// Escape function G(x, xi) on the 2-torus phase space, with exact
/// gradient evaluators.
struct EscapeFunction {
    std::function<double(const Eigen::Vector2d&, const Eigen::Vector2d&)> value;
    std::function<Eigen::Vector2d(const Eigen::Vector2d&, const Eigen::Vector2d&)> grad_x;
    std::function<Eigen::Vector2d(const Eigen::Vector2d&, const Eigen::Vector2d&)> grad_xi;
};

/// G(x, xi) = <(g0(x1), 0), xi> = g0(x1) * xi1, the form every physical
/// deformation takes here.
inline EscapeFunction escape_from_deformation(const DeformationSpec& d) {
    EscapeFunction g;
    g.value = [d](const Eigen::Vector2d& x, const Eigen::Vector2d& xi) {
        return d.g0(x[0]) * xi[0];
    };
    g.grad_x = [d](const Eigen::Vector2d& x, const Eigen::Vector2d& xi) {
        return Eigen::Vector2d{d.g0_prime(x[0]) * xi[0], 0.0};
    };
    g.grad_xi = [d](const Eigen::Vector2d& x, const Eigen::Vector2d&) {
        return Eigen::Vector2d{d.g0(x[0]), 0.0};
    };
    return g;
}

/// One point of the deformed phase space: (x + i G_xi, xi - i G_x),
/// together with the weight H = G - xi . G_xi. H vanishes identically
/// whenever G is linear in xi.
struct GeometrySample {
    Eigen::Vector2d x;
    Eigen::Vector2d xi;
    Eigen::Vector2cd z;
    Eigen::Vector2cd zeta;
    double h_weight = 0.0;
};

inline GeometrySample deformed_point(const EscapeFunction& g, const Eigen::Vector2d& x,
                                     const Eigen::Vector2d& xi) {
    GeometrySample s;
    s.x = x;
    s.xi = xi;
    const Eigen::Vector2d gx = g.grad_x(x, xi);
    const Eigen::Vector2d gxi = g.grad_xi(x, xi);
    for (int j = 0; j < 2; ++j) {
        s.z[j] = Complex{x[j], gxi[j]};
        s.zeta[j] = Complex{xi[j], -gx[j]};
    }
    s.h_weight = g.value(x, xi) - xi.dot(gxi);
    return s;
}

/// Region over which the escape condition is sampled. Ball restricts the
/// full frequency norm; Cylinder restricts only |xi1|, which is what the
/// per-mode reduction actually uses (xi2 plays the role of the mode index
/// and the deformation never acts on it).
enum class EscapeRegion { Ball, Cylinder };

struct EscapeReport {
    double min_hpg = std::numeric_limits<double>::infinity();
    bool ok = false;
    bool empty_sample = false;
    long samples = 0;
    double argmin_x = 0.0, argmin_xi1 = 0.0, argmin_xi2 = 0.0;
};

/// Samples {|p| < tol} intersected with the region c_cut < |xi| <= xi_max
/// and returns the minimum of the Poisson bracket H_p G, computed with
/// central finite differences of step 1e-5 in p and exact derivatives of
/// G. ok means the minimum is strictly positive.
inline EscapeReport verify_escape(const SymbolFamily& s, const DeformationSpec& d, double xi_max,
                                  double c_cut, double tol,
                                  EscapeRegion region = EscapeRegion::Ball, int nx = 181,
                                  int nxi = 321) {
    if (!(xi_max > c_cut))
        throw std::invalid_argument("verify_escape: xi_max must exceed the inner cutoff");
    const double fd = 1e-5;
    EscapeReport rep;
    for (int ix = 0; ix < nx; ++ix) {
        const double x = 2.0 * kPi * ix / nx;
        const double g0x = d.g0(x);
        const double g0px = d.g0_prime(x);
        for (int i1 = 0; i1 < nxi; ++i1) {
            const double xi1 = -xi_max + 2.0 * xi_max * i1 / (nxi - 1);
            if (region == EscapeRegion::Cylinder &&
                !(std::abs(xi1) > c_cut && std::abs(xi1) <= xi_max))
                continue;
            for (int i2 = 0; i2 < nxi; ++i2) {
                const double xi2 = -xi_max + 2.0 * xi_max * i2 / (nxi - 1);
                if (region == EscapeRegion::Ball) {
                    const double r2 = xi1 * xi1 + xi2 * xi2;
                    if (!(r2 > c_cut * c_cut && r2 <= xi_max * xi_max)) continue;
                }
                if (std::abs(eval_symbol(s, x, xi1, xi2)) >= tol) continue;
                ++rep.samples;
                const double dpdx =
                    (eval_symbol(s, x + fd, xi1, xi2) - eval_symbol(s, x - fd, xi1, xi2)) /
                    (2.0 * fd);
                const double dpdxi1 =
                    (eval_symbol(s, x, xi1 + fd, xi2) - eval_symbol(s, x, xi1 - fd, xi2)) /
                    (2.0 * fd);
                // G = g0(x1) xi1: dG/dx1 = g0' xi1, dG/dxi1 = g0; the xi2
                // components of the bracket vanish.
                const double hpg = dpdxi1 * (g0px * xi1) - dpdx * g0x;
                if (hpg < rep.min_hpg) {
                    rep.min_hpg = hpg;
                    rep.argmin_x = x;
                    rep.argmin_xi1 = xi1;
                    rep.argmin_xi2 = xi2;
                }
            }
        }
    }
    if (rep.samples == 0) {
        rep.empty_sample = true;
        rep.min_hpg = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }
    rep.ok = rep.min_hpg > 0.0;
    return rep;
}

}  // namespace torres
