#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "torres/expr.hpp"

namespace torres {

/// A Fourier multiplier V(xi) with Gaussian decay on the real axis:
/// |V(xi)| <= tail_scale * exp(-tail_c * xi^2).
///
/// The decay constants drive the truncation of the k-sums in the operator
/// assembly; tail_bound_holds() checks them on a sampled interval.
struct MultiplierFn {
    std::function<double(double)> eval;
    double tail_c = 0.5;
    double tail_scale = 1.0;
    std::string text;

    double operator()(double xi) const { return eval(xi); }
};

inline bool tail_bound_holds(const MultiplierFn& v, double xi_max = 100.0, int samples = 4001) {
    for (int i = 0; i < samples; ++i) {
        const double xi = -xi_max + 2.0 * xi_max * i / (samples - 1);
        if (!(std::abs(v.eval(xi)) <= v.tail_scale * std::exp(-v.tail_c * xi * xi) + 1e-300))
            return false;
    }
    return true;
}

/// Operator family on the torus determined by two multipliers:
/// the full symbol is
///
///   p(x1, xi1, xi2) = xi2/<xi> + 2 sin(x1) (1 - v_m(xi1)) + v_a(xi1),
///
/// with <xi> = sqrt(1 + xi1^2 + xi2^2). The factor 2 is the principal
/// symbol of the symmetrized product sin * (1 - v_m) + (1 - v_m) * sin.
struct SymbolFamily {
    MultiplierFn v_a;
    MultiplierFn v_m;
    std::string name;
};

inline double eval_symbol(const SymbolFamily& s, double x1, double xi1, double xi2) {
    const double jap = std::sqrt(1.0 + xi1 * xi1 + xi2 * xi2);
    return xi2 / jap + 2.0 * std::sin(x1) * (1.0 - s.v_m(xi1)) + s.v_a(xi1);
}

/// The two built-in families. "fig1" has
///   v_a(xi) = (xi^3 - 1)/2 * exp(-xi^2),
///   v_m(xi) = (1 + (e-1)(xi-2)^2) * exp(-(xi-2)^2);
/// "fig2" has v_a = 0 and v_m(xi) = ((1 - xi^2) + e xi^2) * exp(-xi^2),
/// which pins 1 - v_m to vanish at xi = 0, +-1 and so produces an exact
/// eigenvalue at 0 on the constant state.
inline SymbolFamily builtin_symbol(std::string_view name) {
    const double e1 = std::exp(1.0);
    if (name == "fig1") {
        SymbolFamily s;
        s.name = "fig1";
        s.v_a = {[](double xi) { return 0.5 * (xi * xi * xi - 1.0) * std::exp(-xi * xi); },
                 0.5, 1.0, "0.5*(xi^3-1)*exp(-xi^2)"};
        s.v_m = {[e1](double xi) {
                     const double t = xi - 2.0;
                     return (1.0 + (e1 - 1.0) * t * t) * std::exp(-t * t);
                 },
                 0.25, 12.0, "(1+(e-1)*(xi-2)^2)*exp(-(xi-2)^2)"};
        return s;
    }
    if (name == "fig2") {
        SymbolFamily s;
        s.name = "fig2";
        s.v_a = {[](double) { return 0.0; }, 1.0, 0.0, "0"};
        s.v_m = {[e1](double xi) {
                     const double q = xi * xi;
                     return ((1.0 - q) + e1 * q) * std::exp(-q);
                 },
                 0.5, 2.0, "((1-xi^2)+e*xi^2)*exp(-xi^2)"};
        return s;
    }
    throw std::invalid_argument("builtin_symbol: unknown name '" + std::string(name) + "'");
}

/// Builds a multiplier from a config expression in the variable "xi".
/// The decay constant is fixed conservatively at 1/4 and the scale is
/// fitted on a sample; expressions without a Gaussian tail are rejected.
inline MultiplierFn multiplier_from_expression(std::string_view text) {
    auto expr = std::make_shared<Expression>(Expression::parse(text, "xi"));
    MultiplierFn v;
    v.eval = [expr](double xi) { return (*expr)(xi); };
    v.tail_c = 0.25;
    v.text = std::string(text);
    // Fit the scale on [-40, 40] (exp(c*xi^2) stays finite there), then the
    // full-range check below covers the rest.
    double scale = 0.0;
    for (int i = 0; i <= 1600; ++i) {
        const double xi = -40.0 + 0.05 * i;
        scale = std::max(scale, std::abs(v.eval(xi)) * std::exp(v.tail_c * xi * xi));
    }
    if (!(scale < 1e6))
        throw std::invalid_argument("multiplier '" + v.text +
                                    "' does not satisfy a Gaussian tail bound");
    v.tail_scale = std::max(scale * 1.25, 1e-30);
    if (!tail_bound_holds(v))
        throw std::invalid_argument("multiplier '" + v.text +
                                    "' does not satisfy a Gaussian tail bound");
    return v;
}

inline SymbolFamily symbol_from_expressions(std::string_view v_a, std::string_view v_m) {
    SymbolFamily s;
    s.name = "custom";
    s.v_a = multiplier_from_expression(v_a);
    s.v_m = multiplier_from_expression(v_m);
    return s;
}

}  // namespace torres
