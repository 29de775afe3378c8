#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "torres/deformation.hpp"

using namespace torres;

TEST_CASE("contour points", "[deformation]") {
    const DeformationSpec d0 = default_deformation(0.0);
    for (double x = 0.0; x < 2 * kPi; x += 0.3) REQUIRE(d0.contour(x) == Complex{x, 0.0});

    const DeformationSpec d = default_deformation(0.8);
    REQUIRE(std::abs(d.contour(0.0) - Complex{0.0, -1.6}) < 1e-15);
    REQUIRE(std::abs(d.contour(kPi / 2) - Complex{kPi / 2, 0.0}) < 1e-15);
}

TEST_CASE("contour derivative", "[deformation]") {
    const DeformationSpec d0 = default_deformation(0.0);
    REQUIRE(d0.contour_derivative(1.234) == Complex{1.0, 0.0});
    const DeformationSpec d = default_deformation(0.8);
    REQUIRE(std::abs(d.contour_derivative(kPi / 2) - Complex{1.0, 1.6}) < 1e-14);
    for (double th : {0.0, 0.3, 0.8, 2.0}) {
        const DeformationSpec dd = default_deformation(th);
        for (double x = 0.0; x < 2 * kPi; x += 0.05)
            REQUIRE(std::abs(dd.contour_derivative(x)) >= 1.0);
    }
}

TEST_CASE("contours agree at zeros of the field for every theta", "[deformation]") {
    for (double x : {kPi / 2, 3 * kPi / 2}) {
        const Complex a = default_deformation(0.3).contour(x);
        const Complex b = default_deformation(1.1).contour(x);
        REQUIRE(std::abs(a - b) < 1e-15);
    }
}

TEST_CASE("expression-backed fields are checked for periodicity", "[deformation]") {
    REQUIRE_NOTHROW(deformation_from_expression(0.5, "-2*cos(x)"));
    REQUIRE_NOTHROW(deformation_from_expression(0.5, "sin(2*x) + 0.25*cos(x)"));
    REQUIRE_THROWS_AS(deformation_from_expression(0.5, "x"), std::invalid_argument);
    const DeformationSpec d = deformation_from_expression(0.8, "-2*cos(x)");
    const DeformationSpec ref = default_deformation(0.8);
    for (double x = 0.0; x < 2 * kPi; x += 0.21) {
        REQUIRE(std::abs(d.contour(x) - ref.contour(x)) < 1e-13);
        REQUIRE(std::abs(d.contour_derivative(x) - ref.contour_derivative(x)) < 1e-13);
    }
}

TEST_CASE("deformed phase-space points and the weight", "[deformation]") {
    using V2 = Eigen::Vector2d;
    // G == 0: nothing moves
    EscapeFunction zero{[](const V2&, const V2&) { return 0.0; },
                        [](const V2&, const V2&) { return V2{0, 0}; },
                        [](const V2&, const V2&) { return V2{0, 0}; }};
    GeometrySample s = deformed_point(zero, V2{1.0, 2.0}, V2{3.0, -1.0});
    REQUIRE(s.z[0] == Complex{1.0, 0.0});
    REQUIRE(s.zeta[1] == Complex{-1.0, 0.0});
    REQUIRE(s.h_weight == 0.0);

    // G linear in xi: the weight vanishes identically
    const EscapeFunction lin = escape_from_deformation(default_deformation(0.7));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const V2 x{u(rng) + kPi, u(rng)};
        const V2 xi{u(rng), u(rng)};
        const GeometrySample gs = deformed_point(lin, x, xi);
        REQUIRE(std::abs(gs.h_weight) < 1e-14);
        REQUIRE(gs.z[0] == Complex{x[0], -2.0 * std::cos(x[0])});
        REQUIRE(gs.zeta[0].imag() == Catch::Approx(-2.0 * std::sin(x[0]) * xi[0]).margin(1e-12));
    }

    // G = |xi| is 1-homogeneous: weight 0 away from the origin
    EscapeFunction norm{[](const V2&, const V2& xi) { return xi.norm(); },
                        [](const V2&, const V2&) { return V2{0, 0}; },
                        [](const V2&, const V2& xi) { return V2(xi / xi.norm()); }};
    REQUIRE(deformed_point(norm, V2{0, 0}, V2{1, 0}).h_weight == Catch::Approx(0.0).margin(1e-15));

    // G = xi1^2: weight -xi1^2
    EscapeFunction quad{[](const V2&, const V2& xi) { return xi[0] * xi[0]; },
                        [](const V2&, const V2&) { return V2{0, 0}; },
                        [](const V2&, const V2& xi) { return V2{2 * xi[0], 0}; }};
    for (double xi1 : {0.5, -1.25, 3.0})
        REQUIRE(deformed_point(quad, V2{0, 0}, V2{xi1, 0.7}).h_weight ==
                Catch::Approx(-xi1 * xi1));
}

namespace {

double hand_vm_prime(const std::string& name, double xi) {
    const double e1 = std::exp(1.0);
    if (name == "fig1") {
        const double t = xi - 2.0;
        return 2.0 * t * std::exp(-t * t) * ((e1 - 2.0) - (e1 - 1.0) * t * t);
    }
    return 2.0 * xi * std::exp(-xi * xi) * ((e1 - 2.0) - (e1 - 1.0) * xi * xi);
}

double hand_va_prime(const std::string& name, double xi) {
    if (name == "fig2") return 0.0;
    return 0.5 * std::exp(-xi * xi) * (3.0 * xi * xi - 2.0 * xi * xi * xi * xi + 2.0 * xi);
}

// Analytically differentiated bracket for the built-ins, used to
// cross-check the finite-difference route.
double hand_bracket(const SymbolFamily& s, const DeformationSpec& d, double x, double xi1,
                    double xi2) {
    const double jap3 = std::pow(1.0 + xi1 * xi1 + xi2 * xi2, 1.5);
    const double dpdx = 2.0 * std::cos(x) * (1.0 - s.v_m(xi1));
    const double dpdxi1 = -xi2 * xi1 / jap3 - 2.0 * std::sin(x) * hand_vm_prime(s.name, xi1) +
                          hand_va_prime(s.name, xi1);
    return dpdxi1 * (d.g0_prime(x) * xi1) - dpdx * d.g0(x);
}

}  // namespace

TEST_CASE("finite-difference bracket matches the analytic one", "[deformation]") {
    const DeformationSpec d = default_deformation(0.8);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 2 * kPi), uxi(-8.0, 8.0);
    const double fd = 1e-5;
    for (const char* name : {"fig1", "fig2"}) {
        const SymbolFamily s = builtin_symbol(name);
        for (int i = 0; i < 100; ++i) {
            const double x = ux(rng), xi1 = uxi(rng), xi2 = uxi(rng);
            const double dpdx =
                (eval_symbol(s, x + fd, xi1, xi2) - eval_symbol(s, x - fd, xi1, xi2)) / (2 * fd);
            const double dpdxi1 =
                (eval_symbol(s, x, xi1 + fd, xi2) - eval_symbol(s, x, xi1 - fd, xi2)) / (2 * fd);
            const double num = dpdxi1 * (d.g0_prime(x) * xi1) - dpdx * d.g0(x);
            REQUIRE(num == Catch::Approx(hand_bracket(s, d, x, xi1, xi2)).margin(1e-6));
        }
    }
}

TEST_CASE("escape condition on the sampled characteristic set", "[deformation][escape]") {
    const DeformationSpec d = default_deformation(0.8);
    const SymbolFamily f1 = builtin_symbol("fig1");
    const SymbolFamily f2 = builtin_symbol("fig2");

    SECTION("fig2 passes in the ball region") {
        const EscapeReport r = verify_escape(f2, d, 40.0, 10.0, 0.05, EscapeRegion::Ball);
        REQUIRE_FALSE(r.empty_sample);
        REQUIRE(r.ok);
        REQUIRE(r.min_hpg == Catch::Approx(3.0).margin(0.15));
    }
    SECTION("fig1 fails in the ball region: the multipliers survive along xi2") {
        const EscapeReport r = verify_escape(f1, d, 40.0, 10.0, 0.05, EscapeRegion::Ball);
        REQUIRE_FALSE(r.empty_sample);
        REQUIRE_FALSE(r.ok);
        REQUIRE(r.min_hpg < -0.4);
        REQUIRE(r.min_hpg > -0.8);
        REQUIRE(std::abs(r.argmin_xi1) < 1.0);  // pinned at bounded xi1, large |xi2|
    }
    SECTION("both pass in the cylinder region used by the per-mode family") {
        for (const SymbolFamily* s : {&f1, &f2}) {
            const EscapeReport r = verify_escape(*s, d, 40.0, 10.0, 0.05, EscapeRegion::Cylinder);
            REQUIRE(r.ok);
            REQUIRE(r.min_hpg == Catch::Approx(3.06).margin(0.1));
        }
    }
    SECTION("the bare mode term gives a vanishing bracket") {
        SymbolFamily bare;
        bare.name = "bare";
        bare.v_a = {[](double) { return 0.0; }, 1.0, 0.0, "0"};
        bare.v_m = {[](double) { return 1.0; }, 1e-9, 1.0, "1"};  // kills the sine term
        const EscapeReport r = verify_escape(bare, d, 40.0, 10.0, 0.05, EscapeRegion::Ball);
        REQUIRE_FALSE(r.empty_sample);
        REQUIRE_FALSE(r.ok);
        REQUIRE(std::abs(r.min_hpg) < 1e-6);
    }
    SECTION("tol = 0 yields a distinct empty-sample report") {
        const EscapeReport r = verify_escape(f2, d, 40.0, 10.0, 0.0, EscapeRegion::Ball);
        REQUIRE(r.empty_sample);
        REQUIRE_FALSE(r.ok);
    }
    SECTION("xi_max must exceed the cutoff") {
        REQUIRE_THROWS_AS(verify_escape(f2, d, 5.0, 10.0, 0.05), std::invalid_argument);
    }
}
