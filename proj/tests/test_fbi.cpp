#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "torres/fbi.hpp"

using namespace torres;

namespace {

// Closed-form transform of a single mode on the line (the periodization
// reassembles exactly this):
//   T e^{imy}(x, xi) = sqrt(2 pi) h^{-1/4} <xi>^{-1/4} e^{imx}
//                      exp(-(xi - h m)^2 / (2 h <xi>)).
Complex mode_transform(int m, double h, double x, double xi) {
    const double j = jap(xi);
    const double gauss = std::exp(-(xi - h * m) * (xi - h * m) / (2.0 * h * j));
    return std::sqrt(2.0 * kPi) * std::pow(h, -0.25) * std::pow(j, -0.25) *
           std::exp(kI * (m * x)) * gauss;
}

TrigPoly random_poly(int deg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    TrigPoly p = TrigPoly::zero(deg);
    for (int m = -deg; m <= deg; ++m) p.coeff[m + deg] = Complex{gauss(rng), gauss(rng)};
    return p;
}

}  // namespace

TEST_CASE("config invariants", "[fbi]") {
    FbiConfig cfg = default_fbi_config(0.1, 5);
    REQUIRE_NOTHROW(cfg.validate());
    FbiConfig bad = cfg;
    bad.n_y = 8;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.xi_max = 2.0;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.k_max = 2;  // periodization tail bound needs the strict inequality
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.h = 0.0;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("transform of single modes matches the closed form", "[fbi]") {
    const FbiConfig cfg = default_fbi_config(0.1, 5);
    for (int m : {0, 1, 3, -4}) {
        const TrigPoly u = TrigPoly::mode(m);
        for (double x : {0.0, 1.1, 4.0}) {
            for (double xi : {0.0, 0.3, 1.0, -2.0}) {
                const Complex got = fbi_transform(u, cfg, x, xi);
                const Complex want = mode_transform(m, cfg.h, x, xi);
                if (std::abs(want) > 1e-12)
                    REQUIRE(std::abs(got - want) / std::abs(want) < 1e-10);
                else
                    REQUIRE(std::abs(got) < 1e-10);
            }
        }
    }
}

TEST_CASE("transform concentrates at xi = h m", "[fbi]") {
    const FbiConfig cfg = default_fbi_config(0.1, 5);
    const int m = 3;
    const PhaseSpaceGrid v = fbi_transform_grid(TrigPoly::mode(m), cfg);
    int arg = 0;
    double best = 0.0;
    for (int j = 0; j < cfg.n_xi; ++j) {
        const double a = std::abs(v.values(0, j));
        if (a > best) {
            best = a;
            arg = j;
        }
    }
    REQUIRE(std::abs(v.xis[arg] - cfg.h * m) < 0.2);
}

TEST_CASE("gaussian decay of the constant's transform in xi", "[fbi]") {
    const FbiConfig cfg = default_fbi_config(0.1, 5);
    const TrigPoly one = TrigPoly::mode(0);
    double prev = std::abs(fbi_transform(one, cfg, 0.7, 0.0));
    for (double xi : {1.0, 2.0, 3.0, 4.0}) {
        const double cur = std::abs(fbi_transform(one, cfg, 0.7, xi));
        REQUIRE(cur < prev);
        prev = cur;
    }
    REQUIRE(std::abs(fbi_transform(one, cfg, 0.7, 4.0)) <
            1e-8 * std::abs(fbi_transform(one, cfg, 0.7, 0.0)));
}

TEST_CASE("linearity and translation covariance", "[fbi]") {
    const FbiConfig cfg = default_fbi_config(0.1, 3);
    const TrigPoly u = random_poly(3, 11);
    const TrigPoly v = random_poly(3, 12);
    TrigPoly sum = TrigPoly::zero(3);
    sum.coeff = u.coeff + v.coeff;
    for (double x : {0.3, 2.0}) {
        for (double xi : {-0.8, 0.0, 0.5}) {
            const Complex a = fbi_transform(sum, cfg, x, xi);
            const Complex b = fbi_transform(u, cfg, x, xi) + fbi_transform(v, cfg, x, xi);
            REQUIRE(std::abs(a - b) < 1e-13 * (1.0 + std::abs(a)));
        }
    }
    const double s = 0.9;
    const TrigPoly shifted = u.translated(s);
    for (double x : {0.3, 2.0}) {
        for (double xi : {-0.8, 0.5}) {
            const Complex a = fbi_transform(shifted, cfg, x, xi);
            const Complex b = fbi_transform(u, cfg, x - s, xi);
            REQUIRE(std::abs(a - b) < 1e-12 * (1.0 + std::abs(b)));
        }
    }
}

TEST_CASE("grid evaluation agrees with the pointwise operator", "[fbi]") {
    FbiConfig cfg = default_fbi_config(0.1, 2);
    cfg.n_y = 48;
    cfg.n_xi = 49;  // coarse on purpose; both paths share the quadrature
    const TrigPoly u = random_poly(2, 5);
    const PhaseSpaceGrid v = fbi_transform_grid(u, cfg);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.n_y));
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.n_xi));
        const Complex want = fbi_transform(u, cfg, v.xs[i], v.xis[j]);
        REQUIRE(std::abs(v.values(i, j) - want) < 1e-12 * (1.0 + std::abs(want)));
    }
    const Eigen::VectorXcd stu = fbi_inverse_grid(v, cfg);
    for (int t = 0; t < 5; ++t) {
        const int l = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.n_y));
        const Complex want = fbi_inverse(v, cfg, v.xs[l]);
        REQUIRE(std::abs(stu[l] - want) < 1e-12 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("inversion identity on the calibrated grids", "[fbi][inversion]") {
    const FbiConfig cfg = default_fbi_config(0.1, 5);
    SECTION("constant") {
        REQUIRE(check_inversion(TrigPoly::mode(0), cfg).rel_error <= 1e-3);
    }
    SECTION("single oscillation") {
        REQUIRE(check_inversion(TrigPoly::mode(1), cfg).rel_error <= 1e-3);
    }
    SECTION("degree-5 polynomial, with refinement monotonicity") {
        const TrigPoly u = random_poly(5, 77);
        const double base = check_inversion(u, cfg).rel_error;
        REQUIRE(base <= 1e-3);
        FbiConfig fine = cfg;
        fine.n_y *= 2;
        fine.n_xi = 2 * fine.n_xi - 1;
        const double refined = check_inversion(u, fine).rel_error;
        REQUIRE(refined <= base + 1e-15);
    }
    SECTION("zero input returns zero") {
        const TrigPoly z = TrigPoly::zero(2);
        const PhaseSpaceGrid v = fbi_transform_grid(z, cfg);
        REQUIRE(v.values.norm() == 0.0);
        REQUIRE(std::abs(fbi_inverse(v, cfg, 1.0)) == 0.0);
    }
}

TEST_CASE("inverse of a real input's transform is real", "[fbi][inversion]") {
    const FbiConfig cfg = default_fbi_config(0.1, 3);
    TrigPoly u = TrigPoly::zero(2);
    // real function: cos(y) + 0.3 cos(2y) + 0.1 sin(2y) + 0.7
    u.coeff[2] = 0.7;
    u.coeff[3] = 0.5;
    u.coeff[1] = 0.5;
    u.coeff[4] = Complex{0.15, -0.05};
    u.coeff[0] = Complex{0.15, 0.05};
    const PhaseSpaceGrid v = fbi_transform_grid(u, cfg);
    const Eigen::VectorXcd stu = fbi_inverse_grid(v, cfg);
    REQUIRE(stu.imag().cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("reproducing identity for a windowed bump", "[fbi][lebeau]") {
    SECTION("two values of a, both reproduce the bump") {
        const double r1 = check_lebeau(TrigPoly::mode(0), kPi, 0.5, 0.1, 0.25).rel_error;
        const double r2 = check_lebeau(TrigPoly::mode(0), kPi, 0.5, 0.1, 1.0).rel_error;
        REQUIRE(r1 <= 1e-2);
        REQUIRE(r2 <= 1e-2);
        REQUIRE(std::abs(r1 - r2) <= 1e-6);  // a-independence at quadrature tolerance
    }
    SECTION("oscillating windowed input") {
        REQUIRE(check_lebeau(TrigPoly::mode(2), kPi, 0.5, 0.1, 0.5).rel_error <= 1e-2);
    }
    SECTION("zero input reproduces exactly") {
        const TrigPoly z = TrigPoly::zero(1);
        REQUIRE(check_lebeau(z, kPi, 0.5, 0.1, 0.5).rel_error == 0.0);
    }
    SECTION("a must be positive") {
        REQUIRE_THROWS_AS(check_lebeau(TrigPoly::mode(0), kPi, 0.5, 0.1, 0.0),
                          std::invalid_argument);
    }
}
