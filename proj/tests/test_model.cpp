#include "doctest.h"
#include "oracles.hpp"

#include "xxz/model.hpp"

#include <cstring>
#include <limits>
#include <random>

using namespace xxz;

namespace {

ModelParams<double> fig1(double theta)
{
    return ModelParams<double>{1.0, 0.1, theta, 100.0, 10.0, 1.0};
}

} // namespace

TEST_SUITE("model")
{
    TEST_CASE("coefficients at the bright reference point")
    {
        const auto k = compute_coefficients(fig1(0.1));
        // 40-digit evaluations of the closed forms.
        CHECK(k.c0 == doctest::Approx(1.000498335553969).epsilon(1e-14));
        CHECK(k.c1 == doctest::Approx(0.09850499333809312).epsilon(1e-14));
        CHECK(k.c2 == doctest::Approx(0.004966733269876530).epsilon(1e-14));
        CHECK(k.c3 == doctest::Approx(0.0002491677769844796).epsilon(1e-13));
        CHECK(k.V == doctest::Approx(101.9700998667619).epsilon(1e-14));
        CHECK(k.chi == doctest::Approx(101.9700998667619).epsilon(1e-14));
    }

    TEST_CASE("theta = 0 leaves only c0 and c1")
    {
        const auto k = compute_coefficients(fig1(0.0));
        CHECK(k.c0 == 1.0);
        CHECK(k.c1 == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(k.c2 == 0.0);
        CHECK(k.c3 == 0.0);
    }

    TEST_CASE("c1 vanishes at the magic angle")
    {
        for (double delta : {0.1, -0.3, 2.0, 1e-4}) {
            auto p = fig1(magic_angle());
            p.delta = delta;
            const auto k = compute_coefficients(p);
            CHECK(std::abs(k.c1) <= 16 * std::numeric_limits<double>::epsilon() * p.J * std::abs(delta));
            CHECK(classify_regime(p).kind == RegimeKind::Linear);
        }
        CHECK(magic_angle() == doctest::Approx(0.9553166181245093).epsilon(1e-15));
    }

    TEST_CASE("regime classification follows the sign of c1")
    {
        const auto bright = classify_regime(fig1(0.1));
        CHECK(bright.kind == RegimeKind::Bright);
        CHECK(bright.lambda == 100.0);
        CHECK(bright.admissible);

        const auto dark = classify_regime(fig1(1.5));
        CHECK(dark.kind == RegimeKind::Dark);
        CHECK(dark.admissible);

        auto weak = fig1(0.1);
        weak.B = 1.0;
        CHECK_FALSE(classify_regime(weak).admissible);
        weak.B = 5000.0;
        CHECK_FALSE(classify_regime(weak).admissible);
        weak.B = 1000.0;
        CHECK(classify_regime(weak).admissible);

        // Negative anisotropy swaps the sides of the magic angle.
        auto flipped = fig1(0.1);
        flipped.delta = -0.1;
        CHECK(classify_regime(flipped).kind == RegimeKind::Dark);
    }

    TEST_CASE("invalid parameters are rejected")
    {
        auto p = fig1(0.1);
        p.J = -1;
        CHECK_THROWS_AS(compute_coefficients(p), ParameterError);
        p = fig1(0.1);
        p.B = 0;
        CHECK_THROWS_AS(compute_coefficients(p), ParameterError);
        p = fig1(0.1);
        p.S = 0.25;
        CHECK_THROWS_AS(classify_regime(p), ParameterError);
        p = fig1(0.1);
        p.hbar = 0;
        CHECK_THROWS_AS(compute_coefficients(p), ParameterError);
        p = fig1(std::numeric_limits<double>::quiet_NaN());
        CHECK_THROWS_AS(compute_coefficients(p), ParameterError);
        p = fig1(0.1);
        p.delta = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(compute_coefficients(p), ParameterError);
        p = fig1(0.1);
        p.S = 0.5;
        CHECK_NOTHROW(compute_coefficients(p));
    }

    TEST_CASE("c1 is even in theta and symmetric under theta -> pi - theta")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int i = 0; i < 200; ++i) {
            const double th = u(rng);
            const double c = compute_coefficients(fig1(th)).c1;
            CHECK(compute_coefficients(fig1(-th)).c1 == doctest::Approx(c).epsilon(1e-12).scale(0.1));
            CHECK(compute_coefficients(fig1(M_PI - th)).c1 == doctest::Approx(c).epsilon(1e-12).scale(0.1));
        }
    }

    TEST_CASE("for delta > 0 the sign of c1 flips exactly at the magic angle")
    {
        const double t0 = magic_angle();
        for (double th = 0.0; th < M_PI / 2; th += 0.01) {
            if (std::abs(th - t0) < 1e-9)
                continue;
            const auto kind = classify_regime(fig1(th)).kind;
            CHECK(kind == (th < t0 ? RegimeKind::Bright : RegimeKind::Dark));
        }
    }

    TEST_CASE("isotropic chain has no anisotropic couplings")
    {
        for (double th : {0.0, 0.3, 1.0, 2.5}) {
            auto p = fig1(th);
            p.delta = 0.0;
            const auto k = compute_coefficients(p);
            CHECK(k.c0 == p.J);
            CHECK(k.c1 == 0.0);
            CHECK(k.c2 == 0.0);
            CHECK(k.c3 == 0.0);
        }
    }

    TEST_CASE("coefficients are deterministic and match the high-precision oracle")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> uj(0.1, 10.0), ud(-0.9, 3.0), ut(-3.2, 3.2), ub(0.5, 5000.0),
            us(0.5, 50.0);
        for (int i = 0; i < 50; ++i) {
            const ModelParams<double> p{uj(rng), ud(rng), ut(rng), ub(rng), us(rng), 1.0};
            const auto a = compute_coefficients(p);
            const auto b = compute_coefficients(p);
            CHECK(std::memcmp(&a, &b, sizeof a) == 0);
            const auto big = oracle::coefficients(p.J, p.delta, p.theta, p.B, p.S, p.hbar);
            CHECK(oracle::rel_err(a.c0, big.c0) < 1e-14);
            CHECK(oracle::rel_err(a.V, big.V) < 1e-14);
        }
    }

    TEST_CASE("long double instantiation agrees with double")
    {
        const ModelParams<long double> pl{1.0L, 0.1L, 0.1L, 100.0L, 10.0L, 1.0L};
        const auto kl = compute_coefficients(pl);
        const auto kd = compute_coefficients(fig1(0.1));
        CHECK(static_cast<double>(kl.c1) == doctest::Approx(kd.c1).epsilon(1e-15));
    }
}
