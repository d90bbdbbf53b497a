#include "doctest.h"
#include "oracles.hpp"

#include "xxz/analytic.hpp"
#include "xxz/continuum.hpp"
#include "xxz/lattice.hpp"
#include "xxz/observables.hpp"

#include <random>

using namespace xxz;

namespace {

using C = std::complex<double>;

ModelParams<double> fig1(double theta)
{
    return ModelParams<double>{1.0, 0.1, theta, 100.0, 10.0, 1.0};
}

const SolitonParams<double> kSoliton{1.0, 5.0, 0.0};

Field bright_field(const Grid& g, const Coefficients<double>& k, const ModelParams<double>& p, double t = 0.0)
{
    return sample(g, t, [&](double x, double tt) { return bright_soliton(k, p, kSoliton, x, tt); });
}

double l2_norm_sq(const Field& f)
{
    return f.values.squaredNorm() * f.grid.dx();
}

double modulus_gap(const CVectorD& a, const CVectorD& b)
{
    return (a.cwiseAbs() - b.cwiseAbs()).cwiseAbs().maxCoeff();
}

} // namespace

TEST_SUITE("continuum")
{
    TEST_CASE("laplacian on simple fields")
    {
        const Grid g(40, -2.0, 3.0, Boundary::FixedEnds);
        const Field c = sample(g, 0.0, [](double, double) { return C(1.5, -0.5); });
        CHECK(laplacian(c).values.cwiseAbs().maxCoeff() < 1e-12);

        const Field q = sample(g, 0.0, [](double x, double) { return C(x * x, 0.0); });
        const Field lq = laplacian(q);
        CHECK(lq.values[0] == C(0.0));
        CHECK(lq.values[39] == C(0.0));
        for (Eigen::Index i = 1; i < 39; ++i)
            CHECK(lq.values[i].real() == doctest::Approx(2.0).epsilon(1e-9));

        const Grid pg(64, 0.0, 16.0, Boundary::Periodic);
        for (int mode : {1, 5, 31}) {
            const double kx = 2 * M_PI * mode / pg.length();
            const Field w = sample(pg, 0.0, [&](double x, double) { return std::polar(1.0, kx * x); });
            const double symbol = -(2 - 2 * std::cos(kx * pg.dx())) / (pg.dx() * pg.dx());
            CHECK((laplacian(w).values - symbol * w.values).cwiseAbs().maxCoeff() < 1e-10);
        }
    }

    TEST_CASE("zero field")
    {
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        const Grid g(64, -10.0, 10.0, Boundary::Periodic);
        const Field z(g, CVectorD::Zero(64));
        CHECK(rhs_nls(z, k, p).values.cwiseAbs().maxCoeff() == 0.0);
        const auto traj = evolve(z, k, p, ContinuumModel::Nls, 0.0, 0.3, {0.1, 0.2, 0.3});
        for (const auto& s : traj.snapshots)
            CHECK(s.values.cwiseAbs().maxCoeff() == 0.0);

        // Only the constant c2 source survives in the extended model.
        const Field src = rhs_full_continuum(z, k, p);
        const C want = -2 * k.c2 * std::sqrt(2 * p.S) * p.S / C(0, p.hbar);
        for (Eigen::Index i = 0; i < 64; ++i)
            CHECK(std::abs(src.values[i] - want) < 1e-15);
    }

    TEST_CASE("NLS right-hand side matches the analytic time derivative")
    {
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        const double t = 0.4;
        // Worst pointwise gap between rhs and the exact time derivative,
        // relative to the largest exact derivative. FixedEnds keeps the sech
        // tails from wrapping around.
        auto residual = [&](double dx) {
            const int n = static_cast<int>(std::llround(160.0 / dx)) + 1;
            const Grid g(n, -80.0, 80.0, Boundary::FixedEnds);
            const CVectorD r = rhs_nls(bright_field(g, k, p, t), k, p).values;
            const double ht = 1e-4;
            double worst = 0, scale = 0;
            for (std::size_t i = 1; i + 1 < g.size(); ++i) {
                auto phi = [&](double tt) { return bright_soliton(k, p, kSoliton, g.x(i), tt); };
                const C exact = (-phi(t + 2 * ht) + 8.0 * phi(t + ht) - 8.0 * phi(t - ht) + phi(t - 2 * ht)) / (12 * ht);
                worst = std::max(worst, std::abs(r[static_cast<Eigen::Index>(i)] - exact));
                scale = std::max(scale, std::abs(exact));
            }
            return worst / scale;
        };
        const double coarse = residual(0.1);
        const double fine = residual(0.05);
        CHECK(fine < 1e-4);
        CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
    }

    TEST_CASE("plane-wave grid modes are eigenvectors at the magic angle")
    {
        const auto p = fig1(magic_angle());
        const auto k = compute_coefficients(p);
        const Grid g(128, 0.0, 64.0, Boundary::Periodic);
        for (int mode : {0, 3, 17}) {
            const double kx = 2 * M_PI * mode / g.length();
            const Field w = sample(g, 0.0, [&](double x, double) { return 0.7 * std::polar(1.0, kx * x); });
            const double k2 = (2 - 2 * std::cos(kx * g.dx())) / (g.dx() * g.dx());
            const C lambda = C(0, -1) * (k.c0 * p.S * k2 + k.V) / p.hbar;
            CHECK((rhs_nls(w, k, p).values - lambda * w.values).cwiseAbs().maxCoeff() < 1e-11);
        }
    }

    TEST_CASE("extended model reductions")
    {
        std::mt19937_64 rng(31);
        const Grid g(32, -4.0, 4.0, Boundary::Periodic);

        const auto p0 = fig1(0.0);
        const auto k0 = compute_coefficients(p0);
        const Field r(g, oracle::random_state(rng, 32, 0.8));
        CHECK(rhs_full_continuum(r, k0, p0).values == rhs_nls(r, k0, p0).values);

        // A real uniform field; value from the independent high-precision coefficients.
        const auto p = fig1(0.7);
        const auto k = compute_coefficients(p);
        const auto big = oracle::coefficients(p.J, p.delta, p.theta, p.B, p.S, p.hbar);
        for (double a : {0.2, 1.0, 2.3}) {
            const Field u(g, CVectorD::Constant(32, a));
            const CVectorD d = rhs_full_continuum(u, k, p).values;
            using oracle::Big;
            const Big A(a), S(p.S);
            const Big h = big.V * A - 2 * big.c1 * A * A * A +
                          2 * big.c2 * sqrt(2 * S) * (Big(2.5) * A * A + Big(1.25) * A * A - S) -
                          big.c3 * (4 * S * A - 3 * A * A * A - A * A * A);
            const C want(0, -static_cast<double>(h) / p.hbar);
            for (Eigen::Index i = 0; i < 32; ++i)
                CHECK(std::abs(d[i] - want) <= 1e-13 * std::abs(want));
        }

        // The phi-weighted variant only differs in the c2 bracket.
        const Field f(g, oracle::random_state(rng, 32, 0.5));
        const CVectorD diff = rhs_full_continuum(f, k, p, true).values - rhs_full_continuum(f, k, p).values;
        const double c2s = 2 * k.c2 * std::sqrt(2 * p.S);
        for (Eigen::Index i = 0; i < 32; ++i) {
            const C phi = f.values[i];
            const C bracket = 2.5 * std::norm(phi) + 1.25 * phi * phi - p.S;
            CHECK(std::abs(diff[i] - C(0, -1) * c2s * bracket * (phi - 1.0)) < 1e-12);
        }
    }

    TEST_CASE("fixed ends hold their initial values")
    {
        const auto p = fig1(1.5);
        const auto k = compute_coefficients(p);
        const Grid g(200, -40.0, 40.0, Boundary::FixedEnds);
        const Field f = sample(g, 0.0, [&](double x, double t) { return dark_soliton(k, p, kSoliton, x, t); });
        const CVectorD r = rhs_full_continuum(f, k, p).values;
        CHECK(r[0] == C(0.0));
        CHECK(r[199] == C(0.0));
        const auto traj = evolve(f, k, p, ContinuumModel::Extended, 0.0, 0.5, {});
        CHECK(traj.back().values[0] == f.values[0]);
        CHECK(traj.back().values[199] == f.values[199]);
    }

    TEST_CASE("stability step")
    {
        ModelParams<double> p{1.0, 0.0, 0.0, 1.0, 10.0, 1.0};
        auto k = compute_coefficients(p);
        k.V = 0;
        const Grid g(101, 0.0, 10.0, Boundary::FixedEnds);
        const Field f(g, CVectorD::Ones(101));
        CHECK(stability_dt(g, k, p, f, 0.5) == doctest::Approx(1.25e-4).epsilon(1e-14));

        const Grid half(201, 0.0, 10.0, Boundary::FixedEnds);
        const Field fh(half, CVectorD::Ones(201));
        CHECK(stability_dt(half, k, p, fh, 0.5) == doctest::Approx(1.25e-4 / 4).epsilon(1e-14));

        const auto p1 = fig1(0.1);
        const auto k1 = compute_coefficients(p1);
        const double dt = stability_dt(g, k1, p1, f, 0.5, ContinuumModel::Extended);
        CHECK(dt > 0);
        CHECK(dt < 1.25e-4);
        CHECK(dt == doctest::Approx(1.218246625e-4).epsilon(1e-9));
        CHECK(stability_dt(g, k1, p1, f, 0.5, ContinuumModel::Nls) == dt);
        CHECK_THROWS_AS(stability_dt(g, k1, p1, f, 0.0), ParameterError);
        CHECK_THROWS_AS(stability_dt(g, k1, p1, f, 1.5), ParameterError);
    }

    TEST_CASE("evolve validates its inputs")
    {
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        const Grid g(256, -60.0, 60.0, Boundary::Periodic);
        const Field f = bright_field(g, k, p);
        CHECK_THROWS_AS(evolve(f, k, p, ContinuumModel::Nls, 1.0, 0.1, {}), StepSizeError);
        CHECK_THROWS_AS(evolve(f, k, p, ContinuumModel::Nls, 0.0, 0.1, {0.2}), ParameterError);
        CHECK_THROWS_AS(evolve(f, k, p, ContinuumModel::Nls, 0.0, -1.0, {}), ParameterError);
        const Grid tiny(8, 0.0, 1.0, Boundary::Periodic);
        CHECK_THROWS_AS(evolve(Field(tiny, CVectorD::Zero(8)), k, p, ContinuumModel::Nls, 0.0, 0.1, {}),
                        ParameterError);
        CHECK_THROWS_AS(evolve(Field(g, CVectorD::Constant(256, 20.0)), k, p, ContinuumModel::Nls, 0.0, 1.0, {},
                               EvolveOptions{10.0}),
                        NumericBlowupError);
    }

    TEST_CASE("snapshots land on the requested times and the run is deterministic")
    {
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        const Grid g(256, -60.0, 60.0, Boundary::Periodic);
        const Field f = bright_field(g, k, p);
        const std::vector<double> times{0.0, 0.0123, 0.1, 0.25};
        const auto a = evolve(f, k, p, ContinuumModel::Nls, 0.0, 0.25, times);
        const auto b = evolve(f, k, p, ContinuumModel::Nls, 0.0, 0.25, times);
        REQUIRE(a.size() == times.size());
        for (std::size_t i = 0; i < times.size(); ++i) {
            CHECK(a.snapshots[i].time == times[i]);
            CHECK(a.snapshots[i].values == b.snapshots[i].values);
        }
        CHECK(a.equation == Equation::Nls);
        CHECK(a.dt > 0);
    }

    TEST_CASE("bright soliton peak travels to x0 + v t")
    {
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        const Grid g(2048, -100.7810925722076, 148.2270750707, Boundary::Periodic);
        const auto traj = evolve(bright_field(g, k, p), k, p, ContinuumModel::Nls, 0.0, 3.0, {3.0});
        const TrackPoint peak = locate_extremum(traj.field(0), Extremum::Peak);
        CHECK(std::abs(peak.position - 47.44598249584922) <= g.dx());
    }

    TEST_CASE("magic-angle plane wave keeps a uniform modulus")
    {
        const auto p = fig1(magic_angle());
        const auto k = compute_coefficients(p);
        const Grid g(256, 0.0, 200.0, Boundary::Periodic);
        const double kx = 2 * M_PI * 8 / g.length();
        const Field w = sample(g, 0.0, [&](double x, double t) { return plane_wave(k, p, kx, 1.0, x, t).value; });
        const auto traj = evolve(w, k, p, ContinuumModel::Nls, 0.0, 3.0, {0.5, 1.0, 2.0, 3.0});
        for (const auto& s : traj.snapshots) {
            const Eigen::VectorXd m = s.values.cwiseAbs();
            CHECK(m.maxCoeff() - m.minCoeff() < 1e-10);
        }
    }

    TEST_CASE("NLS conserves the norm at the default step")
    {
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        const Grid g(2048, -100.7810925722076, 148.2270750707, Boundary::Periodic);
        const Field f = bright_field(g, k, p);
        const auto traj = evolve(f, k, p, ContinuumModel::Nls, 0.0, 3.0, {3.0});
        const double n0 = l2_norm_sq(f);
        const double n1 = l2_norm_sq(traj.field(0));
        CHECK(std::abs(n1 / n0 - 1) < 1e-8);
    }

    TEST_CASE("lab-frame NLS equals the gauged envelope evolution")
    {
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        const Grid g(512, -60.0, 100.0, Boundary::Periodic);
        const Field lab0 = bright_field(g, k, p);
        const double t = 1.0;
        // A step small enough that the V = 102 carrier's RK4 phase error stays
        // far below the comparison tolerance.
        const double dt = 2e-5;
        const auto lab = evolve(lab0, k, p, ContinuumModel::Nls, dt, t, {t});

        const Field env0 = gauge_transform(lab0, k, p, 0.0, GaugeDirection::ToEnvelope);
        const auto env = evolve(env0, k, p, ContinuumModel::Envelope, dt, t, {t});
        const Field back = gauge_transform(env.field(0), k, p, t, GaugeDirection::ToLab);
        CHECK(back.grid.size() == g.size());
        CHECK(back.grid.dx() == doctest::Approx(g.dx()).epsilon(1e-14));
        CHECK((back.values - lab.back().values).cwiseAbs().maxCoeff() < 1e-8 * kSoliton.A);
    }

    TEST_CASE("second-order spatial convergence")
    {
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        auto err = [&](std::size_t n) {
            const Grid g(n, -100.7810925722076, 148.2270750707, Boundary::Periodic);
            const auto traj = evolve(bright_field(g, k, p), k, p, ContinuumModel::Nls, 0.0, 3.0, {3.0});
            return modulus_gap(traj.back().values, bright_field(g, k, p, 3.0).values);
        };
        const double ratio = err(1024) / err(2048);
        CHECK(ratio >= 3.2);
        CHECK(ratio <= 4.8);
    }

    TEST_CASE("lattice and continuum agree for a wide soliton")
    {
        // Width 10 sites and a carrier of 0.08 rad per site, so both the
        // envelope and the phase vary slowly on the lattice scale.
        const auto p = fig1(0.1);
        const auto k = compute_coefficients(p);
        const SolitonParams<double> slow{1.0, 0.5, 0.0};
        const double x_min = -100.0;
        const std::size_t sites = 250;

        const LatticeModel<double> lm(LatticeVariant::Simplified, p);
        CVectorD a(static_cast<Eigen::Index>(sites));
        for (std::size_t j = 0; j < sites; ++j)
            a[static_cast<Eigen::Index>(j)] = bright_soliton(k, p, slow, x_min + static_cast<double>(j), 0.0);
        const LatticeState<double> s0{a, 0.0, Boundary::Periodic};
        const auto lat =
            evolve_lattice(s0, lm, 0.0, 3.0, {3.0}, Grid::sites(sites, x_min, Boundary::Periodic));

        const std::size_t refine = 4;
        const Grid g(sites * refine, x_min, x_min + static_cast<double>(sites), Boundary::Periodic);
        const auto cont = evolve(sample(g, 0.0, [&](double x, double t) { return bright_soliton(k, p, slow, x, t); }), k, p,
                                 ContinuumModel::Nls, 0.0, 3.0, {3.0});

        double worst = 0;
        for (std::size_t j = 0; j < sites; ++j)
            worst = std::max(worst, std::abs(std::abs(lat.back().values[static_cast<Eigen::Index>(j)]) -
                                             std::abs(cont.back().values[static_cast<Eigen::Index>(j * refine)])));
        CHECK(worst < 0.02 * kSoliton.A);
    }
}
