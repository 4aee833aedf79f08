#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "delaydirac/series.hpp"
#include "delaydirac/solver.hpp"
#include "delaydirac/spectrum.hpp"
#include "test_helpers.hpp"

using namespace dd;

namespace {

DeltaFn solver_fn(const PotentialPair& pp, const DelayConfig& cfg, int j) {
    auto eval = std::make_shared<AdaptiveCharfn>(pp, cfg);
    DeltaFn fn;
    fn.fine = [eval, j](cplx z) { return (*eval)(z)[static_cast<std::size_t>(j - 1)]; };
    fn.coarse = [eval, j](cplx z) {
        return eval->eval_fixed(z, 256)[static_cast<std::size_t>(j - 1)];
    };
    return fn;
}

/// Test oracle: dense real-line scan for sign changes plus bisection.
std::vector<double> scan_real_roots(const std::function<double(double)>& f, double lo, double hi,
                                    double resolution) {
    std::vector<double> roots;
    double x = lo;
    double fx = f(x);
    while (x < hi) {
        const double xn = std::min(x + resolution, hi);
        const double fn = f(xn);
        if (fx == 0.0) roots.push_back(x);
        if (fx * fn < 0.0) {
            double a = x, b = xn;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if (fx < 0.0 ? fm < 0.0 : fm > 0.0)
                    a = m;
                else
                    b = m;
            }
            roots.push_back(0.5 * (a + b));
        }
        x = xn;
        fx = fn;
    }
    return roots;
}

}  // namespace

TEST_CASE("unperturbed spectra sit exactly on the asymptotic centers") {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair zero;
    for (int j : {1, 2}) {
        auto spec = locate_eigenvalues(solver_fn(zero, cfg, j), j, 8);
        REQUIRE(spec.complete());
        for (int n = -8; n <= 8; ++n)
            CHECK(std::abs(spec.at(n).value - cplx(Spectrum::center(n, j))) < 1e-10);
    }
}

TEST_CASE("perturbed eigenvalues match the real-line scan oracle") {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair pp;
    pp.q = PiecewiseFunction::from_parts({Segment::constant(cfg.a, kPi, cplx(0.3))});
    const int j = 1;
    auto fn = solver_fn(pp, cfg, j);
    auto spec = locate_eigenvalues(fn, j, 5);
    REQUIRE(spec.complete());
    auto roots = scan_real_roots([&](double x) { return fn.fine(cplx(x)).real(); }, -5.6, 5.6,
                                 1e-3);
    for (int n = -5; n <= 5; ++n) {
        double best = 1e9;
        for (double r : roots) best = std::min(best, std::abs(r - spec.at(n).value.real()));
        CHECK(std::abs(spec.at(n).value.imag()) < 1e-8);
        CHECK(best < 1e-7);
    }
}

TEST_CASE("rectangle winding counts every zero once") {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair zero;
    auto fn = solver_fn(zero, cfg, 1);
    const int n_max = 5;
    const int zeros = count_zeros_rectangle(
        [&](cplx z) { return fn.eval_coarse(z); }, cplx(-n_max - 0.25, -0.5),
        cplx(n_max + 0.25, 0.5), 600);
    CHECK(zeros == 2 * n_max + 1);

    PotentialPair pp;
    pp.q = PiecewiseFunction::from_parts({Segment::constant(cfg.a, kPi, cplx(0.25))});
    auto fn2 = solver_fn(pp, cfg, 1);
    const int zeros2 = count_zeros_rectangle(
        [&](cplx z) { return fn2.eval_coarse(z); }, cplx(-n_max - 0.25, -0.5),
        cplx(n_max + 0.25, 0.5), 600);
    CHECK(zeros2 == 2 * n_max + 1);
}

TEST_CASE("flagging instead of guessing when a disk holds no single zero") {
    // Far-drifted small-n zeros of the strongly perturbed problem
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair pp;
    pp.q = PiecewiseFunction::from_parts(
        {Segment::constant(2.5 * cfg.a, 3.0 * cfg.a, cplx(3.0 * kPi / cfg.a))});
    auto spec = locate_eigenvalues(solver_fn(pp, cfg, 1), 1, 4);
    CHECK(spec.flagged_count() > 0);   // drifted low-n disks are reported, not filled
    CHECK(spec.at(0).flag == EntryFlag::ok);  // lambda = 0 is exact for this family
    CHECK(std::abs(spec.at(0).value) < 1e-9);
}

TEST_CASE("hadamard reconstruction from located spectra") {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair zero;

    SUBCASE("sine identity at the antinode") {
        auto spec = locate_eigenvalues(solver_fn(zero, cfg, 1), 1, 200);
        REQUIRE(spec.complete());
        CHECK(std::abs(hadamard_delta(spec, cplx(0.5)) - 1.0) < 1e-2);
        // an eigenvalue argument returns an exact zero
        CHECK(hadamard_delta(spec, spec.at(3).value) == cplx(0.0));
    }

    SUBCASE("cosine identity at zero") {
        auto spec = locate_eigenvalues(solver_fn(zero, cfg, 2), 2, 50);
        REQUIRE(spec.complete());
        CHECK(std::abs(hadamard_delta(spec, cplx(0.0)) + 1.0) < 1e-2);
    }

    SUBCASE("truncation error decreases with the cut") {
        double prev = 1e9;
        for (int n_max : {25, 50, 100, 200}) {
            auto spec = locate_eigenvalues(solver_fn(zero, cfg, 1), 1, n_max);
            REQUIRE(spec.complete());
            double worst = 0.0;
            for (double x = -3.0; x <= 3.0; x += 0.125)
                worst = std::max(worst,
                                 std::abs(hadamard_delta(spec, cplx(x)) - std::sin(kPi * x)));
            CHECK(worst < prev * 1.1);
            prev = worst;
        }
        CHECK(prev < 1e-2);
    }

    SUBCASE("flagged spectra are rejected") {
        Spectrum s(1, 3);
        s.at(1).flag = EntryFlag::drift;
        CHECK_THROWS_AS(hadamard_delta(s, cplx(0.5)), Error);
        CHECK_THROWS_AS(ambarzumian_residual(s), Error);
    }
}

TEST_CASE("hadamard tracks a genuinely perturbed characteristic function") {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair pp;
    pp.q = PiecewiseFunction::from_parts({Segment::constant(cfg.a, kPi, cplx(0.2))});
    auto fn = solver_fn(pp, cfg, 1);
    auto spec = locate_eigenvalues(fn, 1, 100);
    REQUIRE(spec.complete());
    double worst = 0.0;
    for (double x = -2.5; x <= 2.5; x += 0.25)
        worst = std::max(worst, std::abs(hadamard_delta(spec, cplx(x)) - fn.fine(cplx(x))));
    CHECK(worst < 5e-2);
}

TEST_CASE("series- and solver-backed locators agree") {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair pp;
    pp.p = PiecewiseFunction::from_parts({Segment::constant(1.1, 1.8, cplx(0.4))});
    pp.q = PiecewiseFunction::from_parts(
        {Segment::cosine(cfg.a, 2.0 * cfg.a, cplx(0.5), 1.5, 0.3)});
    REQUIRE(series_exactness_holds(pp, cfg, 3));
    for (int j : {1, 2}) {
        auto solver_spec = locate_eigenvalues(solver_fn(pp, cfg, j), j, 4);
        DeltaFn sf;
        sf.fine = [&pp, &cfg, j](cplx z) {
            auto r = series_charfn(pp, cfg, z, 3);
            return j == 1 ? r.delta1 : r.delta2;
        };
        auto series_spec = locate_eigenvalues(sf, j, 4);
        REQUIRE(solver_spec.complete());
        REQUIRE(series_spec.complete());
        for (int n = -4; n <= 4; ++n)
            CHECK(std::abs(solver_spec.at(n).value - series_spec.at(n).value) < 1e-7);
    }
}

TEST_CASE("distance from the unperturbed spectra") {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair zero;
    auto spec0 = locate_eigenvalues(solver_fn(zero, cfg, 1), 1, 10);
    CHECK(ambarzumian_residual(spec0) <= 1e-9);

    PotentialPair pp;
    pp.q = PiecewiseFunction::from_parts({Segment::constant(cfg.a, kPi, cplx(0.5))});
    auto spec = locate_eigenvalues(solver_fn(pp, cfg, 1), 1, 10);
    REQUIRE(spec.complete());
    CHECK(ambarzumian_residual(spec) > 1e-3);
}

TEST_CASE("window transforms") {
    const DelayConfig cfg = make_delay_config(0.8);  // N = 3
    const double a = cfg.a;

    SUBCASE("zero window") {
        PotentialPair zero;
        auto wt = window_transforms(zero, cfg, 0, cplx(2.0));
        CHECK(wt.F == cplx(0.0));
        CHECK(wt.G == cplx(0.0));
    }

    SUBCASE("unit p over the window at lambda 0") {
        PotentialPair pp;
        pp.p = PiecewiseFunction::from_parts(
            {Segment::constant(kPi - 0.5 * a, kPi, cplx(1.0))});
        pp.q = PiecewiseFunction::from_parts(
            {Segment::constant(kPi - 0.5 * a, kPi, cplx(0.25, -0.5))});
        // nu = 0: the cleared zone is empty, the window is (pi - a/2, pi)
        auto wt = window_transforms(pp, cfg, 0, cplx(0.0));
        CHECK(std::abs(wt.F - 0.5 * a) < 1e-12);
        CHECK(std::abs(wt.G - cplx(0.25, -0.5) * (0.5 * a)) < 1e-12);
    }

    SUBCASE("decay for growing real frequency") {
        PotentialPair pp;
        pp.p = PiecewiseFunction::from_parts({Segment::cosine(
            kPi - 0.5 * a, kPi, cplx(1.0), 2.0 * kPi / (0.5 * a), -0.5 * kPi)});
        const double f20 = std::abs(window_transforms(pp, cfg, 0, cplx(20.0)).F);
        const double f200 = std::abs(window_transforms(pp, cfg, 0, cplx(200.0)).F);
        CHECK(f200 < f20);
    }

    SUBCASE("structural preconditions") {
        PotentialPair pp;
        pp.q = PiecewiseFunction::from_parts({Segment::constant(kPi - 0.3, kPi, cplx(1.0))});
        CHECK_THROWS_AS(window_transforms(pp, cfg, 1, cplx(1.0)), Error);  // zone not cleared
        PotentialPair ok;
        CHECK_THROWS_AS(window_transforms(ok, cfg, 9, cplx(1.0)), Error);  // nu > 2N-3
        const DelayConfig tight = make_delay_config(1.0);                  // N = 3
        CHECK_THROWS_AS(window_transforms(ok, tight, 3, cplx(1.0)), Error);  // window below 2a
    }
}
