// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "delaydirac/charfn.hpp"
#include "delaydirac/isofamily.hpp"
#include "delaydirac/series.hpp"
#include "delaydirac/solver.hpp"
#include "delaydirac/spectrum.hpp"

using namespace dd;

namespace {

// ---------------------------------------------------------------- harness

int g_failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("CRITERION %d [%s]: %s%s%s\n", index, name, pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

/// splitmix64; keeps the sampled potentials identical on every run.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    int pick(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

DeltaFn solver_fn(const PotentialPair& pp, const DelayConfig& cfg, int j,
                  AdaptiveOptions opts = {}) {
    auto eval = std::make_shared<AdaptiveCharfn>(pp, cfg, opts);
    DeltaFn fn;
    fn.fine = [eval, j](cplx z) { return (*eval)(z)[static_cast<std::size_t>(j - 1)]; };
    fn.coarse = [eval, j](cplx z) {
        return eval->eval_fixed(z, 256)[static_cast<std::size_t>(j - 1)];
    };
    return fn;
}

/// Dense scan + bisection on the real line; the independent root oracle.
std::vector<double> scan_real_roots(const std::function<double(double)>& f, double lo, double hi,
                                    double resolution) {
    std::vector<double> roots;
    double x = lo, fx = f(x);
    while (x < hi) {
        const double xn = std::min(x + resolution, hi);
        const double fn = f(xn);
        if (fx * fn < 0.0) {
            double a = x, b = xn, fa = fx;
            for (int it = 0; it < 80; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x = xn;
        fx = fn;
    }
    return roots;
}

PiecewiseFunction constant_kernel(const DelayConfig& cfg, double c) {
    return PiecewiseFunction::from_parts(
        {Segment::constant(2.5 * cfg.a, 3.0 * cfg.a, cplx(c))});
}

// ---------------------------------------------------------------- criteria

void criterion_1() {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair zero;
    double worst = 0.0;
    bool complete = true;
    for (int j : {1, 2}) {
        Spectrum spec = locate_eigenvalues(solver_fn(zero, cfg, j), j, 20);
        complete = complete && spec.complete();
        for (int n = -20; n <= 20; ++n)
            worst = std::max(worst,
                             std::abs(spec.at(n).value - cplx(Spectrum::center(n, j), 0.0)));
    }
    std::ostringstream os;
    os << "max |lambda_n - center| = " << worst;
    report(1, "unperturbed spectra", complete && worst <= 1e-9, os.str());
}

void criterion_2() {
    Rng rng(20240811);
    double worst = 0.0;
    int checked = 0;
    for (double a : {0.5, 0.8, 1.0}) {
        const DelayConfig cfg = make_delay_config(a);
        for (int trial = 0; trial < 5; ++trial) {
            auto segment_in = [&](double lo, double hi, double amp) {
                const double u = rng.uniform(lo, lo + 0.5 * (hi - lo));
                const double v = rng.uniform(u + 0.25 * (hi - u), hi);
                if (rng.pick(2) == 0) return Segment::constant(u, v, cplx(amp));
                return Segment::cosine(u, v, cplx(amp), rng.uniform(0.5, 5.0),
                                       rng.uniform(0.0, 3.0));
            };
            PotentialPair pp;
            pp.p = PiecewiseFunction::from_parts(
                {segment_in(a, 3.0 * a, rng.uniform(0.3, 1.0))});
            pp.q = PiecewiseFunction::from_parts(
                {segment_in(a, 3.0 * a, rng.uniform(0.3, 1.0))});

            AdaptiveCharfn solver_eval(pp, cfg, AdaptiveOptions{64, 4096, 1e-9});
            for (int i = 0; i < 50; ++i) {
                const cplx lam(-20.0 + 40.0 * i / 49.0, 0.0);
                auto exact = series_charfn(pp, cfg, lam, 2);
                if (!exact.exact) continue;
                auto got = solver_eval(lam);
                const double scale = std::max(
                    {1.0, std::abs(exact.delta1), std::abs(exact.delta2)});
                worst = std::max(worst,
                                 std::max(std::abs(got[0] - exact.delta1),
                                          std::abs(got[1] - exact.delta2)) /
                                     scale);
                ++checked;
            }
        }
    }
    std::ostringstream os;
    os << "max relative deviation = " << worst << " over " << checked << " evaluations";
    report(2, "dual-engine equivalence", checked == 750 && worst <= 1e-6, os.str());
}

struct SampleSpectra {
    Spectrum located;
    std::vector<double> scan_roots;
};

void criterion_3() {
    const DelayConfig cfg = make_delay_config(1.0);
    const double a = cfg.a;
    bool pass = true;
    std::ostringstream os;
    double worst_pairwise = 0.0, worst_vs_closed = 0.0;
    int unflagged_total = 0;

    struct ModeSpec {
        FamilyMode mode;
        double c;
        std::vector<std::pair<cplx, cplx>> params;
    };
    const std::vector<ModeSpec> modes{
        {FamilyMode::p_only, 3.0 * kPi / a,
         {{cplx(0.0), cplx(0.0)}, {cplx(1.0), cplx(0.0)}, {cplx(5.0), cplx(0.0)}}},
        {FamilyMode::q_only, kPi / a,
         {{cplx(0.0), cplx(0.0)}, {cplx(0.0), cplx(1.0)}, {cplx(0.0), cplx(5.0)}}}};

    const double scan_lo = -16.2, scan_hi = 16.2;
    for (const auto& ms : modes) {
        auto h = constant_kernel(cfg, ms.c);
        for (int j : {1, 2}) {
            // closed-form zero set from the stated scan + bisection oracle
            auto closed_roots = scan_real_roots(
                [&](double x) {
                    return family_charfn_closed(h, cfg, cplx(x))[static_cast<std::size_t>(j - 1)]
                        .real();
                },
                scan_lo, scan_hi, 1e-3);

            std::vector<SampleSpectra> runs;
            for (const auto& [alpha, beta] : ms.params) {
                FamilyBuild fam = build_family(cfg, h, ms.mode, alpha, beta);
                SampleSpectra run{
                    locate_eigenvalues(solver_fn(fam.potentials, cfg, j), j, 15),
                    scan_real_roots(
                        [&, pot = fam.potentials](double x) {
                            return charfn_at(pot, cfg, cplx(x), SolverOptions{1024})
                                [static_cast<std::size_t>(j - 1)]
                                    .real();
                        },
                        scan_lo, scan_hi, 1e-3)};
                runs.push_back(std::move(run));
            }

            // scan sets: equal counts, entrywise agreement, match to closed form
            for (const auto& run : runs) {
                if (run.scan_roots.size() != closed_roots.size()) {
                    pass = false;
                    os << " [j=" << j << " scan count mismatch]";
                    continue;
                }
                for (std::size_t i = 0; i < closed_roots.size(); ++i)
                    worst_vs_closed = std::max(
                        worst_vs_closed, std::abs(run.scan_roots[i] - closed_roots[i]));
            }
            for (std::size_t r = 1; r < runs.size(); ++r) {
                if (runs[r].scan_roots.size() != runs[0].scan_roots.size()) continue;
                for (std::size_t i = 0; i < runs[0].scan_roots.size(); ++i)
                    worst_pairwise = std::max(
                        worst_pairwise,
                        std::abs(runs[r].scan_roots[i] - runs[0].scan_roots[i]));
            }

            // located entries: identical flag pattern; unflagged values agree
            // across the samples and sit on closed-form zeros
            for (int n = -15; n <= 15; ++n) {
                const bool ok0 = runs[0].located.at(n).flag == EntryFlag::ok;
                for (std::size_t r = 1; r < runs.size(); ++r)
                    if ((runs[r].located.at(n).flag == EntryFlag::ok) != ok0) {
                        pass = false;
                        os << " [j=" << j << " n=" << n << " flag pattern differs]";
                    }
                if (!ok0) continue;
                ++unflagged_total;
                for (std::size_t r = 1; r < runs.size(); ++r)
                    worst_pairwise =
                        std::max(worst_pairwise, std::abs(runs[r].located.at(n).value -
                                                          runs[0].located.at(n).value));
                double best = 1e9;
                for (double z : closed_roots)
                    best = std::min(best, std::abs(runs[0].located.at(n).value - cplx(z)));
                worst_vs_closed = std::max(worst_vs_closed, best);
            }
        }
    }
    pass = pass && worst_pairwise <= 1e-7 && worst_vs_closed <= 1e-7 && unflagged_total > 0;
    os << " max cross-sample dev = " << worst_pairwise
       << ", max dev from closed-form zeros = " << worst_vs_closed
       << ", unflagged entries per run = " << unflagged_total / 4
       << " (low-|n| disks drift outside radius 1/4 for this kernel size and are flagged)";
    report(3, "one-parameter iso-bispectrality", pass, os.str());
}

void criterion_4() {
    const DelayConfig cfg = make_delay_config(1.0);
    const double a = cfg.a;
    auto h0 = constant_kernel(cfg, 1.0);
    auto h1 = PiecewiseFunction::from_parts(
        {Segment::cosine(2.5 * a, 3.0 * a, cplx(1.0), 2.0 * kPi / a, -0.5 * kPi)});
    IsoOptions opts;

    TuneResult tuned = tune_h_for_pair(h0, h1, -4.0, 0.0, cfg, opts);
    auto pairs = nystrom_eigs(make_hankel_op(cfg, tuned.h, 200), 4);
    double plus_err = 1e9, minus_err = 1e9;
    for (const auto& p : pairs) {
        plus_err = std::min(plus_err, std::abs(p.mu - 1.0));
        minus_err = std::min(minus_err, std::abs(p.mu + 1.0));
    }

    std::vector<std::pair<cplx, cplx>> params{
        {cplx(1.0), cplx(1.0)}, {cplx(2.0), cplx(-1.0)}, {cplx(0.0), cplx(0.0)}};
    std::vector<cplx> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(cplx(-15.0 + i));
    IsoVerifyReport rep = verify_isospectrality(tuned.h, cfg, FamilyMode::both, params, grid,
                                                1e-5, opts);
    double worst = 0.0;
    for (const auto& s : rep.samples)
        worst = std::max({worst, s.max_dev_solver, s.max_dev_series});

    std::ostringstream os;
    os << "tuned theta = " << tuned.theta << ", |mu-1| = " << plus_err << ", |mu+1| = "
       << minus_err << ", max deviation = " << worst;
    report(4, "two-parameter mode", plus_err <= 1e-7 && minus_err <= 1e-7 && rep.all_pass,
           os.str());
}

void criterion_5() {
    const DelayConfig cfg = make_delay_config(1.0);
    const double a = cfg.a;
    double worst_k1 = 0.0, worst_k2 = 0.0, worst_tail = 0.0;

    struct Fam {
        FamilyMode mode;
        double c;
        cplx alpha, beta;
    };
    for (const Fam& f : {Fam{FamilyMode::p_only, 3.0 * kPi / a, cplx(5.0), cplx(0.0)},
                         Fam{FamilyMode::q_only, kPi / a, cplx(0.0), cplx(3.0)}}) {
        auto h = constant_kernel(cfg, f.c);
        FamilyBuild fam = build_family(cfg, h, f.mode, f.alpha, f.beta);
        for (int i = 0; i < 400; ++i) {
            // u = x - a/2 walks (a/2, 5a/2) as x walks (a, 3a)
            const double u = 0.5 * a + 1e-7 + (2.0 * a - 2e-7) * i / 399.0;
            auto kk = k_kernels(fam.potentials, cfg, u);
            worst_k1 = std::max(worst_k1, std::abs(kk[0]));
            if (u < 2.0 * a)
                worst_k2 = std::max(worst_k2, std::abs(kk[1]));
            else
                worst_tail = std::max(worst_tail, std::abs(kk[1] - h.eval(u + 0.5 * a)));
        }
    }
    std::ostringstream os;
    os << "max |K1| = " << worst_k1 << ", max |K2| below the tail = " << worst_k2
       << ", max |K2 - h| on the tail = " << worst_tail;
    report(5, "reduction kernels vanish", worst_k1 <= 1e-8 && worst_k2 <= 1e-8 &&
                                              worst_tail <= 1e-8,
           os.str());
}

void criterion_6() {
    const DelayConfig cfg = make_delay_config(1.0);
    const double a = cfg.a;
    double worst_rel = 0.0, worst_res = 0.0;
    for (double c : {kPi / a, 3.0 * kPi / a, 1.7}) {
        auto op = make_hankel_op(cfg, constant_kernel(cfg, c), 200);
        auto pairs = nystrom_eigs(op, 4);
        for (int k = 0; k < 4; ++k) {
            const double expect = (k % 2 == 0 ? 1.0 : -1.0) * c * a / ((2 * k + 1) * kPi);
            worst_rel = std::max(worst_rel,
                                 std::abs(pairs[static_cast<std::size_t>(k)].mu - expect) /
                                     std::abs(expect));
            worst_res = std::max(worst_res, pairs[static_cast<std::size_t>(k)].residual);
        }
    }
    std::ostringstream os;
    os << "max relative eigenvalue error = " << worst_rel
       << ", max eigenfunction residual = " << worst_res;
    report(6, "kernel discretization oracle", worst_rel <= 1e-6 && worst_res <= 1e-8, os.str());
}

void criterion_7() {
    const DelayConfig cfg = make_delay_config(1.0);
    PotentialPair zero;
    double err100 = 0.0, err200 = 0.0;
    for (int n_max : {100, 200}) {
        Spectrum spec = locate_eigenvalues(solver_fn(zero, cfg, 1), 1, n_max);
        if (!spec.complete()) {
            report(7, "hadamard reconstruction", false, "spectrum flagged");
            return;
        }
        double worst = 0.0;
        for (int i = 0; i <= 120; ++i) {
            const double x = -3.0 + 6.0 * i / 120.0;
            worst = std::max(worst,
                             std::abs(hadamard_delta(spec, cplx(x)) - std::sin(kPi * x)));
        }
        (n_max == 100 ? err100 : err200) = worst;
    }
    std::ostringstream os;
    os << "max error at n_max 200 = " << err200 << ", at n_max 100 = " << err100;
    report(7, "hadamard reconstruction", err200 <= 1e-2 && err200 < err100, os.str());
}

void criterion_8() {
    bool pass = true;
    std::ostringstream os;
    for (double a : {0.5, 0.6}) {
        const DelayConfig cfg = make_delay_config(a);
        // stated regime: supports inside (a, 2a); every term beyond the first
        // vanishes there, so the remainder is structurally zero and the fit
        // reports it as degenerate (trivially under the ceiling)
        PotentialPair narrow;
        narrow.q = PiecewiseFunction::from_parts(
            {Segment::constant(a, 2.0 * a, cplx(0.9))});
        narrow.p = PiecewiseFunction::from_parts(
            {Segment::cosine(a, 1.8 * a, cplx(0.7), 2.0, 0.4)});
        auto fit = asymptotic_remainder_fit(narrow, cfg);
        if (!(fit.degenerate || fit.fitted_slope <= fit.target_slope + 0.05)) pass = false;
        os << " a=" << a << " (a,2a): "
           << (fit.degenerate ? std::string("degenerate remainder")
                              : "slope " + std::to_string(fit.fitted_slope));

        // live remainder: let the support cross 2a so the double term survives
        PotentialPair wide;
        wide.q = PiecewiseFunction::from_parts(
            {Segment::constant(a, 2.5 * a, cplx(0.9))});
        wide.p = PiecewiseFunction::from_parts(
            {Segment::cosine(a, 2.4 * a, cplx(0.6), 2.0, 0.9)});
        auto fit2 = asymptotic_remainder_fit(wide, cfg);
        if (fit2.degenerate || !(fit2.fitted_slope <= fit2.target_slope + 0.05)) pass = false;
        os << "; (a,5a/2): slope " << fit2.fitted_slope << " vs ceiling "
           << fit2.target_slope + 0.05;
    }
    report(8, "asymptotic remainder growth", pass, os.str());
}

void criterion_9() {
    Rng rng(771122);
    bool pass = true;
    double worst_zero = 0.0, smallest = 1e9;
    for (double a : {0.8, 1.0}) {
        const DelayConfig cfg = make_delay_config(a);
        PotentialPair zero;
        for (int j : {1, 2}) {
            Spectrum spec = locate_eigenvalues(solver_fn(zero, cfg, j), j, 10);
            if (!spec.complete()) pass = false;
            else worst_zero = std::max(worst_zero, ambarzumian_residual(spec));
        }
        for (int trial = 0; trial < 5; ++trial) {
            auto segment_in = [&](double amp) {
                const double u = rng.uniform(a, a + 0.5 * (kPi - a));
                const double v = rng.uniform(u + 0.3 * (kPi - u), kPi);
                if (rng.pick(2) == 0) return Segment::constant(u, v, cplx(amp));
                return Segment::cosine(u, v, cplx(amp), rng.uniform(0.5, 4.0),
                                       rng.uniform(0.0, 3.0));
            };
            PotentialPair pp;
            pp.p = PiecewiseFunction::from_parts({segment_in(rng.uniform(0.15, 0.35))});
            pp.q = PiecewiseFunction::from_parts({segment_in(rng.uniform(0.15, 0.35))});
            double residual = 0.0;
            bool ok = true;
            for (int j : {1, 2}) {
                Spectrum spec = locate_eigenvalues(solver_fn(pp, cfg, j), j, 10);
                if (!spec.complete()) {
                    ok = false;
                    break;
                }
                residual = std::max(residual, ambarzumian_residual(spec));
            }
            if (!ok) {
                pass = false;
                continue;
            }
            smallest = std::min(smallest, residual);
            if (residual < 1e-3) pass = false;
        }
    }
    std::ostringstream os;
    os << "zero-potential residual = " << worst_zero
       << ", smallest nonzero-potential residual = " << smallest;
    report(9, "distance from the unperturbed spectra", pass && worst_zero <= 1e-9, os.str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    if (g_failures == 0)
        std::printf("acceptance: all 9 criteria pass\n");
    else
        std::printf("acceptance: %d criterion(s) failing\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
