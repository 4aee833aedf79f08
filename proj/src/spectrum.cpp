#include "delaydirac/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "delaydirac/quadrature.hpp"

namespace dd {

namespace {

struct ContourCount {
    int winding = 0;
    bool reliable = false;
};

ContourCount count_on_circle(const DeltaFn& delta, cplx center, double radius, int points) {
    std::vector<cplx> vals(static_cast<std::size_t>(points));
    double min_abs = std::numeric_limits<double>::infinity();
    double max_abs = 0.0;
    for (int i = 0; i < points; ++i) {
        const double th = 2.0 * kPi * i / points;
        vals[static_cast<std::size_t>(i)] =
            delta.eval_coarse(center + radius * cplx(std::cos(th), std::sin(th)));
        min_abs = std::min(min_abs, std::abs(vals[static_cast<std::size_t>(i)]));
        max_abs = std::max(max_abs, std::abs(vals[static_cast<std::size_t>(i)]));
    }
    ContourCount out;
    if (min_abs < 1e-8 * std::max(1.0, max_abs)) return out;  // too close to a zero
    double total = 0.0;
    double max_step = 0.0;
    for (int i = 0; i < points; ++i) {
        const cplx ratio = vals[static_cast<std::size_t>((i + 1) % points)] /
                           vals[static_cast<std::size_t>(i)];
        const double d = std::arg(ratio);
        max_step = std::max(max_step, std::abs(d));
        total += d;
    }
    const double w = total / (2.0 * kPi);
    const double rounded = std::nearbyint(w);
    // A phase jump near pi means the sampling is too coarse to trust.
    if (max_step > 0.8 * kPi || std::abs(w - rounded) > 0.25) return out;
    out.winding = static_cast<int>(rounded);
    out.reliable = true;
    return out;
}

struct NewtonResult {
    cplx root{};
    bool converged = false;
};

NewtonResult newton_refine(const DeltaFn& delta, cplx start, cplx center, double radius,
                           const RootSearchOptions& opts) {
    const double h = 1e-6;
    cplx z = start;
    for (int it = 0; it < opts.max_newton; ++it) {
        const cplx f = delta.eval_fine(z);
        const cplx df = (delta.eval_fine(z + h) - delta.eval_fine(z - h)) / (2.0 * h);
        if (df == cplx(0.0)) break;
        const cplx step = f / df;
        z -= step;
        if (std::abs(z - center) > 2.0 * radius) return {};  // wandered off
        if (std::abs(step) < opts.newton_tol) return {z, true};
    }
    return {};
}

}  // namespace

Spectrum locate_eigenvalues(const DeltaFn& delta, int j, int n_max,
                            const RootSearchOptions& opts) {
    if (!(opts.disk_radius > 0.0) || !(opts.disk_radius < 0.5))
        throw Error(Errc::invalid_argument, "disk_radius must lie in (0, 1/2)");
    if (j != 1 && j != 2) throw Error(Errc::invalid_argument, "boundary index j must be 1 or 2");
    if (n_max < 1) throw Error(Errc::invalid_argument, "n_max must be >= 1");

    Spectrum spec(j, n_max);
    for (int n = -n_max; n <= n_max; ++n) {
        const cplx center(Spectrum::center(n, j), 0.0);
        SpectrumEntry entry;
        entry.flag = EntryFlag::no_convergence;

        ContourCount count;
        double radius = opts.disk_radius;
        for (int attempt = 0; attempt < 4; ++attempt) {
            count = count_on_circle(delta, center, radius, opts.contour_points);
            if (count.reliable) break;
            radius = opts.disk_radius * (attempt % 2 == 0 ? 1.05 : 0.95);
        }

        if (!count.reliable) {
            entry.flag = EntryFlag::no_convergence;
        } else if (count.winding == 0) {
            entry.flag = EntryFlag::drift;
        } else if (count.winding > 1) {
            entry.flag = EntryFlag::multiple;
        } else {
            const cplx starts[5] = {center, center + 0.5 * radius, center - 0.5 * radius,
                                    center + cplx(0.0, 0.5 * radius),
                                    center - cplx(0.0, 0.5 * radius)};
            for (const cplx& s0 : starts) {
                NewtonResult r = newton_refine(delta, s0, center, radius, opts);
                if (r.converged && std::abs(r.root - center) <= radius + 1e-9) {
                    entry.value = r.root;
                    entry.flag = EntryFlag::ok;
                    break;
                }
            }
        }
        spec.at(n) = entry;
    }
    return spec;
}

int count_zeros_rectangle(const std::function<cplx(cplx)>& f, cplx lo, cplx hi,
                          int points_per_side) {
    std::vector<cplx> pts;
    pts.reserve(static_cast<std::size_t>(points_per_side) * 4);
    auto edge = [&](cplx from, cplx to) {
        for (int i = 0; i < points_per_side; ++i)
            pts.push_back(from + (to - from) * (static_cast<double>(i) / points_per_side));
    };
    const cplx bl = lo, br = cplx(hi.real(), lo.imag());
    const cplx tr = hi, tl = cplx(lo.real(), hi.imag());
    edge(bl, br);
    edge(br, tr);
    edge(tr, tl);
    edge(tl, bl);

    double total = 0.0;
    cplx prev = f(pts[0]);
    for (std::size_t i = 1; i <= pts.size(); ++i) {
        const cplx cur = f(pts[i % pts.size()]);
        total += std::arg(cur / prev);
        prev = cur;
    }
    return static_cast<int>(std::nearbyint(total / (2.0 * kPi)));
}

namespace {

/// psi'(z) = sum_{k>=0} 1/(z+k)^2 for z > 0.
double trigamma(double z) {
    double acc = 0.0;
    while (z < 10.0) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    const double iz = 1.0 / z;
    const double iz2 = iz * iz;
    return acc +
           iz * (1.0 + iz * (0.5 + iz * (1.0 / 6.0 -
                                         iz2 * (1.0 / 30.0 - iz2 * (1.0 / 42.0 - iz2 / 30.0)))));
}

}  // namespace

cplx hadamard_delta(const Spectrum& spec, cplx lambda) {
    if (!spec.complete())
        throw Error(Errc::flagged, "Hadamard reconstruction requires a complete spectrum");
    const int N = spec.n_max();
    const cplx lam2 = lambda * lambda;
    if (spec.j() == 1) {
        cplx prod = -kPi * (spec.at(0).value - lambda);
        for (int n = 1; n <= N; ++n) {
            const double dn = static_cast<double>(n);
            prod *= -(spec.at(n).value - lambda) * (spec.at(-n).value - lambda) / (dn * dn);
        }
        return prod * std::exp(-lam2 * trigamma(static_cast<double>(N) + 1.0));
    }
    cplx prod(-1.0);
    for (int n = 1; n <= N; ++n) {
        const double dn = static_cast<double>(n) - 0.5;
        prod *= -(spec.at(n).value - lambda) * (spec.at(1 - n).value - lambda) / (dn * dn);
    }
    return prod * std::exp(-lam2 * trigamma(static_cast<double>(N) + 0.5));
}

double ambarzumian_residual(const Spectrum& spec) {
    if (!spec.complete())
        throw Error(Errc::flagged, "residual requires a complete spectrum");
    double r = 0.0;
    for (int n = -spec.n_max(); n <= spec.n_max(); ++n)
        r = std::max(r, std::abs(spec.at(n).value - cplx(Spectrum::center(n, spec.j()), 0.0)));
    return r;
}

WindowTransforms window_transforms(const PotentialPair& pp, const DelayConfig& cfg, int nu,
                                   cplx lambda) {
    if (nu < 0) throw Error(Errc::invalid_argument, "nu must be non-negative");
    if (nu > 2 * cfg.bracket_index - 3) {
        std::ostringstream os;
        os << "nu = " << nu << " exceeds 2N-3 = " << 2 * cfg.bracket_index - 3;
        throw Error(Errc::domain, os.str());
    }
    const double a = cfg.a;
    const double win_hi = kPi - 0.5 * nu * a;
    const double win_lo = kPi - 0.5 * (nu + 1) * a;
    if (!(win_hi > 2.0 * a))
        throw Error(Errc::domain,
                    "window reaches the final bracket (pi - nu a/2 <= 2a); use the short-support route");
    auto require_vanishing = [&](const PiecewiseFunction& f, const char* name) {
        if (f.vanishes_on(win_hi, kPi)) return;
        for (const Segment& s : f.segments()) {
            if (s.is_zero_shape()) continue;
            if (s.x1 > win_hi + 1e-12 && s.x0 < kPi) {
                std::ostringstream os;
                os << name << " has a nonzero segment [" << s.x0 << ", " << s.x1
                   << ") intersecting the already-cleared zone (" << win_hi << ", pi)";
                throw Error(Errc::domain, os.str());
            }
        }
    };
    require_vanishing(pp.p, "p");
    require_vanishing(pp.q, "q");

    const cplx i1(0.0, 1.0);
    const cplx pre = std::exp(i1 * lambda * (2.0 * kPi - (nu + 1) * a));
    std::vector<double> breaks;
    pp.p.append_breakpoints(breaks, true);
    pp.q.append_breakpoints(breaks, true);
    std::sort(breaks.begin(), breaks.end());
    PanelScheme scheme;
    const double omega = 2.0 * std::abs(lambda);

    WindowTransforms out;
    out.nu = nu;
    out.lambda = lambda;
    out.F = pre * integrate_piecewise(
                      [&](double t) { return pp.p.eval(t) * std::exp(-2.0 * i1 * lambda * t); },
                      win_lo, win_hi, breaks, omega, {}, scheme);
    out.G = pre * integrate_piecewise(
                      [&](double t) { return pp.q.eval(t) * std::exp(-2.0 * i1 * lambda * t); },
                      win_lo, win_hi, breaks, omega, {}, scheme);
    return out;
}

}  // namespace dd
