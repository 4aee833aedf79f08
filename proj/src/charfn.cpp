#include "delaydirac/charfn.hpp"

#include <algorithm>
#include <cmath>

#include "delaydirac/quadrature.hpp"

namespace dd {

std::array<cplx, 2> lm_at(const DeltaPairFn& delta_eval, cplx lambda) {
    const auto dp = delta_eval(lambda);
    const auto dm = delta_eval(-lambda);
    const cplx i1(0.0, 1.0);
    const cplx L = 0.5 * (dp[0] + dm[0] + i1 * (dp[1] - dm[1]));
    const cplx M = std::exp(i1 * lambda * kPi) + 0.5 * (dp[1] + dm[1] + i1 * (-dp[0] + dm[0]));
    return {L, M};
}

std::array<cplx, 2> l1_m1(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda,
                          int quad_order) {
    const cplx i1(0.0, 1.0);
    std::vector<double> breaks;
    pp.p.append_breakpoints(breaks, true);
    pp.q.append_breakpoints(breaks, true);
    std::sort(breaks.begin(), breaks.end());
    PanelScheme scheme;
    scheme.g = quad_order;
    const double omega = 2.0 * std::abs(lambda);
    const double a = cfg.a;
    auto phase = [&](double t) { return std::exp(i1 * lambda * (kPi - 2.0 * t + a)); };
    auto spans_p = pp.p.nonzero_spans();
    auto spans_q = pp.q.nonzero_spans();
    cplx L1 = integrate_piecewise([&](double t) { return pp.p.eval(t) * phase(t); }, a, kPi,
                                  breaks, omega, spans_p, scheme);
    cplx M1 = integrate_piecewise([&](double t) { return pp.q.eval(t) * phase(t); }, a, kPi,
                                  breaks, omega, spans_q, scheme);
    return {L1, M1};
}

namespace {

/// First-order part of Delta_1: int p cos(l(pi-2t+a)) - int q sin(l(pi-2t+a)).
cplx first_order_delta1(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda, int g) {
    std::vector<double> breaks;
    pp.p.append_breakpoints(breaks, true);
    pp.q.append_breakpoints(breaks, true);
    std::sort(breaks.begin(), breaks.end());
    PanelScheme scheme;
    scheme.g = g;
    const double omega = 2.0 * std::abs(lambda);
    const double a = cfg.a;
    cplx ip = integrate_piecewise(
        [&](double t) { return pp.p.eval(t) * std::cos(lambda * (kPi - 2.0 * t + a)); }, a, kPi,
        breaks, omega, pp.p.nonzero_spans(), scheme);
    cplx iq = integrate_piecewise(
        [&](double t) { return pp.q.eval(t) * std::sin(lambda * (kPi - 2.0 * t + a)); }, a, kPi,
        breaks, omega, pp.q.nonzero_spans(), scheme);
    return ip - iq;
}

double fit_last_half_slope(const std::vector<std::pair<double, double>>& samples) {
    const std::size_t n = samples.size();
    const std::size_t from = n / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(n - from);
    for (std::size_t i = from; i < n; ++i) {
        sx += samples[i].first;
        sy += samples[i].second;
        sxx += samples[i].first * samples[i].first;
        sxy += samples[i].first * samples[i].second;
    }
    const double denom = cnt * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (cnt * sxy - sx * sy) / denom;
}

}  // namespace

AsymptoticFit asymptotic_remainder_fit(const PotentialPair& pp, const DelayConfig& cfg,
                                       const RemainderFitOptions& opts) {
    validate_potentials(pp, cfg);
    AsymptoticFit fit;
    fit.target_slope = kPi - 2.0 * cfg.a;

    bool use_series;
    switch (opts.engine) {
        case RemainderFitOptions::Engine::series:
            use_series = true;
            break;
        case RemainderFitOptions::Engine::solver:
            use_series = false;
            break;
        default:
            // The series route is exact (terms beyond k = 3 vanish) and free of
            // the huge sin/cos cancellations, so prefer it when available.
            use_series = series_exactness_holds(pp, cfg, 3) &&
                         opts.t_hi <= SeriesOptions{}.lambda_cap;
            break;
    }

    AdaptiveCharfn solver_eval(pp, cfg, opts.solver_opts);
    int dropped = 0;
    for (int i = 0; i < opts.count; ++i) {
        const double t =
            opts.t_lo + (opts.t_hi - opts.t_lo) * static_cast<double>(i) /
                            static_cast<double>(opts.count - 1);
        const cplx lam(0.0, t);
        cplx r;
        double noise_floor = 0.0;
        try {
            if (use_series) {
                r = series_term(pp, cfg, 2, lam, opts.series_opts)[0] +
                    series_term(pp, cfg, 3, lam, opts.series_opts)[0];
            } else {
                const cplx d1 = solver_eval(lam)[0];
                const cplx head = std::sin(lam * kPi);
                const cplx fo = first_order_delta1(pp, cfg, lam, opts.series_opts.g);
                r = d1 - head - fo;
                noise_floor = 1e-13 * std::max({std::abs(d1), std::abs(head), std::abs(fo)});
            }
        } catch (const Error& e) {
            if (e.code() == Errc::numeric) {
                ++dropped;  // overflow along the ray: truncate
                continue;
            }
            throw;
        }
        const double mag = std::abs(r);
        if (mag <= noise_floor || mag == 0.0) {
            ++dropped;
            continue;
        }
        fit.samples.emplace_back(t, std::log(mag));
    }

    if (fit.samples.size() < 6) {
        if (dropped == opts.count || fit.samples.empty()) {
            fit.degenerate = true;  // remainder vanishes (or sits below noise) everywhere
            return fit;
        }
        throw Error(Errc::numeric,
                    "asymptotic remainder fit kept fewer than 6 usable ray samples");
    }
    fit.fitted_slope = fit_last_half_slope(fit.samples);
    return fit;
}

}  // namespace dd
