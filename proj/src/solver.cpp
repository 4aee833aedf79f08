#include "delaydirac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dd {

namespace {

using Vec2 = std::array<cplx, 2>;

struct RotPair {
    cplx c, s;
};

RotPair rot(cplx theta) { return {std::cos(theta), std::sin(theta)}; }

Vec2 rot_apply(const RotPair& r, const Vec2& v) {
    return {r.c * v[0] - r.s * v[1], r.s * v[0] + r.c * v[1]};
}

bool spans_contain(const std::vector<std::pair<double, double>>& spans, double x) {
    for (const auto& s : spans) {
        if (x < s.first) return false;
        if (x < s.second) return true;
    }
    return false;
}

/// One delay window of the cascade; components u[j] hold the frame-rotated
/// value of y(x - j a).  Only u[j] with an active coupling move; u.back()
/// never does (Q = 0 below the delay).
class WindowIntegrator {
public:
    WindowIntegrator(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda, double x_lo,
                     const std::vector<std::pair<double, double>>& spans)
        : pp_(pp), a_(cfg.a), lambda_(lambda), x_lo_(x_lo), spans_(spans) {}

    void set_state(std::vector<Vec2> u) {
        u_ = std::move(u);
        du_.assign(u_.size(), Vec2{});
        stage_.assign(u_.size(), Vec2{});
        k1_.assign(u_.size(), Vec2{});
        k2_.assign(u_.size(), Vec2{});
        k3_.assign(u_.size(), Vec2{});
        active_.assign(u_.size(), 0);
        seg_p_.assign(u_.size(), nullptr);
        seg_q_.assign(u_.size(), nullptr);
        s_ = 0.0;
    }

    /// Advances from the current point to absolute position x1 (one smooth
    /// sub-step; the caller guarantees no breakpoint lies inside).
    void step_to(double x1) {
        const double s1 = x1 - x_lo_;
        const double h = s1 - s_;
        if (h <= 0.0) return;

        // The sub-step never straddles a breakpoint, so the owning segments are
        // fixed; resolving them from the midpoint and evaluating their shapes at
        // the stage points keeps the one-sided limits right at segment joins.
        const double x_mid = x_lo_ + 0.5 * (s_ + s1);
        bool any = false;
        for (std::size_t j = 0; j + 1 < u_.size(); ++j) {
            const double xq_mid = x_mid - static_cast<double>(j) * a_;
            active_[j] = spans_contain(spans_, xq_mid) ? 1 : 0;
            seg_p_[j] = active_[j] ? &pp_.p.segment_at(xq_mid) : nullptr;
            seg_q_[j] = active_[j] ? &pp_.q.segment_at(xq_mid) : nullptr;
            any = any || active_[j];
        }
        if (!any) {
            s_ = s1;
            return;
        }

        deriv(s_, u_, k1_);
        axpy(u_, 0.5 * h, k1_, stage_);
        deriv(s_ + 0.5 * h, stage_, k2_);
        axpy(u_, 0.5 * h, k2_, stage_);
        deriv(s_ + 0.5 * h, stage_, k3_);
        axpy(u_, h, k3_, stage_);
        deriv(s_ + h, stage_, du_);
        for (std::size_t j = 0; j < u_.size(); ++j) {
            if (!active_[j] && j + 1 < u_.size()) continue;
            if (j + 1 == u_.size()) continue;
            u_[j][0] += h / 6.0 * (k1_[j][0] + 2.0 * k2_[j][0] + 2.0 * k3_[j][0] + du_[j][0]);
            u_[j][1] += h / 6.0 * (k1_[j][1] + 2.0 * k2_[j][1] + 2.0 * k3_[j][1] + du_[j][1]);
        }
        s_ = s1;
    }

    /// Lab-frame value of the top component at the current point.
    Vec2 top_value() const { return rot_apply(rot(lambda_ * s_), u_[0]); }

private:
    void axpy(const std::vector<Vec2>& base, double h, const std::vector<Vec2>& k,
              std::vector<Vec2>& out) const {
        for (std::size_t j = 0; j < base.size(); ++j) {
            out[j][0] = base[j][0] + h * k[j][0];
            out[j][1] = base[j][1] + h * k[j][1];
        }
    }

    void deriv(double s, const std::vector<Vec2>& u, std::vector<Vec2>& du) const {
        const RotPair r2 = rot(2.0 * lambda_ * s);
        const double x = x_lo_ + s;
        for (std::size_t j = 0; j + 1 < u.size(); ++j) {
            if (!active_[j]) {
                du[j] = Vec2{};
                continue;
            }
            const Vec2 rv = rot_apply(r2, u[j + 1]);
            const double xq = x - static_cast<double>(j) * a_;
            const cplx p = seg_p_[j]->eval(xq);
            const cplx q = seg_q_[j]->eval(xq);
            const cplx g0 = p * rv[0] + q * rv[1];
            const cplx g1 = q * rv[0] - p * rv[1];
            du[j] = {g1, -g0};
        }
        du[u.size() - 1] = Vec2{};
    }

    const PotentialPair& pp_;
    double a_;
    cplx lambda_;
    double x_lo_;
    const std::vector<std::pair<double, double>>& spans_;
    std::vector<Vec2> u_, du_, stage_, k1_, k2_, k3_;
    std::vector<char> active_;
    std::vector<const Segment*> seg_p_, seg_q_;
    double s_ = 0.0;
};

std::vector<std::pair<double, double>> merged_spans(const PotentialPair& pp) {
    auto a = pp.p.nonzero_spans();
    auto b = pp.q.nonzero_spans();
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    std::vector<std::pair<double, double>> out;
    for (const auto& s : a) {
        if (!out.empty() && s.first <= out.back().second + 1e-13)
            out.back().second = std::max(out.back().second, s.second);
        else
            out.push_back(s);
    }
    return out;
}

[[noreturn]] void throw_nonfinite(double x) {
    std::ostringstream os;
    os << "fundamental solution overflowed near x = " << x
       << " (|Im lambda| too large for this grid)";
    throw Error(Errc::numeric, os.str());
}

}  // namespace

SolutionTrace evolve_fundamental(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda,
                                 const SolverOptions& opts) {
    if (opts.m < 8) throw Error(Errc::invalid_argument, "solver requires m >= 8 steps per delay");
    validate_potentials(pp, cfg);

    const double a = cfg.a;
    const int m = opts.m;
    const double eta = a / m;

    long i_last = static_cast<long>(std::floor(kPi / eta));
    while (i_last > 0 && static_cast<double>(i_last) * eta > kPi - 1e-12) --i_last;

    SolutionTrace trace;
    trace.lambda = lambda;
    trace.x.resize(static_cast<std::size_t>(i_last) + 2);
    trace.values.resize(trace.x.size());
    for (long i = 0; i <= i_last; ++i) trace.x[static_cast<std::size_t>(i)] = static_cast<double>(i) * eta;
    trace.x.back() = kPi;

    // Window 0 is the free rotation; fill it from the closed form.
    const long w0_end = std::min<long>(m, i_last);
    for (long i = 0; i <= w0_end; ++i) {
        const double x = trace.x[static_cast<std::size_t>(i)];
        trace.values[static_cast<std::size_t>(i)] = {std::sin(lambda * x), -std::cos(lambda * x)};
    }
    if (static_cast<double>(m) * eta >= kPi - 1e-12)
        trace.values.back() = {std::sin(lambda * kPi), -std::cos(lambda * kPi)};

    const auto spans = merged_spans(pp);
    std::vector<double> base_breaks;
    pp.p.append_breakpoints(base_breaks, true);
    pp.q.append_breakpoints(base_breaks, true);
    std::sort(base_breaks.begin(), base_breaks.end());
    base_breaks.erase(std::unique(base_breaks.begin(), base_breaks.end()), base_breaks.end());

    for (int k = 1; static_cast<double>(k) * a < kPi - 1e-12; ++k) {
        const long node_lo = static_cast<long>(k) * m;
        if (node_lo > i_last) break;
        const double x_lo = static_cast<double>(node_lo) * eta;
        const long node_hi = std::min<long>(static_cast<long>(k + 1) * m, i_last);
        const bool ends_at_pi = (static_cast<long>(k + 1) * m > i_last);

        WindowIntegrator win(pp, cfg, lambda, x_lo, spans);
        std::vector<Vec2> u(static_cast<std::size_t>(k) + 1);
        for (int j = 0; j <= k; ++j)
            u[static_cast<std::size_t>(j)] =
                trace.values[static_cast<std::size_t>((k - j) * static_cast<long>(m))];
        win.set_state(std::move(u));

        // Breakpoints of any cascade level, mapped into this window.
        std::vector<double> wbreaks;
        const double x_hi = ends_at_pi ? kPi : static_cast<double>(node_hi) * eta;
        for (int j = 0; j < k; ++j)
            for (double b : base_breaks) {
                const double xb = b + static_cast<double>(j) * a;
                if (xb > x_lo + 1e-13 && xb < x_hi - 1e-13) wbreaks.push_back(xb);
            }
        std::sort(wbreaks.begin(), wbreaks.end());
        wbreaks.erase(std::unique(wbreaks.begin(), wbreaks.end(),
                                  [](double p, double q) { return std::abs(p - q) < 1e-13; }),
                      wbreaks.end());
        std::size_t bidx = 0;

        auto advance_and_store = [&](double cell_hi, std::size_t slot) {
            while (bidx < wbreaks.size() && wbreaks[bidx] < cell_hi - 1e-13) {
                win.step_to(wbreaks[bidx]);
                ++bidx;
            }
            win.step_to(cell_hi);
            const Vec2 v = win.top_value();
            if (!std::isfinite(v[0].real()) || !std::isfinite(v[0].imag()) ||
                !std::isfinite(v[1].real()) || !std::isfinite(v[1].imag()))
                throw_nonfinite(cell_hi);
            trace.values[slot] = v;
        };

        for (long i = node_lo; i < node_hi; ++i)
            advance_and_store(static_cast<double>(i + 1) * eta, static_cast<std::size_t>(i + 1));
        if (ends_at_pi) advance_and_store(kPi, trace.values.size() - 1);
    }
    return trace;
}

std::array<cplx, 2> charfn_at(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda,
                              const SolverOptions& opts) {
    const SolutionTrace trace = evolve_fundamental(pp, cfg, lambda, opts);
    return trace.values.back();
}

CharfnTable charfn_table(const PotentialPair& pp, const DelayConfig& cfg,
                         std::span<const cplx> lambda_grid, const SolverOptions& opts) {
    CharfnTable table;
    table.lambda_grid.assign(lambda_grid.begin(), lambda_grid.end());
    table.delta1.reserve(lambda_grid.size());
    table.delta2.reserve(lambda_grid.size());
    for (cplx lam : lambda_grid) {
        auto d = charfn_at(pp, cfg, lam, opts);
        table.delta1.push_back(d[0]);
        table.delta2.push_back(d[1]);
    }
    return table;
}

AdaptiveCharfn::AdaptiveCharfn(PotentialPair pp, DelayConfig cfg, AdaptiveOptions opts)
    : pp_(std::move(pp)), cfg_(cfg), opts_(opts), m_(opts.m_start) {
    if (opts_.m_start < 8) throw Error(Errc::invalid_argument, "m_start must be >= 8");
    if (opts_.m_cap < opts_.m_start)
        throw Error(Errc::invalid_argument, "m_cap must be >= m_start");
}

std::array<cplx, 2> AdaptiveCharfn::eval_fixed(cplx lambda, int m) const {
    return charfn_at(pp_, cfg_, lambda, SolverOptions{m});
}

std::array<cplx, 2> AdaptiveCharfn::operator()(cplx lambda) {
    // Verify the pair (m/2, m) so a settled ratchet keeps its resolution
    // instead of climbing by one doubling per call.
    int m = std::max(opts_.m_start, m_ / 2);
    auto prev = eval_fixed(lambda, m);
    while (m < opts_.m_cap) {
        auto next = eval_fixed(lambda, 2 * m);
        const double scale =
            std::max({1.0, std::abs(next[0]), std::abs(next[1])});
        const double diff =
            std::max(std::abs(next[0] - prev[0]), std::abs(next[1] - prev[1]));
        m *= 2;
        prev = next;
        if (diff < opts_.tol * scale) break;
    }
    if (m > m_) m_ = m;
    return prev;
}

}  // namespace dd
