#include "delaydirac/isofamily.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "delaydirac/quadrature.hpp"
#include "delaydirac/series.hpp"

namespace dd {

namespace {

void validate_kernel_support(const DelayConfig& cfg, const PiecewiseFunction& h) {
    if (!(3.0 * cfg.a < kPi))
        throw Error(Errc::domain, "kernel construction needs 3a < pi (delay below pi/3)");
    if (!h.vanishes_on(0.0, 2.5 * cfg.a) || !h.vanishes_on(3.0 * cfg.a, kPi))
        throw Error(Errc::invalid_argument, "h must be supported in (5a/2, 3a)");
}

std::vector<double> midpoint_nodes(double lo, double step, int count) {
    std::vector<double> nodes(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        nodes[static_cast<std::size_t>(i)] = lo + (i + 0.5) * step;
    return nodes;
}

/// Cubic Lagrange stencil over four consecutive uniform nodes.
struct Stencil {
    int start = 0;
    double c[4] = {0, 0, 0, 0};
};

Stencil cubic_stencil(double lo, double step, int count, double t) {
    Stencil st;
    // node j sits at u = j in these coordinates
    const double u = (t - lo) / step - 0.5;
    int i = static_cast<int>(std::floor(u));
    st.start = std::clamp(i - 1, 0, count - 4);
    const double r = u - st.start;
    st.c[0] = -(r - 1.0) * (r - 2.0) * (r - 3.0) / 6.0;
    st.c[1] = r * (r - 2.0) * (r - 3.0) / 2.0;
    st.c[2] = -r * (r - 1.0) * (r - 3.0) / 2.0;
    st.c[3] = r * (r - 1.0) * (r - 2.0) / 6.0;
    return st;
}

/// Quadrature walk of int f(t) h(t + x - a/2) dt over t in (3a/2, 7a/2 - x),
/// aligned with the sample cells of a uniform midpoint grid and split at
/// kernel kinks; calls sink(t, w) with w = gl_weight * h(t + x - a/2).
template <class Sink>
void kernel_quadrature(const DelayConfig& cfg, const PiecewiseFunction& h, double grid_lo,
                       double step, int count, double x, int g, Sink&& sink) {
    const double a = cfg.a;
    const double lo = 1.5 * a;
    const double cut = 3.5 * a - x;
    if (!(cut > lo)) return;

    std::vector<double> hbreaks;
    h.append_breakpoints(hbreaks, true);
    std::vector<double> mapped;
    for (double u : hbreaks) {
        const double t = u - x + 0.5 * a;
        if (t > lo + 1e-13 && t < cut - 1e-13) mapped.push_back(t);
    }
    std::sort(mapped.begin(), mapped.end());

    const QuadratureRule& rule = gl_rule(g);
    for (int cell = -1; cell <= count; ++cell) {
        // cell edges; the half-cells before the first and after the last node
        // are covered by clamped stencils
        double c_lo = (cell < 0) ? lo : grid_lo + (cell + 0.5) * step;
        double c_hi = (cell >= count - 1) ? cut : grid_lo + (cell + 1.5) * step;
        c_lo = std::max(c_lo, lo);
        c_hi = std::min(c_hi, cut);
        if (!(c_hi > c_lo + 1e-15)) continue;

        std::vector<double> pts{c_lo};
        for (double t : mapped)
            if (t > c_lo + 1e-13 && t < c_hi - 1e-13) pts.push_back(t);
        pts.push_back(c_hi);
        for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
            const double half = 0.5 * (pts[s + 1] - pts[s]);
            const double mid = 0.5 * (pts[s + 1] + pts[s]);
            for (int i = 0; i < rule.g; ++i) {
                const double t = mid + half * rule.nodes[static_cast<std::size_t>(i)];
                const double w =
                    half * rule.weights[static_cast<std::size_t>(i)] *
                    h.eval(t + x - 0.5 * a).real();
                sink(t, w);
            }
        }
    }
}

double apply_sampled(const DelayConfig& cfg, const PiecewiseFunction& h, double grid_lo,
                     double step, std::span<const double> f, double x, int g) {
    const int count = static_cast<int>(f.size());
    double acc = 0.0;
    kernel_quadrature(cfg, h, grid_lo, step, count, x, g, [&](double t, double w) {
        const Stencil st = cubic_stencil(grid_lo, step, count, t);
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += st.c[k] * f[static_cast<std::size_t>(st.start + k)];
        acc += w * v;
    });
    return acc;
}

Eigen::MatrixXd build_fine_matrix(const DelayConfig& cfg, const PiecewiseFunction& h,
                                  double grid_lo, double step, int count, int g) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(count, count);
    for (int row = 0; row < count; ++row) {
        const double x = grid_lo + (row + 0.5) * step;
        kernel_quadrature(cfg, h, grid_lo, step, count, x, g, [&](double t, double w) {
            const Stencil st = cubic_stencil(grid_lo, step, count, t);
            for (int k = 0; k < 4; ++k) A(row, st.start + k) += w * st.c[k];
        });
    }
    return A;
}

void fix_sign_and_normalize(std::vector<double>& e, double step) {
    double l2 = 0.0, peak = 0.0;
    for (double v : e) {
        l2 += v * v;
        peak = std::max(peak, std::abs(v));
    }
    l2 = std::sqrt(l2 * step);
    if (l2 == 0.0) return;
    double sign = 1.0;
    for (double v : e) {
        if (std::abs(v) > 1e-3 * peak) {
            sign = (v > 0.0) ? 1.0 : -1.0;
            break;
        }
    }
    const double s = sign / l2;
    for (double& v : e) v *= s;
}

EigenPair refine_pair(const HankelKernelOp& op, double mu0, const Eigen::VectorXd& coarse_vec,
                      const Eigen::MatrixXd& fine_matrix, double fine_lo, double fine_step,
                      int fine_count) {
    // linear carry-over of the coarse vector onto the fine grid
    Eigen::VectorXd e(fine_count);
    const int M = op.grid_size;
    for (int i = 0; i < fine_count; ++i) {
        const double t = fine_lo + (i + 0.5) * fine_step;
        const double u = (t - op.nodes.front()) / op.node_step;
        int j = std::clamp(static_cast<int>(std::floor(u)), 0, M - 2);
        const double r = u - j;
        e(i) = (1.0 - r) * coarse_vec(j) + r * coarse_vec(j + 1);
    }
    e.normalize();

    double mu = mu0;
    for (int iter = 0; iter < 12; ++iter) {
        Eigen::MatrixXd shifted = fine_matrix;
        shifted.diagonal().array() -= mu;
        Eigen::VectorXd z = Eigen::PartialPivLU<Eigen::MatrixXd>(shifted).solve(e);
        const double zn = z.norm();
        if (!std::isfinite(zn) || zn == 0.0) break;
        e = z / zn;
        const double mu_next = e.dot(fine_matrix * e) / e.dot(e);
        const bool settled = std::abs(mu_next - mu) < 1e-14 * std::max(1.0, std::abs(mu_next));
        mu = mu_next;
        if (settled) break;
    }

    EigenPair pair;
    pair.mu = mu;
    pair.grid = midpoint_nodes(fine_lo, fine_step, fine_count);
    pair.e.assign(e.data(), e.data() + fine_count);
    fix_sign_and_normalize(pair.e, fine_step);

    Eigen::VectorXd en = Eigen::Map<Eigen::VectorXd>(pair.e.data(), fine_count);
    pair.residual = std::sqrt(fine_step) * (fine_matrix * en - mu * en).norm();
    return pair;
}

}  // namespace

HankelKernelOp make_hankel_op(const DelayConfig& cfg, const PiecewiseFunction& h, int M) {
    validate_kernel_support(cfg, h);
    if (M < 8) throw Error(Errc::invalid_argument, "kernel grid needs at least 8 nodes");
    HankelKernelOp op;
    op.cfg = cfg;
    op.h = h;
    op.grid_size = M;
    op.node_step = 0.5 * cfg.a / M;
    op.nodes = midpoint_nodes(1.5 * cfg.a, op.node_step, M);
    op.matrix = Eigen::MatrixXd::Zero(M, M);
    for (int p = 0; p < M; ++p)
        for (int q = 0; q < M; ++q) {
            // integer form of t_q + x_p <= 7a/2 keeps the zero set exact
            if (p + q + 1 > M) continue;
            const double arg = op.nodes[static_cast<std::size_t>(q)] +
                               op.nodes[static_cast<std::size_t>(p)] - 0.5 * cfg.a;
            op.matrix(p, q) = op.node_step * h.eval(std::min(arg, kPi)).real();
        }
    return op;
}

double apply_Mh(const HankelKernelOp& op, std::span<const double> f, double x) {
    if (!(x > 1.5 * op.cfg.a) || !(x < 2.0 * op.cfg.a))
        throw Error(Errc::domain, "apply_Mh target x must lie in (3a/2, 2a)");
    if (f.size() != op.nodes.size())
        throw Error(Errc::invalid_argument, "sample count must match the operator grid");
    return apply_sampled(op.cfg, op.h, 1.5 * op.cfg.a, op.node_step, f, x, 8);
}

std::vector<EigenPair> nystrom_eigs(const HankelKernelOp& op, int count) {
    if (op.grid_size < 64)
        throw Error(Errc::invalid_argument, "eigenpair extraction expects a grid of >= 64 nodes");
    if (count < 1) throw Error(Errc::invalid_argument, "count must be positive");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw Error(Errc::numeric, "symmetric eigendecomposition failed");

    const int M = op.grid_size;
    std::vector<int> order(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
    });
    if (std::abs(es.eigenvalues()(order[0])) < 1e-12)
        throw Error(Errc::numeric, "kernel is numerically zero: no usable eigenvalues");

    const int fine_count = 2 * M;
    const double fine_lo = 1.5 * op.cfg.a;
    const double fine_step = 0.5 * op.cfg.a / fine_count;
    const Eigen::MatrixXd fine_matrix =
        build_fine_matrix(op.cfg, op.h, fine_lo, fine_step, fine_count, 8);

    std::vector<EigenPair> pairs;
    const int take = std::min(count, M);
    pairs.reserve(static_cast<std::size_t>(take));
    for (int i = 0; i < take; ++i) {
        const int idx = order[static_cast<std::size_t>(i)];
        pairs.push_back(refine_pair(op, es.eigenvalues()(idx), es.eigenvectors().col(idx),
                                    fine_matrix, fine_lo, fine_step, fine_count));
    }
    return pairs;
}

double nystrom_extend(const HankelKernelOp& op, const EigenPair& pair, double x) {
    if (pair.mu == 0.0) throw Error(Errc::invalid_argument, "eigenpair has zero eigenvalue");
    if (x < 1.5 * op.cfg.a - 1e-12 || x > 2.0 * op.cfg.a + 1e-12)
        throw Error(Errc::domain, "extension point outside [3a/2, 2a]");
    const double step = pair.grid.size() > 1 ? pair.grid[1] - pair.grid[0] : op.node_step;
    return apply_sampled(op.cfg, op.h, 1.5 * op.cfg.a, step, pair.e,
                         std::clamp(x, 1.5 * op.cfg.a + 1e-15, 2.0 * op.cfg.a - 1e-15), 8) /
           pair.mu;
}

namespace {

Segment scaled_segment(const Segment& seg, cplx factor) {
    Segment s = seg;
    switch (s.kind) {
        case ShapeKind::zero:
            break;
        case ShapeKind::constant:
            s.value *= factor;
            break;
        case ShapeKind::cosine:
            s.amplitude *= factor;
            s.offset *= factor;
            break;
        case ShapeKind::samples:
            for (cplx& v : s.samples) v *= factor;
            break;
    }
    return s;
}

/// Shifts the cosine anchor from seg.x0 to new_x0 without changing values.
Segment rebased_cosine(const Segment& seg, double new_x0, double new_x1) {
    Segment s = seg;
    s.phase = seg.phase + seg.angular_frequency * (new_x0 - seg.x0);
    s.x0 = new_x0;
    s.x1 = new_x1;
    return s;
}

/// scale * (fs + theta * gs) restricted to [x0, x1); nullopt when the two
/// shapes do not combine exactly.
std::optional<Segment> combine_on_interval(const Segment* fs, const Segment* gs, double theta,
                                           double scale, double x0, double x1) {
    auto piece = [&](const Segment* s, cplx factor) -> std::optional<Segment> {
        if (!s || s->is_zero_shape()) return Segment::zero(x0, x1);
        Segment out = (s->kind == ShapeKind::cosine) ? rebased_cosine(*s, x0, x1) : *s;
        out.x0 = x0;
        out.x1 = x1;
        if (s->kind == ShapeKind::samples) return std::nullopt;  // resample instead
        return scaled_segment(out, factor);
    };
    auto fpart = piece(fs, cplx(scale));
    auto gpart = piece(gs, cplx(scale * theta));
    if (!fpart || !gpart) return std::nullopt;
    if (fpart->is_zero_shape()) return gpart;
    if (gpart->is_zero_shape()) return fpart;
    if (fpart->kind == ShapeKind::constant && gpart->kind == ShapeKind::constant)
        return Segment::constant(x0, x1, fpart->value + gpart->value);
    if (fpart->kind == ShapeKind::constant && gpart->kind == ShapeKind::cosine)
        return Segment::cosine(x0, x1, gpart->amplitude, gpart->angular_frequency, gpart->phase,
                               gpart->offset + fpart->value);
    if (fpart->kind == ShapeKind::cosine && gpart->kind == ShapeKind::constant)
        return Segment::cosine(x0, x1, fpart->amplitude, fpart->angular_frequency, fpart->phase,
                               fpart->offset + gpart->value);
    if (fpart->kind == ShapeKind::cosine && gpart->kind == ShapeKind::cosine &&
        fpart->angular_frequency == gpart->angular_frequency && fpart->phase == gpart->phase)
        return Segment::cosine(x0, x1, fpart->amplitude + gpart->amplitude,
                               fpart->angular_frequency, fpart->phase,
                               fpart->offset + gpart->offset);
    return std::nullopt;
}

}  // namespace

PiecewiseFunction combine_scaled(const PiecewiseFunction& f, const PiecewiseFunction& g,
                                 double theta, double scale, int dense_samples) {
    if (f.is_identically_zero() && g.is_identically_zero()) return PiecewiseFunction::zero();

    // Per-interval exact combination over the union of the breakpoints.
    std::vector<double> cuts{0.0, kPi};
    for (const Segment& s : f.segments()) cuts.push_back(s.x0);
    for (const Segment& s : g.segments()) cuts.push_back(s.x0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-13; }),
               cuts.end());

    std::vector<Segment> parts;
    bool exact = true;
    for (std::size_t i = 0; i + 1 < cuts.size() && exact; ++i) {
        const double x0 = cuts[i], x1 = cuts[i + 1];
        const double mid = 0.5 * (x0 + x1);
        const Segment* fs = &f.segment_at(mid);
        const Segment* gs = &g.segment_at(mid);
        auto combined = combine_on_interval(fs, gs, theta, scale, x0, x1);
        if (!combined) {
            exact = false;
            break;
        }
        if (!combined->is_zero_shape()) parts.push_back(*combined);
    }
    if (exact) return PiecewiseFunction::from_parts(std::move(parts));

    // Fallback: dense samples over the combined support hull.
    double lo = kPi, hi = 0.0;
    for (const auto& s : f.nonzero_spans()) {
        lo = std::min(lo, s.first);
        hi = std::max(hi, s.second);
    }
    for (const auto& s : g.nonzero_spans()) {
        lo = std::min(lo, s.first);
        hi = std::max(hi, s.second);
    }
    std::vector<cplx> vals(static_cast<std::size_t>(dense_samples));
    for (int i = 0; i < dense_samples; ++i) {
        const double x = lo + (hi - lo) * i / (dense_samples - 1);
        vals[static_cast<std::size_t>(i)] = scale * (f.eval(x) + theta * g.eval(x));
    }
    return PiecewiseFunction::from_parts({Segment::sampled(lo, hi, std::move(vals))});
}

TuneResult tune_h_for_pair(const PiecewiseFunction& h0, const PiecewiseFunction& h1,
                           double theta_lo, double theta_hi, const DelayConfig& cfg,
                           const IsoOptions& opts) {
    validate_kernel_support(cfg, h0);
    validate_kernel_support(cfg, h1);
    if (!(theta_hi > theta_lo))
        throw Error(Errc::invalid_argument, "theta range must be non-empty");

    struct Extremes {
        double pos = 0.0, neg = 0.0;
        bool has_pos = false, has_neg = false;
    };
    auto extremes = [&](double theta) {
        PiecewiseFunction h = combine_scaled(h0, h1, theta, 1.0, opts.dense_samples);
        HankelKernelOp op = make_hankel_op(cfg, h, opts.nystrom_m);
        auto pairs = nystrom_eigs(op, opts.eig_count);
        Extremes e;
        for (const auto& p : pairs) {
            if (p.mu > 0 && (!e.has_pos || p.mu > e.pos)) {
                e.pos = p.mu;
                e.has_pos = true;
            }
            if (p.mu < 0 && (!e.has_neg || p.mu < e.neg)) {
                e.neg = p.mu;
                e.has_neg = true;
            }
        }
        return e;
    };
    auto gap = [&](double theta) {
        Extremes e = extremes(theta);
        if (!e.has_pos || !e.has_neg)
            return e.has_pos ? e.pos : e.neg;  // one-signed spectrum: no pairing here
        return e.pos + e.neg;
    };

    double g_lo = gap(theta_lo), g_hi = gap(theta_hi);
    if (!(g_lo * g_hi < 0.0))
        throw Error(Errc::not_found,
                    "eigenvalue sum does not change sign over the theta range; "
                    "pick a different range or kernel pair");
    double lo = theta_lo, hi = theta_hi;
    for (int it = 0; it < 60 && (hi - lo) > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = gap(mid);
        if (std::abs(gm) < 1e-12) {
            lo = hi = mid;
            break;
        }
        if ((gm < 0.0) == (g_lo < 0.0))
            lo = mid;
        else
            hi = mid;
    }
    const double theta = 0.5 * (lo + hi);
    Extremes e = extremes(theta);
    if (!e.has_pos || e.pos < 1e-6)
        throw Error(Errc::not_found, "tuned kernel lost its positive eigenvalue");

    TuneResult out;
    out.theta = theta;
    out.scale = 1.0 / e.pos;
    out.h = combine_scaled(h0, h1, theta, out.scale, opts.dense_samples);
    return out;
}

namespace {

std::optional<double> constant_kernel_value(const PiecewiseFunction& h, const DelayConfig& cfg) {
    const Segment* found = nullptr;
    for (const Segment& s : h.segments()) {
        if (s.is_zero_shape()) continue;
        if (found) return std::nullopt;
        found = &s;
    }
    if (!found || found->kind != ShapeKind::constant) return std::nullopt;
    if (std::abs(found->value.imag()) > 0.0) return std::nullopt;
    if (std::abs(found->x0 - 2.5 * cfg.a) > 1e-12 || std::abs(found->x1 - 3.0 * cfg.a) > 1e-12)
        return std::nullopt;
    return found->value.real();
}

/// Constant kernels have the closed-form pairs
///   mu_k = (-1)^k c a / ((2k+1) pi),  e_k = cos((2k+1) pi (x - 3a/2) / a).
std::optional<Segment> analytic_eigen_shape(double c, const DelayConfig& cfg, double target_mu,
                                            double tol) {
    const double a = cfg.a;
    for (int k = 0; k <= 12; ++k) {
        const double mu = (k % 2 == 0 ? 1.0 : -1.0) * c * a / ((2 * k + 1) * kPi);
        if (std::abs(mu - target_mu) <= tol) {
            const double amp = 2.0 / std::sqrt(a);  // unit L2 norm on (3a/2, 2a)
            return Segment::cosine(1.5 * a, 2.0 * a, amp, (2 * k + 1) * kPi / a, 0.0);
        }
    }
    return std::nullopt;
}

EigenPair sample_pair_from_segment(const Segment& seg, double mu, const DelayConfig& cfg,
                                   int count) {
    EigenPair pair;
    pair.mu = mu;
    pair.residual = 0.0;
    const double lo = 1.5 * cfg.a;
    const double step = 0.5 * cfg.a / count;
    pair.grid = midpoint_nodes(lo, step, count);
    pair.e.reserve(pair.grid.size());
    for (double x : pair.grid) pair.e.push_back(seg.eval(x).real());
    return pair;
}

Segment dense_segment_from_pair(const HankelKernelOp& op, const EigenPair& pair,
                                const DelayConfig& cfg, int dense) {
    const double lo = 1.5 * cfg.a, hi = 2.0 * cfg.a;
    std::vector<cplx> vals(static_cast<std::size_t>(dense));
    for (int i = 0; i < dense; ++i) {
        const double x = lo + (hi - lo) * i / (dense - 1);
        vals[static_cast<std::size_t>(i)] = nystrom_extend(op, pair, x);
    }
    return Segment::sampled(lo, hi, std::move(vals));
}

}  // namespace

FamilyBuild build_family(const DelayConfig& cfg, const PiecewiseFunction& h, FamilyMode mode,
                         cplx alpha, cplx beta, const IsoOptions& opts) {
    validate_kernel_support(cfg, h);
    if (h.is_identically_zero())
        throw Error(Errc::invalid_argument, "family construction needs a nonzero kernel h");
    if (mode == FamilyMode::p_only && beta != cplx(0.0))
        throw Error(Errc::invalid_argument, "p_only mode fixes beta = 0");
    if (mode == FamilyMode::q_only && alpha != cplx(0.0))
        throw Error(Errc::invalid_argument, "q_only mode fixes alpha = 0");

    const bool need_minus = (mode != FamilyMode::q_only);
    const bool need_plus = (mode != FamilyMode::p_only);

    IsoFamilySpec spec;
    spec.cfg = cfg;
    spec.h = h;
    spec.mode = mode;
    spec.alpha = alpha;
    spec.beta = beta;

    std::optional<Segment> minus_shape, plus_shape;
    if (auto c = constant_kernel_value(h, cfg)) {
        if (need_minus)
            if (auto seg = analytic_eigen_shape(*c, cfg, -1.0, opts.mu_tol)) minus_shape = *seg;
        if (need_plus)
            if (auto seg = analytic_eigen_shape(*c, cfg, +1.0, opts.mu_tol)) plus_shape = *seg;
        spec.analytic_eigenfunctions =
            (!need_minus || minus_shape) && (!need_plus || plus_shape);
    }

    if (spec.analytic_eigenfunctions) {
        if (minus_shape)
            spec.pair_minus = sample_pair_from_segment(*minus_shape, -1.0, cfg, opts.dense_samples);
        if (plus_shape)
            spec.pair_plus = sample_pair_from_segment(*plus_shape, +1.0, cfg, opts.dense_samples);
    } else {
        HankelKernelOp op = make_hankel_op(cfg, h, opts.nystrom_m);
        auto pairs = nystrom_eigs(op, opts.eig_count);
        const EigenPair* minus = nullptr;
        const EigenPair* plus = nullptr;
        for (const auto& p : pairs) {
            if (std::abs(p.mu + 1.0) <= opts.mu_tol && !minus) minus = &p;
            if (std::abs(p.mu - 1.0) <= opts.mu_tol && !plus) plus = &p;
        }
        if (need_minus && !minus)
            throw Error(Errc::not_found,
                        "kernel has no eigenvalue -1 (needed for the p component); "
                        "rescale h or run the tuner");
        if (need_plus && !plus)
            throw Error(Errc::not_found,
                        "kernel has no eigenvalue +1 (needed for the q component); "
                        "rescale h or run the tuner");
        if (minus) {
            spec.pair_minus = *minus;
            minus_shape = dense_segment_from_pair(op, *minus, cfg, opts.dense_samples);
        }
        if (plus) {
            spec.pair_plus = *plus;
            plus_shape = dense_segment_from_pair(op, *plus, cfg, opts.dense_samples);
        }
    }

    PotentialPair pots;
    if (need_minus && alpha != cplx(0.0))
        pots.p = PiecewiseFunction::from_parts({scaled_segment(*minus_shape, alpha)});
    std::vector<Segment> q_parts;
    if (need_plus && beta != cplx(0.0)) q_parts.push_back(scaled_segment(*plus_shape, beta));
    for (const Segment& s : h.segments())
        if (!s.is_zero_shape()) q_parts.push_back(s);
    pots.q = PiecewiseFunction::from_parts(std::move(q_parts));

    return FamilyBuild{std::move(spec), std::move(pots)};
}

std::array<cplx, 2> k_kernels(const PotentialPair& pp, const DelayConfig& cfg, double x,
                              int quad_order) {
    const double a = cfg.a;
    if (!pp.p.vanishes_on(0.0, a) || !pp.q.vanishes_on(0.0, a) ||
        !pp.p.vanishes_on(3.0 * a, kPi) || !pp.q.vanishes_on(3.0 * a, kPi))
        throw Error(Errc::domain, "k_kernels expects potentials supported in (a, 3a)");
    if (!(x > 0.5 * a) || !(x < 2.5 * a))
        throw Error(Errc::domain, "k_kernels argument must lie in (a/2, 5a/2)");

    cplx k1 = pp.p.eval(x + 0.5 * a);
    cplx k2 = pp.q.eval(x + 0.5 * a);
    if (x > a && x < 2.0 * a) {
        std::vector<double> breaks;
        pp.p.append_breakpoints(breaks, true);
        pp.q.append_breakpoints(breaks, true);
        std::vector<double> shifted;
        for (double b : breaks) shifted.push_back(b + x);
        breaks.insert(breaks.end(), shifted.begin(), shifted.end());
        std::sort(breaks.begin(), breaks.end());
        PanelScheme scheme;
        scheme.g = quad_order;
        auto integ = [&](auto&& f) {
            return integrate_piecewise(f, x + a, 3.0 * a, breaks, 0.0, {}, scheme);
        };
        k1 += -integ([&](double t) { return pp.p.eval(t) * pp.q.eval(t - x); }) +
              integ([&](double t) { return pp.q.eval(t) * pp.p.eval(t - x); });
        k2 += -integ([&](double t) { return pp.p.eval(t) * pp.p.eval(t - x); }) -
              integ([&](double t) { return pp.q.eval(t) * pp.q.eval(t - x); });
    }
    return {k1, k2};
}

std::array<cplx, 2> family_charfn_closed(const PiecewiseFunction& h, const DelayConfig& cfg,
                                         cplx lambda) {
    validate_kernel_support(cfg, h);
    const double a = cfg.a;
    std::vector<double> breaks;
    h.append_breakpoints(breaks, true);
    PanelScheme scheme;
    const double omega = 2.0 * std::abs(lambda);
    auto spans = h.nonzero_spans();
    const cplx is = integrate_piecewise(
        [&](double x) { return h.eval(x) * std::sin(lambda * (kPi - 2.0 * x + a)); }, 2.5 * a,
        3.0 * a, breaks, omega, spans, scheme);
    const cplx ic = integrate_piecewise(
        [&](double x) { return h.eval(x) * std::cos(lambda * (kPi - 2.0 * x + a)); }, 2.5 * a,
        3.0 * a, breaks, omega, spans, scheme);
    return {std::sin(lambda * kPi) - is, -std::cos(lambda * kPi) + ic};
}

IsoVerifyReport verify_isospectrality(const PiecewiseFunction& h, const DelayConfig& cfg,
                                      FamilyMode mode,
                                      std::span<const std::pair<cplx, cplx>> params,
                                      std::span<const cplx> lambda_grid, double tol,
                                      const IsoOptions& opts) {
    IsoVerifyReport report;
    report.tol = tol;
    report.all_pass = true;
    for (const auto& [alpha, beta] : params) {
        FamilyBuild fam = build_family(cfg, h, mode, alpha, beta, opts);
        AdaptiveCharfn solver_eval(fam.potentials, cfg, opts.solver);
        IsoVerifySample row;
        row.alpha = alpha;
        row.beta = beta;
        for (cplx lam : lambda_grid) {
            const auto closed = family_charfn_closed(h, cfg, lam);
            const auto via_solver = solver_eval(lam);
            const auto via_series = series_charfn(fam.potentials, cfg, lam, 2);
            row.max_dev_solver = std::max({row.max_dev_solver,
                                           std::abs(via_solver[0] - closed[0]),
                                           std::abs(via_solver[1] - closed[1])});
            row.max_dev_series = std::max({row.max_dev_series,
                                           std::abs(via_series.delta1 - closed[0]),
                                           std::abs(via_series.delta2 - closed[1])});
        }
        row.pass = std::max(row.max_dev_solver, row.max_dev_series) < tol;
        report.all_pass = report.all_pass && row.pass;
        report.samples.push_back(row);
    }
    return report;
}

}  // namespace dd
