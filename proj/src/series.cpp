#include "delaydirac/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dd {

namespace {

struct Mat2 {
    cplx m[2][2]{};

    static Mat2 identity() {
        Mat2 r;
        r.m[0][0] = r.m[1][1] = cplx(1.0);
        return r;
    }
    bool is_zero() const {
        return m[0][0] == cplx(0.0) && m[0][1] == cplx(0.0) && m[1][0] == cplx(0.0) &&
               m[1][1] == cplx(0.0);
    }
    Mat2& operator+=(const Mat2& o) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) m[r][c] += o.m[r][c];
        return *this;
    }
    Mat2 operator*(cplx s) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int c = 0; c < 2; ++c) r.m[i][c] = m[i][c] * s;
        return r;
    }
};

Mat2 q_matrix(const PotentialPair& pp, double t) {
    cplx p = pp.p.eval(t);
    cplx q = pp.q.eval(t);
    Mat2 r;
    r.m[0][0] = p;
    r.m[0][1] = q;
    r.m[1][0] = q;
    r.m[1][1] = -p;
    return r;
}

Mat2 mul(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
}

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

double combined_support_upper(const PotentialPair& pp) {
    return std::max(pp.p.support_upper(), pp.q.support_upper());
}

/// Nested integral over t_1 in (ka, pi), t_2 in ((k-1)a, t_1 - a), ...,
/// of Q(t_1)...Q(t_k) * exp(i*sign*lambda * sum_d (-1)^d 2 t_d).
class Nest {
public:
    Nest(const PotentialPair& pp, const DelayConfig& cfg, int k, cplx lambda, int sign,
         const SeriesOptions& opts)
        : pp_(pp), cfg_(cfg), k_(k), lambda_(lambda), sign_(sign) {
        scheme_.g = opts.g;
        spans_ = merged_spans(pp);
        std::vector<double> base;
        pp.p.append_breakpoints(base, true);
        pp.q.append_breakpoints(base, true);
        for (int j = 0; j < k; ++j)
            for (double b : base) breaks_.push_back(b + j * cfg.a);
        std::sort(breaks_.begin(), breaks_.end());
    }

    Mat2 run() const {
        if (spans_.empty()) return Mat2{};
        return level(1, kPi);
    }

private:
    Mat2 level(int d, double upper) const {
        double lo = (k_ - d + 1) * cfg_.a;
        Mat2 acc;
        if (!(upper > lo)) return acc;
        const double omega = 2.0 * std::abs(lambda_);
        auto panels = build_panels(lo, upper, breaks_, omega, spans_, scheme_);
        const QuadratureRule& rule = gl_rule(scheme_.g);
        const double sgn_d = (d % 2 == 1) ? -1.0 : 1.0;
        const cplx iw = cplx(0.0, 1.0) * static_cast<double>(sign_) * lambda_ * (2.0 * sgn_d);
        for (const auto& [a, b] : panels) {
            const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
            Mat2 panel_acc;
            for (int i = 0; i < rule.g; ++i) {
                double t = mid + half * rule.nodes[static_cast<std::size_t>(i)];
                Mat2 f = q_matrix(pp_, t);
                if (d < k_) {
                    Mat2 inner = level(d + 1, t - cfg_.a);
                    if (inner.is_zero()) continue;
                    f = mul(f, inner);
                }
                panel_acc += f * (std::exp(iw * t) * rule.weights[static_cast<std::size_t>(i)]);
            }
            acc += panel_acc * cplx(half);
        }
        return acc;
    }

    const PotentialPair& pp_;
    DelayConfig cfg_;
    int k_;
    cplx lambda_;
    int sign_;
    PanelScheme scheme_;
    std::vector<double> breaks_;
    std::vector<std::pair<double, double>> spans_;
};

void check_depth_and_lambda(int k, cplx lambda, const SeriesOptions& opts) {
    if (k < 0 || k > 3) {
        std::ostringstream os;
        os << "series depth k = " << k << " unsupported (max 3); use the solver for deep brackets";
        throw Error(Errc::unsupported, os.str());
    }
    if (k >= 1 && std::abs(lambda) > opts.lambda_cap) {
        std::ostringstream os;
        os << "|lambda| = " << std::abs(lambda) << " exceeds the series oscillation cap "
           << opts.lambda_cap;
        throw Error(Errc::unsupported, os.str());
    }
}

}  // namespace

std::array<cplx, 2> series_term(const PotentialPair& pp, const DelayConfig& cfg, int k,
                                cplx lambda, const SeriesOptions& opts) {
    check_depth_and_lambda(k, lambda, opts);
    if (k == 0)
        return {std::sin(lambda * kPi), -std::cos(lambda * kPi)};
    if (k * cfg.a >= kPi) return {cplx(0.0), cplx(0.0)};

    Mat2 nest_plus = Nest(pp, cfg, k, lambda, +1, opts).run();
    Mat2 nest_minus = Nest(pp, cfg, k, lambda, -1, opts).run();
    if (nest_plus.is_zero() && nest_minus.is_zero()) return {cplx(0.0), cplx(0.0)};

    const bool odd = (k % 2 == 1);
    const cplx c0 = lambda * (kPi + (odd ? cfg.a : 0.0));
    const cplx i1(0.0, 1.0);
    Mat2 total_plus = nest_plus * std::exp(i1 * c0);
    Mat2 total_minus = nest_minus * std::exp(-i1 * c0);

    Mat2 C, S;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            C.m[r][c] = 0.5 * (total_plus.m[r][c] + total_minus.m[r][c]);
            S.m[r][c] = (total_plus.m[r][c] - total_minus.m[r][c]) / (2.0 * i1);
        }

    std::array<cplx, 2> out;
    for (int j = 0; j < 2; ++j)
        out[static_cast<std::size_t>(j)] = odd ? (C.m[j][0] - S.m[j][1]) : (S.m[j][0] - C.m[j][1]);
    return out;
}

bool series_exactness_holds(const PotentialPair& pp, const DelayConfig& cfg, int K) {
    if (K >= cfg.bracket_index) return true;
    // Terms beyond K vanish when the support ends at or before (K+1) a:
    // each extra nesting level pushes the outermost variable past the support.
    return combined_support_upper(pp) <= (K + 1) * cfg.a + 1e-12;
}

SeriesCharfn series_charfn(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda, int K,
                           const SeriesOptions& opts) {
    check_depth_and_lambda(K, lambda, opts);
    SeriesCharfn out;
    out.exact = series_exactness_holds(pp, cfg, K);
    for (int k = 0; k <= K; ++k) {
        auto term = series_term(pp, cfg, k, lambda, opts);
        out.delta1 += term[0];
        out.delta2 += term[1];
    }
    return out;
}

cplx qk_entry(const PotentialPair& pp, std::span<const double> points, int row, int col) {
    const int k = static_cast<int>(points.size());
    if (k < 1 || k > 3)
        throw Error(Errc::unsupported, "Q^k product implemented for 1 <= k <= 3");
    if (row < 1 || row > 2 || col < 1 || col > 2)
        throw Error(Errc::invalid_argument, "matrix index must be 1 or 2");
    for (double t : points)
        if (!(t > 0.0) || !(t < kPi))
            throw Error(Errc::domain, "product points must lie inside (0, pi)");
    Mat2 acc = q_matrix(pp, points[0]);
    for (int i = 1; i < k; ++i) acc = mul(acc, q_matrix(pp, points[static_cast<std::size_t>(i)]));
    return acc.m[row - 1][col - 1];
}

std::array<cplx, 2> series_lm(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda,
                              int K, const SeriesOptions& opts) {
    check_depth_and_lambda(K, lambda, opts);
    cplx L(0.0), M(0.0);
    const cplx i1(0.0, 1.0);
    for (int k = 1; k <= K; ++k) {
        if (k * cfg.a >= kPi) continue;
        Mat2 nest = Nest(pp, cfg, k, lambda, +1, opts).run();
        const bool odd = (k % 2 == 1);
        const int phi = odd ? 1 : 0;
        Mat2 total = nest * std::exp(i1 * lambda * (kPi + phi * cfg.a));
        L += total.m[(2 - phi) - 1][0];
        M += ((k % 2 == 0) ? -1.0 : 1.0) * total.m[(1 + phi) - 1][0];
    }
    return {L, M};
}

}  // namespace dd
