#include "delaydirac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dd {

QuadratureRule QuadratureRule::gauss_legendre(int g) {
    if (g < 1) throw Error(Errc::invalid_argument, "quadrature order must be positive");
    QuadratureRule rule;
    rule.g = g;
    rule.nodes.resize(static_cast<std::size_t>(g));
    rule.weights.resize(static_cast<std::size_t>(g));
    // Newton iteration on P_g with the Chebyshev-angle initial guess.
    for (int i = 0; i < g; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (g + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            if (g == 1) p1 = x;
            for (int k = 2; k <= g; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            // p1 = P_g(x), p0 = P_{g-1}(x)
            pp = g * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    std::reverse(rule.nodes.begin(), rule.nodes.end());
    std::reverse(rule.weights.begin(), rule.weights.end());
    return rule;
}

const QuadratureRule& gl_rule(int g) {
    static std::map<int, QuadratureRule> cache;
    auto it = cache.find(g);
    if (it == cache.end()) it = cache.emplace(g, QuadratureRule::gauss_legendre(g)).first;
    return it->second;
}

cplx gl_integrate(const std::function<cplx(double)>& f, double lo, double hi, int g) {
    if (!(hi > lo)) return cplx(0.0);
    const QuadratureRule& rule = gl_rule(g);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    cplx acc(0.0);
    for (int i = 0; i < rule.g; ++i)
        acc += rule.weights[static_cast<std::size_t>(i)] * f(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
    return acc * half;
}

std::vector<std::pair<double, double>> build_panels(
    double lo, double hi, std::span<const double> breakpoints, double omega,
    std::span<const std::pair<double, double>> restrict_spans, const PanelScheme& scheme) {
    std::vector<std::pair<double, double>> panels;
    if (!(hi > lo)) return panels;

    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double b : breakpoints)
        if (b > lo + 1e-14 && b < hi - 1e-14) cuts.push_back(b);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               cuts.end());

    auto overlaps_support = [&](double a, double b) {
        if (restrict_spans.empty()) return true;
        for (const auto& s : restrict_spans)
            if (s.second > a + 1e-14 && s.first < b - 1e-14) return true;
        return false;
    };

    const double phase_cap = std::max(scheme.phase_per_panel, 1e-6);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        if (!overlaps_support(a, b)) continue;
        int pieces = 1 + static_cast<int>(std::abs(omega) * (b - a) / phase_cap);
        double step = (b - a) / pieces;
        for (int p = 0; p < pieces; ++p)
            panels.emplace_back(a + p * step, a + (p + 1) * step);
    }
    return panels;
}

cplx integrate_piecewise(const std::function<cplx(double)>& f, double lo, double hi,
                         std::span<const double> breakpoints, double omega,
                         std::span<const std::pair<double, double>> restrict_spans,
                         const PanelScheme& scheme) {
    cplx acc(0.0);
    for (const auto& [a, b] : build_panels(lo, hi, breakpoints, omega, restrict_spans, scheme))
        acc += gl_integrate(f, a, b, scheme.g);
    return acc;
}

}  // namespace dd
