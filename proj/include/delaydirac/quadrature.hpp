#ifndef DELAYDIRAC_QUADRATURE_HPP
#define DELAYDIRAC_QUADRATURE_HPP

#include <functional>
#include <span>
#include <vector>

#include "delaydirac/types.hpp"

namespace dd {

/// Gauss-Legendre nodes/weights on the reference interval [-1, 1].
/// Exact for polynomials of degree <= 2g - 1.
struct QuadratureRule {
    int g = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    static QuadratureRule gauss_legendre(int g);
};

/// Cached rule lookup; rules are built once per order.
const QuadratureRule& gl_rule(int g);

/// Integrates f over [lo, hi] with one Gauss-Legendre rule of order g.
cplx gl_integrate(const std::function<cplx(double)>& f, double lo, double hi, int g);

/// Composite integration: the interval is split at the supplied breakpoints,
/// each panel is subdivided until the phase budget |omega| * len stays small,
/// then integrated with the given rule order.  Panels lying outside
/// restrict_spans (when non-empty) are skipped entirely, so structurally zero
/// regions contribute an exact 0.
struct PanelScheme {
    int g = 48;
    double phase_per_panel = 20.0;
};

/// Panel decomposition of [lo, hi]: split at breakpoints, drop panels that
/// miss restrict_spans (when non-empty), subdivide so each panel carries at
/// most phase_per_panel radians of the oscillation omega.
std::vector<std::pair<double, double>> build_panels(
    double lo, double hi, std::span<const double> breakpoints, double omega,
    std::span<const std::pair<double, double>> restrict_spans, const PanelScheme& scheme);

cplx integrate_piecewise(const std::function<cplx(double)>& f, double lo, double hi,
                         std::span<const double> breakpoints, double omega,
                         std::span<const std::pair<double, double>> restrict_spans,
                         const PanelScheme& scheme);

}  // namespace dd

#endif
