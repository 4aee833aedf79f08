#ifndef DELAYDIRAC_CHARFN_HPP
#define DELAYDIRAC_CHARFN_HPP

#include <array>
#include <functional>
#include <vector>

#include "delaydirac/series.hpp"
#include "delaydirac/solver.hpp"
#include "delaydirac/types.hpp"

namespace dd {

using DeltaPairFn = std::function<std::array<cplx, 2>(cplx)>;

/// Combination transforms of the characteristic functions:
///   L = (D1(l) + D1(-l) + i (D2(l) - D2(-l))) / 2
///   M = exp(i l pi) + (D2(l) + D2(-l) + i (-D1(l) + D1(-l))) / 2
/// Both vanish identically for the zero potential.
std::array<cplx, 2> lm_at(const DeltaPairFn& delta_eval, cplx lambda);

/// First-order transforms
///   L1 = int_a^pi p(t) exp(i l (pi - 2t + a)) dt,
///   M1 = likewise with q.
std::array<cplx, 2> l1_m1(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda,
                          int quad_order = 48);

/// Log-magnitude growth of the post-first-order remainder of Delta_1 along
/// the ray lambda = i t.  The slope is fitted by least squares over the last
/// half of the samples; the expected ceiling is pi - 2a.
struct AsymptoticFit {
    std::vector<std::pair<double, double>> samples;  // (t, ln |R(it)|)
    double fitted_slope = 0.0;
    double target_slope = 0.0;
    bool degenerate = false;  // remainder identically zero / below noise
};

struct RemainderFitOptions {
    double t_lo = 2.0;
    double t_hi = 12.0;
    int count = 21;
    enum class Engine { automatic, series, solver } engine = Engine::automatic;
    AdaptiveOptions solver_opts{};
    SeriesOptions series_opts{};
};

AsymptoticFit asymptotic_remainder_fit(const PotentialPair& pp, const DelayConfig& cfg,
                                       const RemainderFitOptions& opts = {});

}  // namespace dd

#endif
