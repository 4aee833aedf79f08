#ifndef DELAYDIRAC_SOLVER_HPP
#define DELAYDIRAC_SOLVER_HPP

#include <array>
#include <span>

#include "delaydirac/types.hpp"

namespace dd {

/// Steps per delay interval; the one-step scheme is classical 4th order.
struct SolverOptions {
    int m = 64;
};

/// Integrates the fundamental solution S(x, lambda) of
///   B y'(x) + Q(x) y(x - a) = lambda y(x),  S(0) = (0, -1),
/// by the method of steps on the delay-aligned grid with step a/m.
///
/// Within each delay window the full stack of delayed components is advanced
/// together in a frame rotating with the free flow, so sub-intervals where
/// every coupling vanishes are propagated exactly and the zero potential
/// reproduces (sin lambda x, -cos lambda x) to rounding.  Steps are split at
/// potential breakpoints (shifted by multiples of a) to keep the integrand
/// smooth inside every step.
SolutionTrace evolve_fundamental(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda,
                                 const SolverOptions& opts = {});

/// Endpoint components (s1(pi), s2(pi)) = (Delta_1, Delta_2).
std::array<cplx, 2> charfn_at(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda,
                              const SolverOptions& opts = {});

/// Pure map of charfn_at over the grid at fixed options.
CharfnTable charfn_table(const PotentialPair& pp, const DelayConfig& cfg,
                         std::span<const cplx> lambda_grid, const SolverOptions& opts = {});

/// Self-refining evaluator: doubles m until two successive evaluations agree
/// to tol (relative to max(1, |Delta|)) or the cap is reached.  The converged
/// m is kept as the starting point for later calls.
struct AdaptiveOptions {
    int m_start = 64;
    int m_cap = 4096;
    double tol = 1e-10;
};

class AdaptiveCharfn {
public:
    AdaptiveCharfn(PotentialPair pp, DelayConfig cfg, AdaptiveOptions opts = {});

    std::array<cplx, 2> operator()(cplx lambda);
    std::array<cplx, 2> eval_fixed(cplx lambda, int m) const;

    int current_m() const { return m_; }
    const DelayConfig& config() const { return cfg_; }

private:
    PotentialPair pp_;
    DelayConfig cfg_;
    AdaptiveOptions opts_;
    int m_;
};

}  // namespace dd

#endif
