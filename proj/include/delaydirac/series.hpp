#ifndef DELAYDIRAC_SERIES_HPP
#define DELAYDIRAC_SERIES_HPP

#include <array>
#include <span>

#include "delaydirac/quadrature.hpp"
#include "delaydirac/types.hpp"

namespace dd {

/// Options for the finite successive-approximation evaluation.  The nested
/// quadrature loses digits once the integrand oscillation outruns the panel
/// budget, so evaluation refuses |lambda| beyond lambda_cap.
struct SeriesOptions {
    int g = 48;
    double lambda_cap = 40.0;
};

/// k-th successive-approximation term of the fundamental solution at x = pi,
/// (s1k, s2k).  Depth is capped at k <= 3; the term is exactly (0, 0) when
/// the nesting region is empty or misses the potential support.
std::array<cplx, 2> series_term(const PotentialPair& pp, const DelayConfig& cfg, int k,
                                cplx lambda, const SeriesOptions& opts = {});

struct SeriesCharfn {
    cplx delta1{};
    cplx delta2{};
    /// True when the truncation at K is provably exact: either K covers all
    /// bracket terms or the support ends early enough that deeper terms
    /// vanish.
    bool exact = false;
};

/// Partial sum sum_{k=0..K} of the characteristic-function terms.
SeriesCharfn series_charfn(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda, int K,
                           const SeriesOptions& opts = {});

/// True when every term beyond K vanishes structurally.
bool series_exactness_holds(const PotentialPair& pp, const DelayConfig& cfg, int K);

/// Entry (row, col) of the matrix product Q(t1) Q(t2) ... Q(tk);
/// row, col are 1-based indices in {1, 2}.
cplx qk_entry(const PotentialPair& pp, std::span<const double> points, int row, int col);

/// Combination transforms (L, M) assembled term-by-term from the same
/// nested integrals, summed for k = 1..K.  Used as an independent route
/// against the evaluator-based combination.
std::array<cplx, 2> series_lm(const PotentialPair& pp, const DelayConfig& cfg, cplx lambda,
                              int K, const SeriesOptions& opts = {});

}  // namespace dd

#endif
