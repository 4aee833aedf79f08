#ifndef DELAYDIRAC_SPECTRUM_HPP
#define DELAYDIRAC_SPECTRUM_HPP

#include <functional>

#include "delaydirac/types.hpp"

namespace dd {

struct RootSearchOptions {
    double disk_radius = 0.25;
    double newton_tol = 1e-11;
    int max_newton = 60;
    int contour_points = 256;
};

/// Evaluator of a single characteristic function.  coarse (when set) is a
/// cheaper surrogate used only for contour counting; fine is used for root
/// polishing and defaults for both.
struct DeltaFn {
    std::function<cplx(cplx)> fine;
    std::function<cplx(cplx)> coarse;

    cplx eval_fine(cplx z) const { return fine(z); }
    cplx eval_coarse(cplx z) const { return coarse ? coarse(z) : fine(z); }
};

/// Locates eigenvalues near the asymptotic centers n + (1-j)/2 for
/// n in [-n_max, n_max]: counts zeros inside the disk of disk_radius by the
/// argument principle, refines single zeros by Newton iteration with a
/// central-difference derivative, and flags disks whose count is not one.
Spectrum locate_eigenvalues(const DeltaFn& delta, int j, int n_max,
                            const RootSearchOptions& opts = {});

/// Zero count of f inside the axis-aligned rectangle [lo.re, hi.re] x
/// [lo.im, hi.im] by the winding of the boundary image.
int count_zeros_rectangle(const std::function<cplx(cplx)>& f, cplx lo, cplx hi,
                          int points_per_side = 512);

/// Truncated Hadamard-product reconstruction of Delta_j from a complete
/// spectrum.  Entries are multiplied in symmetric pairs (n with -n for j = 1,
/// n with 1-n for j = 2) so the exponential convergence factors cancel
/// exactly; the omitted tail is compensated by its analytic second-order
/// estimate.  The overall sign follows the conventions Delta_1 ~ sin(l pi),
/// Delta_2 ~ -cos(l pi).
cplx hadamard_delta(const Spectrum& spec, cplx lambda);

/// max_n |lambda_{n,j} - (n + (1-j)/2)| over the complete spectrum.
double ambarzumian_residual(const Spectrum& spec);

/// Windowed transforms used when peeling supports from the right endpoint:
///   F = exp(i l (2 pi - (nu+1) a)) * int_{pi-(nu+1)a/2}^{pi-nu a/2} p(t) exp(-2 i l t) dt
/// and G likewise with q.  Requires the potentials to vanish structurally on
/// (pi - nu a / 2, pi) and the window to sit above 2a.
struct WindowTransforms {
    int nu = 0;
    cplx F{};
    cplx G{};
    cplx lambda{};
};

WindowTransforms window_transforms(const PotentialPair& pp, const DelayConfig& cfg, int nu,
                                   cplx lambda);

}  // namespace dd

#endif
