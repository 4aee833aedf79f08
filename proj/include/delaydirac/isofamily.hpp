#ifndef DELAYDIRAC_ISOFAMILY_HPP
#define DELAYDIRAC_ISOFAMILY_HPP

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "delaydirac/solver.hpp"
#include "delaydirac/types.hpp"

namespace dd {

/// Discretized Hankel-type integral operator
///   (M_h f)(x) = int_{3a/2}^{7a/2 - x} f(t) h(t + x - a/2) dt,  x in (3a/2, 2a),
/// for a real kernel function h supported in (5a/2, 3a).  The matrix uses
/// midpoint nodes and weights; entries with t_q + x_p > 7a/2 are exactly
/// zero and the matrix is symmetric by construction.
struct HankelKernelOp {
    DelayConfig cfg;
    PiecewiseFunction h;
    int grid_size = 0;          // M
    double node_step = 0.0;     // (a/2) / M
    std::vector<double> nodes;  // midpoints on (3a/2, 2a)
    Eigen::MatrixXd matrix;
};

HankelKernelOp make_hankel_op(const DelayConfig& cfg, const PiecewiseFunction& h, int M);

/// Quadrature of int f(t) h(t + x - a/2) dt over (3a/2, 7a/2 - x) for a
/// function given by samples on the operator grid (cubic interpolation,
/// integration cells aligned with the sample cells, exact truncation at the
/// support cut).  x must lie in (3a/2, 2a).
double apply_Mh(const HankelKernelOp& op, std::span<const double> f, double x);

/// Eigenpair of M_h refined on a grid twice as fine as the operator grid;
/// e is L2-normalized on (3a/2, 2a) with its first significant sample
/// positive, and residual = ||M_h e - mu e||_2 on that finer grid.
struct EigenPair {
    double mu = 0.0;
    std::vector<double> grid;  // refinement nodes
    std::vector<double> e;     // eigenfunction samples on grid
    double residual = 0.0;
};

/// The count eigenpairs of largest |mu|, each refined by Rayleigh-quotient
/// iteration against the fine cut-exact discretization and residual-checked.
std::vector<EigenPair> nystrom_eigs(const HankelKernelOp& op, int count);

/// Kernel value of the continuous eigenfunction extension
/// e(x) = (M_h e)(x) / mu, evaluable anywhere on [3a/2, 2a].
double nystrom_extend(const HankelKernelOp& op_fine_kernel, const EigenPair& pair, double x);

struct IsoOptions {
    int nystrom_m = 200;     // coarse grid size
    int eig_count = 8;       // eigenpairs examined when hunting for +-1
    double mu_tol = 1e-7;    // acceptance window around +-1
    int dense_samples = 4096;  // sampling density of eigenfunction shapes
    AdaptiveOptions solver{};
};

/// Scales theta so that h0 + theta h1 carries the eigenvalues +1 and -1
/// simultaneously after multiplication by scale: bisection on the sum of the
/// largest positive and the most negative eigenvalue.
struct TuneResult {
    double theta = 0.0;
    double scale = 0.0;
    PiecewiseFunction h;  // scale * (h0 + theta h1)
};

TuneResult tune_h_for_pair(const PiecewiseFunction& h0, const PiecewiseFunction& h1,
                           double theta_lo, double theta_hi, const DelayConfig& cfg,
                           const IsoOptions& opts = {});

/// scale * (f + theta g); exact shapes when both are single segments on the
/// same interval, dense samples otherwise.
PiecewiseFunction combine_scaled(const PiecewiseFunction& f, const PiecewiseFunction& g,
                                 double theta, double scale, int dense_samples = 4096);

enum class FamilyMode { p_only, q_only, both };

struct IsoFamilySpec {
    DelayConfig cfg;
    PiecewiseFunction h;
    FamilyMode mode = FamilyMode::p_only;
    std::optional<EigenPair> pair_minus;  // mu = -1, shapes p
    std::optional<EigenPair> pair_plus;   // mu = +1, shapes q
    cplx alpha{};
    cplx beta{};
    bool analytic_eigenfunctions = false;  // constant h resolved in closed form
};

struct FamilyBuild {
    IsoFamilySpec spec;
    PotentialPair potentials;
};

/// Builds the family member
///   p = alpha e1 on (3a/2, 2a),
///   q = beta e0 on (3a/2, 2a) plus the h tail on (5a/2, 3a),
/// where e1, e0 are the mu = -1, +1 eigenfunctions of M_h.  Constant h with
/// c = (2k+1) pi / a is resolved with the closed-form cosine eigenfunctions;
/// other kernels go through the Nystrom path.
FamilyBuild build_family(const DelayConfig& cfg, const PiecewiseFunction& h, FamilyMode mode,
                         cplx alpha, cplx beta, const IsoOptions& opts = {});

/// Convolution kernels of the bracket-two reduction, for potentials
/// supported in (a, 3a) and x in (a/2, 5a/2):
///   K1(x) = p(x + a/2) - int_{x+a}^{3a} p(t) q(t-x) dt + int_{x+a}^{3a} q(t) p(t-x) dt
///   K2(x) = q(x + a/2) - int_{x+a}^{3a} p(t) p(t-x) dt - int_{x+a}^{3a} q(t) q(t-x) dt
/// with the integral corrections active on (a, 2a) only.
std::array<cplx, 2> k_kernels(const PotentialPair& pp, const DelayConfig& cfg, double x,
                              int quad_order = 32);

/// Closed-form characteristic functions of the family:
///   Delta_1 = sin(l pi) - int_{5a/2}^{3a} h(x) sin(l (pi - 2x + a)) dx
///   Delta_2 = -cos(l pi) + int_{5a/2}^{3a} h(x) cos(l (pi - 2x + a)) dx
std::array<cplx, 2> family_charfn_closed(const PiecewiseFunction& h, const DelayConfig& cfg,
                                         cplx lambda);

struct IsoVerifySample {
    cplx alpha{};
    cplx beta{};
    double max_dev_solver = 0.0;
    double max_dev_series = 0.0;
    bool pass = false;
};

struct IsoVerifyReport {
    std::vector<IsoVerifySample> samples;
    double tol = 0.0;
    bool all_pass = false;
};

/// For each (alpha, beta) builds the member and compares its characteristic
/// functions, computed by the stepping solver and by the exact bracket-two
/// series, against the closed form over the lambda grid.
IsoVerifyReport verify_isospectrality(const PiecewiseFunction& h, const DelayConfig& cfg,
                                      FamilyMode mode,
                                      std::span<const std::pair<cplx, cplx>> params,
                                      std::span<const cplx> lambda_grid, double tol,
                                      const IsoOptions& opts = {});

}  // namespace dd

#endif
