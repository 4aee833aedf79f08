#ifndef DELAYDIRAC_TYPES_HPP
#define DELAYDIRAC_TYPES_HPP

#include <array>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dd {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Error codes shared with the C API.
enum class Errc {
    invalid_argument = 1,
    parse            = 2,
    domain           = 3,
    numeric          = 4,
    unsupported      = 5,
    flagged          = 6,
    not_found        = 7,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

/// Delay length a together with the bracket index N determined by
/// pi/(N+1) <= a < pi/N.  The interval length is fixed to pi.
struct DelayConfig {
    double a = 0.0;
    int bracket_index = 0;

    double interval_length() const { return kPi; }
};

/// Builds a DelayConfig, deriving the unique bracket index.
/// Throws Error(domain) unless 0 < a < pi.
DelayConfig make_delay_config(double a);

enum class ShapeKind { zero, constant, cosine, samples };

/// One piece of a piecewise-defined function on [x0, x1).
///
/// cosine evaluates offset + amplitude * cos(angular_frequency * (x - x0) + phase);
/// samples are equally spaced over [x0, x1] inclusive and interpolated
/// linearly.
struct Segment {
    double x0 = 0.0;
    double x1 = 0.0;
    ShapeKind kind = ShapeKind::zero;

    cplx value{};                  // constant
    cplx amplitude{};              // cosine
    double angular_frequency = 0.0;
    double phase = 0.0;
    cplx offset{};                 // cosine DC part
    std::vector<cplx> samples;     // samples, size >= 2

    static Segment zero(double x0, double x1);
    static Segment constant(double x0, double x1, cplx value);
    static Segment cosine(double x0, double x1, cplx amplitude, double angular_frequency,
                          double phase = 0.0, cplx offset = {});
    static Segment sampled(double x0, double x1, std::vector<cplx> samples);

    cplx eval(double x) const;
    bool is_zero_shape() const;
};

/// Piecewise function on [0, pi]; segments are disjoint, ordered and cover
/// the whole interval.  Values at internal joins follow the [x0, x1)
/// convention; eval(pi) takes the left limit.
class PiecewiseFunction {
public:
    PiecewiseFunction();  // identically zero

    /// Sorts the given pieces, verifies they are disjoint and inside
    /// [0, pi], and fills every gap with a zero segment.
    static PiecewiseFunction from_parts(std::vector<Segment> parts);

    static PiecewiseFunction zero() { return PiecewiseFunction(); }

    cplx eval(double x) const;

    /// Segment owning x under the [x0, x1) convention.  Steppers that never
    /// straddle a join resolve the segment once (from an interior point) and
    /// evaluate its shape at the step edges, so boundary stages pick up the
    /// one-sided limit they integrate over.
    const Segment& segment_at(double x) const;

    const std::vector<Segment>& segments() const { return segments_; }

    bool is_identically_zero() const;

    /// Structural check: no nonzero segment intersects (lo, hi).
    bool vanishes_on(double lo, double hi) const;

    /// Intervals on which the function is not structurally zero, merged.
    std::vector<std::pair<double, double>> nonzero_spans() const;

    /// sup of the union of nonzero segments, 0 when identically zero.
    double support_upper() const;
    double support_lower() const;

    /// Collects x-values where the function may lose smoothness: segment
    /// joins and, if requested, the interior sample nodes.
    void append_breakpoints(std::vector<double>& out, bool include_sample_nodes) const;

private:
    std::vector<Segment> segments_;
};

struct PotentialPair {
    PiecewiseFunction p;
    PiecewiseFunction q;
};

/// Checks the defining constraint p = q = 0 on (0, a).  Structural, not
/// sampled: any nonzero segment touching (0, a) is rejected.
void validate_potentials(const PotentialPair& pp, const DelayConfig& cfg);

/// Pointwise values (p(x), q(x)); x must lie in [0, pi].
std::pair<cplx, cplx> eval_potential(const PotentialPair& pp, double x);

/// Fundamental solution sampled on the delay-aligned grid.
struct SolutionTrace {
    std::vector<double> x;
    std::vector<std::array<cplx, 2>> values;  // (s1, s2) per node
    cplx lambda{};
};

enum class EntryFlag { ok, drift, multiple, no_convergence };

struct SpectrumEntry {
    cplx value{};
    EntryFlag flag = EntryFlag::ok;
};

/// Indexed eigenvalue family for boundary condition j in {1, 2}; entries
/// run over n in [-n_max, n_max].
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(int j, int n_max);

    int j() const { return j_; }
    int n_max() const { return n_max_; }

    SpectrumEntry& at(int n);
    const SpectrumEntry& at(int n) const;

    bool complete() const;
    int flagged_count() const;

    /// Asymptotic center n + (1-j)/2.
    static double center(int n, int j) { return n + 0.5 * (1 - j); }

private:
    int j_ = 1;
    int n_max_ = 0;
    std::vector<SpectrumEntry> entries_;
};

struct CharfnTable {
    std::vector<cplx> lambda_grid;
    std::vector<cplx> delta1;
    std::vector<cplx> delta2;
};

}  // namespace dd

#endif
