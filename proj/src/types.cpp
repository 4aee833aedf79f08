#include "delaydirac/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dd {

namespace {

constexpr double kJoinTol = 1e-12;

bool all_zero(const std::vector<cplx>& v) {
    for (const cplx& z : v)
        if (z != cplx(0.0, 0.0)) return false;
    return true;
}

}  // namespace

DelayConfig make_delay_config(double a) {
    if (!(a > 0.0) || !(a < kPi)) {
        std::ostringstream os;
        os << "delay a = " << a << " outside the legal interval (0, pi)";
        throw Error(Errc::domain, os.str());
    }
    // N is the unique integer with N < pi/a <= N+1, i.e. N = ceil(pi/a) - 1.
    double r = kPi / a;
    double rn = std::nearbyint(r);
    int n;
    if (std::abs(r - rn) < 1e-9 * std::max(1.0, r))
        n = static_cast<int>(rn) - 1;
    else
        n = static_cast<int>(std::ceil(r)) - 1;
    if (n < 1) n = 1;
    return DelayConfig{a, n};
}

Segment Segment::zero(double x0, double x1) {
    Segment s;
    s.x0 = x0;
    s.x1 = x1;
    s.kind = ShapeKind::zero;
    return s;
}

Segment Segment::constant(double x0, double x1, cplx value) {
    Segment s;
    s.x0 = x0;
    s.x1 = x1;
    s.kind = ShapeKind::constant;
    s.value = value;
    return s;
}

Segment Segment::cosine(double x0, double x1, cplx amplitude, double angular_frequency,
                        double phase, cplx offset) {
    Segment s;
    s.x0 = x0;
    s.x1 = x1;
    s.kind = ShapeKind::cosine;
    s.amplitude = amplitude;
    s.angular_frequency = angular_frequency;
    s.phase = phase;
    s.offset = offset;
    return s;
}

Segment Segment::sampled(double x0, double x1, std::vector<cplx> samples) {
    if (samples.size() < 2)
        throw Error(Errc::invalid_argument, "sampled segment needs at least two samples");
    Segment s;
    s.x0 = x0;
    s.x1 = x1;
    s.kind = ShapeKind::samples;
    s.samples = std::move(samples);
    return s;
}

cplx Segment::eval(double x) const {
    switch (kind) {
        case ShapeKind::zero:
            return cplx(0.0);
        case ShapeKind::constant:
            return value;
        case ShapeKind::cosine:
            return offset + amplitude * std::cos(angular_frequency * (x - x0) + phase);
        case ShapeKind::samples: {
            const std::size_t cells = samples.size() - 1;
            double t = (x - x0) / (x1 - x0) * static_cast<double>(cells);
            if (t <= 0.0) return samples.front();
            if (t >= static_cast<double>(cells)) return samples.back();
            std::size_t i = static_cast<std::size_t>(t);
            double f = t - static_cast<double>(i);
            return samples[i] * (1.0 - f) + samples[i + 1] * f;
        }
    }
    return cplx(0.0);
}

bool Segment::is_zero_shape() const {
    switch (kind) {
        case ShapeKind::zero:
            return true;
        case ShapeKind::constant:
            return value == cplx(0.0);
        case ShapeKind::cosine:
            return amplitude == cplx(0.0) && offset == cplx(0.0);
        case ShapeKind::samples:
            return all_zero(samples);
    }
    return true;
}

PiecewiseFunction::PiecewiseFunction() {
    segments_.push_back(Segment::zero(0.0, kPi));
}

PiecewiseFunction PiecewiseFunction::from_parts(std::vector<Segment> parts) {
    for (const Segment& s : parts) {
        if (!(s.x0 < s.x1))
            throw Error(Errc::invalid_argument, "segment has empty or reversed interval");
        if (s.x0 < -kJoinTol || s.x1 > kPi + kJoinTol)
            throw Error(Errc::invalid_argument, "segment extends outside [0, pi]");
    }
    std::sort(parts.begin(), parts.end(),
              [](const Segment& a, const Segment& b) { return a.x0 < b.x0; });
    PiecewiseFunction f;
    f.segments_.clear();
    double cursor = 0.0;
    for (Segment& s : parts) {
        if (s.x0 < cursor - kJoinTol)
            throw Error(Errc::invalid_argument, "segments overlap");
        if (s.x0 > cursor + kJoinTol)
            f.segments_.push_back(Segment::zero(cursor, s.x0));
        else
            s.x0 = cursor;
        cursor = s.x1;
        f.segments_.push_back(std::move(s));
    }
    if (cursor > kPi + kJoinTol) throw Error(Errc::invalid_argument, "segments overrun pi");
    if (cursor < kPi - kJoinTol)
        f.segments_.push_back(Segment::zero(cursor, kPi));
    else
        f.segments_.back().x1 = kPi;
    return f;
}

cplx PiecewiseFunction::eval(double x) const {
    return segment_at(x).eval(x);
}

const Segment& PiecewiseFunction::segment_at(double x) const {
    if (x < 0.0 || x > kPi)
        throw Error(Errc::domain, "evaluation point outside [0, pi]");
    // Right-open convention; x = pi falls to the last segment's left limit.
    std::size_t lo = 0, hi = segments_.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (segments_[mid].x0 <= x)
            lo = mid;
        else
            hi = mid;
    }
    return segments_[lo];
}

bool PiecewiseFunction::is_identically_zero() const {
    for (const Segment& s : segments_)
        if (!s.is_zero_shape()) return false;
    return true;
}

bool PiecewiseFunction::vanishes_on(double lo, double hi) const {
    for (const Segment& s : segments_) {
        if (s.is_zero_shape()) continue;
        if (s.x1 > lo + kJoinTol && s.x0 < hi - kJoinTol) return false;
    }
    return true;
}

std::vector<std::pair<double, double>> PiecewiseFunction::nonzero_spans() const {
    std::vector<std::pair<double, double>> spans;
    for (const Segment& s : segments_) {
        if (s.is_zero_shape()) continue;
        if (!spans.empty() && s.x0 <= spans.back().second + kJoinTol)
            spans.back().second = std::max(spans.back().second, s.x1);
        else
            spans.emplace_back(s.x0, s.x1);
    }
    return spans;
}

double PiecewiseFunction::support_upper() const {
    double u = 0.0;
    for (const Segment& s : segments_)
        if (!s.is_zero_shape()) u = std::max(u, s.x1);
    return u;
}

double PiecewiseFunction::support_lower() const {
    for (const Segment& s : segments_)
        if (!s.is_zero_shape()) return s.x0;
    return kPi;
}

void PiecewiseFunction::append_breakpoints(std::vector<double>& out,
                                           bool include_sample_nodes) const {
    // Dense sample grids are treated as smooth: their interpolation kinks are
    // O(step^2) and splitting at thousands of nodes would blow up nested
    // quadratures.  Coarse grids keep their genuine kinks.
    constexpr std::size_t kDenseSampleCutoff = 257;
    for (const Segment& s : segments_) {
        out.push_back(s.x0);
        if (include_sample_nodes && s.kind == ShapeKind::samples && !s.is_zero_shape() &&
            s.samples.size() <= kDenseSampleCutoff) {
            const std::size_t cells = s.samples.size() - 1;
            double step = (s.x1 - s.x0) / static_cast<double>(cells);
            for (std::size_t i = 1; i < cells; ++i)
                out.push_back(s.x0 + step * static_cast<double>(i));
        }
    }
    out.push_back(kPi);
}

void validate_potentials(const PotentialPair& pp, const DelayConfig& cfg) {
    if (!pp.p.vanishes_on(0.0, cfg.a) || !pp.q.vanishes_on(0.0, cfg.a))
        throw Error(Errc::invalid_argument,
                    "potentials must vanish on (0, a): found a nonzero segment below the delay");
}

std::pair<cplx, cplx> eval_potential(const PotentialPair& pp, double x) {
    if (x < 0.0 || x > kPi)
        throw Error(Errc::domain, "potential evaluation point outside [0, pi]");
    return {pp.p.eval(x), pp.q.eval(x)};
}

Spectrum::Spectrum(int j, int n_max) : j_(j), n_max_(n_max) {
    if (j != 1 && j != 2) throw Error(Errc::invalid_argument, "boundary index j must be 1 or 2");
    if (n_max < 1) throw Error(Errc::invalid_argument, "n_max must be positive");
    entries_.resize(2 * static_cast<std::size_t>(n_max) + 1);
}

SpectrumEntry& Spectrum::at(int n) {
    if (n < -n_max_ || n > n_max_) throw Error(Errc::invalid_argument, "spectrum index out of range");
    return entries_[static_cast<std::size_t>(n + n_max_)];
}

const SpectrumEntry& Spectrum::at(int n) const {
    if (n < -n_max_ || n > n_max_) throw Error(Errc::invalid_argument, "spectrum index out of range");
    return entries_[static_cast<std::size_t>(n + n_max_)];
}

bool Spectrum::complete() const { return flagged_count() == 0; }

int Spectrum::flagged_count() const {
    int c = 0;
    for (const SpectrumEntry& e : entries_)
        if (e.flag != EntryFlag::ok) ++c;
    return c;
}

}  // namespace dd
