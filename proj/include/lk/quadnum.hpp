#pragma once

// Numeric evaluation of weighted norms and improper integrals in log
// coordinates. On (0,1) the substitution t = e^{-y} (and t = e^{y} on
// (1,inf)) turns every t^{-1} dt density into dy and every log tier into a
// smooth function of y, so there are never endpoint singularities in y.
// All integrands are supplied and accumulated as logs of positive values.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lk/common.hpp"

namespace lk::quad {

// log of a positive value at a log coordinate.
using LogEval = std::function<double(const LogCoord&)>;

enum class Interval { ZeroOne, OneInf, ZeroInf };

inline std::string to_string(Interval iv) {
    switch (iv) {
        case Interval::ZeroOne: return "0,1";
        case Interval::OneInf: return "1,inf";
        default: return "0,inf";
    }
}

struct NormSpec {
    double r = 1.0;              // in [1, inf]
    Interval interval = Interval::ZeroOne;
    LogEval log_weight;          // includes every t-power factor
    LogEval log_integrand;       // optional; empty means the constant 1
};

enum class NumTag { Finite, Infinite, Inconclusive };

struct NumVerdict {
    NumTag tag = NumTag::Inconclusive;
    double log_value = -kInf;    // finite: log of the value; infinite: log of last partial
    double rel_err = kInf;       // finite only
    double growth_per_doubling = 0.0;  // infinite only: last observed ratio
    std::vector<double> partials_log;  // partial values at the doubling ladder
    std::vector<double> ladder_y;      // matching Y_max values
    std::string note;

    double value() const { return std::exp(log_value); }
    bool finite() const { return tag == NumTag::Finite; }
};

namespace detail {

// Gauss-Kronrod 15-point nodes/weights on [-1,1] plus the embedded G7 rule.
inline const double kGK15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813};
inline const double kGK15Weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline const double kG7Weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct PanelResult {
    double log_integral;  // log of the panel integral
    double log_error;     // log of |K15 - G7|
};

// Integrate exp(lambda(y)) over [a,b] with GK15; log-scaled internally.
template <typename F>
PanelResult gk15_panel(const F& lambda, double a, double b) {
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    double vals[15];
    double m = -kInf;
    for (int i = 0; i < 15; ++i) {
        vals[i] = lambda(c + h * kGK15Nodes[i]);
        m = std::max(m, vals[i]);
    }
    if (m == -kInf) return {-kInf, -kInf};
    double sk = 0, sg = 0;
    for (int i = 0; i < 15; ++i) sk += kGK15Weights[i] * std::exp(vals[i] - m);
    for (int i = 0; i < 7; ++i) sg += kG7Weights[i] * std::exp(vals[2 * i + 1] - m);
    double diff = std::abs(sk - sg);
    return {m + std::log(sk * h), diff > 0 ? m + std::log(diff * h) : -kInf};
}

// Adaptive integral of exp(lambda) over [a,b]; returns the log value.
template <typename F>
double integrate_log(const F& lambda, double a, double b, double rel_tol, int max_splits = 2000) {
    if (!(b > a)) return -kInf;
    struct Seg { double a, b; PanelResult r; };
    std::vector<Seg> work;
    // Seed panels geometrically in (1+y): resolves all log tiers.
    std::vector<double> knots{a};
    double y = a;
    while (y < b) {
        y = std::min(b, std::max(y * 1.5, y + 0.5));
        knots.push_back(y);
    }
    for (size_t i = 0; i + 1 < knots.size(); ++i)
        work.push_back({knots[i], knots[i + 1], gk15_panel(lambda, knots[i], knots[i + 1])});
    int splits = 0;
    while (splits < max_splits) {
        double total = -kInf, worst_err = -kInf;
        size_t worst = 0;
        for (size_t i = 0; i < work.size(); ++i) {
            total = log_add(total, work[i].r.log_integral);
            if (work[i].r.log_error > worst_err) { worst_err = work[i].r.log_error; worst = i; }
        }
        if (worst_err == -kInf || worst_err < total + std::log(rel_tol) - std::log(4.0 * double(work.size())))
            break;
        Seg s = work[worst];
        double mid = 0.5 * (s.a + s.b);
        work[worst] = {s.a, mid, gk15_panel(lambda, s.a, mid)};
        work.push_back({mid, s.b, gk15_panel(lambda, mid, s.b)});
        ++splits;
    }
    double total = -kInf;
    for (auto& s : work) total = log_add(total, s.r.log_integral);
    return total;
}

}  // namespace detail

// Classification thresholds of the doubling protocol.
struct Protocol {
    double y_start = 64.0;        // 2^6
    double y_end = 1.0995116e12;  // 2^40
    double growth_threshold = 1.05;
    int growth_windows = 3;
    double contraction_max = 0.93;  // tail-extrapolation acceptance
    double class_rel_increment = 0.02;
};

// Classify a non-decreasing sequence of log partials sampled at a doubling
// Y ladder. `tol` is the requested relative tolerance for values. With
// `final` false only the strict exits fire (mid-protocol probing); the
// classification-grade branches (tail extrapolation, log-log slope) are
// reserved for the end of the ladder.
inline NumVerdict classify_partials(const std::vector<double>& partials_log,
                                    const std::vector<double>& ladder_y, double tol,
                                    bool final = true, const Protocol& proto = {}) {
    NumVerdict v;
    v.partials_log = partials_log;
    v.ladder_y = ladder_y;
    size_t n = partials_log.size();
    if (n < 2) { v.note = "too few windows"; return v; }
    double last = partials_log[n - 1];
    if (last == -kInf) {
        // identically zero so far; only a full ladder may conclude that the
        // quantity itself vanishes
        v.tag = final ? NumTag::Finite : NumTag::Inconclusive;
        v.log_value = -kInf;
        v.rel_err = 0.0;
        return v;
    }
    if (last > 690.0) {  // value beyond double range
        v.tag = NumTag::Infinite;
        v.log_value = last;
        v.growth_per_doubling = std::exp(partials_log[n - 1] - partials_log[n - 2]);
        v.note = "saturated";
        return v;
    }
    // Cauchy within tol; the geometric tail estimate sharpens the value.
    if (n >= 3) {
        double d1 = std::expm1(partials_log[n - 1] - partials_log[n - 2]);
        double d2 = std::expm1(partials_log[n - 2] - partials_log[n - 3]);
        if (d1 < tol && d2 < 2 * tol) {
            double tail = (d2 > 0 && d1 > 0 && d1 < d2) ? d1 * (d1 / d2) / (1.0 - d1 / d2) : 0.0;
            v.tag = NumTag::Finite;
            v.log_value = last + std::log1p(tail);
            v.rel_err = std::max(d1 * d1, 1e-15);
            return v;
        }
    }
    if (!final) { v.tag = NumTag::Inconclusive; return v; }
    // Sustained growth over the final windows.
    if (n >= size_t(proto.growth_windows) + 1) {
        bool growing = true;
        for (int k = 0; k < proto.growth_windows; ++k) {
            double ratio = partials_log[n - 1 - k] - partials_log[n - 2 - k];
            if (!(ratio >= std::log(proto.growth_threshold))) { growing = false; break; }
        }
        if (growing) {
            v.tag = NumTag::Infinite;
            v.log_value = last;
            v.growth_per_doubling = std::exp(partials_log[n - 1] - partials_log[n - 2]);
            return v;
        }
    }
    // Contracting-increment extrapolation: increments shrinking geometrically
    // means the tail is summable even when strict Cauchy-within-tol fails.
    if (n >= 4) {
        double i1 = std::expm1(partials_log[n - 1] - partials_log[n - 2]);
        double i2 = std::expm1(partials_log[n - 2] - partials_log[n - 3]);
        double i3 = std::expm1(partials_log[n - 3] - partials_log[n - 4]);
        if (i1 > 0 && i2 > 0 && i3 > 0) {
            double rho1 = i1 / i2, rho2 = i2 / i3;
            if (rho1 <= proto.contraction_max && rho2 <= proto.contraction_max &&
                i1 <= proto.class_rel_increment) {
                double tail = i1 * rho1 / (1.0 - rho1);
                v.tag = NumTag::Finite;
                v.log_value = last + std::log1p(tail);
                v.rel_err = std::max(tol, tail);
                v.note = "tail-extrapolated";
                return v;
            }
        } else if (i1 <= 0 && i2 <= 0) {  // flat to machine precision
            v.tag = NumTag::Finite;
            v.log_value = last;
            v.rel_err = tol;
            return v;
        }
    }
    // Log-log slope of the partials over the last four doublings; resolves
    // iterated-log divergences whose per-doubling ratio has sunk below the
    // plain growth threshold.
    if (n >= 5) {
        double slope = (partials_log[n - 1] - partials_log[n - 5]) /
                       (std::log(ladder_y[n - 1]) - std::log(ladder_y[n - 5]));
        double last_step = partials_log[n - 1] - partials_log[n - 2];
        if (slope >= 0.01 && last_step > 0) {
            v.tag = NumTag::Infinite;
            v.log_value = last;
            v.growth_per_doubling = std::exp(last_step);
            v.note = "slope";
            return v;
        }
        if (std::abs(slope) < 0.001 && last_step < std::log1p(1e-3)) {
            v.tag = NumTag::Finite;
            v.log_value = last;
            v.rel_err = std::max(tol, std::expm1(std::max(0.0, last_step)));
            v.note = "slope-settled";
            return v;
        }
    }
    v.tag = NumTag::Inconclusive;
    v.log_value = last;
    v.note = "trend unresolved";
    return v;
}

namespace detail {

// Extreme-scale trend confirmation: when the unit-per-doubling ladder cannot
// separate iterated-log growth from an iterated-log-slow tail, square the
// cutoff (so log Y doubles each window, up to Y ~ 1e280) and classify the
// partials against the second-log scale.
template <typename AddWindow>
NumVerdict extreme_scale_confirm(std::vector<double> partials, std::vector<double> ladder,
                                 double tol, const AddWindow& add_window) {
    double y = ladder.back();
    double acc = partials.back();
    while (y < 1e280) {
        double ny = std::min(std::pow(y, 2.0), 1e280);
        acc = add_window(acc, y, ny);
        y = ny;
        partials.push_back(acc);
        ladder.push_back(ny);
        if (acc > 690.0) break;
    }
    NumVerdict v;
    v.partials_log = partials;
    v.ladder_y = ladder;
    size_t n = partials.size();
    v.log_value = partials[n - 1];
    if (partials[n - 1] > 690.0) {
        v.tag = NumTag::Infinite;
        v.note = "saturated";
        return v;
    }
    auto slope2 = [&](size_t i) {
        double dl2 = std::log(std::log(ladder[i])) - std::log(std::log(ladder[i - 1]));
        return (partials[i] - partials[i - 1]) / dl2;
    };
    double s_last = slope2(n - 1), s_prev = slope2(n - 2);
    if (s_last >= 0.02 && s_prev >= 0.02) {
        v.tag = NumTag::Infinite;
        v.growth_per_doubling = std::exp(partials[n - 1] - partials[n - 2]);
        v.note = "extreme-scale growth";
        return v;
    }
    if (s_last <= 0.005 && s_last <= s_prev + 1e-12) {
        v.tag = NumTag::Finite;
        v.rel_err = std::max(tol, std::expm1(std::max(0.0, partials[n - 1] - partials[n - 2])));
        v.note = "extreme-scale settled";
        return v;
    }
    v.tag = NumTag::Inconclusive;
    v.note = "trend unresolved at extreme scale";
    return v;
}

// One-sided integral in y over [0, inf) with the doubling protocol.
// lambda(y) is the log integrand for the given side.
template <typename F>
NumVerdict protocol_integral(const F& lambda, double tol, const Protocol& proto) {
    std::vector<double> partials, ladder;
    double acc = -kInf;
    double y_lo = 0.0;
    for (double ymax = proto.y_start; ymax <= proto.y_end * 1.0001; ymax *= 2.0) {
        acc = log_add(acc, integrate_log(lambda, y_lo, ymax, std::min(tol, 1e-9)));
        y_lo = ymax;
        partials.push_back(acc);
        ladder.push_back(ymax);
        NumVerdict probe = classify_partials(partials, ladder, tol, /*final=*/false, proto);
        if (probe.tag == NumTag::Finite && partials.size() >= 3) return probe;
        if (probe.tag == NumTag::Infinite && probe.note == "saturated") return probe;
    }
    NumVerdict fin = classify_partials(partials, ladder, tol, /*final=*/true, proto);
    if (fin.tag != NumTag::Inconclusive) return fin;
    return extreme_scale_confirm(partials, ladder, tol, [&](double acc, double lo, double hi) {
        return log_add(acc, integrate_log(lambda, lo, hi, 1e-7));
    });
}

// One-sided supremum over a log-spaced y grid with the doubling protocol.
template <typename F>
NumVerdict protocol_sup(const F& lambda, double tol, const Protocol& proto) {
    std::vector<double> partials, ladder;
    double best = -kInf;
    double y_lo = 0.0;
    const int per_decade = 32;
    for (double ymax = proto.y_start; ymax <= proto.y_end * 1.0001; ymax *= 2.0) {
        double lo = std::max(y_lo, 1e-3);
        int steps = std::max(8, int(per_decade * std::log10(ymax / lo)) + 1);
        for (int i = 0; i <= steps; ++i) {
            double y = (y_lo == 0.0 && i == 0) ? 0.0 : lo * std::pow(ymax / lo, double(i) / steps);
            best = std::max(best, lambda(y));
        }
        y_lo = ymax;
        partials.push_back(best);
        ladder.push_back(ymax);
        NumVerdict probe = classify_partials(partials, ladder, tol, /*final=*/false, proto);
        if (probe.tag == NumTag::Finite && partials.size() >= 3) {
            probe.rel_err = std::max(probe.rel_err, 1e-4);  // grid resolution
            return probe;
        }
        if (probe.tag == NumTag::Infinite && probe.note == "saturated") return probe;
    }
    NumVerdict v = classify_partials(partials, ladder, tol, /*final=*/true, proto);
    if (v.tag == NumTag::Inconclusive) {
        v = extreme_scale_confirm(partials, ladder, tol, [&](double acc, double lo, double hi) {
            double b = acc;
            int steps = 64;
            for (int i = 1; i <= steps; ++i)
                b = std::max(b, lambda(lo * std::pow(hi / lo, double(i) / steps)));
            return b;
        });
    }
    if (v.tag == NumTag::Finite) v.rel_err = std::max(v.rel_err, 1e-4);
    return v;
}

}  // namespace detail

// || weight * integrand ||_{r, interval}  via the doubling protocol.
// Non-positive weights are the caller's bug; the LogEval encoding makes them
// unrepresentable. tol in [1e-12, 1e-2].
inline NumVerdict weighted_norm(const NormSpec& spec, double tol, const Protocol& proto = {}) {
    if (!(tol >= 1e-12 && tol <= 1e-2)) throw std::invalid_argument("weighted_norm: tol out of range");
    if (!(spec.r >= 1.0)) throw std::invalid_argument("weighted_norm: r must be >= 1");
    auto log_wf = [&](const LogCoord& at) {
        double v = spec.log_weight(at);
        if (spec.log_integrand) v += spec.log_integrand(at);
        return v;
    };
    auto one_side = [&](Side side) -> NumVerdict {
        if (is_inf(spec.r)) {
            auto lam = [&](double y) { return log_wf(LogCoord{side, y}); };
            return detail::protocol_sup(lam, tol, proto);
        }
        auto lam = [&](double y) {
            // dt = -+ t dy; the t factor is (side==Zero ? e^{-y} : e^{y}).
            double lt = side == Side::Zero ? -y : y;
            return spec.r * log_wf(LogCoord{side, y}) + lt;
        };
        NumVerdict v = detail::protocol_integral(lam, tol, proto);
        if (v.tag == NumTag::Finite) v.log_value /= spec.r;
        return v;
    };
    switch (spec.interval) {
        case Interval::ZeroOne: return one_side(Side::Zero);
        case Interval::OneInf: return one_side(Side::Inf);
        default: {
            NumVerdict a = one_side(Side::Zero);
            NumVerdict b = one_side(Side::Inf);
            if (a.tag == NumTag::Infinite) return a;
            if (b.tag == NumTag::Infinite) return b;
            if (a.tag == NumTag::Inconclusive) return a;
            if (b.tag == NumTag::Inconclusive) return b;
            NumVerdict out = a;
            if (is_inf(spec.r)) out.log_value = std::max(a.log_value, b.log_value);
            else out.log_value = log_add(spec.r * a.log_value, spec.r * b.log_value) / spec.r;
            out.rel_err = std::max(a.rel_err, b.rel_err);
            return out;
        }
    }
}

// Classify a monotone non-decreasing partial sampler Y -> partial value (log).
// Fits the slope of log(partial) against log(Y) over the last four doublings.
inline NumVerdict detect_divergence(const std::function<double(double)>& log_partial_at,
                                    const Protocol& proto = {}) {
    std::vector<double> partials, ladder;
    double prev = -kInf;
    for (double ymax = proto.y_start; ymax <= proto.y_end * 1.0001; ymax *= 2.0) {
        double p = log_partial_at(ymax);
        if (p < prev - 1e-9 * std::max(1.0, std::abs(prev)))
            throw std::invalid_argument("detect_divergence: partials not monotone");
        prev = std::max(prev, p);
        partials.push_back(prev);
        ladder.push_back(ymax);
        if (partials.size() >= 5) {
            size_t n = partials.size();
            double num = partials[n - 1] - partials[n - 5];
            double den = std::log(ladder[n - 1]) - std::log(ladder[n - 5]);
            double slope = num / den;
            double last_step = partials[n - 1] - partials[n - 2];
            if (slope >= 0.01 && partials[n-1] > partials[n-5]) continue;  // keep confirming growth
            if (std::abs(slope) < 0.001 && last_step < std::log1p(1e-6)) {
                NumVerdict v;
                v.tag = NumTag::Finite;
                v.log_value = partials[n - 1];
                v.rel_err = std::expm1(std::max(0.0, last_step));
                v.partials_log = partials;
                v.ladder_y = ladder;
                return v;
            }
        }
    }
    NumVerdict v;
    v.partials_log = partials;
    v.ladder_y = ladder;
    size_t n = partials.size();
    double slope = (partials[n - 1] - partials[n - 5]) /
                   (std::log(ladder[n - 1]) - std::log(ladder[n - 5]));
    if (slope >= 0.01) {
        v.tag = NumTag::Infinite;
        v.log_value = partials[n - 1];
        v.growth_per_doubling = std::exp(partials[n - 1] - partials[n - 2]);
    } else if (std::abs(slope) < 0.001) {
        v.tag = NumTag::Finite;
        v.log_value = partials[n - 1];
        v.rel_err = std::expm1(std::max(0.0, partials[n - 1] - partials[n - 2]));
    } else {
        v.tag = NumTag::Inconclusive;
        v.log_value = partials[n - 1];
        v.note = "slope " + std::to_string(slope);
    }
    return v;
}

// Cumulative integral F(y) = int_0^y exp(lambda(u)) du on one side, cached on
// a log-spaced knot ladder; queries interpolate by integrating the local gap.
class CumulativeLogIntegral {
  public:
    CumulativeLogIntegral(std::function<double(double)> lambda, double y_max, int knots_per_decade = 48)
        : lambda_(std::move(lambda)) {
        knots_.push_back(0.0);
        prefix_log_.push_back(-kInf);
        double y = 0.0;
        double step0 = 0.25;
        while (y < y_max) {
            double ny = std::min(y_max, std::max(y + step0, y * std::pow(10.0, 1.0 / knots_per_decade)));
            double seg = detail::integrate_log(lambda_, y, ny, 1e-10);
            prefix_log_.push_back(log_add(prefix_log_.back(), seg));
            knots_.push_back(ny);
            y = ny;
        }
    }
    // log of int_0^y
    double log_prefix(double y) const {
        auto it = std::upper_bound(knots_.begin(), knots_.end(), y);
        size_t idx = size_t(it - knots_.begin()) - 1;
        if (idx + 1 >= knots_.size()) return prefix_log_.back();
        double seg = detail::integrate_log(lambda_, knots_[idx], y, 1e-10);
        return log_add(prefix_log_[idx], seg);
    }
    // log of int_y^{ymax}
    double log_suffix(double y) const { return log_sub(prefix_log_.back(), log_prefix(y)); }
    double y_max() const { return knots_.back(); }

  private:
    std::function<double(double)> lambda_;
    std::vector<double> knots_;
    std::vector<double> prefix_log_;
};

}  // namespace lk::quad
