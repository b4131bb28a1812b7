#pragma once

// Step functions as the universal function model: distribution functions,
// decreasing rearrangement, weighted quasinorms over (0,B), sums and
// intersections with the split at t = 1, and the embedding decision.

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "lk/functionals.hpp"
#include "lk/quadnum.hpp"
#include "lk/svfunc.hpp"

namespace lk::spaces {

struct Piece {
    double height = 0.0;
    double measure = 0.0;
    // optional geometric support (used by the operator simulations); NaN when
    // the piece simply tiles (0, total measure) in order
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();

    bool has_support() const { return !std::isnan(lo); }
};

struct StepFunction {
    std::vector<Piece> pieces;
    double tail_height = 0.0;  // constant height on a sigma-finite tail

    double total_measure() const {
        double m = 0;
        for (auto& p : pieces) m += p.measure;
        return m;
    }
    void validate() const {
        for (auto& p : pieces) {
            if (!(p.measure > 0)) throw std::invalid_argument("step function: measures must be positive");
            if (!std::isfinite(p.height)) throw std::invalid_argument("step function: heights must be finite");
        }
        if (tail_height < 0) throw std::invalid_argument("step function: negative tail");
    }
    // measure of { |f| > h }
    double distribution(double h) const {
        if (tail_height > h) return kInf;
        double m = 0;
        for (auto& p : pieces)
            if (std::abs(p.height) > h) m += p.measure;
        return m;
    }
};

// Non-increasing, right-continuous rearrangement of |f| on (0, total).
inline StepFunction rearrange(const StepFunction& f) {
    f.validate();
    std::vector<Piece> ps;
    for (auto& p : f.pieces) {
        double h = std::abs(p.height);
        if (h > f.tail_height) ps.push_back({h, p.measure});
    }
    std::stable_sort(ps.begin(), ps.end(),
                     [](const Piece& x, const Piece& y) { return x.height > y.height; });
    StepFunction out;
    out.tail_height = f.tail_height;
    for (auto& p : ps) {
        if (!out.pieces.empty() && out.pieces.back().height == p.height)
            out.pieces.back().measure += p.measure;
        else
            out.pieces.push_back({p.height, p.measure});
    }
    return out;
}

inline bool is_nonincreasing(const StepFunction& f) {
    for (size_t i = 0; i + 1 < f.pieces.size(); ++i)
        if (f.pieces[i].height < f.pieces[i + 1].height) return false;
    return f.pieces.empty() || f.pieces.back().height >= f.tail_height;
}

// ---------------------------------------------------------------------------

struct LKSpaceSpec {
    double p = 1.0, r = 1.0;  // in (0, inf]
    sv::SvPtr a;
    double B = 1.0;  // 1 (finite measure) or inf
    // The p = r = inf spaces assume a non-decreasing weight; when this flag
    // is set a is replaced by its running supremum (reported in the result).
    bool enforce_monotone_convention = true;

    void validate() const {
        if (!(p > 0) || !(r > 0)) throw std::invalid_argument("space: p, r must be positive");
        if (!(B == 1.0 || is_inf(B))) throw std::invalid_argument("space: B is 1 or inf");
        if (!a) throw std::invalid_argument("space: weight required");
    }
};

// Trivial iff p = inf and || t^{-1/r} a ||_{r,(0,1)} = inf.
inline bool nontrivial(const LKSpaceSpec& spec) {
    spec.validate();
    if (!is_inf(spec.p)) return true;
    return !fnl::full_norm_infinite(spec.a, spec.r, quad::Interval::ZeroOne);
}

namespace detail {

// One piece's contribution to int t^{c} w(t)^{r} dt over (t_lo, t_hi) in log
// coordinates, split at t = 1; the weight is supplied as a log evaluable.
inline double piece_log_integral(double c, const quad::LogEval& logw, double r, double lt_lo,
                                 double lt_hi) {
    auto lam = [&](Side side) {
        return [&, side](double y) {
            LogCoord at{side, y};
            return (c + 1.0) * at.log_t() + r * logw(at);
        };
    };
    double acc = -kInf;
    if (lt_lo < 0) {
        double y_hi = -lt_lo;
        double y_lo = std::max(0.0, -std::min(lt_hi, 0.0));
        if (y_hi > y_lo) acc = log_add(acc, quad::detail::integrate_log(lam(Side::Zero), y_lo, y_hi, 1e-10));
    }
    if (lt_hi > 0) {
        double y_lo = std::max(0.0, std::max(lt_lo, 0.0));
        if (lt_hi > y_lo) acc = log_add(acc, quad::detail::integrate_log(lam(Side::Inf), y_lo, lt_hi, 1e-10));
    }
    return acc;
}

// Improper contribution on (0, t_edge) (side zero) or (t_edge, inf).
inline quad::NumVerdict improper_log_integral(double c, const quad::LogEval& logw, double r,
                                              double lt_edge, Side side) {
    auto lam = [&](double off) {
        double y = std::abs(lt_edge) + off;
        LogCoord at{side, y};
        return (c + 1.0) * at.log_t() + r * logw(at);
    };
    return fnl::detail_num::tail_from(lam, 0.0, 1e-9, quad::Protocol{});
}

inline double sup_on_piece(double tilt, const quad::LogEval& logw, double lt_lo, double lt_hi) {
    double best = -kInf;
    const int n = 96;
    for (int i = 0; i <= n; ++i) {
        double lt = lt_lo + (lt_hi - lt_lo) * double(i) / n;
        LogCoord at = lt < 0 ? LogCoord{Side::Zero, -lt} : LogCoord{Side::Inf, lt};
        best = std::max(best, tilt * lt + logw(at));
    }
    return best;
}

}  // namespace detail

// || t^{1/p - 1/r} a(t) f*(t) ||_{r,(0,B)} with the step structure integrated
// exactly piece by piece. The p = r = inf convention replaces a by its
// running supremum; `notice` reports when that normalization fired.
struct QuasinormResult {
    quad::NumVerdict verdict;
    bool running_sup_applied = false;
    bool trivial_space = false;
};

inline QuasinormResult quasinorm_on(const StepFunction& fstar, const LKSpaceSpec& spec,
                                    double t_from, double t_to) {
    spec.validate();
    if (!is_nonincreasing(fstar))
        throw std::invalid_argument("quasinorm: rearrange the function first");
    QuasinormResult out;
    quad::LogEval logw;
    std::shared_ptr<sv::RunningSup> rs;
    if (is_inf(spec.p) && is_inf(spec.r) && spec.enforce_monotone_convention) {
        rs = std::make_shared<sv::RunningSup>(spec.a);
        if (rs->infinite_everywhere) {
            // the normalized weight is +inf everywhere: only f = 0 has a
            // finite norm
            out.running_sup_applied = true;
            out.trivial_space = true;
            out.verdict.tag = fstar.pieces.empty() && fstar.tail_height == 0.0
                                  ? quad::NumTag::Finite
                                  : quad::NumTag::Infinite;
            out.verdict.log_value = out.verdict.tag == quad::NumTag::Finite ? -kInf : kInf;
            return out;
        }
        // flag the normalization when it actually changes the weight
        double v0 = sv::log_eval(*spec.a, LogCoord{Side::Zero, 1e6});
        double v1 = sv::log_eval(*spec.a, LogCoord{Side::Zero, 1.0});
        out.running_sup_applied = v0 > v1 + 1e-12;
        logw = [rs](const LogCoord& at) { return rs->log_sup(at); };
    } else {
        auto a = spec.a;
        logw = [a](const LogCoord& at) { return sv::log_eval(*a, at); };
    }
    if (!nontrivial(spec)) out.trivial_space = true;

    double c = 0.0;  // exponent so that the density is t^{c} a^r against dt
    double rr = spec.r;
    bool sup_norm = is_inf(spec.r);
    if (!sup_norm) c = (recip_index(spec.p) - recip_index(spec.r)) * spec.r;
    double tilt = recip_index(spec.p);

    double upper_limit = std::min(t_to, is_inf(spec.B) ? kInf : 1.0);
    double cursor = 0.0;
    double acc = -kInf;  // integral accumulator (r < inf)
    double best = -kInf; // sup accumulator (r = inf)
    bool infinite = false;
    for (auto& p : fstar.pieces) {
        double lo = cursor, hi = cursor + p.measure;
        cursor = hi;
        double a_lo = std::max(lo, t_from), a_hi = std::min(hi, upper_limit);
        if (!(a_hi > a_lo) || p.height == 0.0) continue;
        double lh = std::log(p.height);
        if (a_lo == 0.0) {
            // improper at 0
            double lt_edge = std::log(a_hi);
            if (sup_norm) {
                // sup over (0, a_hi): ladder scan in y plus deep trend probes
                auto val = [&](double y) {
                    LogCoord at{Side::Zero, y};
                    return tilt * at.log_t() + logw(at);
                };
                double y_edge = std::max(0.0, -lt_edge);
                double b = val(y_edge);
                for (double y = std::max(1e-3, y_edge); y <= 1e12; y *= 1.06) b = std::max(b, val(y));
                double deep1 = val(2.5e13), deep2 = val(1e15);
                if (deep2 > deep1 + 1e-9 && deep1 >= b - 1e-12) { infinite = true; break; }
                best = std::max(best, lh + std::max(b, std::max(deep1, deep2)));
            } else {
                quad::NumVerdict v = detail::improper_log_integral(c, logw, rr, lt_edge, Side::Zero);
                if (v.tag == quad::NumTag::Infinite) { infinite = true; break; }
                if (v.tag == quad::NumTag::Inconclusive) {
                    out.verdict = v;
                    return out;
                }
                acc = log_add(acc, rr * lh + v.log_value);
            }
        } else {
            double lt_lo = std::log(a_lo), lt_hi = std::log(a_hi);
            if (sup_norm)
                best = std::max(best, lh + detail::sup_on_piece(tilt, logw, lt_lo, lt_hi));
            else
                acc = log_add(acc, rr * lh + detail::piece_log_integral(c, logw, rr, lt_lo, lt_hi));
        }
    }
    if (!infinite && fstar.tail_height > 0 && is_inf(upper_limit)) {
        double lh = std::log(fstar.tail_height);
        double lt_edge = std::log(std::max(cursor, 1.0));
        if (sup_norm) {
            auto val = [&](double y) {
                LogCoord at{Side::Inf, y};
                return tilt * at.log_t() + logw(at);
            };
            double b = val(lt_edge);
            for (double y = std::max(1e-3, lt_edge); y <= 1e12; y *= 1.06) b = std::max(b, val(y));
            double deep1 = val(2.5e13), deep2 = val(1e15);
            if (deep2 > deep1 + 1e-9 && deep1 >= b - 1e-12) infinite = true;
            else best = std::max(best, lh + std::max(b, std::max(deep1, deep2)));
        } else {
            quad::NumVerdict v = detail::improper_log_integral(c, logw, rr, lt_edge, Side::Inf);
            if (v.tag == quad::NumTag::Infinite) infinite = true;
            else if (v.tag == quad::NumTag::Inconclusive) { out.verdict = v; return out; }
            else acc = log_add(acc, rr * lh + v.log_value);
        }
    }
    if (infinite) {
        out.verdict.tag = quad::NumTag::Infinite;
        out.verdict.log_value = kInf;
        return out;
    }
    out.verdict.tag = quad::NumTag::Finite;
    out.verdict.log_value = sup_norm ? best : acc / rr;
    out.verdict.rel_err = 1e-8;
    return out;
}

inline QuasinormResult quasinorm(const StepFunction& fstar, const LKSpaceSpec& spec) {
    return quasinorm_on(fstar, spec, 0.0, kInf);
}

// ---------------------------------------------------------------------------

struct SumSpaceSpec {
    // two (p_i, r_i) pairs with p1 != p2 and a shared weight; near-zero and
    // near-infinity germs of the weight may be supplied separately through a
    // per-side expression
    double p1 = 1.0, r1 = 1.0, p2 = kInf, r2 = kInf;
    sv::SvPtr a;
    enum class Mode { Sum, Intersection } mode = Mode::Sum;

    void validate() const {
        if (p1 == p2) throw std::invalid_argument("sum space: p1 and p2 must differ");
        if (!a) throw std::invalid_argument("sum space: weight required");
    }
};

// The sum norm puts the smaller-p pair on (0,1) and the larger on (1,inf);
// the intersection swaps that pairing.
inline QuasinormResult sum_quasinorm(const StepFunction& f, const SumSpaceSpec& spec) {
    spec.validate();
    StepFunction fstar = rearrange(f);
    double pl = spec.p1, rl = spec.r1, ph = spec.p2, rh = spec.r2;
    if (recip_index(pl) < recip_index(ph)) { std::swap(pl, ph); std::swap(rl, rh); }
    // now (pl, rl) is the smaller-p pair
    bool swap_pairing = spec.mode == SumSpaceSpec::Mode::Intersection;
    double p01 = swap_pairing ? ph : pl, r01 = swap_pairing ? rh : rl;
    double p1i = swap_pairing ? pl : ph, r1i = swap_pairing ? rl : rh;

    LKSpaceSpec near_zero{p01, r01, spec.a, kInf};
    LKSpaceSpec near_inf{p1i, r1i, spec.a, kInf};
    QuasinormResult a0 = quasinorm_on(fstar, near_zero, 0.0, 1.0);
    QuasinormResult a1 = quasinorm_on(fstar, near_inf, 1.0, kInf);
    QuasinormResult out;
    out.running_sup_applied = a0.running_sup_applied || a1.running_sup_applied;
    if (a0.verdict.tag == quad::NumTag::Infinite || a1.verdict.tag == quad::NumTag::Infinite) {
        out.verdict.tag = quad::NumTag::Infinite;
        out.verdict.log_value = kInf;
        return out;
    }
    if (a0.verdict.tag == quad::NumTag::Inconclusive) return a0;
    if (a1.verdict.tag == quad::NumTag::Inconclusive) return a1;
    out.verdict.tag = quad::NumTag::Finite;
    out.verdict.log_value = log_add(a0.verdict.log_value, a1.verdict.log_value);
    out.verdict.rel_err = std::max(a0.verdict.rel_err, a1.verdict.rel_err);
    return out;
}

// ---------------------------------------------------------------------------
// Embedding decision between two spaces over the same B.

inline fnl::FinVerdict embeds(const LKSpaceSpec& src, const LKSpaceSpec& dst) {
    src.validate();
    dst.validate();
    if (src.B != dst.B && !(is_inf(src.B) && is_inf(dst.B)))
        throw std::invalid_argument("embeds: spaces live over different measures");
    quad::Interval iv = is_inf(src.B) ? quad::Interval::ZeroInf : quad::Interval::ZeroOne;
    double p = src.p, q = dst.p;
    fnl::FinVerdict out;
    out.method = fnl::FinVerdict::Method::Symbolic;
    if (std::abs(recip_index(p) - recip_index(q)) > 1e-12) {
        // different principal exponents: embeds only on the finite-measure
        // interval with p > q
        if (!is_inf(src.B) && recip_index(p) < recip_index(q)) {
            out.tag = fnl::FinVerdict::Tag::Finite;
            out.note = "finite measure, p > q";
            return out;
        }
        out.tag = fnl::FinVerdict::Tag::Infinite;
        out.note = "principal exponents preclude the embedding";
        fnl::Witness w;
        w.side = Side::Zero;
        out.witness = w;
        return out;
    }
    // p = q
    if (!is_inf(p)) {
        fnl::FunctionalSpec n;
        n.kind = fnl::Kind::N;
        n.r = src.r;
        n.s = dst.r;
        n.a = src.a;
        n.b = dst.a;
        n.interval = iv;
        fnl::FinVerdict v = fnl::evaluate(n);
        v.note = "reduced to N(r,s,a,b)";
        return v;
    }
    // p = q = inf: compare the cumulative norms directly.
    bool sup_case = recip_index(src.r) >= recip_index(dst.r);  // r <= s
    auto a0 = sv::to_symbol(*src.a, Side::Zero);
    auto b0 = sv::to_symbol(*dst.a, Side::Zero);
    auto eval_side = [&](Side side) -> std::optional<fnl::FinVerdict> {
        auto as = sv::to_symbol(*src.a, side), bs = sv::to_symbol(*dst.a, side);
        if (!as || !bs) return std::nullopt;
        asym::Segment lower = side == Side::Zero ? asym::Segment::Inner : asym::Segment::Outer;
        asym::Verdict fb = asym::norm_power_symbol(0.0, *bs, dst.r, lower);
        asym::Verdict fa = asym::norm_power_symbol(0.0, *as, src.r, lower);
        fnl::FinVerdict v;
        v.method = fnl::FinVerdict::Method::Symbolic;
        if (!fa.finite()) {  // source norm saturates: ratio vanishes
            v.tag = fnl::FinVerdict::Tag::Finite;
            return v;
        }
        if (!fb.finite()) {
            v.tag = fnl::FinVerdict::Tag::Infinite;
            v.witness = fnl::detail::make_witness(fb.sym, true);
            return v;
        }
        asym::EndpointSymbol ratio = fb.sym.mul(fa.sym.pow(-1.0));
        if (sup_case) {
            asym::Verdict sup = asym::sup_toward_endpoint(ratio);
            v.tag = sup.finite() ? fnl::FinVerdict::Tag::Finite : fnl::FinVerdict::Tag::Infinite;
            if (!sup.finite()) v.witness = fnl::detail::make_witness(ratio, false);
            return v;
        }
        double rho = 1.0 / (recip_index(dst.r) - recip_index(src.r));
        asym::EndpointSymbol body = bs->pow(dst.r / rho).mul(fb.sym.pow(dst.r / src.r)).mul(fa.sym.pow(-1.0));
        asym::Verdict nrm = asym::integrate_to_endpoint(body.pow(rho));
        v.tag = nrm.finite() ? fnl::FinVerdict::Tag::Finite : fnl::FinVerdict::Tag::Infinite;
        if (!nrm.finite()) v.witness = fnl::detail::make_witness(nrm.sym.pow(1.0 / rho), false);
        return v;
    };
    std::vector<Side> sides{Side::Zero};
    if (is_inf(src.B)) sides.push_back(Side::Inf);
    for (Side side : sides) {
        auto v = eval_side(side);
        if (!v) {
            out.tag = fnl::FinVerdict::Tag::Inconclusive;
            out.note = "weights outside the symbolic calculus";
            return out;
        }
        if (v->tag == fnl::FinVerdict::Tag::Infinite) return *v;
    }
    out.tag = fnl::FinVerdict::Tag::Finite;
    return out;
}

// ---------------------------------------------------------------------------
// CSV: rows "height,measure[,interval_start,interval_end]".

inline StepFunction read_csv(std::istream& in) {
    StepFunction f;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (...) {
                throw std::invalid_argument("csv line " + std::to_string(lineno) + ": bad number");
            }
        }
        if (vals.size() != 2 && vals.size() != 4)
            throw std::invalid_argument("csv line " + std::to_string(lineno) + ": expected 2 or 4 columns");
        if (vals[0] < 0 || vals[1] <= 0)
            throw std::invalid_argument("csv line " + std::to_string(lineno) +
                                        ": heights must be >= 0 and measures > 0");
        Piece p{vals[0], vals[1]};
        if (vals.size() == 4) {
            p.lo = vals[2];
            p.hi = vals[3];
            if (!(p.hi > p.lo)) throw std::invalid_argument("csv line " + std::to_string(lineno) +
                                                            ": empty interval");
            if (std::abs((p.hi - p.lo) - p.measure) > 1e-9 * std::max(1.0, p.measure))
                p.measure = p.hi - p.lo;
        }
        f.pieces.push_back(p);
    }
    f.validate();
    return f;
}

inline void write_csv(std::ostream& outs, const StepFunction& f) {
    outs.precision(17);
    for (auto& p : f.pieces) {
        outs << p.height << "," << p.measure;
        if (p.has_support()) outs << "," << p.lo << "," << p.hi;
        outs << "\n";
    }
}

}  // namespace lk::spaces
