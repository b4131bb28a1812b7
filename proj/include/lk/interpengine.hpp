#pragma once

// The boundedness decision engine: given an operator's two-arm profile and a
// source/target pair of weighted spaces, pick the governing quantity for the
// interior, left-limit, right-limit, sum and intersection cases, evaluate it,
// and package the verdict with its certificate. Also the constructors of the
// sharp companion spaces and the regression catalog.

#include <variant>

#include "lk/functionals.hpp"
#include "lk/lkspaces.hpp"
#include "lk/opsim.hpp"

namespace lk::engine {

struct EngineProfile {
    ops::OperatorProfile op;
    Frac rp1{1}, rq1{1}, rp2{0}, rq2{0};  // exact reciprocals of (p1,q1,p2,q2)

    double slope() const { return op.segment.slope(); }
    void validate() const {
        op.segment.validate();
        if (!(rp2 < rp1)) throw std::invalid_argument("profile: need p1 < p2");
        if (rq1 == rq2) throw std::invalid_argument("profile: q1 = q2");
    }
};

inline EngineProfile maximal() { return {ops::profile_maximal(), Frac(1), Frac(1), Frac(0), Frac(0)}; }
inline EngineProfile conjugate() { return {ops::profile_conjugate(), Frac(1), Frac(1), Frac(0), Frac(0)}; }
inline EngineProfile hilbert() { return {ops::profile_hilbert(), Frac(1), Frac(1), Frac(0), Frac(0)}; }
inline EngineProfile riesz_transform() {
    return {ops::profile_riesz_transform(), Frac(1), Frac(1), Frac(0), Frac(0)};
}
inline EngineProfile riesz_potential(Frac gamma, Frac n) {
    EngineProfile p;
    p.op = ops::profile_riesz_potential(gamma.value(), n.value());
    p.rp1 = Frac(1);
    p.rq1 = Frac(1) - gamma / n;
    p.rp2 = gamma / n;
    p.rq2 = Frac(0);
    return p;
}
inline EngineProfile custom(Frac rp1, Frac rq1, Frac rp2, Frac rq2, bool lb1, bool lb2) {
    EngineProfile p;
    p.op.name = "custom";
    p.op.segment = {1.0 / rp1.value(), rq1.num == 0 ? kInf : 1.0 / rq1.value(),
                    rp2.num == 0 ? kInf : 1.0 / rp2.value(), rq2.num == 0 ? kInf : 1.0 / rq2.value()};
    p.op.lb1 = lb1;
    p.op.lb2 = lb2;
    p.rp1 = rp1;
    p.rq1 = rq1;
    p.rp2 = rp2;
    p.rq2 = rq2;
    return p;
}

enum class Case { Interior, Left, Right, Sum, Intersection };

inline std::string to_string(Case c) {
    switch (c) {
        case Case::Interior: return "interior";
        case Case::Left: return "left";
        case Case::Right: return "right";
        case Case::Sum: return "sum";
        default: return "intersection";
    }
}

// One or two (1/p, r, weight) parts. Compound specs carry the split pair.
struct SpacePart {
    Frac rp;       // 1/p, exact
    double r = 1;  // secondary exponent in [1, inf]
    sv::SvPtr weight;
};

struct SpaceSpec {
    SpacePart first;
    std::optional<SpacePart> second;
    bool intersection = false;  // compound mode

    bool compound() const { return second.has_value(); }
};

struct InterpolationQuery {
    EngineProfile profile;
    Case kase = Case::Interior;
    Frac theta{1, 2};  // interior only
    SpaceSpec source, target;
    bool finite_measure = false;
    fnl::Mode mode = fnl::Mode::Auto;
};

struct BoundednessVerdict {
    enum class Bounded { Yes, No, Inconclusive } bounded = Bounded::Inconclusive;
    std::string criterion;  // governing rule, e.g. "left:L"
    std::vector<std::pair<std::string, fnl::FinVerdict>> functionals;
    std::vector<std::string> notes;
};

namespace detail {

inline quad::Interval main_interval(bool finite_measure) {
    return finite_measure ? quad::Interval::ZeroOne : quad::Interval::ZeroInf;
}

inline fnl::FinVerdict eval_named(BoundednessVerdict& out, const std::string& name, fnl::Kind kind,
                                  double r, double s, sv::SvPtr a, sv::SvPtr b, quad::Interval iv,
                                  fnl::Mode mode) {
    fnl::FunctionalSpec spec;
    spec.kind = kind;
    spec.r = r;
    spec.s = s;
    spec.a = std::move(a);
    spec.b = std::move(b);
    spec.interval = iv;
    fnl::FinVerdict v = fnl::evaluate(spec, mode);
    out.functionals.push_back({name, v});
    return v;
}

// Is the weight (quasi-)non-decreasing on the interval, as the p = r = inf
// convention requires? Checked on the germs.
inline bool monotone_convention_holds(const sv::SvPtr& a, quad::Interval iv) {
    auto germ_ok = [&](Side side, bool want_decay_toward_endpoint) {
        auto sym = sv::to_symbol(*a, side);
        if (sym) {
            for (double e : sym->exps) {
                if (std::abs(e) <= asym::kExpEps) continue;
                return want_decay_toward_endpoint ? e < 0 : e > 0;
            }
            return true;  // constant
        }
        double v1 = sv::log_eval(*a, LogCoord{side, 1e2});
        double v2 = sv::log_eval(*a, LogCoord{side, 1e8});
        return want_decay_toward_endpoint ? v2 <= v1 + 1e-9 : v2 >= v1 - 1e-9;
    };
    bool ok = true;
    if (iv != quad::Interval::OneInf) ok = ok && germ_ok(Side::Zero, true);
    if (iv != quad::Interval::ZeroOne) ok = ok && germ_ok(Side::Inf, false);
    return ok;
}

inline void apply_lb_gate(BoundednessVerdict& out, bool lb_available) {
    if (out.bounded == BoundednessVerdict::Bounded::No && !lb_available) {
        out.bounded = BoundednessVerdict::Bounded::Inconclusive;
        out.notes.push_back("no lower bound available: conditions are sufficient only");
    }
}

}  // namespace detail

inline BoundednessVerdict decide(const InterpolationQuery& q) {
    q.profile.validate();
    BoundednessVerdict out;
    double m = q.profile.slope();
    quad::Interval iv = detail::main_interval(q.finite_measure);
    // the finite-measure reduction requires q1 < q2, i.e. 1/q2 < 1/q1
    if (q.finite_measure && !(q.profile.rq2 < q.profile.rq1))
        throw std::invalid_argument("decide: the finite-measure reduction needs q1 < q2");

    auto simple = [&](const SpaceSpec& s) -> const SpacePart& {
        if (s.compound()) throw std::invalid_argument("decide: this case takes simple spaces");
        return s.first;
    };
    auto set_bounded = [&](bool yes) {
        out.bounded = yes ? BoundednessVerdict::Bounded::Yes : BoundednessVerdict::Bounded::No;
    };

    switch (q.kase) {
        case Case::Interior: {
            const SpacePart& src = simple(q.source);
            const SpacePart& dst = simple(q.target);
            if (!(Frac(0) < q.theta) || !(q.theta < Frac(1)))
                throw std::invalid_argument("decide: interior case needs theta strictly inside (0,1)");
            Frac rp = (Frac(1) - q.theta) * q.profile.rp1 + q.theta * q.profile.rp2;
            Frac rq = (Frac(1) - q.theta) * q.profile.rq1 + q.theta * q.profile.rq2;
            if (src.rp != rp)
                throw std::invalid_argument("decide: source index does not sit at theta on the segment");
            if (dst.rp != rq)
                throw std::invalid_argument("decide: target index does not sit at theta on the segment");
            out.criterion = "interior:N";
            fnl::FinVerdict n = detail::eval_named(out, "N", fnl::Kind::N, src.r, dst.r, src.weight,
                                                   sv::substar(dst.weight, m), iv, q.mode);
            if (n.tag == fnl::FinVerdict::Tag::Inconclusive) return out;
            set_bounded(n.finite());
            detail::apply_lb_gate(out, q.profile.op.lb1 || q.profile.op.lb2);
            return out;
        }
        case Case::Left: {
            const SpacePart& src = simple(q.source);
            const SpacePart& dst = simple(q.target);
            if (src.rp != q.profile.rp1 || dst.rp != q.profile.rq1)
                throw std::invalid_argument("decide: left-limit case needs the first endpoint's indices");
            out.criterion = "left:L";
            fnl::FinVerdict l = detail::eval_named(out, "L", fnl::Kind::L, src.r, dst.r, src.weight,
                                                   sv::substar(dst.weight, m), iv, q.mode);
            if (l.tag == fnl::FinVerdict::Tag::Inconclusive) return out;
            set_bounded(l.finite());
            detail::apply_lb_gate(out, q.profile.op.lb1);
            return out;
        }
        case Case::Right: {
            const SpacePart& src = simple(q.source);
            const SpacePart& dst = simple(q.target);
            if (src.rp != q.profile.rp2 || dst.rp != q.profile.rq2)
                throw std::invalid_argument("decide: right-limit case needs the second endpoint's indices");
            if (!(q.profile.rp2 == Frac(0))) {
                out.criterion = "right:R";
                fnl::FinVerdict r = detail::eval_named(out, "R", fnl::Kind::R, src.r, dst.r, src.weight,
                                                       sv::substar(dst.weight, m), iv, q.mode);
                if (r.tag == fnl::FinVerdict::Tag::Inconclusive) return out;
                set_bounded(r.finite());
                detail::apply_lb_gate(out, q.profile.op.lb2);
                return out;
            }
            // p2 = inf
            if (is_inf(src.r) && !detail::monotone_convention_holds(src.weight, iv)) {
                out.criterion = "right:monotone-convention";
                out.bounded = BoundednessVerdict::Bounded::Yes;
                out.notes.push_back(
                    "source weight violates the non-decreasing convention: its running-sup "
                    "normalization is infinite and the source space is trivial");
                return out;
            }
            if (q.profile.op.first_arm_exact) {
                // the two-sided first-arm estimate reduces the endpoint to the
                // averaged inequality, whose sufficient condition is N
                out.criterion = "right:first-arm:N";
                fnl::FinVerdict n = detail::eval_named(out, "N", fnl::Kind::N, src.r, dst.r, src.weight,
                                                       sv::substar(dst.weight, m), iv, q.mode);
                if (n.finite()) {
                    out.bounded = BoundednessVerdict::Bounded::Yes;
                } else {
                    out.bounded = BoundednessVerdict::Bounded::Inconclusive;
                    out.notes.push_back("first-arm route is sufficient only at this endpoint");
                }
                return out;
            }
            out.criterion = q.finite_measure ? "right:Rinf" : "right:(divergence)+Rinf";
            if (!q.finite_measure) {
                bool diverges = fnl::full_norm_infinite(src.weight, src.r, iv);
                fnl::FinVerdict dv;
                dv.method = fnl::FinVerdict::Method::Symbolic;
                dv.tag = diverges ? fnl::FinVerdict::Tag::Infinite : fnl::FinVerdict::Tag::Finite;
                out.functionals.push_back({"||t^-1/r a||_r", dv});
                if (!diverges) {
                    set_bounded(false);
                    out.notes.push_back("companion divergence condition fails");
                    detail::apply_lb_gate(out, q.profile.op.lb2);
                    return out;
                }
            }
            fnl::FinVerdict ri = detail::eval_named(out, "Rinf", fnl::Kind::Rinf, src.r, dst.r,
                                                    src.weight, sv::substar(dst.weight, m), iv, q.mode);
            if (ri.tag == fnl::FinVerdict::Tag::Inconclusive) return out;
            set_bounded(ri.finite());
            detail::apply_lb_gate(out, q.profile.op.lb2);
            return out;
        }
        case Case::Sum:
        case Case::Intersection: {
            if (q.finite_measure)
                throw std::invalid_argument("decide: sum and intersection cases live over infinite measure");
            if (!q.source.compound() || !q.target.compound())
                throw std::invalid_argument("decide: sum and intersection cases take compound spaces");
            const SpacePart& s1 = q.source.first;
            const SpacePart& s2 = *q.source.second;
            const SpacePart& d1 = q.target.first;
            const SpacePart& d2 = *q.target.second;
            if (s1.rp != q.profile.rp1 || s2.rp != q.profile.rp2 || d1.rp != q.profile.rq1 ||
                d2.rp != q.profile.rq2)
                throw std::invalid_argument("decide: compound indices must match the segment endpoints");
            bool inter = q.kase == Case::Intersection;
            sv::SvPtr bsub = sv::substar(q.target.first.weight, m);
            sv::SvPtr a = q.source.first.weight;
            // The L part lives on (0,1) for sums and (1,inf) for intersections;
            // the R / Rinf part on the complementary side.
            quad::Interval l_iv = inter ? quad::Interval::OneInf : quad::Interval::ZeroOne;
            quad::Interval r_iv = inter ? quad::Interval::ZeroOne : quad::Interval::OneInf;
            bool p2_inf = q.profile.rp2 == Frac(0);
            // the convention applies on the side where the second summand lives
            if (p2_inf && is_inf(s2.r) &&
                !detail::monotone_convention_holds(a, inter ? quad::Interval::ZeroOne
                                                            : quad::Interval::OneInf)) {
                out.criterion = to_string(q.kase) + ":monotone-convention";
                out.bounded = BoundednessVerdict::Bounded::Yes;
                out.notes.push_back("second-summand weight normalizes to a trivial space");
                return out;
            }
            out.criterion = to_string(q.kase) + (p2_inf ? ":L+Rinf" : ":L+R");
            bool all_finite = true;
            fnl::FinVerdict l = detail::eval_named(out, "L", fnl::Kind::L, s1.r, d1.r, a, bsub, l_iv, q.mode);
            if (l.tag == fnl::FinVerdict::Tag::Inconclusive) return out;
            all_finite = all_finite && l.finite();
            if (p2_inf && !inter) {
                bool diverges = fnl::full_norm_infinite(a, s2.r, quad::Interval::OneInf);
                fnl::FinVerdict dv;
                dv.method = fnl::FinVerdict::Method::Symbolic;
                dv.tag = diverges ? fnl::FinVerdict::Tag::Infinite : fnl::FinVerdict::Tag::Finite;
                out.functionals.push_back({"||t^-1/r2 a||_{r2,(1,inf)}", dv});
                if (!diverges) {
                    set_bounded(false);
                    out.notes.push_back("companion divergence condition fails");
                    detail::apply_lb_gate(out, q.profile.op.lb1 && q.profile.op.lb2);
                    return out;
                }
            }
            fnl::FinVerdict r = detail::eval_named(out, p2_inf ? "Rinf" : "R",
                                                   p2_inf ? fnl::Kind::Rinf : fnl::Kind::R, s2.r, d2.r,
                                                   a, bsub, r_iv, q.mode);
            if (r.tag == fnl::FinVerdict::Tag::Inconclusive) return out;
            all_finite = all_finite && r.finite();
            set_bounded(all_finite);
            detail::apply_lb_gate(out, q.profile.op.lb1 && q.profile.op.lb2);
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sharp companion spaces.

struct OptimalSpace {
    spaces::LKSpaceSpec space;
    std::string note;
};

namespace detail {

inline sv::SvPtr expr_from_symbol(const asym::EndpointSymbol& s) {
    std::vector<sv::SvPtr> factors;
    if (s.coeff != 1.0) factors.push_back(sv::SvExpr::constant(s.coeff));
    for (size_t i = 0; i < s.exps.size(); ++i)
        if (std::abs(s.exps[i]) > asym::kExpEps)
            factors.push_back(sv::SvExpr::log_tier(int(i) + 1, s.exps[i]));
    return sv::SvExpr::product(std::move(factors));
}

inline asym::EndpointSymbol symbol_argpower(const asym::EndpointSymbol& s, double m) {
    asym::EndpointSymbol out = s;
    out.coeff *= std::pow(std::abs(m), s.exp_at(0));
    return out;
}

// exp-of-power-of-log weights: a = c0 * exp(c * l1^beta) with c < 0.
struct ExpShape {
    double scale = 1.0;
    double c = 0.0;
    double beta = 0.0;
};

inline std::optional<ExpShape> match_exp_shape(const sv::SvExpr& e) {
    if (e.kind == sv::SvExpr::Kind::ExpPowLog && !e.oscillate) return ExpShape{1.0, e.a, e.b};
    if (e.kind == sv::SvExpr::Kind::Product && e.children.size() == 2) {
        if (e.children[0]->kind == sv::SvExpr::Kind::Const &&
            e.children[1]->kind == sv::SvExpr::Kind::ExpPowLog && !e.children[1]->oscillate)
            return ExpShape{e.children[0]->a, e.children[1]->a, e.children[1]->b};
    }
    return std::nullopt;
}

}  // namespace detail

// Sharp target for the limiting cases; the interior case returns the
// canonically paired target space. `s_out` is the secondary exponent of the
// constructed space (the hypotheses need r <= s_out); NaN keeps source.r.
inline OptimalSpace optimal_target(Case kase, const spaces::LKSpaceSpec& source,
                                   const EngineProfile& prof, double s_out_in = std::nan(""),
                                   Frac theta = Frac(1, 2)) {
    prof.validate();
    double m = prof.slope();
    double r = source.r;
    double rp = conj_index(r);
    if (kase == Case::Interior) {
        if (!(Frac(0) < theta) || !(theta < Frac(1)))
            throw std::invalid_argument("optimal: interior case needs theta in (0,1)");
        Frac rq = (Frac(1) - theta) * prof.rq1 + theta * prof.rq2;
        OptimalSpace out;
        out.space.p = rq.num == 0 ? kInf : 1.0 / rq.value();
        out.space.r = source.r;
        out.space.a = sv::SvExpr::arg_power(source.a, m);
        out.space.B = source.B;
        out.note = "canonical interior pairing; optimal within the scale";
        return out;
    }
    auto asym0 = sv::to_symbol(*source.a, Side::Zero);
    double s_out = std::isnan(s_out_in) ? source.r : s_out_in;
    if (recip_index(s_out) > recip_index(r))
        throw std::invalid_argument("optimal target: needs r <= s");
    if (kase == Case::Left) {
        if (!(r > 1.0)) throw std::invalid_argument("optimal target (left): needs r > 1");
        if (!asym0) throw std::invalid_argument("optimal target (left): weight must be a log-power germ");
        asym::Verdict tail = asym::integrate_to_endpoint(asym0->pow(-rp));
        if (!tail.finite())
            throw std::invalid_argument(
                "optimal target (left): hypothesis fails, the reciprocal-power integral diverges");
        asym::EndpointSymbol beta = detail::symbol_argpower(*asym0, m).pow(-rp * recip_index(s_out)).mul(
            detail::symbol_argpower(tail.sym, m).pow(-(1.0 / rp + recip_index(s_out))));
        OptimalSpace out;
        out.space.p = prof.rq1.num == 0 ? kInf : 1.0 / prof.rq1.value();
        out.space.r = s_out;
        out.space.a = detail::expr_from_symbol(beta);
        out.space.B = source.B;
        out.note = "sharp; the limit-form caveat holds by construction for log-power weights";
        return out;
    }
    if (kase != Case::Right) throw std::invalid_argument("optimal: target construction needs a limiting case");
    bool p2_inf = prof.rp2 == Frac(0);
    if (p2_inf) {
        if (!(is_inf(r)))
            throw std::invalid_argument(
                "optimal target (right, p2 = inf): only the r = s = inf route has a sharp formula");
        // beta = (1 + int_{t^m}^1 u^-1 a^-1 du)^{-1}
        if (asym0) {
            asym::Verdict fwd = asym::integrate_from_boundary(asym0->pow(-1.0));
            asym::EndpointSymbol combined = asym::lex_max(fwd.sym, asym::EndpointSymbol::constant(Side::Zero, 1.0));
            asym::EndpointSymbol beta = detail::symbol_argpower(combined, m).pow(-1.0);
            OptimalSpace out;
            out.space.p = kInf;
            out.space.r = kInf;
            out.space.a = detail::expr_from_symbol(beta);
            out.space.B = source.B;
            out.note = "sharp (p2 = inf, r = s = inf route)";
            return out;
        }
        auto shape = detail::match_exp_shape(*source.a);
        if (!shape || !(shape->c < 0))
            throw std::invalid_argument("optimal target (right): weight outside the supported shapes");
        // int_t^1 u^-1 exp(|c| l1^beta) du ~ (1/(|c| beta)) l1^{1-beta} exp(|c| l1^beta)
        double cc = -shape->c, b0 = shape->beta;
        auto tail_expr = sv::SvExpr::product(
            {sv::SvExpr::constant(1.0 / (cc * b0) / shape->scale), sv::SvExpr::log_tier(1, 1.0 - b0),
             sv::SvExpr::exp_pow_log(cc, b0)});
        auto beta_expr = sv::SvExpr::power(tail_expr, -1.0);
        OptimalSpace out;
        out.space.p = kInf;
        out.space.r = kInf;
        out.space.a = beta_expr;
        out.space.B = source.B;
        out.note = "sharp (p2 = inf, r = s = inf route); tail handled asymptotically";
        return out;
    }
    if (!(r > 1.0)) throw std::invalid_argument("optimal target (right): needs r > 1");
    if (!asym0) throw std::invalid_argument("optimal target (right): weight must be a log-power germ");
    asym::Verdict tail = asym::integrate_to_endpoint(asym0->pow(-rp));
    if (tail.finite())
        throw std::invalid_argument(
            "optimal target (right): hypothesis fails, the reciprocal-power integral converges");
    asym::Verdict fwd = asym::integrate_from_boundary(asym0->pow(-rp));
    asym::EndpointSymbol grow = asym::lex_max(fwd.sym, asym::EndpointSymbol::constant(Side::Zero, 1.0));
    asym::EndpointSymbol beta = detail::symbol_argpower(*asym0, m).pow(-rp * recip_index(s_out)).mul(
        detail::symbol_argpower(grow, m).pow(-(1.0 / rp + recip_index(s_out))));
    OptimalSpace out;
    out.space.p = prof.rq2.num == 0 ? kInf : 1.0 / prof.rq2.value();
    out.space.r = s_out;
    out.space.a = detail::expr_from_symbol(beta);
    out.space.B = source.B;
    out.note = "sharp";
    return out;
}

// Sharp source for the limiting cases; `r_in` is the secondary exponent of
// the constructed space (the hypotheses need r <= s); NaN picks r = s.
inline OptimalSpace optimal_source(Case kase, const spaces::LKSpaceSpec& target,
                                   const EngineProfile& prof, double r_in = std::nan(""),
                                   Frac theta = Frac(1, 2)) {
    prof.validate();
    double m = prof.slope();
    double s = target.r;
    if (kase == Case::Interior) {
        if (!(Frac(0) < theta) || !(theta < Frac(1)))
            throw std::invalid_argument("optimal: interior case needs theta in (0,1)");
        Frac rp = (Frac(1) - theta) * prof.rp1 + theta * prof.rp2;
        OptimalSpace out;
        out.space.p = rp.num == 0 ? kInf : 1.0 / rp.value();
        out.space.r = target.r;
        out.space.a = sv::substar(target.a, m);
        out.space.B = target.B;
        out.note = "canonical interior pairing; optimal within the scale";
        return out;
    }
    auto bsub = sv::substar(target.a, m);
    auto bsym = sv::to_symbol(*bsub, Side::Zero);
    if (!bsym) throw std::invalid_argument("optimal source: weight must be a log-power germ");
    double r = std::isnan(r_in) ? s : r_in;
    if (recip_index(s) > recip_index(r))
        throw std::invalid_argument("optimal source: needs r <= s");
    double rp_c = conj_index(r);
    if (kase == Case::Left) {
        if (is_inf(s)) throw std::invalid_argument("optimal source (left): needs s < inf");
        if (asym::integrate_to_endpoint(bsym->pow(s)).finite())
            throw std::invalid_argument(
                "optimal source (left): hypothesis fails, the power integral converges");
        asym::Verdict fwd = asym::integrate_from_boundary(bsym->pow(s));
        asym::EndpointSymbol grow = asym::lex_max(fwd.sym, asym::EndpointSymbol::constant(Side::Zero, 1.0));
        asym::EndpointSymbol alpha =
            bsym->pow(-s / rp_c).mul(grow.pow(1.0 / rp_c + recip_index(s)));
        OptimalSpace out;
        out.space.p = prof.rp1.num == 0 ? kInf : 1.0 / prof.rp1.value();
        out.space.r = r;
        out.space.a = detail::expr_from_symbol(alpha);
        out.space.B = target.B;
        out.note = "sharp; the limit-form caveat holds by construction for log-power weights";
        return out;
    }
    if (kase != Case::Right) throw std::invalid_argument("optimal: source construction needs a limiting case");
    bool p2_inf = prof.rp2 == Frac(0);
    if (p2_inf) {
        if (s != 1.0 || r != 1.0)
            throw std::invalid_argument(
                "optimal source (right, p2 = inf): only the r = s = 1 route has a sharp formula");
        asym::Verdict tail = asym::integrate_to_endpoint(*bsym);
        if (!tail.finite())
            throw std::invalid_argument(
                "optimal source (right): hypothesis fails, the power integral diverges");
        OptimalSpace out;
        out.space.p = kInf;
        out.space.r = 1.0;
        out.space.a = detail::expr_from_symbol(tail.sym);
        out.space.B = target.B;
        out.note = "sharp (p2 = inf, r = s = 1 route); exchange identity form";
        return out;
    }
    asym::Verdict tail = asym::integrate_to_endpoint(bsym->pow(s));
    if (!tail.finite())
        throw std::invalid_argument("optimal source (right): hypothesis fails, the power integral diverges");
    asym::EndpointSymbol alpha = bsym->pow(-s / rp_c).mul(tail.sym.pow(1.0 / rp_c + recip_index(s)));
    OptimalSpace out;
    out.space.p = prof.rp2.num == 0 ? kInf : 1.0 / prof.rp2.value();
    out.space.r = r;
    out.space.a = detail::expr_from_symbol(alpha);
    out.space.B = target.B;
    out.note = "sharp";
    return out;
}

// ---------------------------------------------------------------------------
// Regression catalog: operator rows whose boundedness the engine certifies.

struct CatalogRow {
    std::string name;
    InterpolationQuery query;
    bool expect_bounded = true;
};

namespace detail {

inline SpaceSpec simple_space(Frac rp, double r, const char* w) {
    return {SpacePart{rp, r, sv::parse(w)}, std::nullopt, false};
}
inline SpaceSpec pair_space(Frac rp1, double r1, Frac rp2, double r2, const char* w0,
                            const char* winf, bool intersection) {
    // w0 is the weight germ used on (0,1), winf on (1,inf); the norm split
    // assigns (p1,r1) to (0,1) for sums and to (1,inf) for intersections.
    sv::SvPtr w = std::string(w0) == winf ? sv::parse(w0)
                                          : sv::SvExpr::per_side(sv::parse(w0), sv::parse(winf));
    SpaceSpec s{SpacePart{rp1, r1, w}, SpacePart{rp2, r2, w}, intersection};
    return s;
}

inline InterpolationQuery row(const EngineProfile& prof, Case c, Frac theta, SpaceSpec src,
                              SpaceSpec dst, bool finite_measure) {
    InterpolationQuery q;
    q.profile = prof;
    q.kase = c;
    q.theta = theta;
    q.source = std::move(src);
    q.target = std::move(dst);
    q.finite_measure = finite_measure;
    return q;
}

}  // namespace detail

inline std::vector<CatalogRow> catalog() {
    using detail::pair_space;
    using detail::row;
    using detail::simple_space;
    std::vector<CatalogRow> rows;
    auto add = [&](std::string name, InterpolationQuery q, bool expect = true) {
        rows.push_back({std::move(name), std::move(q), expect});
    };
    EngineProfile M = maximal(), C = conjugate(), H = hilbert(), RT = riesz_transform();
    EngineProfile I = riesz_potential(Frac(1), Frac(2));  // gamma = 1, n = 2

    // --- finite-measure rows (averaging and periodic-conjugation operators)
    add("M: interior p=2, flat", row(M, Case::Interior, Frac(1, 2), simple_space(Frac(1, 2), 2, "1"),
                                     simple_space(Frac(1, 2), 2, "1"), true));
    add("C: interior p=2, l1", row(C, Case::Interior, Frac(1, 2), simple_space(Frac(1, 2), 1, "l1"),
                                   simple_space(Frac(1, 2), 1, "l1"), true));
    add("M: interior p=4/3, l2^0.5",
        row(M, Case::Interior, Frac(1, 4), simple_space(Frac(3, 4), 3, "l2^0.5"),
            simple_space(Frac(3, 4), 3, "l2^0.5"), true));
    add("M: left 1,1 -> 1,inf flat", row(M, Case::Left, Frac(0), simple_space(Frac(1), 1, "1"),
                                         simple_space(Frac(1), kInf, "1"), true));
    add("C: left 1,1 -> 1,inf l1", row(C, Case::Left, Frac(0), simple_space(Frac(1), 1, "l1"),
                                       simple_space(Frac(1), kInf, "l1"), true));
    add("M: left log-bump r=s=1 alpha=1", row(M, Case::Left, Frac(0), simple_space(Frac(1), 1, "l3"),
                                              simple_space(Frac(1), 1, "l1^-1*l2^-1"), true));
    add("C: left log-bump r=1 s=inf alpha=1", row(C, Case::Left, Frac(0), simple_space(Frac(1), 1, "l3"),
                                                  simple_space(Frac(1), kInf, "l3"), true));
    add("M: left log-bump r=s=2 alpha=0.5",
        row(M, Case::Left, Frac(0), simple_space(Frac(1), 2, "l1^0.5*l2^0.5*l3"),
            simple_space(Frac(1), 2, "l1^-0.5*l2^-0.5"), true));
    add("C: left log-bump r=2 s=3 alpha=0.25",
        row(C, Case::Left, Frac(0), simple_space(Frac(1), 2, "l1^0.5*l2^0.5*l3^0.75"),
            simple_space(Frac(1), 3, "l1^-0.333333333333333333*l2^-0.333333333333333333*l3^-0.0833333333333333333"),
            true));
    add("M: left log-gain -> plain", row(M, Case::Left, Frac(0), simple_space(Frac(1), 1, "l1"),
                                         simple_space(Frac(1), 1, "1"), true));
    add("C: left log-gain -> plain", row(C, Case::Left, Frac(0), simple_space(Frac(1), 1, "l1"),
                                         simple_space(Frac(1), 1, "1"), true));
    add("C: left r=inf deep-log", row(C, Case::Left, Frac(0), simple_space(Frac(1), kInf, "l1*l2*l3^2"),
                                      simple_space(Frac(1), kInf, "l3"), true));
    add("M: right endpoint flat", row(M, Case::Right, Frac(1), simple_space(Frac(0), kInf, "1"),
                                      simple_space(Frac(0), kInf, "1"), true));
    add("C: right endpoint into l1^-1", row(C, Case::Right, Frac(1), simple_space(Frac(0), kInf, "1"),
                                            simple_space(Frac(0), kInf, "l1^-1"), true));
    add("C: right r=s=1 power ladder", row(C, Case::Right, Frac(1), simple_space(Frac(0), 1, "l1^-2"),
                                           simple_space(Frac(0), 1, "l1^-3"), true));
    add("C: right exp-of-sqrt-log", row(C, Case::Right, Frac(1), simple_space(Frac(0), kInf, "exp(-1*l1^0.5)"),
                                        simple_space(Frac(0), kInf, "l1^-0.5*exp(-1*l1^0.5)"), true));

    // --- infinite-measure rows (fractional-integral segment, gamma/n = 1/2)
    add("I: interior 4/3 -> 4 flat", row(I, Case::Interior, Frac(1, 2), simple_space(Frac(3, 4), 2, "1"),
                                         simple_space(Frac(1, 4), 2, "1"), false));
    add("I: interior 4/3 -> 4 l1^0.3", row(I, Case::Interior, Frac(1, 2), simple_space(Frac(3, 4), 1, "l1^0.3"),
                                           simple_space(Frac(1, 4), 1, "l1^0.3"), false));
    add("I: sum of endpoints", row(I, Case::Sum, Frac(0),
                                   pair_space(Frac(1), 1, Frac(1, 2), 1, "1", "1", false),
                                   pair_space(Frac(1, 2), kInf, Frac(0), kInf, "1", "1", false), false));
    add("I: intersection of endpoints", row(I, Case::Intersection, Frac(0),
                                            pair_space(Frac(1), 1, Frac(1, 2), 1, "1", "1", true),
                                            pair_space(Frac(1, 2), kInf, Frac(0), kInf, "1", "1", true),
                                            false));
    add("I: sum log-bump alpha=beta=0.5",
        row(I, Case::Sum, Frac(0),
            pair_space(Frac(1), 2, Frac(1, 2), 2, "l1^0.5*l2", "l1^0.5*l2", false),
            pair_space(Frac(1, 2), 2, Frac(0), 2, "l1^-0.5", "l1^-0.5", false), false));
    add("I: intersection log-bump alpha=beta=0.5",
        row(I, Case::Intersection, Frac(0),
            pair_space(Frac(1), 2, Frac(1, 2), 2, "l1^0.5", "l1^0.5", true),
            pair_space(Frac(1, 2), 2, Frac(0), 2, "l1^-0.5*l2^-1", "l1^-0.5*l2^-1", true), false));
    add("I: sum l1-weights into halves",
        row(I, Case::Sum, Frac(0), pair_space(Frac(1), 1, Frac(1, 2), 2, "l1", "l1", false),
            pair_space(Frac(1, 2), 2, Frac(0), kInf, "l1^0.5", "l1^0.5", false), false));
    add("I: sum mixed gains",
        row(I, Case::Sum, Frac(0), pair_space(Frac(1), 1, Frac(1, 2), 2, "l1^0.5", "l1", false),
            pair_space(Frac(1, 2), 2, Frac(0), 2, "1", "1", false), false));
    add("I: intersection reciprocal-log",
        row(I, Case::Intersection, Frac(0),
            pair_space(Frac(1), 1, Frac(1, 2), 2, "l1^0.5", "l1^-1", true),
            pair_space(Frac(1, 2), kInf, Frac(0), kInf, "l2^-0.5", "l1^-1", true), false));
    add("I: sum second-tier weights",
        row(I, Case::Sum, Frac(0),
            pair_space(Frac(1), 1, Frac(1, 2), 2, "l2^0.5", "l1^0.5*l2", false),
            pair_space(Frac(1, 2), 2, Frac(0), kInf, "l1^-0.5", "l2^0.5", false), false));
    add("I: intersection second-tier weights",
        row(I, Case::Intersection, Frac(0),
            pair_space(Frac(1), 1, Frac(1, 2), 2, "l1^0.5", "l2^-0.5", true),
            pair_space(Frac(1, 2), 2, Frac(0), kInf, "l2^-0.5", "l1^-0.5*l2^-1", true), false));

    // --- infinite-measure rows (odd singular-kernel operators)
    add("H: interior p=2 flat", row(H, Case::Interior, Frac(1, 2), simple_space(Frac(1, 2), 2, "1"),
                                    simple_space(Frac(1, 2), 2, "1"), false));
    add("RT: interior p=3 l1^0.5", row(RT, Case::Interior, Frac(2, 3), simple_space(Frac(1, 3), 1, "l1^0.5"),
                                       simple_space(Frac(1, 3), 1, "l1^0.5"), false));
    add("H: sum endpoint pair flat",
        row(H, Case::Sum, Frac(0), pair_space(Frac(1), 1, Frac(0), 1, "1", "1", false),
            pair_space(Frac(1), kInf, Frac(0), kInf, "1", "1", false), false));
    add("H: sum l1-source into plain",
        row(H, Case::Sum, Frac(0), pair_space(Frac(1), 1, Frac(0), 1, "l1", "1", false),
            pair_space(Frac(1), 1, Frac(0), kInf, "1", "1", false), false));
    add("H: sum l1-weights both summands",
        row(H, Case::Sum, Frac(0), pair_space(Frac(1), 1, Frac(0), 1, "l1", "l1", false),
            pair_space(Frac(1), 1, Frac(0), 1, "1", "1", false), false));
    add("H: sum second-tier weights",
        row(H, Case::Sum, Frac(0), pair_space(Frac(1), 1, Frac(0), 1, "l2", "l2", false),
            pair_space(Frac(1), 1, Frac(0), 1, "l1^-1", "l1^-1", false), false));
    add("H: sum into sup-normed tail",
        row(H, Case::Sum, Frac(0), pair_space(Frac(1), 1, Frac(0), kInf, "l1", "l1*l2^2", false),
            pair_space(Frac(1), 1, Frac(0), kInf, "1", "l2", false), false));
    add("H: intersection flat pair",
        row(H, Case::Intersection, Frac(0), pair_space(Frac(1), 1, Frac(0), kInf, "1", "1", true),
            pair_space(Frac(1), kInf, Frac(0), kInf, "l1^-1", "1", true), false));
    add("RT: intersection power ladder",
        row(RT, Case::Intersection, Frac(0), pair_space(Frac(1), 1, Frac(0), 1, "l1^-2", "l1", true),
            pair_space(Frac(1), kInf, Frac(0), 1, "l1^-3", "1", true), false));
    add("H: intersection decaying sup pair",
        row(H, Case::Intersection, Frac(0), pair_space(Frac(1), 1, Frac(0), kInf, "l1^-1", "1", true),
            pair_space(Frac(1), kInf, Frac(0), kInf, "l1^-2", "1", true), false));

    // --- expected failures
    add("M: left 1,1 -> 1,1 flat", row(M, Case::Left, Frac(0), simple_space(Frac(1), 1, "1"),
                                       simple_space(Frac(1), 1, "1"), true), false);
    add("H: left 1,1 -> 1,1 flat", row(H, Case::Left, Frac(0), simple_space(Frac(1), 1, "1"),
                                       simple_space(Frac(1), 1, "1"), false), false);
    add("H: right endpoint flat", row(H, Case::Right, Frac(1), simple_space(Frac(0), kInf, "1"),
                                      simple_space(Frac(0), kInf, "1"), false), false);
    return rows;
}

}  // namespace lk::engine
