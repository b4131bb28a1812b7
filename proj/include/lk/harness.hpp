#pragma once

// Empirical verification of the equivalence between the weighted functionals
// and their Hardy-type inequalities: best-constant sweeps over monotone and
// general test families, with the doubling rule for stable-vs-growing
// classification, and the monotone-restriction gap demonstration.

#include <sstream>

#include "lk/functionals.hpp"
#include "lk/opsim.hpp"

namespace lk::harness {

// The four inequality families, keyed by their tilt structure.
enum class HardyKind {
    TiltedTwoSided,       // positive tilt, both transform directions
    LowerLimit,           // no tilt, cumulative transform
    UpperLimit,           // no tilt, tail transform
    UpperLimitMonotone,   // no tilt, tail transform, non-increasing data only
};

inline std::string to_string(HardyKind k) {
    switch (k) {
        case HardyKind::TiltedTwoSided: return "tilted-two-sided";
        case HardyKind::LowerLimit: return "lower-limit";
        case HardyKind::UpperLimit: return "upper-limit";
        default: return "upper-limit-monotone";
    }
}

struct HardySpec {
    HardyKind kind = HardyKind::LowerLimit;
    double mu = 0.0, nu = 1.0, kappa = 1.0;
    double r = 1.0, s = 1.0;
    sv::SvPtr a, b;
    quad::Interval interval = quad::Interval::ZeroOne;

    void validate() const {
        if (!a || !b) throw std::invalid_argument("hardy spec: weights required");
        if (interval == quad::Interval::ZeroInf)
            throw std::invalid_argument("hardy spec: verification runs one germ at a time");
        if (kind == HardyKind::TiltedTwoSided && !(nu > mu && mu > 0))
            throw std::invalid_argument("hardy spec: tilted case needs nu > mu > 0");
        if ((kind == HardyKind::LowerLimit || kind == HardyKind::UpperLimit) && !(nu > 0))
            throw std::invalid_argument("hardy spec: limit cases need nu > 0");
    }
    Side side() const { return interval == quad::Interval::OneInf ? Side::Inf : Side::Zero; }
    fnl::Kind governing() const {
        switch (kind) {
            case HardyKind::TiltedTwoSided: return fnl::Kind::N;
            case HardyKind::LowerLimit: return fnl::Kind::L;
            case HardyKind::UpperLimit: return fnl::Kind::R;
            default: return fnl::Kind::Rinf;
        }
    }
};

// ---------------------------------------------------------------------------
// Test-family members: piecewise-constant data in y = |log t| with log-scale
// heights, so members can concentrate at depths far beyond double precision
// of t itself.

struct Member {
    Side side = Side::Zero;
    std::vector<double> y;     // cell boundaries, increasing, size cells+1
    std::vector<double> logh;  // cell log-heights, -inf for empty cells

    size_t cells() const { return logh.size(); }
    double depth() const { return y.empty() ? 0.0 : y.back(); }
    double log_value_at(double yy) const {
        auto it = std::upper_bound(y.begin(), y.end(), yy);
        if (it == y.begin() || it == y.end()) return -kInf;
        return logh[size_t(it - y.begin()) - 1];
    }
};

enum class FamilyKind { MonotoneSteps, TiltedSymbol, HardyExtremal, Bump };

struct TestFamily {
    FamilyKind kind = FamilyKind::MonotoneSteps;
    uint64_t seed = 1;
    int members_per_size = 6;
};

namespace detail {

// Closed-form log of int u^{kappa-1} e^{logh} du over one cell, in stable
// log arithmetic. Cells are y-intervals on the given side.
inline double cell_power_mass(Side side, double kappa, double y_lo, double y_hi, double logh) {
    if (logh == -kInf) return -kInf;
    double lt_hi = side == Side::Zero ? -y_lo : y_hi;  // upper t endpoint (log)
    double lt_lo = side == Side::Zero ? -y_hi : y_lo;
    if (kappa == 0.0) return logh + std::log(lt_hi - lt_lo);
    // (e^{kappa lt_hi} - e^{kappa lt_lo}) / kappa, positive either way
    double hi = kappa * lt_hi, lo = kappa * lt_lo;
    double big = std::max(hi, lo), small = std::min(hi, lo);
    return logh + big + std::log1p(-std::exp(small - big)) - std::log(std::abs(kappa));
}

// Cumulative transforms of a member: lower(t) = int over (A, t), upper(t) =
// int over (t, boundary) of u^{kappa-1} g(u) du, queryable at any y.
class MemberTransform {
  public:
    MemberTransform(const Member& g, double kappa) : g_(g), kappa_(kappa) {
        size_t n = g.cells();
        // suffix toward the germ endpoint (cells with larger y)
        toward_germ_.assign(n + 1, -kInf);
        for (size_t i = n; i-- > 0;)
            toward_germ_[i] = log_add(toward_germ_[i + 1],
                                      cell_power_mass(g.side, kappa_, g.y[i], g.y[i + 1], g.logh[i]));
        away_germ_.assign(n + 1, -kInf);
        for (size_t i = 0; i < n; ++i)
            away_germ_[i + 1] = log_add(away_germ_[i],
                                        cell_power_mass(g.side, kappa_, g.y[i], g.y[i + 1], g.logh[i]));
    }
    // int over (A, t): near zero that is the deep-y suffix, near infinity the
    // shallow-y prefix (A is the fixed boundary at y = 0 there).
    double log_lower(double yy) const {
        return g_.side == Side::Zero ? partial_toward(yy) : partial_away(yy);
    }
    double log_upper(double yy) const {
        return g_.side == Side::Zero ? partial_away(yy) : partial_toward(yy);
    }

  private:
    double partial_toward(double yy) const {  // mass at y >= yy
        auto& y = g_.y;
        if (yy <= y.front()) return toward_germ_.front();
        if (yy >= y.back()) return -kInf;
        size_t i = size_t(std::upper_bound(y.begin(), y.end(), yy) - y.begin()) - 1;
        return log_add(toward_germ_[i + 1],
                       cell_power_mass(g_.side, kappa_, yy, y[i + 1], g_.logh[i]));
    }
    double partial_away(double yy) const {  // mass at y <= yy
        auto& y = g_.y;
        if (yy >= y.back()) return away_germ_.back();
        if (yy <= y.front()) return -kInf;
        size_t i = size_t(std::upper_bound(y.begin(), y.end(), yy) - y.begin()) - 1;
        return log_add(away_germ_[i], cell_power_mass(g_.side, kappa_, y[i], yy, g_.logh[i]));
    }
    Member g_;
    double kappa_;
    std::vector<double> toward_germ_, away_germ_;
};

// || t^{tilt - 1/p} w(t) X(t) ||_{p, interval}: X is an optional extra
// log-evaluable (the transform for the LHS, the member itself for the RHS).
inline double member_norm(double tilt, const sv::SvPtr& w, double p, Side side, double support_depth,
                          const std::function<double(double)>& log_extra) {
    auto dens = [&](double yy) {
        LogCoord at{side, yy};
        double v = p * (tilt * at.log_t() + sv::log_eval(*w, at) + log_extra(yy));
        return v;
    };
    if (is_inf(p)) {
        double best = -kInf;
        double cap = support_depth + 80.0;
        for (double yy = 0.0; yy <= cap; yy = std::max(yy * 1.03, yy + 0.02)) {
            LogCoord at{side, yy};
            best = std::max(best, tilt * at.log_t() + sv::log_eval(*w, at) + log_extra(yy));
        }
        return best;
    }
    quad::NumVerdict v = fnl::detail_num::tail_from(dens, 0.0, 1e-7, quad::Protocol{});
    if (v.tag == quad::NumTag::Infinite) return kInf;
    if (v.tag == quad::NumTag::Inconclusive) return std::nan("");
    return v.log_value / p;
}

}  // namespace detail

// One inequality condition: tilts, transform direction and data class.
struct Condition {
    std::string name;
    double lhs_tilt = 0.0;   // power tilt on the LHS weight
    double rhs_tilt = 0.0;   // power tilt on the RHS weight
    double kernel_kappa = 1.0;
    bool upper = false;      // transform direction
    bool monotone = false;   // restrict the family to non-increasing data
};

inline std::vector<Condition> conditions_of(const HardySpec& spec) {
    switch (spec.kind) {
        case HardyKind::TiltedTwoSided:
            return {
                {"general-lower", -spec.mu, -spec.mu + spec.kappa, spec.kappa, false, false},
                {"monotone-lower", -spec.mu, -spec.mu + spec.nu, spec.nu, false, true},
                {"general-upper", spec.mu, spec.mu + spec.kappa, spec.kappa, true, false},
                {"monotone-upper", spec.mu, spec.mu + spec.nu, spec.nu, true, true},
            };
        case HardyKind::LowerLimit:
            return {
                {"general-lower", 0.0, spec.kappa, spec.kappa, false, false},
                {"monotone-lower", 0.0, spec.nu, spec.nu, false, true},
            };
        case HardyKind::UpperLimit:
            return {
                {"general-upper", 0.0, spec.kappa, spec.kappa, true, false},
                {"monotone-upper", 0.0, spec.nu, spec.nu, true, true},
            };
        default:
            return {{"monotone-upper", 0.0, 0.0, 0.0, true, true}};
    }
}

// ---------------------------------------------------------------------------
// Family generation. Members are deterministic in (seed, size, index); the
// families are nested across sizes so best constants are non-decreasing.

namespace detail {

inline Member monotone_member(Side side, double depth, SplitMix64& rng) {
    Member m;
    m.side = side;
    int cells = rng.uniform_int(6, 14);
    std::vector<double> ys{0.0};
    for (int i = 0; i < cells; ++i) ys.push_back(rng.uniform(0.0, depth));
    std::sort(ys.begin(), ys.end());
    ys.push_back(depth);
    m.y = ys;
    double lh = rng.uniform(-1.0, 1.0);
    for (size_t i = 0; i + 1 < ys.size(); ++i) {
        m.logh.push_back(lh);
        lh += rng.uniform(0.0, 1.5);  // heights grow with y: non-increasing in t
    }
    return m;
}

inline Member bump_member(Side side, double depth) {
    Member m;
    m.side = side;
    m.y = {std::max(0.0, depth - std::log(2.0)), depth};
    m.logh = {0.0};
    return m;
}

inline Member tilted_member(Side side, double depth, double eps, const sv::SvPtr& shape) {
    Member m;
    m.side = side;
    int cells = std::max(24, int(4 * std::log2(2.0 + depth)));
    for (int i = 0; i <= cells; ++i) m.y.push_back(depth * double(i) / cells);
    for (int i = 0; i < cells; ++i) {
        double ymid = 0.5 * (m.y[i] + m.y[i + 1]);
        LogCoord at{side, ymid};
        m.logh.push_back(-eps * at.log_t() + (shape ? sv::log_eval(*shape, at) : 0.0));
    }
    return m;
}

// Saturating profile for one condition: density v^{-r'} between the moving
// breakpoint and the boundary the transform integrates toward.
inline Member extremal_member(const HardySpec& spec, const Condition& c, double depth) {
    Member m;
    m.side = spec.side();
    double rp = conj_index(spec.r);
    auto logv = [&](double ymid) {
        LogCoord at{m.side, ymid};
        return (c.rhs_tilt - recip_index(spec.r)) * at.log_t() + sv::log_eval(*spec.a, at);
    };
    double from = c.upper ? 0.0 : depth * 0.35;
    double to = c.upper ? depth : depth + 40.0;
    int cells = std::max(24, int(4 * std::log2(2.0 + depth)));
    for (int i = 0; i <= cells; ++i) m.y.push_back(from + (to - from) * double(i) / cells);
    for (int i = 0; i < cells; ++i) {
        double ymid = 0.5 * (m.y[i] + m.y[i + 1]);
        if (is_inf(rp)) {
            m.logh.push_back(0.0);  // r = 1: a plain plateau saturates the sup
        } else {
            m.logh.push_back(-rp * logv(ymid));
        }
    }
    // normalize the scale so ratios stay well conditioned
    double peak = -kInf;
    for (double h : m.logh) peak = std::max(peak, h);
    for (double& h : m.logh) h -= peak;
    return m;
}

// f(t) = int over (t, boundary) of g: turns arbitrary data into a
// non-increasing profile on the member's own grid.
inline Member tail_integral_combinator(const Member& g) {
    MemberTransform tr(g, 1.0);
    Member m;
    m.side = g.side;
    m.y = g.y;
    for (size_t i = 0; i + 1 < g.y.size(); ++i)
        m.logh.push_back(tr.log_upper(0.5 * (g.y[i] + g.y[i + 1])));
    return m;
}

}  // namespace detail

inline std::vector<Member> make_family(const HardySpec& spec, const Condition& cond,
                                       const TestFamily& family, double depth) {
    spec.validate();
    std::vector<Member> out;
    SplitMix64 rng(family.seed ^ (uint64_t(depth) * 0x9e37'79b9'7f4a'7c15ULL));
    Side side = spec.side();
    for (int i = 0; i < family.members_per_size; ++i) {
        SplitMix64 member_rng(rng.next());
        switch (family.kind) {
            case FamilyKind::MonotoneSteps:
                out.push_back(detail::monotone_member(side, depth, member_rng));
                break;
            case FamilyKind::Bump: {
                double d = depth * (i + 1) / family.members_per_size;
                out.push_back(detail::bump_member(side, d));
                break;
            }
            case FamilyKind::TiltedSymbol: {
                double eps = member_rng.uniform(0.05, 0.5);
                out.push_back(detail::tilted_member(side, depth, side == Side::Zero ? -eps : eps, spec.b));
                break;
            }
            case FamilyKind::HardyExtremal: {
                double d = depth * (i + 1) / family.members_per_size;
                out.push_back(detail::extremal_member(spec, cond, d));
                break;
            }
        }
    }
    if (cond.monotone && (family.kind == FamilyKind::Bump || family.kind == FamilyKind::HardyExtremal ||
                          family.kind == FamilyKind::TiltedSymbol)) {
        for (auto& m : out) m = detail::tail_integral_combinator(m);
    }
    return out;
}

// LHS / RHS for one member under one condition; 0/0 counts as 0.
inline double member_ratio(const HardySpec& spec, const Condition& c, const Member& g) {
    detail::MemberTransform tr(g, c.kernel_kappa);
    auto log_T = [&](double yy) { return c.upper ? tr.log_upper(yy) : tr.log_lower(yy); };
    auto log_g = [&](double yy) { return g.log_value_at(yy); };
    double lhs = detail::member_norm(c.lhs_tilt, spec.b, spec.s, g.side, g.depth(), log_T);
    double rhs = detail::member_norm(c.rhs_tilt, spec.a, spec.r, g.side, g.depth(), log_g);
    if (std::isnan(lhs) || std::isnan(rhs)) return std::nan("");
    if (rhs == -kInf) return lhs == -kInf ? 0.0 : kInf;
    if (rhs == kInf) return 0.0;  // vacuous member
    if (lhs == kInf) return kInf;
    return std::exp(lhs - rhs);
}

struct ConstantSweep {
    std::vector<int> size_exponents;   // depths 2^k
    std::vector<double> constants;     // running best constants C_k
    std::string classification;        // stable | growing | inconclusive
};

inline std::string classify_sweep(const std::vector<double>& c) {
    if (c.size() < 2) return "inconclusive";
    bool stable = true;
    for (size_t i = 1; i < c.size(); ++i)
        if (!(c[i] <= c[i - 1] * 1.05)) stable = false;
    bool growing = false;
    for (size_t i = 0; i < c.size(); ++i)
        for (size_t j = i + 1; j < c.size(); ++j)
            if (c[j] >= 2.0 * c[i] && c[i] > 0) growing = true;
    if (std::any_of(c.begin(), c.end(), [](double v) { return v == kInf; })) return "growing";
    if (growing) return "growing";
    if (stable) return "stable";
    return "inconclusive";
}

inline ConstantSweep estimate_best_constant(const HardySpec& spec, const Condition& cond,
                                            const TestFamily& family, int k_lo = 6, int k_hi = 14) {
    spec.validate();
    ConstantSweep sweep;
    double best = 0.0;
    for (int k = k_lo; k <= k_hi; ++k) {
        for (auto& m : make_family(spec, cond, family, double(1 << k))) {
            double r = member_ratio(spec, cond, m);
            if (std::isnan(r)) continue;
            best = std::max(best, r);
            if (best == kInf) break;
        }
        sweep.size_exponents.push_back(k);
        sweep.constants.push_back(best);
        if (best == kInf) break;
    }
    sweep.classification = classify_sweep(sweep.constants);
    return sweep;
}

// Default family pairing: the tilted conditions are saturated by moving
// bumps (the tilt localizes every norm at the breakpoint), the limit
// conditions by reciprocal-power profiles; monotone variants pass the same
// shapes through the tail-integral combinator.
inline TestFamily default_family(HardyKind kind, const Condition& c, uint64_t seed) {
    TestFamily f;
    f.seed = seed;
    if (kind == HardyKind::TiltedTwoSided) f.kind = FamilyKind::Bump;
    else if (c.monotone && kind == HardyKind::LowerLimit) f.kind = FamilyKind::Bump;
    else f.kind = FamilyKind::HardyExtremal;
    return f;
}

struct ConditionReport {
    Condition condition;
    ConstantSweep sweep;
    bool agrees = false;
    bool inconclusive = false;
};

struct EquivalenceReport {
    HardySpec spec;
    fnl::FinVerdict functional;
    bool divergence_companion_ok = true;  // the B = inf side condition
    std::vector<ConditionReport> conditions;
    bool all_agree = true;

    std::string to_json() const;
    std::string to_csv() const;
};

inline EquivalenceReport verify_equivalence(const HardySpec& spec, uint64_t seed, int k_lo = 6,
                                            int k_hi = 12) {
    spec.validate();
    EquivalenceReport rep;
    rep.spec = spec;
    fnl::FunctionalSpec fs;
    fs.kind = spec.governing();
    fs.r = spec.r;
    fs.s = spec.s;
    fs.a = spec.a;
    fs.b = spec.b;
    fs.interval = spec.interval;
    rep.functional = fnl::evaluate(fs);
    bool expect_bounded = rep.functional.finite();
    if (spec.kind == HardyKind::UpperLimitMonotone && spec.interval == quad::Interval::OneInf) {
        rep.divergence_companion_ok = fnl::full_norm_infinite(spec.a, spec.r, spec.interval);
        expect_bounded = expect_bounded && rep.divergence_companion_ok;
    }
    for (const Condition& c : conditions_of(spec)) {
        ConditionReport cr;
        cr.condition = c;
        // use both extremal pressure and monotone data where admissible
        cr.sweep = estimate_best_constant(spec, c, default_family(spec.kind, c, seed), k_lo, k_hi);
        if (rep.functional.tag == fnl::FinVerdict::Tag::Inconclusive ||
            cr.sweep.classification == "inconclusive") {
            cr.inconclusive = true;
            cr.agrees = false;
            rep.all_agree = false;
        } else {
            cr.agrees = expect_bounded ? cr.sweep.classification == "stable"
                                       : cr.sweep.classification == "growing";
            rep.all_agree = rep.all_agree && cr.agrees;
        }
        rep.conditions.push_back(std::move(cr));
    }
    return rep;
}

inline std::string EquivalenceReport::to_json() const {
    std::ostringstream os;
    os.precision(12);
    os << "{\"kind\":\"" << harness::to_string(spec.kind) << "\",";
    os << "\"functional\":\""
       << (functional.finite() ? "finite" : functional.infinite() ? "infinite" : "inconclusive")
       << "\",";
    os << "\"divergence_companion_ok\":" << (divergence_companion_ok ? "true" : "false") << ",";
    os << "\"all_agree\":" << (all_agree ? "true" : "false") << ",\"conditions\":[";
    for (size_t i = 0; i < conditions.size(); ++i) {
        auto& c = conditions[i];
        os << (i ? "," : "") << "{\"name\":\"" << c.condition.name << "\",\"classification\":\""
           << c.sweep.classification << "\",\"agrees\":" << (c.agrees ? "true" : "false")
           << ",\"constants\":[";
        for (size_t j = 0; j < c.sweep.constants.size(); ++j)
            os << (j ? "," : "") << c.sweep.constants[j];
        os << "]}";
    }
    os << "]}";
    return os.str();
}

inline std::string EquivalenceReport::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "condition,size_exponent,constant\n";
    for (auto& c : conditions)
        for (size_t j = 0; j < c.sweep.constants.size(); ++j)
            os << c.condition.name << "," << c.sweep.size_exponents[j] << "," << c.sweep.constants[j]
               << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// The monotone-restriction gap: an instance whose tail-transform inequality
// holds on non-increasing data but fails on general data, with the failure
// rate tracked against the predicted growth symbol out to Y ~ 1e280.

struct GapReport {
    bool valid_instance = false;       // monotone quantity finite, general quantity infinite
    asym::EndpointSymbol growth;       // predicted growth of the general-family constants
    std::vector<double> probe_y;       // numeric window depths
    std::vector<double> general_constants;
    std::vector<double> monotone_constants;
    double predicted_total_growth = 0; // growth symbol ratio from y0 to 1e280
    double observed_match_worst = 0;   // worst |log(C ratio) - log(symbol ratio)| factor
    double monotone_drift = 0;
    bool growth_matches = false;

    std::string to_json() const;
};

inline GapReport monotone_gap_witness(const HardySpec& spec, uint64_t seed,
                                      std::vector<double> probe_y = {16, 256, 4096, 65536, 1 << 22}) {
    spec.validate();
    GapReport rep;
    fnl::FunctionalSpec general;
    general.kind = fnl::Kind::R;
    general.r = spec.r;
    general.s = spec.s;
    general.a = spec.a;
    general.b = spec.b;
    general.interval = spec.interval;
    fnl::FinVerdict r_verdict = fnl::evaluate(general);
    fnl::FunctionalSpec monotone = general;
    monotone.kind = fnl::Kind::Rinf;
    fnl::FinVerdict rinf_verdict = fnl::evaluate(monotone);
    rep.valid_instance = r_verdict.infinite() && rinf_verdict.finite();
    if (!rep.valid_instance) return rep;
    rep.growth = r_verdict.witness->growth;

    Condition general_cond{"general-upper", 0.0, 0.0, 0.0, true, false};
    Condition monotone_cond{"monotone-upper", 0.0, 0.0, 0.0, true, true};
    TestFamily general_family{FamilyKind::HardyExtremal, seed, 4};
    TestFamily monotone_family{FamilyKind::MonotoneSteps, seed, 6};
    double worst_match = 1.0;
    double prev_c = 0.0, prev_pred = 0.0;
    for (double d : probe_y) {
        double best = 0.0;
        for (auto& m : make_family(spec, general_cond, general_family, d))
            best = std::max(best, member_ratio(spec, general_cond, m));
        rep.general_constants.push_back(best);
        double mono_best = 0.0;
        for (auto& m : make_family(spec, monotone_cond, monotone_family, d))
            mono_best = std::max(mono_best, member_ratio(spec, monotone_cond, m));
        rep.monotone_constants.push_back(mono_best);
        double pred = rep.growth.eval(d);  // the deepest member's breakpoint sits at d
        if (prev_c > 0) {
            double observed = best / prev_c;
            double predicted = pred / prev_pred;
            worst_match = std::max(worst_match, std::max(observed / predicted, predicted / observed));
        }
        prev_c = best;
        prev_pred = pred;
    }
    rep.observed_match_worst = worst_match;
    rep.growth_matches = worst_match <= 1.20;
    rep.predicted_total_growth = rep.growth.eval(1e280) / rep.growth.eval(10.0);
    double lo = kInf, hi = 0.0;
    for (double c : rep.monotone_constants) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    rep.monotone_drift = lo > 0 ? hi / lo : kInf;
    rep.probe_y = probe_y;
    return rep;
}

inline std::string GapReport::to_json() const {
    std::ostringstream os;
    os.precision(12);
    os << "{\"valid_instance\":" << (valid_instance ? "true" : "false");
    if (valid_instance) {
        os << ",\"growth\":\"" << growth.render() << "\"";
        os << ",\"predicted_total_growth\":" << predicted_total_growth;
        os << ",\"observed_match_worst\":" << observed_match_worst;
        os << ",\"monotone_drift\":" << monotone_drift;
        os << ",\"growth_matches\":" << (growth_matches ? "true" : "false");
        os << ",\"general_constants\":[";
        for (size_t i = 0; i < general_constants.size(); ++i)
            os << (i ? "," : "") << general_constants[i];
        os << "],\"monotone_constants\":[";
        for (size_t i = 0; i < monotone_constants.size(); ++i)
            os << (i ? "," : "") << monotone_constants[i];
        os << "]";
    }
    os << "}";
    return os.str();
}

}  // namespace lk::harness
