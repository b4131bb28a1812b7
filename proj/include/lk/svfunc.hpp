#pragma once

// Expression trees for slowly varying functions and power-times-SV weights:
// iterated-log powers, exp-of-power-of-log (optionally oscillating), broken
// logs, per-side germs, products, powers, argument powers, and a raw power
// escape node t^delta that is admitted in weights but never certified s.v.
// All evaluation happens in log coordinates (Y = |log t|), so germs at
// Y ~ 1e300 are as cheap as desk-scale points.

#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lk/asymcalc.hpp"
#include "lk/common.hpp"

namespace lk::sv {

class SvExpr;
using SvPtr = std::shared_ptr<const SvExpr>;

class SvExpr {
  public:
    enum class Kind { Const, LogTier, BrokenLog, ExpPowLog, Product, Power, ArgPower, RawPower, PerSide };

    Kind kind;
    double a = 0.0, b = 0.0;      // node parameters (meaning depends on kind)
    int tier = 0;                 // LogTier
    bool oscillate = false;       // ExpPowLog: exp(a * l1^b * cos(l1^b))
    std::vector<SvPtr> children;

    static SvPtr constant(double c) {
        if (!(c > 0)) throw std::invalid_argument("SvExpr: constant must be positive");
        return make(Kind::Const, c);
    }
    static SvPtr one() { return constant(1.0); }
    static SvPtr log_tier(int tier, double alpha) {
        if (tier < 1 || tier > asym::kMaxTier) throw std::invalid_argument("SvExpr: tier out of range");
        SvPtr p = make(Kind::LogTier, alpha);
        const_cast<SvExpr*>(p.get())->tier = tier;
        return p;
    }
    static SvPtr broken_log(double a0, double ainf) {
        SvPtr p = make(Kind::BrokenLog, a0);
        const_cast<SvExpr*>(p.get())->b = ainf;
        return p;
    }
    static SvPtr exp_pow_log(double c, double beta, bool oscillate = false) {
        if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("SvExpr: exp-pow-log needs 0 < beta < 1");
        SvPtr p = make(Kind::ExpPowLog, c);
        const_cast<SvExpr*>(p.get())->b = beta;
        const_cast<SvExpr*>(p.get())->oscillate = oscillate;
        return p;
    }
    static SvPtr product(std::vector<SvPtr> factors) {
        if (factors.empty()) return one();
        if (factors.size() == 1) return factors[0];
        SvPtr p = make(Kind::Product, 0.0);
        const_cast<SvExpr*>(p.get())->children = std::move(factors);
        return p;
    }
    static SvPtr power(SvPtr child, double rho) {
        SvPtr p = make(Kind::Power, rho);
        const_cast<SvExpr*>(p.get())->children = {std::move(child)};
        return p;
    }
    static SvPtr arg_power(SvPtr child, double rho) {
        if (rho == 0.0) throw std::invalid_argument("SvExpr: arg power must be nonzero");
        SvPtr p = make(Kind::ArgPower, rho);
        const_cast<SvExpr*>(p.get())->children = {std::move(child)};
        return p;
    }
    static SvPtr raw_power(double delta) { return make(Kind::RawPower, delta); }
    static SvPtr per_side(SvPtr near_zero, SvPtr near_inf) {
        SvPtr p = make(Kind::PerSide, 0.0);
        const_cast<SvExpr*>(p.get())->children = {std::move(near_zero), std::move(near_inf)};
        return p;
    }

    // Detects raw-power factors; `scale` accumulates power and argument-power
    // multipliers so that ((t^d)^p) reports the effective exponent d*p.
    bool contains_raw_power(double* worst_delta = nullptr, double scale = 1.0) const {
        if (kind == Kind::RawPower) {
            if (worst_delta) *worst_delta = std::max(*worst_delta, std::abs(a * scale));
            return true;
        }
        double s = scale;
        if (kind == Kind::Power || kind == Kind::ArgPower) s *= a;
        bool found = false;
        for (auto& c : children) found |= c->contains_raw_power(worst_delta, s);
        return found;
    }

  private:
    static SvPtr make(Kind k, double a) {
        auto p = std::make_shared<SvExpr>();
        p->kind = k;
        p->a = a;
        return p;
    }
};

// log of the (positive) value at t = exp(+-Y).
inline double log_eval(const SvExpr& e, const LogCoord& at) {
    switch (e.kind) {
        case SvExpr::Kind::Const: return std::log(e.a);
        case SvExpr::Kind::LogTier: return e.a * log_ell(e.tier, at);
        case SvExpr::Kind::BrokenLog:
            return (at.side == Side::Zero ? e.a : e.b) * log_ell(1, at);
        case SvExpr::Kind::ExpPowLog: {
            double p = std::pow(ell(1, at), e.b);
            return e.oscillate ? e.a * p * std::cos(p) : e.a * p;
        }
        case SvExpr::Kind::Product: {
            double v = 0;
            for (auto& c : e.children) v += log_eval(*c, at);
            return v;
        }
        case SvExpr::Kind::Power: return e.a * log_eval(*e.children[0], at);
        case SvExpr::Kind::ArgPower: {
            LogCoord inner{e.a > 0 ? at.side : other(at.side), std::abs(e.a) * at.y};
            return log_eval(*e.children[0], inner);
        }
        case SvExpr::Kind::RawPower: return e.a * at.log_t();
        case SvExpr::Kind::PerSide:
            return log_eval(*e.children[at.side == Side::Zero ? 0 : 1], at);
    }
    return 0.0;
}

struct EvalResult {
    double value;
    double log_value;
    bool saturated;  // value exceeded the double range; log_value is still exact
};

inline EvalResult eval(const SvExpr& e, const LogCoord& at) {
    double lv = log_eval(e, at);
    bool sat = lv > 709.0 || lv < -745.0;
    return {std::exp(lv), lv, sat};
}

// t -> expr(t^{1/m}); the germ of the result at one side is the germ of the
// argument at the (possibly flipped) side with an identical exponent vector.
inline SvPtr substar(SvPtr expr, double m) {
    if (m == 0.0) throw std::invalid_argument("substar: slope must be nonzero");
    if (m == 1.0) return expr;
    return SvExpr::arg_power(std::move(expr), 1.0 / m);
}

// Exact exponent-vector extraction. Exp-pow-log and raw powers are not
// log-power germs and route callers to the numeric path.
inline std::optional<asym::EndpointSymbol> to_symbol(const SvExpr& e, Side side) {
    using asym::EndpointSymbol;
    switch (e.kind) {
        case SvExpr::Kind::Const: return EndpointSymbol::constant(side, e.a);
        case SvExpr::Kind::LogTier: {
            std::vector<double> exps(size_t(e.tier), 0.0);
            exps[size_t(e.tier) - 1] = e.a;
            return EndpointSymbol(side, 1.0, std::move(exps));
        }
        case SvExpr::Kind::BrokenLog: {
            double alpha = side == Side::Zero ? e.a : e.b;
            return EndpointSymbol(side, 1.0, {alpha});
        }
        case SvExpr::Kind::Product: {
            EndpointSymbol acc = EndpointSymbol::constant(side, 1.0);
            for (auto& c : e.children) {
                auto s = to_symbol(*c, side);
                if (!s) return std::nullopt;
                acc = acc.mul(*s);
            }
            return acc;
        }
        case SvExpr::Kind::Power: {
            auto s = to_symbol(*e.children[0], side);
            if (!s) return std::nullopt;
            return s->pow(e.a);
        }
        case SvExpr::Kind::ArgPower: {
            Side inner_side = e.a > 0 ? side : other(side);
            auto s = to_symbol(*e.children[0], inner_side);
            if (!s) return std::nullopt;
            // ell_1(t^rho) ~ |rho| ell_1(t); deeper tiers are unaffected.
            double c = s->coeff * std::pow(std::abs(e.a), s->exp_at(0));
            return EndpointSymbol(side, c, s->exps);
        }
        case SvExpr::Kind::PerSide:
            return to_symbol(*e.children[side == Side::Zero ? 0 : 1], side);
        default:
            return std::nullopt;  // ExpPowLog, RawPower
    }
}

// Quasi-monotonicity certificate: for the given tilt eps, t^{eps} * expr must
// track its running maximum along the grid (and t^{-eps} * expr its running
// minimum). The pass criterion bounds the violation accrued between
// consecutive grid points; `modulus` reports the global equivalence factor K
// between the tilted function and its monotone envelope, which is finite for
// every slowly varying germ but can be large.
struct Certificate {
    bool pass;
    double worst_factor;  // worst one-step violation
    double modulus;       // global envelope factor K
};

inline std::vector<LogCoord> default_grid(double y_max = 1e6, int per_decade = 16) {
    std::vector<LogCoord> g;
    int n = int(per_decade * std::log10(y_max / 1e-2));
    for (int i = n; i >= 0; --i)
        g.push_back(LogCoord{Side::Zero, 1e-2 * std::pow(y_max / 1e-2, double(i) / n)});
    for (int i = 0; i <= n; ++i)
        g.push_back(LogCoord{Side::Inf, 1e-2 * std::pow(y_max / 1e-2, double(i) / n)});
    return g;
}

inline Certificate certify_sv(const SvExpr& e, double eps, const std::vector<LogCoord>& grid,
                              double bound = 4.0) {
    if (!(eps > 0)) throw std::invalid_argument("certify_sv: eps must be positive");
    if (grid.empty()) throw std::invalid_argument("certify_sv: empty grid");
    double worst_delta = 0.0;
    if (e.contains_raw_power(&worst_delta) && worst_delta >= eps)
        return {false, kInf, kInf};
    double step_worst = 1.0, modulus = 1.0;
    double run_max = -kInf, run_min = kInf;
    double prev_up = -kInf, prev_dn = kInf;
    for (const auto& at : grid) {
        double lv = log_eval(e, at);
        double up = eps * at.log_t() + lv;    // should be ~ non-decreasing
        double dn = -eps * at.log_t() + lv;   // should be ~ non-increasing
        if (prev_up > -kInf) step_worst = std::max(step_worst, std::exp(prev_up - up));
        if (prev_dn < kInf) step_worst = std::max(step_worst, std::exp(dn - prev_dn));
        if (run_max > -kInf) modulus = std::max(modulus, std::exp(run_max - up));
        if (run_min < kInf) modulus = std::max(modulus, std::exp(dn - run_min));
        prev_up = up;
        prev_dn = dn;
        run_max = std::max(run_max, up);
        run_min = std::min(run_min, dn);
    }
    return {step_worst <= bound, step_worst, modulus};
}

// Running supremum d(t) = sup over (0, t] of expr; the normalization used by
// the p = r = inf spaces. Eventually-monotone germs make a ladder scan exact
// enough for classification.
struct RunningSup {
    SvPtr expr;
    bool infinite_everywhere = false;  // sup over (0, t] is +inf for every t
    double log_sup_zero_side_at_1 = -kInf;

    explicit RunningSup(SvPtr e) : expr(std::move(e)) {
        auto sym = to_symbol(*expr, Side::Zero);
        if (sym) {
            infinite_everywhere = !asym::sup_toward_endpoint(*sym).finite();
        } else {
            double v0 = log_eval(*expr, LogCoord{Side::Zero, 1e4});
            double v1 = log_eval(*expr, LogCoord{Side::Zero, 1e8});
            double v2 = log_eval(*expr, LogCoord{Side::Zero, 1e16});
            infinite_everywhere = v2 > v1 + 1e-6 && v1 > v0 + 1e-6;
        }
        if (!infinite_everywhere) log_sup_zero_side_at_1 = scan_zero_side(0.0);
    }
    double scan_zero_side(double y_from) const {
        double best = -kInf;
        double y = std::max(y_from, 1e-3);
        best = std::max(best, log_eval(*expr, LogCoord{Side::Zero, y_from}));
        while (y <= 1e295) {
            best = std::max(best, log_eval(*expr, LogCoord{Side::Zero, y}));
            y *= 1.25;
        }
        return best;
    }
    double log_sup(const LogCoord& t) const {
        if (infinite_everywhere) return kInf;
        if (t.side == Side::Zero) return scan_zero_side(t.y);
        double best = log_sup_zero_side_at_1;
        double y = 1e-3;
        best = std::max(best, log_eval(*expr, LogCoord{Side::Inf, 0.0}));
        while (y <= t.y) {
            best = std::max(best, log_eval(*expr, LogCoord{Side::Inf, y}));
            y *= 1.25;
        }
        best = std::max(best, log_eval(*expr, LogCoord{Side::Inf, t.y}));
        return best;
    }
};

// ---------------------------------------------------------------------------
// Text grammar: products of factors separated by '*'.
//   factors: NUMBER | lK[^P] | t^P | broken(A0,AINF) | exp([C*]l1^B) |
//            exposc(C,B) | perside(E;E) | argpow(E;P) | (E)[^P]
// Case-insensitive, whitespace-insensitive.

namespace detail {

struct Parser {
    std::string s;
    size_t pos = 0;

    explicit Parser(const std::string& text) {
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(char(std::tolower(c)));
    }
    bool eat(char c) {
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }
    bool eat(const std::string& word) {
        if (s.compare(pos, word.size(), word) == 0) { pos += word.size(); return true; }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("expression parse error at position " + std::to_string(pos) + ": " + what);
    }
    double number() {
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
        if (pos < s.size() && (s[pos] == 'e') && pos + 1 < s.size() &&
            (std::isdigit(static_cast<unsigned char>(s[pos + 1])) || s[pos + 1] == '+' || s[pos + 1] == '-')) {
            ++pos;
            if (s[pos] == '+' || s[pos] == '-') ++pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        if (pos == start) fail("expected a number");
        return std::stod(s.substr(start, pos - start));
    }
    double opt_power() { return eat('^') ? number() : 1.0; }

    SvPtr factor() {
        if (eat("exposc(")) {
            double c = number();
            if (!eat(',')) fail("expected ','");
            double beta = number();
            if (!eat(')')) fail("expected ')'");
            return SvExpr::exp_pow_log(c, beta, true);
        }
        if (eat("exp(")) {
            double c = 1.0;
            size_t save = pos;
            // optional leading coefficient
            if (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '-' ||
                                   s[pos] == '+' || s[pos] == '.')) {
                c = number();
                if (!eat('*')) { pos = save; c = 1.0; }
            }
            if (!eat("l1")) fail("expected 'l1' inside exp()");
            double beta = opt_power();
            if (!eat(')')) fail("expected ')'");
            return SvExpr::exp_pow_log(c, beta);
        }
        if (eat("broken(")) {
            double a0 = number();
            if (!eat(',')) fail("expected ','");
            double ainf = number();
            if (!eat(')')) fail("expected ')'");
            return SvExpr::broken_log(a0, ainf);
        }
        if (eat("perside(")) {
            SvPtr left = expr();
            if (!eat(';')) fail("expected ';'");
            SvPtr right = expr();
            if (!eat(')')) fail("expected ')'");
            return SvExpr::per_side(std::move(left), std::move(right));
        }
        if (eat("argpow(")) {
            SvPtr inner = expr();
            if (!eat(';')) fail("expected ';'");
            double rho = number();
            if (!eat(')')) fail("expected ')'");
            return SvExpr::arg_power(std::move(inner), rho);
        }
        if (eat('(')) {
            SvPtr inner = expr();
            if (!eat(')')) fail("expected ')'");
            double p = opt_power();
            return p == 1.0 ? inner : SvExpr::power(std::move(inner), p);
        }
        if (eat('l')) {
            size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (pos == start) fail("expected a log tier index");
            int tier = std::stoi(s.substr(start, pos - start));
            return SvExpr::log_tier(tier, opt_power());
        }
        if (eat('t')) {
            if (!eat('^')) fail("raw power needs an exponent: t^D");
            return SvExpr::raw_power(number());
        }
        return SvExpr::constant(number());
    }

    SvPtr expr() {
        std::vector<SvPtr> factors{factor()};
        while (eat('*')) factors.push_back(factor());
        return SvExpr::product(std::move(factors));
    }
};

}  // namespace detail

inline SvPtr parse(const std::string& text) {
    detail::Parser p(text);
    SvPtr e = p.expr();
    if (p.pos != p.s.size()) p.fail("trailing input");
    return e;
}

inline std::string render(const SvExpr& e) {
    std::ostringstream os;
    switch (e.kind) {
        case SvExpr::Kind::Const: os << e.a; break;
        case SvExpr::Kind::LogTier:
            os << "l" << e.tier;
            if (e.a != 1.0) os << "^" << e.a;
            break;
        case SvExpr::Kind::BrokenLog: os << "broken(" << e.a << "," << e.b << ")"; break;
        case SvExpr::Kind::ExpPowLog:
            if (e.oscillate) os << "exposc(" << e.a << "," << e.b << ")";
            else os << "exp(" << e.a << "*l1^" << e.b << ")";
            break;
        case SvExpr::Kind::Product:
            for (size_t i = 0; i < e.children.size(); ++i) {
                if (i) os << "*";
                os << render(*e.children[i]);
            }
            break;
        case SvExpr::Kind::Power: os << "(" << render(*e.children[0]) << ")^" << e.a; break;
        case SvExpr::Kind::ArgPower: os << "argpow(" << render(*e.children[0]) << ";" << e.a << ")"; break;
        case SvExpr::Kind::RawPower: os << "t^" << e.a; break;
        case SvExpr::Kind::PerSide:
            os << "perside(" << render(*e.children[0]) << ";" << render(*e.children[1]) << ")";
            break;
    }
    return os.str();
}

}  // namespace lk::sv
