#pragma once

// Exact lexicographic asymptotic calculus for products of iterated-log
// powers near one endpoint (0 or inf). A symbol coeff * prod_i ell_i^{a_i}
// describes the germ of a weight; integration against dt/t, suprema and
// weighted norms all reduce to first-index rules on the exponent vector.

#include <sstream>
#include <string>
#include <vector>

#include "lk/common.hpp"

namespace lk::asym {

inline constexpr int kMaxTier = 6;
inline constexpr double kExpEps = 1e-12;  // exponents closer than this are equal

struct EndpointSymbol {
    Side side = Side::Zero;
    double coeff = 1.0;
    std::vector<double> exps;  // exps[i] is the exponent of ell_{i+1}; trailing zeros trimmed

    EndpointSymbol() = default;
    EndpointSymbol(Side s, double c, std::vector<double> e) : side(s), coeff(c), exps(std::move(e)) {
        if (!(coeff > 0)) throw std::invalid_argument("EndpointSymbol: coeff must be positive");
        canonicalize();
    }
    static EndpointSymbol constant(Side s, double c) { return EndpointSymbol(s, c, {}); }

    void canonicalize() {
        while (!exps.empty() && std::abs(exps.back()) <= kExpEps) exps.pop_back();
        if (exps.size() > kMaxTier) throw std::invalid_argument("EndpointSymbol: tier depth beyond cap");
    }
    double exp_at(size_t i) const { return i < exps.size() ? exps[i] : 0.0; }
    bool is_constant() const { return exps.empty(); }

    double log_eval(double y) const {
        LogCoord at{side, y};
        double v = std::log(coeff);
        for (size_t i = 0; i < exps.size(); ++i) v += exps[i] * log_ell(int(i) + 1, at);
        return v;
    }
    double eval(double y) const { return std::exp(log_eval(y)); }

    EndpointSymbol mul(const EndpointSymbol& o) const {
        if (o.side != side) throw std::invalid_argument("EndpointSymbol: side mismatch");
        std::vector<double> e(std::max(exps.size(), o.exps.size()), 0.0);
        for (size_t i = 0; i < e.size(); ++i) e[i] = exp_at(i) + o.exp_at(i);
        return EndpointSymbol(side, coeff * o.coeff, std::move(e));
    }
    EndpointSymbol pow(double rho) const {
        if (rho == 0.0) return constant(side, 1.0);
        std::vector<double> e = exps;
        for (auto& x : e) x *= rho;
        return EndpointSymbol(side, std::pow(coeff, rho), std::move(e));
    }

    std::string render() const {
        std::ostringstream os;
        bool lead = true;
        if (coeff != 1.0 || exps.empty()) { os << coeff; lead = false; }
        for (size_t i = 0; i < exps.size(); ++i) {
            if (std::abs(exps[i]) <= kExpEps) continue;
            if (!lead) os << "*";
            os << "l" << (i + 1);
            if (std::abs(exps[i] - 1.0) > kExpEps) os << "^" << exps[i];
            lead = false;
        }
        return os.str();
    }
};

enum class Growth { Smaller, Similar, Larger };  // u<<v, u~v, u>>v toward the endpoint

// Lexicographic comparison of growth toward the endpoint. Coefficients never
// reorder growth; equal exponent vectors compare Similar.
inline Growth lex_growth_compare(const EndpointSymbol& u, const EndpointSymbol& v) {
    if (u.side != v.side) throw std::invalid_argument("lex_growth_compare: side mismatch");
    size_t n = std::max(u.exps.size(), v.exps.size());
    for (size_t i = 0; i < n; ++i) {
        double d = u.exp_at(i) - v.exp_at(i);
        if (d > kExpEps) return Growth::Larger;
        if (d < -kExpEps) return Growth::Smaller;
    }
    return Growth::Similar;
}

// Larger of two same-side symbols toward the endpoint; on a tie the
// coefficients add (a + b with a ~ b is ~ their sum).
inline EndpointSymbol lex_max(const EndpointSymbol& u, const EndpointSymbol& v, bool* tied = nullptr) {
    Growth g = lex_growth_compare(u, v);
    if (tied) *tied = (g == Growth::Similar);
    if (g == Growth::Larger) return u;
    if (g == Growth::Smaller) return v;
    EndpointSymbol out = u;
    out.coeff += v.coeff;
    return out;
}

// Verdict of an asymptotic classification.
//   Finite  : the quantity is finite, with `tilt`/`sym` its asymptote in x.
//             For per-x norms the asymptote may grow unboundedly in x while
//             each individual value stays finite.
//   Infinite: the quantity is +inf (for norms: for every x), with `sym` the
//             growth of its truncations.
struct Verdict {
    enum class Tag { Finite, Infinite } tag = Tag::Finite;
    double tilt = 0.0;
    EndpointSymbol sym;
    bool coeff_exact = true;

    bool finite() const { return tag == Tag::Finite; }
    static Verdict fin(EndpointSymbol s, double tilt = 0.0, bool exact = true) {
        return Verdict{Tag::Finite, tilt, std::move(s), exact};
    }
    static Verdict inf(EndpointSymbol s, double tilt = 0.0, bool exact = false) {
        return Verdict{Tag::Infinite, tilt, std::move(s), exact};
    }
};

namespace detail {

// Behavior of int_U^inf u^{v0} ell_1(u)^{v1} ... du as U -> inf.
// Finite branch: asymptote as a function of the lower limit U; divergent
// branch: growth of the partial integral as a function of the upper limit.
struct TailResult {
    bool finite;
    double coeff;
    std::vector<double> u_exps;  // u_exps[0] is the raw power of u
};

inline TailResult tail_raw(const std::vector<double>& v) {
    size_t j = 0;
    while (j < v.size() && std::abs(v[j] + 1.0) <= kExpEps) ++j;
    double head = j < v.size() ? v[j] : 0.0;  // implicit zero beyond the tail
    TailResult res;
    res.finite = head < -1.0;
    res.coeff = res.finite ? 1.0 / (-head - 1.0) : 1.0 / (head + 1.0);
    res.u_exps.assign(j, 0.0);
    res.u_exps.push_back(head + 1.0);
    for (size_t i = j + 1; i < v.size(); ++i) res.u_exps.push_back(v[i]);
    return res;
}

// Behavior of int_1^U u^{v0} ell_1(u)^{v1} ... du as U -> inf.
struct ForwardResult {
    bool grows;                  // otherwise tends to a constant (value unknown here)
    double coeff = 1.0;
    std::vector<double> u_exps;  // meaningful when grows
};

inline ForwardResult forward_raw(const std::vector<double>& v) {
    size_t j = 0;
    while (j < v.size() && std::abs(v[j] + 1.0) <= kExpEps) ++j;
    double head = j < v.size() ? v[j] : 0.0;
    ForwardResult res;
    res.grows = head > -1.0;
    if (res.grows) {
        res.coeff = 1.0 / (head + 1.0);
        res.u_exps.assign(j, 0.0);
        res.u_exps.push_back(head + 1.0);
        for (size_t i = j + 1; i < v.size(); ++i) res.u_exps.push_back(v[i]);
    }
    return res;
}

inline EndpointSymbol from_u_exps(Side side, double coeff, std::vector<double> u_exps) {
    // A u-space vector (raw, l1, l2, ...) with u = ell_1(t) reads back in t
    // as tier exponents (l1, l2, l3, ...) directly.
    return EndpointSymbol(side, coeff, std::move(u_exps));
}

}  // namespace detail

// Classify int t^{-1} sym(t) dt over the gap between the endpoint and x.
// Finite: asymptote in x (decaying). Infinite: growth of the truncated
// integral as the truncation approaches the endpoint.
inline Verdict integrate_to_endpoint(const EndpointSymbol& sym) {
    auto r = detail::tail_raw(sym.exps);
    EndpointSymbol out = detail::from_u_exps(sym.side, sym.coeff * r.coeff, r.u_exps);
    return r.finite ? Verdict::fin(out) : Verdict::inf(out);
}

// Behavior of int t^{-1} sym(t) dt over (x, fixed boundary) as x nears the
// endpoint. Finite tag with a growing symbol means "finite for each x,
// growing like sym(x)"; a Finite constant means the integral converges
// (its value is not known symbolically: coeff_exact = false).
inline Verdict integrate_from_boundary(const EndpointSymbol& sym) {
    auto r = detail::forward_raw(sym.exps);
    if (r.grows)
        return Verdict::fin(detail::from_u_exps(sym.side, sym.coeff * r.coeff, r.u_exps));
    return Verdict::fin(EndpointSymbol::constant(sym.side, 1.0), 0.0, /*exact=*/false);
}

// sup of sym over the gap between the endpoint and x.
inline Verdict sup_toward_endpoint(const EndpointSymbol& sym) {
    for (size_t i = 0; i < sym.exps.size(); ++i) {
        if (sym.exps[i] > kExpEps) return Verdict::inf(sym);
        if (sym.exps[i] < -kExpEps) return Verdict::fin(sym);  // boundary value ~ sym(x)
    }
    return Verdict::fin(sym);  // constant
}

// sup of sym over (x, fixed boundary): grows like sym(x) when sym grows
// toward the endpoint, otherwise settles at an interior constant.
inline Verdict sup_from_boundary(const EndpointSymbol& sym) {
    for (size_t i = 0; i < sym.exps.size(); ++i) {
        if (sym.exps[i] > kExpEps) return Verdict::fin(sym);
        if (sym.exps[i] < -kExpEps)
            return Verdict::fin(EndpointSymbol::constant(sym.side, 1.0), 0.0, false);
    }
    return Verdict::fin(sym);
}

enum class Segment { Inner, Outer };  // (endpoint, x) vs (x, fixed boundary)

// || t^{eps - 1/r} sym(t) ||_{r, segment}: the tilted-norm rules. The x^eps
// prefactor of the result is carried in Verdict::tilt. Finite means finite
// for each x; Infinite means the norm is +inf for every x.
inline Verdict norm_power_symbol(double eps, const EndpointSymbol& sym, double r, Segment seg) {
    if (!(r >= 1.0)) throw std::invalid_argument("norm_power_symbol: r must be >= 1");
    double eff = sym.side == Side::Zero ? eps : -eps;  // decay rate in y
    if (is_inf(r)) {
        if (eff > 0) {
            if (seg == Segment::Inner) return Verdict::fin(sym, eps);
            return Verdict::fin(EndpointSymbol::constant(sym.side, 1.0), 0.0, false);
        }
        if (eff < 0) {
            if (seg == Segment::Inner) return Verdict::inf(sym, eps);
            return Verdict::fin(sym, eps);
        }
        return seg == Segment::Inner ? sup_toward_endpoint(sym) : sup_from_boundary(sym);
    }
    if (eff > 0) {
        if (seg == Segment::Inner)
            return Verdict::fin(sym.mul(EndpointSymbol::constant(sym.side, std::pow(eff * r, -1.0 / r))), eps);
        return Verdict::fin(EndpointSymbol::constant(sym.side, 1.0), 0.0, false);
    }
    if (eff < 0) {
        EndpointSymbol scaled = sym.mul(EndpointSymbol::constant(sym.side, std::pow(-eff * r, -1.0 / r)));
        if (seg == Segment::Inner) return Verdict::inf(sym, eps);
        return Verdict::fin(scaled, eps);
    }
    // eps == 0: reduce to the dt/t rules on sym^r.
    EndpointSymbol dens = sym.pow(r);
    Verdict v = seg == Segment::Inner ? integrate_to_endpoint(dens) : integrate_from_boundary(dens);
    Verdict out = v;
    out.sym = v.sym.pow(1.0 / r);
    return out;
}

// || t^{-1/s} b(t) log(x/t) ||_{s, (endpoint, x)}: the tail norm with the
// log kernel measured from x toward the endpoint.
inline Verdict log_kernel_tail_norm(const EndpointSymbol& b, double s) {
    std::vector<double> w = b.exps;
    if (w.empty()) w.push_back(0.0);
    if (is_inf(s)) {
        w[0] += 1.0;
        EndpointSymbol cand(b.side, b.coeff, w);
        for (size_t i = 0; i < cand.exps.size(); ++i) {
            if (cand.exps[i] > kExpEps) return Verdict::inf(cand);
            if (cand.exps[i] < -kExpEps) return Verdict::fin(cand, 0.0, false);
        }
        return Verdict::fin(cand, 0.0, false);
    }
    for (auto& e : w) e *= s;
    w[0] += s;
    auto r = detail::tail_raw(w);
    EndpointSymbol raw = detail::from_u_exps(b.side, std::pow(b.coeff, s) * r.coeff, r.u_exps);
    EndpointSymbol out = raw.pow(1.0 / s);
    return r.finite ? Verdict::fin(out, 0.0, false) : Verdict::inf(out, 0.0, false);
}

// || t^{-1/s} g(t) log(t/x) ||_{s, (x, fixed boundary)}: the forward norm
// with the log kernel measured from x away from the endpoint. g is the
// weight without the log factor.
inline Verdict log_kernel_forward_norm(const EndpointSymbol& g, double s) {
    Side side = g.side;
    if (is_inf(s)) {
        // sup (dist in u) * g: grows one raw power above the forward sup of g.
        Verdict gs = sup_from_boundary(g);
        std::vector<double> e = gs.sym.exps;
        if (e.empty()) e.push_back(0.0);
        e[0] += 1.0;
        return Verdict::fin(EndpointSymbol(side, gs.sym.coeff, e), 0.0, false);
    }
    // (int_1^U (U-u)^s g_s(u) du)^{1/s} ~ U (Phi(U) + U g_s(U))^{1/s},
    // with g_s the u-space density of g^s against du.
    std::vector<double> gv = g.exps;
    if (gv.empty()) gv.push_back(0.0);
    for (auto& e : gv) e *= s;
    auto fwd = detail::forward_raw(gv);
    EndpointSymbol term_phi = fwd.grows ? detail::from_u_exps(side, fwd.coeff, fwd.u_exps)
                                        : EndpointSymbol::constant(side, 1.0);
    std::vector<double> shift = gv;
    shift[0] += 1.0;
    EndpointSymbol term_bdry = detail::from_u_exps(side, 1.0, shift);
    EndpointSymbol total = lex_max(term_phi, term_bdry);
    total.coeff *= std::pow(g.coeff, s);
    std::vector<double> e = total.exps;
    if (e.empty()) e.push_back(0.0);
    e[0] += double(s);
    EndpointSymbol result = EndpointSymbol(side, total.coeff, e).pow(1.0 / s);
    return Verdict::fin(result, 0.0, false);
}

// Reciprocal-tail equivalence: the S-norm of t^{-1/S} lam^{R/S} Lam^{-1/R-1/S}
// over the complementary region equals (R/S)^{1/S} Lam(x)^{-1/R}, where Lam
// is the diverging cumulative of t^{-1} lam^R. When the germ integral of
// lam^R converges the unrestricted equivalence is unavailable and the
// restricted-domain variant is flagged instead.
struct ReciprocalTail {
    EndpointSymbol sym;
    bool restricted = false;  // valid only on a strict sub-neighborhood of the germ
};

inline ReciprocalTail reciprocal_tail(const EndpointSymbol& lam, double R, double S) {
    if (!(R >= 1.0) || is_inf(R)) throw std::invalid_argument("reciprocal_tail: R must be in [1,inf)");
    if (!(S >= 1.0)) throw std::invalid_argument("reciprocal_tail: S must be in [1,inf]");
    EndpointSymbol dens = lam.pow(R);
    Verdict tail = integrate_to_endpoint(dens);
    double cf = is_inf(S) ? 1.0 : std::pow(R / S, 1.0 / S);
    if (!tail.finite()) {
        // Germ integral diverges: Lam is the forward cumulative, which grows.
        Verdict fwd = integrate_from_boundary(dens);
        EndpointSymbol out = fwd.sym.pow(-1.0 / R);
        out.coeff *= cf;
        return {out, false};
    }
    // Germ integral converges: only the restricted-domain variant applies,
    // with Lam the decaying cumulative from the endpoint.
    EndpointSymbol out = tail.sym.pow(-1.0 / R);
    out.coeff *= cf;
    return {out, true};
}

}  // namespace lk::asym
