#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lk/asymcalc.hpp"
#include "lk/quadnum.hpp"

using namespace lk;
using namespace lk::asym;

namespace {

EndpointSymbol sym0(double coeff, std::vector<double> exps) {
    return EndpointSymbol(Side::Zero, coeff, std::move(exps));
}

// Numeric partial of int over (e^{-Y}, e^{-y0}) of t^{-1} sym dt, near zero.
double numeric_partial(const EndpointSymbol& s, double y0, double Y) {
    auto lam = [&](double y) { return s.log_eval(y); };
    return std::exp(quad::detail::integrate_log(lam, y0, Y, 1e-10));
}

}  // namespace

TEST_CASE("symbols canonicalize away trailing zeros") {
    EndpointSymbol s = sym0(2.0, {1.0, 0.0, 0.0});
    CHECK(s.exps.size() == 1);
    CHECK(s.exp_at(5) == 0.0);
    CHECK_THROWS_AS(sym0(1.0, {1, 1, 1, 1, 1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(sym0(-1.0, {1.0}), std::invalid_argument);
}

TEST_CASE("lexicographic growth comparison") {
    CHECK(lex_growth_compare(sym0(1, {-1}), sym0(1, {-1, 0.5})) == Growth::Smaller);
    CHECK(lex_growth_compare(sym0(1, {0.2}), sym0(1, {0.1})) == Growth::Larger);
    CHECK(lex_growth_compare(sym0(3, {}), sym0(7, {})) == Growth::Similar);
    CHECK_THROWS_AS(
        lex_growth_compare(sym0(1, {1}), EndpointSymbol(Side::Inf, 1, {1})),
        std::invalid_argument);
}

TEST_CASE("growth comparison is a total preorder on random symbols") {
    SplitMix64 rng(20240811);
    std::vector<EndpointSymbol> pool;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> e;
        int depth = rng.uniform_int(0, 3);
        for (int d = 0; d < depth; ++d) e.push_back(rng.uniform_int(-3, 3) * 0.5);
        pool.push_back(sym0(rng.uniform(0.5, 4.0), e));
    }
    for (auto& u : pool) CHECK(lex_growth_compare(u, u) == Growth::Similar);
    for (auto& u : pool)
        for (auto& v : pool) {
            Growth uv = lex_growth_compare(u, v), vu = lex_growth_compare(v, u);
            if (uv == Growth::Larger) CHECK(vu == Growth::Smaller);
            if (uv == Growth::Similar) CHECK(vu == Growth::Similar);
        }
    for (auto& u : pool)
        for (auto& v : pool)
            for (auto& w : pool) {
                if (lex_growth_compare(u, v) != Growth::Smaller) continue;
                if (lex_growth_compare(v, w) != Growth::Smaller) continue;
                CHECK(lex_growth_compare(u, w) == Growth::Smaller);
            }
}

TEST_CASE("integrate_to_endpoint: first non(-1) tier decides") {
    SUBCASE("l1^-2 integrates to exactly l1^-1") {
        Verdict v = integrate_to_endpoint(sym0(1, {-2}));
        REQUIRE(v.finite());
        CHECK(v.sym.exps == std::vector<double>{-1.0});
        CHECK(v.sym.coeff == doctest::Approx(1.0));
        // The closed form is exact: check the numeric partial at several Y.
        for (double Y : {5.0, 40.0, 300.0}) {
            double numeric = numeric_partial(sym0(1, {-2}), Y, 1e7);
            CHECK(numeric == doctest::Approx(v.sym.eval(Y)).epsilon(1e-4));
        }
    }
    SUBCASE("l1^-1 diverges like l2") {
        Verdict v = integrate_to_endpoint(sym0(1, {-1}));
        REQUIRE(!v.finite());
        CHECK(v.sym.exps == std::vector<double>{0.0, 1.0});
    }
    SUBCASE("l1^-1 l2^c with c < -1 is finite, asymptote l2^{c+1}") {
        double c = -3.0;  // theta * r with room below -1
        Verdict v = integrate_to_endpoint(sym0(1, {-1, c}));
        REQUIRE(v.finite());
        CHECK(v.sym.exps == std::vector<double>{0.0, c + 1.0});
        CHECK(v.sym.coeff == doctest::Approx(1.0 / (-c - 1.0)));
        double Y = 2000.0;
        double numeric = numeric_partial(sym0(1, {-1, c}), Y, 1e9);
        CHECK(numeric == doctest::Approx(v.sym.eval(Y)).epsilon(0.05));
    }
    SUBCASE("all stored exponents -1 diverges one tier deeper") {
        Verdict v = integrate_to_endpoint(sym0(1, {-1, -1}));
        REQUIRE(!v.finite());
        CHECK(v.sym.exps == std::vector<double>{0.0, 0.0, 1.0});
    }
}

TEST_CASE("finite asymptote drift is slowly varying") {
    // Sampled at Y and 10Y, partial/asymptote moves by < 10% once Y >= 1e4.
    EndpointSymbol s = sym0(1, {-1.8, 0.7});
    Verdict v = integrate_to_endpoint(s);
    REQUIRE(v.finite());
    double r1 = numeric_partial(s, 1e4, 1e9) / v.sym.eval(1e4);
    double r2 = numeric_partial(s, 1e5, 1e9) / v.sym.eval(1e5);
    CHECK(std::abs(r2 / r1 - 1.0) < 0.10);
}

TEST_CASE("sup_toward_endpoint") {
    CHECK(sup_toward_endpoint(sym0(1, {-0.3})).finite());
    CHECK(!sup_toward_endpoint(sym0(1, {0.0, 0.2})).finite());
    Verdict c = sup_toward_endpoint(sym0(5, {}));
    REQUIRE(c.finite());
    CHECK(c.sym.coeff == 5.0);
}

TEST_CASE("norm_power_symbol: tilted norms") {
    SUBCASE("positive tilt, inner segment: boundary asymptote x^eps sym(x)") {
        Verdict v = norm_power_symbol(0.5, sym0(1, {-1}), 2.0, Segment::Inner);
        REQUIRE(v.finite());
        CHECK(v.tilt == 0.5);
        CHECK(v.sym.exps == std::vector<double>{-1.0});
        // coefficient (eps*r)^{-1/r} = 1
        CHECK(v.sym.coeff == doctest::Approx(1.0));
        // quadrature cross-check at a few germ points
        for (double Y : {3.0, 10.0, 40.0}) {
            auto lam = [&](double y) { return 2.0 * (-0.5 * y + sym0(1, {-1}).log_eval(y)); };
            double numeric = std::sqrt(std::exp(quad::detail::integrate_log(lam, Y, Y + 400.0, 1e-10)));
            double predicted = std::exp(-0.5 * Y) * v.sym.eval(Y);
            CHECK(numeric / predicted > 0.1);
            CHECK(numeric / predicted < 10.0);
        }
    }
    SUBCASE("zero tilt, inner: reduces to the endpoint integral rule") {
        Verdict v = norm_power_symbol(0.0, sym0(1, {-2}), 1.0, Segment::Inner);
        REQUIRE(v.finite());
        CHECK(v.sym.exps == std::vector<double>{-1.0});
        Verdict inf = norm_power_symbol(0.0, sym0(1, {}), 2.0, Segment::Inner);
        CHECK(!inf.finite());
    }
    SUBCASE("zero tilt, outer: forward growth") {
        // (int_x^1 t^-1 l1 dt)^{1/1} grows like l1^2/2.
        Verdict v = norm_power_symbol(0.0, sym0(1, {1}), 1.0, Segment::Outer);
        REQUIRE(v.finite());
        CHECK(v.sym.exps == std::vector<double>{2.0});
        CHECK(v.sym.coeff == doctest::Approx(0.5));
    }
    SUBCASE("negative tilt, inner: identically infinite") {
        CHECK(!norm_power_symbol(-0.25, sym0(1, {}), 2.0, Segment::Inner).finite());
    }
    SUBCASE("sup norms use the sup rules") {
        Verdict v = norm_power_symbol(0.0, sym0(1, {0.0, 0.3}), kInf, Segment::Inner);
        CHECK(!v.finite());
        Verdict w = norm_power_symbol(0.0, sym0(1, {-0.4}), kInf, Segment::Inner);
        CHECK(w.finite());
    }
}

TEST_CASE("log-kernel tail norm") {
    // || t^{-1/s} b log(x/t) ||_{s,(0,x)} with b = l1^{-4/3} l2^{-0.9}, s = 3:
    // behaves like l2^{-1.7/3}.
    Verdict v = log_kernel_tail_norm(sym0(1, {-4.0 / 3.0, -0.9}), 3.0);
    REQUIRE(v.finite());
    CHECK(v.sym.exps[0] == doctest::Approx(0.0));
    CHECK(v.sym.exps[1] == doctest::Approx(-1.7 / 3.0));
    // b = l3^{-alpha}: the tail integral with the log kernel diverges.
    Verdict w = log_kernel_tail_norm(sym0(1, {0, 0, -0.5}), 1.0);
    CHECK(!w.finite());
}

TEST_CASE("log-kernel forward norm") {
    // || t^{-1/2} g log(t/x) ||_{2,(x,1)} with g = l1^{-1/2} (density g^2 = u^{-1}):
    // ~ l1 * l2^{1/2}.
    Verdict v = log_kernel_forward_norm(sym0(1, {-0.5}), 2.0);
    REQUIRE(v.finite());
    CHECK(v.sym.exps[0] == doctest::Approx(1.0));
    CHECK(v.sym.exps[1] == doctest::Approx(0.5));
}

TEST_CASE("reciprocal tail equivalences") {
    SUBCASE("lam = 1, R = 1: growth l1, output ~ l1^{-1}") {
        auto rt = reciprocal_tail(sym0(1, {}), 1.0, 1.0);
        CHECK(!rt.restricted);
        CHECK(rt.sym.exps == std::vector<double>{-1.0});
        // Both sides numerically: the forward norm is exactly Y and the
        // S-norm of the reciprocal-cumulant weight is exactly 1/Y, so their
        // product is 1; the symbol tracks 1/Y with vanishing drift.
        for (double Y : {10.0, 100.0, 1000.0}) {
            auto lam = [](double y) { return -2.0 * std::log(y); };
            double ns = std::exp(quad::detail::integrate_log(lam, Y, 1e9, 1e-11));
            CHECK(Y * ns == doctest::Approx(1.0).epsilon(0.01));
            CHECK(rt.sym.eval(Y) / ns == doctest::Approx(1.0).epsilon(0.15));
        }
    }
    SUBCASE("lam = l1^-1, R = 2, S = 2: restricted variant, output l1^{1/2}") {
        auto rt = reciprocal_tail(sym0(1, {-1}), 2.0, 2.0);
        CHECK(rt.restricted);
        CHECK(rt.sym.exps == std::vector<double>{0.5});
        // Quadrature on both sides: tail norm is (1+Y)^{-1/2} and the S-norm
        // integrand collapses to 1, giving sqrt(Y); drift < 5% by Y = 1000.
        for (double Y : {100.0, 1000.0}) {
            auto lhs_lam = [](double y) { return -2.0 * std::log1p(y); };
            double lhs = std::sqrt(std::exp(quad::detail::integrate_log(lhs_lam, Y, 1e9, 1e-11)));
            auto rhs_lam = [](double) { return 0.0; };
            double rhs = std::sqrt(std::exp(quad::detail::integrate_log(rhs_lam, 0.0, Y, 1e-11)));
            CHECK(lhs * rhs == doctest::Approx(1.0).epsilon(0.05));
            CHECK(rt.sym.eval(Y) / rhs == doctest::Approx(1.0).epsilon(0.05));
        }
    }
    SUBCASE("S = inf is the equality case: coefficient exactly Lam^{-1/R}") {
        auto rt = reciprocal_tail(sym0(1, {}), 1.0, kInf);
        CHECK(rt.sym.coeff == doctest::Approx(1.0));
        CHECK(rt.sym.exps == std::vector<double>{-1.0});
    }
}
