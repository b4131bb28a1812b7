#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lk/svfunc.hpp"

using namespace lk;
using namespace lk::sv;

namespace {

LogCoord shift_by_factor(const LogCoord& at, double c) {
    // coordinate of c * t given the coordinate of t
    double lt = at.log_t() + std::log(c);
    return lt < 0 ? LogCoord{Side::Zero, -lt} : LogCoord{Side::Inf, lt};
}

}  // namespace

TEST_CASE("evaluation in log coordinates") {
    LogCoord at{Side::Zero, 3.0};
    CHECK(eval(*SvExpr::log_tier(1, 1.0), at).value == doctest::Approx(4.0));

    auto e = parse("l1^-0.5 * l2^0.25");
    double expect = std::pow(4.0, -0.5) * std::pow(1.0 + std::log(4.0), 0.25);
    CHECK(eval(*e, at).value == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(0.6215).epsilon(1e-3));

    auto g = parse("exp(l1^0.5)");
    CHECK(eval(*g, at).value == doctest::Approx(std::exp(2.0)).epsilon(1e-12));

    // Y near 1e300 stays finite in log space.
    auto far = eval(*parse("l2^0.1"), LogCoord{Side::Zero, 1e300});
    CHECK(std::isfinite(far.log_value));
    CHECK(!far.saturated);

    // saturation is reported, not silently inf
    auto sat = eval(*parse("exp(0.9*l1^0.9)"), LogCoord{Side::Zero, 1e9});
    CHECK(sat.saturated);
    CHECK(std::isfinite(sat.log_value));
}

TEST_CASE("positivity on every representable input") {
    SplitMix64 rng(7);
    std::vector<SvPtr> exprs = {
        parse("l1^-3"), parse("l1^2*l2^-1"), parse("broken(2,-1)"),
        parse("exp(-1*l1^0.5)"), parse("t^0.3"), parse("exposc(1,0.33)"),
        SvExpr::arg_power(parse("l1^0.5"), 2.0)};
    for (auto& e : exprs)
        for (int i = 0; i < 50; ++i) {
            Side side = rng.uniform() < 0.5 ? Side::Zero : Side::Inf;
            LogCoord at{side, std::pow(10.0, rng.uniform(-3.0, 250.0))};
            CHECK(std::isfinite(log_eval(*e, at)));
        }
}

TEST_CASE("argument powers rescale the log coordinate") {
    // substar with slope 1 is the identity
    auto b = parse("l1^2*l2^-0.5");
    CHECK(substar(b, 1.0) == b);

    // substar of l1^alpha with slope 2: ratio to the original stays within
    // [2^-|alpha|, 2^|alpha|] for Y >= 1.
    for (double alpha : {0.75, -1.5}) {
        auto e = SvExpr::log_tier(1, alpha);
        auto es = substar(e, 2.0);
        for (double y = 1.0; y <= 1e6; y *= 3.7) {
            LogCoord at{Side::Zero, y};
            double ratio = std::exp(log_eval(*es, at) - log_eval(*e, at));
            CHECK(ratio >= std::pow(2.0, -std::abs(alpha)) - 1e-12);
            CHECK(ratio <= std::pow(2.0, std::abs(alpha)) + 1e-12);
        }
    }

    // exponent vectors are preserved by substar for any positive slope
    auto prod = parse("l1^0.7*l2^-1.3");
    for (double m : {0.5, 2.0, 7.0}) {
        auto sym = to_symbol(*substar(prod, m), Side::Zero);
        REQUIRE(sym.has_value());
        CHECK(sym->exps == std::vector<double>{0.7, -1.3});
    }
    // negative slope swaps the germ sides
    auto flipped = to_symbol(*substar(parse("broken(2,-1)"), -1.0), Side::Zero);
    REQUIRE(flipped.has_value());
    CHECK(flipped->exps == std::vector<double>{-1.0});
}

TEST_CASE("quasi-monotonicity certificate") {
    auto grid = default_grid();
    CHECK(certify_sv(*parse("l1^-3"), 0.1, grid).pass);
    CHECK(!certify_sv(*parse("t^0.1"), 0.05, grid).pass);
    CHECK(certify_sv(*parse("exposc(1,0.3333333333)"), 0.5, grid).pass);
    CHECK(certify_sv(*parse("broken(2,-1)"), 0.25, grid).pass);
    CHECK_THROWS_AS(certify_sv(*parse("l1"), -1.0, grid), std::invalid_argument);
    CHECK_THROWS_AS(certify_sv(*parse("l1"), 0.1, {}), std::invalid_argument);
}

TEST_CASE("symbol extraction") {
    auto s1 = to_symbol(*parse("l1^-1*l2^0.3"), Side::Zero);
    REQUIRE(s1.has_value());
    CHECK(s1->coeff == doctest::Approx(1.0));
    CHECK(s1->exps == std::vector<double>{-1.0, 0.3});

    auto s2 = to_symbol(*parse("(l1^2)^-0.5"), Side::Zero);
    REQUIRE(s2.has_value());
    CHECK(s2->exps == std::vector<double>{-1.0});

    CHECK(!to_symbol(*parse("exp(l1^0.5)"), Side::Zero).has_value());
    CHECK(!to_symbol(*parse("t^0.1"), Side::Zero).has_value());

    // broken logs resolve per side
    auto b0 = to_symbol(*parse("broken(2,-1)"), Side::Zero);
    auto bi = to_symbol(*parse("broken(2,-1)"), Side::Inf);
    CHECK(b0->exps == std::vector<double>{2.0});
    CHECK(bi->exps == std::vector<double>{-1.0});
}

TEST_CASE("values on compact subintervals sit in a positive band") {
    // 1000-point grid over [e^-5, e^5] for a handful of certified germs.
    for (auto& text : {"l1^-3", "l1^2*l2^-1", "exposc(1,0.3333333333)", "exp(0.5*l1^0.5)"}) {
        auto e = parse(text);
        double lo = kInf, hi = -kInf;
        for (int i = 0; i <= 1000; ++i) {
            double lt = -5.0 + 10.0 * i / 1000.0;
            LogCoord at = lt < 0 ? LogCoord{Side::Zero, -lt} : LogCoord{Side::Inf, lt};
            double v = eval(*e, at).value;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(lo > 0.0);
        CHECK(std::isfinite(hi));
    }
}

TEST_CASE("bounded dilation ratios for certified germs") {
    for (auto& text : {"l1^-3", "l1^2*l2^-1", "broken(2,-1)"}) {
        auto e = parse(text);
        for (double c : {2.0, 10.0}) {
            double worst_small = 0.0, worst_full = 0.0;
            for (double y = 1.0; y <= 1e6; y *= 2.3) {
                LogCoord at{Side::Zero, y};
                double r = std::abs(log_eval(*e, at) - log_eval(*e, shift_by_factor(at, c)));
                if (y <= 1e3) worst_small = std::max(worst_small, r);
                worst_full = std::max(worst_full, r);
            }
            // the dilation factor is bounded and does not grow with scale
            CHECK(worst_full < std::log(1000.0));
            CHECK(worst_full == doctest::Approx(worst_small));
        }
    }
}

TEST_CASE("substar then to_symbol preserves exponent vectors exactly") {
    SplitMix64 rng(99);
    for (int i = 0; i < 30; ++i) {
        std::vector<SvPtr> fs;
        int depth = rng.uniform_int(1, 3);
        for (int d = 0; d < depth; ++d)
            fs.push_back(SvExpr::log_tier(d + 1, rng.uniform_int(-4, 4) * 0.5));
        auto e = SvExpr::product(fs);
        double m = rng.uniform(0.2, 5.0);
        auto before = to_symbol(*e, Side::Zero);
        auto after = to_symbol(*substar(e, m), Side::Zero);
        REQUIRE(before.has_value());
        REQUIRE(after.has_value());
        CHECK(before->exps == after->exps);
    }
}

TEST_CASE("parser is whitespace- and case-insensitive and round-trips") {
    auto a = parse("L1^-0.5 * L2^0.25");
    auto b = parse("l1^-0.5*l2^0.25");
    LogCoord at{Side::Inf, 17.0};
    CHECK(log_eval(*a, at) == log_eval(*b, at));
    for (auto& text : {"l1^-0.5*l2^0.25", "exp(0.5*l1^0.5)", "broken(2,-1)", "t^0.1",
                       "perside(l1^2;l2^-1)", "exposc(1,0.25)"}) {
        auto e = parse(text);
        auto again = parse(render(*e));
        CHECK(log_eval(*e, at) == doctest::Approx(log_eval(*again, at)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(parse("l1^^2"), std::invalid_argument);
    CHECK_THROWS_AS(parse("wat"), std::invalid_argument);
    CHECK_THROWS_AS(parse("exp(l1^2)"), std::invalid_argument);  // beta must be < 1
}

TEST_CASE("running sup normalization") {
    // increasing toward t=1 from below: sup over (0,t] is the value at t
    RunningSup d1(parse("l1^-1"));
    CHECK(!d1.infinite_everywhere);
    LogCoord at{Side::Zero, 10.0};
    CHECK(d1.log_sup(at) == doctest::Approx(log_eval(*parse("l1^-1"), at)).epsilon(1e-6));
    // unbounded near zero: the running sup is infinite everywhere
    RunningSup d2(parse("l1^0.5"));
    CHECK(d2.infinite_everywhere);
    // constant
    RunningSup d3(parse("2"));
    CHECK(std::exp(d3.log_sup(at)) == doctest::Approx(2.0));
}
