#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lk/harness.hpp"

using namespace lk;
using namespace lk::harness;

namespace {

HardySpec make_spec(HardyKind kind, double r, double s, const char* a, const char* b,
                    double mu = 0.0, double nu = 1.0, double kappa = 1.0) {
    HardySpec spec;
    spec.kind = kind;
    spec.r = r;
    spec.s = s;
    spec.a = sv::parse(a);
    spec.b = sv::parse(b);
    spec.mu = mu;
    spec.nu = nu;
    spec.kappa = kappa;
    return spec;
}

}  // namespace

TEST_CASE("member transforms are exact on plain cells") {
    Member g;
    g.side = Side::Zero;
    g.y = {0.0, std::log(2.0)};  // support (1/2, 1), height 1
    g.logh = {0.0};
    detail::MemberTransform tr(g, 1.0);
    // lower transform at t = 1 (y = 0): int_{1/2}^{1} du = 1/2
    CHECK(std::exp(tr.log_lower(0.0)) == doctest::Approx(0.5).epsilon(1e-12));
    // upper transform at t = 1/2: the same mass
    CHECK(std::exp(tr.log_upper(std::log(2.0))) == doctest::Approx(0.5).epsilon(1e-12));
    // kappa = 1/2: int u^{-1/2} du over (1/2,1) = 2(1 - sqrt(1/2))
    detail::MemberTransform tr2(g, 0.5);
    CHECK(std::exp(tr2.log_lower(0.0)) ==
          doctest::Approx(2.0 * (1.0 - std::sqrt(0.5))).epsilon(1e-12));
}

TEST_CASE("flat tilted instance has stable constants") {
    auto spec = make_spec(HardyKind::TiltedTwoSided, 2, 2, "1", "1", 0.5, 1.0, 1.0);
    for (const Condition& c : conditions_of(spec)) {
        auto sweep = estimate_best_constant(spec, c, default_family(spec.kind, c, 7), 6, 11);
        CAPTURE(c.name);
        CHECK(sweep.classification == "stable");
        REQUIRE(!sweep.constants.empty());
        CHECK(sweep.constants.back() > 0.0);
        CHECK(std::isfinite(sweep.constants.back()));
    }
}

TEST_CASE("flat lower-limit instance grows like the depth") {
    auto spec = make_spec(HardyKind::LowerLimit, 1, 1, "1", "1");
    Condition general = conditions_of(spec)[0];
    auto sweep = estimate_best_constant(spec, general, default_family(spec.kind, general, 11), 6, 10);
    CHECK(sweep.classification == "growing");
    REQUIRE(sweep.constants.size() >= 4);
    CHECK(sweep.constants.back() >= 2.0 * sweep.constants.front());
}

TEST_CASE("zero family gives zero constants and scaling is invariant") {
    auto spec = make_spec(HardyKind::LowerLimit, 2, 2, "l1^1.7", "l1^0.5");
    Condition c = conditions_of(spec)[0];
    Member zero;
    zero.side = Side::Zero;
    zero.y = {0.0, 5.0};
    zero.logh = {-kInf};
    CHECK(member_ratio(spec, c, zero) == 0.0);

    SplitMix64 rng(5);
    auto m = detail::monotone_member(Side::Zero, 300.0, rng);
    double base = member_ratio(spec, c, m);
    Member scaled = m;
    for (auto& h : scaled.logh) h += std::log(17.0);
    CHECK(member_ratio(spec, c, scaled) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("reports are deterministic in the seed") {
    auto spec = make_spec(HardyKind::UpperLimit, 2, 2, "l1^-0.6", "l1^-1.8");
    auto rep1 = verify_equivalence(spec, 42, 6, 9);
    auto rep2 = verify_equivalence(spec, 42, 6, 9);
    CHECK(rep1.to_json() == rep2.to_json());
    CHECK(rep1.to_csv() == rep2.to_csv());
    auto rep3 = verify_equivalence(spec, 43, 6, 9);
    CHECK(rep1.to_json().size() > 40);
    (void)rep3;
}

TEST_CASE("equivalence verdicts agree on clean instances") {
    struct Row {
        HardyKind kind;
        double r, s;
        const char* a;
        const char* b;
        bool finite;
    };
    const Row rows[] = {
        {HardyKind::TiltedTwoSided, 2, 2, "l1^0.5", "1", true},
        {HardyKind::TiltedTwoSided, 1, 2, "1", "l1^0.4", false},
        {HardyKind::LowerLimit, 2, 2, "l1^1.7", "l1^0.5", true},
        {HardyKind::LowerLimit, 1, 1, "1", "1", false},
        {HardyKind::UpperLimit, 2, 2, "l1^-0.6", "l1^-1.8", true},
        {HardyKind::UpperLimit, 2, 2, "l1^-0.6", "l1^-1.2", false},
        {HardyKind::UpperLimitMonotone, 2, 2, "l1^-0.6", "l1^-1.8", true},
        {HardyKind::UpperLimitMonotone, 2, 2, "l1^-0.6", "l1^-1.2", false},
    };
    for (auto& row : rows) {
        CAPTURE(to_string(row.kind));
        CAPTURE(row.a);
        CAPTURE(row.b);
        auto spec = make_spec(row.kind, row.r, row.s, row.a, row.b, 0.5, 1.0, 1.0);
        auto rep = verify_equivalence(spec, 1234, 6, 10);
        CHECK(rep.functional.finite() == row.finite);
        for (auto& c : rep.conditions) {
            CAPTURE(c.condition.name);
            CHECK(c.agrees);
        }
    }
}

TEST_CASE("monotone gap witness on the canonical split instance") {
    auto spec = make_spec(HardyKind::UpperLimitMonotone, 2, 3, "l1^-0.5*l2^-1",
                          "l1^-1.33333333333333333*l2^-0.9");
    auto rep = monotone_gap_witness(spec, 99, {256, 4096, 65536, 1 << 22});
    REQUIRE(rep.valid_instance);
    CHECK(rep.growth.exps[1] == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(rep.predicted_total_growth >= 1.5);
    CHECK(rep.growth_matches);
    CHECK(rep.monotone_drift < 1.5);
    // general-family constants must actually increase across the window
    REQUIRE(rep.general_constants.size() >= 2);
    CHECK(rep.general_constants.back() > rep.general_constants.front());
    // degenerate request: both quantities finite, nothing to witness
    auto tame = make_spec(HardyKind::UpperLimitMonotone, 2, 2, "l1^-0.6", "l1^-1.8");
    CHECK(!monotone_gap_witness(tame, 99).valid_instance);
}
