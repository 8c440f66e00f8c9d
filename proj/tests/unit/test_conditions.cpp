#include <doctest.h>

#include "tfred/conditions.hpp"
#include "tfred/examples.hpp"
#include "tfred/linalg.hpp"
#include "test_systems.hpp"

using namespace tfred;

namespace {

const char* kExamples[] = {"mm_reversible_small_e0", "mm_irrev_slow_k2", "comp_inhibition_small_e0",
                           "comp_inhibition_2d", "maltose_transport"};

}  // namespace

TEST_CASE("TF0, TFI and TFII hold for every example") {
    for (const char* name : kExamples) {
        CAPTURE(name);
        const ExampleSystem ex = get_example(name);
        const auto [tf0, tfi] = check_tf0_tfi(ex.system, ex.decomposition, ex.manifold, 60);
        CHECK(tf0.ok());
        CHECK(tfi.ok());
        CHECK(check_tfii(ex.system, ex.manifold, 60).ok());
    }
}

TEST_CASE("deflation route and kernel dimension agree") {
    for (const char* name : kExamples) {
        CAPTURE(name);
        const ExampleSystem ex = get_example(name);
        const std::size_t s = ex.system.dim - ex.decomposition.rank;
        for (const auto& x : sample_manifold(ex.manifold, 30).points) {
            const Mat J = ex.system.h0.jacobian(x);
            const double scale = J.cwiseAbs().maxCoeff();
            bool deflates = true;
            try {
                deflate_zero_roots(char_poly(J / scale), s, 1e-8);
            } catch (const MultiplicityMismatch&) {
                deflates = false;
            }
            const bool kernel = static_cast<std::size_t>(J.cols() - numeric_rank(J)) == s;
            CHECK(deflates == kernel);
        }
    }
}

TEST_CASE("Jordan block fails TFI with a witness") {
    const ExampleSystem ex = testing::jordan_block();
    const auto [tf0, tfi] = check_tf0_tfi(ex.system, ex.decomposition, ex.manifold, 20);
    CHECK(tf0.ok());
    CHECK(tfi.verdict == Verdict::failed);
    CHECK(tfi.witness.has_value());
}

TEST_CASE("maltose Hurwitz minors are positive along Y") {
    const ExampleSystem ex = get_example("maltose_transport");
    const ConditionVerdict v = check_tfii(ex.system, ex.manifold, 100);
    CHECK(v.ok());
    CHECK(v.margins.at("min_hurwitz_minor") > 0.0);
}

TEST_CASE("invariance of the stoichiometric regions") {
    for (const char* name : kExamples) {
        CAPTURE(name);
        const ExampleSystem ex = get_example(name);
        const ConditionVerdict v = check_cis(ex.system, ex.cis_region, {1e-1, 1e-2, 1e-3, 1e-4}, 40, 3);
        CHECK(v.ok());
    }
}

TEST_CASE("a region cut below the stoichiometric bound leaks") {
    const ExampleSystem ex = testing::mm_shrunken(Registry::builtin().defaults("mm_reversible_small_e0"));
    const ConditionVerdict v = check_cis(ex.system, ex.cis_region, {1e-1, 1e-2}, 40, 3);
    CHECK(v.verdict == Verdict::failed);
    REQUIRE(v.witness);
    CHECK(v.detail.find("s + c <= 0.8 s0") != std::string::npos);
}

TEST_CASE("each example has exactly one stationary point in its region") {
    for (const char* name : kExamples) {
        CAPTURE(name);
        const ExampleSystem ex = get_example(name);
        const ReducedField rf = make_reduced_field(ex.decomposition, ex.system);
        const auto pts = find_stationary_points(rf, ex.manifold);
        REQUIRE(pts.size() == 1);
        CHECK(reduced_rhs(rf, pts[0]).norm() < 1e-9);
        if (ex.closed_form_stationary) CHECK((pts[0] - *ex.closed_form_stationary).norm() < 1e-8);
    }
}

TEST_CASE("report text has one block per condition and a summary") {
    ConditionReport r{"demo", {}, {{"seed", "1"}}};
    ConditionVerdict a{"TF0"};
    a.verdict = Verdict::certified;
    ConditionVerdict b{"GP"};
    b.verdict = Verdict::skipped;
    r.conditions = {a, b};
    CHECK(r.passed());
    const std::string t = r.to_text();
    CHECK(t.find("[TF0]") != std::string::npos);
    CHECK(t.find("condition.GP = skipped") != std::string::npos);
    CHECK(t.find("passed = yes") != std::string::npos);
    r.conditions[1].verdict = Verdict::failed;
    CHECK(!r.passed());
}
