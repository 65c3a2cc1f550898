#include <metamd/errors.hpp>
#include <metamd/study.hpp>

#include <doctest.h>

#include <stdexcept>
#include <vector>

using namespace metamd;

TEST_CASE("md_effect direct arithmetic") {
    const StudySummary s{4, 5.0, 4.0, 2, 3.0, 2.0};
    const EffectRow e = md_effect(s);
    CHECK(e.y == doctest::Approx(2.0));
    CHECK(e.v2 == doctest::Approx(2.0));  // 4/4 + 2/2
    CHECK(e.eff_n == doctest::Approx(8.0 / 6.0));
    CHECK(e.n_t == 4);
    CHECK(e.n_c == 2);
}

TEST_CASE("md_effect identical arms gives y = 0") {
    const StudySummary s{10, 3.7, 1.0, 10, 3.7, 1.0};
    CHECK(md_effect(s).y == doctest::Approx(0.0));
}

TEST_CASE("md_effect unpooled variance") {
    const StudySummary s{10, 0.0, 10.0, 30, 0.0, 10.0};
    CHECK(md_effect(s).v2 == doctest::Approx(1.0 + 1.0 / 3.0));
}

TEST_CASE("validate_study rejects bad arms and names the field") {
    CHECK_THROWS_WITH_AS(validate_study({1, 0, 1, 5, 0, 1}, 3),
                         doctest::Contains("n_t"), ValidationError);
    CHECK_THROWS_WITH_AS(validate_study({5, 0, 1, 1, 0, 1}, 0),
                         doctest::Contains("n_c"), ValidationError);
    CHECK_THROWS_WITH_AS(validate_study({5, 0, 0.0, 5, 0, 1}, 0),
                         doctest::Contains("var_t"), ValidationError);
    CHECK_THROWS_WITH_AS(validate_study({5, 0, 1, 5, 0, -2.0}, 7),
                         doctest::Contains("var_c"), ValidationError);
}

TEST_CASE("validate_dataset") {
    const StudySummary ok{5, 1.0, 1.0, 5, 0.0, 1.0};
    SUBCASE("K = 1 rejected") {
        const std::vector<StudySummary> one{ok};
        CHECK_THROWS_AS(validate_dataset(one), ValidationError);
    }
    SUBCASE("two valid studies give two effect rows") {
        const std::vector<StudySummary> two{ok, ok};
        CHECK(validate_dataset(two).size() == 2);
    }
    SUBCASE("bad study reported with its index") {
        std::vector<StudySummary> ds{ok, ok};
        ds[1].var_c = 0.0;
        CHECK_THROWS_WITH_AS(validate_dataset(ds), doctest::Contains("var_c"),
                             ValidationError);
        CHECK_THROWS_WITH_AS(validate_dataset(ds), doctest::Contains("study 2"),
                             ValidationError);
    }
}

TEST_CASE("shift_scale") {
    const std::vector<StudySummary> ds{{5, 1.0, 2.0, 5, 0.5, 1.0},
                                       {8, -1.0, 0.5, 4, 0.0, 3.0}};
    SUBCASE("identity") {
        const auto out = shift_scale(ds, 0.0, 1.0);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            CHECK(out[i].mean_t == ds[i].mean_t);
            CHECK(out[i].var_c == ds[i].var_c);
        }
    }
    SUBCASE("treatment-only shift moves every y by delta") {
        const double delta = 2.5;
        const auto out = shift_scale(ds, delta, 1.0, true);
        for (std::size_t i = 0; i < ds.size(); ++i)
            CHECK(md_effect(out[i]).y == doctest::Approx(md_effect(ds[i]).y + delta));
    }
    SUBCASE("scale 2 multiplies y by 2 and v2 by 4") {
        const auto out = shift_scale(ds, 0.0, 2.0);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            CHECK(md_effect(out[i]).y == doctest::Approx(2.0 * md_effect(ds[i]).y));
            CHECK(md_effect(out[i]).v2 == doctest::Approx(4.0 * md_effect(ds[i]).v2));
        }
    }
    SUBCASE("scale <= 0 rejected") {
        CHECK_THROWS_AS(shift_scale(ds, 0.0, 0.0), std::domain_error);
        CHECK_THROWS_AS(shift_scale(ds, 0.0, -1.0), std::domain_error);
    }
    SUBCASE("v2 invariant to shifting both arms") {
        const auto out = shift_scale(ds, 3.0, 1.0, false);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            CHECK(md_effect(out[i]).v2 == doctest::Approx(md_effect(ds[i]).v2));
            CHECK(md_effect(out[i]).y == doctest::Approx(md_effect(ds[i]).y));
        }
    }
}
