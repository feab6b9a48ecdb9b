#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballast/comfort.hpp"
#include "ballast/errors.hpp"

#include <cmath>

using namespace ballast;

namespace {

ComfortInput winter_office(double temp) {
    return ComfortInput{temp, temp, 0.10, 50.0, 1.2, 1.1};
}

ComfortInput summer_office(double temp) {
    return ComfortInput{temp, temp, 0.15, 50.0, 1.2, 0.6};
}

}  // namespace

TEST_CASE("published office scenarios") {
    CHECK(std::abs(pmv(winter_office(20.0)).pmv - (-0.31)) <= 0.05);
    CHECK(std::abs(pmv(winter_office(21.2)).pmv - (-0.05)) <= 0.05);
    CHECK(std::abs(pmv(summer_office(26.0)).pmv - 0.33) <= 0.05);
    CHECK(std::abs(pmv(summer_office(24.8)).pmv - (-0.04)) <= 0.05);
}

TEST_CASE("ppd floor sits at pmv zero") {
    // bisect air temperature for pmv == 0 in the summer clothing set
    double lo = 18.0, hi = 30.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = (lo + hi) / 2.0;
        (pmv(summer_office(mid)).pmv < 0.0 ? lo : hi) = mid;
    }
    const ComfortResult neutral = pmv(summer_office((lo + hi) / 2.0));
    CHECK(std::abs(neutral.pmv) < 1e-6);
    CHECK(neutral.ppd == doctest::Approx(5.0).epsilon(1e-6));

    // ppd relation holds everywhere
    for (double t = 18.0; t <= 30.0; t += 1.0) {
        const ComfortResult r = pmv(summer_office(t));
        const double expected =
            100.0 - 95.0 * std::exp(-0.03353 * std::pow(r.pmv, 4.0) - 0.2179 * r.pmv * r.pmv);
        CHECK(r.ppd == doctest::Approx(expected).epsilon(1e-12));
        CHECK(r.ppd >= 5.0);
    }
}

TEST_CASE("pmv increases with air temperature") {
    double previous = -10.0;
    for (double t = 18.0; t <= 30.0; t += 0.5) {
        const double v = pmv(winter_office(t)).pmv;
        CHECK(v > previous);
        previous = v;
    }
}

TEST_CASE("shifts in opposite directions move pmv in opposite directions") {
    const double centre = pmv(winter_office(21.0)).pmv;
    const double up = pmv(winter_office(22.0)).pmv;
    const double down = pmv(winter_office(20.0)).pmv;
    CHECK(up > centre);
    CHECK(down < centre);
    CHECK((up - centre) * (down - centre) < 0.0);
}

TEST_CASE("classification bands") {
    CHECK(classify(ComfortResult{-0.31, 0.0}, BuildingClass::existing));
    CHECK_FALSE(classify(ComfortResult{0.6, 0.0}, BuildingClass::new_build));
    CHECK(classify(ComfortResult{0.0, 0.0}, BuildingClass::existing));
    CHECK(classify(ComfortResult{0.0, 0.0}, BuildingClass::new_build));
    CHECK_FALSE(classify(ComfortResult{0.7, 0.0}, BuildingClass::existing));
    CHECK(classify(ComfortResult{-0.69, 0.0}, BuildingClass::existing));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(pmv(ComfortInput{20, 20, -0.1, 50, 1.2, 1.0}), Error);
    CHECK_THROWS_AS(pmv(ComfortInput{20, 20, 0.1, 150, 1.2, 1.0}), Error);
    CHECK_THROWS_AS(pmv(ComfortInput{20, 20, 0.1, 50, 0.0, 1.0}), Error);
    CHECK_THROWS_AS(pmv(ComfortInput{20, 20, 0.1, 50, 1.2, -1.0}), Error);
}
