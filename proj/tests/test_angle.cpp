#include "doctest.h"
#include "siegelmate/angle.hpp"

#include <set>

using namespace siegelmate;

TEST_CASE("doubling and halves") {
    CHECK(doubled(Angle(1, 3)) == Angle(2, 3));
    CHECK(doubled(Angle(5, 7)) == Angle(3, 7));
    CHECK(doubled(Angle(1, 2)).is_zero());
    auto [h0, h1] = halves(Angle(1, 3));
    CHECK(h0 == Angle(1, 6));
    CHECK(h1 == Angle(2, 3));
    CHECK(conjugate(Angle(1, 3)) == Angle(2, 3));
    CHECK(conjugate(Angle()).is_zero());
}

TEST_CASE("parse and normalise") {
    CHECK(Angle::parse("2/6") == Angle(1, 3));
    CHECK(Angle::parse("7/3") == Angle(1, 3));
    CHECK(Angle::parse("-1/4") == Angle(3, 4));
    CHECK(Angle::parse("0").str() == "0/1");
    CHECK_THROWS_AS(Angle::parse("x/3"), std::invalid_argument);
    CHECK_THROWS_AS(Angle(1, 0), std::invalid_argument);
    CHECK(Angle::dyadic(3, 4) == Angle(3, 16));
}

TEST_CASE("orbit info") {
    auto a = orbit_info(Angle(1, 6));
    CHECK(a.preperiod == 1);
    CHECK(a.period == 2);
    CHECK(a.orbit.size() == 3);
    auto b = orbit_info(Angle(3, 7));
    CHECK(b.periodic());
    CHECK(b.period == 3);
    auto z = orbit_info(Angle());
    CHECK(z.preperiod == 0);
    CHECK(z.period == 1);
    auto d = orbit_info(Angle(1, 8));
    CHECK(d.preperiod == 3);
    CHECK(d.period == 1);
}

TEST_CASE("orbit info agrees with direct simulation") {
    for (long long den = 1; den <= 4096; den += 7) {
        for (long long num = 0; num < den; num += 1 + den / 9) {
            Angle t(num, den);
            std::vector<Angle> seen;
            Angle x = t;
            while (std::find(seen.begin(), seen.end(), x) == seen.end()) {
                seen.push_back(x);
                x = doubled(x);
            }
            auto first = std::find(seen.begin(), seen.end(), x) - seen.begin();
            auto info = orbit_info(t);
            REQUIRE(info.preperiod == static_cast<std::size_t>(first));
            REQUIRE(info.period == seen.size() - first);
        }
    }
}

TEST_CASE("cyclic order") {
    CHECK(cyclic_between(Angle(1, 4), Angle(3, 4), Angle(1, 2)));
    CHECK_FALSE(cyclic_between(Angle(1, 4), Angle(3, 4), Angle(0, 1)));
    CHECK(cyclic_between(Angle(3, 4), Angle(1, 4), Angle(0, 1)));
    CHECK_FALSE(cyclic_between(Angle(3, 4), Angle(1, 4), Angle(3, 4)));
    CHECK_THROWS_AS(cyclic_between(Angle(1, 3), Angle(1, 3), Angle(1, 2)), std::invalid_argument);
}

TEST_CASE("periodic enumeration") {
    auto p3 = angles_of_period_dividing(3);
    CHECK(p3.size() == 7);
    std::set<Angle> s(p3.begin(), p3.end());
    CHECK(s.count(Angle(3, 7)) == 1);
    CHECK(order_of_two(BigInt(7)) == 3);
    CHECK(order_of_two(BigInt(5)) == 4);
    CHECK_THROWS(order_of_two(BigInt(4)));
}

TEST_CASE("huge denominators") {
    Angle t = Angle::dyadic((BigInt(1) << 199) + 1, 200);
    auto info = orbit_info(t);
    CHECK(info.preperiod == 200);
    CHECK(t.to_double() == doctest::Approx(0.5));
    AngleHash h;
    CHECK(h(t) == h(Angle(t.num(), t.den())));
}
