#include "doctest.h"
#include "siegelmate/lamination.hpp"

#include <cmath>
#include <random>

using namespace siegelmate;

namespace {

std::vector<Angle> A(std::initializer_list<std::pair<long long, long long>> xs) {
    std::vector<Angle> out;
    for (auto [n, d] : xs) out.emplace_back(n, d);
    return out;
}

// Exhaustive check of both endpoint pairings against the critical diameter,
// shifted by eps in the direction chosen by `shift` (floating point, so it
// shares no code with the exact side test).
bool pairing_ok(double a, double b, double p0, double p1) {
    auto in = [](double lo, double hi, double x) { return lo < x && x < hi; };
    bool sa = in(p0, p1, a), sb = in(p0, p1, b);
    return sa == sb;
}

std::vector<std::pair<double, double>> oracle_preimages(const Leaf& leaf, double v, double shift) {
    double p0 = v / 2 + shift, p1 = v / 2 + 0.5 + shift;
    double a = leaf.a.to_double(), b = leaf.b.to_double();
    double a0 = a / 2, a1 = a / 2 + 0.5, b0 = b / 2, b1 = b / 2 + 0.5;
    std::vector<std::pair<double, double>> ok;
    if (pairing_ok(a0, b0, p0, p1) && pairing_ok(a1, b1, p0, p1)) {
        ok.emplace_back(std::min(a0, b0), std::max(a0, b0));
        ok.emplace_back(std::min(a1, b1), std::max(a1, b1));
    }
    if (pairing_ok(a0, b1, p0, p1) && pairing_ok(a1, b0, p0, p1)) {
        ok.emplace_back(std::min(a0, b1), std::max(a0, b1));
        ok.emplace_back(std::min(a1, b0), std::max(a1, b0));
    }
    std::sort(ok.begin(), ok.end());
    return ok;
}

}  // namespace

TEST_CASE("leaf basics") {
    Leaf l(Angle(2, 3), Angle(1, 3));
    CHECK(l.a == Angle(1, 3));
    CHECK_THROWS_AS(Leaf(Angle(1, 3), Angle(1, 3)), std::invalid_argument);
    CHECK(crosses(Leaf(Angle(0, 1), Angle(1, 2)), Leaf(Angle(1, 4), Angle(3, 4))));
    CHECK_FALSE(crosses(Leaf(Angle(1, 6), Angle(1, 3)), Leaf(Angle(2, 3), Angle(5, 6))));
    CHECK_FALSE(crosses(Leaf(Angle(1, 3), Angle(2, 3)), Leaf(Angle(1, 3), Angle(1, 6))));
}

TEST_CASE("partition sides") {
    CriticalPartition star(Angle(1, 2), CriticalPartition::BoundaryRule::Star);
    CHECK(star.low() == Angle(1, 4));
    CHECK(star.high() == Angle(3, 4));
    CHECK(star.side(Angle(1, 2)) == Side::A);
    CHECK(star.side(Angle(1, 4)) == Side::Boundary);
    CHECK(star.itinerary(Angle(1, 2), 3) == "ABB");
    CriticalPartition open(Angle(1, 3), CriticalPartition::BoundaryRule::HalfOpen);
    CHECK(open.side(Angle(2, 3)) == Side::A);
    CHECK(open.side(Angle(1, 6)) == Side::B);
    CHECK(open.itinerary(Angle(1, 3), 4) == "AAAA");
}

TEST_CASE("preimage leaves match the exhaustive pairing oracle") {
    std::mt19937 rng(7);
    for (auto v : A({{1, 3}, {3, 7}, {1, 2}, {5, 12}, {13, 31}})) {
        CriticalPartition part(v, CriticalPartition::BoundaryRule::HalfOpen);
        std::uniform_int_distribution<int> pick(1, 250);
        for (int i = 0; i < 200; ++i) {
            long long d = pick(rng) + 2;
            long long x = 1 + pick(rng) % (d - 1), y = 1 + pick(rng) % (d - 1);
            Angle s(x, d), t(y, d);
            if (s == t) continue;
            Leaf leaf(s, t);
            auto pre = preimage_leaves(leaf, part);
            REQUIRE(pre.has_value());
            // Half-open: the diameter moves a hair counterclockwise into the gap.
            auto want = oracle_preimages(leaf, v.to_double(), 1e-12);
            REQUIRE(want.size() == 2);
            std::vector<std::pair<double, double>> got{
                {pre->first.a.to_double(), pre->first.b.to_double()},
                {pre->second.a.to_double(), pre->second.b.to_double()}};
            std::sort(got.begin(), got.end());
            for (int k = 0; k < 2; ++k) {
                CHECK(got[k].first == doctest::Approx(want[k].first));
                CHECK(got[k].second == doctest::Approx(want[k].second));
            }
        }
    }
}

TEST_CASE("basilica landing classes") {
    PcfLanding bas(Angle(1, 3), true);
    CHECK(bas.landing_class(Angle(1, 3)) == A({{1, 3}, {2, 3}}));
    CHECK(bas.landing_class(Angle()) == A({{0, 1}}));
    CHECK(bas.landing_class(Angle(1, 2)) == A({{1, 2}}));
    CHECK(bas.landing_class(Angle(1, 6)) == A({{1, 6}, {5, 6}}));
    CHECK(bas.landing_class(Angle(1, 12)) == A({{1, 12}, {11, 12}}));
    CHECK(bas.periodic_classes(2).size() == 1);
    CHECK(bas.periodic_classes(3).empty());
}

TEST_CASE("airplane landing classes") {
    PcfLanding air(Angle(3, 7), true);
    CHECK(air.landing_class(Angle(3, 7)) == A({{3, 7}, {4, 7}}));
    CHECK(air.landing_class(Angle(2, 7)) == A({{2, 7}, {5, 7}}));
    CHECK(air.landing_class(Angle(6, 7)) == A({{1, 7}, {6, 7}}));
    CHECK(air.landing_class(Angle(1, 3)) == A({{1, 3}, {2, 3}}));
    CHECK(air.landing_class(Angle(3, 14)) == A({{3, 14}, {11, 14}}));
}

TEST_CASE("Chebyshev classes agree with the cosine landing map") {
    PcfLanding cheb(Angle(1, 2), false);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> den(2, 255);
    for (int i = 0; i < 50; ++i) {
        long long d = den(rng);
        long long n = std::uniform_int_distribution<long long>(0, d - 1)(rng);
        Angle t(n, d);
        if (orbit_info(t).period > 18) continue;
        std::vector<Angle> want{t};
        double ct = std::cos(2 * M_PI * t.to_double());
        // All s with the same cosine among den-d angles: t and 1 - t only.
        for (long long k = 0; k < d; ++k) {
            Angle s(k, d);
            if (s != t && std::abs(std::cos(2 * M_PI * s.to_double()) - ct) < 1e-12)
                want.push_back(s);
        }
        std::sort(want.begin(), want.end());
        CHECK(cheb.landing_class(t) == want);
    }
}

TEST_CASE("Misiurewicz 5/12 critical class") {
    PcfLanding m(Angle(5, 12), false);
    // Real parameter: the critical value carries 5/12 and 7/12, so the
    // critical point carries all four halves.
    CHECK(m.landing_class(Angle(5, 12)) == A({{5, 12}, {7, 12}}));
    CHECK(m.landing_class(Angle(5, 24)) == A({{5, 24}, {7, 24}, {17, 24}, {19, 24}}));
    CHECK(m.landing_class(Angle(1, 3)) == A({{1, 3}, {2, 3}}));
}

TEST_CASE("materialised lamination agrees with on-demand classes") {
    for (auto [v, sa] : std::vector<std::pair<Angle, bool>>{
             {Angle(1, 3), true}, {Angle(3, 7), true}, {Angle(1, 2), false}, {Angle(5, 12), false}}) {
        PcfLanding model(v, sa);
        LaminationSet lam = model.lamination(4, 3);
        CHECK(lam.linked_pairs().empty());
        for (long long d : {3, 6, 12, 24, 7, 14, 28, 56, 5, 10, 15, 30}) {
            for (long long n = 0; n < d; ++n) {
                Angle t(n, d);
                if (orbit_info(t).preperiod > 3) continue;
                auto cls = model.landing_class(t);
                auto partners = colanding_partner(lam, t);
                cls.erase(std::find(cls.begin(), cls.end(), t));
                CHECK_MESSAGE(partners == cls, t.str());
            }
        }
        CHECK_THROWS_AS(colanding_partner(lam, Angle(1, 31)), DepthError);
        CHECK_THROWS_AS(colanding_partner(lam, Angle(1, 96)), DepthError);
    }
}

TEST_CASE("critical leaf pullback count and Siegel classes") {
    Leaf crit(Angle(3, 16), Angle(11, 16));
    CriticalPartition part(Angle(3, 8), CriticalPartition::BoundaryRule::Star);
    LaminationSet seed({crit}, part);
    for (std::size_t k = 0; k <= 6; ++k) {
        auto lam = pullback(seed, k);
        CHECK(lam.size() == (std::size_t(2) << k) - 1);
        CHECK(lam.collisions().empty());
        if (k == 6) CHECK(lam.linked_pairs().empty());
    }
    auto lam = pullback(seed, 5);
    SiegelLanding siegel(crit);
    for (long long n = 1; n < 512; n += 2) {
        Angle t(n, 512);
        auto cls = siegel.landing_class(t);
        auto partners = colanding_partner(lam, t);
        cls.erase(std::find(cls.begin(), cls.end(), t));
        CHECK(partners == cls);
    }
    CHECK(siegel.landing_class(Angle(1, 3)) == A({{1, 3}}));
    CHECK_THROWS_AS(colanding_partner(lam, Angle(1, 2048)), DepthError);
    // Forward invariance.
    for (const auto& [leaf, level] : lam.leaves())
        if (level > 0) CHECK(lam.contains(leaf.image()));
}

TEST_CASE("pullback edge cases") {
    CriticalPartition part(Angle(1, 2), CriticalPartition::BoundaryRule::Star);
    CHECK_THROWS_AS(LaminationSet({Leaf(Angle(), Angle(1, 2))}, part), std::invalid_argument);
    LaminationSet lam({Leaf(Angle(1, 3), Angle(2, 3))}, part);
    auto same = pullback(lam, 0);
    CHECK(same.size() == lam.size());
    CHECK(same.depth() == 0);
    auto deeper = pullback(lam, 2);
    // {1/3,2/3} is periodic: one preimage collides with the seed.  The lone
    // critical value 1/2 contributes the diameter {1/4,3/4} at level 2.
    CHECK(deeper.size() == 5);
    CHECK(deeper.collisions().size() == 2);
    CHECK(deeper.contains(Leaf(Angle(1, 4), Angle(3, 4))));
    CHECK(deeper.contains(Leaf(Angle(1, 6), Angle(5, 6))));
}
