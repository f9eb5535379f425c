#include "doctest.h"
#include "siegelmate/pcf.hpp"

#include <algorithm>

using namespace siegelmate;

namespace {

std::vector<std::string> edge_ids(const HubbardTree& t) {
    std::vector<std::string> out;
    for (auto [a, b] : t.edges) {
        auto x = t.vertices[a].id, y = t.vertices[b].id;
        out.push_back(std::min(x, y) + "-" + std::max(x, y));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t nu(const HubbardTree& t, const std::string& id) { return t.vertices[t.index_of(id)].nu; }

}  // namespace

TEST_CASE("kneading sequences") {
    auto k = kneading(Angle(1, 3));
    CHECK(k.symbols == "A*");
    CHECK(k.preperiod == 0);
    CHECK(k.period == 2);
    auto h = kneading(Angle(1, 2));
    CHECK(h.symbols == "AB");
    CHECK(h.preperiod == 1);
    CHECK(h.period == 1);
    auto s = kneading(Angle(1, 6));
    CHECK(s.symbols == "AAB");
    CHECK(s.preperiod == 1);
    CHECK(kneading(Angle(3, 7)).symbols == "AB*");
    CHECK_THROWS_AS(kneading(Angle()), std::invalid_argument);
}

TEST_CASE("spec validation") {
    auto cheb = PcfSpec::misiurewicz(Angle(1, 2));
    CHECK(cheb.preperiod == 1);
    CHECK(cheb.period == 1);
    auto m = PcfSpec::misiurewicz(Angle(5, 12));
    CHECK(m.preperiod == 2);
    CHECK(m.period == 1);
    auto bad = PcfSpec::superattracting(Angle(1, 3));
    bad.period = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    auto wrong = m;
    wrong.preperiod = 1;
    wrong.period = 3;
    CHECK_THROWS_AS(wrong.validate(), std::invalid_argument);
    CHECK_THROWS_AS(PcfSpec::misiurewicz(Angle(1, 7)), std::invalid_argument);
}

TEST_CASE("basilica tree") {
    auto t = build_hubbard_tree(PcfSpec::superattracting(Angle(1, 3)));
    CHECK(t.vertices.size() == 2);
    CHECK(edge_ids(t) == std::vector<std::string>{"x0-x1"});
    CHECK(nu(t, "x0") == 1);
    CHECK(nu(t, "x1") == 1);
    auto roots = root_angles(t, "x0");
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].angles == std::make_pair(Angle(1, 3), Angle(2, 3)));
}

TEST_CASE("airplane tree") {
    // Real critical orbit x1 < x0 < x2, so x0 sits inside the path.
    for (auto theta : {Angle(3, 7), Angle(4, 7)}) {
        auto t = build_hubbard_tree(PcfSpec::superattracting(theta));
        CHECK(t.vertices.size() == 3);
        CHECK(edge_ids(t) == std::vector<std::string>{"x0-x1", "x0-x2"});
        CHECK(nu(t, "x0") == 2);
        CHECK(nu(t, "x1") == 1);
        CHECK(nu(t, "x2") == 1);
        auto r1 = root_angles(t, "x1");
        REQUIRE(r1.size() == 1);
        CHECK(r1[0].angles == std::make_pair(Angle(3, 7), Angle(4, 7)));
        auto r0 = root_angles(t, "x0");
        REQUIRE(r0.size() == 2);
        CHECK(r0[0].angles == std::make_pair(Angle(3, 14), Angle(11, 14)));
        CHECK(r0[1].angles == std::make_pair(Angle(2, 7), Angle(5, 7)));
        for (const auto& r : r0) CHECK(orbit_info(r.angles.first).period % 3 == 0);
        CHECK(t.dynamics[t.index_of("x2")] == t.index_of("x0"));
    }
}

TEST_CASE("rabbit tree has one branch point") {
    auto t = build_hubbard_tree(PcfSpec::superattracting(Angle(1, 7)));
    REQUIRE(t.find("b0"));
    CHECK(nu(t, "b0") == 3);
    CHECK(t.vertices[t.index_of("b0")].angles ==
          std::vector<Angle>{Angle(1, 7), Angle(2, 7), Angle(4, 7)});
    CHECK(t.dynamics[t.index_of("b0")] == t.index_of("b0"));
    CHECK(root_angles(t, "x1")[0].angles == std::make_pair(Angle(1, 7), Angle(2, 7)));
}

TEST_CASE("nu pattern on every cycle of period up to 6") {
    for (unsigned p = 2; p <= 6; ++p) {
        BigInt den = (BigInt(1) << p) - 1;
        for (BigInt k = 1; k < den; ++k) {
            Angle theta(k, den);
            if (orbit_info(theta).period != p) continue;
            auto t = build_hubbard_tree(PcfSpec::superattracting(theta));
            std::vector<std::size_t> pattern;
            for (std::size_t i = 1; i <= p; ++i)
                pattern.push_back(t.vertices[*t.orbit_vertex(static_cast<int>(i % p))].nu);
            // nu = 1 on x_1 .. x_r, nu = 2 afterwards, 2 <= r <= p.
            std::size_t r = 0;
            while (r < p && pattern[r] == 1) ++r;
            bool ok = r >= 2;
            for (std::size_t i = r; i < p; ++i) ok = ok && pattern[i] == 2;
            CHECK_MESSAGE(ok, theta.str());
            // The tree dynamics has exact period p on the critical cycle.
            std::size_t v = *t.orbit_vertex(0), steps = 0;
            do {
                v = t.dynamics[v];
                ++steps;
            } while (v != *t.orbit_vertex(0) && steps <= p);
            CHECK(steps == p);
            CHECK(t.edges.size() + 1 == t.vertices.size());
            for (std::size_t i = 0; i < t.vertices.size(); ++i) {
                const auto& hv = t.vertices[i];
                CHECK(hv.nu == t.neighbours(i).size());
                // Root rays are rational and land together.  Their period need not
                // be a multiple of p: tuned cycles touch points of lower period.
                for (const auto& r : hv.roots) {
                    CHECK(orbit_info(r.angles.first).period <= p);
                    const auto& cls = r.class_angles;
                    CHECK(std::find(cls.begin(), cls.end(), r.angles.second) != cls.end());
                }
            }
        }
    }
}

TEST_CASE("Chebyshev tree") {
    auto t = build_hubbard_tree(PcfSpec::misiurewicz(Angle(1, 2)));
    CHECK(t.vertices.size() == 2);
    CHECK(edge_ids(t) == std::vector<std::string>{"x1-x2"});
    CHECK(misiurewicz_angles(t, "x1") == std::vector<Angle>{Angle(1, 2)});
    CHECK(misiurewicz_angles(t, "x2") == std::vector<Angle>{Angle()});
    CHECK(t.dynamics[t.index_of("x2")] == t.index_of("x2"));
    CHECK_THROWS_AS(root_angles(t, "x1"), std::invalid_argument);
}

TEST_CASE("real Misiurewicz fixture 5/12") {
    auto t = build_hubbard_tree(PcfSpec::misiurewicz(Angle(5, 12)));
    CHECK(edge_ids(t) == std::vector<std::string>{"x1-x3", "x2-x3"});
    CHECK(misiurewicz_angles(t, "x3") == std::vector<Angle>{Angle(1, 3), Angle(2, 3)});
    CHECK(misiurewicz_angles(t, "x1").front() == Angle(5, 12));
    CHECK(nu(t, "x3") == 2);
}

TEST_CASE("tripod for angle 1/6") {
    auto t = build_hubbard_tree(PcfSpec::misiurewicz(Angle(1, 6)));
    CHECK(t.vertices.size() == 4);
    CHECK(edge_ids(t) == std::vector<std::string>{"b0-x1", "b0-x2", "b0-x3"});
    CHECK(misiurewicz_angles(t, "b0").size() == 3);
}

TEST_CASE("tree JSON") {
    auto j = build_hubbard_tree(PcfSpec::superattracting(Angle(3, 7))).to_json();
    CHECK(j["vertices"].size() == 3);
    CHECK(j["edges"].size() == 2);
    CHECK(j["dynamics"]["x1"] == "x2");
    CHECK(j["vertices"][2]["roots"][0]["angles"][0] == "3/14");
}
